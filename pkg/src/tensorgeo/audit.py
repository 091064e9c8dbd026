"""Flop audits against the published counts, and timing benchmarks.

An audit runs one instrumented geodesic, scales the tangent mode by mode so
each mode lands on a requested scaling exponent, and compares every recorded
ledger line with its published itemization value as exact rationals.  A
benchmark times the per-mode low-rank update across a sweep of mode sizes,
optionally alongside the dense-oracle path.
"""

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import homogeneous as hq
from .cp import CpShape, cp_random_horizontal, cp_random_point
from .flops import FlopLedger, geodesic_formula, mode_step_items
from .group import (HorizontalBlocks, ModeBlocks, gamma12,
                    lowrank_geodesic_step, mode_velocity_norms,
                    reduce_columns)
from .tt import TtShape, tt_random_horizontal, tt_random_point
from .tucker import TuckerShape, tucker_random_horizontal, tucker_random_point

STEP_LABELS = {
    "gamma12": "build Gamma12",
    "build_B": "build B",
    "BA": "multiply B and A",
    "psi1_BA": "evaluate psi1(BA)",
    "BpAp": "multiply B' and A'",
    "psi1_BpAp": "evaluate psi1(B'A')",
    "term2": "second term",
    "term3": "third term",
    "term4": "fourth term",
}

CSV_HEADER = "manifold,n,r,z,flops_model,time_median_s,seed"


def make_shape(manifold, dims, ranks):
    if manifold == "cp":
        if len(ranks) != 1:
            raise ValueError("cp shapes take a single rank")
        return CpShape(dims, ranks[0])
    if manifold == "tucker":
        return TuckerShape(dims, ranks)
    if manifold == "tt":
        return TtShape(dims, ranks)
    raise ValueError(f"unknown manifold '{manifold}'")


def random_point_and_tangent(shape, rng):
    if shape.name == "cp":
        p = cp_random_point(shape, rng)
        x = cp_random_horizontal(p, rng)
    elif shape.name == "tucker":
        p = tucker_random_point(shape, rng)
        x = tucker_random_horizontal(p, rng)
    else:
        p = tt_random_point(shape, rng)
        x = tt_random_horizontal(p, rng)
    return p, x


def pin_mode_exponents(point, tangent, z_targets):
    """Rescale each mode so its shared psi1 exponent is exactly z_i >= 2.

    The update derives z from the larger of ||BA|| and ||B'A'||.  The second
    is bounded below by ||B B^T|| independently of the tangent, and B scales
    inversely with the representative's columns, so each mode first inflates
    its column blocks enough to push that floor below the target norm
    3 * 2^(z-4) and then bisects the tangent scale onto the target, which
    sits strictly inside the exponent's bin.  Returns a rebuilt (point,
    tangent) pair; counts depend only on dimensions and z, so the changed
    base point is immaterial to the audit.
    """
    new_blocks = []
    new_tb = []
    for mb, tb, z in zip(point.modes, tangent.modes, z_targets):
        if z < 2:
            raise ValueError("target exponents must be >= 2")
        target = 3.0 * 2.0 ** (z - 4)
        floor = mode_velocity_norms(mb, tb.scale(0.0))[1]
        lam = max(1.0, np.sqrt(floor / (0.45 * target)))
        mb = ModeBlocks(mb.perm, lam * mb.g11, lam * mb.g21)
        top = lambda s: max(mode_velocity_norms(mb, tb.scale(s)))
        lo, hi = 0.0, 1.0
        while top(hi) < target:
            hi *= 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if top(mid) < target:
                lo = mid
            else:
                hi = mid
        new_blocks.append(mb)
        new_tb.append(tb.scale(hi))
    return (type(point)(point.shape, tuple(new_blocks)),
            type(tangent)(new_tb))


@dataclass
class AuditRow:
    mode: int
    item: str
    label: str
    recorded: Fraction
    expected: Fraction

    @property
    def exact(self):
        return self.recorded == self.expected


@dataclass
class AuditResult:
    manifold: str
    dims: tuple
    ks: tuple
    zs: list
    rows: list
    ledger_total: Fraction
    formula_total: Fraction
    residual: Fraction
    slack: Fraction

    @property
    def all_exact(self):
        return all(r.exact for r in self.rows)

    @property
    def within_slack(self):
        return abs(self.residual) <= self.slack


def audit_geodesic(manifold, dims, ranks, z_targets, seed=0, t=1.0):
    """One instrumented geodesic with pinned exponents, line-by-line audit."""
    shape = make_shape(manifold, tuple(dims), tuple(ranks))
    if len(z_targets) != len(shape.dims):
        raise ValueError("need one z per mode")
    rng = np.random.default_rng(seed)
    point, tangent = random_point_and_tangent(shape, rng)
    point, tangent = pin_mode_exponents(point, tangent, z_targets)
    ledger = FlopLedger()
    _, zs = hq.geodesic(point, tangent, t, ledger)
    rows = []
    for i, (n, k) in enumerate(zip(shape.dims, shape.ks)):
        for item, expected in mode_step_items(n, k, zs[i]):
            rows.append(AuditRow(i, item, STEP_LABELS[item],
                                 ledger.per_step[f"mode{i}.{item}"], expected))
    formula = geodesic_formula(shape.dims, shape.ks, zs)
    slack = Fraction(100) * sum(n * k + k * k
                                for n, k in zip(shape.dims, shape.ks))
    return AuditResult(manifold, shape.dims, shape.ks, zs, rows,
                       ledger.total, formula, ledger.total - formula, slack)


# ---------------------------------------------------------------------------
# timing

@dataclass
class BenchRecord:
    manifold: str
    n: int
    r: int
    z: int
    flops_model: Fraction
    time_median_s: float
    seed: int

    def csv_row(self):
        return (f"{self.manifold},{self.n},{self.r},{self.z},"
                f"{self.flops_model},{self.time_median_s:.6g},{self.seed}")


def _single_mode_instance(n, k, rng):
    """Blocks and tangent for one mode of size n with k leading columns."""
    q = np.linalg.qr(rng.standard_normal((n, k)))[0]
    blocks = reduce_columns(q * rng.uniform(0.7, 1.4, size=k))
    tb = HorizontalBlocks(rng.standard_normal((k, k)),
                          rng.standard_normal((n - k, k)),
                          gamma12(blocks))
    return blocks, tb


def time_lowrank_mode(n, r, trials=5, seed=0):
    """Median wall time of one per-mode low-rank update; returns (record, z)."""
    rng = np.random.default_rng(seed)
    blocks, tb = _single_mode_instance(n, r, rng)
    lowrank_geodesic_step(blocks, tb, 1.0)  # warm-up
    times = []
    z_seen = 0
    for _ in range(max(5, trials)):
        t0 = time.perf_counter()
        _, z_seen = lowrank_geodesic_step(blocks, tb, 1.0)
        times.append(time.perf_counter() - t0)
    from .flops import mode_step_total
    rec = BenchRecord("mode", n, r, z_seen,
                      mode_step_total(n, r, max(1, z_seen)),
                      float(np.median(times)), seed)
    return rec


def time_dense_mode(n, r, trials=5, seed=0):
    """Median wall time of the dense per-mode geodesic (oracle path)."""
    from .oracles import dense_geodesic
    rng = np.random.default_rng(seed)
    g = np.eye(n) + 0.3 * rng.standard_normal((n, n)) / np.sqrt(n)
    x = rng.standard_normal((n, n)) / np.sqrt(n)
    dense_geodesic([g], [x], 1.0)  # warm-up
    times = []
    for _ in range(max(5, trials)):
        t0 = time.perf_counter()
        dense_geodesic([g], [x], 1.0)
        times.append(time.perf_counter() - t0)
    return BenchRecord("dense", n, r, 0, Fraction(0),
                       float(np.median(times)), seed)


def bench_sweep(manifold, r, ns, trials=5, seed=0, oracle_cap=400):
    """Low-rank sweep over mode sizes plus dense rows where affordable."""
    if list(ns) != sorted(ns):
        raise ValueError("sweep sizes must be ascending")
    rows = []
    for n in ns:
        rec = time_lowrank_mode(n, r, trials, seed)
        rows.append(BenchRecord(manifold, n, r, rec.z, rec.flops_model,
                                rec.time_median_s, seed))
    for n in ns:
        if n <= oracle_cap:
            rec = time_dense_mode(n, r, trials, seed)
            rows.append(BenchRecord(manifold + "_dense", n, r, 0,
                                    Fraction(0), rec.time_median_s, seed))
    return rows
