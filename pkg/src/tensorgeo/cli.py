"""Command-line surface: invariant suites, flop audits, benchmarks, geodesics.

Subcommands
    verify    run a named invariant suite, exit 1 on any failure
    flops     audit one instrumented geodesic against the published counts
    bench     time the per-mode update across a sweep of mode sizes (CSV)
    geodesic  evaluate a geodesic on serialized point/tangent files

Exit codes: 0 pass, 1 invariant failure, 2 usage or parse error.  All
outputs are deterministic given --seed; wall-time fields are exempt.
"""

import argparse
import json
import sys

import numpy as np

from . import homogeneous as hq
from . import io as tio
from .audit import CSV_HEADER, audit_geodesic, bench_sweep, make_shape, \
    random_point_and_tangent
from .dense import mode_apply, multilinear_rank, tt_rank
from .flops import FlopLedger, psi1_count
from .group import HorizontalBlocks, gamma12, lowrank_geodesic_step, \
    mode_velocity_norms, reduce_columns
from .oracles import dense_geodesic, mexp_dense, psi1_series, contract_cp
from .psi import LowRankPair, inv_lowrank_update, make_scaling_plan, \
    mexp_lowrank, mexp_small, psi1, psi1_pade


# ---------------------------------------------------------------------------
# verify suites

def _check(name, value, tol):
    return {"name": name, "value": float(value), "tol": float(tol),
            "passed": bool(value <= tol)}


def _suite_psi(rng, tol_scale):
    checks = []
    worst = 0.0
    for k in range(1, 7):
        for _ in range(200):
            m = rng.standard_normal((k, k))
            nrm = np.linalg.norm(m)
            m *= rng.uniform(0.0, 0.5) / max(nrm, 1e-300)
            dev = np.linalg.norm(psi1_pade(m).astype(np.longdouble)
                                 - psi1_series(m))
            worst = max(worst, float(dev))
    checks.append(_check("pade_vs_series_max", worst, 1e-15 * tol_scale))

    worst = 0.0
    for _ in range(20):
        m = rng.standard_normal((6, 6))
        m *= rng.uniform(0.1, 20.0) / np.linalg.norm(m)
        e = mexp_small(m)
        res = np.linalg.norm(m @ psi1(m) - (e - np.eye(6)))
        worst = max(worst, res / (1.0 + np.linalg.norm(e)))
    checks.append(_check("psi1_defining_identity", worst, 1e-12 * tol_scale))

    plan_ok = (make_scaling_plan(3.0).z == 4 and make_scaling_plan(0.3).z == 0
               and make_scaling_plan(0.6).z == 2)
    checks.append(_check("scaling_plan_examples", 0.0 if plan_ok else 1.0, 0.5))

    ok = True
    for k, z in ((3, 2), (4, 5)):
        m = rng.standard_normal((k, k))
        m *= (3.0 * 2.0 ** (z - 4)) / np.linalg.norm(m)
        led = FlopLedger()
        psi1(m, led)
        ok = ok and led.total == psi1_count(k, z)
    checks.append(_check("psi1_ledger_exact", 0.0 if ok else 1.0, 0.5))

    n, k = 60, 4
    pair = LowRankPair(rng.standard_normal((n, k)), rng.standard_normal((k, n)))
    rel = np.linalg.norm(mexp_lowrank(pair).densify()
                         - mexp_dense(pair.left @ pair.right))
    rel /= np.linalg.norm(mexp_dense(pair.left @ pair.right))
    checks.append(_check("lowrank_exp_vs_dense", rel, 1e-12 * tol_scale))

    upd = inv_lowrank_update(pair)
    res = np.linalg.norm((np.eye(n) + pair.left @ pair.right) @ upd.densify()
                         - np.eye(n))
    checks.append(_check("lowrank_inverse_defining", res, 1e-11 * tol_scale))
    return checks


def _suite_gl(rng, tol_scale):
    checks = []
    n, k = 14, 3
    blocks = reduce_columns(np.linalg.qr(rng.standard_normal((n, k)))[0])
    gam = gamma12(blocks)
    g11, g21 = blocks.g11, blocks.g21
    gi = np.linalg.inv(g11)
    dense = gi @ gi.T @ g21.T @ np.linalg.inv(
        np.eye(n - k) + g21 @ gi @ gi.T @ g21.T)
    checks.append(_check("gamma12_defining_relation",
                         np.abs(gam - dense).max(), 1e-12 * tol_scale))

    tb = HorizontalBlocks(rng.standard_normal((k, k)),
                          rng.standard_normal((n - k, k)), gam)
    stepped, _ = lowrank_geodesic_step(blocks, tb, 0.8)
    ghat = blocks.densify()
    xhat = np.zeros((n, n))
    xhat[blocks.perm] = tb.densify_permuted()
    cols = dense_geodesic([ghat], [xhat], 0.8)[0][:, :k]
    rel = np.linalg.norm(stepped.leading_columns() - cols) / np.linalg.norm(cols)
    checks.append(_check("lowrank_step_vs_dense_columns", rel, 1e-11 * tol_scale))

    speeds = []
    g = ghat
    h = 1e-6
    for t in (0.0, 0.5, 1.0, 2.0):
        gp = dense_geodesic([g], [xhat], t + h)[0]
        gm = dense_geodesic([g], [xhat], t - h)[0]
        speeds.append(np.linalg.norm((gp - gm) / (2 * h) @ np.linalg.inv(
            dense_geodesic([g], [xhat], t)[0])))
    spread = (max(speeds) - min(speeds)) / speeds[0]
    checks.append(_check("constant_speed", spread, 1e-4 * tol_scale))

    small, big = mode_velocity_norms(blocks, tb)
    t_far = 100.0 / max(small, 1e-10)
    far, _ = lowrank_geodesic_step(blocks, tb, t_far, repivot_tol=0.0)
    sv = np.linalg.svd(far.g11, compute_uv=False)
    ok = np.all(np.isfinite(far.stacked())) and sv[-1] > 0.0
    checks.append(_check("completeness_far_time", 0.0 if ok else 1.0, 0.5))
    return checks


def _suite_manifold(kind, rng, tol_scale):
    from .oracles import contract_tt, contract_tucker
    checks = []
    if kind == "cp":
        shape = make_shape("cp", (8, 7, 6), (3,))
        square = make_shape("cp", (2, 2, 2), (2,))
        nonsq = make_shape("cp", (3, 3, 3), (2,))
        fix_tol = 1e-13
    elif kind == "tucker":
        shape = make_shape("tucker", (6, 4, 4), (4, 2, 2))
        square = make_shape("tucker", (4, 2, 2), (4, 2, 2))
        nonsq = make_shape("tucker", (5, 2, 2), (4, 2, 2))
        fix_tol = 1e-12
    else:
        shape = make_shape("tt", (6, 8, 5), (2, 2))
        square = make_shape("tt", (2, 4, 2), (2, 2))
        nonsq = make_shape("tt", (3, 4, 2), (2, 2))
        fix_tol = 1e-12

    ref = shape.reference_tensor()
    worst = 0.0
    for s in range(20):
        h = shape.stabilizer_sample(rng).group_element()
        worst = max(worst, float(np.abs(mode_apply(h, ref) - ref).max()))
    checks.append(_check("stabilizer_fixes_reference", worst, fix_tol * tol_scale))

    p, x = random_point_and_tangent(shape, rng)
    emb = hq.embed(p)
    cols = [mb.leading_columns() for mb in p.modes]
    if kind == "cp":
        oracle = contract_cp(cols)
    elif kind == "tucker":
        oracle = contract_tucker(shape.core_identity(), cols)
    else:
        oracle = contract_tt(shape.cores_from_columns(cols))
    checks.append(_check("embed_vs_naive_contraction",
                         np.abs(emb - oracle).max() / np.abs(oracle).max(),
                         1e-12 * tol_scale))

    if kind == "tt":
        rk_ok = tt_rank(emb) == shape.ranks
    else:
        rk_ok = multilinear_rank(emb) == shape.ks
    checks.append(_check("embedded_rank", 0.0 if rk_ok else 1.0, 0.5))

    g = hq.densify(p)
    xa = hq.lift_tangent(p, x)
    led = FlopLedger()
    q, zs = hq.geodesic(p, x, 1.0, led)
    cols_d = dense_geodesic(g, xa, 1.0)
    emb_d = shape.embed_columns([f[:, :k] for f, k in zip(cols_d, shape.ks)])
    emb_l = hq.embed(q)
    checks.append(_check("geodesic_vs_dense_oracle",
                         np.linalg.norm(emb_l - emb_d) / np.linalg.norm(emb_d),
                         1e-10 * tol_scale))

    from .flops import geodesic_formula
    residual = led.total - geodesic_formula(shape.dims, shape.ks,
                                            [max(1, z) for z in zs])
    slack = 100 * sum(n * k + k * k for n, k in zip(shape.dims, shape.ks))
    checks.append(_check("flop_total_vs_formula", abs(float(residual)), slack))

    rep_sq = hq.reductive_check(square, 25, int(rng.integers(1 << 31)))
    checks.append(_check("reductive_square_invariance",
                         rep_sq.max_invariance_residual, 1e-12 * tol_scale))
    rep_ns = hq.reductive_check(nonsq, 25, int(rng.integers(1 << 31)))
    checks.append(_check("reductive_witness_found",
                         0.0 if rep_ns.witness_residual >= 0.05 else 1.0, 0.5))

    h = shape.stabilizer_sample(rng).group_element()
    p2 = hq.transport_point(p, h)
    x2 = hq.project_horizontal(p2, hq.transport_tangent(xa, h))
    e1 = hq.embed(hq.geodesic(p, x, 1.0)[0])
    e2 = hq.embed(hq.geodesic(p2, type(x)(x2.modes), 1.0)[0])
    checks.append(_check("representative_independence",
                         np.linalg.norm(e1 - e2) / np.linalg.norm(e1),
                         1e-8 * tol_scale))
    return checks


SUITES = {
    "psi": lambda rng, ts: _suite_psi(rng, ts),
    "gl": lambda rng, ts: _suite_gl(rng, ts),
    "cp": lambda rng, ts: _suite_manifold("cp", rng, ts),
    "tucker": lambda rng, ts: _suite_manifold("tucker", rng, ts),
    "tt": lambda rng, ts: _suite_manifold("tt", rng, ts),
}


def cmd_verify(args, out):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    report = {"command": "verify", "seed": args.seed, "suites": []}
    ok = True
    for name in names:
        rng = np.random.default_rng(args.seed)
        checks = SUITES[name](rng, args.tol_scale)
        passed = all(c["passed"] for c in checks)
        ok = ok and passed
        report["suites"].append({"suite": name, "passed": passed,
                                 "checks": checks})
    report["passed"] = ok
    out.write(json.dumps(report, indent=2) + "\n")
    return 0 if ok else 1


def cmd_flops(args, out):
    res = audit_geodesic(args.manifold, args.dims, args.ranks, args.z,
                         seed=args.seed)
    if args.format == "json":
        payload = {
            "command": "flops", "manifold": res.manifold,
            "dims": list(res.dims), "ks": list(res.ks), "z": list(res.zs),
            "rows": [{"mode": r.mode, "item": r.label,
                      "recorded": str(r.recorded), "expected": str(r.expected),
                      "exact": r.exact} for r in res.rows],
            "ledger_total": str(res.ledger_total),
            "formula": str(res.formula_total),
            "residual": str(res.residual), "slack": str(res.slack),
            "all_exact": res.all_exact, "within_slack": res.within_slack,
        }
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        out.write(f"# manifold={res.manifold} dims={res.dims} ks={res.ks} "
                  f"z={res.zs}\n")
        out.write("mode,item,recorded,expected,exact\n")
        for r in res.rows:
            out.write(f"{r.mode},{r.label},{r.recorded},{r.expected},"
                      f"{str(r.exact).lower()}\n")
        out.write(f"total,ledger,{res.ledger_total},,\n")
        out.write(f"total,formula,{res.formula_total},,\n")
        out.write(f"total,residual,{res.residual},slack,{res.slack}\n")
    return 0 if (res.all_exact and res.within_slack) else 1


def cmd_bench(args, out):
    rows = bench_sweep(args.manifold, args.rank, args.sizes,
                       trials=args.trials, seed=args.seed,
                       oracle_cap=args.oracle_cap)
    if args.format == "json":
        payload = {"command": "bench", "header": CSV_HEADER,
                   "rows": [{"manifold": r.manifold, "n": r.n, "r": r.r,
                             "z": r.z, "flops_model": str(r.flops_model),
                             "time_median_s": r.time_median_s,
                             "seed": r.seed} for r in rows]}
        out.write(json.dumps(payload, indent=2) + "\n")
        return 0
    out.write(CSV_HEADER + "\n")
    for r in rows:
        out.write(r.csv_row() + "\n")
    return 0


def cmd_geodesic(args, out):
    try:
        point = tio.read_point(args.point)
        tangent = tio.read_tangent(args.tangent, point)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except tio.FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    res = hq.horizontality_residual(point, tangent)
    if res > args.tol:
        print(f"tangent is not horizontal: residual {res:.3e} exceeds "
              f"tolerance {args.tol:.3e}", file=sys.stderr)
        return 1
    new_point, _ = hq.geodesic(point, tangent, args.t)
    text = tio.dump_point(new_point)
    if args.out_file:
        with open(args.out_file, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="tensorgeo",
        description="Fixed-rank tensor manifolds: invariant suites, flop "
                    "audits, benchmarks, and geodesic evaluation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("suite", choices=["psi", "gl", "cp", "tucker", "tt", "all"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", dest="tol_scale", type=float, default=1.0,
                   help="scale factor applied to every suite tolerance")
    p.add_argument("--out", default=None)

    p = sub.add_parser("flops", help="audit one instrumented geodesic")
    p.add_argument("--manifold", choices=["cp", "tucker", "tt"], required=True)
    p.add_argument("--dims", type=int, nargs="+", required=True)
    p.add_argument("--ranks", type=int, nargs="+", required=True)
    p.add_argument("--z", type=int, nargs="+", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", default=None)

    p = sub.add_parser("bench", help="timing sweep of the per-mode update")
    p.add_argument("--manifold", choices=["cp", "tucker", "tt"], default="cp")
    p.add_argument("--rank", type=int, default=5)
    p.add_argument("--sizes", type=int, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--oracle-cap", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", default=None)

    p = sub.add_parser("geodesic", help="geodesic on serialized files")
    p.add_argument("point")
    p.add_argument("tangent")
    p.add_argument("-t", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--out", dest="out_file", default=None)
    p.add_argument("--seed", type=int, default=0)

    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    out_path = getattr(args, "out", None)
    if args.command == "geodesic":
        out_path = None
    if out_path:
        with open(out_path, "w") as fh:
            return _dispatch(args, fh)
    return _dispatch(args, sys.stdout)


def _dispatch(args, out):
    if args.command == "verify":
        return cmd_verify(args, out)
    if args.command == "flops":
        return cmd_flops(args, out)
    if args.command == "bench":
        return cmd_bench(args, out)
    return cmd_geodesic(args, out)


if __name__ == "__main__":
    sys.exit(main())
