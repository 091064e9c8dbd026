"""The manifold of tensors with multilinear rank (t_1, ..., t_d), t_1 = t_2...t_d.

Only the case where the first rank equals the product of the others is a
single group orbit; other rank tuples are rejected at shape construction
with the closed admissibility window for t_1.  Mode 0 is the distinguished
large mode; inputs with the large mode elsewhere must be permuted by the
caller.

The stabilizer couples the leading block of mode 0 to the inverse-transpose
Kronecker product of the other modes' leading blocks, which makes the
complement's leading blocks satisfy partial-trace conditions: every L_i is
the slot-i partial trace (transposed) of L_1.
"""

from dataclasses import dataclass
from functools import reduce
import math

import numpy as np

from . import homogeneous as hq
from .dense import mode_product, unfold
from .flops import geodesic_formula
from .group import GroupElement

__all__ = [
    "TuckerShape", "TuckerPoint", "TuckerTangent", "TuckerStabilizerSample",
    "t1_window", "tucker_reference_tensor", "tucker_point_from_decomposition",
    "tucker_embed", "tucker_stabilizer_sample", "tucker_partial_trace",
    "tucker_m_membership", "tucker_project_horizontal", "tucker_geodesic",
    "tucker_flop_formula", "tucker_reductive_check",
    "tucker_random_decomposition", "tucker_random_point",
    "tucker_random_horizontal",
]


def t1_window(t_rest):
    """Admissible closed interval for the first rank given the others.

    Counting parameters of the orbit construction bounds the first rank from
    below by (P + sqrt(P^2 - 4 S))/2 with P the product and S the sum of
    squares of the remaining ranks, and from above by P.  Returned as
    integers (ceiling on the left edge).  When the quadratic has no real
    roots the lower constraint is vacuous and the window is [1, P].
    """
    t_rest = [int(t) for t in t_rest]
    prod = reduce(lambda a, b: a * b, t_rest, 1)
    ssum = sum(t * t for t in t_rest)
    disc = prod * prod - 4 * ssum
    if disc < 0:
        return 1, prod
    low = math.ceil((prod + math.sqrt(disc)) / 2.0 - 1e-12)
    return low, prod


@dataclass(frozen=True)
class TuckerShape:
    dims: tuple
    ranks: tuple

    def __init__(self, dims, ranks):
        dims = tuple(int(n) for n in dims)
        ranks = tuple(int(t) for t in ranks)
        if len(dims) < 3 or len(dims) != len(ranks):
            raise ValueError("need d >= 3 matching dims and ranks")
        if any(n < 2 for n in dims) or any(t < 1 for t in ranks):
            raise ValueError("mode sizes must be >= 2 and ranks >= 1")
        if any(t > n for t, n in zip(ranks, dims)):
            raise ValueError("ranks cannot exceed mode sizes")
        prod = reduce(lambda a, b: a * b, ranks[1:], 1)
        if ranks[0] != prod:
            low, high = t1_window(ranks[1:])
            raise ValueError(
                f"unsupported multilinear rank: the first rank must equal the "
                f"product of the others ({prod}); the admissible window for "
                f"these trailing ranks is [{low}, {high}]")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "ranks", ranks)

    name = "tucker"

    @property
    def ks(self):
        return self.ranks

    @property
    def d(self):
        return len(self.dims)

    def core_identity(self):
        t1 = self.ranks[0]
        return np.eye(t1).reshape((t1,) + self.ranks[1:])

    def reference_tensor(self):
        t = np.zeros(self.dims)
        corner = tuple(slice(0, k) for k in self.ranks)
        t[corner] = self.core_identity()
        return t

    def embed_columns(self, cols):
        return mode_product(cols, self.core_identity())

    def coupled_upper_basis(self):
        """For each trailing mode m and unit block E: +E in mode m and
        -(I x ... x E^T x ... x I) in the slot of mode m inside mode 0."""
        out = []
        trest = self.ranks[1:]
        for m in range(1, self.d):
            tm = self.ranks[m]
            for p in range(tm):
                for q in range(tm):
                    e = np.zeros((tm, tm))
                    e[p, q] = 1.0
                    mats = [np.eye(t) for t in trest]
                    mats[m - 1] = e.T
                    chain = reduce(np.kron, mats)
                    elem = [None] * self.d
                    elem[m] = e
                    elem[0] = -chain
                    out.append(tuple(elem))
        return out

    def stabilizer_sample(self, rng):
        return _sample_stabilizer(self, rng)

    def witness_element(self, rng, scale=1.0):
        factors = [np.eye(n) for n in self.dims]
        for i, (n, k) in enumerate(zip(self.dims, self.ks)):
            if n > k:
                factors[i][:k, k:] = scale * rng.standard_normal((k, n - k))
                break
        return GroupElement(factors)


@dataclass(frozen=True, eq=False)
class TuckerPoint:
    shape: TuckerShape
    modes: tuple


class TuckerTangent(hq.ManifoldTangent):
    pass


@dataclass(frozen=True, eq=False)
class TuckerStabilizerSample:
    """Invertible leading blocks of the trailing modes; mode 0 carries their
    inverse-transpose Kronecker chain.  Shears and trailing blocks are free."""
    leading: tuple      # A_i for trailing modes, in mode order 1..d-1
    shears: tuple
    trailing: tuple

    def group_element(self):
        kron = reduce(np.kron, [np.linalg.inv(a).T for a in self.leading])
        blocks = [kron] + list(self.leading)
        factors = []
        for ul, m, b in zip(blocks, self.shears, self.trailing):
            k = ul.shape[0]
            n = k + b.shape[0]
            h = np.zeros((n, n))
            h[:k, :k] = ul
            h[:k, k:] = m
            h[k:, k:] = b
            factors.append(h)
        return GroupElement(factors)


def _sample_stabilizer(shape, rng):
    leading = []
    for t in shape.ranks[1:]:
        leading.append(np.eye(t) + 0.4 * rng.standard_normal((t, t)))
    shears, trailing = [], []
    for n, k in zip(shape.dims, shape.ks):
        shears.append(rng.standard_normal((k, n - k)))
        trailing.append(np.eye(n - k) + 0.4 * rng.standard_normal((n - k, n - k)))
    return TuckerStabilizerSample(tuple(leading), tuple(shears), tuple(trailing))


# ---------------------------------------------------------------------------

def tucker_reference_tensor(shape):
    """Identity core contracted with truncated-identity factors."""
    return shape.reference_tensor()


def tucker_point_from_decomposition(core, factors):
    """Point embedding to the given Tucker decomposition.

    The mode-0 unfolding of the core must be invertible (the tensor has full
    first rank) and every factor must have full column rank.
    """
    core = np.asarray(core, dtype=float)
    factors = [np.asarray(g, dtype=float) for g in factors]
    shape = TuckerShape(tuple(g.shape[0] for g in factors), core.shape)
    c1 = unfold(core, 0)
    s = np.linalg.svd(c1, compute_uv=False)
    if s[-1] <= 1e-10 * s[0]:
        raise ValueError("the core's mode-0 unfolding is singular: the "
                         "multilinear rank is below the requested first rank")
    cols = [factors[0] @ c1] + factors[1:]
    return hq.point_from_columns(shape, cols, TuckerPoint)


def tucker_embed(p):
    return hq.embed(p)


def tucker_stabilizer_sample(shape, seed=0):
    return _sample_stabilizer(shape, np.random.default_rng(seed))


def tucker_partial_trace(l1, trest, slot):
    """Transpose of the partial trace of l1 over all slots except ``slot``.

    l1 acts on the tensor product of the trailing-rank spaces; slot counts
    from 0 within that product.
    """
    trest = tuple(trest)
    m = len(trest)
    cur = np.asarray(l1).reshape(trest + trest)
    cur_m = m
    cur_slot = slot
    for j in sorted([j for j in range(m) if j != slot], reverse=True):
        cur = np.trace(cur, axis1=j, axis2=j + cur_m)
        cur_m -= 1
        if j < cur_slot:
            cur_slot -= 1
    return cur.T


def tucker_m_membership(shape, x, tol=1e-10):
    """True iff x has the complement's block pattern and trace conditions.

    Pattern: upper-right and lower-right blocks vanish; leading blocks L_i of
    the trailing modes equal the slot-i partial trace of mode 0's block.
    """
    factors = getattr(x, "factors", x)
    scale = 1.0 + max(float(np.abs(np.asarray(f)).max()) for f in factors)
    for i, xi in enumerate(factors):
        xi = np.asarray(xi)
        k = shape.ks[i]
        if xi[:k, k:].size and np.abs(xi[:k, k:]).max() > tol * scale:
            return False
        if xi[k:, k:].size and np.abs(xi[k:, k:]).max() > tol * scale:
            return False
    l1 = np.asarray(factors[0])[: shape.ranks[0], : shape.ranks[0]]
    for m in range(1, shape.d):
        k = shape.ranks[m]
        lm = np.asarray(factors[m])[:k, :k]
        want = tucker_partial_trace(l1, shape.ranks[1:], m - 1)
        if np.abs(lm - want).max() > tol * scale:
            return False
    return True


def tucker_project_horizontal(p, z):
    return TuckerTangent(hq.project_horizontal(p, z).modes)


def tucker_geodesic(p, x, t=1.0, ledger=None):
    q, _ = hq.geodesic(p, x, t, ledger)
    return q


def tucker_flop_formula(shape, zs):
    return geodesic_formula(shape.dims, shape.ks, zs)


def tucker_reductive_check(shape, trials=100, seed=0):
    return hq.reductive_check(shape, trials, seed)


def tucker_random_decomposition(shape, rng):
    """Well-conditioned random core and factors."""
    t1 = shape.ranks[0]
    u = np.linalg.qr(rng.standard_normal((t1, t1)))[0]
    v = np.linalg.qr(rng.standard_normal((t1, t1)))[0]
    c1 = u @ np.diag(rng.uniform(0.6, 1.6, size=t1)) @ v.T
    core = c1.reshape(shape.ranks)
    factors = []
    for n, t in zip(shape.dims, shape.ranks):
        q = np.linalg.qr(rng.standard_normal((n, t)))[0]
        factors.append(q * rng.uniform(0.7, 1.4, size=t))
    return core, factors


def tucker_random_point(shape, rng):
    core, factors = tucker_random_decomposition(shape, rng)
    return tucker_point_from_decomposition(core, factors)


def tucker_random_horizontal(p, rng, scale=1.0):
    t = hq.random_horizontal(p, rng, scale)
    return TuckerTangent(t.modes)
