"""Shared machinery of the three fixed-rank quotient constructions.

Each manifold is described by a shape object providing the per-mode leading
column counts ``ks``, a reference tensor, an embedding of leading columns,
a basis of the coupled (cross-mode) sector of the stabilizer algebra, and a
stabilizer sampler.  Everything else lives here: compact points, embeddings,
vertical spaces, the horizontal projection, geodesics, representative
transport, and the reductivity probes.

The stabilizer algebra at the identity splits per mode into a free sector
(arbitrary blocks in the trailing columns) and a low-dimensional coupled
sector tying the leading diagonal blocks of different modes together.  In
the metric's flat coordinates w = X g^-1 the free sector of the vertical
space at g is exactly { w : w G1 = 0 } with G1 the leading columns of g, so
its orthogonal complement is closed form; only the coupled sector needs a
small Gram solve.  This realizes the orthogonal projection exactly without
enumerating the O(n^2) free directions.
"""

from dataclasses import dataclass

import numpy as np

from .dense import perm_inverse
from .group import (AlgebraElement, GroupElement, HorizontalBlocks,
                    gamma12, lowrank_geodesic_step, reduce_columns)

GRAM_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class ManifoldTangent:
    """Horizontal tangent at a compact representative, one block set per mode."""
    modes: tuple

    def __init__(self, modes):
        object.__setattr__(self, "modes", tuple(modes))

    def scale(self, s):
        return type(self)(tuple(m.scale(s) for m in self.modes))

    def norm(self):
        """Frobenius norm of the stacked leading blocks (diagnostic only)."""
        return float(np.sqrt(sum(np.sum(m.stacked() ** 2) for m in self.modes)))


# ---------------------------------------------------------------------------
# points

def embed(point):
    """Dense tensor represented by a compact point."""
    cols = [mb.leading_columns() for mb in point.modes]
    return point.shape.embed_columns(cols)


def densify(point):
    """Ambient group element of the representative; test and oracle paths."""
    return GroupElement([mb.densify() for mb in point.modes])


def point_from_columns(shape, cols, cls):
    """Compact point from ambient leading-column matrices."""
    ks = shape.ks
    modes = []
    for i, c in enumerate(cols):
        c = np.asarray(c, dtype=float)
        if c.shape != (shape.dims[i], ks[i]):
            raise ValueError(f"mode {i}: expected shape "
                             f"{(shape.dims[i], ks[i])}, got {c.shape}")
        s = np.linalg.svd(c, compute_uv=False)
        if s[-1] <= 1e-8 * s[0]:
            raise ValueError(f"mode {i}: leading columns are numerically "
                             "rank-deficient; the tensor lies outside the orbit")
        modes.append(reduce_columns(c))
    return cls(shape, tuple(modes))


def lift_tangent(point, tangent):
    """Ambient dense tangent factors of a block tangent (test path)."""
    out = []
    for mb, tb in zip(point.modes, tangent.modes):
        xhat = tb.densify_permuted()
        out.append(xhat[perm_inverse(mb.perm)])
    return AlgebraElement(out)


def tangent_from_ambient(point, x_factors):
    """Block tangent from ambient per-mode tangent factors.

    Extracts the leading columns in the representative's frame and attaches
    the coupling block of the base point; the caller is responsible for the
    input being horizontal.
    """
    modes = []
    for mb, xi in zip(point.modes, x_factors):
        lead = np.asarray(xi)[:, :mb.k][mb.perm]
        modes.append(HorizontalBlocks(lead[:mb.k], lead[mb.k:], gamma12(mb)))
    return ManifoldTangent(modes)


# ---------------------------------------------------------------------------
# vertical structure

def _coupled_w_basis(point, g_factors, g_invs):
    """Coupled vertical directions in w-coordinates: g Y g^-1 per mode."""
    basis = []
    for elem in point.shape.coupled_upper_basis():
        ws = []
        for i, (g, gi) in enumerate(zip(g_factors, g_invs)):
            k = point.shape.ks[i]
            y = elem[i]
            if y is None:
                ws.append(np.zeros_like(g))
            else:
                # y is the k x k upper-left block; embed and conjugate
                ws.append((g[:, :k] @ y) @ gi[:k, :])
        basis.append(ws)
    return basis


def vertical_basis(point):
    """Spanning set of the vertical space at the representative.

    Ambient tangent vectors g Y, one per stabilizer-algebra basis element:
    the per-mode free sector (trailing-column blocks) plus the coupled
    sector.  Size grows like sum n_i^2; meant for small verification runs.
    """
    gfac = densify(point).factors
    dims, ks = point.shape.dims, point.shape.ks
    out = []
    for i, (n, k) in enumerate(zip(dims, ks)):
        for p in range(k):
            for q in range(n - k):
                y = np.zeros((n, n))
                y[p, k + q] = 1.0
                out.append(_one_mode_element(dims, i, gfac[i] @ y))
        for p in range(n - k):
            for q in range(n - k):
                y = np.zeros((n, n))
                y[k + p, k + q] = 1.0
                out.append(_one_mode_element(dims, i, gfac[i] @ y))
    for elem in point.shape.coupled_upper_basis():
        factors = []
        for i, n in enumerate(dims):
            k = ks[i]
            y = np.zeros((n, n))
            if elem[i] is not None:
                y[:k, :k] = elem[i]
            factors.append(gfac[i] @ y)
        out.append(AlgebraElement(factors))
    return out


def _one_mode_element(dims, mode, mat):
    return AlgebraElement([mat if i == mode else np.zeros((n, n))
                           for i, n in enumerate(dims)])


def vertical_dimension(shape):
    """dim H = sum_i n_i(n_i - k_i) + (number of coupled directions)."""
    free = sum(n * (n - k) for n, k in zip(shape.dims, shape.ks))
    return free + len(shape.coupled_upper_basis())


# ---------------------------------------------------------------------------
# horizontal projection

def project_horizontal(point, z):
    """Orthogonal projection of an ambient tangent onto the horizontal space.

    Returns a block tangent.  The free vertical sector is removed in closed
    form (rows of w onto the column span of the leading columns); the coupled
    sector is removed by a small Gram solve.  Raises if the Gram system is
    ill conditioned, which signals a near-degenerate representative.
    """
    zf = [np.asarray(f, dtype=float) for f in getattr(z, "factors", z)]
    g_factors = [mb.densify() for mb in point.modes]
    g_invs = [np.linalg.inv(g) for g in g_factors]
    ws = [zi @ gi for zi, gi in zip(zf, g_invs)]

    # closed-form removal of the free sector: keep row components in span(G1)
    spans = []
    for mb in point.modes:
        g1 = mb.leading_columns()
        spans.append(g1 @ np.linalg.solve(g1.T @ g1, g1.T))
    ws = [w @ p for w, p in zip(ws, spans)]

    coupled = _coupled_w_basis(point, g_factors, g_invs)
    if coupled:
        vperp = [[v @ p for v, p in zip(elem, spans)] for elem in coupled]
        m = len(vperp)
        gram = np.empty((m, m))
        rhs = np.empty(m)
        for a in range(m):
            rhs[a] = sum(np.sum(ws[i] * vperp[a][i]) for i in range(len(ws)))
            for b in range(a, m):
                gram[a, b] = gram[b, a] = sum(
                    np.sum(vperp[a][i] * vperp[b][i]) for i in range(len(ws)))
        if np.linalg.cond(gram) > GRAM_COND_LIMIT:
            raise ValueError("ill-conditioned Gram system: representative is "
                             "numerically degenerate")
        coef = np.linalg.solve(gram, rhs)
        for a in range(m):
            for i in range(len(ws)):
                ws[i] = ws[i] - coef[a] * vperp[a][i]

    x_factors = [w @ g for w, g in zip(ws, g_factors)]
    return tangent_from_ambient(point, x_factors)


def horizontality_residual(point, tangent):
    """Normalized residual of the horizontal conditions for a block tangent.

    Covers the coupling blocks against the representative's own and the
    orthogonality to the coupled vertical sector; the free-sector condition
    holds structurally for block tangents.
    """
    g_factors = [mb.densify() for mb in point.modes]
    g_invs = [np.linalg.inv(g) for g in g_factors]
    res = 0.0
    for mb, tb in zip(point.modes, tangent.modes):
        gam = gamma12(mb)
        res = max(res, float(np.abs(tb.gamma12 - gam).max()))
    x = lift_tangent(point, tangent)
    ws = [xi @ gi for xi, gi in zip(x.factors, g_invs)]
    scale = 1.0 + float(np.sqrt(sum(np.sum(w * w) for w in ws)))
    for elem in _coupled_w_basis(point, g_factors, g_invs):
        nrm = np.sqrt(sum(np.sum(v * v) for v in elem))
        ip = sum(np.sum(w * v) for w, v in zip(ws, elem))
        res = max(res, abs(ip) / (nrm * scale))
    return res


def vertical_component_norm(g_factors, shape, v_factors):
    """Norm of the vertical part of an ambient tangent at ambient factors.

    Used by the horizontality-preservation checks along dense geodesics,
    where no compact representative is available.
    """
    g_invs = [np.linalg.inv(np.asarray(g, dtype=float)) for g in g_factors]
    ws = [np.asarray(v) @ gi for v, gi in zip(v_factors, g_invs)]
    spans = []
    for g, k in zip(g_factors, shape.ks):
        g1 = np.asarray(g)[:, :k]
        spans.append(g1 @ np.linalg.solve(g1.T @ g1, g1.T))
    # free-sector component: rows outside span(G1)
    vert2 = float(sum(np.sum((w - w @ p) ** 2) for w, p in zip(ws, spans)))
    wperp = [w @ p for w, p in zip(ws, spans)]
    elems = []
    for elem in shape.coupled_upper_basis():
        vs = []
        for i, (g, gi) in enumerate(zip(g_factors, g_invs)):
            k = shape.ks[i]
            y = elem[i]
            v = (np.asarray(g)[:, :k] @ y) @ gi[:k, :] if y is not None \
                else np.zeros_like(gi)
            vs.append(v @ spans[i])
        elems.append(vs)
    if elems:
        m = len(elems)
        gram = np.empty((m, m))
        rhs = np.empty(m)
        for a in range(m):
            rhs[a] = sum(np.sum(wperp[i] * elems[a][i]) for i in range(len(ws)))
            for b in range(a, m):
                gram[a, b] = gram[b, a] = sum(
                    np.sum(elems[a][i] * elems[b][i]) for i in range(len(ws)))
        coef, *_ = np.linalg.lstsq(gram, rhs, rcond=None)
        # squared norm of the coupled-sector component
        vert2 += float(coef @ gram @ coef)
    return float(np.sqrt(vert2))


def random_horizontal(point, rng, scale=1.0):
    """Random horizontal tangent: project a Gaussian ambient tangent."""
    z = AlgebraElement([rng.standard_normal((n, n))
                        for n in point.shape.dims])
    t = project_horizontal(point, z)
    return t.scale(scale) if scale != 1.0 else t


# ---------------------------------------------------------------------------
# geodesics and transport

def geodesic(point, tangent, t=1.0, ledger=None, repivot_tol=None):
    """Quotient geodesic through the point with the given horizontal lift.

    One low-rank update per mode; returns (new point, per-mode scaling
    exponents).  ``repivot_tol = 0`` accepts representatives conditioned
    past the production re-pivot gate (long-time completeness probes).
    """
    from .group import REPIVOT_TOL
    if repivot_tol is None:
        repivot_tol = REPIVOT_TOL
    new_modes = []
    zs = []
    for i, (mb, tb) in enumerate(zip(point.modes, tangent.modes)):
        label = f"mode{i}."
        nb, z = lowrank_geodesic_step(mb, tb, t, ledger, label, repivot_tol)
        new_modes.append(nb)
        zs.append(z)
    return type(point)(point.shape, tuple(new_modes)), zs


def transport_point(point, h):
    """Representative of the coset g h: reduce the columns of g h per mode."""
    cls = type(point)
    cols = []
    for mb, hi in zip(point.modes, getattr(h, "factors", h)):
        k = mb.k
        cols.append(mb.densify() @ np.asarray(hi)[:, :k])
    return point_from_columns(point.shape, cols, cls)


def transport_tangent(x, h):
    """Right translation of an ambient tangent by a group element."""
    return AlgebraElement([xi @ np.asarray(hi)
                           for xi, hi in zip(x.factors, getattr(h, "factors", h))])


# ---------------------------------------------------------------------------
# the invariant-complement probes

def upper_condition_matrix(shape):
    """Rows are the vec'd coupled basis; the admissible upper blocks are its null space."""
    sizes = [k * k for k in shape.ks]
    total = sum(sizes)
    offs = np.concatenate([[0], np.cumsum(sizes)])
    basis = shape.coupled_upper_basis()
    c = np.zeros((len(basis), total))
    for row, elem in enumerate(basis):
        for i, y in enumerate(elem):
            if y is not None:
                c[row, offs[i]:offs[i + 1]] = y.ravel()
    return c


def _split_upper(shape, x):
    uppers = []
    for i, xi in enumerate(getattr(x, "factors", x)):
        k = shape.ks[i]
        uppers.append(np.asarray(xi)[:k, :k])
    return uppers


def distance_to_m(shape, x):
    """Euclidean distance from an algebra element to the candidate complement.

    The complement fixes zero upper-right and lower-right blocks, arbitrary
    lower-left blocks, and leading blocks orthogonal to the coupled sector.
    """
    c = upper_condition_matrix(shape)
    dist2 = 0.0
    vec = []
    for i, xi in enumerate(getattr(x, "factors", x)):
        xi = np.asarray(xi)
        k = shape.ks[i]
        dist2 += float(np.sum(xi[:k, k:] ** 2) + np.sum(xi[k:, k:] ** 2))
        vec.append(xi[:k, :k].ravel())
    v = np.concatenate(vec)
    if c.shape[0]:
        coef, *_ = np.linalg.lstsq(c.T, v, rcond=None)
        dist2 += float(np.sum((c.T @ coef) ** 2))
    return float(np.sqrt(dist2))


def sample_m(shape, rng):
    """Random element of the candidate complement at the identity."""
    c = upper_condition_matrix(shape)
    sizes = [k * k for k in shape.ks]
    offs = np.concatenate([[0], np.cumsum(sizes)])
    v = rng.standard_normal(int(offs[-1]))
    if c.shape[0]:
        coef, *_ = np.linalg.lstsq(c.T, v, rcond=None)
        v = v - c.T @ coef
    factors = []
    for i, (n, k) in enumerate(zip(shape.dims, shape.ks)):
        xi = np.zeros((n, n))
        xi[:k, :k] = v[offs[i]:offs[i + 1]].reshape(k, k)
        xi[k:, :k] = rng.standard_normal((n - k, k))
        factors.append(xi)
    return AlgebraElement(factors)


@dataclass(frozen=True)
class ReductiveReport:
    manifold: str
    dims: tuple
    ks: tuple
    expected_reductive: bool
    trials: int
    max_invariance_residual: float
    witness_residual: float
    passed: bool


def reductive_check(shape, trials=100, seed=0):
    """Probe Ad(H)-invariance of the candidate complement.

    Square full-rank shapes must keep the complement invariant to 1e-12;
    for any other shape a witness pair with normalized residual >= 0.05 is
    produced by escalating the strength of the stabilizer's shear blocks.
    """
    from .group import adjoint
    rng = np.random.default_rng(seed)
    square = all(n == k for n, k in zip(shape.dims, shape.ks))
    if square:
        worst = 0.0
        for _ in range(trials):
            h = shape.stabilizer_sample(rng).group_element()
            x = sample_m(shape, rng)
            d = distance_to_m(shape, adjoint(h, x)) / x.norm()
            worst = max(worst, d)
        return ReductiveReport(shape.name, shape.dims, shape.ks, True,
                               trials, worst, 0.0, worst <= 1e-12)
    best = 0.0
    for scale in (1.0, 2.0, 4.0, 8.0, 16.0):
        for _ in range(trials):
            h = shape.witness_element(rng, scale)
            x = sample_m(shape, rng)
            d = distance_to_m(shape, adjoint(h, x)) / x.norm()
            best = max(best, d)
        if best >= 0.05:
            break
    return ReductiveReport(shape.name, shape.dims, shape.ks, False,
                           trials, 0.0, best, best >= 0.05)
