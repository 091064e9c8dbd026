"""Independent reference implementations for tests and audits.

Nothing here shares code with the production kernels: this module depends
only on the dense primitives.  The series evaluation runs in extended
precision (the platform long double; 80-bit on x86), the dense exponential
comes from SciPy, and the tensor contractions are naive index loops.  These
paths trade speed for transparency and may be O(n^3) or worse.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class OracleConfig:
    series_terms: int = 60
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.series_terms < 20:
            raise ValueError("series_terms must be at least 20")
        if not 0.0 < self.fd_step <= 1e-3:
            raise ValueError("fd_step must lie in (0, 1e-3]")


def _require_extended():
    if np.finfo(np.longdouble).nmant <= 52:
        raise RuntimeError("platform long double offers no extra precision; "
                           "series oracle unavailable")


def psi1_series(m, cfg=None):
    """Truncated series sum_j m^j/(j+1)! in extended precision.

    Accepts a single k x k matrix or a batched (..., k, k) array; returns a
    long double array of the same shape.  Requires Frobenius norm <= 4 per
    matrix so the default 60-term tail is far below the round-off floor.
    """
    cfg = cfg or OracleConfig()
    _require_extended()
    m = np.asarray(m, dtype=np.longdouble)
    nrm = np.sqrt(np.sum(m * m, axis=(-2, -1)))
    if np.any(nrm > 4.0):
        raise ValueError("series oracle is restricted to Frobenius norm <= 4")
    k = m.shape[-1]
    eye = np.broadcast_to(np.eye(k, dtype=np.longdouble), m.shape).copy()
    # Horner in m with coefficients 1/(j+1)!
    coeffs = []
    fact = np.longdouble(1.0)
    for j in range(cfg.series_terms):
        fact = fact * np.longdouble(j + 1)
        coeffs.append(np.longdouble(1.0) / fact)
    acc = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        acc = acc @ m + c * eye
    return acc


def series_tail_bound(norm, terms=60):
    """Bound ||m||^N / (N+1)! on the dropped tail of the psi1 series."""
    return float(norm) ** terms / math.factorial(terms + 1)


def mexp_dense(m):
    """Dense scaling-and-squaring matrix exponential (SciPy), no structure used."""
    return scipy.linalg.expm(np.asarray(m, dtype=float))


def dense_geodesic(g, x, t=1.0):
    """Literal per-mode evaluation of mexp(w - w^T) mexp(w^T) g, w = X g^-1."""
    gf = getattr(g, "factors", g)
    xf = getattr(x, "factors", x)
    out = []
    for gi, xi in zip(gf, xf):
        w = t * np.asarray(xi) @ np.linalg.inv(np.asarray(gi))
        out.append(mexp_dense(w - w.T) @ mexp_dense(w.T) @ np.asarray(gi))
    return out


# ---------------------------------------------------------------------------
# naive contractions

def contract_cp(factors):
    """Sum of r outer products from d factor matrices, by explicit loops."""
    factors = [np.asarray(v) for v in factors]
    r = factors[0].shape[1]
    shape = tuple(v.shape[0] for v in factors)
    out = np.zeros(shape)
    for idx in np.ndindex(shape):
        s = 0.0
        for j in range(r):
            term = 1.0
            for i, ki in enumerate(idx):
                term *= factors[i][ki, j]
            s += term
        out[idx] = s
    return out


def contract_tucker(core, factors):
    """Tucker contraction of a core with d factor matrices, by explicit loops."""
    core = np.asarray(core)
    factors = [np.asarray(g) for g in factors]
    shape = tuple(g.shape[0] for g in factors)
    out = np.zeros(shape)
    for idx in np.ndindex(shape):
        s = 0.0
        for alpha in np.ndindex(core.shape):
            term = core[alpha]
            for i in range(len(shape)):
                term *= factors[i][idx[i], alpha[i]]
            s += term
        out[idx] = s
    return out


def contract_tt(cores):
    """TT contraction of 3-way cores (s_{i-1}, n_i, s_i), by explicit loops.

    Boundary cores may be passed as matrices; they are promoted to 3-way
    with unit boundary dimensions.
    """
    cs = []
    for i, c in enumerate(cores):
        c = np.asarray(c)
        if c.ndim == 2:
            c = c[None, :, :] if i == 0 else c[:, :, None]
        cs.append(c)
    shape = tuple(c.shape[1] for c in cs)
    ranks = [c.shape[0] for c in cs] + [cs[-1].shape[2]]
    out = np.zeros(shape)
    for idx in np.ndindex(shape):
        s = 0.0
        for alphas in np.ndindex(tuple(ranks[1:-1])):
            full = (0,) + alphas + (0,)
            term = 1.0
            for i in range(len(cs)):
                term *= cs[i][full[i], idx[i], full[i + 1]]
            s += term
        out[idx] = s
    return out
