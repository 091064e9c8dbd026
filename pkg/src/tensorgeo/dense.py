"""Dense tensor and matrix primitives.

Tensors are plain C-ordered (row-major) ``numpy.ndarray`` objects with
``ndim >= 3``; matrices are 2-d arrays.  Mode indices are 0-based throughout
the Python API.  The mode-i unfolding puts mode i on the rows and enumerates
the remaining modes in their original order, row-major, on the columns; this
convention is fixed so that tests and serialized data are reproducible.

Permutations are int arrays ``p`` acting on rows as ``(P m)[i] = m[p[i]]``,
so ``m[p]`` applies the permutation and ``p`` is its own description.
"""

import numpy as np

DEFAULT_RANK_TOL = 1e-10


# ---------------------------------------------------------------------------
# unfoldings and ranks

def unfold(t, mode):
    """Mode unfolding: n_mode rows, remaining modes row-major on columns."""
    t = np.asarray(t)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range for a {t.ndim}-way tensor")
    return np.moveaxis(t, mode, 0).reshape(t.shape[mode], -1)


def refold(m, mode, shape):
    """Inverse of :func:`unfold`; bit-identical round trip."""
    shape = tuple(shape)
    rest = shape[:mode] + shape[mode + 1:]
    return np.moveaxis(np.asarray(m).reshape((shape[mode],) + rest), 0, mode)


def _numerical_rank(m, tol):
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def multilinear_rank(t, tol=DEFAULT_RANK_TOL):
    """Tuple of numerical ranks of all mode unfoldings."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    t = np.asarray(t)
    return tuple(_numerical_rank(unfold(t, i), tol) for i in range(t.ndim))


def tt_rank(t, tol=DEFAULT_RANK_TOL):
    """Tuple of numerical ranks of the d-1 sequential split flattenings."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    t = np.asarray(t)
    ranks = []
    for i in range(1, t.ndim):
        left = int(np.prod(t.shape[:i]))
        ranks.append(_numerical_rank(t.reshape(left, -1), tol))
    return tuple(ranks)


# ---------------------------------------------------------------------------
# the mode-wise group action

def mode_product(mats, t):
    """Multiply ``t`` by the (possibly rectangular) matrix ``mats[i]`` in mode i.

    ``mats[i]`` has shape (m_i, n_i) against a tensor with n_i in mode i.
    """
    out = np.asarray(t)
    for i, a in enumerate(mats):
        out = np.moveaxis(np.tensordot(np.asarray(a), out, axes=([1], [i])), 0, i)
    return out


def mode_apply(g, t):
    """Action of a tuple of square invertible matrices on a dense tensor."""
    t = np.asarray(t)
    factors = getattr(g, "factors", g)
    if len(factors) != t.ndim:
        raise ValueError("group element order does not match tensor order")
    for i, a in enumerate(factors):
        a = np.asarray(a)
        if a.shape != (t.shape[i], t.shape[i]):
            raise ValueError(f"factor {i} has shape {a.shape}, expected "
                             f"({t.shape[i]}, {t.shape[i]})")
    return mode_product(factors, t)


# ---------------------------------------------------------------------------
# permutations

def perm_identity(n):
    return np.arange(n)

def perm_apply(p, m):
    """Apply the row permutation: returns ``m[p]``."""
    return np.asarray(m)[np.asarray(p)]

def perm_inverse(p):
    p = np.asarray(p)
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p))
    return inv

def perm_compose(p2, p1):
    """Permutation applying ``p1`` first, then ``p2``: (P2 P1) m = m[p1[p2]]."""
    p1 = np.asarray(p1)
    p2 = np.asarray(p2)
    return p1[p2]

def is_permutation(p):
    p = np.asarray(p)
    return p.ndim == 1 and np.array_equal(np.sort(p), np.arange(len(p)))


# ---------------------------------------------------------------------------
# representative selection

def select_submatrix(m, tol=DEFAULT_RANK_TOL):
    """Row permutation making the leading r x r block of ``m[p]`` invertible.

    Greedy rook-pivoted Gaussian elimination: each step alternates row and
    column searches until the pivot is maximal in both its row and column,
    then eliminates.  Deterministic (ties resolve to the lowest index), cost
    O(n r^2).  Raises if the numerical column rank of ``m`` is below r;
    ``tol = 0`` accepts any strictly nonzero pivot.
    """
    m = np.asarray(m, dtype=float)
    n, r = m.shape
    if r > n:
        raise ValueError("more columns than rows")
    c = m.copy()
    scale = np.abs(c).max()
    if scale == 0.0:
        raise ValueError("rank-deficient input: zero matrix")
    row_free = np.ones(n, dtype=bool)
    col_free = np.ones(r, dtype=bool)
    selected = []
    for _ in range(r):
        work = np.where(row_free)[0]
        cols = np.where(col_free)[0]
        sub = np.abs(c[np.ix_(work, cols)])
        # rook search from the globally largest free entry
        fi, fj = np.unravel_index(np.argmax(sub), sub.shape)
        i, j = work[fi], cols[fj]
        while True:
            j_new = cols[np.argmax(np.abs(c[i, cols]))]
            i_new = work[np.argmax(np.abs(c[work, j_new]))]
            if i_new == i and j_new == j:
                break
            i, j = i_new, j_new
        if abs(c[i, j]) <= tol * scale or c[i, j] == 0.0:
            raise ValueError("rank-deficient input: no acceptable pivot")
        selected.append(i)
        row_free[i] = False
        col_free[j] = False
        rest = row_free.nonzero()[0]
        if len(rest):
            c[rest] -= np.outer(c[rest, j] / c[i, j], c[i])
    remaining = [i for i in range(n) if row_free[i]]
    return np.array(selected + remaining)


def basis_completion(f, tol=DEFAULT_RANK_TOL):
    """Orthonormal completion of the column space of a full-rank n x k matrix.

    The returned n x (n-k) block is orthogonal to the columns of ``f`` and
    together with them spans R^n.
    """
    import scipy.linalg
    f = np.asarray(f, dtype=float)
    n, k = f.shape
    if k > n:
        raise ValueError("more columns than rows")
    q, r = scipy.linalg.qr(f, mode="full")
    diag = np.abs(np.diag(r)[:k])
    if diag.size == 0 or diag.max() == 0 or diag.min() <= tol * diag.max():
        raise ValueError("rank-deficient input")
    return q[:, k:]
