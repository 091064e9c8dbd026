"""The psi1 function, the matrix exponential, and low-rank update kernels.

psi1(x) = (e^x - 1)/x extended to matrices by its power series.  On arguments
of Frobenius norm at most 1/2 a degree (6,6) Pade quotient is accurate to
double precision; larger arguments are scaled by a power of two and
reconstructed through the doubling identity

    psi1(2X) = psi1(X) (mexp(X) + 1) / 2.

The scaled evaluation is arranged to make the recorded operation count land
exactly on the published itemization: a six-multiply power table (five powers
plus the odd/even assembly of the exponential quotient), two divisions, and
z-1 squarings plus z-1 doubling products.  To get z-1 doubling products the
psi1 quotient is evaluated directly at level z-1 by scaling the Pade
coefficients, which is valid because the scaling exponent guarantees norm
<= 1/4 at level z, hence <= 1/2 at level z-1.

All kernels are pure; the optional ledger only records counts.
"""

import math
from dataclasses import dataclass

import numpy as np

# degree (6,6) Pade coefficients of psi1, low order first
PSI1_PADE_NUM = np.array([1.0, 1.0 / 26, 5.0 / 156, 1.0 / 858, 1.0 / 5720,
                          1.0 / 205920, 1.0 / 8648640])
PSI1_PADE_DEN = np.array([1.0, -6.0 / 13, 5.0 / 52, -5.0 / 429, 1.0 / 1144,
                          -1.0 / 25740, 1.0 / 1235520])
# exact numerator-minus-denominator coefficients; evaluating the quotient as
# identity plus a correction keeps the result's dominant diagonal free of
# round-off
PSI1_PADE_DIFF = np.array([0.0, 1.0 / 2, -5.0 / 78, 1.0 / 78, -1.0 / 1430,
                           1.0 / 22880, -1.0 / 1441440])
# degree (6,6) Pade numerator of exp; the denominator is the same with
# alternating signs
EXP_PADE = np.array([1.0, 1.0 / 2, 5.0 / 44, 1.0 / 66, 1.0 / 792,
                     1.0 / 15840, 1.0 / 665280])

PADE_NORM_BOUND = 0.5


@dataclass(frozen=True)
class ScalingPlan:
    """Scaling exponent for one psi1/mexp evaluation.

    z = 0 whenever the norm is already <= 1/2; otherwise
    z = ceil(log2 norm) + 2, which over-scales to norm <= 1/4 so that the
    level z-1 argument is still within the Pade bound.
    """
    z: int
    norm_used: float


def make_scaling_plan(norm):
    """Plan from a nonnegative finite norm; never returns z = 1."""
    norm = float(norm)
    if not norm >= 0.0 or math.isinf(norm):
        raise ValueError("norm must be finite and nonnegative")
    if norm <= PADE_NORM_BOUND:
        return ScalingPlan(0, norm)
    return ScalingPlan(max(0, math.ceil(math.log2(norm)) + 2), norm)


def _check_finite(m):
    if not np.all(np.isfinite(m)):
        raise ValueError("non-finite input")


def _power_table(x, ledger=None):
    """[I, x, x^2, ..., x^6] with five recorded multiplies."""
    k = x.shape[0]
    pows = [np.eye(k), x]
    for _ in range(5):
        pows.append(pows[-1] @ x)
        if ledger is not None:
            ledger.mult(k, k, k)
    return pows


def _psi1_pade_from_table(pows, scale=1.0, ledger=None):
    """The psi1 quotient from a power table, as identity plus a correction.

    Solving den(x) y = (num - den)(x) and returning 1 + y keeps the
    dominant unit diagonal exact.  ``scale`` evaluates the quotient at
    ``scale * x`` by weighting the coefficient of x^j with scale^j; the
    linear combinations are free in the cost model, the division is charged.
    """
    k = pows[0].shape[0]
    w = scale ** np.arange(7)
    num = sum(c * s * p for c, s, p in zip(PSI1_PADE_DIFF[1:], w[1:], pows[1:]))
    den = sum(c * s * p for c, s, p in zip(PSI1_PADE_DEN, w, pows))
    if ledger is not None:
        ledger.div(k, k, k)
    return pows[0] + np.linalg.solve(den, num)


def _exp_pade_from_table(x, pows, ledger=None):
    """(6,6) Pade exponential via the odd/even split; one multiply, one division.

    Evaluated as 1 + (V - U)^-1 (2U), identity plus a correction.
    """
    k = x.shape[0]
    odd = EXP_PADE[1] * pows[0] + EXP_PADE[3] * pows[2] + EXP_PADE[5] * pows[4]
    u = x @ odd
    if ledger is not None:
        ledger.mult(k, k, k)
    v = EXP_PADE[0] * pows[0] + EXP_PADE[2] * pows[2] + EXP_PADE[4] * pows[4] \
        + EXP_PADE[6] * pows[6]
    if ledger is not None:
        ledger.div(k, k, k)
    return pows[0] + np.linalg.solve(v - u, 2.0 * u)


def psi1_pade(m):
    """Degree (6,6) Pade quotient of psi1; requires Frobenius norm <= 1/2."""
    m = np.asarray(m, dtype=float)
    _check_finite(m)
    nrm = np.linalg.norm(m)
    if nrm > PADE_NORM_BOUND * (1 + 1e-12):
        raise ValueError(f"norm {nrm} exceeds the Pade bound 1/2")
    return _psi1_pade_from_table(_power_table(m))


def psi1(m, ledger=None, plan=None):
    """psi1 of a square matrix to near machine precision, any norm.

    ``plan`` overrides the scaling plan (it must scale at least as strongly
    as the matrix requires); plans with z = 1 are rejected because the
    doubling chain starts one level above the Pade evaluation.
    """
    m = np.asarray(m, dtype=float)
    _check_finite(m)
    if plan is None:
        plan = make_scaling_plan(np.linalg.norm(m))
    z = plan.z
    if z == 1:
        raise ValueError("plans with z = 1 are not used; scale to z >= 2")
    x = m / 2.0 ** z
    nrm_lvl = np.linalg.norm(x) * (2.0 if z else 1.0)
    if nrm_lvl > PADE_NORM_BOUND * (1 + 1e-12):
        raise ValueError("scaling plan too weak for this argument")
    pows = _power_table(x, ledger)
    if z == 0:
        return _psi1_pade_from_table(pows, ledger=ledger)
    # psi1 at level z-1 via coefficient scaling, mexp at level z
    p = _psi1_pade_from_table(pows, scale=2.0, ledger=ledger)
    e = _exp_pade_from_table(x, pows, ledger)
    k = m.shape[0]
    eye = np.eye(k)
    for _ in range(z - 1):
        e = e @ e
        p = 0.5 * (p @ (e + eye))
        if ledger is not None:
            ledger.mult(k, k, k)
            ledger.mult(k, k, k)
            ledger.add(k, k)
    return p


def mexp_small(m):
    """Matrix exponential by (6,6) Pade with scaling and squaring."""
    m = np.asarray(m, dtype=float)
    _check_finite(m)
    z = make_scaling_plan(np.linalg.norm(m)).z
    x = m / 2.0 ** z
    k = m.shape[0]
    pows = [np.eye(k), x]
    for _ in range(5):
        pows.append(pows[-1] @ x)
    e = _exp_pade_from_table(x, pows)
    for _ in range(z):
        e = e @ e
    return e


# ---------------------------------------------------------------------------
# low-rank updates of the identity

@dataclass(frozen=True, eq=False)
class LowRankPair:
    """An n x n matrix ``left @ right`` held as n x k and k x n factors."""
    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left, right = np.asarray(self.left), np.asarray(self.right)
        if left.ndim != 2 or right.ndim != 2 or left.shape[1] != right.shape[0]:
            raise ValueError("inner dimensions of the factor pair do not match")
        if left.shape[0] != right.shape[1]:
            raise ValueError("pair does not represent a square matrix")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def n(self):
        return self.left.shape[0]

    @property
    def k(self):
        return self.left.shape[1]


@dataclass(frozen=True, eq=False)
class LowRankUpdate:
    """identity + left @ core @ right, never formed densely in kernels."""
    core: np.ndarray
    pair: LowRankPair

    def densify(self):
        """Materialize the n x n matrix; test and oracle paths only."""
        p = self.pair
        return np.eye(p.n) + p.left @ self.core @ p.right


def mexp_lowrank(pair, ledger=None):
    """mexp(left @ right) = 1 + left psi1(right @ left) right.

    Only the k x k product and the psi1 evaluation are performed; cost
    2nk^2 plus the psi1 count.
    """
    ba = pair.right @ pair.left
    if ledger is not None:
        ledger.mult(pair.k, pair.n, pair.k)
    return LowRankUpdate(psi1(ba, ledger), pair)


def inv_lowrank_update(pair, ledger=None):
    """Exact inverse of identity + left @ right, as a low-rank update.

    Uses 1/(1 + AB) = 1 - A (1/(1 + BA)) B.  Raises if the k x k system
    1 + BA is singular, which happens exactly when the n x n update is.
    """
    ba = pair.right @ pair.left
    if ledger is not None:
        ledger.mult(pair.k, pair.n, pair.k)
    k = pair.k
    sys = np.eye(k) + ba
    if ledger is not None:
        ledger.div(k, k, k)
    cond = np.linalg.cond(sys)
    if not np.isfinite(cond) or cond > 1e14:
        raise np.linalg.LinAlgError("identity + right@left is numerically singular")
    return LowRankUpdate(-np.linalg.solve(sys, np.eye(k)), pair)
