import numpy as np
import pytest

from tensorgeo.flops import FlopLedger, psi1_count
from tensorgeo.oracles import mexp_dense, psi1_series
from tensorgeo.psi import (LowRankPair, ScalingPlan, inv_lowrank_update,
                           make_scaling_plan, mexp_lowrank, mexp_small, psi1,
                           psi1_pade)


def _random_with_norm(rng, k, nrm):
    m = rng.standard_normal((k, k))
    return m * (nrm / np.linalg.norm(m))


# ---------------------------------------------------------------------------
# Pade quotient

def test_pade_at_zero_is_identity():
    assert np.array_equal(psi1_pade(np.zeros((3, 3))), np.eye(3))


def test_pade_scalar_half():
    # (e^0.5 - 1)/0.5, frozen from a 50-digit series evaluation
    got = psi1_pade(np.array([[0.5]]))[0, 0]
    assert got == pytest.approx(1.2974425414002564, abs=1e-15)


def test_pade_norm_precondition():
    with pytest.raises(ValueError):
        psi1_pade(np.eye(3))


def test_pade_vs_series_sample():
    rng = np.random.default_rng(0)
    worst = 0.0
    for k in (1, 2, 5, 8):
        for _ in range(100):
            m = _random_with_norm(rng, k, rng.uniform(0.0, 0.5))
            dev = np.linalg.norm(psi1_pade(m).astype(np.longdouble)
                                 - psi1_series(m))
            worst = max(worst, float(dev))
    assert worst <= 1e-15


# ---------------------------------------------------------------------------
# scaling plans

def test_plan_examples():
    assert make_scaling_plan(3.0).z == 4
    assert make_scaling_plan(0.3).z == 0
    # the formula with the small-norm clamp; 0.6/4 = 0.15 <= 1/4
    assert make_scaling_plan(0.6).z == 2


def test_plan_invariants():
    rng = np.random.default_rng(1)
    for _ in range(200):
        nrm = 10.0 ** rng.uniform(-8, 4)
        plan = make_scaling_plan(nrm)
        assert nrm * 2.0 ** -plan.z <= 0.5 + 1e-15
        if plan.z > 0:
            assert nrm > 0.5
            assert nrm * 2.0 ** -plan.z <= 0.25 + 1e-15
        if nrm <= 0.5:
            assert plan.z == 0
    assert make_scaling_plan(0.0).z == 0
    with pytest.raises(ValueError):
        make_scaling_plan(np.inf)


# ---------------------------------------------------------------------------
# psi1 with scaling and squaring

def test_psi1_small_norm_equals_pade():
    rng = np.random.default_rng(2)
    m = _random_with_norm(rng, 4, 0.4)
    assert np.array_equal(psi1(m), psi1_pade(m))


def test_psi1_scalar_two():
    # (e^2 - 1)/2, frozen from a 50-digit series evaluation
    assert psi1(np.array([[2.0]]))[0, 0] == pytest.approx(3.194528049465325,
                                                          abs=1e-14)


def test_psi1_large_norm_vs_extended_oracle():
    rng = np.random.default_rng(3)
    for nrm in (0.9, 3.0, 10.0):
        m = _random_with_norm(rng, 6, nrm)
        z = make_scaling_plan(nrm).z
        y = (m / 2.0 ** z).astype(np.longdouble)
        ref = psi1_series(y.astype(float)).astype(np.longdouble)
        e = np.asarray(mexp_dense(y.astype(float)), dtype=np.longdouble)
        eye = np.eye(6, dtype=np.longdouble)
        for _ in range(z):
            ref = 0.5 * (ref @ (e + eye))
            e = e @ e
        err = np.linalg.norm(psi1(m) - ref.astype(float))
        assert err / np.linalg.norm(ref.astype(float)) <= 1e-13


def test_psi1_defining_identity():
    rng = np.random.default_rng(4)
    for nrm in (0.2, 1.0, 7.0, 20.0):
        m = _random_with_norm(rng, 5, nrm)
        e = mexp_small(m)
        res = np.linalg.norm(m @ psi1(m) - (e - np.eye(5)))
        assert res <= 1e-12 * (1.0 + np.linalg.norm(e))


def test_psi1_rejects_nonfinite_and_z1_plans():
    with pytest.raises(ValueError):
        psi1(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        psi1(np.eye(2), plan=ScalingPlan(1, 1.0))


def test_psi1_ledger_exact():
    rng = np.random.default_rng(5)
    for k, z in ((1, 2), (3, 3), (5, 6)):
        m = _random_with_norm(rng, k, 3.0 * 2.0 ** (z - 4))
        led = FlopLedger()
        psi1(m, led)
        assert led.total == psi1_count(k, z)
    # direct-quotient path
    m = _random_with_norm(rng, 4, 0.3)
    led = FlopLedger()
    psi1(m, led)
    assert led.total == psi1_count(4, 0)


# ---------------------------------------------------------------------------
# dense exponential

def test_mexp_small_basics():
    assert np.array_equal(mexp_small(np.zeros((2, 2))), np.eye(2))
    assert mexp_small(np.array([[1.0]]))[0, 0] == pytest.approx(
        2.718281828459045, abs=1e-15)


def test_mexp_small_group_inverse():
    rng = np.random.default_rng(6)
    m = rng.standard_normal((8, 8))
    prod = mexp_small(m) @ mexp_small(-m)
    assert np.linalg.norm(prod - np.eye(8)) <= 1e-13 * np.linalg.norm(
        mexp_small(m)) * np.linalg.norm(mexp_small(-m))


# ---------------------------------------------------------------------------
# low-rank kernels

def test_mexp_lowrank_zero_left():
    rng = np.random.default_rng(7)
    pair = LowRankPair(np.zeros((6, 2)), rng.standard_normal((2, 6)))
    assert np.array_equal(mexp_lowrank(pair).densify(), np.eye(6))


def test_mexp_lowrank_rank_one():
    s = 0.9
    n = 5
    pair = LowRankPair(s * np.eye(n)[:, :1], np.eye(n)[:, :1].T)
    out = mexp_lowrank(pair).densify()
    want = np.eye(n)
    want[0, 0] = np.exp(s)
    assert np.abs(out - want).max() < 1e-14


def test_mexp_lowrank_vs_dense():
    rng = np.random.default_rng(8)
    for n, k in ((50, 3), (120, 10)):
        pair = LowRankPair(rng.standard_normal((n, k)),
                           rng.standard_normal((k, n)))
        dense = mexp_dense(pair.left @ pair.right)
        rel = np.linalg.norm(mexp_lowrank(pair).densify() - dense)
        assert rel / np.linalg.norm(dense) <= 1e-12


def test_mexp_lowrank_ledger():
    rng = np.random.default_rng(9)
    n, k = 40, 3
    pair = LowRankPair(rng.standard_normal((n, k)), rng.standard_normal((k, n)))
    led = FlopLedger()
    upd = mexp_lowrank(pair, led)
    z = make_scaling_plan(np.linalg.norm(pair.right @ pair.left)).z
    assert led.total == 2 * n * k * k + psi1_count(k, z)
    assert upd.core.shape == (k, k)


def test_inv_lowrank_update():
    rng = np.random.default_rng(10)
    n, k = 40, 4
    pair = LowRankPair(rng.standard_normal((n, k)), rng.standard_normal((k, n)))
    upd = inv_lowrank_update(pair)
    res = (np.eye(n) + pair.left @ pair.right) @ upd.densify() - np.eye(n)
    assert np.abs(res).max() <= 1e-12 * n
    zero = inv_lowrank_update(LowRankPair(np.zeros((5, 2)), np.ones((2, 5))))
    assert np.array_equal(zero.densify(), np.eye(5))


def test_inv_lowrank_scalar_core():
    c = 0.7
    pair = LowRankPair(np.eye(4)[:, :1], c * np.eye(4)[:, :1].T)
    upd = inv_lowrank_update(pair)
    # core solves 1 + core * c = 1/(1+c) against this factor pair
    assert upd.core[0, 0] == pytest.approx(-1.0 / (1.0 + c), abs=1e-15)
    assert np.abs((np.eye(4) + pair.left @ pair.right) @ upd.densify()
                  - np.eye(4)).max() < 1e-14


def test_inv_lowrank_singular():
    pair = LowRankPair(np.eye(3)[:, :1], -np.eye(3)[:, :1].T)
    with pytest.raises(np.linalg.LinAlgError):
        inv_lowrank_update(pair)
