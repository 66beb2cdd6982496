import math

import numpy as np
import pytest

from qdiff.eigen import OperatorSpec, assemble, k_value, principal_eigenpair
from qdiff.fields import (Constant, CosineSquared, Sinusoid, build_periodic_spline, period_mean,
                          power_harmonic_mean, sqrt)
from qdiff.identities import (check_fickian_reduction, deform, deformed_eigenvalue, hq_correction,
                              identity_suite, large_B_limit, lemma_constructions,
                              persistence_bounds, rayleigh_value, run_identity_case, s_q)
from qdiff.speed import persistence

from oracles import quad_mean

R = CosineSquared(0.0, 1.0, 0.0)
D = CosineSquared(0.1, 1.0, 0.0)
V_H = 0.6280782253366707
PRESETS = [(R, D), (Sinusoid(0.5, 0.4, 2, 0.3), Sinusoid(1.0, 0.3, 1, 0.1))]


def test_hq_correction_examples():
    assert hq_correction(D, 1.0)(0.0) == pytest.approx(math.pi**2, rel=1e-14)
    x = np.linspace(0, 1, 11)
    assert np.allclose(hq_correction(Constant(2.0), 3.0)(x), 0.0)
    assert np.allclose(hq_correction(D, 0.0)(x), 0.0)


@pytest.mark.parametrize("pi", [0, 1])
@pytest.mark.parametrize("q", [-2.0, 1.0, 3.0])
@pytest.mark.parametrize("lam", [0.0, 0.5])
def test_fickian_reduction_grid(pi, q, lam):
    r, Dm = PRESETS[pi]
    lhs, rhs, gap = check_fickian_reduction(r, Dm, q, lam)
    assert gap <= 1e-6
    assert gap == abs(lhs - rhs)


def test_fickian_reduction_trivial_cases():
    assert check_fickian_reduction(R, D, 0.0, 0.3)[2] == 0.0
    assert check_fickian_reduction(R, Constant(2.0), 2.0, 0.3)[2] <= 2e-9


def test_deform_constant_diffusion():
    p = deform(Constant(1.0), R)
    assert p.new_period == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(p.P.values, 0.0, atol=1e-14)
    assert np.allclose(p.R.values, R(np.arange(p.R.values.size) / p.R.values.size), atol=1e-12)
    q = deform(Constant(4.0), R)
    assert q.new_period == pytest.approx(0.5, abs=1e-14)
    assert q.h(np.array([0.3]))[0] == pytest.approx(0.15, abs=1e-12)


def test_deform_period_is_reciprocal_harmonic_mean():
    p = deform(D, R)
    assert p.new_period == pytest.approx(1 / V_H, rel=1e-12)
    y = np.linspace(0, p.new_period, 7)
    assert np.allclose(p.h(p.h_inverse(y)), y, atol=1e-9)
    # R and ln D at the resampled points agree with direct evaluation
    x = p.h_inverse(np.array([0.4]))[0]
    assert p.R(0.4) == pytest.approx(R(x), abs=1e-7)
    assert math.exp(p.P(0.4)) == pytest.approx(D(x), abs=1e-7)


def test_deformed_identity_when_d_is_one():
    p = deform(Constant(1.0), R)
    for mu in (0.0, 0.7):
        assert deformed_eigenvalue(p, 1.0, mu) == pytest.approx(k_value(R, Constant(1.0), 1.0, mu).k,
                                                                abs=1e-8)


def test_deformed_stratonovich_is_r_plus_mu_squared():
    p = deform(D, Constant(0.8))
    assert s_q(0.5) == 0.0
    for mu in (0.0, 0.6, 1.3):
        assert deformed_eigenvalue(p, 0.5, mu) == pytest.approx(0.8 + mu**2, abs=1e-10)


@pytest.mark.parametrize("pi", [0, 1])
@pytest.mark.parametrize("q", [-2.0, 1.0, 3.0])
@pytest.mark.parametrize("lam", [0.0, 0.5])
def test_deformation_grid(pi, q, lam):
    r, Dm = PRESETS[pi]
    p = deform(Dm, r)
    mu = lam / p.new_period
    assert abs(deformed_eigenvalue(p, q, mu) - k_value(r, Dm, q, lam, 1e-9).k) <= 1e-5


def test_rayleigh_examples():
    one = Constant(1.0)
    assert rayleigh_value(R, one, 0.0, one) == pytest.approx(0.5, abs=1e-12)
    for q in (-1.0, 1.0, 2.0):
        lower = period_mean(R * D ** (-q)) * power_harmonic_mean(D, q)
        assert rayleigh_value(R, D, q, D ** (-q / 2)) == pytest.approx(lower, abs=1e-10)


@pytest.mark.parametrize("q", [-1.0, 1.0, 2.0])
def test_rayleigh_attained_at_eigenfunction(q):
    n = 2048
    phi = principal_eigenpair(assemble(OperatorSpec(R, D, q, 0.0, n))).phi
    trial = D.grid(n) ** (q / 2) * phi
    assert rayleigh_value(R, D, q, trial) == pytest.approx(persistence(R, D, q), abs=1e-6)


def test_rayleigh_maximality_random_trials():
    rng = np.random.default_rng(7)
    for q in (-1.0, 1.0):
        k = persistence(R, D, q)
        for _ in range(10):
            a, b, c = rng.uniform(0.15, 0.95, 3)
            try:
                phi = build_periodic_spline([a, b, c, a])
            except ValueError:
                continue
            assert rayleigh_value(R, D, q, phi) <= k + 1e-6


def test_rayleigh_rejects_nonpositive_trial():
    with pytest.raises(ValueError):
        rayleigh_value(R, D, 1.0, Sinusoid(0.0, 1.0))


def test_large_B_limit_examples():
    assert large_B_limit(R, D, 0.0) == pytest.approx(0.5, abs=1e-13)
    r = Sinusoid(0.5, 0.3, 1)
    assert large_B_limit(r, D, 0.0) == pytest.approx(0.5, abs=1e-13)
    # D = r^(1/q): weighted mean collapses to the harmonic mean of r
    q = 2.0
    harm = 1 / quad_mean(lambda x: 1 / r(x))
    assert large_B_limit(r, sqrt(r), q) == pytest.approx(harm, rel=1e-11)
    assert harm < period_mean(r)


@pytest.mark.parametrize("q", [-1.0, 1.0, 2.0])
def test_bounds_and_large_B_convergence(q):
    lower, upper = persistence_bounds(R, D, q)
    limit = large_B_limit(R, D, q)
    gaps = []
    for B in (1.0, 10.0, 100.0, 1000.0):
        k = k_value(R, B * D, q, 0.0, 1e-8).k
        if B <= 100:
            assert lower - 1e-9 <= k <= upper + 1e-9
        gaps.append(abs(k - limit))
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] <= 0.01


def test_q_limits():
    assert abs(persistence(R, D, 40.0, tol=1e-7) - R(0.5)) <= 0.05
    assert abs(persistence(R, D, -40.0, tol=1e-7) - R(0.0)) <= 0.05


def test_lemma_constructions_q1():
    res = lemma_constructions(D, 1.0)
    kq, k0 = res["reduce"]
    assert k0 - kq > 1e-4
    kq, k0 = res["increase"]
    assert kq - k0 > 1e-4


def test_identity_suite_all_pass():
    cases = identity_suite()
    assert len(cases) == 34
    failures = [(c.label, g) for c in cases if (g := run_identity_case(c)) > c.tolerance]
    assert failures == []
