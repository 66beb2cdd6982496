import math

import numpy as np
import pytest
from scipy.special import mathieu_a

from qdiff.fields import Constant, CosineSquared, Sinusoid, build_periodic_spline
from qdiff.speed import ExtinctionError, persistence, spreading_speed, stratonovich_speed

ONE = Constant(1.0)
R = CosineSquared(0.0, 1.0, 0.0)
D = CosineSquared(0.1, 1.0, 0.0)
V_H = 0.6280782253366707
# Riccati shooting oracle (tests/oracles.py), r = 1, D = 0.1 + cos^2(pi x)
C_Q50 = 0.0092615
C_Q0 = 1.1727406930


def test_classical_kpp_speed():
    s = spreading_speed(ONE, ONE, 0.0)
    assert s.c_star == pytest.approx(2.0, abs=1e-8)
    assert s.lambda_star == pytest.approx(1.0, abs=1e-5)
    assert s.direction == "right"


def test_result_invariants():
    s = spreading_speed(R, D, 1.0)
    assert s.c_star == pytest.approx(s.k_at_lambda_star / s.lambda_star, rel=1e-12)
    assert s.bracket[0] < s.lambda_star < s.bracket[1]
    assert s.k0 > 0 and s.c_star > 0


def test_stratonovich_formula():
    assert stratonovich_speed(1.0, D) == pytest.approx(2 * V_H, rel=1e-12)
    assert spreading_speed(ONE, D, 0.5).c_star == pytest.approx(2 * V_H, rel=1e-8)
    assert spreading_speed(Constant(4.0), D, 0.5).c_star == pytest.approx(4 * V_H, rel=1e-8)


@pytest.mark.parametrize("qt", [0.5, 1.5])
def test_symmetric_about_one_half(qt):
    a = spreading_speed(ONE, D, 0.5 - qt).c_star
    b = spreading_speed(ONE, D, 0.5 + qt).c_star
    assert a == pytest.approx(b, rel=1e-6)
    assert a < 2 * V_H


@pytest.mark.parametrize("q", [-1.0, 0.0, 1.0, 2.0])
def test_left_equals_right(q):
    r = Sinusoid(0.6, 0.5, 1, 0.2)
    Dm = build_periodic_spline([0.3, 0.8, 0.5, 0.3])
    right = spreading_speed(r, Dm, q, "right").c_star
    left = spreading_speed(r, Dm, q, "left").c_star
    assert left == pytest.approx(right, rel=1e-6)


@pytest.mark.parametrize("q", [0.0, 1.0])
def test_matches_shooting_oracle(q):
    # c* at q and 1 - q coincide, so one oracle value covers both
    assert spreading_speed(ONE, D, q).c_star == pytest.approx(C_Q0, abs=1e-9)


def test_large_q_speed_is_small():
    s = spreading_speed(ONE, D, 50.0, tol=1e-3)
    assert abs(s.c_star - C_Q50) < 2e-5
    assert abs(s.c_star - 0.01) <= 0.005


def test_persistence_constant_r():
    for q in (-1.0, 0.5, 2.0):
        assert persistence(Constant(0.7), D, q) == pytest.approx(0.7, abs=1e-9)


def test_persistence_mathieu():
    # psi'' + cos^2(pi x) psi = k psi is Mathieu's equation
    k = 0.5 - math.pi**2 * mathieu_a(0, 1 / (4 * math.pi**2))
    assert persistence(R, ONE, 0.0) == pytest.approx(k, abs=1e-9)
    assert persistence(R, ONE, 0.0) > 0.5  # Rayleigh bound with phi = 1


def test_extinction_raises():
    with pytest.raises(ExtinctionError) as info:
        spreading_speed(Constant(-0.5), D, 0.0)
    assert info.value.k0 == pytest.approx(-0.5, abs=1e-9)


def test_direction_validated():
    with pytest.raises(ValueError):
        spreading_speed(ONE, ONE, 0.0, direction="up")


def test_stratonovich_requires_positive_rate():
    with pytest.raises(ValueError):
        stratonovich_speed(0.0, D)


def test_speed_maximal_at_one_half():
    qs = np.array([-1.0, 0.0, 0.25, 0.75, 1.0, 2.0])
    c_half = spreading_speed(ONE, D, 0.5).c_star
    assert all(spreading_speed(ONE, D, q).c_star <= c_half for q in qs)
