"""Acceptance suite: one test per criterion, each at its stated tolerance and
runtime budget.  A PASS/FAIL line per criterion is printed in the terminal
summary (see conftest.py)."""

import time

import numpy as np
import pytest

from qdiff.anneal import AnnealConfig, run_annealing
from qdiff.eigen import OperatorSpec, assemble, k_value, principal_eigenpair
from qdiff.fields import Constant, CosineSquared, Sinusoid, build_periodic_spline
from qdiff.identities import (identity_suite, large_B_limit, lemma_constructions, rayleigh_value,
                              run_identity_case)
from qdiff.pdesim import SimConfig, _Stencil, measure_front_speed, step
from qdiff.speed import persistence, spreading_speed
from qdiff.sweeps import SweepSpec, csv_text, phase_shift_spec, run_sweep

ONE = Constant(1.0)
R = CosineSquared(0.0, 1.0, 0.0)
D = CosineSquared(0.1, 1.0, 0.0)
# (integral of D^(-1/2))^(-1) for D = 0.1 + cos^2(pi x), adaptive quadrature at 1e-12
V_H = 0.6280782253366707


class Clock:
    def __init__(self):
        self.t0 = time.perf_counter()

    @property
    def elapsed(self):
        return time.perf_counter() - self.t0


@pytest.fixture
def criterion(record_property):
    def record(num, detail):
        record_property("criterion", num)
        record_property("detail", detail)
    return record


def test_c01_constant_coefficients(criterion):
    clk = Clock()
    worst = max(abs(k_value(ONE, ONE, q, lam).k - (1 + lam**2))
                for q in (-1.0, 0.0, 0.5, 1.0, 2.0) for lam in (0.0, 0.5, 2.0))
    c_gap = abs(spreading_speed(ONE, ONE, 0.0).c_star - 2.0)
    t = clk.elapsed
    criterion(1, f"max |k - (1+lam^2)| = {worst:.1e}, |c* - 2| = {c_gap:.1e}, {t:.2f} s")
    assert worst <= 1e-10 and c_gap <= 1e-8 and t < 1.0


def test_c02_stratonovich_formula(criterion):
    clk = Clock()
    c = spreading_speed(ONE, D, 0.5).c_star
    rel = abs(c - 2 * V_H) / (2 * V_H)
    t = clk.elapsed
    criterion(2, f"c*_(1/2) = {c:.10f}, 2 v_H = {2 * V_H:.10f}, rel gap {rel:.1e}, {t:.1f} s")
    assert rel <= 1e-4 and t < 10


def test_c03_symmetry_and_maximality(criterion):
    clk = Clock()
    half = spreading_speed(ONE, D, 0.5).c_star
    worst, others = 0.0, []
    for qt in (0.25, 0.5, 1.0, 2.0):
        a = spreading_speed(ONE, D, 0.5 - qt).c_star
        b = spreading_speed(ONE, D, 0.5 + qt).c_star
        worst = max(worst, abs(a - b) / half)
        others += [a, b]
    t = clk.elapsed
    criterion(3, f"symmetry gap {worst:.1e}, max other speed {max(others):.6f} <= {half:.6f}, {t:.1f} s")
    assert worst <= 1e-4 and half >= max(others) and t < 60


def test_c04_large_q_tail(criterion):
    clk = Clock()
    s = spreading_speed(ONE, D, 50.0, tol=1e-3)
    t = clk.elapsed
    criterion(4, f"c*_50 = {s.c_star:.6f} (lambda* = {s.lambda_star:.1f}), {t:.1f} s")
    assert s.c_star <= 0.02 and t < 120


def _identity_gaps(name):
    cases = [c for c in identity_suite() if c.identity == name]
    return cases, [run_identity_case(c) for c in cases]


def test_c05_fickian_reduction(criterion):
    clk = Clock()
    cases, gaps = _identity_gaps("fickian_reduction")
    t = clk.elapsed
    criterion(5, f"{len(cases)} cases, max gap {max(gaps):.1e}, {t:.1f} s")
    assert len(cases) == 12 and max(gaps) <= 1e-6 and t < 60


def test_c06_deformation(criterion):
    clk = Clock()
    cases, gaps = _identity_gaps("deformation")
    t = clk.elapsed
    criterion(6, f"{len(cases)} cases, max gap {max(gaps):.1e}, {t:.1f} s")
    assert len(cases) == 12 and max(gaps) <= 1e-5 and t < 60


def test_c07_large_B_limit(criterion):
    clk = Clock()
    gaps = [abs(k_value(R, 1000.0 * D, q, 0.0).k - large_B_limit(R, D, q)) for q in (-1.0, 1.0, 2.0)]
    t = clk.elapsed
    criterion(7, f"max |k(1000 D) - weighted mean| = {max(gaps):.1e}, {t:.1f} s")
    assert max(gaps) <= 0.01 and t < 60


def test_c08_q_limits(criterion):
    clk = Clock()
    # D = 0.1 + cos^2 has its minimum at 1/2 and maximum at 0
    plus = abs(persistence(R, D, 40.0, tol=1e-7) - R(0.5))
    minus = abs(persistence(R, D, -40.0, tol=1e-7) - R(0.0))
    t = clk.elapsed
    criterion(8, f"|k_40 - r(argmin D)| = {plus:.4f}, |k_-40 - r(argmax D)| = {minus:.4f}, {t:.1f} s")
    assert plus <= 0.05 and minus <= 0.05 and t < 300


def _random_smooth_cases(n, seed):
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n:
        mean = rng.uniform(0.3, 1.0)
        r = Sinusoid(mean, rng.uniform(0, 0.9) * mean, int(rng.integers(1, 3)), rng.uniform(0, 1))
        if rng.random() < 0.5:
            Dm = Sinusoid(1.0, rng.uniform(0, 0.7), 1, rng.uniform(0, 1))
        else:
            a, b, c = rng.uniform(0.3, 0.9, 3)
            Dm = build_periodic_spline([a, b, c, a])
        cases.append((r, Dm, float(rng.uniform(-2, 3))))
    return cases


def test_c09_left_right_speeds(criterion):
    clk = Clock()
    gaps = []
    for r, Dm, q in _random_smooth_cases(6, seed=2024):
        right = spreading_speed(r, Dm, q, "right").c_star
        left = spreading_speed(r, Dm, q, "left").c_star
        gaps.append(abs(left - right) / right)
    t = clk.elapsed
    criterion(9, f"6 random cases, max relative gap {max(gaps):.1e}, {t:.1f} s")
    assert max(gaps) <= 1e-6 and t < 60


def test_c10_phase_shift_trends(criterion):
    clk = Clock()
    res = run_sweep(phase_shift_spec())
    q, w, k = res.column("q"), res.column("omega"), res.column("k0")
    ok, notes = all(s == "ok" for s in res.column("status")), []
    for qv in (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0):
        sel = (q == qv) & (w <= 0.5)
        dk = np.diff(k[sel])
        if qv > 0:
            ok &= bool(np.all(dk >= 0))
        elif qv < 0:
            ok &= bool(np.all(dk <= 0))
        else:
            span = float(np.ptp(k[q == qv]))
            ok &= span <= 0.02
            notes.append(f"q=0 range {span:.1e}")
    t = clk.elapsed
    criterion(10, f"{len(res.rows)} rows, monotone trends {'hold' if ok else 'FAIL'}, {notes[0]}, {t:.0f} s")
    assert ok and t < 300


PDE_CASES = [(0.0, 0.0), (0.0, 0.5), (1.0, 0.0), (1.0, 0.5)]


@pytest.mark.slow
def test_c11_pde_agreement(criterion):
    clk = Clock()
    rows = []
    for q, omega in PDE_CASES:
        Dm = CosineSquared(0.1, 1.0, omega)
        c = spreading_speed(R, Dm, q).c_star
        T = 60.0
        # level 0.02 sits below the invaded state, whose minimum is 0.043 for q = 1, omega = 0
        cfg = SimConfig(R, Dm, q, T, domain_length=float(int(c * T + 40)), dx=1 / 32, level=0.02,
                        initial_width=5.0)
        tr = measure_front_speed(cfg)
        rows.append((q, omega, abs(tr.fitted_speed - c) / c, tr.level_ok and tr.monotone))
    t = clk.elapsed
    worst = max(r[2] for r in rows)
    criterion(11, "rel gaps " + ", ".join(f"(q={q:g}, w={w:g}) {g:.2%}" for q, w, g, _ in rows)
              + f", {t:.0f} s")
    assert worst <= 0.05 and all(r[3] for r in rows) and t < 600


def _circular_distance(x, target):
    d = abs(x - target) % 1.0
    return min(d, 1.0 - d)


@pytest.mark.slow
def test_c12_annealing(criterion):
    clk = Clock()
    fick = run_annealing(AnnealConfig(q_num=0.0, q_den=1.0, seed=1))
    fokker = run_annealing(AnnealConfig(q_num=1.0, q_den=0.0, seed=1))
    t = clk.elapsed
    d0 = _circular_distance(fick.peak_location, 0.0)
    d1 = _circular_distance(fokker.peak_location, 0.5)
    criterion(12, f"c0/c1 = {fick.best_ratio:.4f} (peak {fick.peak_location:.3f}), "
                  f"c1/c0 = {fokker.best_ratio:.4f} (peak {fokker.peak_location:.3f}), {t:.0f} s")
    assert fick.best_ratio >= 1.3 and fokker.best_ratio >= 1.10
    assert d0 <= 0.15 and d1 <= 0.15 and t < 1800


def test_c13_lemma_constructions(criterion):
    clk = Clock()
    res = lemma_constructions(D, 1.0)
    reduce_margin = res["reduce"][1] - res["reduce"][0]
    increase_margin = res["increase"][0] - res["increase"][1]
    t = clk.elapsed
    criterion(13, f"k_0 - k_1 = {reduce_margin:.4f} (reduce), k_1 - k_0 = {increase_margin:.4f} "
                  f"(increase), {t:.1f} s")
    assert reduce_margin >= 1e-4 and increase_margin >= 1e-4 and t < 60


def test_c14_property_suites(criterion):
    checks = {}
    lams = np.linspace(-2, 2, 9)
    ks = np.array([k_value(R, D, 1.0, lam).k for lam in lams])
    checks["convexity in lambda"] = bool(np.all(ks[:-2] - 2 * ks[1:-1] + ks[2:] > 0))

    M = assemble(OperatorSpec(R, D, 1.0, 0.4, 256))
    checks["adjoint equality"] = abs(principal_eigenpair(M.transpose()).k - principal_eigenpair(M).k) <= 1e-10

    k1 = persistence(R, D, 1.0)
    rng = np.random.default_rng(5)
    trials = [build_periodic_spline([a, b, c, a]) for a, b, c in rng.uniform(0.3, 0.9, (20, 3))]
    checks["Rayleigh maximality"] = all(rayleigh_value(R, D, 1.0, phi) <= k1 + 1e-6 for phi in trials)

    cfg = SimConfig(Constant(0.0), D, 1.0, 1.0, domain_length=20.0, dx=1 / 16, boundary="periodic")
    st = _Stencil(cfg)
    u = np.exp(-((np.arange(cfg.n_points) * cfg.dx - 10.0) ** 2))
    worst = 0.0
    for _ in range(100):
        expected = (u.sum() - st.dt * (u**2).sum()) * cfg.dx
        u = step(u, cfg, st)
        worst = max(worst, abs(u.sum() * cfg.dx - expected))
    checks["mass balance"] = worst <= 1e-12

    kn = [principal_eigenpair(assemble(OperatorSpec(R, D, 1.0, 0.5, n))).k for n in (256, 512, 1024)]
    checks["grid-convergence ratio"] = abs((kn[0] - kn[1]) / (kn[1] - kn[2]) - 4.0) <= 0.05

    spec = SweepSpec("k_and_c_vs_omega", (0.0, 0.5), R, D, qs=(1.0,), tol=1e-6)
    checks["sweep determinism"] = csv_text(run_sweep(spec, 1)) == csv_text(run_sweep(spec, 2))

    failed = [name for name, ok in checks.items() if not ok]
    criterion(14, f"{len(checks) - len(failed)}/{len(checks)} property checks"
                  + (f", failed: {', '.join(failed)}" if failed else ""))
    assert not failed
