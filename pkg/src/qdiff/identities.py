"""Exact reductions of the q-diffusion eigenproblem and their numerical checks.

* Fickian reduction: ``k_q^lam[r; D] = k_0^lam[r - h_q; D]``.
* Space deformation ``y = h(x) = int_0^x D^-1/2``, which turns the problem
  into one with unit diffusion on a period of length ``h(1)``.
* The variational (Rayleigh) characterisation of ``k_q^0``.
* The large-amplitude limit ``B -> inf`` of ``k_q^0[r; B D]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .eigen import N_MAX, N_START, k_value, richardson_k
from .fields import FieldError, PeriodicField, Sampled, as_field, check_positive, period_mean

DEFORM_NODES = 8192
_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(6)


def hq_correction(D: PeriodicField, q: float) -> PeriodicField:
    """``h_q = -(q/2) D'' + (q^2/4) D'^2 / D``."""
    d1 = D.derivative(1)
    d2 = D.derivative(2)
    return -0.5 * q * d2 + (0.25 * q * q) * (d1 * d1) / D


def check_fickian_reduction(r: PeriodicField, D: PeriodicField, q: float, lam: float,
                            tol: float = 1e-9) -> tuple[float, float, float]:
    """Return ``(lhs, rhs, gap)`` for the Fickian reduction identity."""
    lhs = k_value(r, D, q, lam, tol).k
    if q == 0:
        return lhs, lhs, 0.0
    rhs = k_value(r - hq_correction(D, q), D, 0.0, lam, tol).k
    return lhs, rhs, abs(lhs - rhs)


def s_q(q: float) -> float:
    return 0.5 - q


@dataclass(frozen=True)
class DeformedProblem:
    """``R = r o h^-1`` and ``P = ln D o h^-1`` on the period ``h(1)``."""

    x_nodes: np.ndarray
    h_nodes: np.ndarray
    new_period: float
    R: PeriodicField
    P: PeriodicField

    def h(self, x):
        """The deformation map, by interpolation of the tabulated values."""
        return PchipInterpolator(self.x_nodes, self.h_nodes)(x)

    def h_inverse(self, y):
        return PchipInterpolator(self.h_nodes, self.x_nodes)(y)


def _cumulative_h(D: PeriodicField, x: np.ndarray) -> np.ndarray:
    # Gauss-Legendre on every cell, then a running sum
    a, b = x[:-1], x[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
    vals = np.asarray(D(pts.ravel()), dtype=float).reshape(pts.shape) ** -0.5
    cells = half * (vals @ _GAUSS_W)
    return np.concatenate(([0.0], np.cumsum(cells)))


def _h_between(D: PeriodicField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
    vals = np.asarray(D(pts.ravel()), dtype=float).reshape(pts.shape) ** -0.5
    return half * (vals @ _GAUSS_W)


def deform(D: PeriodicField, r: PeriodicField, nodes: int = DEFORM_NODES) -> DeformedProblem:
    """Tabulate ``h`` on ``nodes`` cells and resample ``r`` and ``ln D`` in ``y``.

    ``h^-1`` is a monotone cubic (PCHIP) interpolant of the table, polished by
    two Newton steps on ``h(x) = y`` so that the resampled fields are accurate
    to quadrature precision rather than to the interpolation order.
    """
    check_positive(D)
    L = D.period
    x = np.linspace(0.0, L, nodes + 1)
    hx = _cumulative_h(D, x)
    H = float(hx[-1])
    y = np.arange(nodes) * (H / nodes)
    xi = PchipInterpolator(hx, x)(y)
    idx = np.clip(np.searchsorted(x, xi, side="right") - 1, 0, nodes - 1)
    for _ in range(2):
        hv = hx[idx] + _h_between(D, x[idx], xi)
        xi = xi - (hv - y) * np.sqrt(D(xi))
    R = Sampled(np.asarray(r(xi), dtype=float) * np.ones(nodes), H)
    P = Sampled(np.log(np.asarray(D(xi), dtype=float) * np.ones(nodes)), H)
    return DeformedProblem(x, hx, H, R, P)


def deformed_coefficients(problem: DeformedProblem, q: float, mu: float, n: int):
    """Nodal ``(a, b, c)`` of ``Phi'' - d/dy[(2 mu + s P') Phi] + (R + mu s P' + mu^2) Phi``."""
    s = s_q(q)
    y = np.arange(n) * (problem.new_period / n)
    p1 = np.asarray(problem.P.derivative(1)(y), dtype=float)
    p2 = np.asarray(problem.P.derivative(2)(y), dtype=float)
    rv = np.asarray(problem.R(y), dtype=float)
    a = np.ones(n)
    b = -(2 * mu + s * p1)
    c = rv + mu * s * p1 + mu * mu - s * p2
    return a, b, c


def deformed_eigenvalue(problem: DeformedProblem, q: float, mu: float, tol: float = 1e-9,
                        n0: int = N_START, n_max: int = N_MAX) -> float:
    """Principal eigenvalue of the deformed (unit-diffusion) operator."""
    return richardson_k(lambda n: deformed_coefficients(problem, q, mu, n),
                        problem.new_period, tol, n0, n_max).k


def rayleigh_value(r: PeriodicField, D: PeriodicField, q: float, phi) -> float:
    """``-int D^(1-q) |(D^(q/2) phi)'|^2 + int r phi^2`` with ``int phi^2 = 1``.

    ``phi`` is a positive field or an array of values on a uniform grid over
    one period (taken as a periodic spline).  The maximum over ``phi`` is
    ``k_q^0[r; D]``, attained at ``D^(q/2) psi`` for the principal
    eigenfunction ``psi``.
    """
    if isinstance(phi, np.ndarray):
        phi = Sampled(phi, D.period)
    phi = as_field(phi, D.period)
    if phi.grid(1024).min() <= 0:
        raise FieldError("trial function must be positive")
    # (D^(q/2) phi)' = D^(q/2) (phi' + (q/2) (D'/D) phi)
    inner = phi.derivative(1) + (0.5 * q) * (D.derivative(1) / D) * phi
    energy = period_mean(D * inner * inner)
    norm = period_mean(phi * phi)
    return float((period_mean(r * phi * phi) - energy) / norm)


def large_B_limit(r: PeriodicField, D: PeriodicField, q: float) -> float:
    """``int r D^-q / int D^-q``, the limit of ``k_q^0[r; B D]`` as ``B -> inf``."""
    check_positive(D)
    w = D ** (-q)
    return float(period_mean(r * w) / period_mean(w))


def persistence_bounds(r: PeriodicField, D: PeriodicField, q: float) -> tuple[float, float]:
    """``<D^q>_H int r / D^q`` and ``max r``, which bracket ``k_q^0[r; B D]`` for every ``B``."""
    check_positive(D)
    w = D ** (-q)
    lower = period_mean(r * w) / period_mean(w)
    return float(lower), float(r.grid(4096).max())



# ---------------------------------------------------------------------------
# the identity suite behind ``qdiff verify``

IDENTITY_QS = (-2.0, 1.0, 3.0)
IDENTITY_LAMBDAS = (0.0, 0.5)


def presets() -> dict:
    """Named ``(r, D)`` pairs used by the identity suite."""
    from .fields import CosineSquared, Sinusoid
    return {
        "cos2": (CosineSquared(0.0, 1.0, 0.0), CosineSquared(0.1, 1.0, 0.0)),
        "smooth": (Sinusoid(0.5, 0.4, 2, 0.3), Sinusoid(1.0, 0.3, 1, 0.1)),
    }


@dataclass(frozen=True)
class IdentityCase:
    identity: str
    label: str
    tolerance: float
    params: tuple = ()


def identity_suite() -> list[IdentityCase]:
    cases = []
    for name in presets():
        for q in IDENTITY_QS:
            for lam in IDENTITY_LAMBDAS:
                p = (name, q, lam)
                cases.append(IdentityCase("fickian_reduction", f"{name} q={q:g} lambda={lam:g}", 1e-6, p))
                cases.append(IdentityCase("deformation", f"{name} q={q:g} lambda={lam:g}", 1e-5, p))
    for q in (-1.0, 1.0, 2.0):
        cases.append(IdentityCase("rayleigh_maximiser", f"cos2 q={q:g}", 1e-6, ("cos2", q)))
        cases.append(IdentityCase("large_B_limit", f"cos2 q={q:g} B=1000", 1e-2, ("cos2", q, 1000.0)))
    cases.append(IdentityCase("q_limit", "cos2 q=40 -> r(argmin D)", 5e-2, ("cos2", 40.0, 0.5)))
    cases.append(IdentityCase("q_limit", "cos2 q=-40 -> r(argmax D)", 5e-2, ("cos2", -40.0, 0.0)))
    # for the lemma constructions the "gap" is the shortfall of the margin below 1e-4
    cases.append(IdentityCase("lemma_reduce", "cos2 q=1 r=1+h_q", 0.0, ("cos2", 1.0)))
    cases.append(IdentityCase("lemma_increase", "cos2 q=1 r=-50 h_q", 0.0, ("cos2", 1.0)))
    return cases


LEMMA_MARGIN = 1e-4
LEMMA_A = 50.0


def lemma_constructions(D: PeriodicField, q: float, a: float = LEMMA_A, tol: float = 1e-9) -> dict:
    """``k_q^0`` against ``k_0^0`` for the two growth rates built from ``h_q``:
    ``r = 1 + h_q`` (q-diffusion lowers persistence) and ``r = -a h_q``
    (q-diffusion raises it)."""
    hq = hq_correction(D, q)
    out = {}
    for name, r in (("reduce", 1.0 + hq), ("increase", -a * hq)):
        kq = k_value(r, D, q, 0.0, tol).k
        k0 = k_value(r, D, 0.0, 0.0, tol).k
        out[name] = (kq, k0)
    return out


def run_identity_case(case: IdentityCase) -> float:
    """The numerical gap for one case; it passes when ``gap <= tolerance``."""
    from .fields import sqrt_harmonic_mean
    r, D = presets()[case.params[0]]
    kind = case.identity
    if kind == "fickian_reduction":
        _, q, lam = case.params
        return check_fickian_reduction(r, D, q, lam)[2]
    if kind == "deformation":
        _, q, lam = case.params
        mu = lam * sqrt_harmonic_mean(D)
        return abs(deformed_eigenvalue(deform(D, r), q, mu) - k_value(r, D, q, lam, 1e-9).k)
    if kind == "rayleigh_maximiser":
        from .eigen import OperatorSpec, assemble, principal_eigenpair
        _, q = case.params
        n = 2048
        phi = principal_eigenpair(assemble(OperatorSpec(r, D, q, 0.0, n))).phi
        trial = D.grid(n) ** (0.5 * q) * phi
        return abs(rayleigh_value(r, D, q, trial) - k_value(r, D, q, 0.0, 1e-9).k)
    if kind == "large_B_limit":
        _, q, B = case.params
        return abs(k_value(r, B * D, q, 0.0, 1e-7).k - large_B_limit(r, D, q))
    if kind == "q_limit":
        _, q, x0 = case.params
        return abs(k_value(r, D, q, 0.0, 1e-7).k - float(r(x0)))
    if kind in ("lemma_reduce", "lemma_increase"):
        _, q = case.params
        kq, k0 = lemma_constructions(D, q)[kind.split("_")[1]]
        margin = (k0 - kq) if kind == "lemma_reduce" else (kq - k0)
        return max(0.0, LEMMA_MARGIN - margin)
    raise ValueError(f"unknown identity {kind!r}")
