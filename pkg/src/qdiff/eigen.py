"""Principal eigenvalue of the periodic operator

    L psi = D psi'' + ((1+q) D' - 2 lam D) psi' + (q D'' + lam^2 D - (1+q) lam D' + r) psi

discretised by second-order central differences on a uniform periodic grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.linalg.lapack import dgttrf, dgttrs

from .fields import PeriodicField, check_positive

N_START = 512
N_MAX = 65536
MAX_ITER = 200_000
_EPS = np.finfo(float).eps
_ROUNDING_NEG = 1e-12


class EigenError(RuntimeError):
    pass


class NonConvergenceError(EigenError):
    pass


class PositivityError(EigenError):
    """The computed eigenvector is not strictly positive: refine the grid."""


class PecletError(EigenError):
    def __init__(self, msg, peclet):
        super().__init__(msg)
        self.peclet = peclet


@dataclass(frozen=True)
class OperatorSpec:
    r: PeriodicField
    D: PeriodicField
    q: float
    lam: float = 0.0
    n: int = N_START

    def __post_init__(self):
        if self.n < 32:
            raise ValueError("grid needs at least 32 points")

    @property
    def period(self) -> float:
        return self.D.period


@dataclass(frozen=True)
class PeriodicTridiagonal:
    """Cyclic tridiagonal matrix.  Row ``i`` couples ``i-1, i, i+1`` (mod n);
    ``sub[0]`` is the (0, n-1) corner and ``sup[-1]`` the (n-1, 0) corner.

    When built from an operator, ``diffusion``/``drift``/``reaction`` hold the
    nodal coefficients and products are formed in difference form, which is
    exact on constants and far less sensitive to cancellation.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    delta: float
    diffusion: np.ndarray | None = None
    drift: np.ndarray | None = None
    reaction: np.ndarray | None = None
    peclet: float = 0.0

    @property
    def n(self) -> int:
        return self.diag.size

    @property
    def corners(self) -> tuple[float, float]:
        return float(self.sub[0]), float(self.sup[-1])

    @property
    def m_structure(self) -> bool:
        return bool(np.all(self.sub >= 0) and np.all(self.sup >= 0) and self.peclet < 1.0)

    def row_sums(self) -> np.ndarray:
        if self.reaction is not None:
            return self.reaction.copy()
        return self.sub + self.diag + self.sup

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.sub) + np.abs(self.diag) + np.abs(self.sup)))

    def matvec(self, x: np.ndarray) -> np.ndarray:
        xm = np.roll(x, 1)
        xp = np.roll(x, -1)
        if self.diffusion is not None:
            d2 = ((xm - x) + (xp - x)) / self.delta**2
            d1 = (xp - xm) / (2 * self.delta)
            return self.diffusion * d2 + self.drift * d1 + self.reaction * x
        return self.sub * xm + self.diag * x + self.sup * xp

    def transpose(self) -> "PeriodicTridiagonal":
        return PeriodicTridiagonal(np.roll(self.sup, 1), self.diag.copy(), np.roll(self.sub, -1),
                                   self.delta, peclet=self.peclet)

    def to_sparse(self) -> sp.csc_matrix:
        n = self.n
        i = np.arange(n)
        rows = np.concatenate([i, i, i])
        cols = np.concatenate([(i - 1) % n, i, (i + 1) % n])
        vals = np.concatenate([self.sub, self.diag, self.sup])
        return sp.csc_matrix((vals, (rows, cols)), shape=(n, n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


@dataclass(frozen=True)
class EigenResult:
    k: float
    phi: np.ndarray
    residual: float
    n_used: int
    iterations: int


class KValue(NamedTuple):
    k: float
    n_used: int


def assemble_coefficients(a, b, c, delta: float) -> PeriodicTridiagonal:
    """Matrix of ``a psi'' + b psi' + c psi`` with central differences."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    sub = a / delta**2 - b / (2 * delta)
    sup = a / delta**2 + b / (2 * delta)
    diag = -2 * a / delta**2 + c
    peclet = float(np.max(np.abs(b) * delta / (2 * a)))
    return PeriodicTridiagonal(sub, diag, sup, delta, a, b, c, peclet)


def operator_coefficients(r, D, q, lam, n):
    """Nodal ``(a, b, c)`` of the operator on ``n`` points over one period."""
    x = np.arange(n) * (D.period / n)
    d0 = D.grid(n)
    if np.any(d0 <= 0):
        raise ValueError("diffusion coefficient must be positive on the grid")
    d1 = np.asarray(D.derivative(1)(x), dtype=float) * np.ones(n)
    d2 = np.asarray(D.derivative(2)(x), dtype=float) * np.ones(n)
    rv = np.asarray(r(x), dtype=float) * np.ones(n)
    a = d0
    b = (1 + q) * d1 - 2 * lam * d0
    c = q * d2 + lam**2 * d0 - (1 + q) * lam * d1 + rv
    return a, b, c


def assemble(spec: OperatorSpec) -> PeriodicTridiagonal:
    a, b, c = operator_coefficients(spec.r, spec.D, spec.q, spec.lam, spec.n)
    return assemble_coefficients(a, b, c, spec.period / spec.n)


def _residual_floor(M: PeriodicTridiagonal) -> float:
    return 64 * _EPS * M.norm_inf()


def principal_eigenpair(M: PeriodicTridiagonal, x0=None, *, method: str = "inverse",
                        max_iter: int = MAX_ITER) -> EigenResult:
    """Eigenvalue of maximal real part and its positive eigenvector.

    ``method="inverse"`` iterates with ``(sigma I - M)^-1``; for ``sigma``
    above the principal eigenvalue that inverse is a positive matrix with the
    same Perron vector.  ``method="power"`` is plain power iteration on
    ``M + sI``, ``s = 1 + max|diag|``, with Aitken acceleration of the
    eigenvalue sequence; it is only practical on small grids.

    The residual target is ``1e-9 (1 + |k|)`` plus a rounding floor
    ``64 eps ||M||_inf``, which dominates on fine grids.
    """
    n = M.n
    x = np.ones(n) if x0 is None else np.array(x0, dtype=float)
    if x.shape != (n,) or not np.all(x > 0):
        x = np.ones(n)
    x /= x.max()
    floor = _residual_floor(M)
    if method == "power":
        k, x, res, it = _power(M, x, floor, max_iter)
    elif method == "inverse":
        k, x, res, it = _inverse(M, x, floor, max_iter)
    else:
        raise ValueError(f"unknown method {method!r}")
    # entries of a sharply concentrated eigenvector can sit at rounding level
    if x.min() < -_ROUNDING_NEG:
        raise PositivityError(f"eigenvector has non-positive entries (min {x.min():.3g}); refine the grid")
    x = np.maximum(x, np.finfo(float).tiny)
    return EigenResult(k, x, res, n, it)


def _estimate(M, x):
    Mx = M.matvec(x)
    k = float(x @ Mx / (x @ x))
    res = float(np.max(np.abs(Mx - k * x)))
    return k, res


class CyclicLU:
    """LU factors of ``sigma I - M`` for a cyclic tridiagonal ``M``.

    The corners are removed by a rank-one (Sherman-Morrison) update and the
    remaining tridiagonal matrix is factored by LAPACK ``gttrf``.  ``solve``
    mirrors ``scipy.sparse.linalg.splu(...).solve`` including ``trans="T"``.
    """

    def __init__(self, M: PeriodicTridiagonal, sigma: float):
        n = M.n
        if n < 3:
            raise ValueError("cyclic solve needs n >= 3")
        d = sigma - M.diag
        lower = -M.sub[1:].copy()   # A[i, i-1]
        upper = -M.sup[:-1].copy()  # A[i, i+1]
        alpha = -M.sub[0]   # A[0, n-1]
        beta = -M.sup[-1]   # A[n-1, 0]
        gamma = -d[0] if d[0] != 0 else -1.0
        d = d.copy()
        d[0] -= gamma
        d[-1] -= alpha * beta / gamma
        self.u = np.zeros(n)
        self.u[0], self.u[-1] = gamma, beta
        self.v = np.zeros(n)
        self.v[0], self.v[-1] = 1.0, alpha / gamma
        dl, dd, du, du2, ipiv, info = dgttrf(lower, d, upper)
        if info != 0:
            raise EigenError(f"tridiagonal factorisation failed (info={info})")
        self._f = (dl, dd, du, du2, ipiv)
        self.z = self._base(self.u, "N")
        self.zt = self._base(self.v, "T")

    def _base(self, b, trans):
        x, info = dgttrs(*self._f, b, trans=trans)
        if info != 0:
            raise EigenError(f"tridiagonal solve failed (info={info})")
        return x

    def solve(self, b, trans="N"):
        if trans == "N":
            y = self._base(b, "N")
            return y - (self.v @ y) / (1.0 + self.v @ self.z) * self.z
        y = self._base(b, "T")
        return y - (self.u @ y) / (1.0 + self.u @ self.zt) * self.zt


def _inverse(M, x, floor, max_iter):
    k, res = _estimate(M, x)
    sigma = float(np.max(M.row_sums())) + 1.0
    sigma = max(sigma, k + 1.0)
    lu = CyclicLU(M, sigma)
    stall = 0
    for it in range(1, max_iter + 1):
        y = lu.solve(x)
        ymax = y[np.argmax(np.abs(y))]
        x = y / ymax
        k_new, res = _estimate(M, x)
        dk = abs(k_new - k)
        k = k_new
        scale = 1.0 + abs(k)
        target = 1e-9 * scale + floor
        if res <= target:
            if dk < 1e-12 * scale:
                return _two_sided(M, lu, x, k), x, res, it
            # the eigenvalue estimate jitters at rounding level
            stall = stall + 1 if dk < 1e-9 * scale else 0
            if stall >= 3:
                return _two_sided(M, lu, x, k), x, res, it
        # move the shift towards k once the estimate has settled
        gap = sigma - k
        want = k + max(1e-4 * scale, 10 * dk, res)
        if want < sigma - 0.5 * gap and dk < 0.1 * scale:
            sigma = want
            lu = CyclicLU(M, sigma)
    raise NonConvergenceError(f"inverse iteration did not converge in {max_iter} steps (res={res:.3g})")


def _two_sided(M, lu, x, k):
    """Refine ``k`` with the left Perron vector: ``w.Mx / w.x`` is second
    order in the eigenvector errors, which removes most rounding noise."""
    w = np.ones_like(x)
    for _ in range(50):
        z = lu.solve(w, trans="T")
        z /= z[np.argmax(np.abs(z))]
        done = np.max(np.abs(z - w)) < 1e-13
        w = z
        if done:
            break
    den = float(w @ x)
    if not np.all(w > -_ROUNDING_NEG) or den <= 0:
        return k
    return float(w @ M.matvec(x)) / den


def _power(M, x, floor, max_iter):
    s = 1.0 + float(np.max(np.abs(M.diag)))
    hist = []
    k = np.nan
    for it in range(1, max_iter + 1):
        y = M.matvec(x) + s * x
        x = y / y.max()
        k_raw, res = _estimate(M, x)
        hist.append(k_raw)
        k_acc = k_raw
        if len(hist) >= 3:
            a0, a1, a2 = hist[-3:]
            den = a2 - 2 * a1 + a0
            if den != 0:
                k_acc = a2 - (a2 - a1) ** 2 / den
        scale = 1.0 + abs(k_raw)
        if abs(k_acc - k) < 1e-12 * scale and res <= 1e-9 * scale + floor:
            return k_raw, x, res, it
        k = k_acc
    raise NonConvergenceError(f"power iteration did not converge in {max_iter} steps")


def _refine(phi):
    """Linear interpolation of a periodic grid function onto the doubled grid."""
    out = np.empty(2 * phi.size)
    out[0::2] = phi
    out[1::2] = 0.5 * (phi + np.roll(phi, -1))
    return out


def richardson_k(coefficients: Callable[[int], tuple], period: float, tol: float,
                 n0: int = N_START, n_max: int = N_MAX, warm: dict | None = None) -> KValue:
    """Principal eigenvalue from grid doubling and Richardson extrapolation.

    ``coefficients(n)`` returns nodal ``(a, b, c)``.  Grids violating the
    cell-Peclet condition are skipped.  Returns ``k_2n + (k_2n - k_n) / 3``
    as soon as ``|k_2n - k_n| / 3 < tol``, or as soon as two consecutive
    extrapolated values agree to ``tol`` (the extrapolated value is fourth
    order accurate, so the first test alone would drive n into the range
    where rounding in ``1/dx^2`` dominates).  ``warm`` maps grid size to a
    previous eigenvector and is updated in place.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    prev = None
    prev_extrap = None
    seed = None
    worst_peclet = 0.0
    last_change = None
    n = n0
    while n <= n_max:
        a, b, c = coefficients(n)
        M = assemble_coefficients(a, b, c, period / n)
        if not M.m_structure:
            worst_peclet = M.peclet
            prev = prev_extrap = seed = None
            n *= 2
            continue
        x0 = None if warm is None else warm.get(n)
        if x0 is None and seed is not None:
            x0 = _refine(seed)
        res = principal_eigenpair(M, x0)
        seed = res.phi
        if warm is not None:
            warm[n] = res.phi
        if prev is not None:
            change = (res.k - prev) / 3.0
            extrap = res.k + change
            last_change = change
            if abs(change) < tol:
                return KValue(extrap, n)
            if prev_extrap is not None and abs(extrap - prev_extrap) < tol:
                return KValue(extrap, n)
            prev_extrap = extrap
        prev = res.k
        n *= 2
    if last_change is None:
        raise PecletError(f"cell Peclet number {worst_peclet:.3g} >= 1 up to n_max={n_max}", worst_peclet)
    raise NonConvergenceError(f"Richardson change {abs(last_change):.3g} above tol {tol:g} at n_max={n_max}")


def k_value(r: PeriodicField, D: PeriodicField, q: float, lam: float, tol: float = 1e-8,
            n0: int = N_START, n_max: int = N_MAX, warm: dict | None = None) -> KValue:
    """Principal eigenvalue ``k_q^lam[r; D]`` to Richardson tolerance ``tol``."""
    check_positive(D)
    return richardson_k(lambda n: operator_coefficients(r, D, q, lam, n), D.period, tol,
                        n0, n_max, warm)
