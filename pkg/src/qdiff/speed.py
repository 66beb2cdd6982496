"""Persistence eigenvalue and Freidlin-Gartner spreading speeds."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .eigen import k_value
from .fields import PeriodicField, sqrt_harmonic_mean

LAMBDA_MAX = 2.0**40
_INVPHI = (math.sqrt(5) - 1) / 2


class ExtinctionError(RuntimeError):
    """Raised instead of a speed when the persistence eigenvalue is not positive."""

    def __init__(self, k0: float):
        super().__init__(f"no spreading: persistence eigenvalue k0={k0:.6g} <= tolerance")
        self.k0 = k0


class BracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpeedResult:
    c_star: float
    lambda_star: float
    direction: str
    k_at_lambda_star: float
    bracket: tuple
    evaluations: int
    k0: float


def persistence(r: PeriodicField, D: PeriodicField, q: float, tol: float = 1e-9) -> float:
    """``k_q^0[r; D]``; the population persists iff this is positive."""
    return k_value(r, D, q, 0.0, tol).k


def spreading_speed(r: PeriodicField, D: PeriodicField, q: float, direction: str = "right",
                    tol: float = 1e-7, lambda_tol: float = 1e-6) -> SpeedResult:
    """Minimise ``g(lam) = k_q^(+-lam) / lam`` over ``lam > 0``.

    ``tol`` is the relative accuracy requested for the speed; each eigenvalue
    is computed to ``1e-2 * tol * lam``.  The minimiser is bracketed by
    doubling/halving from ``lam = 1`` and then refined by golden section until
    the bracket is narrower than ``lambda_tol * (1 + lam*)``.
    """
    if direction not in ("left", "right"):
        raise ValueError(f"direction must be 'left' or 'right', got {direction!r}")
    sign = 1.0 if direction == "right" else -1.0
    k0 = persistence(r, D, q, tol=min(1e-2 * tol, 1e-6))
    if k0 <= tol:
        raise ExtinctionError(k0)

    warm: dict = {}
    cache: dict = {}

    def g(lam):
        if lam not in cache:
            k = k_value(r, D, q, sign * lam, max(1e-2 * tol * lam, 1e-11), warm=warm).k
            cache[lam] = k
        return cache[lam] / lam

    lo, mid, hi = 0.5, 1.0, 2.0
    glo, gmid, ghi = g(lo), g(mid), g(hi)
    while not (glo > gmid < ghi):
        if ghi <= gmid:
            lo, mid, glo, gmid = mid, hi, gmid, ghi
            hi *= 2
            if hi > LAMBDA_MAX:
                raise BracketError("minimiser of k/lambda not bracketed below 2**40")
            ghi = g(hi)
        else:
            hi, mid, ghi, gmid = mid, lo, gmid, glo
            lo /= 2
            if lo < 1.0 / LAMBDA_MAX:
                raise BracketError("minimiser of k/lambda not bracketed above 2**-40")
            glo = g(lo)
    bracket = (lo, hi)

    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > lambda_tol * (1 + 0.5 * (a + b)):
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    lam_star, g_star = min(cache.items(), key=lambda kv: kv[1] / kv[0])
    return SpeedResult(g_star / lam_star, lam_star, direction, g_star, bracket, len(cache), k0)


def stratonovich_speed(r0: float, D: PeriodicField) -> float:
    """Closed-form speed for constant ``r0`` and ``q = 1/2``: ``2 sqrt(r0) <sqrt D>_H``."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    return 2.0 * math.sqrt(r0) * sqrt_harmonic_mean(D)
