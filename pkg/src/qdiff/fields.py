"""Periodic coefficient fields.

A ``PeriodicField`` is an immutable, vectorised, periodic function of one real
variable that knows its own derivatives.  Closed-form kinds (constants,
sinusoids, splines) are differentiated analytically; sampled fields use
fourth-order periodic finite differences.  Fields combine with ordinary
arithmetic, which builds small expression trees differentiated by the usual
sum/product/quotient/chain rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

__all__ = [
    "FieldError",
    "PeriodicField",
    "Constant",
    "Sinusoid",
    "CosineSquared",
    "Spline",
    "Sampled",
    "Shifted",
    "ExtremaSet",
    "as_field",
    "exp",
    "log",
    "sqrt",
    "derivative",
    "phase_shift",
    "period_mean",
    "power_harmonic_mean",
    "sqrt_harmonic_mean",
    "build_periodic_spline",
    "solve_cyclic_tridiagonal",
    "check_positive",
    "find_extrema",
    "from_record",
    "to_record",
    "parse_field",
]

QUAD_POINTS = 4096
POSITIVITY_SCAN = 1024
POSITIVITY_FLOOR = 1e-6


class FieldError(ValueError):
    """Invalid field construction or use."""


class PeriodicField:
    """Base class.  Subclasses implement ``_eval`` and ``_derivative``."""

    period: float = 1.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self._eval(x)
        if out.ndim == 0:
            return float(out)
        return out

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _derivative(self) -> "PeriodicField":
        raise NotImplementedError

    def derivative(self, order: int = 1) -> "PeriodicField":
        if order not in (1, 2):
            raise FieldError(f"derivative order must be 1 or 2, got {order!r}")
        out = self._derivative()
        if order == 2:
            out = out._derivative()
        return out

    def grid(self, n: int) -> np.ndarray:
        """Values on the uniform grid ``x_j = j * period / n``."""
        return np.asarray(self(np.arange(n) * (self.period / n)), dtype=float)

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        return _sum(self, as_field(other, self.period))

    __radd__ = __add__

    def __sub__(self, other):
        return _sum(self, -as_field(other, self.period))

    def __rsub__(self, other):
        return _sum(as_field(other, self.period), -self)

    def __neg__(self):
        return _product(Constant(-1.0, self.period), self)

    def __mul__(self, other):
        return _product(self, as_field(other, self.period))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _quotient(self, as_field(other, self.period))

    def __rtruediv__(self, other):
        return _quotient(as_field(other, self.period), self)

    def __pow__(self, p):
        p = float(p)
        if p == 0.0:
            return Constant(1.0, self.period)
        if p == 1.0:
            return self
        return Power(self, p)


def as_field(value, period: float = 1.0) -> PeriodicField:
    if isinstance(value, PeriodicField):
        return value
    if np.isscalar(value):
        return Constant(float(value), period)
    raise TypeError(f"cannot convert {type(value).__name__} to a PeriodicField")


def _check_periods(*fields: PeriodicField) -> float:
    period = fields[0].period
    for f in fields[1:]:
        if not math.isclose(f.period, period, rel_tol=1e-14):
            raise FieldError(f"period mismatch: {period} vs {f.period}")
    return period


# ---------------------------------------------------------------------------
# closed-form kinds


class Constant(PeriodicField):
    def __init__(self, value: float, period: float = 1.0):
        self.value = float(value)
        self.period = float(period)

    def _eval(self, x):
        return np.full(x.shape, self.value)

    def _derivative(self):
        return Constant(0.0, self.period)

    def __repr__(self):
        return f"Constant({self.value!r}, period={self.period!r})"


class Sinusoid(PeriodicField):
    """``mean + amplitude * cos(2*pi*m*(x + phase)/period + shift)``."""

    def __init__(self, mean, amplitude, m=1, phase=0.0, shift=0.0, period=1.0):
        self.mean = float(mean)
        self.amplitude = float(amplitude)
        self.m = int(m)
        self.phase = float(phase)
        self.shift = float(shift)
        self.period = float(period)

    def _eval(self, x):
        y = np.mod(x + self.phase, self.period)
        arg = 2.0 * np.pi * self.m * y / self.period + self.shift
        return self.mean + self.amplitude * np.cos(arg)

    def _derivative(self):
        k = 2.0 * np.pi * self.m / self.period
        return Sinusoid(0.0, self.amplitude * k, self.m, self.phase,
                        self.shift + np.pi / 2, self.period)

    def __repr__(self):
        return (f"Sinusoid(mean={self.mean!r}, amplitude={self.amplitude!r}, m={self.m}, "
                f"phase={self.phase!r}, shift={self.shift!r}, period={self.period!r})")


class CosineSquared(Sinusoid):
    """``offset + amplitude * cos(pi*(x + phase)/period)**2``."""

    def __init__(self, offset, amplitude=1.0, phase=0.0, period=1.0):
        super().__init__(offset + amplitude / 2, amplitude / 2, 1, phase, 0.0, period)
        self.offset = float(offset)
        self.cos2_amplitude = float(amplitude)

    def _eval(self, x):
        y = np.mod(x + self.phase, self.period)
        return self.offset + self.cos2_amplitude * np.cos(np.pi * y / self.period) ** 2

    def __repr__(self):
        return (f"CosineSquared({self.offset!r}, {self.cos2_amplitude!r}, "
                f"phase={self.phase!r}, period={self.period!r})")


def solve_cyclic_tridiagonal(sub, diag, sup, rhs):
    """Solve a cyclic tridiagonal system by the Thomas algorithm with a
    Sherman-Morrison correction for the two corner entries.

    Row ``i`` reads ``sub[i]*x[i-1] + diag[i]*x[i] + sup[i]*x[i+1] = rhs[i]``
    with indices taken modulo ``n`` (so ``sub[0]`` and ``sup[-1]`` are the
    corners).  Requires ``n >= 3``.
    """
    a = np.asarray(sub, dtype=float)
    b = np.array(diag, dtype=float)
    c = np.asarray(sup, dtype=float)
    d = np.asarray(rhs, dtype=float)
    n = b.size
    if n < 3:
        raise ValueError("cyclic tridiagonal solve needs n >= 3")
    alpha = c[-1]  # (n-1, 0)
    beta = a[0]    # (0, n-1)
    gamma = -b[0] if b[0] != 0 else 1.0
    bb = b.copy()
    bb[0] -= gamma
    bb[-1] -= alpha * beta / gamma
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = alpha

    def thomas(rhs_):
        cp = np.empty(n)
        dp = np.empty(n)
        cp[0] = c[0] / bb[0]
        dp[0] = rhs_[0] / bb[0]
        for i in range(1, n):
            den = bb[i] - a[i] * cp[i - 1]
            cp[i] = c[i] / den if i < n - 1 else 0.0
            dp[i] = (rhs_[i] - a[i] * dp[i - 1]) / den
        x = np.empty(n)
        x[-1] = dp[-1]
        for i in range(n - 2, -1, -1):
            x[i] = dp[i] - cp[i] * x[i + 1]
        return x

    y = thomas(d)
    z = thomas(u)
    # v = (1, 0, ..., 0, beta/gamma)
    fact = (y[0] + beta * y[-1] / gamma) / (1.0 + z[0] + beta * z[-1] / gamma)
    return y - fact * z


class Spline(PeriodicField):
    """Periodic C^2 cubic spline on uniform knots ``j*period/m``.

    Stores knot values and knot second derivatives; ``order`` selects which
    derivative of the spline this field evaluates.
    """

    def __init__(self, values, period=1.0, *, _m2=None, _order=0):
        y = np.asarray(values, dtype=float)
        if y.ndim != 1 or y.size < 3:
            raise FieldError("spline needs at least 3 distinct knots")
        self.values = y
        self.period = float(period)
        self.h = self.period / y.size
        if _m2 is None:
            m = y.size
            rhs = 6.0 * (np.roll(y, -1) - 2 * y + np.roll(y, 1)) / self.h**2
            _m2 = solve_cyclic_tridiagonal(np.ones(m), 4.0 * np.ones(m), np.ones(m), rhs)
        self.m2 = _m2
        self.order = _order

    @property
    def control(self) -> tuple:
        return tuple(self.values) + (float(self.values[0]),)

    def _eval(self, x):
        y = self.values
        m2 = self.m2
        h = self.h
        m = y.size
        s = np.mod(x, self.period) / h
        j = np.minimum(np.floor(s).astype(int), m - 1)
        t = s - j
        j1 = (j + 1) % m
        A = 1.0 - t
        B = t
        if self.order == 0:
            return A * y[j] + B * y[j1] + ((A**3 - A) * m2[j] + (B**3 - B) * m2[j1]) * h**2 / 6
        if self.order == 1:
            return ((y[j1] - y[j]) / h - (3 * A**2 - 1) / 6 * h * m2[j]
                    + (3 * B**2 - 1) / 6 * h * m2[j1])
        if self.order == 2:
            return A * m2[j] + B * m2[j1]
        if self.order == 3:
            return (m2[j1] - m2[j]) / h
        return np.zeros_like(t)

    def _derivative(self):
        return Spline(self.values, self.period, _m2=self.m2, _order=self.order + 1)

    def __repr__(self):
        return f"Spline({list(self.control)!r}, period={self.period!r}, order={self.order})"


class Sampled(PeriodicField):
    """Values on a uniform periodic grid; interpolated by a periodic cubic spline."""

    def __init__(self, values, period=1.0):
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size < 4:
            raise FieldError("sampled field needs at least 4 values")
        if not np.all(np.isfinite(v)):
            raise FieldError("sampled field has non-finite values")
        self.values = v
        self.period = float(period)
        self.h = self.period / v.size
        xs = np.arange(v.size + 1) * self.h
        self._interp = CubicSpline(xs, np.append(v, v[0]), bc_type="periodic")

    @classmethod
    def from_function(cls, func, n, period=1.0):
        return cls(func(np.arange(n) * (period / n)), period)

    def grid(self, n):
        size = self.values.size
        if n <= size and size % n == 0:
            return self.values[:: size // n].copy()
        return super().grid(n)

    def _eval(self, x):
        return self._interp(np.mod(x, self.period))

    def _derivative(self):
        return Sampled(_fd(self.values, self.h, 1), self.period)

    def derivative(self, order=1):
        if order not in (1, 2):
            raise FieldError(f"derivative order must be 1 or 2, got {order!r}")
        if self.values.size < 8:
            raise FieldError("sampled derivative needs at least 8 grid points")
        return Sampled(_fd(self.values, self.h, order), self.period)

    def __repr__(self):
        return f"Sampled(<{self.values.size} values>, period={self.period!r})"


def _fd(v, h, order):
    r = np.roll
    if order == 1:
        return (-r(v, -2) + 8 * r(v, -1) - 8 * r(v, 1) + r(v, 2)) / (12 * h)
    return (-r(v, -2) + 16 * r(v, -1) - 30 * v + 16 * r(v, 1) - r(v, 2)) / (12 * h * h)


class Shifted(PeriodicField):
    """``field(x + omega)``."""

    def __init__(self, base: PeriodicField, omega: float):
        self.base = base
        self.omega = float(omega)
        self.period = base.period

    def _eval(self, x):
        return self.base._eval(x + self.omega)

    def _derivative(self):
        return Shifted(self.base._derivative(), self.omega)

    def __repr__(self):
        return f"Shifted({self.base!r}, {self.omega!r})"


# ---------------------------------------------------------------------------
# composite kinds


class Composite(PeriodicField):
    pass


class Sum(Composite):
    def __init__(self, terms):
        self.terms = tuple(terms)
        self.period = _check_periods(*self.terms)

    def _eval(self, x):
        out = self.terms[0]._eval(x)
        for t in self.terms[1:]:
            out = out + t._eval(x)
        return out

    def _derivative(self):
        return _sum(*(t._derivative() for t in self.terms))

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.terms)) + ")"


class Product(Composite):
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.period = _check_periods(a, b)

    def _eval(self, x):
        return self.a._eval(x) * self.b._eval(x)

    def _derivative(self):
        return _sum(_product(self.a._derivative(), self.b), _product(self.a, self.b._derivative()))

    def __repr__(self):
        return f"({self.a!r} * {self.b!r})"


class Quotient(Composite):
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.period = _check_periods(a, b)

    def _eval(self, x):
        return self.a._eval(x) / self.b._eval(x)

    def _derivative(self):
        num = _sum(_product(self.a._derivative(), self.b), -_product(self.a, self.b._derivative()))
        return _quotient(num, Power(self.b, 2.0))

    def __repr__(self):
        return f"({self.a!r} / {self.b!r})"


class Power(Composite):
    def __init__(self, base, p):
        self.base = base
        self.p = float(p)
        self.period = base.period

    def _eval(self, x):
        return self.base._eval(x) ** self.p

    def _derivative(self):
        inner = self.base ** (self.p - 1.0)
        return _product(_product(Constant(self.p, self.period), inner), self.base._derivative())

    def __repr__(self):
        return f"({self.base!r} ** {self.p!r})"


class Exp(Composite):
    def __init__(self, base):
        self.base = base
        self.period = base.period

    def _eval(self, x):
        return np.exp(self.base._eval(x))

    def _derivative(self):
        return _product(self, self.base._derivative())

    def __repr__(self):
        return f"exp({self.base!r})"


class Log(Composite):
    def __init__(self, base):
        self.base = base
        self.period = base.period

    def _eval(self, x):
        return np.log(self.base._eval(x))

    def _derivative(self):
        return _quotient(self.base._derivative(), self.base)

    def __repr__(self):
        return f"log({self.base!r})"


def _is_const(f, value=None):
    return isinstance(f, Constant) and (value is None or f.value == value)


def _sum(*terms):
    flat = []
    const = 0.0
    period = _check_periods(*terms)
    for t in terms:
        if isinstance(t, Sum):
            flat.extend(t.terms)
        elif isinstance(t, Constant):
            const += t.value
        else:
            flat.append(t)
    if not flat:
        return Constant(const, period)
    if const != 0.0:
        flat.append(Constant(const, period))
    if len(flat) == 1:
        return flat[0]
    return Sum(flat)


def _product(a, b):
    _check_periods(a, b)
    if _is_const(a) and _is_const(b):
        return Constant(a.value * b.value, a.period)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Constant(0.0, a.period)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Product(a, b)


def _quotient(a, b):
    _check_periods(a, b)
    if _is_const(a, 0.0):
        return Constant(0.0, a.period)
    if _is_const(b):
        return _product(Constant(1.0 / b.value, b.period), a)
    return Quotient(a, b)


def exp(f: PeriodicField) -> PeriodicField:
    if isinstance(f, Constant):
        return Constant(math.exp(f.value), f.period)
    return Exp(f)


def log(f: PeriodicField) -> PeriodicField:
    if isinstance(f, Constant):
        return Constant(math.log(f.value), f.period)
    return Log(f)


def sqrt(f: PeriodicField) -> PeriodicField:
    if isinstance(f, Constant):
        return Constant(math.sqrt(f.value), f.period)
    return Power(f, 0.5)


# ---------------------------------------------------------------------------
# operations


def derivative(f: PeriodicField, order: int = 1) -> PeriodicField:
    return f.derivative(order)


def phase_shift(f: PeriodicField, omega: float) -> PeriodicField:
    """Field evaluating to ``f(x + omega)``."""
    if isinstance(f, CosineSquared):
        return CosineSquared(f.offset, f.cos2_amplitude, f.phase + omega, f.period)
    if isinstance(f, Sinusoid):
        return Sinusoid(f.mean, f.amplitude, f.m, f.phase + omega, f.shift, f.period)
    if isinstance(f, Constant):
        return f
    if isinstance(f, Shifted):
        return Shifted(f.base, f.omega + omega)
    return Shifted(f, omega)


def _mean_simpson(values):
    # periodic samples -> close the period for Simpson
    closed = np.append(values, values[0])
    return simpson(closed, dx=1.0 / values.size)


def period_mean(f: PeriodicField, n: int = QUAD_POINTS) -> float:
    """Mean of ``f`` over one period: composite Simpson on ``n`` and ``2n``
    points combined by one Richardson step."""
    coarse = _mean_simpson(f.grid(n))
    fine = _mean_simpson(f.grid(2 * n))
    return float(fine + (fine - coarse) / 15.0)


def _positive_samples(f: PeriodicField, n: int) -> np.ndarray:
    v = f.grid(n)
    if np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise FieldError("field must be strictly positive")
    return v


def power_harmonic_mean(f: PeriodicField, p: float) -> float:
    """``(mean of f**-p)**-1``; for ``p = 1`` the harmonic mean of ``f``."""
    _positive_samples(f, QUAD_POINTS)
    return 1.0 / period_mean(f ** (-p))


def sqrt_harmonic_mean(D: PeriodicField) -> float:
    """Harmonic mean of ``sqrt(D)``, i.e. ``(integral of D**-1/2 / period)**-1``."""
    return power_harmonic_mean(D, 0.5)


def check_positive(f: PeriodicField, n: int = POSITIVITY_SCAN, floor: float = POSITIVITY_FLOOR) -> None:
    v = f.grid(n)
    if not np.all(np.isfinite(v)) or v.min() < floor:
        raise FieldError(f"field falls below the positivity floor {floor:g} (min {v.min():.3g})")


def build_periodic_spline(control, bounds=(0.1, 1.0), period: float = 1.0) -> Spline:
    """Periodic cubic spline through four control values at ``x = 0, 1/3, 2/3, 1``
    (in units of the period).  The first and last values must agree."""
    c = np.asarray(control, dtype=float)
    if c.shape != (4,):
        raise FieldError("spline control must have exactly 4 values")
    if c[0] != c[3]:
        raise FieldError(f"seam mismatch: control[0]={c[0]!r} != control[3]={c[3]!r}")
    lo, hi = bounds
    if np.any(c <= lo) or np.any(c >= hi):
        raise FieldError(f"control values must lie in ({lo}, {hi}): {c.tolist()}")
    s = Spline(c[:3], period)
    check_positive(s)
    return s


@dataclass(frozen=True)
class ExtremaSet:
    """Local extrema as ``(location, value, second derivative)`` triples."""

    minima: list = dc_field(default_factory=list)
    maxima: list = dc_field(default_factory=list)
    degenerate: list = dc_field(default_factory=list)
    flat: bool = False


def find_extrema(f: PeriodicField, scan_n: int = 1024, xtol: float = 1e-12,
                 degenerate_tol: float = 1e-8) -> ExtremaSet:
    """Locate sign changes of ``f'`` on a uniform scan, polish each root by
    bisection and classify it by the sign of ``f''``.

    A field whose derivative vanishes on the whole scan is reported as
    ``flat`` with no extrema.  Roots with ``|f''| < degenerate_tol`` are
    listed in ``degenerate`` rather than dropped.
    """
    if scan_n < 64:
        raise FieldError("scan_n must be at least 64")
    L = f.period
    d1 = f.derivative(1)
    d2 = f.derivative(2)
    xs = np.arange(scan_n + 1) * (L / scan_n)
    g = np.asarray(d1(xs), dtype=float)
    scale = 1.0 + float(np.max(np.abs(f(xs))))
    if np.max(np.abs(g)) <= 1e-12 * scale:
        return ExtremaSet(flat=True)

    roots = []
    for j in range(scan_n):
        if g[j] == 0.0:
            roots.append(xs[j])
        elif g[j] * g[j + 1] < 0.0:
            lo, hi, glo = xs[j], xs[j + 1], g[j]
            while hi - lo > xtol:
                mid = 0.5 * (lo + hi)
                gm = d1(mid)
                if gm == 0.0:
                    lo = hi = mid
                    break
                if (gm < 0) == (glo < 0):
                    lo, glo = mid, gm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))

    minima, maxima, degenerate = [], [], []
    for x0 in sorted({round(float(np.mod(x, L)), 13) % L for x in roots}):
        curv = d2(x0)
        entry = (x0, f(x0), curv)
        if abs(curv) < degenerate_tol:
            degenerate.append(x0)
        elif curv > 0:
            minima.append(entry)
        else:
            maxima.append(entry)
    return ExtremaSet(minima, maxima, degenerate, False)


# ---------------------------------------------------------------------------
# config records


def from_record(rec, period: float = 1.0) -> PeriodicField:
    """Build a field from a tagged record such as
    ``{"kind": "cos2", "offset": 0.1, "amplitude": 1.0, "phase": 0.0}``."""
    if isinstance(rec, str):
        return parse_field(rec, period)
    if not isinstance(rec, dict) or "kind" not in rec:
        raise FieldError(f"field record needs a 'kind': {rec!r}")
    rec = dict(rec)
    kind = rec.pop("kind")
    period = float(rec.pop("period", period))
    allowed = {
        "constant": {"value"},
        "cos2": {"offset", "amplitude", "phase"},
        "sinusoid": {"mean", "amplitude", "m", "phase", "shift"},
        "shifted": {"base", "omega"},
        "spline": {"control"},
        "sampled": {"values"},
    }
    if kind not in allowed:
        raise FieldError(f"unknown field kind {kind!r}")
    extra = set(rec) - allowed[kind]
    if extra:
        raise FieldError(f"unknown keys for {kind!r} field: {sorted(extra)}")
    try:
        if kind == "constant":
            return Constant(float(rec["value"]), period)
        if kind == "cos2":
            return CosineSquared(float(rec.get("offset", 0.0)), float(rec.get("amplitude", 1.0)),
                                 float(rec.get("phase", 0.0)), period)
        if kind == "sinusoid":
            return Sinusoid(float(rec["mean"]), float(rec.get("amplitude", 0.0)), int(rec.get("m", 1)),
                            float(rec.get("phase", 0.0)), float(rec.get("shift", 0.0)), period)
        if kind == "shifted":
            return Shifted(from_record(rec["base"], period), float(rec.get("omega", 0.0)))
        if kind == "spline":
            return build_periodic_spline(rec["control"], period=period)
        return Sampled(rec["values"], period)
    except KeyError as exc:
        raise FieldError(f"{kind!r} field missing key {exc}") from None


def to_record(f: PeriodicField) -> dict:
    if isinstance(f, Constant):
        rec = {"kind": "constant", "value": f.value}
    elif isinstance(f, CosineSquared):
        rec = {"kind": "cos2", "offset": f.offset, "amplitude": f.cos2_amplitude, "phase": f.phase}
    elif isinstance(f, Sinusoid):
        rec = {"kind": "sinusoid", "mean": f.mean, "amplitude": f.amplitude, "m": f.m,
               "phase": f.phase, "shift": f.shift}
    elif isinstance(f, Shifted):
        rec = {"kind": "shifted", "base": to_record(f.base), "omega": f.omega}
    elif isinstance(f, Spline) and f.order == 0 and f.values.size == 3:
        rec = {"kind": "spline", "control": [float(v) for v in f.control]}
    elif isinstance(f, Sampled):
        rec = {"kind": "sampled", "values": f.values.tolist()}
    else:
        raise FieldError(f"no record form for {f!r}")
    if f.period != 1.0:
        rec["period"] = f.period
    return rec


def parse_field(text: str, period: float = 1.0) -> PeriodicField:
    """Inline syntax: ``const:1``, ``cos2:0.1,1,0``, ``sin:1,0.3,1,0.1``
    (mean, amplitude, m, phase, shift) or ``spline:0.2,0.8,0.3,0.2``."""
    kind, _, args = text.partition(":")
    try:
        vals = [float(a) for a in args.split(",")] if args else []
    except ValueError:
        raise FieldError(f"bad numbers in field spec {text!r}") from None
    kind = kind.strip().lower()
    if kind in ("const", "constant") and len(vals) == 1:
        return Constant(vals[0], period)
    if kind == "cos2" and 1 <= len(vals) <= 3:
        return CosineSquared(*vals, period=period)
    if kind in ("sin", "sinusoid") and 2 <= len(vals) <= 5:
        if len(vals) >= 3 and vals[2] != int(vals[2]):
            raise FieldError(f"harmonic number must be an integer in {text!r}")
        return Sinusoid(*vals, period=period)
    if kind == "spline" and len(vals) == 4:
        return build_periodic_spline(vals, period=period)
    raise FieldError(f"cannot parse field spec {text!r}")
