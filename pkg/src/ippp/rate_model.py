"""Rate functions on the real line, with domains and upper bounds.

A :class:`RateModel` wraps a nonnegative rate function r together with the
domain it lives on and an optional declared upper bound.  Evaluation is
strict: querying outside the domain raises
:class:`~ippp.errors.DomainViolation`, a negative value raises
:class:`~ippp.errors.NegativeRate`, and (in debug runs) a value above the
declared bound raises :class:`~ippp.errors.BoundViolation`.

Built-in families (constant, linear, piecewise constant, sinusoidal) know
their exact supremum over a window, which keeps rejection sampling tight.
Arbitrary expressions in ``x`` are supported through
:meth:`RateModel.from_expression`; lacking a closed form, their bound falls
back to a 1025-point grid maximum times a 1.5 safety factor.

All model objects are immutable and hashable, so downstream caches can key
on them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rate_expr
from .errors import (
    BoundViolation,
    DomainViolation,
    InvalidParameter,
    NegativeRate,
)

__all__ = [
    "Interval",
    "Domain",
    "ConstantRate",
    "LinearRate",
    "PiecewiseConstantRate",
    "SinusoidalRate",
    "ExpressionRate",
    "RateModel",
]

_TWO_PI = 2.0 * math.pi


def _require_finite_number(name: str, value) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(out):
        raise InvalidParameter(f"{name} must be finite, got {out!r}")
    return out


@dataclass(frozen=True)
class Interval:
    """A bounded window [lo, hi] with lo < hi."""

    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", _require_finite_number("lo", self.lo))
        object.__setattr__(self, "hi", _require_finite_number("hi", self.hi))
        if not self.lo < self.hi:
            raise InvalidParameter(
                f"interval needs lo < hi, got [{self.lo!r}, {self.hi!r}]"
            )

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = (x >= self.lo) & (x <= self.hi)
        return bool(out) if out.ndim == 0 else out

    def __str__(self):
        return f"[{self.lo:g}, {self.hi:g}]"


@dataclass(frozen=True)
class Domain:
    """Where a rate function is defined.  Edges may be infinite."""

    lo: float = -math.inf
    hi: float = math.inf

    def __post_init__(self):
        lo = float(self.lo)
        hi = float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise InvalidParameter("domain edges must not be NaN")
        if not lo < hi:
            raise InvalidParameter(f"domain needs lo < hi, got ({lo!r}, {hi!r})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        out = (x >= self.lo) & (x <= self.hi)
        return bool(out) if out.ndim == 0 else out

    def clamp(self, t: float) -> float:
        return min(max(float(t), self.lo), self.hi)

    def __str__(self):
        lo = "-inf" if math.isinf(self.lo) else f"{self.lo:g}"
        hi = "inf" if math.isinf(self.hi) else f"{self.hi:g}"
        return f"({lo}, {hi})"


@dataclass(frozen=True)
class ConstantRate:
    """r(x) = level."""

    level: float

    def __post_init__(self):
        object.__setattr__(self, "level", _require_finite_number("level", self.level))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, self.level)

    def supremum(self, lo: float, hi: float) -> float:
        return self.level

    def describe(self) -> str:
        return f"constant rate {self.level:g}"


@dataclass(frozen=True)
class LinearRate:
    """r(x) = max(0, intercept + slope*x), clamped so it stays a valid rate."""

    intercept: float
    slope: float

    def __post_init__(self):
        object.__setattr__(
            self, "intercept", _require_finite_number("intercept", self.intercept)
        )
        object.__setattr__(self, "slope", _require_finite_number("slope", self.slope))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.maximum(0.0, self.intercept + self.slope * x)

    def supremum(self, lo: float, hi: float) -> float:
        # Linear, so the max over a window sits at an endpoint.
        return max(0.0, self.intercept + self.slope * lo, self.intercept + self.slope * hi)

    def describe(self) -> str:
        return f"linear rate max(0, {self.intercept:g} + {self.slope:g}*x)"


@dataclass(frozen=True)
class PiecewiseConstantRate:
    """r(x) = levels[i] on [breakpoints[i], breakpoints[i+1]), zero outside.

    The final piece is closed on the right so the last breakpoint still
    carries its level.
    """

    breakpoints: tuple
    levels: tuple

    def __post_init__(self):
        bp = tuple(_require_finite_number("breakpoint", b) for b in self.breakpoints)
        lv = tuple(_require_finite_number("level", v) for v in self.levels)
        if len(bp) != len(lv) + 1:
            raise InvalidParameter(
                f"need len(breakpoints) == len(levels) + 1, "
                f"got {len(bp)} and {len(lv)}"
            )
        if len(lv) == 0:
            raise InvalidParameter("need at least one piece")
        if any(b1 >= b2 for b1, b2 in zip(bp, bp[1:])):
            raise InvalidParameter("breakpoints must be strictly increasing")
        if any(v < 0 for v in lv):
            raise InvalidParameter("levels must be nonnegative")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "levels", lv)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        bp = np.asarray(self.breakpoints)
        lv = np.asarray(self.levels)
        idx = np.searchsorted(bp, x, side="right") - 1
        out = np.zeros(x.shape)
        inside = (idx >= 0) & (idx < len(lv))
        out[inside] = lv[idx[inside]]
        # keep the last breakpoint on the final piece
        out[x == bp[-1]] = lv[-1]
        return out

    def supremum(self, lo: float, hi: float) -> float:
        bp = self.breakpoints
        best = 0.0 if (lo < bp[0] or hi > bp[-1]) else -math.inf
        for i, level in enumerate(self.levels):
            if bp[i] <= hi and bp[i + 1] >= lo:
                best = max(best, level)
        return max(best, 0.0)

    def describe(self) -> str:
        return f"piecewise constant rate with {len(self.levels)} pieces"


@dataclass(frozen=True)
class SinusoidalRate:
    """r(x) = offset + amplitude * sin(frequency*x + phase).

    Requires offset >= |amplitude| so the rate never goes negative.
    """

    offset: float
    amplitude: float
    frequency: float = 1.0
    phase: float = 0.0

    def __post_init__(self):
        for name in ("offset", "amplitude", "frequency", "phase"):
            object.__setattr__(
                self, name, _require_finite_number(name, getattr(self, name))
            )
        if self.offset < abs(self.amplitude):
            raise InvalidParameter(
                f"offset must be >= |amplitude| to keep the rate nonnegative, "
                f"got offset={self.offset!r}, amplitude={self.amplitude!r}"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.offset + self.amplitude * np.sin(self.frequency * x + self.phase)

    def supremum(self, lo: float, hi: float) -> float:
        if self.amplitude == 0.0 or self.frequency == 0.0:
            return self.offset + self.amplitude * math.sin(self.phase)
        # The max is offset+|amplitude| iff a crest lies in the window;
        # otherwise it sits at an endpoint.
        target = math.pi / 2.0 if self.amplitude > 0 else -math.pi / 2.0
        a = self.frequency * lo + self.phase
        b = self.frequency * hi + self.phase
        if a > b:
            a, b = b, a
        k_lo = math.ceil((a - target) / _TWO_PI - 1e-12)
        k_hi = math.floor((b - target) / _TWO_PI + 1e-12)
        if k_lo <= k_hi:
            return self.offset + abs(self.amplitude)
        edge = np.asarray(self((np.array([lo, hi]))))
        return float(edge.max())

    def describe(self) -> str:
        return (
            f"sinusoidal rate {self.offset:g} + {self.amplitude:g}"
            f"*sin({self.frequency:g}*x + {self.phase:g})"
        )


@dataclass(frozen=True)
class ExpressionRate:
    """A rate given by an expression in ``x``, e.g. ``"2 + 0.5*sin(x)"``."""

    expr: rate_expr.RateExpr
    text: str

    def __call__(self, x):
        return rate_expr.evaluate(self.expr, np.asarray(x, dtype=float))

    def supremum(self, lo: float, hi: float):
        return None

    def describe(self) -> str:
        return f"rate expression {self.text!r}"


# Number of grid points used when no exact supremum is available.
_GRID_POINTS = 1025
_GRID_SAFETY = 1.5


@dataclass(frozen=True)
class RateModel:
    """A rate function together with its domain and an optional bound."""

    source: object
    domain: Domain = field(default_factory=Domain)
    declared_bound: float | None = None

    def __post_init__(self):
        if not isinstance(self.domain, Domain):
            raise InvalidParameter(f"domain must be a Domain, got {self.domain!r}")
        if self.declared_bound is not None:
            b = _require_finite_number("declared_bound", self.declared_bound)
            if b <= 0:
                raise InvalidParameter(f"declared_bound must be positive, got {b!r}")
            object.__setattr__(self, "declared_bound", b)

    # -- construction helpers ------------------------------------------------

    @classmethod
    def constant(cls, level, domain=None, declared_bound=None):
        return cls(ConstantRate(level), domain or Domain(), declared_bound)

    @classmethod
    def linear(cls, intercept, slope, domain=None, declared_bound=None):
        return cls(LinearRate(intercept, slope), domain or Domain(), declared_bound)

    @classmethod
    def piecewise_constant(cls, breakpoints, levels, domain=None, declared_bound=None):
        src = PiecewiseConstantRate(tuple(breakpoints), tuple(levels))
        return cls(src, domain or Domain(), declared_bound)

    @classmethod
    def sinusoidal(
        cls, offset, amplitude, frequency=1.0, phase=0.0, domain=None, declared_bound=None
    ):
        src = SinusoidalRate(offset, amplitude, frequency, phase)
        return cls(src, domain or Domain(), declared_bound)

    @classmethod
    def from_expression(cls, text, domain=None, declared_bound=None):
        expr = rate_expr.parse_text(text)
        return cls(ExpressionRate(expr, text), domain or Domain(), declared_bound)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x):
        """Evaluate the rate at ``x`` (scalar or array).

        Raises DomainViolation outside the domain, NegativeRate on negative
        values, and (with assertions enabled) BoundViolation when a value
        exceeds the declared bound.
        """
        arr = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("x must be finite")
        inside = self.domain.contains(arr)
        if not np.all(inside):
            if arr.ndim == 0:
                bad = float(arr)
            else:
                bad = float(arr[~np.asarray(inside)].flat[0])
            raise DomainViolation(bad)
        vals = np.asarray(self.source(arr), dtype=float)
        neg = vals < 0
        if np.any(neg):
            if arr.ndim == 0:
                raise NegativeRate(float(arr), float(vals))
            i = int(np.argmax(neg))
            raise NegativeRate(float(arr.flat[i]), float(vals.flat[i]))
        if __debug__ and self.declared_bound is not None:
            over = vals > self.declared_bound
            if np.any(over):
                if arr.ndim == 0:
                    raise BoundViolation(float(arr), float(vals), self.declared_bound)
                i = int(np.argmax(over))
                raise BoundViolation(
                    float(arr.flat[i]), float(vals.flat[i]), self.declared_bound
                )
        return float(vals) if arr.ndim == 0 else vals

    def require_window(self, window: Interval) -> None:
        """Check that a window lies inside the domain."""
        if not isinstance(window, Interval):
            raise InvalidParameter(f"window must be an Interval, got {window!r}")
        if window.lo < self.domain.lo or window.hi > self.domain.hi:
            bad = window.lo if window.lo < self.domain.lo else window.hi
            raise DomainViolation(
                bad, f"window {window} is not contained in the domain {self.domain}"
            )

    def bound_on(self, window: Interval) -> float:
        """An upper bound for the rate over ``window``.

        Uses the declared bound if one was given, else the family's exact
        supremum, else a grid estimate (1025 points, times 1.5).  The grid
        estimate can miss features narrower than the grid spacing; pass
        ``declared_bound`` for spiky rates.
        """
        self.require_window(window)
        if self.declared_bound is not None:
            return self.declared_bound
        sup = self.source.supremum(window.lo, window.hi)
        if sup is not None:
            return float(sup)
        xs = np.linspace(window.lo, window.hi, _GRID_POINTS)
        return float(np.max(self.evaluate(xs))) * _GRID_SAFETY

    def describe(self) -> str:
        parts = [self.source.describe(), f"on {self.domain}"]
        if self.declared_bound is not None:
            parts.append(f"bounded by {self.declared_bound:g}")
        return " ".join(parts)
