"""Exact one-dimensional function types used for flow profiles and set-size profiles."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np


def _tsharp_integral(a, b, alpha, beta):
    """Integral of (alpha + beta*s) / min(s, 1-s) over [a, b], split at 1/2.

    Works elementwise on arrays. A piece touching s = 0 (or s = 1) must vanish
    there, so its logarithmic term is dropped rather than evaluated as 0*inf.
    """
    a, b, alpha, beta = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (a, b, alpha, beta)))
    with np.errstate(divide="ignore", invalid="ignore"):
        lo, hi = a, np.minimum(b, 0.5)
        live = hi > lo
        log_left = np.log(hi / lo)
        left = np.where(lo > 0, alpha * log_left, 0.0) + beta * (hi - lo)

        lo2, hi2 = np.maximum(a, 0.5), b
        live2 = hi2 > lo2
        log_right = np.log((1.0 - lo2) / (1.0 - hi2))
        right = np.where(hi2 < 1, (alpha + beta) * log_right, 0.0) - beta * (hi2 - lo2)
    return np.where(live, left, 0.0) + np.where(live2, right, 0.0)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous piecewise-linear function on [0, 1] given by its knots."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.shape != v.shape or b.ndim != 1 or len(b) < 2:
            raise ValueError("breakpoints and values must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        return np.interp(t, self.breakpoints, self.values)

    def pieces(self):
        """Yield (a, b, alpha, beta) with f(t) = alpha + beta*t on [a, b]."""
        b, v = self.breakpoints, self.values
        slope = np.diff(v) / np.diff(b)
        return b[:-1], b[1:], v[:-1] - slope * b[:-1], slope

    def _clipped(self, lo, hi):
        knots = self.breakpoints[(self.breakpoints > lo) & (self.breakpoints < hi)]
        ts = np.concatenate([[lo], knots, [hi]])
        return ts, self(ts)

    def integral(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Exact integral over [lo, hi] (trapezoid rule is exact on linear pieces)."""
        if hi <= lo:
            return 0.0
        ts, vs = self._clipped(lo, hi)
        return float(np.sum(0.5 * (vs[1:] + vs[:-1]) * np.diff(ts)))

    def integral_over_tsharp(self) -> float:
        """Exact integral of f(t) / min(t, 1-t) over [0, 1] for f vanishing at both ends."""
        return float(_tsharp_integral(*self.pieces()).sum())

    def is_convex(self, lo: float, hi: float, tol: float = 1e-12) -> bool:
        ts, vs = self._clipped(lo, hi)
        s = np.diff(vs) / np.diff(ts)
        return bool(np.all(np.diff(s) >= -tol))

    def is_concave(self, lo: float, hi: float, tol: float = 1e-12) -> bool:
        ts, vs = self._clipped(lo, hi)
        s = np.diff(vs) / np.diff(ts)
        return bool(np.all(np.diff(s) <= tol))


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function.

    ``values[k]`` holds on ``[breakpoints[k], breakpoints[k+1])`` and the last
    value holds from the last breakpoint on. With ``over_x`` the function is
    ``values[k] / x`` on each piece, which is how the sup-type profiles
    ``h(x)`` look between achievable set sizes.

    Lookups snap to a breakpoint within ``snap``, so a set size summed in a
    different order still lands on its own step.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    over_x: bool = False
    snap: float = 1e-12

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.shape != v.shape or b.ndim != 1 or len(b) < 1:
            raise ValueError("breakpoints and values must be 1-d arrays of equal length")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    def coefficient(self, x):
        k = np.searchsorted(self.breakpoints, np.asarray(x, dtype=float) + self.snap, side="right") - 1
        k = np.clip(k, 0, len(self.values) - 1)
        return self.values[k]

    def __call__(self, x):
        c = self.coefficient(x)
        return c / np.asarray(x, dtype=float) if self.over_x else c

    def integral(self, lo: float, hi: float) -> float:
        """Exact integral over [lo, hi]; below the first breakpoint the first piece is extended."""
        if hi <= lo:
            return 0.0
        b = self.breakpoints
        edges = np.concatenate([[lo], b[(b > lo) & (b < hi)], [hi]])
        total = 0.0
        for left, right in zip(edges[:-1], edges[1:]):
            c = float(self.coefficient(left))
            if self.over_x:
                total += c * math.log(right / left)
            else:
                total += c * (right - left)
        return total

    def map(self, fn, over_x=None) -> "StepFunction":
        return StepFunction(self.breakpoints, fn(self.values), self.over_x if over_x is None else over_x)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("x,value\n")
        for x in self.breakpoints:
            out.write(f"{x:.17g},{float(self(x)):.17g}\n")
        return out.getvalue()
