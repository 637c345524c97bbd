"""Complete orthonormal systems on an interval [t, T].

Two families are provided: normalized Legendre polynomials and the
trigonometric system. Ordering of the trigonometric system::

    phi_0(x)      = 1/sqrt(D)
    phi_{2r-1}(x) = sqrt(2/D) sin(2 pi r (x - t)/D)
    phi_{2r}(x)   = sqrt(2/D) cos(2 pi r (x - t)/D)

with D = T - t. Coefficient values (not convergence statements) depend on
this ordering, and tensor files record the basis kind so they are never
mixed up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg

LEGENDRE = "legendre"
TRIGONOMETRIC = "trigonometric"
BASIS_KINDS = (LEGENDRE, TRIGONOMETRIC)

# inputs this far outside [t, T] (relative to T - t) are clamped silently
DOMAIN_RTOL = 1e-12


class BasisDomainError(ValueError):
    """Evaluation point outside [t, T]."""


@dataclass(frozen=True)
class Interval:
    t: float
    T: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.T)):
            raise ValueError(f"interval endpoints must be finite, got [{self.t}, {self.T}]")
        if not self.T > self.t:
            raise ValueError(f"degenerate interval: T={self.T} must exceed t={self.t}")

    @property
    def delta(self) -> float:
        return self.T - self.t

    def to_unit(self, x):
        """Map x in [t, T] to u in [0, 1], clamping tiny overshoots."""
        x = np.asarray(x, dtype=float)
        u = (x - self.t) / self.delta
        tol = DOMAIN_RTOL
        if np.any(u < -tol) or np.any(u > 1.0 + tol):
            bad = x[(u < -tol) | (u > 1.0 + tol)] if x.ndim else x
            raise BasisDomainError(
                f"point(s) {np.atleast_1d(bad)[:3].tolist()} outside [{self.t}, {self.T}]")
        return np.clip(u, 0.0, 1.0)


def legendre_table(jmax: int, y) -> np.ndarray:
    """P_0..P_jmax at points y in [-1, 1] by the three-term recurrence.

    Returns an array of shape (jmax + 1, *y.shape).
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((jmax + 1,) + y.shape)
    out[0] = 1.0
    if jmax >= 1:
        out[1] = y
    for n in range(1, jmax):
        out[n + 1] = ((2 * n + 1) * y * out[n] - n * out[n - 1]) / (n + 1)
    return out


def trig_frequency(j: int) -> int:
    """Frequency r of phi_j in the trigonometric ordering (0 for the constant)."""
    return (j + 1) // 2


@dataclass(frozen=True)
class BasisSystem:
    kind: str
    interval: Interval

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; expected one of {BASIS_KINDS}")

    @property
    def delta(self) -> float:
        return self.interval.delta

    def table(self, jmax: int, x) -> np.ndarray:
        """phi_0..phi_jmax at x; shape (jmax + 1, *x.shape)."""
        if jmax < 0:
            raise ValueError("jmax must be >= 0")
        u = self.interval.to_unit(x)
        d = self.delta
        if self.kind == LEGENDRE:
            tab = legendre_table(jmax, 2.0 * u - 1.0)
            norms = np.sqrt((2.0 * np.arange(jmax + 1) + 1.0) / d)
            return tab * norms.reshape((-1,) + (1,) * u.ndim)
        out = np.empty((jmax + 1,) + u.shape)
        out[0] = 1.0 / math.sqrt(d)
        amp = math.sqrt(2.0 / d)
        for j in range(1, jmax + 1):
            arg = 2.0 * math.pi * trig_frequency(j) * u
            out[j] = amp * (np.sin(arg) if j % 2 else np.cos(arg))
        return out

    def eval(self, j: int, x):
        """phi_j(x)."""
        if j < 0:
            raise ValueError("basis index must be >= 0")
        val = self.table(j, x)[j]
        return float(val) if np.ndim(val) == 0 else val

    def antiderivative_table(self, jmax: int, s) -> np.ndarray:
        """int_t^s phi_j(u) du for j = 0..jmax, closed form."""
        u = self.interval.to_unit(s)
        d = self.delta
        out = np.empty((jmax + 1,) + u.shape)
        if self.kind == LEGENDRE:
            y = 2.0 * u - 1.0
            tab = legendre_table(jmax + 1, y)
            out[0] = u * math.sqrt(d)
            for j in range(1, jmax + 1):
                # int_{-1}^y P_j = (P_{j+1} - P_{j-1}) / (2j + 1)
                out[j] = math.sqrt((2 * j + 1) * d) / 2.0 * (tab[j + 1] - tab[j - 1]) / (2 * j + 1)
            return out
        out[0] = u * math.sqrt(d)
        for j in range(1, jmax + 1):
            r = trig_frequency(j)
            scale = math.sqrt(2.0 * d) / (2.0 * math.pi * r)
            arg = 2.0 * math.pi * r * u
            out[j] = scale * ((1.0 - np.cos(arg)) if j % 2 else np.sin(arg))
        return out

    def antiderivative(self, j: int, s):
        """int_t^s phi_j(u) du."""
        if j < 0:
            raise ValueError("basis index must be >= 0")
        val = self.antiderivative_table(j, s)[j]
        return float(val) if np.ndim(val) == 0 else val

    def integrals(self, jmax: int) -> np.ndarray:
        """int_t^T phi_j for j = 0..jmax (the deterministic zeta row)."""
        return self.antiderivative_table(jmax, self.interval.T)

    def inner_product(self, i: int, j: int) -> float:
        """<phi_i, phi_j> on [t, T].

        Gauss-Legendre quadrature exact for the polynomial degree (Legendre);
        product-to-sum closed form (trigonometric).
        """
        if i < 0 or j < 0:
            raise ValueError("basis indices must be >= 0")
        if self.kind == LEGENDRE:
            y, w = _gauss_nodes((i + j) // 2 + 2)
            x = self.interval.t + (y + 1.0) * self.delta / 2.0
            tab = self.table(max(i, j), x)
            return float(np.sum(w * tab[i] * tab[j]) * self.delta / 2.0)
        return _trig_inner(i, j)


@lru_cache(maxsize=None)
def _gauss_nodes(n: int) -> tuple:
    return npleg.leggauss(n)


def _cos_mean(n: int) -> float:
    # int_0^1 cos(2 pi n u) du evaluated in floating point
    if n == 0:
        return 1.0
    return math.sin(2.0 * math.pi * n) / (2.0 * math.pi * n)


def _trig_inner(i: int, j: int) -> float:
    # phi on [t, T] equals D^{-1/2} times phi on [0, 1]; the D factors cancel
    ri, rj = trig_frequency(i), trig_frequency(j)
    if i == 0 and j == 0:
        return 1.0
    if i == 0 or j == 0:
        r, odd = (rj, j % 2) if i == 0 else (ri, i % 2)
        # sqrt(2) * int_0^1 sin or cos(2 pi r u)
        if odd:
            return math.sqrt(2.0) * (1.0 - math.cos(2.0 * math.pi * r)) / (2.0 * math.pi * r)
        return math.sqrt(2.0) * _cos_mean(r)
    si, sj = i % 2, j % 2
    dm, dp = _cos_mean(abs(ri - rj)), _cos_mean(ri + rj)
    if si and sj:  # sin * sin
        return dm - dp
    if not si and not sj:  # cos * cos
        return dm + dp
    # sin(a) cos(b) = (sin(a + b) + sin(a - b)) / 2
    a, b = (ri, rj) if si else (rj, ri)

    def sin_mean(n):
        if n == 0:
            return 0.0
        return (1.0 - math.cos(2.0 * math.pi * n)) / (2.0 * math.pi * n)

    return sin_mean(a + b) + sin_mean(a - b)


def legendre(t: float = 0.0, T: float = 1.0) -> BasisSystem:
    return BasisSystem(LEGENDRE, Interval(t, T))


def trigonometric(t: float = 0.0, T: float = 1.0) -> BasisSystem:
    return BasisSystem(TRIGONOMETRIC, Interval(t, T))
