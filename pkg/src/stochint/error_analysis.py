"""Kernel norms, Parseval residuals and mean-square error bounds."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .basis import Interval
from .coefficients import CoefficientTensor, KernelSpec


def kernel_norm(spec: KernelSpec) -> float:
    """I_k: integral of the squared kernel, exact for monomial weights.

    On [0, 1] the nested integral of prod u_l^(2 alpha_l) over the simplex is a
    single monomial at every level, so it is accumulated as a Fraction.
    """
    coef, power = Fraction(1), 0
    for alpha in spec.weights:
        power += 2 * alpha + 1
        coef /= power
    return float(coef) * spec.interval.delta ** (spec.k + 2 * sum(spec.weights))


def parseval_residual(tensor: CoefficientTensor, p: int | None = None) -> float:
    p = tensor.p if p is None else p
    return kernel_norm(tensor.spec) - tensor.parseval_sum(p)


def bound_qq4(tensor: CoefficientTensor, p: int | None = None) -> float:
    """k! (I_k - sum_{j <= p} C^2): upper bound on the Ito truncation error."""
    return math.factorial(tensor.k) * parseval_residual(tensor, p)


def bound_asserted(noise, interval: Interval) -> bool:
    """The bound holds for nonzero indices, or for any indices when T - t < 1."""
    if all(i != 0 for i in noise):
        return True
    return interval.delta < 1.0


def exact_e11(q: int, interval: Interval) -> float:
    """Exact mean-square error of the two-fold Legendre approximation at order q.

    (T-t)^2/2 * sum_{i>q} 1/(4i^2-1) telescopes to (T-t)^2 / (4 (2q+1)).
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    return interval.delta**2 / (4.0 * (2 * q + 1))


def e11_series(q: int, interval: Interval, terms: int = 10**6) -> float:
    """Direct partial sum of the tail series (cross-check for exact_e11)."""
    i = np.arange(q + 1, q + 1 + terms, dtype=float)
    return interval.delta**2 / 2.0 * math.fsum(1.0 / (4.0 * i * i - 1.0))


def e11_log_bound(q: int, interval: Interval) -> float:
    """Integral-comparison bound -(T-t)^2/8 ln|1 - 2/(2q+1)|, valid for q >= 1."""
    if q < 1:
        raise ValueError("the logarithmic bound needs q >= 1")
    return -interval.delta**2 / 8.0 * math.log(abs(1.0 - 2.0 / (2 * q + 1)))


# -ln(1 - 2/(2q+1)) <= 2/(2q-1) <= 2/q for q >= 1, hence C_1 = 1/4
E11_RATE_CONSTANT = 0.25


def e11_rate_bound(q: int, interval: Interval) -> float:
    """C_1 (T-t)^2 / q with C_1 = 1/4."""
    if q < 1:
        raise ValueError("the rate bound needs q >= 1")
    return E11_RATE_CONSTANT * interval.delta**2 / q


@dataclass
class ErrorReport:
    k: int
    p: int
    basis_kind: str
    t: float
    T: float
    i_k: float
    parseval_sum: float
    bound_qq4: float
    bound_asserted: bool = True
    exact_e11: float | None = None
    scaling_constant: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_table(self) -> str:
        rows = [(name, _fmt(val)) for name, val in self.to_dict().items()]
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {val}" for name, val in rows)


def _fmt(val) -> str:
    if val is None:
        return "-"
    if isinstance(val, bool):
        return "yes" if val else "no (bound not asserted)"
    if isinstance(val, float):
        return f"{val:.12g}"
    return str(val)


def error_report(tensor: CoefficientTensor, p: int | None = None, noise=None) -> ErrorReport:
    """Summary of the truncation error quantities for ``tensor`` cut at order p.

    ``scaling_constant`` is bound * p / (T - t)^2, the constant implied by a
    K (T - t)^2 / p rate; absent at p = 0.
    """
    p = tensor.p if p is None else p
    iv = tensor.spec.interval
    psum = tensor.parseval_sum(p)
    ik = kernel_norm(tensor.spec)
    bound = math.factorial(tensor.k) * (ik - psum)
    e11 = None
    if tensor.k == 2 and tensor.basis_kind == "legendre" and tensor.spec.unit_weights:
        e11 = exact_e11(p, iv)
    scaling = bound * p / iv.delta**2 if p > 0 else None
    asserted = True if noise is None else bound_asserted(noise, iv)
    return ErrorReport(tensor.k, p, tensor.basis_kind, iv.t, iv.T, ik, psum, bound,
                       asserted, e11, scaling)
