"""Truncated Stratonovich expansions: the plain product series

    sum_{j_1..j_k <= p} C[j_1..j_k] * zeta_{j_1}^{(i_1)} ... zeta_{j_k}^{(i_k)}

together with a report of which known convergence result covers a request.
Requests outside the proven cases are still evaluated; they only carry an
``UncoveredExpansionWarning``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import LEGENDRE, TRIGONOMETRIC
from .coefficients import CoefficientTensor
from .gaussians import GaussianMatrix, NoiseIndexVector
from .ito_expansion import check_zeta, contract


class UncoveredExpansionWarning(UserWarning):
    """Mean-square convergence of this expansion is conjectured, not proven."""


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    results: tuple = field(default_factory=tuple)
    note: str = ""

    def __str__(self):
        if self.covered:
            return "covered: " + "; ".join(self.results)
        return "not covered by a known convergence result" + (f" ({self.note})" if self.note else "")


def validity_conditions(k: int, noise, weights=None, basis_kind: str = LEGENDRE) -> CoverageReport:
    """Which known convergence results cover this expansion.

    ``weights`` are the exponents alpha_l of psi_l(s) = (t - s)^alpha_l; all
    weights are smooth, so differentiability hypotheses always hold.
    """
    noise = tuple(noise)
    weights = (0,) * k if weights is None else tuple(weights)
    if not 1 <= k <= 5 or len(noise) != k or len(weights) != k:
        raise ValueError("k must be in 1..5 and match the lengths of noise and weights")
    if basis_kind not in (LEGENDRE, TRIGONOMETRIC):
        raise ValueError(f"unknown basis kind {basis_kind!r}")
    unit = not any(weights)
    nonzero = all(i != 0 for i in noise)
    found = []

    if k == 1:
        found.append("single integral: Ito and Stratonovich expansions coincide")
    elif k == 2:
        found.append("double integral, smooth weights")
    elif k == 3:
        i1, i2, i3 = noise
        l1, l2, l3 = weights
        if unit and nonzero:
            found.append("triple integral, unit weights, nonzero indices")
        if nonzero and basis_kind == LEGENDRE:
            if i1 != i2 and i2 != i3 and i1 != i3:
                found.append("triple Legendre, monomial weights: distinct indices")
            if i1 == i2 != i3 and l1 == l2 != l3:
                found.append("triple Legendre, monomial weights: i1 = i2 != i3, l1 = l2 != l3")
            if i1 != i2 == i3 and l1 != l2 == l3:
                found.append("triple Legendre, monomial weights: i1 != i2 = i3, l1 != l2 = l3")
            if l1 == l2 == l3:
                found.append("triple Legendre, monomial weights: l1 = l2 = l3")
        if nonzero:
            if i1 != i2 and i2 != i3 and i1 != i3:
                found.append("triple integral, smooth weights: distinct indices")
            if i1 == i2 != i3 and l1 == l2:
                found.append("triple integral, smooth weights: i1 = i2 != i3, psi1 = psi2")
            if i1 != i2 == i3 and l2 == l3:
                found.append("triple integral, smooth weights: i1 != i2 = i3, psi2 = psi3")
            if l1 == l2 == l3:
                found.append("triple integral, smooth weights: psi1 = psi2 = psi3")
            found.append("triple integral, smooth weights, nonzero indices")
    elif k == 4:
        if unit:
            found.append("fourfold integral, unit weights")
    else:
        if unit:
            found.append("fivefold integral, unit weights")

    if found:
        return CoverageReport(True, tuple(found))
    if k == 3 and not nonzero:
        note = "k=3 results assume nonzero noise indices"
    else:
        note = f"k={k} results assume psi = 1 (zero weight exponents)"
    return CoverageReport(False, (), note)


@dataclass(frozen=True)
class StratTruncation:
    tensor: CoefficientTensor
    noise: NoiseIndexVector
    p: int

    def __post_init__(self):
        if not isinstance(self.noise, NoiseIndexVector):
            object.__setattr__(self, "noise", NoiseIndexVector(tuple(self.noise)))
        if self.tensor.k != self.noise.k:
            raise ValueError(f"tensor multiplicity {self.tensor.k} != "
                             f"number of noise indices {self.noise.k}")
        if not 0 <= self.p <= self.tensor.p:
            raise ValueError(f"truncation order {self.p} not in 0..{self.tensor.p}")

    @property
    def k(self) -> int:
        return self.noise.k

    @property
    def values(self) -> np.ndarray:
        return self.tensor.truncated(self.p)

    @property
    def coverage(self) -> CoverageReport:
        return validity_conditions(self.k, self.noise.indices, self.tensor.spec.weights,
                                   self.tensor.basis_kind)


def strat_batch(values: np.ndarray, noise, zeta: np.ndarray) -> np.ndarray:
    return contract(values, noise, zeta, ())


def eval_strat(trunc: StratTruncation, zeta: GaussianMatrix, warn: bool = True) -> float:
    """Plain product series for one zeta matrix."""
    check_zeta(trunc, zeta)
    if warn:
        report = trunc.coverage
        if not report.covered:
            warnings.warn(f"Stratonovich expansion for indices {trunc.noise.indices}, "
                          f"weights {trunc.tensor.spec.weights}: {report}",
                          UncoveredExpansionWarning, stacklevel=2)
    return float(strat_batch(trunc.values, trunc.noise.indices, zeta.values[None])[0])
