"""Ito <-> Stratonovich relation for multiplicities up to 5 (psi = 1).

The Stratonovich integral equals the Ito integral plus

    sum_{r=1}^{[k/2]} 2^{-r} sum_{(s_r, ..., s_1) in A_{k,r}} J^{s_r ... s_1},

where A_{k,r} holds strictly separated tuples s_{q+1} > s_q + 1 drawn from
1..k-1, and J^{s_r ... s_1} is the iterated Ito integral in which each
adjacent pair (s, s + 1) with i_s = i_{s+1} != 0 is replaced by one dt. With
psi = 1 that is again an iterated integral, over the reduced index tuple in
which the pair becomes the time component 0.

This module owns the 2^{-r} factors. At finite p the same algebra shows up as
the indicator terms separating the two truncated expansions
(``truncation_gap``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSystem
from .coefficients import CoefficientTensor
from .gaussians import GaussianMatrix
from .ito_expansion import ItoTruncation, check_zeta, expansion_terms, matching_label
from .strat_expansion import StratTruncation


@dataclass(frozen=True)
class PairingSet:
    k: int
    entries: dict = field(default_factory=dict)

    def __getitem__(self, r: int) -> tuple:
        return self.entries.get(r, ())

    def all(self):
        """(r, tuple) for every r, in enumeration order."""
        for r in sorted(self.entries):
            for s in self.entries[r]:
                yield r, s


def enumerate_pairings(k: int) -> PairingSet:
    """A_{k,r} for r = 1..[k/2]; tuples written (s_r, ..., s_1)."""
    if not 1 <= k <= 5:
        raise ValueError(f"multiplicity must be in 1..5, got {k}")
    entries = {}
    for r in range(1, k // 2 + 1):
        found = []
        for asc in itertools.combinations(range(1, k), r):
            if all(asc[q + 1] > asc[q] + 1 for q in range(r - 1)):
                found.append(tuple(reversed(asc)))
        entries[r] = tuple(sorted(found))
    return PairingSet(k, entries)


def reduced_indices(noise, starts) -> tuple | None:
    """Index tuple of J^{s_r ... s_1}; None when an indicator vanishes.

    ``starts`` are 1-based pair starts s (pairs (s, s + 1)).
    """
    noise = tuple(noise)
    starts = set(starts)
    out = []
    pos = 1
    while pos <= len(noise):
        if pos in starts:
            a, b = noise[pos - 1], noise[pos]
            if not a == b != 0:
                return None
            out.append(0)
            pos += 2
        else:
            out.append(noise[pos - 1])
            pos += 1
    return tuple(out)


def correction_terms(noise) -> list:
    """[(2^{-r}, (s_r..s_1), reduced index tuple)] for every nonvanishing term."""
    noise = tuple(noise)
    out = []
    for r, starts in enumerate_pairings(len(noise)).all():
        red = reduced_indices(noise, starts)
        if red is not None:
            out.append((0.5**r, starts, red))
    return out


@dataclass(frozen=True)
class GapResult:
    value: float
    breakdown: dict

    def __float__(self):
        return self.value


def truncation_gap(ito: ItoTruncation, strat: StratTruncation, zeta: GaussianMatrix) -> GapResult:
    """eval_strat - eval_ito with the contribution of every indicator term."""
    if (ito.tensor is not strat.tensor and not np.array_equal(ito.values, strat.values)) \
            or ito.noise != strat.noise or ito.p != strat.p:
        raise ValueError("Ito and Stratonovich truncations must share tensor, noise and p")
    check_zeta(ito, zeta)
    terms = expansion_terms(ito.values, ito.noise.indices, zeta.values[None])
    breakdown = {}
    total = 0.0
    for mt, val in terms:
        if not mt:
            continue
        contribution = -float(val[0])
        breakdown[matching_label(mt)] = contribution
        total += contribution
    return GapResult(total, breakdown)


def contraction_check(basis: BasisSystem, p: int, s: float) -> float:
    """(s - t) - sum_{j <= p} (int_t^s phi_j)^2, the Parseval deficit at s."""
    iv = basis.interval
    if not iv.t < s <= iv.T + 1e-12 * iv.delta:
        raise ValueError(f"s={s} must lie in (t, T] = ({iv.t}, {iv.T}]")
    s = min(s, iv.T)
    a = basis.antiderivative_table(p, s)
    return (s - iv.t) - math.fsum(a**2)


def contract_positions(tensor: CoefficientTensor, pairs, p: int | None = None) -> np.ndarray:
    """Partial trace over index pairs (1-based positions) of a coefficient tensor.

    For example pairs=[(1, 2)] on a k = 5 tensor gives
    sum_{j_1} C[j_1, j_1, j_3, j_4, j_5], indexed [j_3, j_4, j_5].
    """
    vals = tensor.values if p is None else tensor.truncated(p)
    k = vals.ndim
    letters = list("abcde"[:k])
    used = set()
    for a, b in pairs:
        if a == b or {a, b} & used or not (1 <= a <= k and 1 <= b <= k):
            raise ValueError(f"invalid pairs {pairs} for k={k}")
        used.update((a, b))
        letters[b - 1] = letters[a - 1]
    free = "".join(letters[l] for l in range(k) if (l + 1) not in used)
    return np.einsum("".join(letters) + "->" + free, vals)
