"""Truncated expansions of iterated Ito integrals, multiplicities 1..5.

At equal truncation limits p the Ito approximation is

    sum_{j_1..j_k <= p} C[j_1..j_k] * ( prod_l zeta_{j_l}^{(i_l)}
        - sum over single pairs {a, b}  1{i_a = i_b != 0} 1{j_a = j_b} * prod_{rest} zeta
        + sum over double pairs         (both indicators)             * prod_{rest} zeta )

For k <= 5 at most two disjoint pairs fit, so the alternating sum over all
partial matchings of the positions reproduces the closed forms for k = 1..5
term by term (3 pairs at k = 3; 6 pairs and 3 double pairs at k = 4; 10 pairs
and 15 double pairs at k = 5).
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coefficients import CoefficientTensor
from .gaussians import GaussianMatrix, NoiseIndexVector

_LETTERS = "abcde"
DEFAULT_TERM_BUDGET = 10**6


class TermBudgetError(RuntimeError):
    """Exact moment enumeration would exceed the configured term budget."""


@lru_cache(maxsize=None)
def matchings(k: int) -> tuple:
    """Partial matchings of positions 0..k-1 with at most two pairs.

    Ordered: empty matching, single pairs, then double pairs (lexicographic).
    """
    if not 1 <= k <= 5:
        raise ValueError(f"multiplicity must be in 1..5, got {k}")
    pairs = list(itertools.combinations(range(k), 2))
    out = [()]
    out += [(pr,) for pr in pairs]
    for a, b in itertools.combinations(pairs, 2):
        if not set(a) & set(b):
            out.append((a, b))
    return tuple(out)


def fires(noise, matching) -> bool:
    """All indicators 1{i_a = i_b != 0} of the matching are one."""
    return all(noise[a] == noise[b] != 0 for a, b in matching)


def matching_label(matching) -> str:
    if not matching:
        return "product"
    return "".join(f"({a + 1},{b + 1})" for a, b in matching)


def contract(values: np.ndarray, noise, zeta: np.ndarray, matching=()) -> np.ndarray:
    """sum_j C[j] * 1{paired j equal} * prod_{unpaired l} zeta[:, i_l, j_l].

    ``zeta`` has shape (B, m + 1, P + 1) with P >= p; returns shape (B,).
    Indicator gating on the noise indices is the caller's job.
    """
    k = values.ndim
    p1 = values.shape[0]
    letters = list(_LETTERS[:k])
    paired = set()
    for a, b in matching:
        letters[b] = letters[a]
        paired.update((a, b))
    operands = [values]
    subs = ["".join(letters)]
    for l in range(k):
        if l in paired:
            continue
        operands.append(zeta[:, noise[l], :p1])
        subs.append("z" + letters[l])
    if len(operands) == 1:
        # every position paired (k = 4 double pair): a constant per draw
        const = np.einsum(subs[0] + "->", values)
        return np.full(zeta.shape[0], const)
    return np.einsum(",".join(subs) + "->z", *operands)


def expansion_terms(values: np.ndarray, noise, zeta: np.ndarray):
    """(matching, signed contribution) for each firing matching, in fixed order."""
    out = []
    for mt in matchings(values.ndim):
        if not fires(noise, mt):
            continue
        sign = -1.0 if len(mt) % 2 else 1.0
        out.append((mt, sign * contract(values, noise, zeta, mt)))
    return out


def ito_batch(values: np.ndarray, noise, zeta: np.ndarray) -> np.ndarray:
    total = np.zeros(zeta.shape[0])
    for _, term in expansion_terms(values, noise, zeta):
        total = total + term
    return total


@dataclass(frozen=True)
class ItoTruncation:
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


def check_zeta(trunc, zeta: GaussianMatrix):
    if zeta.p < trunc.p:
        raise ValueError(f"zeta has order {zeta.p} < truncation order {trunc.p}")
    if zeta.m < max(trunc.noise.indices):
        raise ValueError(f"zeta has {zeta.m} components, noise index "
                         f"{max(trunc.noise.indices)} requested")
    if zeta.basis is not None and (zeta.basis.kind != trunc.tensor.basis_kind
                                   or zeta.basis.interval != trunc.tensor.spec.interval):
        raise ValueError("zeta basis does not match the coefficient tensor")


def eval_ito(trunc: ItoTruncation, zeta: GaussianMatrix) -> float:
    """Truncated Ito expansion for one zeta matrix."""
    check_zeta(trunc, zeta)
    return float(ito_batch(trunc.values, trunc.noise.indices, zeta.values[None])[0])


# ---------------------------------------------------------------------------
# exact Gaussian moments by monomial enumeration (Isserlis)


def _gauss_moment(power: int) -> float:
    if power % 2:
        return 0.0
    return float(math.prod(range(power - 1, 0, -2))) if power else 1.0


def monomial_expansion(trunc: ItoTruncation, time_row: np.ndarray,
                       budget: int = DEFAULT_TERM_BUDGET) -> dict:
    """Polynomial in the Gaussian zeta variables: {sorted((i, j), ...): coefficient}."""
    vals = trunc.values
    noise = trunc.noise.indices
    k = trunc.k
    firing = [mt for mt in matchings(k) if fires(noise, mt)]
    n_terms = len(firing) * vals.size
    if n_terms > budget:
        raise TermBudgetError(f"exact moment needs {n_terms} raw terms; budget is {budget}")
    poly = defaultdict(float)
    for mt in firing:
        sign = -1.0 if len(mt) % 2 else 1.0
        paired = {pos for pr in mt for pos in pr}
        for js in np.ndindex(*vals.shape):
            if any(js[a] != js[b] for a, b in mt):
                continue
            c = vals[js]
            if c == 0.0:
                continue
            key = []
            for l in range(k):
                if l in paired:
                    continue
                if noise[l] == 0:
                    c *= time_row[js[l]]
                else:
                    key.append((noise[l], js[l]))
            if c != 0.0:
                poly[tuple(sorted(key))] += sign * c
    return dict(poly)


def _expect(key) -> float:
    counts = defaultdict(int)
    for var in key:
        counts[var] += 1
    return math.prod(_gauss_moment(n) for n in counts.values())


def mean_exact(trunc: ItoTruncation, budget: int = DEFAULT_TERM_BUDGET) -> float:
    time_row = trunc.tensor.basis.integrals(trunc.p)
    poly = monomial_expansion(trunc, time_row, budget)
    return math.fsum(c * _expect(key) for key, c in poly.items())


def second_moment_exact(trunc: ItoTruncation, budget: int = DEFAULT_TERM_BUDGET) -> float:
    """E[(truncated Ito expansion)^2] by Isserlis pairing over its monomials."""
    time_row = trunc.tensor.basis.integrals(trunc.p)
    poly = monomial_expansion(trunc, time_row, budget)
    items = list(poly.items())
    if len(items) ** 2 > 100 * budget:
        raise TermBudgetError(f"exact moment needs {len(items) ** 2} monomial pairs; "
                              f"budget is {100 * budget}")
    acc = []
    for key1, c1 in items:
        for key2, c2 in items:
            e = _expect(key1 + key2)
            if e:
                acc.append(c1 * c2 * e)
    return math.fsum(acc)
