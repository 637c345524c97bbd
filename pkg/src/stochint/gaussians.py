"""Reproducible Gaussian inputs zeta_j^(i) of the expansions.

Random numbers come from counter-based substreams. The master seed selects a
Philox key; the 256-bit Philox counter carries the substream coordinates

    counter = (position, path_id, component, domain)

so that any (path, component) stream can be generated independently of every
other one, in any order and on any worker. ``domain`` separates the direct
zeta draws (0) from Brownian increments (1). Within a substream values are
consumed sequentially, which fixes the order index j (or the time step n).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSystem

ZETA_DOMAIN = 0
INCREMENT_DOMAIN = 1
SEED_ENV = "STOCHINT_SEED"
DEFAULT_SEED = 20180101

_MASK64 = (1 << 64) - 1


def default_seed() -> int:
    """Seed from the STOCHINT_SEED environment variable, else a fixed default."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    return int(raw, 0)


def philox_key(seed: int) -> np.ndarray:
    """128-bit Philox key for a non-negative master seed."""
    seed = int(seed)
    if seed < 0 or seed >> 128:
        raise ValueError(f"seed must be in [0, 2**128), got {seed}")
    return np.array([seed & _MASK64, (seed >> 64) & _MASK64], dtype=np.uint64)


def substream(seed: int, domain: int, component: int, path_id: int = 0) -> np.random.Generator:
    """Generator for one (domain, component, path) substream."""
    counter = np.array([0, path_id, component, domain], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=philox_key(seed), counter=counter))


def standard_normals(seed: int, domain: int, component: int, path_id: int, size: int) -> np.ndarray:
    return substream(seed, domain, component, path_id).standard_normal(size)


@dataclass(frozen=True)
class NoiseIndexVector:
    indices: tuple
    m: int = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not 1 <= len(idx) <= 5:
            raise ValueError(f"need 1..5 noise indices, got {len(idx)}")
        if any(i < 0 for i in idx):
            raise ValueError(f"noise indices must be >= 0, got {idx}")
        m = max(idx) if self.m is None else int(self.m)
        if max(idx) > m:
            raise ValueError(f"noise index {max(idx)} exceeds component count m={m}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "m", m)

    @property
    def k(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __getitem__(self, pos):
        return self.indices[pos]


@dataclass(frozen=True)
class GaussianMatrix:
    """zeta values: row i = Wiener component (row 0 is the time component)."""

    values: np.ndarray = field(repr=False)
    basis: BasisSystem
    seed: int = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] < 1:
            raise ValueError(f"zeta matrix must be 2-d with a time row, got shape {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def m(self) -> int:
        return self.values.shape[0] - 1

    @property
    def p(self) -> int:
        return self.values.shape[1] - 1

    def __call__(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def with_row(self, i: int, row) -> "GaussianMatrix":
        vals = self.values.copy()
        vals[i] = row
        return GaussianMatrix(vals, self.basis, self.seed)


def time_row(basis: BasisSystem, p: int) -> np.ndarray:
    """Deterministic row i = 0: int_t^T phi_j(s) ds."""
    return basis.integrals(p)


def draw(seed: int, m: int, p: int, basis: BasisSystem, path_id: int = 0) -> GaussianMatrix:
    """Standard normal rows 1..m from independent substreams plus the time row."""
    if m < 1:
        raise ValueError("need at least one Wiener component (m >= 1)")
    if p < 0:
        raise ValueError("order p must be >= 0")
    vals = np.empty((m + 1, p + 1))
    vals[0] = time_row(basis, p)
    for i in range(1, m + 1):
        vals[i] = standard_normals(seed, ZETA_DOMAIN, i, path_id, p + 1)
    return GaussianMatrix(vals, basis, seed)


def projection_matrix(basis: BasisSystem, p: int, n_steps: int) -> np.ndarray:
    """phi_j at the left grid points tau_0..tau_{N-1}; shape (p + 1, N)."""
    iv = basis.interval
    tau = iv.t + iv.delta * np.arange(n_steps) / n_steps
    return basis.table(p, tau)


def zeta_from_path(path, basis: BasisSystem, p: int) -> GaussianMatrix:
    """zeta_j^(i) = sum_n phi_j(tau_n) dw_n^(i) (left endpoints); row 0 exact."""
    if path.interval != basis.interval:
        raise ValueError(f"path interval {path.interval} does not match basis "
                         f"interval {basis.interval}")
    phi = projection_matrix(basis, p, path.n_steps)
    vals = np.empty((path.m + 1, p + 1))
    vals[0] = time_row(basis, p)
    vals[1:] = np.einsum("in,jn->ij", path.increments, phi)
    return GaussianMatrix(vals, basis, None)
