"""Fine-grid Brownian reference integrals and Monte Carlo error estimates.

Paths live on a uniform grid of N steps. Reference iterated Ito integrals use
the left-point recursion

    L_0 = 1,   L_l(n + 1) = L_l(n) + L_{l-1}(n) dZ_l(n),

with dZ_l the Brownian increment of component i_l (or dt when i_l = 0).
Stratonovich references add the Ito-Stratonovich corrections from
``bridge.correction_terms``, each again an iterated Ito integral on the grid.

Work is split into fixed-size chunks of path ids. Every path's increments
come from its own counter-based substream, and each chunk is processed
identically on any worker, so estimates are bit-identical for any worker
count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bridge
from .basis import BasisSystem, Interval
from .coefficients import BudgetError, CoefficientTensor, KernelSpec, build_tensor
from .gaussians import INCREMENT_DOMAIN, NoiseIndexVector, projection_matrix, standard_normals
from .ito_expansion import ito_batch
from .strat_expansion import strat_batch

MIN_PATHS = 100
MAX_PATHS = 10**6
MAX_STEPS = 2**14
MAX_PATH_STEPS = 2**32
CHUNK_SIZE = 500


@dataclass(frozen=True)
class PathGrid:
    interval: Interval
    n_steps: int
    increments: np.ndarray = field(repr=False)

    def __post_init__(self):
        inc = np.asarray(self.increments, dtype=float)
        if inc.ndim != 2 or inc.shape[1] != self.n_steps:
            raise ValueError(f"increments must have shape (m, {self.n_steps}), got {inc.shape}")
        inc.setflags(write=False)
        object.__setattr__(self, "increments", inc)

    @property
    def m(self) -> int:
        return self.increments.shape[0]

    @property
    def dt(self) -> float:
        return self.interval.delta / self.n_steps


def path_increments(seed: int, path_ids, m: int, interval: Interval, n_steps: int) -> np.ndarray:
    """Brownian increments for several paths; shape (len(path_ids), m, N)."""
    path_ids = list(path_ids)
    out = np.empty((len(path_ids), m, n_steps))
    sd = math.sqrt(interval.delta / n_steps)
    for b, pid in enumerate(path_ids):
        for i in range(m):
            out[b, i] = standard_normals(seed, INCREMENT_DOMAIN, i + 1, pid, n_steps)
    out *= sd
    return out


def simulate_path(seed: int, path_id: int, m: int, interval: Interval, n_steps: int) -> PathGrid:
    if m < 1:
        raise ValueError("a path needs at least one Wiener component (m >= 1)")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    return PathGrid(interval, n_steps, path_increments(seed, [path_id], m, interval, n_steps)[0])


def _check_noise(noise, m: int) -> tuple:
    if isinstance(noise, NoiseIndexVector):
        if noise.m > m:
            raise ValueError(f"noise expects {noise.m} components, the path has {m}")
        noise = noise.indices
    noise = tuple(noise)
    if not 1 <= len(noise) <= 5:
        raise ValueError(f"reference integrals support multiplicity 1..5, got {len(noise)}")
    if max(noise) > m:
        raise ValueError(f"noise index {max(noise)} exceeds the path's {m} components")
    return noise


def ito_grid_batch(increments: np.ndarray, noise, dt: float) -> np.ndarray:
    """Left-point iterated Ito sums for a batch (B, m, N); returns shape (B,)."""
    B, _, N = increments.shape
    level = None  # values L_{l-1}(n) at n = 0..N-1; None stands for L_0 = 1
    for pos, i in enumerate(noise):
        dz = dt if i == 0 else increments[:, i - 1, :]
        contrib = np.broadcast_to(dz, (B, N)) if level is None else level * dz
        if pos == len(noise) - 1:
            return contrib.sum(axis=1)
        nxt = np.zeros((B, N))
        np.cumsum(contrib[:, :-1], axis=1, out=nxt[:, 1:])
        level = nxt
    raise AssertionError("unreachable")


def strat_grid_batch(increments: np.ndarray, noise, dt: float) -> np.ndarray:
    total = ito_grid_batch(increments, noise, dt)
    for factor, _, reduced in bridge.correction_terms(noise):
        total = total + factor * ito_grid_batch(increments, reduced, dt)
    return total


def reference_ito(path: PathGrid, noise) -> float:
    noise = _check_noise(noise, path.m)
    return float(ito_grid_batch(path.increments[None], noise, path.dt)[0])


def reference_strat(path: PathGrid, noise) -> float:
    noise = _check_noise(noise, path.m)
    return float(strat_grid_batch(path.increments[None], noise, path.dt)[0])


@dataclass(frozen=True)
class TruncationSpec:
    """What to measure: a truncated expansion against its grid reference."""

    indices: tuple
    p: int
    kind: str = "strat"
    basis: str = "legendre"
    t: float = 0.0
    T: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        NoiseIndexVector(self.indices)
        if self.kind not in ("ito", "strat"):
            raise ValueError(f"kind must be 'ito' or 'strat', got {self.kind!r}")
        if self.p < 0:
            raise ValueError("p must be >= 0")

    @property
    def k(self) -> int:
        return len(self.indices)

    @property
    def m(self) -> int:
        return max(self.indices)

    @property
    def interval(self) -> Interval:
        return Interval(self.t, self.T)

    @property
    def basis_system(self) -> BasisSystem:
        return BasisSystem(self.basis, self.interval)

    def tensor(self) -> CoefficientTensor:
        return build_tensor(KernelSpec(self.k, self.interval), self.basis_system, self.p)

    def describe(self) -> dict:
        return {"k": self.k, "indices": list(self.indices), "p": self.p, "kind": self.kind,
                "basis": self.basis, "t": self.t, "T": self.T}


@dataclass
class MsErrorEstimate:
    mean_sq: float
    std_error: float
    n_paths: int
    grid_steps: int
    what: dict

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_tsv_row(self) -> str:
        w = self.what
        idx = ",".join(str(i) for i in w["indices"])
        return "\t".join([w["kind"], str(w["k"]), idx, str(w["p"]), w["basis"],
                          repr(w["t"]), repr(w["T"]), str(self.n_paths), str(self.grid_steps),
                          repr(self.mean_sq), repr(self.std_error)])


TSV_HEADER = "\t".join(["kind", "k", "indices", "p", "basis", "t", "T", "paths", "steps",
                        "mean_sq", "std_error"])


def check_budget(n_paths: int, n_steps: int):
    if n_paths < MIN_PATHS:
        raise BudgetError(f"minimum {MIN_PATHS} paths, got {n_paths}")
    if n_paths > MAX_PATHS:
        raise BudgetError(f"at most {MAX_PATHS} paths, got {n_paths}")
    if not 1 <= n_steps <= MAX_STEPS:
        raise BudgetError(f"grid steps must be in 1..{MAX_STEPS}, got {n_steps}")
    if n_paths * n_steps > MAX_PATH_STEPS:
        raise BudgetError(f"{n_paths} paths x {n_steps} steps exceeds {MAX_PATH_STEPS} path-steps")


def _chunk_squared_errors(args) -> np.ndarray:
    seed, ids, spec, n_steps, values, phi = args
    iv = spec.interval
    dt = iv.delta / n_steps
    inc = path_increments(seed, ids, spec.m, iv, n_steps)
    p1 = values.shape[0]
    zeta = np.empty((len(ids), spec.m + 1, p1))
    zeta[:, 0, :] = spec.basis_system.integrals(p1 - 1)
    zeta[:, 1:, :] = np.einsum("bin,jn->bij", inc, phi)
    if spec.kind == "ito":
        approx = ito_batch(values, spec.indices, zeta)
        ref = ito_grid_batch(inc, spec.indices, dt)
    else:
        approx = strat_batch(values, spec.indices, zeta)
        ref = strat_grid_batch(inc, spec.indices, dt)
    return (approx - ref) ** 2


def squared_errors(seed: int, n_paths: int, n_steps: int, spec: TruncationSpec,
                   tensor: CoefficientTensor | None = None, workers: int = 1,
                   chunk_size: int = CHUNK_SIZE) -> np.ndarray:
    """Per-path squared errors in path-id order."""
    tensor = spec.tensor() if tensor is None else tensor
    values = tensor.truncated(spec.p)
    phi = projection_matrix(spec.basis_system, spec.p, n_steps)
    jobs = [(seed, range(lo, min(lo + chunk_size, n_paths)), spec, n_steps, values, phi)
            for lo in range(0, n_paths, chunk_size)]
    if workers <= 1:
        parts = [_chunk_squared_errors(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_squared_errors, jobs))
    return np.concatenate(parts)


def measure_ms_error(seed: int, n_paths: int, n_steps: int, spec: TruncationSpec,
                     tensor: CoefficientTensor | None = None, workers: int = 1,
                     chunk_size: int = CHUNK_SIZE) -> MsErrorEstimate:
    """Mean-square error of the truncation against the grid reference."""
    check_budget(n_paths, n_steps)
    sq = squared_errors(seed, n_paths, n_steps, spec, tensor, workers, chunk_size)
    # numpy's pairwise summation over a fixed array is a fixed reduction tree
    mean = float(np.sum(sq) / n_paths)
    std = float(np.std(sq, ddof=1) / math.sqrt(n_paths))
    return MsErrorEstimate(mean, std, n_paths, n_steps, spec.describe())


def measure_bridge_gap(seed: int, n_paths: int, n_steps: int, indices,
                       interval: Interval = Interval(0.0, 1.0)) -> tuple:
    """Sample mean and standard error of reference_strat - reference_ito."""
    check_budget(n_paths, n_steps)
    noise = tuple(indices)
    m = max(noise)
    dt = interval.delta / n_steps
    diffs = []
    for lo in range(0, n_paths, CHUNK_SIZE):
        ids = range(lo, min(lo + CHUNK_SIZE, n_paths))
        inc = path_increments(seed, ids, m, interval, n_steps)
        diffs.append(strat_grid_batch(inc, noise, dt) - ito_grid_batch(inc, noise, dt))
    d = np.concatenate(diffs)
    return float(np.mean(d)), float(np.std(d, ddof=1) / math.sqrt(n_paths))
