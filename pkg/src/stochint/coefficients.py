"""Fourier coefficients of the simplex kernel and their on-disk format.

The kernel on [t, T]^k is psi_1(t_1)...psi_k(t_k) on t_1 < ... < t_k and zero
elsewhere, with monomial weights psi_l(s) = (t - s)^alpha_l. Its coefficient
for the multi-index (j_1, ..., j_k) is the nested integral

    int_t^T phi_{j_k} psi_k ... int_t^{t_2} phi_{j_1} psi_1 dt_1 ... dt_k.

Arrays are indexed ``values[j_1, ..., j_k]``; the conventional subscript
C_{j_k ... j_1} reads the same tuple backwards.

Nested integrals are computed on [0, 1] in a Legendre-series representation:
every level applies "multiply by phi_j * weight, then integrate from the left
endpoint" as a banded linear operator on Legendre coefficients. For the
Legendre basis all operators are exact (up to rounding); for the trigonometric
basis phi_j is first projected onto a Legendre series to below 1e-17.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.polynomial import legendre as npleg

from .basis import LEGENDRE, TRIGONOMETRIC, BasisSystem, Interval, trig_frequency

SCHEMA_VERSION = 1
MAX_K = 5
DEFAULT_MAX_ENTRIES = 10**7
ABSOLUTE = "absolute"
UNIT_INTERVAL = "unit_interval"
NORMALIZATIONS = (ABSOLUTE, UNIT_INTERVAL)

# beyond this Legendre degree the spectral representation is refused
MAX_SERIES_DEGREE = 4000


class BudgetError(RuntimeError):
    """Requested tensor exceeds the memory budget."""


class CoefficientPathError(RuntimeError):
    """The requested basis/weight combination could not be integrated."""


class TensorFormatError(ValueError):
    """Malformed or unsupported tensor file."""


@dataclass(frozen=True)
class KernelSpec:
    k: int
    interval: Interval
    weights: tuple = None

    def __post_init__(self):
        if not 1 <= self.k <= MAX_K:
            raise ValueError(f"multiplicity must be in 1..{MAX_K}, got {self.k}")
        w = (0,) * self.k if self.weights is None else tuple(int(a) for a in self.weights)
        if len(w) != self.k:
            raise ValueError(f"need {self.k} weight exponents, got {len(w)}")
        if any(a < 0 for a in w):
            raise ValueError(f"weight exponents must be >= 0, got {w}")
        object.__setattr__(self, "weights", w)

    @property
    def unit_weights(self) -> bool:
        return not any(self.weights)

    def scale(self) -> float:
        """Absolute coefficient = scale() * coefficient on [0, 1]."""
        d = self.interval.delta
        return d ** (self.k / 2.0 + sum(self.weights))


# ---------------------------------------------------------------------------
# Legendre-series operators on [-1, 1], truncated to degree D


def _apply_x(a: np.ndarray) -> np.ndarray:
    """Multiply Legendre series by x along axis 0 (degree must have room)."""
    out = np.zeros_like(a)
    n = np.arange(a.shape[0], dtype=float).reshape((-1,) + (1,) * (a.ndim - 1))
    up = (n + 1.0) / (2.0 * n + 1.0)
    down = n / (2.0 * n + 1.0)
    out[1:] += (up * a)[:-1]
    out[:-1] += (down * a)[1:]
    return out


@lru_cache(maxsize=None)
def _integration_matrix(D: int) -> np.ndarray:
    # int_{-1}^x P_0 = P_0 + P_1;  int_{-1}^x P_n = (P_{n+1} - P_{n-1}) / (2n + 1)
    m = np.zeros((D + 1, D + 1))
    m[0, 0] = 1.0
    if D >= 1:
        m[1, 0] = 1.0
    for n in range(1, D + 1):
        if n + 1 <= D:
            m[n + 1, n] = 1.0 / (2 * n + 1)
        m[n - 1, n] = -1.0 / (2 * n + 1)
    return m


def _series_matrix(coefs: np.ndarray, D: int) -> np.ndarray:
    """Matrix of multiplication by sum_n coefs[n] P_n on degree <= D series."""
    eye = np.eye(D + 1)
    acc = coefs[0] * eye
    if len(coefs) == 1:
        return acc
    p_prev, p_cur = eye, _apply_x(eye)
    acc = acc + coefs[1] * p_cur
    for n in range(1, len(coefs) - 1):
        p_next = ((2 * n + 1) * _apply_x(p_cur) - n * p_prev) / (n + 1)
        p_prev, p_cur = p_cur, p_next
        if coefs[n + 1] != 0.0:
            acc = acc + coefs[n + 1] * p_cur
    return acc


@lru_cache(maxsize=None)
def _trig_series(j: int) -> np.ndarray:
    """Legendre coefficients (in x = 2u - 1) of the unit-interval trig phi_j."""
    if j == 0:
        return np.array([1.0])
    r = trig_frequency(j)
    deg = int(math.pi * r * 1.5) + 40
    if deg > MAX_SERIES_DEGREE:
        raise CoefficientPathError(
            f"spectral path: trigonometric phi_{j} needs Legendre degree {deg} "
            f"> {MAX_SERIES_DEGREE}")
    y, w = npleg.leggauss(deg + 24)
    arg = math.pi * r * (y + 1.0)
    f = math.sqrt(2.0) * (np.sin(arg) if j % 2 else np.cos(arg))
    vand = npleg.legvander(y, deg)
    c = (vand * w[:, None]).T @ f * (2.0 * np.arange(deg + 1) + 1.0) / 2.0
    keep = np.nonzero(np.abs(c) > 1e-18)[0]
    return c[: keep[-1] + 1]


def _basis_series(kind: str, j: int) -> np.ndarray:
    if kind == LEGENDRE:
        c = np.zeros(j + 1)
        c[j] = math.sqrt(2 * j + 1)
        return c
    return _trig_series(j)


def _weight_series(alpha: int) -> np.ndarray:
    # ((x + 1) / 2)^alpha as a Legendre series
    poly = np.zeros(alpha + 1)
    for i in range(alpha + 1):
        poly[i] = math.comb(alpha, i) / 2.0**alpha
    return npleg.poly2leg(poly)


@lru_cache(maxsize=None)
def _level_operator(kind: str, j: int, alpha: int, D: int) -> np.ndarray:
    """F -> int_{-1}^x phi_j(y) w_alpha(y) F(y) dy / 2 on degree <= D series."""
    series = npleg.legmul(_basis_series(kind, j), _weight_series(alpha))
    op = _integration_matrix(D) @ _series_matrix(series, D)
    op = 0.5 * op
    op.setflags(write=False)
    return op


def _series_degree(kind: str, j: int) -> int:
    return len(_basis_series(kind, j)) - 1


def _degree_room(kind: str, jmax: int, weights) -> int:
    deg = max(_series_degree(kind, j) for j in range(jmax + 1))
    D = sum(deg + a + 1 for a in weights) + 1
    if D > MAX_SERIES_DEGREE:
        raise CoefficientPathError(
            f"{'exact' if kind == LEGENDRE else 'spectral'} path: nested degree {D} "
            f"exceeds {MAX_SERIES_DEGREE}")
    return D


def _unit_tensor(kind: str, weights, p: int) -> np.ndarray:
    """All unit-interval coefficients with 0 <= j_l <= p, indexed [j_1, ..., j_k]."""
    k = len(weights)
    D = _degree_room(kind, p, weights)
    f = np.zeros((1, D + 1))
    f[0, 0] = 1.0
    for level, alpha in enumerate(weights):
        ops = [_level_operator(kind, j, alpha, D) for j in range(p + 1)]
        if level == k - 1:
            # only the value at x = 1 (sum of Legendre coefficients) is needed
            ends = np.stack([op.sum(axis=0) for op in ops])
            vals = f @ ends.T
            return vals.reshape((p + 1,) * k, order="F")
        f = np.concatenate([f @ op.T for op in ops], axis=0)
    raise AssertionError("unreachable")


def _unit_coefficient(kind: str, weights, js) -> float:
    D = sum(_series_degree(kind, j) + a + 1 for j, a in zip(js, weights)) + 1
    if D > MAX_SERIES_DEGREE:
        raise CoefficientPathError(f"nested degree {D} exceeds {MAX_SERIES_DEGREE}")
    f = np.zeros(D + 1)
    f[0] = 1.0
    for j, alpha in zip(js, weights):
        f = _level_operator(kind, j, alpha, D) @ f
    return float(math.fsum(f))


def coefficient(spec: KernelSpec, basis: BasisSystem, js) -> float:
    """Single Fourier coefficient for the multi-index (j_1, ..., j_k)."""
    js = tuple(int(j) for j in js)
    if len(js) != spec.k:
        raise ValueError(f"multi-index length {len(js)} != k={spec.k}")
    if any(j < 0 for j in js):
        raise ValueError(f"multi-index entries must be >= 0, got {js}")
    _check_basis(spec, basis)
    sign = -1.0 if sum(spec.weights) % 2 else 1.0
    return sign * spec.scale() * _unit_coefficient(basis.kind, spec.weights, js)


def _check_basis(spec: KernelSpec, basis: BasisSystem):
    if basis.interval != spec.interval:
        raise ValueError(f"basis interval {basis.interval} != kernel interval {spec.interval}")


@dataclass(frozen=True)
class CoefficientTensor:
    spec: KernelSpec
    basis_kind: str
    p: int
    values: np.ndarray = field(repr=False)
    normalization: str = ABSOLUTE

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        shape = (self.p + 1,) * self.spec.k
        if vals.shape != shape:
            raise ValueError(f"values shape {vals.shape} != {shape}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def basis(self) -> BasisSystem:
        return BasisSystem(self.basis_kind, self.spec.interval)

    def __getitem__(self, js):
        return float(self.values[tuple(js)])

    def truncated(self, p: int) -> np.ndarray:
        if p > self.p:
            raise ValueError(f"truncation order {p} exceeds stored order {self.p}")
        return self.values[(slice(0, p + 1),) * self.k]

    def renormalized(self, normalization: str) -> "CoefficientTensor":
        if normalization == self.normalization:
            return self
        # unit-interval values are taken at t = 0, where (t - s)^a = (-s)^a,
        # so the sign is shared and only the power of the length differs
        factor = self.spec.scale()
        vals = self.values * factor if normalization == ABSOLUTE else self.values / factor
        return CoefficientTensor(self.spec, self.basis_kind, self.p, vals, normalization)

    def parseval_sum(self, p: int | None = None) -> float:
        vals = self.values if p is None else self.truncated(p)
        return float(math.fsum(np.ravel(vals) ** 2))


def build_tensor(spec: KernelSpec, basis: BasisSystem, p: int,
                 normalization: str = ABSOLUTE,
                 max_entries: int = DEFAULT_MAX_ENTRIES) -> CoefficientTensor:
    """Dense tensor of coefficients for 0 <= j_l <= p."""
    if p < 0:
        raise ValueError("truncation order p must be >= 0")
    _check_basis(spec, basis)
    size = (p + 1) ** spec.k
    if size > max_entries:
        raise BudgetError(
            f"tensor with k={spec.k}, p={p} needs {size} entries "
            f"({size * 8} bytes); budget is {max_entries} entries")
    unit = _unit_tensor(basis.kind, spec.weights, p)
    if sum(spec.weights) % 2:
        unit = -unit
    if normalization == ABSOLUTE:
        unit = unit * spec.scale()
    return CoefficientTensor(spec, basis.kind, p, unit, normalization)


# ---------------------------------------------------------------------------
# persistence


def _header(tensor: CoefficientTensor, run_config=None) -> dict:
    head = {
        "schema_version": SCHEMA_VERSION,
        "basis": tensor.basis_kind,
        "k": tensor.k,
        "p": tensor.p,
        "weights": list(tensor.spec.weights),
        "t": tensor.spec.interval.t,
        "T": tensor.spec.interval.T,
        "normalization": tensor.normalization,
        "index_order": "j1_fastest",
        "endianness": "little",
        "dtype": "float64",
    }
    if run_config is not None:
        head["run_config"] = run_config
    return head


def save_tensor(tensor: CoefficientTensor, path, run_config=None) -> Path:
    """JSON header line, newline, then raw little-endian float64 (j_1 fastest)."""
    path = Path(path)
    head = json.dumps(_header(tensor, run_config), sort_keys=True).encode("utf-8")
    payload = np.ravel(tensor.values, order="F").astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(head + b"\n")
        fh.write(payload)
    return path


def read_header(path) -> dict:
    with open(path, "rb") as fh:
        line = fh.readline()
    return _parse_header(line, path)


def _parse_header(line: bytes, path) -> dict:
    if not line.endswith(b"\n"):
        raise TensorFormatError(f"{path}: missing header terminator")
    try:
        head = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise TensorFormatError(f"{path}: corrupt header ({exc})") from None
    if not isinstance(head, dict):
        raise TensorFormatError(f"{path}: header is not a JSON object")
    if head.get("schema_version") != SCHEMA_VERSION:
        raise TensorFormatError(
            f"{path}: unknown schema version {head.get('schema_version')!r}")
    required = ("basis", "k", "p", "weights", "t", "T", "normalization",
                "index_order", "endianness")
    missing = [key for key in required if key not in head]
    if missing:
        raise TensorFormatError(f"{path}: header missing fields {missing}")
    if head["basis"] not in (LEGENDRE, TRIGONOMETRIC):
        raise TensorFormatError(f"{path}: unknown basis {head['basis']!r}")
    if not isinstance(head["k"], int) or not 1 <= head["k"] <= MAX_K:
        raise TensorFormatError(f"{path}: unsupported multiplicity k={head['k']!r} (1..{MAX_K})")
    if not isinstance(head["p"], int) or head["p"] < 0:
        raise TensorFormatError(f"{path}: invalid order p={head['p']!r}")
    if head["index_order"] != "j1_fastest" or head["endianness"] != "little":
        raise TensorFormatError(f"{path}: unsupported layout "
                                f"{head['index_order']}/{head['endianness']}")
    if head["normalization"] not in NORMALIZATIONS:
        raise TensorFormatError(f"{path}: unknown normalization {head['normalization']!r}")
    return head


def load_tensor(path) -> CoefficientTensor:
    path = Path(path)
    with open(path, "rb") as fh:
        head = _parse_header(fh.readline(), path)
        payload = fh.read()
    k, p = head["k"], head["p"]
    n = (p + 1) ** k
    if len(payload) != 8 * n:
        raise TensorFormatError(
            f"{path}: size mismatch, expected {8 * n} payload bytes for k={k}, p={p}, "
            f"found {len(payload)}")
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    spec = KernelSpec(k, Interval(float(head["t"]), float(head["T"])), tuple(head["weights"]))
    vals = flat.reshape((p + 1,) * k, order="F")
    return CoefficientTensor(spec, head["basis"], p, vals, head["normalization"])


def export_csv(tensor: CoefficientTensor, path) -> Path:
    """One row per multi-index (j_1 fastest): j_1, ..., j_k, value."""
    path = Path(path)
    k = tensor.k
    cols = ",".join(f"j_{l}" for l in range(1, k + 1))
    lines = [cols + ",value"]
    for flat_idx, val in enumerate(np.ravel(tensor.values, order="F")):
        js = np.unravel_index(flat_idx, tensor.values.shape, order="F")
        lines.append(",".join(str(int(j)) for j in js) + f",{float(val)!r}")
    path.write_text("\n".join(lines) + "\n")
    return path
