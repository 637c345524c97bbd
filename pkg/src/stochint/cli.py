"""Command line front end: ``stochint coeffs | approximate | validate``.

Every result carries the schema version and the fully resolved RunConfig that
produced it; ``--config FILE`` replays such a config (from a JSON result or a
tensor file header). Explicit flags override replayed values.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .basis import BASIS_KINDS, LEGENDRE, BasisSystem, Interval
from .bridge import truncation_gap
from .coefficients import (SCHEMA_VERSION, BudgetError, KernelSpec, TensorFormatError,
                           build_tensor, export_csv, load_tensor, save_tensor)
from .error_analysis import bound_qq4, error_report, exact_e11
from .gaussians import default_seed, draw
from .ito_expansion import ItoTruncation, eval_ito
from .mc_oracle import TruncationSpec, check_budget, measure_ms_error
from .strat_expansion import StratTruncation, eval_strat

COMMANDS = ("coeffs", "approximate", "validate")
FORMATS = ("table", "json", "tsv")
GRID_ALLOWANCE = 0.002


@dataclass
class RunConfig:
    command: str
    k: int | None = None
    p: int | None = None
    basis: str = LEGENDRE
    t: float = 0.0
    T: float = 1.0
    weights: tuple | None = None
    indices: tuple | None = None
    m: int | None = None
    seed: int | None = None
    paths: int = 20000
    steps: int = 4096
    draws: int = 1
    workers: int = 1
    tensor: str | None = None
    out: str | None = None
    csv: str | None = None
    breakdown: bool = False
    format: str = "table"

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("weights", "indices"):
            if d[key] is not None:
                d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown RunConfig fields {sorted(unknown)}")
        d = dict(d)
        for key in ("weights", "indices"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument parsing


def _multiplicity(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("multiplicity 1..5") from None
    if not 1 <= k <= 5:
        raise argparse.ArgumentTypeError(f"multiplicity 1..5 (got {k})")
    return k


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stochint",
                                     description="Fourier-series approximation of iterated "
                                                 "Ito and Stratonovich integrals")
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def common(p):
        p.add_argument("--config", default=S, help="replay a RunConfig from a JSON result or tensor file")
        p.add_argument("--format", choices=FORMATS, default=S)

    def kernel(p):
        p.add_argument("--k", type=_multiplicity, default=S, help="multiplicity 1..5")
        p.add_argument("--p", type=int, default=S, help="truncation order")
        p.add_argument("--basis", choices=BASIS_KINDS, default=S)
        p.add_argument("--t", type=float, default=S)
        p.add_argument("--T", type=float, default=S)
        p.add_argument("--weights", type=_int_list, default=S,
                       help="exponents alpha_l of (t - s)^alpha_l, e.g. 0,1")

    pc = sub.add_parser("coeffs", help="build and store a coefficient tensor")
    kernel(pc)
    pc.add_argument("--out", default=S, help="tensor file (default coeffs_k{k}_p{p}_{basis}.bin)")
    pc.add_argument("--csv", default=S, help="also export a CSV table")
    common(pc)

    pa = sub.add_parser("approximate", help="evaluate truncated expansions on random draws")
    kernel(pa)
    pa.add_argument("--indices", type=_int_list, default=S, help="noise indices i_1..i_k")
    pa.add_argument("--m", type=int, default=S, help="number of Wiener components")
    pa.add_argument("--seed", type=lambda s: int(s, 0), default=S)
    pa.add_argument("--draws", type=int, default=S)
    pa.add_argument("--tensor", default=S, help="use a stored tensor instead of building one")
    pa.add_argument("--breakdown", action="store_true", default=S,
                    help="show each indicator term of strat - ito")
    common(pa)

    pv = sub.add_parser("validate", help="Monte Carlo check of error formulas and bounds")
    pv.add_argument("--k", type=_multiplicity, default=S, help="only rows with this multiplicity")
    pv.add_argument("--seed", type=lambda s: int(s, 0), default=S)
    pv.add_argument("--paths", type=int, default=S)
    pv.add_argument("--steps", type=int, default=S)
    pv.add_argument("--workers", type=int, default=S)
    common(pv)
    return parser


def _load_config(path: str) -> dict:
    path = Path(path)
    if not path.exists():
        raise CliError(f"config file not found: {path}")
    raw = path.read_bytes()
    # JSON results are one line; tensor files put a JSON header on the first line
    first = raw.split(b"\n", 1)[0]
    try:
        data = json.loads(first.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        try:
            data = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise CliError(f"{path}: not a JSON result or tensor file") from None
    cfg = data.get("run_config", data) if isinstance(data, dict) else None
    if not isinstance(cfg, dict) or "command" not in cfg:
        raise CliError(f"{path}: no RunConfig found")
    return cfg


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    explicit = {k: v for k, v in vars(ns).items() if k != "config"}
    base = {"command": ns.command}
    if hasattr(ns, "config"):
        replay = _load_config(ns.config)
        if replay["command"] != ns.command:
            raise CliError(f"config is for '{replay['command']}', not '{ns.command}'")
        base.update(replay)
    base.update(explicit)
    cfg = RunConfig.from_dict(base)
    if cfg.command != "coeffs" and cfg.seed is None:
        cfg.seed = default_seed()
    return cfg


# ---------------------------------------------------------------------------
# commands


def _emit(cfg: RunConfig, payload: dict, table: str, tsv: str, out=None):
    out = sys.stdout if out is None else out
    if cfg.format == "json":
        doc = {"schema_version": SCHEMA_VERSION, "run_config": cfg.to_dict(), **payload}
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    elif cfg.format == "tsv":
        out.write(tsv.rstrip("\n") + "\n")
    else:
        out.write(table.rstrip("\n") + "\n")


def _kernel(cfg: RunConfig) -> tuple:
    if cfg.k is None:
        raise CliError("--k is required")
    p = 8 if cfg.p is None else cfg.p
    iv = Interval(cfg.t, cfg.T)
    return KernelSpec(cfg.k, iv, cfg.weights), BasisSystem(cfg.basis, iv), p


def cmd_coeffs(cfg: RunConfig, out=None) -> int:
    spec, basis, p = _kernel(cfg)
    cfg.p = p
    if cfg.out is None:
        cfg.out = f"coeffs_k{cfg.k}_p{p}_{cfg.basis}.bin"
    tensor = build_tensor(spec, basis, p)
    save_tensor(tensor, cfg.out, run_config=cfg.to_dict())
    if cfg.csv:
        export_csv(tensor, cfg.csv)
    rep = error_report(tensor)
    residual = rep.i_k - rep.parseval_sum
    payload = {"file": cfg.out, "report": rep.to_dict(), "residual": residual}
    table = (f"wrote {cfg.out} ({tensor.values.size} coefficients)\n"
             f"sum C^2   {rep.parseval_sum:.15g}\n"
             f"I_k       {rep.i_k:.15g}\n"
             f"residual  {residual:.15g}\n"
             f"bound     {rep.bound_qq4:.15g}  (k! * residual)")
    tsv = "file\tk\tp\tbasis\tsum_sq\ti_k\tresidual\tbound\n" + "\t".join(
        [cfg.out, str(cfg.k), str(p), cfg.basis, repr(rep.parseval_sum), repr(rep.i_k),
         repr(residual), repr(rep.bound_qq4)])
    _emit(cfg, payload, table, tsv, out)
    return 0


def cmd_approximate(cfg: RunConfig, out=None) -> int:
    if cfg.indices is None:
        raise CliError("--indices is required")
    if cfg.tensor is not None:
        path = Path(cfg.tensor)
        if not path.exists():
            raise CliError(f"tensor file not found: {path}")
        tensor = load_tensor(path)
        p = tensor.p if cfg.p is None else cfg.p
        if p > tensor.p:
            raise CliError(f"--p {p} exceeds the stored tensor order {tensor.p}")
    else:
        if cfg.k is None:
            cfg.k = len(cfg.indices)
        spec, basis, p = _kernel(cfg)
        tensor = build_tensor(spec, basis, p)
    cfg.p = p
    if tensor.k != len(cfg.indices):
        raise CliError(f"{len(cfg.indices)} indices given for a k={tensor.k} tensor")
    m = max(cfg.indices) if cfg.m is None else cfg.m
    if max(cfg.indices) > m:
        raise CliError(f"noise index {max(cfg.indices)} exceeds --m {m}")
    if cfg.draws < 1:
        raise CliError("--draws must be >= 1")
    ito = ItoTruncation(tensor, cfg.indices, p)
    strat = StratTruncation(tensor, cfg.indices, p)
    coverage = strat.coverage

    records = []
    for path_id in range(cfg.draws):
        zeta = draw(cfg.seed, max(m, 1), p, tensor.basis, path_id)
        vi = eval_ito(ito, zeta)
        vs = eval_strat(strat, zeta, warn=False)
        gap = truncation_gap(ito, strat, zeta)
        rec = {"draw": path_id, "ito": vi, "strat": vs, "gap": gap.value,
               "strat_equals_ito": not gap.breakdown}
        if cfg.breakdown:
            rec["breakdown"] = gap.breakdown
        records.append(rec)

    lines = [f"indices {cfg.indices}  p={p}  basis={tensor.basis_kind}  "
             f"[t, T]=[{tensor.spec.interval.t}, {tensor.spec.interval.T}]",
             f"stratonovich expansion {coverage}"]
    for rec in records:
        line = (f"draw {rec['draw']}: ito {rec['ito']:.12g}  strat {rec['strat']:.12g}  "
                f"strat - ito {rec['gap']:.12g}")
        if rec["strat_equals_ito"]:
            line += "  (strat = ito: no indicator term fires)"
        lines.append(line)
        for label, val in rec.get("breakdown", {}).items():
            lines.append(f"    pairs {label}: {val:.12g}")
    tsv = "draw\tito\tstrat\tgap\tstrat_equals_ito\n" + "\n".join(
        f"{r['draw']}\t{r['ito']!r}\t{r['strat']!r}\t{r['gap']!r}\t{int(r['strat_equals_ito'])}"
        for r in records)
    payload = {"coverage": {"covered": coverage.covered, "results": list(coverage.results),
                            "note": coverage.note},
               "draws": records}
    _emit(cfg, payload, "\n".join(lines), tsv, out)
    return 0


@dataclass(frozen=True)
class ValidationCase:
    """One row of the validation grid: 'exact' rows compare against a closed form,
    'bound' rows check measured <= bound."""

    indices: tuple
    p: int
    T: float
    check: str


VALIDATION_GRID = (
    ValidationCase((1, 2), 2, 1.0, "exact"),
    ValidationCase((1, 2), 8, 1.0, "exact"),
    ValidationCase((1, 2, 3), 3, 1.0, "bound"),
    ValidationCase((1, 2, 3, 4, 5), 2, 0.25, "bound"),
)


def run_validation(cfg: RunConfig) -> list:
    check_budget(cfg.paths, cfg.steps)
    rows = []
    for case in VALIDATION_GRID:
        if cfg.k is not None and len(case.indices) != cfg.k:
            continue
        spec = TruncationSpec(case.indices, case.p, kind="ito", T=case.T)
        tensor = spec.tensor()
        est = measure_ms_error(cfg.seed, cfg.paths, cfg.steps, spec, tensor=tensor,
                               workers=cfg.workers)
        if case.check == "exact":
            theory = exact_e11(case.p, spec.interval)
            slack = 3 * est.std_error + GRID_ALLOWANCE
            ok = abs(est.mean_sq - theory) <= slack
            rule = "|measured - exact| <= 3 se + 0.002"
        else:
            theory = bound_qq4(tensor)
            slack = 3 * est.std_error
            ok = est.mean_sq <= theory + slack
            rule = "measured <= bound + 3 se"
        rows.append({"k": spec.k, "indices": list(case.indices), "p": case.p, "T": case.T,
                     "check": case.check, "theory": theory, "measured": est.mean_sq,
                     "std_error": est.std_error, "rule": rule, "pass": bool(ok)})
    return rows


def cmd_validate(cfg: RunConfig, out=None) -> int:
    rows = run_validation(cfg)
    all_pass = all(r["pass"] for r in rows)
    head = f"{'k':>2}  {'indices':<15} {'p':>2} {'T':>5}  {'check':<5} {'theory':>12} " \
           f"{'measured':>12} {'std_err':>10}  result"
    lines = [f"seed {cfg.seed}, {cfg.paths} paths, {cfg.steps} steps", head]
    for r in rows:
        idx = ",".join(map(str, r["indices"]))
        lines.append(f"{r['k']:>2}  {idx:<15} {r['p']:>2} {r['T']:>5}  {r['check']:<5} "
                     f"{r['theory']:>12.6g} {r['measured']:>12.6g} {r['std_error']:>10.3g}  "
                     f"{'PASS' if r['pass'] else 'FAIL'}")
    tsv = "k\tindices\tp\tT\tcheck\ttheory\tmeasured\tstd_error\tpass\n" + "\n".join(
        f"{r['k']}\t{','.join(map(str, r['indices']))}\t{r['p']}\t{r['T']!r}\t{r['check']}\t"
        f"{r['theory']!r}\t{r['measured']!r}\t{r['std_error']!r}\t{int(r['pass'])}"
        for r in rows)
    _emit(cfg, {"rows": rows, "all_pass": all_pass}, "\n".join(lines), tsv, out)
    return 0 if all_pass else 1


HANDLERS = {"coeffs": cmd_coeffs, "approximate": cmd_approximate, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = resolve_config(ns)
        return HANDLERS[cfg.command](cfg)
    except (CliError, BudgetError, TensorFormatError, ValueError, OSError) as exc:
        print(f"stochint {ns.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
