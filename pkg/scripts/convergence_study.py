"""Grid refinement study for the Monte Carlo reference integrals.

For each truncation the mean-square error against the grid reference is
measured on N = 2^8 .. 2^14 steps with a fixed path ensemble. Once the
truncation error dominates, the estimates stop moving with N; the spread
across the finest grids is what a grid allowance has to cover.

    python scripts/convergence_study.py --paths 5000
    python scripts/convergence_study.py --format json > refinement.jsonl
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field

from stochint.gaussians import default_seed
from stochint.mc_oracle import TSV_HEADER, TruncationSpec, measure_ms_error


@dataclass
class StudyConfig:
    seed: int = field(default_factory=default_seed)
    paths: int = 5000
    steps: tuple = (2**8, 2**10, 2**12, 2**14)
    cases: tuple = (
        ((1, 2), 8, "ito", 1.0),
        ((1, 2, 3), 2, "ito", 1.0),
        ((1, 2, 3, 4, 5), 2, "ito", 0.25),
        ((1, 1, 2, 2, 1), 1, "strat", 1.0),
        ((1, 1, 2, 2, 1), 3, "strat", 1.0),
    )


def run(cfg: StudyConfig):
    for indices, p, kind, T in cfg.cases:
        spec = TruncationSpec(indices, p, kind=kind, T=T)
        tensor = spec.tensor()
        for n in cfg.steps:
            if cfg.paths * n > 2**32:
                continue
            yield measure_ms_error(cfg.seed, cfg.paths, n, spec, tensor=tensor)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=StudyConfig.paths)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--format", choices=("tsv", "json"), default="tsv")
    args = ap.parse_args(argv)
    cfg = StudyConfig(paths=args.paths)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format == "tsv":
        print(TSV_HEADER, flush=True)
    for est in run(cfg):
        if args.format == "json":
            rec = est.to_dict()
            rec["config"] = asdict(cfg)
            print(json.dumps(rec, sort_keys=True), flush=True)
        else:
            print(est.to_tsv_row(), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
