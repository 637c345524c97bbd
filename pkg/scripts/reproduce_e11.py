"""Mean-square error of the truncated double integral versus q.

Prints, for each q, the exact error (T-t)^2/(4(2q+1)), the logarithmic
bound, the C_1 (T-t)^2/q rate bound and the Monte Carlo estimate.

    python scripts/reproduce_e11.py --paths 20000 --T 0.5
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from stochint.basis import Interval
from stochint.error_analysis import e11_log_bound, e11_rate_bound, exact_e11
from stochint.gaussians import default_seed
from stochint.mc_oracle import TruncationSpec, measure_ms_error


@dataclass
class E11Config:
    seed: int = field(default_factory=default_seed)
    paths: int = 20000
    steps: int = 4096
    T: float = 1.0
    qs: tuple = (1, 2, 4, 8, 16, 32)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=E11Config.paths)
    ap.add_argument("--steps", type=int, default=E11Config.steps)
    ap.add_argument("--T", type=float, default=E11Config.T)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)
    cfg = E11Config(paths=args.paths, steps=args.steps, T=args.T)
    if args.seed is not None:
        cfg.seed = args.seed
    iv = Interval(0.0, cfg.T)
    print(f"{'q':>3} {'exact':>11} {'log bound':>11} {'rate bound':>11} "
          f"{'measured':>11} {'std err':>9}")
    for q in cfg.qs:
        est = measure_ms_error(cfg.seed, cfg.paths, cfg.steps,
                               TruncationSpec((1, 2), q, kind="ito", T=cfg.T))
        print(f"{q:>3} {exact_e11(q, iv):>11.6f} {e11_log_bound(q, iv):>11.6f} "
              f"{e11_rate_bound(q, iv):>11.6f} {est.mean_sq:>11.6f} {est.std_error:>9.1e}",
              flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
