"""Uniform embedding error versus n for the adjacency and Laplacian embeddings.

    python3 scripts/rate_experiment.py --reps 20 --out results
"""

from dataclasses import asdict, dataclass

import numpy as np

from _common import parse_config, save
from mpspectral.suites import SLOPE_BAND, rate_errors, rate_spec
from mpspectral.validation import rate_slope


@dataclass
class Config:
    n_grid: tuple = (500, 1000, 2000, 4000, 8000)
    reps: int = 20
    seed: int = 0
    threads: int = 1
    out: str = "results"


def main():
    cfg = parse_config(Config, __doc__.splitlines()[0])
    res = rate_errors(rate_spec(), cfg.n_grid, cfg.reps, cfg.seed, threads=cfg.threads)
    summary = {"config": asdict(cfg), "band": SLOPE_BAND}
    for kind, errs in res["errors"].items():
        mean = errs.mean(axis=1)
        slope = rate_slope(cfg.n_grid, mean)
        summary[kind] = {"mean_error": mean.tolist(), "errors": errs.tolist(), "slope": slope}
        print(f"{kind:10s} slope {slope:+.3f}  mean errors " + " ".join(f"{e:.4f}" for e in mean))
    save(cfg.out, "rate_experiment.json", summary)


if __name__ == "__main__":
    main()
