"""Empirical versus limiting covariance of aligned bipartite embedding errors.

    python3 scripts/clt_experiment.py --n 4000 --reps 500 --out results
"""

from dataclasses import asdict, dataclass

from _common import parse_config, save
from mpspectral.suites import suite_clt_adjacency, suite_clt_laplacian


@dataclass
class Config:
    n: int = 4000
    reps: int = 500
    seed: int = 0
    threads: int = 1
    out: str = "results"


def main():
    cfg = parse_config(Config, __doc__.splitlines()[0])
    out = {"config": asdict(cfg)}
    for name, suite in [("adjacency", suite_clt_adjacency), ("laplacian", suite_clt_laplacian)]:
        rep = suite(n=cfg.n, reps=cfg.reps, seed=cfg.seed, threads=cfg.threads)
        out[name] = rep
        for node in rep["nodes"]:
            print(f"{name:10s} y={node['y']}  relative Frobenius error {node['relative_error']:.3f}")
    save(cfg.out, "clt_experiment.json", out)


if __name__ == "__main__":
    main()
