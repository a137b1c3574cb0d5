"""Command-line interface: ``mpspectral {generate,embed,scree,cluster,validate}``.

Exit codes: 0 success, 1 a validation suite failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from mpspectral import __version__
from mpspectral.clustering import (
    PipelineConfig,
    adjusted_rand_index,
    run_pipeline,
    spectral_stage,
)
from mpspectral.embedding import biadjacency_embedding
from mpspectral.errors import ConvergenceError, MultipartiteError
from mpspectral.io import (
    InputError,
    RunManifest,
    file_digest,
    load_graph,
    read_json,
    write_columns_csv,
    write_edge_list,
    write_embedding,
    write_groups,
    write_json,
    write_matrix_csv,
)
from mpspectral.models import generate
from mpspectral.suites import SUITES, run_suite

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
MATRIX_FLAGS = {
    "adjacency": "adjacency",
    "laplacian": "laplacian",
    "reg-laplacian": "regularized_laplacian",
}
_DENSE_P_LIMIT = 5000


class UsageError(Exception):
    pass


def _parse_dims(text: str) -> tuple[int | None, tuple | None]:
    """``"6"`` fixes D; ``"6:2,2,2"`` (or ``"6:2"``) also fixes the group dims;
    ``":2"`` fixes only the group dims."""
    head, _, tail = text.partition(":")
    try:
        D = int(head) if head.strip() else None
        dims = tuple(int(x) for x in tail.split(",")) if tail.strip() else None
    except ValueError:
        raise UsageError(f"--dims expects D, D:d1,...,dK or :d1,...,dK, got {text!r}") from None
    return D, dims


def _pipeline_config(args) -> PipelineConfig:
    base = {}
    if getattr(args, "config", None):
        base = read_json(args.config)
        if not isinstance(base, dict):
            raise InputError(f"{args.config}: expected a JSON object")
        unknown = set(base) - set(PipelineConfig.__dataclass_fields__)
        if unknown:
            raise InputError(f"{args.config}: unknown keys {sorted(unknown)}")
    cfg = PipelineConfig(**base)
    over = {}
    if args.matrix:
        over["matrix_source"] = MATRIX_FLAGS[args.matrix]
    if args.tau is not None:
        if args.tau == "avg-degree":
            over["tau"] = "average_degree"
        else:
            try:
                over["tau"] = float(args.tau)
            except ValueError:
                raise UsageError(f"--tau expects a number or avg-degree, got {args.tau!r}") from None
    if args.dims:
        D, dims = _parse_dims(args.dims)
        over["D"], over["dims"] = D, dims
    if getattr(args, "spherical", None) is not None:
        over["spherical"] = args.spherical
    if getattr(args, "degree_min", None) is not None:
        over["degree_min"] = args.degree_min
    if args.seed is not None:
        over["seed"] = args.seed
    if args.threads is not None:
        over["threads"] = args.threads
    return replace(cfg, **over)


def _graph(args):
    return load_graph(args.edges, args.groups)


def _inputs(*paths) -> dict:
    return {str(p): file_digest(p) for p in paths if p}


def _finish(args, cmd: str, inputs: dict, config: dict, seed: int, outputs: list, t0: float):
    out = Path(args.out)
    RunManifest(
        cmd, inputs, config, seed, __version__, sorted(outputs), time.perf_counter() - t0
    ).write(out / "manifest.json")


# --------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    t0 = time.perf_counter()
    doc = read_json(args.spec)
    gen = generate(doc, args.n, args.seed)
    out = Path(args.out)
    files = ["edges.txt", "groups.txt"]
    write_edge_list(out / "edges.txt", gen.graph)
    write_groups(out / "groups.txt", gen.graph.z)
    ids = np.arange(gen.graph.n) + 1
    if gen.communities is not None:
        write_columns_csv(
            out / "communities.csv", ["node_id", "community"], [ids, gen.communities + 1]
        )
        files.append("communities.csv")
    if gen.latents is not None:
        write_matrix_csv(out / "latents.csv", ids, gen.graph.z + 1, gen.latents, "y")
        files.append("latents.csv")
    if args.write_p:
        if gen.graph.n > _DENSE_P_LIMIT:
            raise UsageError(f"--write-p is limited to n <= {_DENSE_P_LIMIT}")
        P = gen.probability_matrix()
        write_matrix_csv(out / "probabilities.csv", ids, gen.graph.z + 1, P, "p")
        files.append("probabilities.csv")
    _finish(args, "generate", _inputs(args.spec), {"spec": doc, "n": args.n}, args.seed, files, t0)
    print(f"wrote {gen.graph.n} nodes, {gen.graph.n_edges} edges to {out}")
    return EXIT_OK


def _write_stage(out: Path, g, stage) -> list:
    files = ["ambient.csv", "scree_ambient.csv", "dims.json"]
    write_embedding(out / "ambient.csv", stage.ambient.X, g.z)
    write_columns_csv(
        out / "scree_ambient.csv",
        ["rank", "value"],
        [np.arange(1, stage.scree_ambient.size + 1), stage.scree_ambient],
    )
    for k in range(g.K):
        name = f"intrinsic_group{k + 1}.csv"
        write_embedding(out / name, stage.intrinsic.Y[k], g.z, stage.intrinsic.index[k], "y")
        sv = stage.scree_groups[k]
        scree_name = f"scree_group{k + 1}.csv"
        write_columns_csv(out / scree_name, ["rank", "value"], [np.arange(1, sv.size + 1), sv])
        files += [name, scree_name]
    write_json(
        out / "dims.json",
        {
            "D": stage.D,
            "dims": list(stage.dims),
            "signature": list(stage.signature),
            "cap": stage.cap,
            "cap_violations": [k + 1 for k in stage.cap_violations],
            "eigenvalues": stage.ambient.eigenvalues,
            "tau": stage.tau,
        },
    )
    return files


def cmd_embed(args) -> int:
    t0 = time.perf_counter()
    cfg = _pipeline_config(args)
    g = _graph(args)
    stage = spectral_stage(g, cfg)
    out = Path(args.out)
    files = _write_stage(out, g, stage)
    if args.biadjacency:
        if g.K != 2:
            raise UsageError("--biadjacency needs a graph with exactly two groups")
        if len(set(stage.dims)) != 1 or stage.D != 2 * stage.dims[0]:
            raise UsageError("--biadjacency needs D = 2d and equal group dims (e.g. --dims 4:2)")
        lap = cfg.matrix_source != "adjacency"
        bi = biadjacency_embedding(g, (0, 1), stage.dims[0], cfg.seed, use_laplacian=lap, tau=stage.tau)
        write_embedding(out / "biadjacency_group1.csv", bi.Y1, g.z, bi.index1, "y")
        write_embedding(out / "biadjacency_group2.csv", bi.Y2, g.z, bi.index2, "y")
        files += ["biadjacency_group1.csv", "biadjacency_group2.csv"]
    _finish(args, "embed", _inputs(args.edges, args.groups, args.config), asdict(cfg), cfg.seed, files, t0)
    print(f"D={stage.D} dims={list(stage.dims)} signature={list(stage.signature)}")
    return EXIT_OK


def cmd_scree(args) -> int:
    t0 = time.perf_counter()
    cfg = _pipeline_config(args)
    if args.n_values:
        cfg = replace(cfg, n_scree=args.n_values)
    cfg = replace(cfg, D=None)
    g = _graph(args)
    stage = spectral_stage(g, cfg)
    out = Path(args.out)
    files = _write_stage(out, g, stage)
    _finish(args, "scree", _inputs(args.edges, args.groups, args.config), asdict(cfg), cfg.seed, files, t0)
    print(f"D={stage.D} dims={list(stage.dims)} cap={stage.cap}")
    return EXIT_OK


def _read_truth(path, n: int) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["node_id", "community"]:
        raise InputError(f"{path}: expected a node_id,community header")
    truth = np.full(n, -1, dtype=np.int64)
    for lineno, r in enumerate(rows[1:], 2):
        try:
            i, c = int(r[0]), int(r[1])
        except (ValueError, IndexError):
            raise InputError(f"{path}:{lineno}: expected node_id,community integers") from None
        if not 1 <= i <= n or c < 0:
            raise InputError(f"{path}:{lineno}: node {i} out of range 1..{n}")
        truth[i - 1] = c
    if np.any(truth < 0):
        raise InputError(f"{path}: every node needs a community")
    return truth


def cmd_cluster(args) -> int:
    t0 = time.perf_counter()
    cfg = _pipeline_config(args)
    g = _graph(args)
    res = run_pipeline(g, cfg)
    out = Path(args.out)
    ids = np.arange(g.n) + 1
    write_columns_csv(out / "labels.csv", ["node_id", "group", "community"], [ids, g.z + 1, res.labels])
    report = {
        "D": res.D,
        "dims": list(res.dims),
        "n_clusters": list(res.n_clusters),
        "signature": list(res.signature),
        "cap_violations": [k + 1 for k in res.cap_violations],
        "inertia": list(res.inertia),
        "filtered": (res.filtered + 1).tolist(),
        "tau": res.stage.tau,
    }
    if args.truth:
        truth = _read_truth(args.truth, g.n)
        keep = res.labels > 0
        report["ari_by_group"] = [
            adjusted_rand_index(truth[(g.z == k) & keep], res.labels[(g.z == k) & keep])
            for k in range(g.K)
        ]
    write_json(out / "report.json", report)
    _finish(
        args, "cluster", _inputs(args.edges, args.groups, args.config, args.truth),
        asdict(cfg), cfg.seed, ["labels.csv", "report.json"], t0,
    )
    print(f"D={res.D} dims={list(res.dims)} clusters={list(res.n_clusters)}")
    if "ari_by_group" in report:
        print("ARI by group: " + ", ".join(f"{a:.4f}" for a in report["ari_by_group"]))
    return EXIT_OK


def _suite_params(pairs) -> dict:
    params = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects key=value, got {item!r}")
        try:
            params[key] = [int(v) for v in value.split(",")] if "," in value else int(value)
        except ValueError:
            try:
                params[key] = float(value)
            except ValueError:
                raise UsageError(f"--param {key}: not a number: {value!r}") from None
    return params


def cmd_validate(args) -> int:
    t0 = time.perf_counter()
    names = list(SUITES) if args.suite == ["all"] else args.suite
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite {unknown[0]!r}; available: {', '.join(SUITES)}")
    params = _suite_params(args.param)
    if args.seed is not None:
        params["seed"] = args.seed
    if args.threads is not None:
        params["threads"] = args.threads
    out = Path(args.out)
    files, failed = [], []
    for name in names:
        report = run_suite(name, **params)
        fname = f"report_{name}.json"
        write_json(out / fname, report)
        files.append(fname)
        print(f"{name}: {'PASS' if report['passed'] else 'FAIL'} ({report['seconds']:.1f}s)")
        if not report["passed"]:
            failed.append(name)
    _finish(args, "validate", {}, {"suites": names, "params": params}, params.get("seed", 0), files, t0)
    return EXIT_FAILED if failed else EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, graph: bool = True):
    if graph:
        p.add_argument("--edges", required=True, help="edge list (1-based 'u v' lines)")
        p.add_argument("--groups", required=True, help="group file (1-based 'node group' lines)")
        p.add_argument("--config", help="JSON pipeline config; flags override it")
        p.add_argument("--matrix", choices=sorted(MATRIX_FLAGS))
        p.add_argument("--tau", help="regularization: a number or avg-degree")
        p.add_argument("--dims", help="fixed ranks: D, D:d1,...,dK or :d1,...,dK")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int, help="upper bound on worker threads")
    p.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mpspectral", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a graph from a JSON model spec")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--write-p", action="store_true", help="also write the dense probability matrix")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("embed", help="ambient and per-group embeddings")
    _common(p)
    p.add_argument("--biadjacency", action="store_true", help="also write the bipartite SVD embedding")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("scree", help="scree values and selected ranks")
    _common(p)
    p.add_argument("--n-values", type=int, help="number of ambient scree values (max 1000)")
    p.set_defaults(func=cmd_scree)

    p = sub.add_parser("cluster", help="multipartite spectral clustering")
    _common(p)
    p.add_argument("--spherical", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--degree-min", type=int)
    p.add_argument("--truth", help="CSV node_id,community for per-group ARI")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("validate", help="run validation suites")
    p.add_argument("--suite", action="append", required=True, help=f"one of {', '.join(SUITES)} or all")
    p.add_argument("--param", action="append", help="suite parameter override key=value")
    _common(p, graph=False)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InputError, MultipartiteError, ConvergenceError) as exc:
        print(f"mpspectral: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
