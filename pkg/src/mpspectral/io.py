"""On-disk formats.

Edge lists hold one ``u v`` pair per line; group files one ``node group``
pair per line. Both are 1-based and allow ``#`` comments. Embeddings are CSV
with a header and floats printed with 17 significant digits so that reading
and re-writing a file reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from mpspectral.graph import MultipartiteGraph


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def _data_lines(path):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if body:
                yield lineno, body.split()


def _int_pair(path, lineno, parts) -> tuple[int, int]:
    if len(parts) != 2:
        raise InputError(f"{path}:{lineno}: expected two integers, got {len(parts)} fields")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise InputError(f"{path}:{lineno}: expected two integers") from None


def read_edge_list(path) -> np.ndarray:
    """``(m, 2)`` array of 0-based endpoints."""
    pairs = [_int_pair(path, ln, parts) for ln, parts in _data_lines(path)]
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if edges.size and edges.min() < 1:
        raise InputError(f"{path}: node ids start at 1")
    return edges - 1


def read_groups(path) -> np.ndarray:
    """0-based group label of nodes ``1..n`` (every node listed exactly once)."""
    pairs = [_int_pair(path, ln, parts) for ln, parts in _data_lines(path)]
    if not pairs:
        raise InputError(f"{path}: no nodes")
    arr = np.array(pairs, dtype=np.int64)
    nodes, groups = arr[:, 0], arr[:, 1]
    n = int(nodes.max())
    if nodes.min() < 1 or np.unique(nodes).size != nodes.size or nodes.size != n:
        raise InputError(f"{path}: nodes must be 1..{n}, each listed once")
    if groups.min() < 1:
        raise InputError(f"{path}: groups start at 1")
    K = int(groups.max())
    if np.unique(groups).size != K:
        raise InputError(f"{path}: group ids must be contiguous from 1")
    z = np.empty(n, dtype=np.int64)
    z[nodes - 1] = groups - 1
    return z


def load_graph(edges_path, groups_path) -> MultipartiteGraph:
    z = read_groups(groups_path)
    edges = read_edge_list(edges_path)
    if edges.size and edges.max() >= z.size:
        raise InputError(f"{edges_path}: node {edges.max() + 1} missing from {groups_path}")
    return MultipartiteGraph.from_edges(z.size, edges, z)


def _atomic_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_edge_list(path, g: MultipartiteGraph):
    e = g.edges() + 1
    _atomic_text(path, "".join(f"{u} {v}\n" for u, v in e))


def write_groups(path, z):
    z = np.asarray(z)
    _atomic_text(path, "".join(f"{i + 1} {k + 1}\n" for i, k in enumerate(z)))


def fmt(x: float) -> str:
    return "" if np.isnan(x) else format(float(x), ".17g")


def _csv_text(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_matrix_csv(path, node_ids, groups, M, prefix: str = "x"):
    """Header ``node_id,group,<prefix>1..``; ids and groups written as given."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    header = ["node_id", "group"] + [f"{prefix}{j + 1}" for j in range(M.shape[1])]
    rows = ([int(i), int(k)] + [fmt(v) for v in row] for i, k, row in zip(node_ids, groups, M))
    _atomic_text(path, _csv_text(header, rows))


def write_embedding(path, X, z, index=None, prefix: str = "x"):
    """Rows of ``X`` for 0-based nodes ``index`` (default all), written 1-based."""
    z = np.asarray(z)
    index = np.arange(len(z)) if index is None else np.asarray(index)
    write_matrix_csv(path, index + 1, z[index] + 1, X, prefix)


def read_embedding(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, list[str]]:
    """``(node_ids, groups, values, header)`` exactly as stored (1-based ids)."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["node_id", "group"]:
        raise InputError(f"{path}: expected a node_id,group,... header")
    header, body = rows[0], rows[1:]
    ids = np.array([int(r[0]) for r in body], dtype=np.int64)
    groups = np.array([int(r[1]) for r in body], dtype=np.int64)
    vals = np.array(
        [[float(v) if v != "" else np.nan for v in r[2:]] for r in body], dtype=float
    ).reshape(len(body), len(header) - 2)
    return ids, groups, vals, header


def write_columns_csv(path, header, columns):
    cols = [np.asarray(c) for c in columns]
    rows = (
        [fmt(v) if np.issubdtype(c.dtype, np.floating) else int(v) for v, c in zip(vals, cols)]
        for vals in zip(*cols)
    )
    _atomic_text(path, _csv_text(header, rows))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj):
    _atomic_text(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    """Parse a JSON file; syntax errors carry ``path:line:column``."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def config_hash(config: dict) -> str:
    """SHA-256 of the canonical (sorted-key, compact) JSON form."""
    canon = json.dumps(_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    subcommand: str
    inputs: dict
    config: dict
    seed: int
    version: str
    outputs: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def write(self, path):
        doc = asdict(self)
        doc["config_hash"] = self.config_hash
        write_json(path, doc)
