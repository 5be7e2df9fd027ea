"""JSON problem files and CSV grid files.

A problem file looks like::

    {
      "domain": {"h1": 1, "h2": 1},
      "grid": {"n1": 33, "n2": 33},            # or {"x1": [...], "x2": [...]}
      "coefficients": {"0,0": "1 + step(x1 - 0.5)", "2,1": {"file": "a21.csv"}},
      "rhs": "x1^3*x2^3",
      "classical_data": {"phi1": "...", ..., "psi4": "..."},
      # or "nonclassical_data": {"corner": [[...] x4], "edge_x1": [...], "edge_x2": [...]}
      "solver": {"method": "marching", "tol": 1e-10, "max_iter": 200}
    }

Relative file references are resolved against the JSON file's directory.
Two-dimensional grid files have the header ``x1\\x2,<x2 nodes>`` followed by
one row per x1 node; one-dimensional sample files have the header
``t,value[,d1,d2,d3,d4]`` where the optional columns hold derivative samples.
"""
import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .boundary import BoundaryFunction, ClassicalData, NonClassicalData
from .errors import InvalidArgumentError
from .grid import Domain, Grid1D, GridFunction2D, TensorGrid, make_tensor_grid

DEFAULT_NODES = 33
PHI_KEYS = tuple(f"phi{k}" for k in range(1, 5))
PSI_KEYS = tuple(f"psi{k}" for k in range(1, 5))


def _fmt(v):
    return f"{float(v):.17g}"


def grid_function_to_csv(gf):
    g1, g2 = gf.grid.g1.nodes, gf.grid.g2.nodes
    lines = ["x1\\x2," + ",".join(_fmt(x) for x in g2)]
    for i, x in enumerate(g1):
        lines.append(_fmt(x) + "," + ",".join(_fmt(v) for v in gf.values[i]))
    return "\n".join(lines) + "\n"


def write_grid_function(gf, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(grid_function_to_csv(gf))


def read_grid_function(path, grid=None):
    """Read a 2-D grid CSV; with ``grid`` given, its nodes must match."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or len(rows[0]) < 2:
        raise InvalidArgumentError(f"{path}: not a grid file")
    x2 = np.array([float(v) for v in rows[0][1:]])
    body = np.array([[float(v) for v in r] for r in rows[1:]])
    if body.shape[1] != x2.size + 1:
        raise InvalidArgumentError(f"{path}: ragged rows")
    file_grid = TensorGrid(Grid1D(body[:, 0]), Grid1D(x2))
    if grid is not None:
        if file_grid.shape != grid.shape or not (
            np.allclose(file_grid.g1.nodes, grid.g1.nodes, rtol=0, atol=1e-12)
            and np.allclose(file_grid.g2.nodes, grid.g2.nodes, rtol=0, atol=1e-12)
        ):
            raise InvalidArgumentError(f"{path}: nodes do not match the problem grid")
        file_grid = grid
    return GridFunction2D(file_grid, body[:, 1:])


def write_samples(bf, path):
    header = ["t", "value"] + [f"d{k}" for k in range(1, bf.jet.shape[0])]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i, t in enumerate(bf.grid.nodes):
            fh.write(",".join([_fmt(t)] + [_fmt(v) for v in bf.jet[:, i]]) + "\n")


def read_samples(path, axis):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2 or rows[0][:2] != ["t", "value"]:
        raise InvalidArgumentError(f"{path}: expected a 't,value' sample file")
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    return BoundaryFunction(axis, grid=Grid1D(data[:, 0]), jet=data[:, 1:].T)


@dataclass
class ProblemFile:
    """A parsed problem file; ``raw`` keeps the original JSON members."""

    path: str
    raw: dict
    dom: Domain
    grid: TensorGrid
    coeffs: dict
    rhs: object
    classical: ClassicalData | None
    nonclassical: NonClassicalData | None

    @property
    def base_dir(self):
        return os.path.dirname(os.path.abspath(self.path))


def _resolve(base, ref):
    return ref if os.path.isabs(ref) else os.path.join(base, ref)


def _grid_from(raw, dom):
    cfg = raw.get("grid", {})
    if "x1" in cfg or "x2" in cfg:
        grid = TensorGrid(Grid1D(cfg["x1"]), Grid1D(cfg["x2"]))
        if not grid.spans(dom):
            raise InvalidArgumentError("explicit grid nodes must run from 0 to h1 / h2")
        return grid
    return make_tensor_grid(dom, int(cfg.get("n1", DEFAULT_NODES)), int(cfg.get("n2", cfg.get("n1", DEFAULT_NODES))))


def _field(value, base, grid):
    if isinstance(value, dict):
        return read_grid_function(_resolve(base, value["file"]), grid)
    return ex.as_expr(value)


def _edge(value, base, axis):
    if isinstance(value, dict):
        return read_samples(_resolve(base, value["file"]), axis)
    return BoundaryFunction.analytic(value, axis)


def parse_problem(raw, path="<memory>"):
    base = os.path.dirname(os.path.abspath(path))
    if not isinstance(raw, dict):
        raise InvalidArgumentError("problem file must hold a JSON object")
    try:
        dom = Domain(float(raw["domain"]["h1"]), float(raw["domain"]["h2"]))
    except (KeyError, TypeError) as err:
        raise InvalidArgumentError("problem file needs domain.h1 and domain.h2") from err
    grid = _grid_from(raw, dom)
    coeffs = {}
    for key, value in raw.get("coefficients", {}).items():
        if key.replace(" ", "") == "4,4":
            raise InvalidArgumentError("coefficient 4,4 is fixed to 1 and may not be given")
        coeffs[key] = _field(value, base, grid)
    rhs = _field(raw.get("rhs", "0"), base, grid)
    has_c, has_n = "classical_data" in raw, "nonclassical_data" in raw
    if has_c and has_n:
        raise InvalidArgumentError("give exactly one of classical_data / nonclassical_data")
    classical = nonclassical = None
    if has_c:
        block = raw["classical_data"]
        missing = [k for k in PHI_KEYS + PSI_KEYS if k not in block]
        if missing:
            raise InvalidArgumentError(f"classical_data lacks {missing}")
        classical = ClassicalData(
            tuple(_edge(block[k], base, 2) for k in PHI_KEYS),
            tuple(_edge(block[k], base, 1) for k in PSI_KEYS),
        )
    elif has_n:
        block = raw["nonclassical_data"]
        nonclassical = NonClassicalData(
            np.array(block["corner"], dtype=float),
            tuple(_edge(v, base, 1) for v in block["edge_x1"]),
            tuple(_edge(v, base, 2) for v in block["edge_x2"]),
        )
    return ProblemFile(path, raw, dom, grid, coeffs, rhs, classical, nonclassical)


def load_problem(path):
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return parse_problem(raw, path)


def _edge_json(bf, out_dir, name):
    if bf.is_sampled:
        fname = f"{name}.csv"
        write_samples(bf, os.path.join(out_dir, fname))
        return {"file": fname}
    return ex.to_string(bf.expr)


def classical_block(cd, out_dir, prefix=""):
    block = {}
    for k, bf in zip(PHI_KEYS, cd.phi):
        block[k] = _edge_json(bf, out_dir, prefix + k)
    for k, bf in zip(PSI_KEYS, cd.psi):
        block[k] = _edge_json(bf, out_dir, prefix + k)
    return block


def nonclassical_block(nc, out_dir, prefix=""):
    return {
        "corner": [[float(v) for v in row] for row in nc.corner],
        "edge_x1": [_edge_json(bf, out_dir, f"{prefix}z4{i2}") for i2, bf in enumerate(nc.edge_x1)],
        "edge_x2": [_edge_json(bf, out_dir, f"{prefix}z{i1}4") for i1, bf in enumerate(nc.edge_x2)],
    }


def relocate_refs(raw, src_dir, out_dir):
    """Copy of ``raw`` with relative ``{"file": ...}`` refs rewritten for ``out_dir``."""
    def fix(v):
        if isinstance(v, dict) and "file" in v and not os.path.isabs(v["file"]):
            return {"file": os.path.relpath(os.path.join(src_dir, v["file"]), out_dir)}
        return v

    out = {k: v for k, v in raw.items() if k not in ("classical_data", "nonclassical_data")}
    if "coefficients" in out:
        out["coefficients"] = {k: fix(v) for k, v in out["coefficients"].items()}
    if "rhs" in out:
        out["rhs"] = fix(out["rhs"])
    return out
