import json

import numpy as np
import pytest

from pseudoparabolic import expr as ex
from pseudoparabolic.boundary import BoundaryFunction
from pseudoparabolic.errors import InvalidArgumentError
from pseudoparabolic.grid import Domain, GridFunction2D, make_tensor_grid, make_uniform_grid
from pseudoparabolic.io import (
    load_problem,
    parse_problem,
    read_grid_function,
    read_samples,
    relocate_refs,
    write_grid_function,
    write_samples,
)

CLASSICAL = {f"phi{k}": "0" for k in range(1, 5)} | {f"psi{k}": "0" for k in range(1, 5)}


def test_grid_function_round_trip(tmp_path, rng):
    grid = make_tensor_grid(Domain(0.7, 1.3), 6, 9)
    gf = GridFunction2D(grid, rng.normal(size=grid.shape))
    path = tmp_path / "f.csv"
    write_grid_function(gf, path)
    back = read_grid_function(path, grid)
    assert back.values.tobytes() == gf.values.tobytes()
    assert read_grid_function(path).grid == grid
    assert path.read_text().startswith("x1\\x2,0,")


def test_grid_function_wrong_nodes(tmp_path):
    grid = make_tensor_grid(Domain(1, 1), 5)
    path = tmp_path / "f.csv"
    write_grid_function(GridFunction2D(grid, np.zeros(grid.shape)), path)
    with pytest.raises(InvalidArgumentError):
        read_grid_function(path, make_tensor_grid(Domain(1, 1), 9))


def test_samples_round_trip(tmp_path):
    g = make_uniform_grid(7, 0, 2)
    bf = BoundaryFunction.sampled(g, np.sin(g.nodes), 1, [np.cos(g.nodes)])
    path = tmp_path / "s.csv"
    write_samples(bf, path)
    assert path.read_text().splitlines()[0] == "t,value,d1"
    back = read_samples(path, 1)
    assert back.jet.tobytes() == bf.jet.tobytes()
    assert back.grid == g


def test_parse_defaults():
    pf = parse_problem({"domain": {"h1": 1, "h2": 2}, "classical_data": CLASSICAL})
    assert pf.grid.shape == (33, 33)
    assert pf.grid.spans(Domain(1.0, 2.0))
    assert pf.rhs == ex.Num(0.0)
    assert pf.nonclassical is None and pf.classical is not None


def test_parse_explicit_nodes():
    raw = {"domain": {"h1": 1, "h2": 1}, "grid": {"x1": [0, 0.2, 0.5, 0.9, 1], "x2": [0, 0.1, 0.3, 0.6, 1]},
           "classical_data": CLASSICAL}
    assert parse_problem(raw).grid.g1.nodes[2] == 0.5


@pytest.mark.parametrize("raw", [
    [],
    {"domain": {"h1": 1}},
    {"domain": {"h1": 1, "h2": 1}, "coefficients": {"4,4": "1"}},
    {"domain": {"h1": 1, "h2": 1}, "classical_data": CLASSICAL,
     "nonclassical_data": {"corner": [[0] * 4] * 4, "edge_x1": ["0"] * 4, "edge_x2": ["0"] * 4}},
    {"domain": {"h1": 1, "h2": 1}, "classical_data": {"phi1": "0"}},
    {"domain": {"h1": 1, "h2": 1}, "grid": {"x1": [0, 0.5, 0.6, 0.7, 0.9], "x2": [0, 0.2, 0.4, 0.6, 1]}},
    {"domain": {"h1": 1, "h2": 1}, "rhs": "x1 +"},
])
def test_parse_errors(raw):
    with pytest.raises(ValueError):
        parse_problem(raw)


def test_file_references_resolve(tmp_path):
    grid = make_tensor_grid(Domain(1, 1), 5)
    (tmp_path / "data").mkdir()
    write_grid_function(GridFunction2D(grid, np.ones(grid.shape)), tmp_path / "data" / "a.csv")
    g = make_uniform_grid(5, 0, 1)
    write_samples(BoundaryFunction.sampled(g, g.nodes, 2), tmp_path / "data" / "phi1.csv")
    raw = {"domain": {"h1": 1, "h2": 1}, "grid": {"n1": 5},
           "coefficients": {"0,0": {"file": "data/a.csv"}},
           "classical_data": CLASSICAL | {"phi1": {"file": "data/phi1.csv"}}}
    path = tmp_path / "p.json"
    path.write_text(json.dumps(raw))
    pf = load_problem(path)
    assert isinstance(pf.coeffs["0,0"], GridFunction2D)
    assert pf.classical.phi[0].is_sampled

    moved = relocate_refs(raw, str(tmp_path), str(tmp_path / "out"))
    assert moved["coefficients"]["0,0"] == {"file": "../data/a.csv"}
    assert "classical_data" not in moved


def test_missing_file(tmp_path):
    raw = {"domain": {"h1": 1, "h2": 1}, "rhs": {"file": "nope.csv"}}
    with pytest.raises(OSError):
        parse_problem(raw, str(tmp_path / "p.json"))
