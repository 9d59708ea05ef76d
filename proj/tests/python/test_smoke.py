import itertools
import os
from pathlib import Path

import pytest

import aecspace

CONFIGS = Path(os.environ.get("AECSPACE_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))
EDGE = "structure\nrelation E 2\nsize 2\nE 0 1\nE 1 0\nend\n"


@pytest.fixture(scope="module")
def graphs():
    return aecspace.load_config(CONFIGS / "graphs.yaml")


def loopless_symmetric(n):
    """Edge sets of loopless symmetric graphs on n vertices, by direct count."""
    pairs = list(itertools.combinations(range(n), 2))
    return 2 ** len(pairs)


def test_formula_round_trip():
    text = "(exists (x1) (and (rel E x0 x1) (not (= x0 x1))))"
    assert aecspace.parse_formula(text) == text
    with pytest.raises(aecspace.Error):
        aecspace.parse_formula("(rel E x0")


def test_evaluate_and_canonical():
    assert aecspace.evaluate(EDGE, "(rel E c0 c1)")
    assert not aecspace.evaluate(EDGE, "(exists (x0) (rel E x0 x0))")
    assert aecspace.canonical(EDGE) == aecspace.canonical(aecspace.canonical(EDGE))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_member_counts(graphs, n):
    assert len(aecspace.members(graphs, n)) == loopless_symmetric(n)


def test_encoding_of_an_edge():
    # Records look like "((rel E c0 c1), 1)".
    lines = {}
    for line in aecspace.encode_atomic(EDGE).splitlines():
        sentence, bit = line[1:-1].rsplit(", ", 1)
        lines[sentence] = bit
    assert lines["(rel E c0 c1)"] == "1"
    assert lines["(rel E c0 c0)"] == "0"


def test_theory_and_validation(graphs):
    assert "R[B2:0110]" in aecspace.export_theory(graphs)
    assert aecspace.validate_aec(graphs)["passed"]


def test_config_errors(graphs):
    with pytest.raises(aecspace.ConfigError):
        aecspace.config_hash("kappa_plus: 3\n")
    with pytest.raises(aecspace.Error):
        aecspace.config_hash("aec:\n  b: 0\n")
    assert aecspace.config_hash(graphs) == aecspace.config_hash(graphs)


def test_metric():
    assert aecspace.metric([0, 1, 0], [0, 2, 0], 3) == "1:1"
    assert aecspace.metric([0, 1, 0], [0, 1, 0], 3) == "0"
    assert aecspace.ball([0, 1, 0], 0, 3) == "cylinder 0"
    assert aecspace.cauchy_limit([[1, 1]], [[0, 1]], 2) == (True, [0, 1])
    assert aecspace.cauchy_limit([], [[0], [1]], 1) == (False, None)


def test_stage_run(graphs):
    result = aecspace.run(graphs, "check-b")
    assert result["passed"]
    assert set(result["stages"]) >= {"check-b"}
    assert all(c["passed"] for s in result["stages"].values() for c in s["checks"])
