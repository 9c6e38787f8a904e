import sys
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from delpezzo import (  # noqa: E402
    DelPezzoLattice,
    anticanonical_degree,
    decompose_ample,
    describe,
    dp_is_ample,
    dp_is_nef,
    dual_graph,
    girth,
    is_petersen,
    label,
    minus_one_curves,
)
from errors import DelPezzoError  # noqa: E402
from lattice import DivisorClass, self_intersection  # noqa: E402

DP5 = DelPezzoLattice(5)


@pytest.mark.parametrize("degree, count", [(7, 3), (6, 6), (5, 10), (4, 16), (3, 27)])
def test_number_of_lines(degree, count):
    assert len(minus_one_curves(DelPezzoLattice(degree))) == count


@pytest.mark.parametrize("degree", [3, 4, 5, 6, 7])
def test_lines_have_square_minus_one_and_anticanonical_degree_one(degree):
    dp = DelPezzoLattice(degree)
    assert anticanonical_degree(dp) == degree
    for curve in minus_one_curves(dp):
        assert self_intersection(dp.lattice, curve.divisor) == -1
        assert dp.pair(curve.divisor, dp.anticanonical) == 1


def test_quintic_lines_in_standard_order():
    labels = [curve.label for curve in minus_one_curves(DP5)]
    assert labels == [
        "E1", "E2", "E3", "E4",
        "H-E1-E2", "H-E1-E3", "H-E1-E4", "H-E2-E3", "H-E2-E4", "H-E3-E4",
    ]


def test_labels():
    assert label(DivisorClass.of(2, -1, -1, -1, -1, -1)) == "2H-E1-E2-E3-E4-E5"
    assert label(DivisorClass.of(3, -1, -1, -1, -1)) == "3H-E1-E2-E3-E4"
    assert label(DivisorClass.of(0, 0, 0)) == "0"
    assert label(DivisorClass.of(0, 2, -1)) == "2E1-E2"


def test_quintic_dual_graph_is_petersen():
    graph = dual_graph(minus_one_curves(DP5))
    assert graph.number_of_nodes() == 10
    assert graph.number_of_edges() == 15
    assert all(d == 3 for _, d in graph.degree())
    assert girth(graph) == 5
    assert is_petersen(graph)
    assert nx.is_isomorphic(graph, nx.petersen_graph())
    assert describe(graph) == "Petersen graph"


def test_sextic_and_septic_dual_graphs():
    hexagon = dual_graph(minus_one_curves(DelPezzoLattice(6)))
    assert describe(hexagon) == "6-cycle"
    assert girth(hexagon) == 6
    path = dual_graph(minus_one_curves(DelPezzoLattice(7)))
    assert describe(path) == "path on 3 vertices"
    assert path.number_of_edges() == 2
    assert girth(path) is None
    assert not is_petersen(hexagon)


def test_dual_graph_rejects_double_intersections():
    # degree 2 has pairs of lines meeting twice
    with pytest.raises(DelPezzoError, match="multiplicity 2"):
        dual_graph(minus_one_curves(DelPezzoLattice(2)))


def test_degree_range():
    for degree in (0, 8, 9):
        with pytest.raises(DelPezzoError):
            DelPezzoLattice(degree)
    with pytest.raises(DelPezzoError, match="degrees 5 to 7"):
        dp_is_ample(DelPezzoLattice(4), DelPezzoLattice(4).anticanonical)


def test_ampleness_examples():
    minus_k = DP5.anticanonical
    h = DP5.hyperplane()
    assert dp_is_ample(DP5, minus_k)
    assert not dp_is_ample(DP5, h - DP5.exceptional(1) - DP5.exceptional(2))
    assert dp_is_ample(DP5, minus_k + h)
    assert dp_is_nef(DP5, h)
    assert not dp_is_ample(DP5, h)


@pytest.mark.parametrize(
    "anticanonical_multiple, extra_h, a",
    [(2, 0, 2), (1, 1, 1), (3, 1, 3)],
)
def test_decompose_ample_examples(anticanonical_multiple, extra_h, a):
    divisor = anticanonical_multiple * DP5.anticanonical + extra_h * DP5.hyperplane()
    decomposition = decompose_ample(DP5, divisor)
    assert decomposition.a == a
    assert decomposition.residual == extra_h * DP5.hyperplane()
    assert decomposition.contracted.label == "E1"


def test_decompose_rejects_non_ample():
    with pytest.raises(DelPezzoError, match="not ample"):
        decompose_ample(DP5, DP5.hyperplane())


def _nef_generators(dp):
    h = dp.hyperplane()
    return [h] + [h - dp.exceptional(i) for i in range(1, dp.points + 1)]


@pytest.mark.property_based
@given(
    st.sampled_from([5, 6, 7]),
    st.integers(1, 5),
    st.lists(st.integers(0, 4), min_size=5, max_size=5),
)
@settings(max_examples=200, deadline=None)
def test_random_ample_decompositions(degree, multiple, weights):
    dp = DelPezzoLattice(degree)
    divisor = multiple * dp.anticanonical
    for weight, generator in zip(weights, _nef_generators(dp)):
        divisor = divisor + weight * generator
    assert dp_is_ample(dp, divisor)

    decomposition = decompose_ample(dp, divisor)
    assert decomposition.a >= multiple >= 1
    assert dp_is_nef(dp, decomposition.residual)
    assert dp.pair(decomposition.residual, decomposition.contracted.divisor) == 0
    assert decomposition.a * dp.anticanonical + decomposition.residual == divisor
    for curve in minus_one_curves(dp):
        assert dp.pair(decomposition.residual, curve.divisor) >= 0
