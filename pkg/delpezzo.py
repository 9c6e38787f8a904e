"""Cone of curves on del Pezzo surfaces of degree 5 to 7, through their (-1)-curves.

The Picard lattice of the blow-up of P^2 at 9 - d points is diag(1, -1, ..., -1)
in the basis H, E1, ..., E(9-d), with canonical class K = -3H + E1 + ... + E(9-d).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import networkx as nx

from enumeration import EnumerationQuery, enumerate_classes
from errors import DelPezzoError
from lattice import DivisorClass, IntegralLattice, pairing, self_intersection

logger = logging.getLogger(__name__)

# Ampleness is only tested where the lines span the cone of curves and no (-2)-curves occur
CONE_DEGREES = range(5, 8)


@dataclass(frozen=True)
class DelPezzoLattice:
    degree: int

    def __post_init__(self):
        if not 1 <= self.degree <= 7:
            raise DelPezzoError(f"del Pezzo degree must be in [1, 7], got {self.degree}")

    @property
    def points(self) -> int:
        return 9 - self.degree

    @property
    def lattice(self) -> IntegralLattice:
        labels = ["H"] + [f"E{i}" for i in range(1, self.points + 1)]
        return IntegralLattice.diagonal([1] + [-1] * self.points, labels)

    @property
    def canonical(self) -> DivisorClass:
        return DivisorClass((-3,) + (1,) * self.points)

    @property
    def anticanonical(self) -> DivisorClass:
        return -self.canonical

    def hyperplane(self) -> DivisorClass:
        return DivisorClass((1,) + (0,) * self.points)

    def exceptional(self, i: int) -> DivisorClass:
        if not 1 <= i <= self.points:
            raise DelPezzoError(f"E{i} does not exist in degree {self.degree}")
        return DivisorClass(tuple(1 if j == i else 0 for j in range(self.points + 1)))

    def pair(self, v: DivisorClass, w: DivisorClass) -> int:
        return pairing(self.lattice, v, w)


def label(v: DivisorClass) -> str:
    """Name a class in the basis H, E1, E2, ...: '2H-E1-E2', 'E3', 'H'"""
    terms = []
    names = ["H"] + [f"E{i}" for i in range(1, v.dimension)]
    for coefficient, name in zip(v.coords, names):
        if coefficient == 0:
            continue
        sign = "-" if coefficient < 0 else "+"
        magnitude = "" if abs(coefficient) == 1 else str(abs(coefficient))
        terms.append((sign, f"{magnitude}{name}"))
    if not terms:
        return "0"
    text = "".join(f"{sign}{body}" for sign, body in terms)
    return text[1:] if text.startswith("+") else text


@dataclass(frozen=True)
class MinusOneCurve:
    divisor: DivisorClass

    @property
    def label(self) -> str:
        return label(self.divisor)

    def __str__(self) -> str:
        return self.label


def standard_order_key(v: DivisorClass) -> Tuple[int, Tuple[int, ...]]:
    """E1, ..., En first, then H-E1-E2, H-E1-E3, ..., then conics, then cubics"""
    return v.coords[0], tuple(-abs(c) for c in v.coords[1:])


@lru_cache(maxsize=None)
def _curves_of_degree(degree: int) -> Tuple[MinusOneCurve, ...]:
    dp = DelPezzoLattice(degree)
    query = EnumerationQuery(-1, 1, 1, dp.anticanonical)
    found = enumerate_classes(dp.lattice, query)
    found.sort(key=standard_order_key)
    logger.debug("degree %s del Pezzo surface has %s (-1)-curves", degree, len(found))
    return tuple(MinusOneCurve(v) for v in found)


def minus_one_curves(dp: DelPezzoLattice) -> List[MinusOneCurve]:
    """Every class C with C^2 = -1 and C.(-K) = 1, in standard order"""
    return list(_curves_of_degree(dp.degree))


def dual_graph(curves: Sequence[MinusOneCurve]) -> nx.Graph:
    """Vertices are the curves (in the given order), edges join curves meeting in a point"""
    graph = nx.Graph()
    if not curves:
        return graph
    lattice = IntegralLattice.diagonal([1] + [-1] * (curves[0].divisor.dimension - 1))
    for i, curve in enumerate(curves):
        graph.add_node(i, label=curve.label, curve=curve)
    for i in range(len(curves)):
        for j in range(i + 1, len(curves)):
            meet = pairing(lattice, curves[i].divisor, curves[j].divisor)
            if meet not in (0, 1):
                raise DelPezzoError(f"{curves[i]} and {curves[j]} meet with multiplicity {meet}")
            if meet == 1:
                graph.add_edge(i, j)
    return graph


def girth(graph: nx.Graph) -> Optional[int]:
    """Length of a shortest cycle; None for a forest"""
    shortest = nx.girth(graph)
    return None if shortest == float("inf") else int(shortest)


def is_petersen(graph: nx.Graph) -> bool:
    """10 vertices, 3-regular, girth 5: these characterize the Petersen graph"""
    if graph.number_of_nodes() != 10:
        return False
    if any(d != 3 for _, d in graph.degree()):
        return False
    return girth(graph) == 5


def describe(graph: nx.Graph) -> str:
    n = graph.number_of_nodes()
    if is_petersen(graph):
        return "Petersen graph"
    if n >= 3 and nx.is_isomorphic(graph, nx.cycle_graph(n)):
        return f"{n}-cycle"
    if n >= 1 and nx.is_isomorphic(graph, nx.path_graph(n)):
        return f"path on {n} vertices"
    return f"graph with {n} vertices and {graph.number_of_edges()} edges"


def _check_cone_degree(dp: DelPezzoLattice) -> None:
    if dp.degree not in CONE_DEGREES:
        raise DelPezzoError(f"cone tests are supported in degrees 5 to 7, got {dp.degree}")


def _line_degrees(dp: DelPezzoLattice, divisor: DivisorClass) -> List[int]:
    if divisor.dimension != dp.lattice.rank:
        raise DelPezzoError(f"class {divisor} does not live on the degree {dp.degree} surface")
    return [dp.pair(divisor, curve.divisor) for curve in minus_one_curves(dp)]


def dp_is_ample(dp: DelPezzoLattice, divisor: DivisorClass) -> bool:
    """Positive degree on every (-1)-curve"""
    _check_cone_degree(dp)
    return all(d > 0 for d in _line_degrees(dp, divisor))


def dp_is_nef(dp: DelPezzoLattice, divisor: DivisorClass) -> bool:
    _check_cone_degree(dp)
    return all(d >= 0 for d in _line_degrees(dp, divisor))


@dataclass(frozen=True)
class AmpleDecomposition:
    """L = a(-K) + M with M nef and of degree zero on `contracted`"""

    a: int
    residual: DivisorClass
    contracted: MinusOneCurve


def decompose_ample(dp: DelPezzoLattice, divisor: DivisorClass) -> AmpleDecomposition:
    _check_cone_degree(dp)
    curves = minus_one_curves(dp)
    degrees = _line_degrees(dp, divisor)
    a = min(degrees)
    if a <= 0:
        raise DelPezzoError(f"{label(divisor)} is not ample: degree {a} on {curves[degrees.index(a)]}")
    residual = divisor - a * dp.anticanonical
    return AmpleDecomposition(a, residual, curves[degrees.index(a)])


def anticanonical_degree(dp: DelPezzoLattice) -> int:
    """(-K)^2, which equals the degree"""
    return self_intersection(dp.lattice, dp.anticanonical)
