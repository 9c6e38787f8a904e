"""Enumerate divisor classes of fixed square and bounded degree in a hyperbolic lattice.

For a reference class B with B^2 > 0 in a lattice of signature (1, n-1), the
complement B-perp is negative definite, so the classes with v^2 = c and
v.B = d are finite for every d. Per degree the search runs as follows:

* a unimodular change of basis U takes the linear form v -> v.B to
  (g, 0, ..., 0), so v = t0*u0 + K*t with t0 = d/g fixed and t free;
* with N = -K^T G K (positive definite), h = K^T G u0 and s = u0^T G u0,
  the condition v^2 = c becomes (t - z)^T N (t - z) = R with
  z = t0 * N^-1 h and R = t0^2 (s + h^T N^-1 h) - c;
* the integer points on that ellipsoid come from a Fincke-Pohst recursion
  over the exact LDL^T factorization of N.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import List, Optional, Tuple

from sympy import Matrix, Rational

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # sympy < 1.13
    from sympy.core.numbers import igcdex

from config import engine_config
from errors import EnumerationError
from lattice import DivisorClass, IntegralLattice, content, pairing, self_intersection, signature

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnumerationQuery:
    """Classes v with v^2 = square and degree_min <= v.reference <= degree_max"""

    square: int
    degree_min: int
    degree_max: int
    reference: DivisorClass
    primitive_only: bool = False

    def __post_init__(self):
        if self.degree_min > self.degree_max:
            raise EnumerationError(
                f"empty degree window [{self.degree_min}, {self.degree_max}]"
            )


@dataclass(frozen=True)
class _SliceGeometry:
    """Everything about (lattice, B) that does not depend on the degree"""

    step: int                                   # g: v.B ranges over g*Z
    base: Tuple[int, ...]                       # u0, with u0.B = g
    kernel: Tuple[Tuple[int, ...], ...]         # columns of K, a basis of B-perp
    center_unit: Tuple[Rational, ...]           # N^-1 h
    level_unit: Rational                        # s + h^T N^-1 h
    ldl_lower: Tuple[Tuple[Rational, ...], ...]
    ldl_diagonal: Tuple[Rational, ...]


def _floor(r: Rational) -> int:
    return int(r.p // r.q)


def _integers_within(center: Rational, radius_sq: Rational) -> List[int]:
    """All integers x with (x - center)^2 <= radius_sq, exactly"""
    if radius_sq < 0:
        return []
    reach = isqrt(_floor(radius_sq)) + 1
    lo, hi = _floor(center) - reach, _floor(center) + reach + 1
    return [x for x in range(lo, hi + 1) if (x - center) ** 2 <= radius_sq]


def _unimodular_basis(form: Tuple[int, ...]) -> Tuple[int, List[List[int]]]:
    """Return (g, U) with U unimodular (as columns) and form . U = (g, 0, ..., 0), g > 0"""
    n = len(form)
    columns = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    a = list(form)
    for j in range(1, n):
        if a[j] == 0:
            continue
        x, y, g = (int(t) for t in igcdex(a[0], a[j]))
        p, q = a[0] // g, a[j] // g
        first = [x * c0 + y * cj for c0, cj in zip(columns[0], columns[j])]
        other = [-q * c0 + p * cj for c0, cj in zip(columns[0], columns[j])]
        columns[0], columns[j] = first, other
        a[0], a[j] = g, 0
    if a[0] < 0:
        columns[0] = [-c for c in columns[0]]
        a[0] = -a[0]
    return a[0], columns


def _check_query(lattice: IntegralLattice, query: EnumerationQuery) -> int:
    sig = signature(lattice)
    if sig.positives != 1:
        raise EnumerationError(f"enumeration needs signature (1, {lattice.rank - 1}), got {sig}")
    b = self_intersection(lattice, query.reference)
    if b <= 0:
        raise EnumerationError(f"reference class {query.reference} has square {b}, must be positive")
    return b


@lru_cache(maxsize=256)
def _slice_geometry(lattice: IntegralLattice, reference: DivisorClass) -> _SliceGeometry:
    form = lattice.apply(reference)
    step, columns = _unimodular_basis(form)
    base = tuple(columns[0])
    kernel = tuple(tuple(col) for col in columns[1:])
    if not kernel:
        return _SliceGeometry(step, base, (), (), Rational(self_intersection(lattice, DivisorClass(base))), (), ())

    G = Matrix(lattice.gram)
    K = Matrix([list(col) for col in kernel]).T
    u0 = Matrix(list(base))
    N = -(K.T * G * K)
    h = K.T * G * u0
    s = (u0.T * G * u0)[0, 0]
    center = N.LUsolve(h)
    level = Rational(s) + (h.T * center)[0, 0]
    L, D = N.LDLdecomposition()
    m = N.shape[0]
    return _SliceGeometry(
        step=step,
        base=base,
        kernel=kernel,
        center_unit=tuple(Rational(center[i]) for i in range(m)),
        level_unit=Rational(level),
        ldl_lower=tuple(tuple(Rational(L[i, j]) for j in range(m)) for i in range(m)),
        ldl_diagonal=tuple(Rational(D[i, i]) for i in range(m)),
    )


def _ellipsoid_points(geometry: _SliceGeometry, center: Tuple[Rational, ...], radius: Rational) -> List[Tuple[int, ...]]:
    """Integer t with (t - center)^T N (t - center) == radius, via Fincke-Pohst"""
    m = len(center)
    L, D = geometry.ldl_lower, geometry.ldl_diagonal
    found: List[Tuple[int, ...]] = []
    offsets: List[Optional[Rational]] = [None] * m
    chosen: List[int] = [0] * m

    def descend(level: int, remaining: Rational) -> None:
        if level < 0:
            if remaining == 0:
                found.append(tuple(chosen))
            return
        # (L^T q)_level = q_level + sum_{j > level} L[j][level] q_j
        shift = sum((L[j][level] * offsets[j] for j in range(level + 1, m)), Rational(0))
        for x in _integers_within(center[level] - shift, remaining / D[level]):
            q = x - center[level]
            offsets[level] = q
            chosen[level] = x
            descend(level - 1, remaining - D[level] * (q + shift) ** 2)

    descend(m - 1, radius)
    return found


def enumerate_classes(lattice: IntegralLattice, query: EnumerationQuery) -> List[DivisorClass]:
    """All classes with the query's square and degree window, lexicographically sorted"""
    _check_query(lattice, query)
    geometry = _slice_geometry(lattice, query.reference)
    log_every = max(1, engine_config.enumeration_log_every)
    results: List[DivisorClass] = []

    for count, degree in enumerate(range(query.degree_min, query.degree_max + 1)):
        if count and count % log_every == 0:
            logger.debug("enumeration at degree %s, %s classes so far", degree, len(results))
        if degree % geometry.step:
            continue
        t0 = degree // geometry.step
        anchor = [t0 * c for c in geometry.base]

        if not geometry.kernel:
            if t0 * t0 * geometry.level_unit == query.square:
                results.append(DivisorClass(tuple(anchor)))
            continue

        radius = t0 * t0 * geometry.level_unit - query.square
        if radius < 0:
            continue
        center = tuple(t0 * z for z in geometry.center_unit)
        for t in _ellipsoid_points(geometry, center, radius):
            coords = list(anchor)
            for coefficient, column in zip(t, geometry.kernel):
                if coefficient:
                    coords = [c + coefficient * k for c, k in zip(coords, column)]
            results.append(DivisorClass(tuple(coords)))

    if query.primitive_only:
        results = [v for v in results if content(v) == 1]
    results.sort(key=lambda v: v.coords)
    logger.debug(
        "enumerated %s classes of square %s, degrees [%s, %s]",
        len(results), query.square, query.degree_min, query.degree_max,
    )
    return results


def provable_box_bound(lattice: IntegralLattice, query: EnumerationQuery) -> int:
    """Coordinate bound every answer obeys, from the positive definite majorant.

    M = 2 (GB)(GB)^T - B^2 G satisfies v^T M v = 2 (v.B)^2 - B^2 v^2, which is
    at most T = max over the window of 2 d^2 - B^2 c; hence
    |v_i| <= sqrt(T * (M^-1)_ii).
    """
    b = _check_query(lattice, query)
    target = max(2 * d * d - b * query.square for d in (query.degree_min, query.degree_max))
    if target < 0:
        return 0
    form = Matrix(lattice.apply(query.reference))
    majorant = 2 * form * form.T - b * Matrix(lattice.gram)
    inverse = majorant.inv()
    return max(isqrt(_floor(Rational(target) * inverse[i, i])) for i in range(lattice.rank))


def brute_force_classes(lattice: IntegralLattice, query: EnumerationQuery, box_bound: int) -> List[DivisorClass]:
    """Exhaustive coordinate search; the testing oracle for enumerate_classes"""
    needed = provable_box_bound(lattice, query)
    if box_bound < needed:
        raise EnumerationError(f"box bound {box_bound} is below the provable bound {needed}")
    results = []
    for coords in itertools.product(range(-box_bound, box_bound + 1), repeat=lattice.rank):
        v = DivisorClass(coords)
        if self_intersection(lattice, v) != query.square:
            continue
        if not query.degree_min <= pairing(lattice, v, query.reference) <= query.degree_max:
            continue
        if query.primitive_only and content(v) != 1:
            continue
        results.append(v)
    results.sort(key=lambda v: v.coords)
    return results
