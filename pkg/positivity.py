"""Chamber validation, nefness and the Saint-Donat criteria for a polarized lattice."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from enumeration import EnumerationQuery, enumerate_classes
from errors import PolarizationError
from lattice import (
    DivisorClass,
    IntegralLattice,
    divide_exact,
    is_primitive,
    pairing,
    self_intersection,
    signature,
    validate_k3_lattice,
)

logger = logging.getLogger(__name__)


def _first_nonzero_positive(v: DivisorClass) -> bool:
    return next(c for c in v.coords if c) > 0


def validate_polarization(lattice: IntegralLattice, ample: DivisorClass) -> List[str]:
    """Violations keeping `ample` out of an open chamber of the positive cone; empty when ok"""
    if ample.dimension != lattice.rank:
        return [f"ample class {ample} has {ample.dimension} coordinates, lattice rank is {lattice.rank}"]
    b = self_intersection(lattice, ample)
    if b <= 0:
        return [f"B^2 = {b} is not positive"]
    sig = signature(lattice)
    if not sig.is_hyperbolic():
        return [f"signature {sig}, expected (1, {lattice.rank - 1})"]

    violations = []
    for square, kind in ((-2, "(-2)-class"), (0, "isotropic class")):
        found = enumerate_classes(lattice, EnumerationQuery(square, 0, 0, ample))
        for v in found:
            # C and -C are the same wall
            if v.is_zero() or not _first_nonzero_positive(v):
                continue
            violations.append(f"{kind} {v} (square {square}) is orthogonal to B")
    return violations


class EffectivityConvention:
    """A (-2)-class or nonzero isotropic class is taken to be effective iff its degree against B is positive"""

    @staticmethod
    def is_effective(polarized: "PolarizedLattice", v: DivisorClass) -> bool:
        square = self_intersection(polarized.lattice, v)
        if square not in (-2, 0) or v.is_zero():
            return False
        return polarized.degree_of(v) > 0


@dataclass(frozen=True)
class PolarizedLattice:
    """A K3 Picard lattice together with an ample class B in an open chamber"""

    lattice: IntegralLattice
    ample: DivisorClass

    def __post_init__(self):
        violations = validate_k3_lattice(self.lattice)
        if not violations:
            violations = validate_polarization(self.lattice, self.ample)
        if violations:
            raise PolarizationError(f"invalid polarization B = {self.ample}", violations)
        if not is_primitive(self.lattice, self.ample):
            logger.warning(f"ample class {self.ample} is not primitive")

    @property
    def degree(self) -> int:
        """B^2"""
        return self_intersection(self.lattice, self.ample)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def degree_of(self, v: DivisorClass) -> int:
        return pairing(self.lattice, v, self.ample)


@dataclass(frozen=True)
class PositivityResult:
    holds: bool
    certificate: Optional[DivisorClass] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


def nef_search_bound(polarized: PolarizedLattice, d: DivisorClass) -> int:
    """Largest degree C.B a (-2)-class C with D.C < 0 can have, for D^2 >= 0 and D.B > 0.

    Projecting C to the hyperbolic plane <B, D> loses only negative square, so
    the projection has square >= -2; with C.B = c > 0 and D.C <= -1 that gives
    c <= (delta^2 - B^2 D^2) / delta where delta = D.B.
    """
    delta = polarized.degree_of(d)
    square = self_intersection(polarized.lattice, d)
    if delta <= 0 or square < 0:
        raise PolarizationError(f"nef search bound needs D.B > 0 and D^2 >= 0, got {delta} and {square}")
    return (delta * delta - polarized.degree * square) // delta


def is_nef(polarized: PolarizedLattice, d: DivisorClass) -> PositivityResult:
    """D.C >= 0 for every effective (-2)-class and isotropic class, with D^2 >= 0.

    The certificate of a failure depends on the reason: the violating wall C
    for "wall", the ample class B for "negative-degree" (B is effective and
    D.B < 0), and D itself for "negative-square", where no effective class
    witnesses the failure because D lies outside the closed positive cone.
    """
    delta = polarized.degree_of(d)
    if delta < 0:
        return PositivityResult(False, polarized.ample, "negative-degree")
    if d.is_zero():
        return PositivityResult(True, reason="zero")
    square = self_intersection(polarized.lattice, d)
    if square < 0:
        return PositivityResult(False, d, "negative-square")
    if polarized.degree * square == delta * delta:
        # equality in the reverse Cauchy-Schwarz inequality: D is a rational multiple of B
        return PositivityResult(True, reason="multiple-of-ample")

    # Isotropic classes need no search: D and any effective e lie in the same closed positive cone.
    bound = nef_search_bound(polarized, d)
    if bound >= 1:
        walls = enumerate_classes(polarized.lattice, EnumerationQuery(-2, 1, bound, polarized.ample))
        for wall in walls:
            if not EffectivityConvention.is_effective(polarized, wall):
                continue
            if pairing(polarized.lattice, d, wall) < 0:
                logger.debug(f"{d} is negative on the (-2)-class {wall}")
                return PositivityResult(False, wall, "wall")
    return PositivityResult(True, reason="no-wall-in-window")


def find_low_degree_elliptic(polarized: PolarizedLattice, max_degree: int = 4) -> List[Tuple[DivisorClass, int]]:
    """Fiber classes of elliptic pencils: primitive nef isotropic E with 1 <= E.B <= max_degree"""
    if max_degree < 1:
        return []
    query = EnumerationQuery(0, 1, max_degree, polarized.ample, primitive_only=True)
    pencils = []
    for e in enumerate_classes(polarized.lattice, query):
        if EffectivityConvention.is_effective(polarized, e) and is_nef(polarized, e):
            pencils.append((e, polarized.degree_of(e)))
    pencils.sort(key=lambda item: (item[1], item[0].coords))
    logger.info(f"found {len(pencils)} elliptic pencils of degree <= {max_degree} against B = {polarized.ample}")
    return pencils


def saint_donat_basepoint_free(polarized: PolarizedLattice) -> PositivityResult:
    """|B| is basepoint free unless some elliptic pencil has E.B = 1"""
    pencils = find_low_degree_elliptic(polarized, 1)
    if pencils:
        return PositivityResult(False, pencils[0][0], "unigonal")
    return PositivityResult(True, reason="no-degree-one-pencil")


def saint_donat_very_ample(polarized: PolarizedLattice) -> PositivityResult:
    """Very ampleness of B, given that B is already in an open chamber"""
    b = polarized.degree
    if b < 4:
        raise PolarizationError(f"very ampleness needs B^2 >= 4, got {b}")
    pencils = find_low_degree_elliptic(polarized, 2)
    if pencils:
        e, r = pencils[0]
        return PositivityResult(False, e, "unigonal" if r == 1 else "hyperelliptic")
    # B = 2E with E^2 = 2 forces B^2 = 8, so this never fires for B^2 >= 10
    half = divide_exact(polarized.ample, 2)
    if half is not None and self_intersection(polarized.lattice, half) == 2:
        return PositivityResult(False, half, "double-of-square-two")
    return PositivityResult(True, reason="saint-donat")


def saint_donat_very_ample_unpolarized(lattice: IntegralLattice, ample: DivisorClass) -> PositivityResult:
    """Very ampleness for a raw (lattice, B) pair, including the orthogonal (-2)-class case"""
    b = self_intersection(lattice, ample)
    if b < 4:
        raise PolarizationError(f"very ampleness needs B^2 >= 4, got {b}")
    violations = validate_k3_lattice(lattice)
    if violations:
        raise PolarizationError("not a K3 Picard lattice", violations)
    walls = enumerate_classes(lattice, EnumerationQuery(-2, 0, 0, ample))
    if walls:
        certificate = next(c for c in walls if _first_nonzero_positive(c))
        return PositivityResult(False, certificate, "orthogonal-minus-two")
    return saint_donat_very_ample(PolarizedLattice(lattice, ample))
