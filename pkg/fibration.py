import logging
import re
from dataclasses import dataclass
from typing import Dict, List, Tuple

from errors import FibrationError
from lattice import DivisorClass, is_primitive, self_intersection
from positivity import PolarizedLattice, is_nef

logger = logging.getLogger(__name__)

# Degree of the non-smooth scheme of an elliptic fibration over P^1
SINGULAR_SCHEME_DEGREE = 24

_I_N = re.compile(r"^I_?(\d+)$")


@dataclass(frozen=True)
class KodairaType:
    """Singular fiber type: I_n (cycle of n rational curves), II, III or IV"""

    family: str
    n: int = 0

    def __post_init__(self):
        if self.family == "I":
            if self.n < 1:
                raise FibrationError(f"I_n needs n >= 1, got {self.n}")
        elif self.family in ("II", "III", "IV"):
            if self.n:
                raise FibrationError(f"type {self.family} takes no index")
        else:
            raise FibrationError(f"unknown Kodaira type {self.family!r}")

    @classmethod
    def parse(cls, tag: str) -> "KodairaType":
        """Parse 'I1', 'I_3', 'II', 'III' or 'IV'"""
        text = str(tag).strip().upper()
        if text in ("II", "III", "IV"):
            return cls(text)
        match = _I_N.match(text)
        if not match:
            raise FibrationError(f"unknown Kodaira type {tag!r}")
        return cls("I", int(match.group(1)))

    @property
    def s_degree(self) -> int:
        """Contribution of one fiber of this type to the degree-24 non-smooth scheme"""
        return {"I": self.n, "II": 2, "III": 3, "IV": 4}[self.family]

    @property
    def component_count(self) -> int:
        return {"I": self.n, "II": 1, "III": 2, "IV": 3}[self.family]

    def admissible_for(self, r: int) -> bool:
        """Whether a fiber of this type can occur on a pencil of B-degree r"""
        if self.family == "II":
            return True
        if self.family == "III":
            return r >= 2
        if self.family == "IV":
            return r >= 3
        return self.n <= r

    def __str__(self) -> str:
        return f"I{self.n}" if self.family == "I" else self.family


TYPE_II = KodairaType("II")
TYPE_III = KodairaType("III")
TYPE_IV = KodairaType("IV")

# The fiber type that blocks vanishing on a pencil of degree r
BAD_FIBER_BY_DEGREE: Dict[int, KodairaType] = {1: TYPE_II, 2: TYPE_III, 3: TYPE_IV}


@dataclass(frozen=True)
class FibrationData:
    """Fiber class E of an elliptic pencil with its singular fibers as (type, count) pairs"""

    fiber_class: DivisorClass
    singular_fibers: Tuple[Tuple[KodairaType, int], ...] = ()

    def count_of(self, kind: KodairaType) -> int:
        return sum(count for t, count in self.singular_fibers if t == kind)

    def has(self, kind: KodairaType) -> bool:
        return self.count_of(kind) > 0

    @property
    def scheme_degree(self) -> int:
        return sum(count * t.s_degree for t, count in self.singular_fibers)

    def describe(self) -> str:
        return ", ".join(f"{t} x{count}" for t, count in self.singular_fibers) or "no singular fibers"


def validate_fibration(polarized: PolarizedLattice, data: FibrationData) -> List[str]:
    """Violations of the fiber data against the polarization; empty when ok"""
    violations = []
    e = data.fiber_class
    if e.dimension != polarized.rank:
        return [f"fiber class {e} has {e.dimension} coordinates, lattice rank is {polarized.rank}"]
    if e.is_zero():
        return ["fiber class is zero"]

    square = self_intersection(polarized.lattice, e)
    if square != 0:
        violations.append(f"fiber class {e} has square {square}, expected 0")
    if not is_primitive(polarized.lattice, e):
        violations.append(f"fiber class {e} is not primitive")
    r = polarized.degree_of(e)
    if r < 1:
        violations.append(f"fiber class {e} has degree {r} against B, expected >= 1")
    elif square == 0 and not is_nef(polarized, e):
        violations.append(f"fiber class {e} is not nef")

    for kind, count in data.singular_fibers:
        if count < 1:
            violations.append(f"type {kind} listed with count {count}")
        elif r >= 1 and not kind.admissible_for(r):
            violations.append(f"type {kind} is inadmissible for a pencil of degree {r}")
    if data.scheme_degree != SINGULAR_SCHEME_DEGREE:
        violations.append(
            f"singular fibers contribute degree {data.scheme_degree}, expected {SINGULAR_SCHEME_DEGREE}"
        )
    if violations:
        logger.debug(f"fibration data for {e} rejected: {violations}")
    return violations
