"""Decide H^1(X, Omega^1 (x) B) = 0 for a polarized K3 lattice, with a citation trail.

Each decision step is a rule with a stable id. A Verdict lists the rules that
fired together with the witness data that made them fire, so a report can show
exactly which inequality or fiber type settled the answer.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from errors import BottEngineError, FibrationError, LatticeError
from fibration import BAD_FIBER_BY_DEGREE, SINGULAR_SCHEME_DEGREE, TYPE_II, FibrationData, validate_fibration
from lattice import DivisorClass, self_intersection
from positivity import PolarizedLattice, find_low_degree_elliptic, saint_donat_basepoint_free

logger = logging.getLogger(__name__)

# Pencils of degree above this do not obstruct the high-degree vanishing
LOW_DEGREE_BOUND = 4
HIGH_DEGREE_THRESHOLD = 74
RIEMANN_ROCH_THRESHOLD = 20
FANO_WINDOW = (20, 72)
PROKHOROV_BOUND = 72
UNIGONAL_THRESHOLD = 40
PENCIL_THRESHOLDS = {2: 92, 3: 140, 4: 194}
# L = B - 21E must reach these squares for the scroll argument
SCROLL_BOUNDS = {2: 8, 3: 14, 4: 26}
RESIDUAL_FIBER_MULTIPLE = 21
DEGREE_62_GRAM = ((2, 5), (5, 10))


class VerdictStatus(str, Enum):
    VANISHES = "Vanishes"
    FAILS = "Fails"
    UNDETERMINED = "Undetermined"
    NEEDS_FIBER_DATA = "NeedsFiberData"


@dataclass(frozen=True)
class Rule:
    rule_id: str
    citation: str


_RULE_LIST = [
    Rule("riemann-roch",
         "Riemann-Roch on a K3: chi(X, Omega^1 (x) B) = B^2 - 20, so B^2 < 20 forces H^1(X, Omega^1 (x) B) != 0"),
    Rule("rank-one-vanishing",
         "Picard number one with generator of degree 20 or at least 24: Bott vanishing holds for every ample line bundle"),
    Rule("rank-one-degree-22",
         "every polarized K3 surface of degree 22 has H^1(X, Omega^1 (x) B) != 0"),
    Rule("high-degree",
         "B^2 >= 74 and no curve E with E^2 = 0 and 1 <= B.E <= 4: H^1(X, Omega^1 (x) B) = 0"),
    Rule("fano-window",
         "20 <= B^2 <= 72 with no curve E with E^2 = 0 and 1 <= B.E <= 4: H^1(X, Omega^1 (x) B) != 0 iff (X, B) is an "
         "anticanonical divisor in a Fano 3-fold with at most isolated canonical Gorenstein singularities; "
         "Prokhorov: (-K_Y)^3 <= 72"),
    Rule("sextic-double-plane",
         "degree-2 K3 of Picard number one with B = 6A (B^2 = 72) lies in the weighted projective space P(1,1,1,3), "
         "so H^1(X, Omega^1 (x) B) != 0"),
    Rule("degree-62-section",
         "lattice [[2,5],[5,10]] with primitive B of degree 62 represents no isotropic class, yet H^1(X, Omega^1 (x) B) != 0 "
         "for such K3 surfaces in a Fano 3-fold with (-K_Y)^3 = 62"),
    Rule("unigonal-low-degree",
         "unigonal (B.E = 1) with B^2 <= 38: H^1(X, Omega^1 (x) B) != 0"),
    Rule("unigonal-cusp",
         "unigonal pencil with a fiber of type II (cuspidal cubic): H^1(X, Omega^1 (x) B) != 0 no matter how big B^2 is"),
    Rule("unigonal-vanishing",
         "unigonal with B^2 >= 40 and no fiber of type II: H^1(X, Omega^1 (x) B) = 0"),
    Rule("bad-fiber",
         "pencil of degree 2 with a fiber of type III, or of degree 3 with a fiber of type IV: "
         "H^1(X, Omega^1 (x) B) != 0"),
    Rule("pencil-vanishing",
         "pencil of degree r with B^2 >= 92, 140, 194 for r = 2, 3, 4 and no fiber of type III (r = 2) or IV (r = 3): "
         "H^1(X, Omega^1 (x) B) = 0"),
    Rule("pencil-open",
         "pencil of degree r in 2..4 below its vanishing threshold and without a blocking fiber: not decided"),
    Rule("pencil-needs-fibers",
         "the answer on this pencil depends on its singular fiber types; supply fibration data and re-run"),
    Rule("multiples",
         "B basepoint free and H^1(X, Omega^1 (x) B) = 0 imply H^1(X, Omega^1 (x) jB) = 0 for all j >= 1"),
]

RULES: Dict[str, Rule] = {rule.rule_id: rule for rule in _RULE_LIST}


def rule_registry() -> List[Tuple[str, str]]:
    """(rule_id, citation) pairs for every implemented rule"""
    return [(rule.rule_id, rule.citation) for rule in _RULE_LIST]


@dataclass
class Reason:
    rule_id: str
    citation: str
    witness: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {"rule_id": self.rule_id, "citation": self.citation, "witness": dict(self.witness)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Reason":
        return cls(data["rule_id"], data["citation"], dict(data.get("witness") or {}))


def _reason(rule_id: str, **witness: Any) -> Reason:
    return Reason(rule_id, RULES[rule_id].citation, witness)


@dataclass
class PencilOutcome:
    """Verdict restricted to one low-degree elliptic pencil"""

    fiber_class: DivisorClass
    degree: int
    status: VerdictStatus
    reason: Reason
    fibers: Optional[str] = None


@dataclass
class Verdict:
    status: VerdictStatus
    reasons: List[Reason]
    full_bott_vanishing: bool = False
    pencils: List[PencilOutcome] = field(default_factory=list)

    def __post_init__(self):
        if not self.reasons:
            raise BottEngineError(f"verdict {self.status.value} carries no reason")

    @property
    def rule_ids(self) -> List[str]:
        return [reason.rule_id for reason in self.reasons]


def _check_even(b_squared: int) -> None:
    if b_squared % 2:
        raise LatticeError(f"square of a class on a K3 is even, got {b_squared}")


def euler_char_line_bundle(b_squared: int) -> int:
    """chi(X, B) = 2 + B^2/2, which is h^0(B) for B nef and big"""
    _check_even(b_squared)
    return 2 + b_squared // 2


def euler_char_omega_twist(b_squared: int) -> int:
    """chi(X, Omega^1 (x) B) = B^2 - 20"""
    _check_even(b_squared)
    return b_squared - 20


def _fano_window_reason(b_squared: int) -> Reason:
    return _reason(
        "fano-window",
        B_squared=b_squared,
        window=list(FANO_WINDOW),
        prokhorov_bound=PROKHOROV_BOUND,
    )


def rank_one_verdict(degree_2a: int, multiple_k: int) -> Verdict:
    """Verdict for B = kA where A generates a Picard lattice of rank one with A^2 = 2a"""
    if degree_2a <= 0:
        raise LatticeError(f"generator degree must be positive, got {degree_2a}")
    _check_even(degree_2a)
    if multiple_k < 1:
        raise LatticeError(f"multiple must be at least 1, got {multiple_k}")

    b = multiple_k * multiple_k * degree_2a
    full_range = degree_2a == 20 or degree_2a >= 24

    if multiple_k == 1:
        if degree_2a < RIEMANN_ROCH_THRESHOLD:
            return Verdict(VerdictStatus.FAILS, [_reason("riemann-roch", B_squared=b, chi=b - 20)])
        if degree_2a == 22:
            return Verdict(VerdictStatus.FAILS, [_reason("rank-one-degree-22", degree=22)])
        return Verdict(
            VerdictStatus.VANISHES,
            [_reason("rank-one-vanishing", degree=degree_2a, multiple=1)],
            full_bott_vanishing=True,
        )

    if full_range:
        return Verdict(
            VerdictStatus.VANISHES,
            [_reason("rank-one-vanishing", degree=degree_2a, multiple=multiple_k)],
            full_bott_vanishing=True,
        )
    if b >= HIGH_DEGREE_THRESHOLD:
        return Verdict(VerdictStatus.VANISHES, [_reason("high-degree", B_squared=b, isotropic_classes=0)])
    if b < RIEMANN_ROCH_THRESHOLD:
        return Verdict(VerdictStatus.FAILS, [_reason("riemann-roch", B_squared=b, chi=b - 20)])
    if (degree_2a, multiple_k) == (2, 6):
        return Verdict(VerdictStatus.FAILS, [_reason("sextic-double-plane", degree=2, multiple=6, B_squared=72)])
    return Verdict(VerdictStatus.UNDETERMINED, [_fano_window_reason(b)])


def _pencil_outcome(polarized: PolarizedLattice, e: DivisorClass, r: int,
                    data: Optional[FibrationData]) -> PencilOutcome:
    b = polarized.degree
    fibers = data.describe() if data else None

    def outcome(status: VerdictStatus, rule_id: str, **witness: Any) -> PencilOutcome:
        witness = {"fiber_class": e.to_list(), "r": r, **witness}
        return PencilOutcome(e, r, status, _reason(rule_id, **witness), fibers)

    if r == 1:
        # h^0(B + 2E) against the conditions imposed by the non-smooth scheme
        sections = euler_char_line_bundle(self_intersection(polarized.lattice, polarized.ample + 2 * e))
        counts = {"sections": sections, "conditions": SINGULAR_SCHEME_DEGREE}
        if b < UNIGONAL_THRESHOLD:
            return outcome(VerdictStatus.FAILS, "unigonal-low-degree", B_squared=b, **counts)
        if data is None:
            return outcome(VerdictStatus.NEEDS_FIBER_DATA, "pencil-needs-fibers", blocking_type="II")
        if data.has(TYPE_II):
            return outcome(VerdictStatus.FAILS, "unigonal-cusp", type_II_fibers=data.count_of(TYPE_II))
        return outcome(VerdictStatus.VANISHES, "unigonal-vanishing", B_squared=b, **counts)

    threshold = PENCIL_THRESHOLDS[r]
    residual = polarized.ample - RESIDUAL_FIBER_MULTIPLE * e
    scroll = {
        "residual_class": residual.to_list(),
        "residual_square": self_intersection(polarized.lattice, residual),
        "scroll_bound": SCROLL_BOUNDS[r],
        "threshold": threshold,
    }
    bad = BAD_FIBER_BY_DEGREE.get(r)

    if bad is not None:
        if data is None:
            return outcome(VerdictStatus.NEEDS_FIBER_DATA, "pencil-needs-fibers", blocking_type=str(bad))
        if data.has(bad):
            return outcome(VerdictStatus.FAILS, "bad-fiber", blocking_type=str(bad), count=data.count_of(bad))
    if b >= threshold:
        return outcome(VerdictStatus.VANISHES, "pencil-vanishing", B_squared=b, **scroll)
    return outcome(VerdictStatus.UNDETERMINED, "pencil-open", B_squared=b, window=list(FANO_WINDOW), **scroll)


def _index_fibrations(polarized: PolarizedLattice, pencils: Sequence[Tuple[DivisorClass, int]],
                      fibrations: Sequence[FibrationData]) -> Dict[DivisorClass, FibrationData]:
    known = {e for e, _ in pencils}
    indexed: Dict[DivisorClass, FibrationData] = {}
    for data in fibrations:
        e = data.fiber_class
        if e not in known:
            raise FibrationError(
                f"fiber class {e} is not a primitive nef isotropic class of degree <= {LOW_DEGREE_BOUND}"
            )
        if e in indexed:
            raise FibrationError(f"fiber class {e} listed twice")
        violations = validate_fibration(polarized, data)
        if violations:
            raise FibrationError(f"invalid fibration data for {e}", violations)
        indexed[e] = data
    return indexed


def aggregate_pencils(outcomes: List[PencilOutcome]) -> VerdictStatus:
    statuses = [o.status for o in outcomes]
    if VerdictStatus.FAILS in statuses:
        return VerdictStatus.FAILS
    if all(s == VerdictStatus.VANISHES for s in statuses):
        return VerdictStatus.VANISHES
    if VerdictStatus.NEEDS_FIBER_DATA in statuses:
        return VerdictStatus.NEEDS_FIBER_DATA
    return VerdictStatus.UNDETERMINED


def bott_verdict(polarized: PolarizedLattice, fibrations: Optional[Sequence[FibrationData]] = None) -> Verdict:
    """Decide whether H^1(X, Omega^1 (x) B) vanishes"""
    b = polarized.degree
    if b < RIEMANN_ROCH_THRESHOLD:
        logger.info(f"B^2 = {b} below {RIEMANN_ROCH_THRESHOLD}: fails by Riemann-Roch")
        return Verdict(VerdictStatus.FAILS, [_reason("riemann-roch", B_squared=b, chi=b - 20)])

    pencils = find_low_degree_elliptic(polarized, LOW_DEGREE_BOUND)
    indexed = _index_fibrations(polarized, pencils, fibrations or [])

    if not pencils:
        if polarized.rank == 1:
            return rank_one_verdict(polarized.lattice.gram[0][0], abs(polarized.ample.coords[0]))
        if b >= HIGH_DEGREE_THRESHOLD:
            return Verdict(VerdictStatus.VANISHES, [_reason("high-degree", B_squared=b, isotropic_classes=0)])
        reasons = [_fano_window_reason(b)]
        if polarized.lattice.gram == DEGREE_62_GRAM and b == 62:
            logger.warning("lattice matches the known degree-62 nonvanishing example")
            reasons.append(_reason("degree-62-section", B_squared=62))
        return Verdict(VerdictStatus.UNDETERMINED, reasons)

    outcomes = [_pencil_outcome(polarized, e, r, indexed.get(e)) for e, r in pencils]
    status = aggregate_pencils(outcomes)
    if status == VerdictStatus.FAILS:
        reasons = [o.reason for o in outcomes if o.status == VerdictStatus.FAILS]
    else:
        reasons = [o.reason for o in outcomes]
    logger.info(f"{len(outcomes)} low-degree pencils, verdict {status.value}")
    return Verdict(status, reasons, pencils=outcomes)


@dataclass
class MultiplesClaim:
    """Vanishing for all positive multiples jB, or no claim"""

    holds: bool
    reason: Optional[Reason] = None
    note: str = ""


def propagate_multiples(polarized: PolarizedLattice, base_vanishes: bool) -> MultiplesClaim:
    if not base_vanishes:
        return MultiplesClaim(False, note="H^1(X, Omega^1 (x) B) is not known to vanish")
    basepoint_free = saint_donat_basepoint_free(polarized)
    if not basepoint_free:
        return MultiplesClaim(False, note=f"B is not basepoint free: E = {basepoint_free.certificate} has B.E = 1")
    return MultiplesClaim(True, _reason("multiples", multiples="j >= 1"))
