from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from config import engine_config
from errors import BottEngineError, FibrationError, LatticeError, PolarizationError, SpecDocumentError
from fibration import FibrationData, KodairaType
from lattice import (
    DivisorClass,
    IntegralLattice,
    determinant,
    is_primitive,
    self_intersection,
    signature,
    validate_k3_lattice,
)
from positivity import (
    PolarizedLattice,
    find_low_degree_elliptic,
    is_nef,
    saint_donat_basepoint_free,
    saint_donat_very_ample,
)
from verdict import DEGREE_62_GRAM, VerdictStatus, bott_verdict, euler_char_line_bundle, euler_char_omega_twist, propagate_multiples

logger = logging.getLogger(__name__)

EXIT_CODES = {
    VerdictStatus.VANISHES: 0,
    VerdictStatus.FAILS: 1,
    VerdictStatus.UNDETERMINED: 2,
    VerdictStatus.NEEDS_FIBER_DATA: 2,
}
EXIT_INPUT_ERROR = 64
MAX_I_N = 9


def exit_code_for(status: VerdictStatus) -> int:
    return EXIT_CODES[status]


@dataclass
class SurfaceSpec:
    """One surface description document"""

    lattice: IntegralLattice
    ample: DivisorClass
    line_bundle: DivisorClass
    fibrations: List[FibrationData] = field(default_factory=list)
    rank_one: Optional[Dict[str, int]] = None
    name: str = ""
    description: str = ""
    expected_status: Optional[VerdictStatus] = None


def _int_list(value: Any, name: str) -> List[int]:
    if not isinstance(value, list) or not value:
        raise SpecDocumentError(name, "expected a non-empty list of integers")
    for item in value:
        if isinstance(item, bool) or not isinstance(item, int):
            raise SpecDocumentError(name, f"expected integers, got {item!r}")
    return value


def _class(value: Any, name: str, rank: int) -> DivisorClass:
    coords = _int_list(value, name)
    if len(coords) != rank:
        raise SpecDocumentError(name, f"expected {rank} coordinates, got {len(coords)}")
    return DivisorClass(tuple(coords))


def _positive_int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise SpecDocumentError(name, f"expected a positive integer, got {value!r}")
    return value


def _parse_fibers(entries: Any, name: str) -> List:
    if not isinstance(entries, list):
        raise SpecDocumentError(name, "expected a list of {type, count} objects")
    fibers = []
    for j, entry in enumerate(entries):
        where = f"{name}[{j}]"
        if not isinstance(entry, dict) or "type" not in entry:
            raise SpecDocumentError(where, "expected an object with 'type' and 'count'")
        try:
            kind = KodairaType.parse(entry["type"])
        except FibrationError as e:
            raise SpecDocumentError(f"{where}.type", str(e))
        if kind.family == "I" and kind.n > MAX_I_N:
            raise SpecDocumentError(f"{where}.type", f"I_n is limited to n <= {MAX_I_N}")
        fibers.append((kind, _positive_int(entry.get("count"), f"{where}.count")))
    return fibers


def parse_surface_spec(data: Any) -> SurfaceSpec:
    """Build a SurfaceSpec from a decoded JSON document"""
    if not isinstance(data, dict):
        raise SpecDocumentError("document", "expected a JSON object")

    has_lattice = "gram" in data or "ample" in data
    if has_lattice == ("rank_one" in data):
        raise SpecDocumentError("document", "give exactly one of gram+ample or rank_one")

    rank_one = None
    if has_lattice:
        if "gram" not in data or "ample" not in data:
            raise SpecDocumentError("gram" if "gram" not in data else "ample", "missing")
        rows = data["gram"]
        if not isinstance(rows, list) or not rows:
            raise SpecDocumentError("gram", "expected a non-empty list of rows")
        rows = [_int_list(row, f"gram[{i}]") for i, row in enumerate(rows)]
        labels = data.get("basis_labels")
        if labels is not None:
            if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
                raise SpecDocumentError("basis_labels", "expected a list of strings")
            if len(labels) != len(rows):
                raise SpecDocumentError("basis_labels", f"expected {len(rows)} labels, got {len(labels)}")
        try:
            lattice = IntegralLattice.from_rows(rows, labels)
        except LatticeError as e:
            raise SpecDocumentError("gram", str(e))
        ample = _class(data["ample"], "ample", lattice.rank)
        line_bundle = ample
    else:
        block = data["rank_one"]
        if not isinstance(block, dict):
            raise SpecDocumentError("rank_one", "expected {degree, multiple}")
        degree = _positive_int(block.get("degree"), "rank_one.degree")
        if degree % 2:
            raise SpecDocumentError("rank_one.degree", f"degree must be even, got {degree}")
        multiple = _positive_int(block.get("multiple", 1), "rank_one.multiple")
        rank_one = {"degree": degree, "multiple": multiple}
        lattice = IntegralLattice.from_rows([[degree]], ["A"])
        ample = DivisorClass.of(1)
        line_bundle = DivisorClass.of(multiple)

    if data.get("line_bundle") is not None:
        if rank_one is not None:
            raise SpecDocumentError("line_bundle", "use rank_one.multiple for rank-one documents")
        line_bundle = _class(data["line_bundle"], "line_bundle", lattice.rank)

    fibrations = []
    raw_fibrations = data.get("fibrations") or []
    if not isinstance(raw_fibrations, list):
        raise SpecDocumentError("fibrations", "expected a list")
    for i, entry in enumerate(raw_fibrations):
        where = f"fibrations[{i}]"
        if not isinstance(entry, dict):
            raise SpecDocumentError(where, "expected an object")
        fiber_class = _class(entry.get("fiber_class"), f"{where}.fiber_class", lattice.rank)
        fibers = _parse_fibers(entry.get("singular_fibers", []), f"{where}.singular_fibers")
        fibrations.append(FibrationData(fiber_class, tuple(fibers)))

    expected = data.get("expected_status")
    if expected is not None:
        try:
            expected = VerdictStatus(expected)
        except ValueError:
            raise SpecDocumentError("expected_status", f"unknown status {expected!r}")

    return SurfaceSpec(
        lattice=lattice,
        ample=ample,
        line_bundle=line_bundle,
        fibrations=fibrations,
        rank_one=rank_one,
        name=str(data.get("name", "")),
        description=str(data.get("description", "")),
        expected_status=expected,
    )


def load_surface_spec(path: Path) -> SurfaceSpec:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecDocumentError("document", f"cannot read {path}: {e.strerror or e}")
    except UnicodeDecodeError as e:
        raise SpecDocumentError("document", f"{path} is not UTF-8 text (byte {e.start})")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecDocumentError("document", f"invalid JSON at line {e.lineno}: {e.msg}")
    spec = parse_surface_spec(data)
    if not spec.name:
        spec.name = Path(path).stem
    return spec


@dataclass
class Report:
    name: str
    status: str
    exit_code: int
    reasons: List[Dict[str, Any]]
    full_bott_vanishing: bool
    computed: Dict[str, Any]
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Report":
        return cls(
            name=data["name"],
            status=data["status"],
            exit_code=data["exit_code"],
            reasons=list(data["reasons"]),
            full_bott_vanishing=data["full_bott_vanishing"],
            computed=dict(data["computed"]),
            warnings=list(data.get("warnings", [])),
        )


def _polarize(spec: SurfaceSpec) -> PolarizedLattice:
    violations = validate_k3_lattice(spec.lattice)
    if violations:
        raise PolarizationError("not a K3 Picard lattice", violations)
    chamber = PolarizedLattice(spec.lattice, spec.ample)
    if spec.line_bundle == spec.ample:
        return chamber
    nef = is_nef(chamber, spec.line_bundle)
    if not nef:
        raise PolarizationError(
            f"line bundle {spec.line_bundle} is not nef in the chamber of {spec.ample}",
            [f"{nef.reason} certificate {nef.certificate}"],
        )
    return PolarizedLattice(spec.lattice, spec.line_bundle)


def _known_example_warnings(spec: SurfaceSpec, b_squared: int) -> List[str]:
    warnings = []
    if spec.lattice.gram == DEGREE_62_GRAM and b_squared == 62:
        warnings.append("lattice matches the degree-62 example with no isotropic class")
    if spec.rank_one == {"degree": 2, "multiple": 6}:
        warnings.append("matches the degree-72 example B = 6A on a degree-2 K3")
    return warnings


def analyze_surface(spec: SurfaceSpec) -> Report:
    """Run every check on one document and collect the result as a Report"""
    polarized = _polarize(spec)
    lattice, b = spec.lattice, polarized.degree
    warnings = _known_example_warnings(spec, b)
    if not is_primitive(lattice, polarized.ample):
        warnings.append(f"line bundle {polarized.ample} is not primitive")

    verdict = bott_verdict(polarized, spec.fibrations)
    multiples = propagate_multiples(polarized, verdict.status == VerdictStatus.VANISHES)
    sig = signature(lattice)
    very_ample = bool(saint_donat_very_ample(polarized)) if b >= 4 else None

    computed = {
        "B_squared": b,
        "rank": lattice.rank,
        "signature": [sig.positives, sig.negatives],
        "determinant": determinant(lattice),
        "primitive": is_primitive(lattice, polarized.ample),
        "pencils": [
            {"fiber_class": e.to_list(), "r": r}
            for e, r in find_low_degree_elliptic(polarized, engine_config.max_fiber_degree)
        ],
        "pencil_outcomes": [
            {"fiber_class": o.fiber_class.to_list(), "r": o.degree, "status": o.status.value,
             "rule_id": o.reason.rule_id, "fibers": o.fibers}
            for o in verdict.pencils
        ],
        "euler_characteristic": {
            "line_bundle": euler_char_line_bundle(b),
            "omega_twist": euler_char_omega_twist(b),
        },
        "basepoint_free": bool(saint_donat_basepoint_free(polarized)),
        "very_ample": very_ample,
        "multiples": {
            "holds": multiples.holds,
            "rule_id": multiples.reason.rule_id if multiples.reason else None,
            "note": multiples.note,
        },
    }
    for warning in warnings:
        logger.warning(warning)
    return Report(
        name=spec.name,
        status=verdict.status.value,
        exit_code=exit_code_for(verdict.status),
        reasons=[reason.to_dict() for reason in verdict.reasons],
        full_bott_vanishing=verdict.full_bott_vanishing,
        computed=computed,
        warnings=warnings,
    )


def _render_text(report: Report) -> str:
    c = report.computed
    lines = [
        f"Surface: {report.name or '(unnamed)'}",
        f"Status: {report.status} (exit {report.exit_code})",
        f"B^2 = {c['B_squared']}, rank {c['rank']}, signature ({c['signature'][0]}, {c['signature'][1]}), "
        f"det {c['determinant']}",
        f"chi(B) = {c['euler_characteristic']['line_bundle']}, "
        f"chi(Omega^1 (x) B) = {c['euler_characteristic']['omega_twist']}",
    ]
    if c["pencils"]:
        lines.append("Low-degree elliptic pencils:")
        lines.extend(f"  E = {p['fiber_class']}  r = {p['r']}" for p in c["pencils"])
    else:
        lines.append("Low-degree elliptic pencils: none")
    lines.append("Reasons:")
    for reason in report.reasons:
        lines.append(f"  [{reason['rule_id']}] {reason['citation']}")
        if reason["witness"]:
            lines.append("      " + ", ".join(f"{k}={v}" for k, v in sorted(reason["witness"].items())))
    if report.full_bott_vanishing:
        lines.append("Bott vanishing holds for every ample line bundle")
    if c["multiples"]["holds"]:
        lines.append("Multiples: vanishing for all jB, j >= 1")
    for warning in report.warnings:
        lines.append(f"Warning: {warning}")
    return "\n".join(lines)


def render_report(report: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True)
    if fmt == "text":
        return _render_text(report)
    raise BottEngineError(f"unknown report format {fmt!r}")


def parse_report(text: str) -> Report:
    """Inverse of render_report(report, 'json')"""
    return Report.from_dict(json.loads(text))
