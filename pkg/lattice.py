"""Exact integer arithmetic for Picard lattices and divisor classes.

Everything here works over Python integers and sympy rationals; no floating
point value is ever produced, so threshold comparisons downstream stay exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix, Rational

from errors import LatticeError

logger = logging.getLogger(__name__)


def _as_int(value, what: str) -> int:
    # bool is an int subclass; a JSON true must not sneak in as 1
    if isinstance(value, bool) or not isinstance(value, int):
        raise LatticeError(f"{what} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class DivisorClass:
    """Integer coordinate vector in a fixed lattice basis"""

    coords: Tuple[int, ...]

    def __post_init__(self):
        coords = tuple(_as_int(c, "divisor coordinate") for c in self.coords)
        if not coords:
            raise LatticeError("divisor class needs at least one coordinate")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords: int) -> "DivisorClass":
        return cls(tuple(coords))

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def _check_same_length(self, other: "DivisorClass") -> None:
        if other.dimension != self.dimension:
            raise LatticeError(
                f"dimension mismatch: {self.dimension} vs {other.dimension}"
            )

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._check_same_length(other)
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        self._check_same_length(other)
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "DivisorClass":
        k = _as_int(k, "scalar")
        return DivisorClass(tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def to_list(self) -> List[int]:
        return list(self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class LatticeSignature:
    positives: int
    negatives: int

    @property
    def rank(self) -> int:
        return self.positives + self.negatives

    def is_hyperbolic(self) -> bool:
        return self.positives == 1

    def __str__(self) -> str:
        return f"({self.positives}, {self.negatives})"


@dataclass(frozen=True)
class IntegralLattice:
    """Nondegenerate symmetric bilinear form over the integers, given by its Gram matrix"""

    gram: Tuple[Tuple[int, ...], ...]
    basis_labels: Tuple[str, ...] = field(default=(), compare=False)
    _determinant: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        rows = tuple(tuple(_as_int(x, "Gram entry") for x in row) for row in self.gram)
        n = len(rows)
        if n < 1:
            raise LatticeError("lattice rank must be at least 1")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise LatticeError(f"Gram matrix row {i} has length {len(row)}, expected {n}")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise LatticeError(f"Gram matrix is not symmetric at ({i}, {j})")
        labels = tuple(str(label) for label in self.basis_labels)
        if labels and len(labels) != n:
            raise LatticeError(f"expected {n} basis labels, got {len(labels)}")
        det = int(Matrix(rows).det())
        if det == 0:
            raise LatticeError("degenerate form: Gram determinant is zero")
        object.__setattr__(self, "gram", rows)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "_determinant", det)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], labels: Optional[Iterable[str]] = None) -> "IntegralLattice":
        return cls(tuple(tuple(row) for row in rows), tuple(labels or ()))

    @classmethod
    def diagonal(cls, entries: Sequence[int], labels: Optional[Iterable[str]] = None) -> "IntegralLattice":
        n = len(entries)
        rows = [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]
        return cls.from_rows(rows, labels)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def label(self, index: int) -> str:
        return self.basis_labels[index] if self.basis_labels else f"e{index + 1}"

    def apply(self, v: DivisorClass) -> Tuple[int, ...]:
        """Gram matrix times v: the linear form w -> pairing(v, w) in coordinates"""
        if v.dimension != self.rank:
            raise LatticeError(f"dimension mismatch: class of length {v.dimension} in rank {self.rank} lattice")
        return tuple(sum(g * c for g, c in zip(row, v.coords)) for row in self.gram)


def pairing(lattice: IntegralLattice, v: DivisorClass, w: DivisorClass) -> int:
    if w.dimension != lattice.rank:
        raise LatticeError(f"dimension mismatch: class of length {w.dimension} in rank {lattice.rank} lattice")
    return sum(a * b for a, b in zip(lattice.apply(v), w.coords))


def self_intersection(lattice: IntegralLattice, v: DivisorClass) -> int:
    return pairing(lattice, v, v)


def determinant(lattice: IntegralLattice) -> int:
    return lattice._determinant


def is_even(lattice: IntegralLattice) -> bool:
    return all(lattice.gram[i][i] % 2 == 0 for i in range(lattice.rank))


def signature(lattice: IntegralLattice) -> LatticeSignature:
    """Sylvester signature by symmetric Gaussian elimination over the rationals.

    A zero pivot with a nonzero off-diagonal entry a_ij is repaired by the
    congruence e_i -> e_i + e_j, which makes the new diagonal entry 2*a_ij.
    """
    active = list(range(lattice.rank))
    a = {(i, j): Rational(lattice.gram[i][j]) for i in active for j in active}
    positives = negatives = 0

    while active:
        pivot = next((i for i in active if a[i, i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if a[i, j] != 0), None)
            if pair is None:
                raise LatticeError("degenerate form: elimination ran out of pivots")
            i, j = pair
            for k in active:
                a[i, k] = a[i, k] + a[j, k]
            for k in active:
                a[k, i] = a[k, i] + a[k, j]
            pivot = i

        p = a[pivot, pivot]
        if p > 0:
            positives += 1
        else:
            negatives += 1
        active.remove(pivot)
        for k in active:
            for l in active:
                a[k, l] = a[k, l] - a[k, pivot] * a[pivot, l] / p

    return LatticeSignature(positives, negatives)


def content(v: DivisorClass) -> int:
    """gcd of the coordinates (0 for the zero class)"""
    return reduce(gcd, (abs(c) for c in v.coords), 0)


def is_primitive(lattice: IntegralLattice, v: DivisorClass) -> bool:
    if v.dimension != lattice.rank:
        raise LatticeError(f"dimension mismatch: class of length {v.dimension} in rank {lattice.rank} lattice")
    if v.is_zero():
        raise LatticeError("primitivity is undefined for the zero class")
    return content(v) == 1


def divide_exact(v: DivisorClass, k: int) -> Optional[DivisorClass]:
    """v / k if every coordinate is divisible by k, else None"""
    if k == 0:
        raise LatticeError("division by zero")
    if any(c % k for c in v.coords):
        return None
    return DivisorClass(tuple(c // k for c in v.coords))


def validate_k3_lattice(lattice: IntegralLattice) -> List[str]:
    """Violations of the K3 Picard lattice conditions: even form, signature (1, rank-1)"""
    violations: List[str] = []
    if not is_even(lattice):
        violations.extend(
            f"odd lattice: diagonal entry {lattice.label(i)}^2 = {lattice.gram[i][i]}"
            for i in range(lattice.rank)
            if lattice.gram[i][i] % 2
        )
    sig = signature(lattice)
    if sig.positives != 1:
        violations.append(f"signature {sig}, expected (1, {lattice.rank - 1})")
    if violations:
        logger.debug("K3 lattice check failed: %s", violations)
    return violations
