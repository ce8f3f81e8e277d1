"""Finite signed atomic measures on R^n.

A measure is a canonical, immutable list of ``(point, weight)`` atoms sorted
lexicographically by point.  Exact mode stores coordinates and weights as
:class:`fractions.Fraction`; float mode stores plain floats and drops atoms
whose weight falls below a relative threshold after every operation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from .cones import Cone, cone_member
from .errors import DimensionMismatch, ModeMismatch

Scalar = Union[Fraction, float]
Point = tuple


@dataclass(frozen=True)
class NumericMode:
    kind: str = "exact"
    zero_threshold: float | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "float"):
            raise ValueError(f"unknown numeric mode {self.kind!r}")
        if self.kind == "exact" and self.zero_threshold is not None:
            raise ValueError("exact mode takes no threshold")
        if self.kind == "float":
            if self.zero_threshold is None:
                object.__setattr__(self, "zero_threshold", 1e-12)
            if self.zero_threshold < 0:
                raise ValueError("zero threshold must be non-negative")

    @property
    def exact(self) -> bool:
        return self.kind == "exact"

    def __str__(self) -> str:
        return self.kind


EXACT = NumericMode("exact")
FLOAT = NumericMode("float", 1e-12)

# float coordinates closer than this (after rounding) are merged
_COORD_DIGITS = 12
# float points closer than this in every coordinate are one atom
FLOAT_MERGE_TOL = 1e-9


@dataclass(frozen=True)
class AtomicMeasure:
    dim: int
    mode: NumericMode
    atoms: tuple = field(default=())

    @cached_property
    def _lookup(self) -> dict:
        return dict(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __bool__(self) -> bool:
        return bool(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def weight(self, x: Sequence) -> Scalar:
        """Mass of the atom at ``x`` (zero when there is none)."""
        return self._lookup.get(_key(x, self.mode), 0)

    @property
    def support(self) -> list[Point]:
        return [x for x, _ in self.atoms]

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return add(self, other)

    def __sub__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return add(self, scale(other, -1))

    def __neg__(self) -> "AtomicMeasure":
        return scale(self, -1)

    def __rmul__(self, c) -> "AtomicMeasure":
        if isinstance(c, (int, Fraction, float)):
            return scale(self, c)
        return NotImplemented

    def __str__(self) -> str:
        body = ", ".join(
            f"{_fmt_point(x)}: {w}" for x, w in self.atoms
        )
        return "{" + body + "}"


def _fmt_point(x: Point) -> str:
    if len(x) == 1:
        return str(x[0])
    return "(" + ", ".join(str(c) for c in x) + ")"


def _key(x: Sequence, mode: NumericMode) -> Point:
    if isinstance(x, (int, float, Fraction)):
        x = (x,)
    if mode.exact:
        return tuple(Fraction(c) for c in x)
    return tuple(round(float(c), _COORD_DIGITS) + 0.0 for c in x)


def _weight(w, mode: NumericMode) -> Scalar:
    return Fraction(w) if mode.exact else float(w)


def _merge_close(acc: dict) -> dict:
    """Fold float points within ``FLOAT_MERGE_TOL`` of an earlier point into it."""
    eps = FLOAT_MERGE_TOL
    buckets: dict = {}
    out: dict = {}
    for x, w in sorted(acc.items()):
        cell = math.floor(x[0] / eps)
        rep = next(
            (
                r
                for c in (cell - 1, cell, cell + 1)
                for r in buckets.get(c, ())
                if all(abs(p - q) <= eps for p, q in zip(r, x))
            ),
            None,
        )
        if rep is None:
            buckets.setdefault(cell, []).append(x)
            out[x] = w
        else:
            out[rep] += w
    return out


def _finish(dim: int, mode: NumericMode, acc: dict) -> AtomicMeasure:
    if mode.exact:
        atoms = tuple(sorted((x, w) for x, w in acc.items() if w != 0))
    else:
        acc = _merge_close(acc)
        scale_ = max((abs(w) for w in acc.values()), default=0.0)
        cut = mode.zero_threshold * scale_
        atoms = tuple(sorted((x, w) for x, w in acc.items() if abs(w) > cut and w != 0))
    return AtomicMeasure(dim, mode, atoms)


def new_measure(dim: int, atoms: Iterable = (), mode: NumericMode = EXACT) -> AtomicMeasure:
    """Build a canonical measure from ``(point, weight)`` pairs.

    Points may be scalars when ``dim == 1``.  Duplicate points are merged,
    zero weights dropped and the atoms sorted.
    """
    if dim < 1:
        raise ValueError("dimension must be positive")
    acc: dict = {}
    for x, w in atoms:
        k = _key(x, mode)
        if len(k) != dim:
            raise DimensionMismatch(f"point {x!r} does not have dimension {dim}")
        acc[k] = acc.get(k, 0) + _weight(w, mode)
    return _finish(dim, mode, acc)


def zero_measure(dim: int, mode: NumericMode = EXACT) -> AtomicMeasure:
    return AtomicMeasure(dim, mode, ())


def dirac(x: Sequence | Scalar, weight=1, mode: NumericMode = EXACT) -> AtomicMeasure:
    k = _key(x, mode)
    return new_measure(len(k), [(k, weight)], mode)


def _compatible(a: AtomicMeasure, b: AtomicMeasure) -> None:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    if a.mode.kind != b.mode.kind:
        raise ModeMismatch(f"modes differ: {a.mode} vs {b.mode}")


def add(a: AtomicMeasure, b: AtomicMeasure) -> AtomicMeasure:
    _compatible(a, b)
    acc = dict(a.atoms)
    for x, w in b.atoms:
        acc[x] = acc.get(x, 0) + w
    return _finish(a.dim, a.mode, acc)


def scale(a: AtomicMeasure, c) -> AtomicMeasure:
    c = _weight(c, a.mode)
    return _finish(a.dim, a.mode, {x: w * c for x, w in a.atoms})


def total_variation(a: AtomicMeasure) -> Scalar:
    return sum((abs(w) for _, w in a.atoms), Fraction(0) if a.mode.exact else 0.0)


def to_float(a: AtomicMeasure, zero_threshold: float = 1e-12) -> AtomicMeasure:
    mode = NumericMode("float", zero_threshold)
    return new_measure(a.dim, a.atoms, mode)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class Everywhere:
    def contains(self, x: Point) -> bool:
        return True


@dataclass(frozen=True)
class LeftHalfSpace:
    """``{x : x1 <= p}``."""

    p: Scalar = 0

    def contains(self, x: Point) -> bool:
        return x[0] <= self.p


@dataclass(frozen=True)
class RightHalfSpace:
    """``{x : x1 > p}``, the complement of :class:`LeftHalfSpace`."""

    p: Scalar = 0

    def contains(self, x: Point) -> bool:
        return x[0] > self.p


@dataclass(frozen=True)
class ConeComplement:
    """``R^n \\ C(p)``."""

    cone: Cone
    p: Scalar = 0

    def contains(self, x: Point) -> bool:
        return not cone_member(self.cone, self.p, x)


@dataclass(frozen=True)
class ConeShell:
    """``C(outer) \\ C(inner)``."""

    cone: Cone
    inner: Scalar
    outer: Scalar

    def __post_init__(self):
        if not self.inner < self.outer:
            raise ValueError("cone shell needs inner shift < outer shift")

    def contains(self, x: Point) -> bool:
        return cone_member(self.cone, self.outer, x) and not cone_member(self.cone, self.inner, x)


Region = Union[Everywhere, LeftHalfSpace, RightHalfSpace, ConeComplement, ConeShell]


def _region_dim_check(a: AtomicMeasure, R) -> None:
    cone = getattr(R, "cone", None)
    if cone is not None and cone.dim != a.dim:
        raise DimensionMismatch(f"region cone dimension {cone.dim} vs measure dimension {a.dim}")


def restrict(a: AtomicMeasure, R: Region) -> AtomicMeasure:
    """The atoms of ``a`` that lie in ``R``."""
    _region_dim_check(a, R)
    return AtomicMeasure(a.dim, a.mode, tuple((x, w) for x, w in a.atoms if R.contains(x)))


def equal_on(a: AtomicMeasure, b: AtomicMeasure, R: Region, tol: float = 0) -> bool:
    """Whether ``a`` and ``b`` agree as measures on the region ``R``.

    Exact mode requires ``tol == 0`` and compares canonical forms.  In float
    mode atoms are matched by (rounded) location and weights may differ by
    at most ``tol``; an atom present on one side only must itself be ``<= tol``.
    """
    _compatible(a, b)
    ra, rb = restrict(a, R), restrict(b, R)
    if a.mode.exact:
        if tol != 0:
            raise ValueError("exact comparison takes tol = 0")
        return ra.atoms == rb.atoms
    da, db = dict(ra.atoms), dict(rb.atoms)
    return all(abs(da.get(x, 0.0) - db.get(x, 0.0)) <= tol for x in set(da) | set(db))
