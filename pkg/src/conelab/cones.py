"""Circular cones opening toward negative x1, the cone-support functional,
and exact arithmetic on the square-root values it produces.

A cone of slope ``m`` in R^n is ``C = {x : x1 + m*|x_perp| <= 0}`` where
``x_perp = (x2, ..., xn)``; its shift by ``p`` along the first axis is
``C(p) = {x : x1 + m*|x_perp| <= p}``.  For n = 1 the cone is the ray
``(-inf, 0]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import DegenerateMeasure, DimensionMismatch, ZeroDirection

FLOAT_TOL = 1e-9

_TRIAL_DIVISION_BOUND = 10_000


@lru_cache(maxsize=65536)
def _square_split(n: int) -> tuple[int, frozenset]:
    """Write ``n = s**2 * prod(gens)`` with ``gens`` distinct primes.

    Small primes come from trial division.  A leftover below the square of the
    bound is prime; a larger one is handed to ``sympy.factorint``.  Prime
    generators keep the radical basis linearly independent, which the exact
    sign test relies on.
    """
    if n == 0:
        return 0, frozenset()
    s = 1
    gens = set()
    p = 2
    while p * p <= n and p <= _TRIAL_DIVISION_BOUND:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            s *= p ** (e // 2)
            if e % 2:
                gens.add(p)
        p += 1 if p == 2 else 2
    if n > 1:
        if n < _TRIAL_DIVISION_BOUND**2:
            gens.add(n)
        else:
            from sympy import factorint

            for q, e in factorint(n).items():
                s *= q ** (e // 2)
                if e % 2:
                    gens.add(q)
    return s, frozenset(gens)


def _prod(gens: Iterable[int]) -> int:
    out = 1
    for g in gens:
        out *= g
    return out


class Surd:
    """Exact real number of the form ``sum_i c_i * sqrt(k_i)``.

    ``c_i`` are rationals and each ``k_i`` is a product of distinct
    generators (usually primes).  The empty product is the rational part.
    Comparisons are decided exactly by repeated squaring over the generators.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[frozenset, Fraction] | None = None):
        self._terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def rational(cls, x) -> "Surd":
        return cls({frozenset(): Fraction(x)})

    @classmethod
    def sqrt(cls, q) -> "Surd":
        q = Fraction(q)
        if q < 0:
            raise ValueError(f"square root of negative number {q}")
        n, d = q.numerator, q.denominator
        s, gens = _square_split(n * d)
        return cls({gens: Fraction(s, d)})

    @classmethod
    def coerce(cls, x) -> "Surd":
        return x if isinstance(x, Surd) else cls.rational(x)

    # -- representation -------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def is_rational(self) -> bool:
        return all(not k for k in self._terms)

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self._terms.get(frozenset(), Fraction(0))

    @property
    def a(self) -> Fraction:
        """Rational part."""
        return self._terms.get(frozenset(), Fraction(0))

    def _single_radical(self) -> tuple[Fraction, int]:
        irr = [(k, c) for k, c in self._terms.items() if k]
        if len(irr) > 1:
            raise ValueError(f"{self} has more than one radical term")
        if not irr:
            return Fraction(0), 0
        k, c = irr[0]
        return c, _prod(k)

    @property
    def m(self) -> Fraction:
        """Coefficient of the radical when the value is ``a + m*sqrt(q)``."""
        return self._single_radical()[0]

    @property
    def q(self) -> int:
        return self._single_radical()[1]

    def __float__(self) -> float:
        return float(sum(float(c) * math.sqrt(_prod(k)) for k, c in self._terms.items()))

    def __repr__(self) -> str:
        return f"Surd({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items(), key=lambda kc: (len(kc[0]), sorted(kc[0]))):
            if not k:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"sqrt({_prod(k)})")
            else:
                parts.append(f"{c}*sqrt({_prod(k)})")
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "Surd":
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        other = Surd.coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return Surd(out)

    __radd__ = __add__

    def __neg__(self) -> "Surd":
        return Surd({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "Surd":
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        return self + (-Surd.coerce(other))

    def __rsub__(self, other) -> "Surd":
        return Surd.coerce(other) - self

    def __mul__(self, other) -> "Surd":
        if isinstance(other, (int, Fraction)):
            return Surd({k: c * other for k, c in self._terms.items()})
        if not isinstance(other, Surd):
            return NotImplemented
        out: dict = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 ^ k2
                c = c1 * c2 * _prod(k1 & k2)
                out[k] = out.get(k, 0) + c
        return Surd(out)

    __rmul__ = __mul__

    # -- ordering -----------------------------------------------------------
    def sign(self) -> int:
        return _sign(self._terms)

    def _cmp(self, other) -> int:
        return (self - Surd.coerce(other)).sign()

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __hash__(self) -> int:
        # canonical terms coincide for equal values unless unfactored cofactors are involved
        if self.is_rational:
            return hash(self.to_fraction())
        return hash(frozenset(self._terms.items()))


ConeSupportValue = Surd


def _sign(terms: Mapping[frozenset, Fraction]) -> int:
    terms = {k: c for k, c in terms.items() if c != 0}
    if not terms:
        return 0
    gens = set().union(*terms)
    if not gens:
        c = terms[frozenset()]
        return (c > 0) - (c < 0)
    if len(terms) == 1:
        c = next(iter(terms.values()))
        return (c > 0) - (c < 0)
    g = min(gens)
    # value = X + Y*sqrt(g), with X and Y free of g
    x_part = {k: c for k, c in terms.items() if g not in k}
    y_part = {k - {g}: c for k, c in terms.items() if g in k}
    sx, sy = _sign(x_part), _sign(y_part)
    if sy == 0:
        return sx
    if sx == 0 or sx == sy:
        return sy
    X, Y = Surd(x_part), Surd(y_part)
    d = (X * X - Y * Y * g).sign()
    if d > 0:
        return sx
    if d < 0:
        return sy
    return 0


def radical_compare(u, v) -> int:
    """Exact three-way comparison of two cone-support values: -1, 0 or 1."""
    return (Surd.coerce(u) - Surd.coerce(v)).sign()


# ---------------------------------------------------------------------------
# cones


@dataclass(frozen=True)
class Cone:
    """Circular cone about the first axis; ``slope`` is the cotangent of the half-angle."""

    dim: int
    slope: Fraction = Fraction(1)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("cone dimension must be positive")
        object.__setattr__(self, "slope", Fraction(self.slope))
        if self.slope <= 0:
            raise ValueError("cone slope must be positive")

    @classmethod
    def parse(cls, text: str) -> "Cone":
        """Parse the ``dim=N,m=P/Q`` flag syntax (``dim=1`` for the ray)."""
        fields = {}
        for part in text.split(","):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"bad cone field {part!r}, expected key=value")
            fields[key.strip()] = value.strip()
        unknown = set(fields) - {"dim", "m"}
        if unknown or "dim" not in fields:
            raise ValueError(f"bad cone spec {text!r}; expected dim=N[,m=P/Q]")
        return cls(int(fields["dim"]), Fraction(fields.get("m", "1")))

    def __str__(self) -> str:
        return f"dim={self.dim}" if self.dim == 1 else f"dim={self.dim},m={self.slope}"


def _check_dim(C: Cone, x: Sequence) -> None:
    if len(x) != C.dim:
        raise DimensionMismatch(f"point of dimension {len(x)} against cone of dimension {C.dim}")


def _is_exact(x: Sequence) -> bool:
    return all(isinstance(c, (int, Fraction)) for c in x)


def cone_member(C: Cone, p, x: Sequence) -> bool:
    """Whether ``x`` lies in the shifted cone ``C(p)``."""
    _check_dim(C, x)
    if isinstance(p, Surd):
        return t_functional(C, x) <= p
    if _is_exact(x) and isinstance(p, (int, Fraction)):
        gap = Fraction(p) - x[0]
        if gap < 0:
            return False
        if C.dim == 1:
            return True
        return gap * gap >= C.slope**2 * sum(Fraction(c) ** 2 for c in x[1:])
    return float(t_functional(C, x)) <= float(p) + FLOAT_TOL


def t_functional(C: Cone, x: Sequence):
    """Smallest shift ``t`` with ``x`` in ``C(t)``: ``x1 + m*|x_perp|``.

    Returns a :class:`Surd` for rational points and a float otherwise.
    """
    _check_dim(C, x)
    if not _is_exact(x):
        if C.dim == 1:
            return float(x[0])
        return float(x[0]) + float(C.slope) * math.hypot(*(float(c) for c in x[1:]))
    head = Surd.rational(x[0])
    if C.dim == 1:
        return head
    return head + Surd.sqrt(sum(Fraction(c) ** 2 for c in x[1:])) * C.slope


def supp_c(C: Cone, measure):
    """Cone support of a non-zero measure: the least ``p`` with ``supp mu`` inside ``C(p)``."""
    if measure.dim != C.dim:
        raise DimensionMismatch(f"measure of dimension {measure.dim} against cone of dimension {C.dim}")
    if not measure.atoms:
        raise DegenerateMeasure("supp_C is undefined for the zero measure")
    return max(t_functional(C, x) for x, _ in measure.atoms)


def extremal_atoms(C: Cone, measure) -> list:
    """Atoms attaining the cone support."""
    top = supp_c(C, measure)
    if isinstance(top, Surd):
        return [(x, w) for x, w in measure.atoms if t_functional(C, x) == top]
    return [(x, w) for x, w in measure.atoms if t_functional(C, x) >= top - FLOAT_TOL]


# ---------------------------------------------------------------------------
# convex-hull probes


def _dot(u: Sequence, x: Sequence):
    return sum(a * b for a, b in zip(u, x))


def hull_support_function(measure, u: Sequence):
    """Support function of ``conv(supp a)`` in direction ``u`` and the atoms on that face."""
    if not measure.atoms:
        raise DegenerateMeasure("support function of the zero measure")
    if len(u) != measure.dim:
        raise DimensionMismatch(f"direction of dimension {len(u)} for measure of dimension {measure.dim}")
    if all(c == 0 for c in u):
        raise ZeroDirection("direction must be non-zero")
    values = [(_dot(u, x), (x, w)) for x, w in measure.atoms]
    top = max(v for v, _ in values)
    if measure.mode.exact:
        face = [atom for v, atom in values if v == top]
    else:
        face = [atom for v, atom in values if v >= top - FLOAT_TOL * max(1.0, abs(top))]
    return top, face


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points: Iterable[Sequence]) -> list[tuple]:
    """Vertices of the convex hull in counter-clockwise order (monotone chain, exact)."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def edge_normals_2d(points: Iterable[Sequence]) -> list[tuple]:
    """Outward normals of the hull edges; for a segment both sides are returned."""
    hull = convex_hull_2d(points)
    if len(hull) < 2:
        return []
    if len(hull) == 2:
        (x0, y0), (x1, y1) = hull
        n = (y1 - y0, x0 - x1)
        return [n, (-n[0], -n[1])]
    out = []
    for i, (x0, y0) in enumerate(hull):
        x1, y1 = hull[(i + 1) % len(hull)]
        out.append((y1 - y0, x0 - x1))
    return out
