"""Convolution of atomic measures, convolution powers and the mixed power sums."""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .measure import AtomicMeasure, _compatible, _finish, _key, add, scale, zero_measure


def _accumulate(a_atoms, b_atoms, dim: int) -> dict:
    acc: dict = {}
    get = acc.get
    if dim == 1:
        for (x,), wx in a_atoms:
            for (y,), wy in b_atoms:
                k = (x + y,)
                acc[k] = get(k, 0) + wx * wy
    else:
        for x, wx in a_atoms:
            for y, wy in b_atoms:
                k = tuple(s + t for s, t in zip(x, y))
                acc[k] = get(k, 0) + wx * wy
    return acc


def _lcm_denominator(values) -> int:
    d = 1
    for v in values:
        d = lcm(d, v.denominator)
    return d


def _accumulate_exact(a_atoms, b_atoms, dim: int) -> dict:
    # integer arithmetic on a common coordinate scale; Fractions only for the merged result
    D = _lcm_denominator(c for x, _ in (*a_atoms, *b_atoms) for c in x)
    Wa = _lcm_denominator(w for _, w in a_atoms)
    Wb = _lcm_denominator(w for _, w in b_atoms)

    def ints(atoms, W):
        return [
            (tuple(c.numerator * (D // c.denominator) for c in x), w.numerator * (W // w.denominator))
            for x, w in atoms
        ]

    raw = _accumulate(ints(a_atoms, Wa), ints(b_atoms, Wb), dim)
    W = Wa * Wb
    return {tuple(Fraction(c, D) for c in k): Fraction(v, W) for k, v in raw.items() if v}


def convolve(a: AtomicMeasure, b: AtomicMeasure) -> AtomicMeasure:
    """``a * b``: every pairwise sum of atom locations, weights multiplied and merged."""
    _compatible(a, b)
    if not a.atoms or not b.atoms:
        return zero_measure(a.dim, a.mode)
    if a.mode.exact:
        return _finish(a.dim, a.mode, _accumulate_exact(a.atoms, b.atoms, a.dim))
    # float sums of rounded coordinates are rounded again so that near-equal points merge
    acc: dict = {}
    for x, w in _accumulate(a.atoms, b.atoms, a.dim).items():
        k = _key(x, a.mode)
        acc[k] = acc.get(k, 0.0) + w
    return _finish(a.dim, a.mode, acc)


class PowerCache:
    """Convolution powers ``base^{*k}`` computed by the recurrence ``a^{*(k+1)} = a * a^{*k}``."""

    def __init__(self, base: AtomicMeasure):
        self.base = base
        self._powers = [base]

    def __len__(self) -> int:
        return len(self._powers)

    def get(self, k: int) -> AtomicMeasure:
        if k < 1:
            raise ValueError(f"convolution power needs k >= 1, got {k}")
        while len(self._powers) < k:
            self._powers.append(convolve(self.base, self._powers[-1]))
        return self._powers[k - 1]

    def stats(self) -> dict:
        """Atom counts and largest weight bit size per cached power."""
        out = {}
        for k, p in enumerate(self._powers, start=1):
            bits = 0
            if p.mode.exact and p.atoms:
                bits = max(max(w.numerator.bit_length(), w.denominator.bit_length()) for _, w in p.atoms)
            out[k] = {"atoms": len(p), "max_weight_bits": bits}
        return out


def power(a: AtomicMeasure, k: int, cache: PowerCache | None = None) -> AtomicMeasure:
    if cache is None:
        cache = PowerCache(a)
    elif cache.base != a:
        raise ValueError("power cache belongs to a different measure")
    return cache.get(k)


def _power0(cache: PowerCache, j: int) -> AtomicMeasure | None:
    return None if j == 0 else cache.get(j)


def mixed_power_sum(
    a: AtomicMeasure,
    b: AtomicMeasure,
    k: int,
    cache_a: PowerCache | None = None,
    cache_b: PowerCache | None = None,
) -> AtomicMeasure:
    """``sum_{j=0..k} a^{*(k-j)} * b^{*j}``."""
    _compatible(a, b)
    if k < 1:
        raise ValueError(f"mixed power sum needs k >= 1, got {k}")
    if cache_a is None:
        cache_a = PowerCache(a)
    if cache_b is None:
        cache_b = PowerCache(b)
    total = zero_measure(a.dim, a.mode)
    for j in range(k + 1):
        left, right = _power0(cache_a, k - j), _power0(cache_b, j)
        if left is None:
            term = right
        elif right is None:
            term = left
        else:
            term = convolve(left, right)
        total = add(total, term)
    return total


def telescoping_difference(a: AtomicMeasure, b: AtomicMeasure, k: int):
    """Both sides of ``a^k - b^k = (a - b) * sum_{j<k} a^{*(k-1-j)} * b^{*j}``."""
    if k < 2:
        raise ValueError("telescoping identity is stated for k >= 2")
    cache_a, cache_b = PowerCache(a), PowerCache(b)
    lhs = add(cache_a.get(k), scale(cache_b.get(k), -1))
    rhs = convolve(add(a, scale(b, -1)), mixed_power_sum(a, b, k - 1, cache_a, cache_b))
    return lhs, rhs
