"""Seeded generation of exact random measures for the checkers.

Trial ``i`` of a run with seed ``s`` draws from ``random.Random(trial_seed(s, i))``,
so any single trial can be replayed without rerunning the ones before it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cones import Cone, cone_member, t_functional
from .measure import EXACT, AtomicMeasure, new_measure

DEFAULT_SEED = 20240001

KNOWN_CONSTRAINTS = frozenset({"in_cone", "axis_contact", "outside_nonzero"})


def trial_seed(seed: int, index: int) -> int:
    return (seed << 32) ^ index


@dataclass(frozen=True)
class SamplerConfig:
    dim: int = 1
    cone: Cone | None = None
    min_atoms: int = 1
    max_atoms: int = 6
    denominator: int = 10
    coord_bound: int = 5
    weight_bound: int = 5
    trials: int = 100
    seed: int = DEFAULT_SEED
    h: Fraction = Fraction(2)
    constraints: frozenset = field(default_factory=lambda: frozenset({"in_cone"}))

    def __post_init__(self):
        if self.cone is None:
            object.__setattr__(self, "cone", Cone(self.dim))
        if self.cone.dim != self.dim:
            raise ValueError("sampler cone dimension differs from sampler dimension")
        object.__setattr__(self, "h", Fraction(self.h))
        object.__setattr__(self, "constraints", frozenset(self.constraints))
        if not 1 <= self.min_atoms <= self.max_atoms:
            raise ValueError("need 1 <= min_atoms <= max_atoms")
        if min(self.denominator, self.coord_bound, self.weight_bound, self.trials) < 1 or self.h <= 0:
            raise ValueError("sampler bounds must be positive")
        unknown = self.constraints - KNOWN_CONSTRAINTS
        if unknown:
            raise ValueError(f"unknown sampler constraints: {sorted(unknown)}")

    def rng(self, index: int) -> random.Random:
        return random.Random(trial_seed(self.seed, index))


def random_rational(rng: random.Random, lo, hi, denominator: int) -> Fraction:
    """Uniform-ish rational in ``[lo, hi]`` with denominator at most ``denominator``."""
    d = rng.randint(1, denominator)
    a, b = Fraction(lo) * d, Fraction(hi) * d
    return Fraction(rng.randint(int(-(-a.numerator // a.denominator)), int(b.numerator // b.denominator)), d)


def random_weight(rng: random.Random, cfg: SamplerConfig) -> Fraction:
    while True:
        w = random_rational(rng, -cfg.weight_bound, cfg.weight_bound, cfg.denominator)
        if w != 0:
            return w


def random_point(rng: random.Random, cfg: SamplerConfig, top=None, strict: bool = False) -> tuple:
    """Point of ``C(top)`` (default ``C(h)``) inside the sampling box.

    ``strict`` excludes the boundary of ``C(top)``.  Without the ``in_cone``
    constraint any point of the box is accepted.
    """
    top = cfg.h if top is None else Fraction(top)
    B = cfg.coord_bound
    for _ in range(1000):
        perp = tuple(random_rational(rng, -B, B, cfg.denominator) for _ in range(cfg.dim - 1))
        if "in_cone" in cfg.constraints or strict:
            x1 = top - random_rational(rng, 0, 2 * B, cfg.denominator)
        else:
            x1 = random_rational(rng, -B, B, cfg.denominator)
        x = (x1,) + perp
        if "in_cone" not in cfg.constraints and not strict:
            return x
        if cone_member(cfg.cone, top, x) and not (strict and t_functional(cfg.cone, x) == top):
            return x
    # fallback on the axis, always inside
    return (top - 1,) + (Fraction(0),) * (cfg.dim - 1)


def outside_point(rng: random.Random, cfg: SamplerConfig) -> tuple:
    """Point of ``C(h)`` that is not in ``C = C(0)``."""
    for _ in range(1000):
        x = random_point(rng, cfg)
        if not cone_member(cfg.cone, 0, x):
            return x
    return (cfg.h,) + (Fraction(0),) * (cfg.dim - 1)


def random_measure(rng: random.Random, cfg: SamplerConfig, n_atoms: int | None = None) -> AtomicMeasure:
    """Non-zero exact measure honouring ``cfg.constraints``."""
    n = rng.randint(cfg.min_atoms, cfg.max_atoms) if n_atoms is None else n_atoms
    while True:
        if "axis_contact" in cfg.constraints:
            # the unique supp_C-attaining atom sits on the x1 axis
            axis = (cfg.h,) + (Fraction(0),) * (cfg.dim - 1)
            atoms = [(axis, random_weight(rng, cfg))]
            atoms += [(random_point(rng, cfg, strict=True), random_weight(rng, cfg)) for _ in range(n - 1)]
        else:
            atoms = [(random_point(rng, cfg), random_weight(rng, cfg)) for _ in range(n)]
            if "outside_nonzero" in cfg.constraints and all(cone_member(cfg.cone, 0, x) for x, _ in atoms):
                atoms[0] = (outside_point(rng, cfg), atoms[0][1])
        m = new_measure(cfg.dim, atoms, EXACT)
        if not m.atoms:
            continue
        if "outside_nonzero" in cfg.constraints and all(cone_member(cfg.cone, 0, x) for x in m.support):
            continue
        return m
