"""Checkers and randomized searches for the support theorems on cones.

Every check returns a :class:`CheckReport`.  A report whose hypotheses fail
is *not applicable*: its conclusion is never evaluated, so a hypothesis
violation is never mistaken for a counterexample.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

from .cones import (
    Cone,
    Surd,
    cone_member,
    edge_normals_2d,
    extremal_atoms,
    hull_support_function,
    supp_c,
)
from .convolution import PowerCache, convolve, mixed_power_sum, telescoping_difference
from .errors import DegenerateMeasure
from .io import measure_to_dict
from .measure import (
    EXACT,
    FLOAT,
    AtomicMeasure,
    ConeComplement,
    add,
    equal_on,
    new_measure,
    restrict,
    scale,
    to_float,
)
from .sampling import SamplerConfig, random_measure, random_point, random_rational, random_weight

log = logging.getLogger(__name__)


@dataclass
class CheckReport:
    """Verdict of one check or one aggregated search."""

    claim: str
    hypotheses: dict = field(default_factory=dict)
    conclusion_holds: bool | None = None
    computed: dict = field(default_factory=dict)
    witness: dict | None = None
    witnesses: list = field(default_factory=list)
    seed: int | None = None
    timings: dict = field(default_factory=dict)

    @property
    def hypotheses_satisfied(self) -> bool:
        return all(self.hypotheses.values())

    @property
    def status(self) -> str:
        if not self.hypotheses_satisfied or self.conclusion_holds is None:
            return "not_applicable"
        return "pass" if self.conclusion_holds else "fail"

    @property
    def failed(self) -> bool:
        return self.status == "fail"

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {
            "claim": self.claim,
            "status": self.status,
            "hypotheses_satisfied": self.hypotheses_satisfied,
            "hypotheses": dict(self.hypotheses),
            "conclusion_holds": self.conclusion_holds,
            "computed": self.computed,
            "witness": self.witness,
            "seed": self.seed,
        }
        if self.witnesses:
            out["witnesses"] = self.witnesses
        if include_timings:
            out["timings"] = self.timings
        return out


def _require_nonzero(**measures: AtomicMeasure) -> None:
    for name, m in measures.items():
        if not m.atoms:
            raise DegenerateMeasure(f"measure {name!r} is the zero measure")


def _instance(cone: Cone | None = None, **measures: AtomicMeasure) -> dict:
    out = {name: measure_to_dict(m) for name, m in measures.items()}
    if cone is not None:
        out["cone"] = str(cone)
    return out


def _conclude(report: CheckReport, holds: bool, instance: dict) -> CheckReport:
    report.conclusion_holds = holds
    report.witness = None if holds else instance
    return report


# ---------------------------------------------------------------------------
# convex-hull additivity


def _perpendicular_basis(u: Sequence[Fraction]) -> list[tuple]:
    """Rational orthogonal directions completing ``u`` to a basis (unnormalized Gram-Schmidt)."""
    n = len(u)
    basis = [tuple(Fraction(c) for c in u)]
    for i in range(n):
        v = [Fraction(int(i == j)) for j in range(n)]
        for b in basis:
            coef = sum(x * y for x, y in zip(v, b)) / sum(y * y for y in b)
            v = [x - coef * y for x, y in zip(v, b)]
        if any(v):
            basis.append(tuple(v))
        if len(basis) == n:
            break
    return basis[1:]


def _face(atoms: list, u: Sequence) -> list:
    vals = [sum(a * b for a, b in zip(u, x)) for x, _ in atoms]
    top = max(vals)
    return [atom for atom, v in zip(atoms, vals) if v == top]


def _probe(a: AtomicMeasure, b: AtomicMeasure, c: AtomicMeasure, u: Sequence) -> dict:
    ha, face_a = hull_support_function(a, u)
    hb, face_b = hull_support_function(b, u)
    hc = hull_support_function(c, u)[0] if c.atoms else None
    subadditive = hc is not None and hc <= ha + hb
    unique = len(face_a) == 1 and len(face_b) == 1
    depth = 0
    if unique:
        (x, wx), (y, wy) = face_a[0], face_b[0]
        corner = tuple(s + t for s, t in zip(x, y))
        equality = hc == ha + hb and c.weight(corner) == wx * wy != 0
    else:
        # the u-face of a*b must be the product of the two u-faces ...
        fa = new_measure(a.dim, face_a)
        fb = new_measure(b.dim, face_b)
        level = ha + hb
        c_face = [(z, w) for z, w in c.atoms if sum(p * q for p, q in zip(u, z)) == level]
        face_identity = tuple(c_face) == convolve(fa, fb).atoms
        # ... and that product is non-zero at the lexicographic corner
        fa_atoms, fb_atoms = list(face_a), list(face_b)
        for w_dir in _perpendicular_basis(u):
            if len(fa_atoms) == 1 and len(fb_atoms) == 1:
                break
            fa_atoms, fb_atoms = _face(fa_atoms, w_dir), _face(fb_atoms, w_dir)
            depth += 1
        (x, wx), (y, wy) = fa_atoms[0], fb_atoms[0]
        corner = tuple(s + t for s, t in zip(x, y))
        equality = face_identity and hc == level and c.weight(corner) == wx * wy != 0
    return {
        "u": [str(v) for v in u],
        "h_a": ha,
        "h_b": hb,
        "h_ab": hc,
        "unique": unique,
        "depth": depth,
        "subadditive": subadditive,
        "equality": bool(equality),
    }


def check_hull_additivity(a: AtomicMeasure, b: AtomicMeasure, directions: Sequence[Sequence]) -> CheckReport:
    """Probe ``conv supp(a*b) = conv supp a + conv supp b`` along the given directions."""
    _require_nonzero(a=a, b=b)
    report = CheckReport("Thm1", hypotheses={"nonzero": True, "exact": a.mode.exact and b.mode.exact})
    if not report.hypotheses_satisfied:
        return report
    c = convolve(a, b)
    probes = [_probe(a, b, c, tuple(Fraction(v) for v in u)) for u in directions]
    report.computed = {
        "probes": len(probes),
        "unique_probes": sum(p["unique"] for p in probes),
        "tie_probes": sum(not p["unique"] for p in probes),
        "max_face_depth": max((p["depth"] for p in probes), default=0),
        "atoms_ab": len(c),
        "failed_probes": [p for p in probes if not (p["subadditive"] and p["equality"])],
    }
    holds = all(p["subadditive"] and p["equality"] for p in probes)
    return _conclude(report, holds, _instance(a=a, b=b))


def probe_directions(a: AtomicMeasure, b: AtomicMeasure, rng, n_random: int = 50, denominator: int = 10) -> list:
    """Edge normals of the Minkowski sum (2D) or coordinate axes, plus random rational directions."""
    dirs = []
    if a.dim == 2:
        sums = [tuple(s + t for s, t in zip(x, y)) for x in a.support for y in b.support]
        dirs += edge_normals_2d(sums)
    else:
        for i in range(a.dim):
            e = [Fraction(0)] * a.dim
            e[i] = Fraction(1)
            dirs += [tuple(e), tuple(-v for v in e)]
    added = 0
    while added < n_random:
        u = tuple(random_rational(rng, -5, 5, denominator) for _ in range(a.dim))
        if any(u):
            dirs.append(u)
            added += 1
    return dirs


# ---------------------------------------------------------------------------
# cone-support additivity and subadditivity


def _suppc_triple(a, b, C):
    _require_nonzero(a=a, b=b)
    c = convolve(a, b)
    hyp = {
        "nonzero": True,
        "exact": a.mode.exact and b.mode.exact,
        "product_nonzero": bool(c.atoms),
    }
    return c, hyp


def check_suppc_subadditivity(a: AtomicMeasure, b: AtomicMeasure, C: Cone) -> CheckReport:
    """``supp_C(a*b) <= supp_C a + supp_C b``; holds for every pair."""
    c, hyp = _suppc_triple(a, b, C)
    report = CheckReport("Thm2Subadditivity", hypotheses=hyp)
    if not report.hypotheses_satisfied:
        return report
    k, l, s = supp_c(C, a), supp_c(C, b), supp_c(C, c)
    gap = k + l - s
    report.computed = {"k": k, "l": l, "supp_c_ab": s, "gap": gap, "gap_float": float(gap)}
    return _conclude(report, gap >= 0, _instance(C, a=a, b=b))


def check_suppc_additivity(a: AtomicMeasure, b: AtomicMeasure, C: Cone) -> CheckReport:
    """``supp_C(a*b) = supp_C a + supp_C b``, reported with its gap."""
    c, hyp = _suppc_triple(a, b, C)
    report = CheckReport("Thm2", hypotheses=hyp)
    if not report.hypotheses_satisfied:
        return report
    k, l, s = supp_c(C, a), supp_c(C, b), supp_c(C, c)
    gap = k + l - s
    report.computed = {"k": k, "l": l, "supp_c_ab": s, "gap": gap, "gap_float": float(gap)}
    return _conclude(report, gap == 0, _instance(C, a=a, b=b))


def canonical_thm2_probes(C: Cone) -> list[tuple[AtomicMeasure, AtomicMeasure]]:
    """Deterministic pairs tried before random sampling.

    In dimension >= 2 the first pair is two unit masses mirrored across the
    axis, whose cone supports cannot add.
    """
    zero = (Fraction(0),) * (C.dim - 1)
    if C.dim == 1:
        return [
            (new_measure(1, [(1, 1)]), new_measure(1, [(-1, 1)])),
            (new_measure(1, [(0, 1), (-1, 1)]), new_measure(1, [(0, 1), (-1, -1)])),
        ]
    up = (Fraction(1), Fraction(1)) + zero[1:]
    down = (Fraction(1), Fraction(-1)) + zero[1:]
    axis = (Fraction(2),) + zero
    return [
        (new_measure(C.dim, [(up, 1)]), new_measure(C.dim, [(down, 1)])),
        (new_measure(C.dim, [(axis, 1)]), new_measure(C.dim, [(axis, 1)])),
    ]


def satisfies(cfg: SamplerConfig, m: AtomicMeasure) -> bool:
    """Whether ``m`` meets the sampler constraints (used to screen hand-made instances)."""
    C = cfg.cone
    if "in_cone" in cfg.constraints and not all(cone_member(C, cfg.h, x) for x in m.support):
        return False
    if "outside_nonzero" in cfg.constraints and not restrict(m, ConeComplement(C, 0)).atoms:
        return False
    if "axis_contact" in cfg.constraints and not all(not any(x[1:]) for x, _ in extremal_atoms(C, m)):
        return False
    return True


def _thm2_trial(C: Cone, cfg: SamplerConfig, index: int, pair=None) -> dict:
    if pair is None:
        rng = cfg.rng(index)
        pair = (random_measure(rng, cfg), random_measure(rng, cfg))
    a, b = pair
    rep = check_suppc_additivity(a, b, C)
    out = {"trial": index, "status": rep.status, "atoms": len(a) + len(b)}
    if rep.hypotheses_satisfied:
        out["gap"] = rep.computed["gap"]
    if rep.failed:
        out["witness"] = {
            "trial": index,
            **_instance(C, a=a, b=b),
            "supp_c_a": rep.computed["k"],
            "supp_c_b": rep.computed["l"],
            "supp_c_ab": rep.computed["supp_c_ab"],
            "gap": rep.computed["gap"],
        }
    return out


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CONELAB_THREADS", "1")))
    except ValueError:
        return 1


def _run_trials(fn: Callable, args: list[tuple]) -> list:
    """Run independent trials, in worker processes when ``CONELAB_THREADS`` > 1; order is preserved."""
    workers = _workers()
    if workers == 1 or len(args) < 2:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(workers) as pool:
        return list(pool.map(fn, *zip(*args), chunksize=max(1, len(args) // (4 * workers))))


def falsify_theorem2(C: Cone, cfg: SamplerConfig, include_canonical: bool = True) -> CheckReport:
    """Search for pairs whose cone supports do not add under convolution."""
    if cfg.cone != C:
        cfg = replace(cfg, cone=C, dim=C.dim)
    start = time.perf_counter()
    probes = [pair for pair in canonical_thm2_probes(C) if all(satisfies(cfg, m) for m in pair)] if include_canonical else []
    results = [_thm2_trial(C, cfg, -1 - i, pair) for i, pair in enumerate(probes)]
    results += _run_trials(_thm2_trial, [(C, cfg, i) for i in range(cfg.trials)])
    applicable = [r for r in results if "gap" in r]
    # fewest atoms first; canonical probes (negative trial ids) ahead of random trials
    found = sorted((r for r in results if "witness" in r), key=lambda r: (r["atoms"], r["trial"] >= 0, abs(r["trial"])))
    report = CheckReport(
        "Thm2",
        hypotheses={"supports_in_cone": True, "nonzero": True},
        seed=cfg.seed,
        computed={
            "cone": str(C),
            "trials": cfg.trials,
            "canonical_probes": len(probes),
            "applicable": len(applicable),
            "not_applicable": len(results) - len(applicable),
            "witness_count": len(found),
            "max_gap": max((r["gap"] for r in applicable), default=Surd()),
            "constraints": sorted(cfg.constraints),
        },
        witnesses=[r["witness"] for r in found],
        timings={"seconds": time.perf_counter() - start},
    )
    report.conclusion_holds = not found
    report.witness = report.witnesses[0] if found else None
    return report


# ---------------------------------------------------------------------------
# the two lemmas


def verify_lemma1_instance(a: AtomicMeasure, b: AtomicMeasure, C: Cone, h) -> CheckReport:
    """If ``supp_C(b*a) <= 0`` and ``supp_C a = -p <= 0`` then ``supp_C b <= p``."""
    _require_nonzero(a=a, b=b)
    h = Fraction(h)
    ba = convolve(b, a)
    report = CheckReport("Lemma1")
    hyp = report.hypotheses
    hyp["h_positive"] = h > 0
    hyp["a_in_cone_h"] = all(cone_member(C, h, x) for x in a.support)
    hyp["b_in_cone_h"] = all(cone_member(C, h, x) for x in b.support)
    hyp["product_nonzero"] = bool(ba.atoms)
    if not hyp["product_nonzero"]:
        return report
    s_ba, s_a, s_b = supp_c(C, ba), supp_c(C, a), supp_c(C, b)
    p = -s_a
    hyp["supp_c_ba_nonpositive"] = s_ba <= 0
    hyp["p_nonnegative"] = p >= 0
    report.computed = {"supp_c_ba": s_ba, "supp_c_a": s_a, "p": p, "supp_c_b": s_b}
    if not report.hypotheses_satisfied:
        return report
    return _conclude(report, s_b <= p, _instance(C, a=a, b=b))


def verify_lemma2_instance(a: AtomicMeasure, b: AtomicMeasure, C: Cone, r, k_max: int) -> CheckReport:
    """Given equal powers off ``C`` up to ``k_max``, check ``supp_C(sum_j a^{k-j} b^j) = k*r``."""
    r = Fraction(r)
    if r <= 0:
        raise ValueError(f"common cone support r must be positive, got {r}")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    _require_nonzero(a=a, b=b)
    outside = ConeComplement(C, 0)
    report = CheckReport("Lemma2")
    hyp = report.hypotheses
    hyp["supp_c_a_equals_r"] = supp_c(C, a) == r
    hyp["supp_c_b_equals_r"] = supp_c(C, b) == r
    hyp["a_nonzero_outside_C"] = bool(restrict(a, outside).atoms)
    hyp["b_nonzero_outside_C"] = bool(restrict(b, outside).atoms)
    cache_a, cache_b = PowerCache(a), PowerCache(b)
    for k in range(1, k_max + 1):
        ok = equal_on(cache_a.get(k), cache_b.get(k), outside)
        hyp[f"equal_power_{k}_outside_C"] = ok
        if not ok:
            report.computed["first_unequal_power"] = k
            break
    if not report.hypotheses_satisfied:
        return report
    values = {}
    holds = True
    for k in range(1, k_max + 1):
        total = mixed_power_sum(a, b, k, cache_a, cache_b)
        value = supp_c(C, total) if total.atoms else None
        values[k] = value
        holds = holds and value is not None and value == k * r
    report.computed.update({"r": r, "k_max": k_max, "supp_c_mixed_sum": values, "power_stats": cache_a.stats()})
    return _conclude(report, holds, _instance(C, a=a, b=b))


# ---------------------------------------------------------------------------
# algebraic identities used by the uniqueness argument


def check_scaled_sum(a: AtomicMeasure, b: AtomicMeasure, C: Cone, r: int) -> CheckReport:
    """``supp_C(r*a + b) = supp_C a`` when ``supp_C b <= supp_C a`` and the top atoms survive."""
    _require_nonzero(a=a)
    report = CheckReport("Identity", computed={"identity": "scaled_sum", "r": r})
    s_a = supp_c(C, a)
    s_b = supp_c(C, b) if b.atoms else None
    total = add(scale(a, r), b)
    top = extremal_atoms(C, a)
    report.hypotheses["b_below_a"] = s_b is None or s_b <= s_a
    report.hypotheses["top_atoms_survive"] = any(total.weight(x) != 0 for x, _ in top)
    if not report.hypotheses_satisfied:
        return report
    value = supp_c(C, total)
    report.computed.update({"supp_c_a": s_a, "supp_c_sum": value})
    return _conclude(report, value == s_a, _instance(C, a=a, b=b))


def check_difference_of_squares(mu: AtomicMeasure, nu: AtomicMeasure) -> CheckReport:
    """``mu*mu - nu*nu = (mu + nu)*(mu - nu)`` exactly."""
    lhs = add(convolve(mu, mu), scale(convolve(nu, nu), -1))
    rhs = convolve(add(mu, nu), add(mu, scale(nu, -1)))
    report = CheckReport("Identity", hypotheses={"exact": mu.mode.exact}, computed={"identity": "difference_of_squares"})
    return _conclude(report, lhs == rhs, _instance(mu=mu, nu=nu))


def check_telescoping(a: AtomicMeasure, b: AtomicMeasure, k: int) -> CheckReport:
    lhs, rhs = telescoping_difference(a, b, k)
    report = CheckReport(
        "Identity",
        hypotheses={"exact": a.mode.exact},
        computed={"identity": "telescoping", "k": k, "atoms_lhs": len(lhs), "atoms_rhs": len(rhs)},
    )
    return _conclude(report, lhs == rhs, _instance(a=a, b=b))


# ---------------------------------------------------------------------------
# uniqueness search


TRIAL_KINDS = ("independent", "perturb", "constructive")


def _first_power_mismatch(mu_cache: PowerCache, nu_cache: PowerCache, outside, ks) -> int | None:
    for k in ks:
        if not equal_on(mu_cache.get(k), nu_cache.get(k), outside):
            return k
    return None


def proof_horizon(C: Cone, mu: AtomicMeasure, nu: AtomicMeasure, cap: int) -> int | None:
    """Smallest ``k`` with ``(k-1)*supp_C mu > -supp_C(mu - nu)``, or ``None`` past ``cap``.

    For a pair that agrees off ``C`` at ``k = 1`` this is the power by which
    the uniqueness argument forces a disagreement off ``C``.
    """
    r = supp_c(C, mu)
    p = -supp_c(C, add(mu, scale(nu, -1)))
    if r <= 0:
        return None
    for k in range(1, cap + 1):
        if r * (k - 1) > p:
            return k
    return None


def _inside_support(rng, cfg: SamplerConfig, n: int) -> list:
    pts = []
    for _ in range(n):
        x = random_point(rng, cfg, top=0)
        if x not in pts:
            pts.append(x)
    return pts


def _constructive_weights(mu: AtomicMeasure, support: list, K: int, C: Cone, rng) -> list[Fraction]:
    """Descend on the off-cone residuals of ``(mu + D)^k - mu^k``, ``k = 2..K``.

    ``D`` lives on ``support`` (inside ``C``, which settles ``k = 1`` exactly);
    its first weight is pinned to 1 so the trivial solution ``D = 0`` is excluded.
    """
    from scipy.optimize import least_squares

    outside = ConeComplement(C, 0)
    mu_f = to_float(mu)
    mu_cache = PowerCache(mu_f)
    dim = mu.dim
    # every location an off-cone residual can occupy, fixed so the residual has constant length
    skeleton = PowerCache(new_measure(dim, [(x, 1) for x in mu.support + support], FLOAT))
    keys = {k: restrict(skeleton.get(k), outside).support for k in range(2, K + 1)}

    def residual(free):
        d = new_measure(dim, zip(support, [1.0, *free]), FLOAT)
        nu_cache = PowerCache(add(mu_f, d))
        res = []
        for k in range(2, K + 1):
            diff = add(nu_cache.get(k), scale(mu_cache.get(k), -1))
            res.extend(diff.weight(x) for x in keys[k])
        return res or [0.0]

    x0 = [rng.uniform(-2, 2) for _ in support[1:]]
    if not x0:
        return [Fraction(1)]
    sol = least_squares(residual, x0, max_nfev=30, method="trf")
    return [Fraction(1)] + [Fraction(v).limit_denominator(1000) for v in sol.x]


def _uniqueness_trial(C: Cone, h: Fraction, K: int, cfg: SamplerConfig, index: int, extend_cap: int) -> dict:
    rng = cfg.rng(index)
    kind = TRIAL_KINDS[index % len(TRIAL_KINDS)]
    mu = random_measure(rng, cfg)
    if kind == "independent":
        nu = random_measure(rng, cfg)
    else:
        support = _inside_support(rng, cfg, rng.randint(1, 3))
        if kind == "perturb":
            weights = [random_weight(rng, cfg) for _ in support]
        else:
            weights = _constructive_weights(mu, support, K, C, rng)
        nu = add(mu, new_measure(mu.dim, zip(support, weights)))
    out = {"trial": index, "kind": kind}
    if mu == nu:
        out["outcome"] = "filtered_equal"
        return out
    outside = ConeComplement(C, 0)
    hyp_ok = (
        all(cone_member(C, h, x) for x in mu.support + nu.support)
        and bool(restrict(mu, outside).atoms)
        and bool(restrict(nu, outside).atoms)
    )
    if not hyp_ok:
        out["outcome"] = "not_applicable"
        return out
    mu_cache, nu_cache = PowerCache(mu), PowerCache(nu)
    k_bad = _first_power_mismatch(mu_cache, nu_cache, outside, range(1, K + 1))
    if k_bad is not None:
        out["outcome"] = "refuted"
        out["refuted_at"] = k_bad
        return out
    # agrees off C for every k <= K
    horizon = proof_horizon(C, mu, nu, extend_cap)
    out["horizon"] = horizon
    if horizon is not None and horizon > K:
        k_bad = _first_power_mismatch(mu_cache, nu_cache, outside, range(K + 1, horizon + 1))
        if k_bad is not None:
            out["outcome"] = "resolved_beyond_K"
            out["refuted_at"] = k_bad
            return out
    if horizon is None:
        out["outcome"] = "inconclusive"
    else:
        out["outcome"] = "candidate"
    out["instance"] = {"trial": index, "kind": kind, **_instance(C, mu=mu, nu=nu)}
    return out


def uniqueness_search(C: Cone, h, K: int, cfg: SamplerConfig, extend_cap: int = 24) -> CheckReport:
    """Look for ``mu != nu`` in ``C(h)`` whose powers agree off ``C`` for ``k = 1..K``.

    Trials rotate through independent pairs, random perturbations of ``mu``
    inside ``C`` and perturbations tuned by least squares.  A pair that agrees
    up to ``K`` is re-examined up to its proof horizon (see :func:`proof_horizon`);
    it is a candidate only if it still agrees there.
    """
    h = Fraction(h)
    cfg = replace(cfg, cone=C, dim=C.dim, h=h, constraints=cfg.constraints | {"in_cone", "outside_nonzero"})
    start = time.perf_counter()
    results = _run_trials(_uniqueness_trial, [(C, h, K, cfg, i, extend_cap) for i in range(cfg.trials)])
    outcomes: dict = {}
    refuted_at: dict = {}
    for r in results:
        outcomes[r["outcome"]] = outcomes.get(r["outcome"], 0) + 1
        if "refuted_at" in r:
            refuted_at[r["refuted_at"]] = refuted_at.get(r["refuted_at"], 0) + 1
    candidates = [r["instance"] for r in results if r["outcome"] == "candidate"]
    report = CheckReport(
        "Thm3Search",
        hypotheses={"supports_in_C_h": True, "nonzero_outside_C": True},
        seed=cfg.seed,
        computed={
            "cone": str(C),
            "h": h,
            "K": K,
            "trials": cfg.trials,
            "outcomes": dict(sorted(outcomes.items())),
            "refuted_at_power": dict(sorted(refuted_at.items())),
            "candidates": len(candidates),
            "inconclusive": [r["instance"] for r in results if r["outcome"] == "inconclusive"],
        },
        witnesses=candidates,
        timings={"seconds": time.perf_counter() - start},
    )
    report.conclusion_holds = not candidates
    report.witness = candidates[0] if candidates else None
    return report


def half_plane_candidate(grid=None, k_max: int = 4, tol: float = 0.02) -> CheckReport:
    """The two-dimensional Fejer pair as a uniqueness candidate for the half-plane.

    With the cone replaced by ``{x1 <= 0}``, the powers agree on ``{x1 > 0}``
    for every ``k <= k_max`` while the measures differ.
    """
    from . import fejer

    grid = grid or fejer.GridSpec()
    fej = fejer.verify_counterexample(grid, k_max, tol, ft_samples=0)
    agree = all(fej.computed["restriction_agrees"].values())
    differ = fej.computed["tv_difference_left"] >= 0.5
    report = CheckReport(
        "Thm3Search",
        hypotheses={"nonzero_right_of_axis": fej.computed["mass_right"] > 0},
        computed={
            "K": k_max,
            "tol": tol,
            "powers_agree_right": agree,
            "tv_difference_left": fej.computed["tv_difference_left"],
            "candidates": int(agree and differ),
        },
    )
    report.conclusion_holds = not (agree and differ)
    if not report.conclusion_holds:
        report.witness = {"construction": "fejer", "L": grid.L, "N": grid.N}
    return report


# ---------------------------------------------------------------------------
# seeded sweeps: many instances, one aggregated report


def _tally(reports: list[tuple[int, CheckReport]], claim: str, seed: int, extra: dict, start: float) -> CheckReport:
    counts = {"pass": 0, "fail": 0, "not_applicable": 0}
    failures = []
    for index, rep in reports:
        counts[rep.status] += 1
        if rep.failed:
            failures.append({"trial": index, **rep.witness})
    report = CheckReport(
        claim,
        hypotheses={"instances_generated": True},
        seed=seed,
        computed={**extra, "instances": len(reports), "counts": counts},
        witnesses=failures,
        timings={"seconds": time.perf_counter() - start},
    )
    report.conclusion_holds = not failures
    report.witness = failures[0] if failures else None
    return report


def _split_counts(reports: list[tuple[int, CheckReport]], n_satisfying: int) -> dict:
    out = {}
    for name, part in (("generated_satisfying", reports[:n_satisfying]), ("generated_violating", reports[n_satisfying:])):
        counts = {"pass": 0, "fail": 0, "not_applicable": 0}
        for _, rep in part:
            counts[rep.status] += 1
        out[name] = counts
    return out


def _shift_x1(m: AtomicMeasure, s: Fraction) -> AtomicMeasure:
    return new_measure(m.dim, [((x[0] + s,) + tuple(x[1:]), w) for x, w in m.atoms])


def subadditivity_sweep(C: Cone, cfg: SamplerConfig) -> CheckReport:
    """``check_suppc_subadditivity`` on ``cfg.trials`` random pairs."""
    cfg = replace(cfg, cone=C, dim=C.dim)
    start = time.perf_counter()
    reports = []
    for i in range(cfg.trials):
        rng = cfg.rng(i)
        reports.append((i, check_suppc_subadditivity(random_measure(rng, cfg), random_measure(rng, cfg), C)))
    gaps = [r.computed["gap"] for _, r in reports if r.hypotheses_satisfied]
    extra = {"cone": str(C), "min_gap": min(gaps, default=Surd()), "zero_gaps": sum(g == 0 for g in gaps)}
    return _tally(reports, "Thm2Subadditivity", cfg.seed, extra, start)


def hull_additivity_sweep(cfg: SamplerConfig, n_random: int = 50) -> CheckReport:
    """``check_hull_additivity`` on random pairs, probing edge normals plus random directions."""
    start = time.perf_counter()
    reports = []
    probes = unique = ties = depth = 0
    for i in range(cfg.trials):
        rng = cfg.rng(i)
        a, b = random_measure(rng, cfg), random_measure(rng, cfg)
        rep = check_hull_additivity(a, b, probe_directions(a, b, rng, n_random, cfg.denominator))
        probes += rep.computed["probes"]
        unique += rep.computed["unique_probes"]
        ties += rep.computed["tie_probes"]
        depth = max(depth, rep.computed["max_face_depth"])
        reports.append((i, rep))
    extra = {"dim": cfg.dim, "probes": probes, "unique_probes": unique, "tie_probes": ties, "max_face_depth": depth}
    return _tally(reports, "Thm1", cfg.seed, extra, start)


def telescoping_sweep(cfg: SamplerConfig, k_max: int = 5) -> CheckReport:
    """Exact telescoping identity for ``k = 2..k_max`` on random pairs."""
    start = time.perf_counter()
    reports = []
    for i in range(cfg.trials):
        rng = cfg.rng(i)
        a, b = random_measure(rng, cfg), random_measure(rng, cfg)
        lhs_rhs = [check_telescoping(a, b, k) for k in range(2, k_max + 1)]
        bad = [r for r in lhs_rhs if r.failed]
        reports.append((i, bad[0] if bad else lhs_rhs[-1]))
    return _tally(reports, "Identity", cfg.seed, {"identity": "telescoping", "k_max": k_max}, start)


def lemma1_instance(rng, cfg: SamplerConfig, satisfy: bool = True):
    """Random ``(a, b, h)`` built to meet the lemma's hypotheses (or to break them)."""
    C = cfg.cone
    a = random_measure(rng, cfg)
    a = _shift_x1(a, -Fraction(math.ceil(float(supp_c(C, a)))) - random_rational(rng, 0, cfg.coord_bound, cfg.denominator))
    p = -supp_c(C, a)
    b = random_measure(rng, cfg)
    room = math.floor(float(p)) - math.ceil(float(supp_c(C, b)))
    if satisfy:
        b = _shift_x1(b, Fraction(room) - random_rational(rng, 0, 2, cfg.denominator))
    else:
        b = _shift_x1(b, Fraction(room) + random_rational(rng, 2, 2 + cfg.coord_bound, cfg.denominator))
    top = max(float(supp_c(C, a)), float(supp_c(C, b)))
    h = Fraction(max(1, math.ceil(top) + 1))
    return a, b, h


def lemma2_instance(rng, cfg: SamplerConfig, k_max: int, satisfy: bool = True):
    """Random ``(a, b, r)``: a shared top part with cone support ``r`` plus two
    different parts deep inside the cone.

    With the deep parts at cone support ``<= -(k_max - 1)*r`` the powers agree
    off the cone for ``k <= k_max``; ``satisfy=False`` lifts them closer.
    """
    C = cfg.cone
    r = random_rational(rng, Fraction(1, cfg.denominator), cfg.h, cfg.denominator) or Fraction(1)
    top_cfg = replace(cfg, h=r, constraints=cfg.constraints | {"axis_contact"})
    shared = random_measure(rng, top_cfg)
    depth = (k_max - 1) * r if satisfy else Fraction(0)

    def deep():
        d = random_measure(rng, cfg)
        top = Fraction(math.ceil(float(supp_c(C, d))))
        return _shift_x1(d, -top - depth - random_rational(rng, 0, 1, cfg.denominator))

    return add(shared, deep()), add(shared, deep()), r


def lemma1_sweep(cfg: SamplerConfig, violating: int = 0) -> CheckReport:
    """``cfg.trials`` hypothesis-satisfying instances plus ``violating`` broken ones."""
    start = time.perf_counter()
    reports = []
    for i in range(cfg.trials + violating):
        rng = cfg.rng(i)
        a, b, h = lemma1_instance(rng, cfg, satisfy=i < cfg.trials)
        reports.append((i, verify_lemma1_instance(a, b, cfg.cone, h)))
    extra = {"cone": str(cfg.cone), "counts_by_construction": _split_counts(reports, cfg.trials)}
    return _tally(reports, "Lemma1", cfg.seed, extra, start)


def lemma2_sweep(cfg: SamplerConfig, k_max: int = 3, violating: int = 0) -> CheckReport:
    start = time.perf_counter()
    reports = []
    for i in range(cfg.trials + violating):
        rng = cfg.rng(i)
        a, b, r = lemma2_instance(rng, cfg, k_max, satisfy=i < cfg.trials)
        reports.append((i, verify_lemma2_instance(a, b, cfg.cone, r, k_max)))
    extra = {"cone": str(cfg.cone), "k_max": k_max, "counts_by_construction": _split_counts(reports, cfg.trials)}
    return _tally(reports, "Lemma2", cfg.seed, extra, start)
