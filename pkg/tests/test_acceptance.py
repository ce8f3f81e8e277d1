"""Acceptance runs, one test per criterion.

Each run returns the JSON text of its report(s) together with a verdict.
The determinism test repeats every run and compares the bytes.
"""

import json
import time
from fractions import Fraction

import pytest

from conelab import Cone
from conelab import fejer, lab
from conelab.cli import EXIT_FAILED, EXIT_OK, main
from conelab.io import dumps
from conelab.sampling import SamplerConfig

pytestmark = pytest.mark.acceptance

SEED = 20240001
CANONICAL_A = {"dim": 2, "mode": "exact", "atoms": [{"x": ["1", "1"], "w": "1"}]}
CANONICAL_B = {"dim": 2, "mode": "exact", "atoms": [{"x": ["1", "-1"], "w": "1"}]}


def _one_dim_additivity(tmp_path):
    cfg = SamplerConfig(dim=1, max_atoms=30, denominator=10, weight_bound=5, trials=1000, seed=SEED)
    rep = lab.falsify_theorem2(Cone(1), cfg, include_canonical=False)
    c = rep.computed
    ok = c["witness_count"] == 0 and c["applicable"] == 1000 and c["max_gap"] == 0
    return dumps(rep.to_dict()), ok, f"applicable={c['applicable']} witnesses={c['witness_count']} max_gap={c['max_gap']}"


def _hull_additivity(tmp_path):
    cfg = SamplerConfig(dim=2, max_atoms=8, denominator=4, coord_bound=3, trials=200, seed=SEED)
    rep = lab.hull_additivity_sweep(cfg, n_random=50)
    c = rep.computed
    ok = rep.status == "pass" and c["counts"]["pass"] == 200 and c["tie_probes"] > 0
    detail = f"pairs={c['counts']['pass']}/200 probes={c['probes']} ties={c['tie_probes']}"
    return dumps(rep.to_dict()), ok, detail


def _subadditivity(tmp_path):
    reports = []
    for n, trials in ((1, 334), (2, 333), (3, 333)):
        cfg = SamplerConfig(dim=n, trials=trials, seed=SEED + n)
        reports.append(lab.subadditivity_sweep(Cone(n), cfg))
    pairs = sum(r.computed["instances"] for r in reports)
    negative = sum(r.computed["counts"]["fail"] for r in reports)
    ok = pairs == 1000 and negative == 0 and all(r.computed["min_gap"] >= 0 for r in reports)
    return dumps([r.to_dict() for r in reports]), ok, f"pairs={pairs} negative_gaps={negative}"


def _thm2_catalog(tmp_path):
    two, one = tmp_path / "thm2_2d.json", tmp_path / "thm2_1d.json"
    witness = tmp_path / "witness.json"
    code2 = main(["search", "thm2", "--cone", "dim=2,m=1", "--json", str(two), "--witness", str(witness)])
    code1 = main(["search", "thm2", "--cone", "dim=1", "--trials", "1000", "--json", str(one)])
    r2, r1 = json.loads(two.read_text()), json.loads(one.read_text())
    w = json.loads(witness.read_text())
    canonical = (
        w["a"] == CANONICAL_A
        and w["b"] == CANONICAL_B
        and [Fraction(w[k]) for k in ("supp_c_a", "supp_c_b", "supp_c_ab", "gap")] == [2, 2, 2, 2]
        and r2["witnesses"][0] == w
    )
    ok = code2 == EXIT_FAILED and canonical and code1 == EXIT_OK and r1["computed"]["witness_count"] == 0
    detail = f"2D witnesses={r2['computed']['witness_count']} canonical_first={canonical} 1D witnesses={r1['computed']['witness_count']}"
    return two.read_text() + one.read_text() + witness.read_text(), ok, detail


def _telescoping(tmp_path):
    cfg = SamplerConfig(dim=2, max_atoms=5, trials=200, seed=SEED)
    rep = lab.telescoping_sweep(cfg, k_max=5)
    ok = rep.computed["counts"]["pass"] == 200
    return dumps(rep.to_dict()), ok, f"pairs={rep.computed['counts']['pass']}/200 k=2..5"


def _lemmas(tmp_path):
    cfg = SamplerConfig(dim=1, trials=200, seed=SEED)
    l1 = lab.lemma1_sweep(cfg, violating=50)
    l2 = lab.lemma2_sweep(cfg, k_max=3, violating=50)
    ok = True
    parts = []
    for name, rep in (("lemma1", l1), ("lemma2", l2)):
        by = rep.computed["counts_by_construction"]
        sat, vio = by["generated_satisfying"], by["generated_violating"]
        ok = ok and sat["pass"] == 200 and rep.computed["counts"]["fail"] == 0 and vio["not_applicable"] > 0
        parts.append(f"{name} satisfying={sat['pass']}/200 violating_na={vio['not_applicable']} fails={rep.computed['counts']['fail']}")
    return dumps([l1.to_dict(), l2.to_dict()]), ok, " ".join(parts)


def _uniqueness(tmp_path):
    cfg = SamplerConfig(dim=1, trials=500, seed=SEED)
    rep = lab.uniqueness_search(Cone(1), 2, 4, cfg)
    ok = rep.computed["candidates"] == 0
    return dumps(rep.to_dict()), ok, f"candidates={rep.computed['candidates']} outcomes={rep.computed['outcomes']}"


def _fejer(tmp_path):
    rep = fejer.verify_counterexample(fejer.GridSpec(200.0, 1 << 16), k_max=4, tol=0.02, ft_samples=1000, seed=SEED)
    c = rep.computed
    one_atom = all(v == {"mu": [Fraction(k)], "nu": [Fraction(k)]} for k, v in c["right_atoms"].items())
    a = one_atom and max(c["restriction_sup_difference"].values()) <= 0.02
    b = max(c["cross_term_max_l1"].values()) <= 0.02
    d_ = c["tv_difference_left"] >= 0.5
    e = len(c["ft_max_error"]) == 4 and max(c["ft_max_error"].values()) <= 0.02
    detail = (
        f"(a) sup_diff={max(c['restriction_sup_difference'].values()):.2e} "
        f"(b) cross_l1={max(c['cross_term_max_l1'].values()):.2e} "
        f"(c) tv={c['tv_difference_left']:.3f} (d) ft_err={max(c['ft_max_error'].values()):.2e}"
    )
    return dumps(rep.to_dict()), a and b and d_ and e, detail


RUNS = {
    1: (_one_dim_additivity, 30),
    2: (_hull_additivity, 60),
    3: (_subadditivity, 60),
    4: (_thm2_catalog, 30),
    5: (_telescoping, 60),
    6: (_lemmas, 60),
    7: (_uniqueness, 120),
    8: (_fejer, 120),
}

_first_outputs: dict[int, str] = {}


@pytest.mark.parametrize("number", sorted(RUNS))
def test_criterion(number, tmp_path, record_criterion):
    run, limit = RUNS[number]
    start = time.perf_counter()
    text, ok, detail = run(tmp_path)
    seconds = time.perf_counter() - start
    _first_outputs[number] = text
    passed = ok and seconds <= limit
    record_criterion(number, passed, f"{detail} time={seconds:.1f}s/{limit}s")
    assert ok, detail
    assert seconds <= limit, f"took {seconds:.1f}s, limit {limit}s"


def test_criterion_9_determinism(tmp_path_factory, record_criterion):
    mismatched = []
    for number, (run, _) in sorted(RUNS.items()):
        if number not in _first_outputs:
            _first_outputs[number] = run(tmp_path_factory.mktemp(f"first{number}"))[0]
        again = run(tmp_path_factory.mktemp(f"again{number}"))[0]
        if again != _first_outputs[number]:
            mismatched.append(number)
    record_criterion(9, not mismatched, f"reruns of 1-8 byte-identical; mismatched={mismatched}")
    assert not mismatched
