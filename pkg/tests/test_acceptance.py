"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Sizes and tolerances are the stated ones. Random instances come from fixed
seeds so every run checks the same profiles.
"""

import time
from decimal import Decimal, localcontext
from fractions import Fraction as F

import numpy as np

from congested_floc.mechanisms import MechanismId, run
from congested_floc.model import Instance, aversion_probe, max_cost, restructured_social_cost, social_cost
from congested_floc.oracle import grid_oracle, optimal_max, optimal_social, single_group_optimal_max
from congested_floc.audit.bounds import MIDM_MAX_BOUND, upper_bound
from congested_floc.audit.deviations import coalition_report, unilateral_report
from congested_floc.audit.generator import GeneratorConfig, trial_instance
from congested_floc.audit.ratios import approximation_ratio
from congested_floc.audit.witnesses import SQRT2, get_witness, medm_family, witness_corpus
from congested_floc.cli import AUDIT_DEFAULTS

from conftest import record

DEFAULT = GeneratorConfig(n_max=50, m_max=5, denominator=1000)
SINGLE = GeneratorConfig(n_max=50, m_min=1, m_max=1, denominator=1000)


def suite(config, count, seed):
    return [trial_instance(config, seed, t) for t in range(count)]


def max_ratio(mech, objective, instances):
    worst = F(0)
    for inst in instances:
        worst = max(worst, approximation_ratio(mech, inst, objective).ratio)
    return worst


def test_criterion_1_resm_optimal():
    instances = suite(DEFAULT, 1000, 1)
    start = time.perf_counter()
    bad = 0
    for inst in instances:
        rep = approximation_ratio(MechanismId.ResM, inst, "social")
        iv = optimal_social(inst)
        if rep.ratio != 1 or not iv.y_l <= rep.facility <= iv.y_r:
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 10
    record(1, ok, f"Res-M social ratio exactly 1 and inside [y_l, y_r] on 1000 instances "
                  f"({bad} failures, {elapsed:.1f}s)")
    assert ok


def test_criterion_2_medm_social():
    worst = max_ratio(MechanismId.MedM, "social", suite(DEFAULT, 1000, 1))
    fam = {k: approximation_ratio("medm", medm_family(k).instance, "social").ratio for k in (2, 5, 10, 50)}
    monotone = all(a < b for a, b in zip(fam.values(), list(fam.values())[1:]))
    ok = worst <= 2 and fam[10] == F(21, 11) and fam[10] > F(19, 10) and monotone
    record(2, ok, f"Med-M social max ratio {float(worst):.6f} <= 2; family k=10 ratio {fam[10]}; "
                  f"k in (2,5,10,50) gives {', '.join(map(str, fam.values()))}")
    assert ok


def test_criterion_3_lofm_max():
    worst = max_ratio(MechanismId.LofM, "max", suite(DEFAULT, 2000, 3))
    w = get_witness("lof-17-8").instance
    rep = approximation_ratio("lofm", w, "max")
    opt = optimal_max(w)
    ok = worst <= F(17, 8) and rep.ratio == F(17, 8) and (opt.y, opt.value) == (F(4, 7), F(4, 7))
    record(3, ok, f"LoF-M max ratio {float(worst):.6f} <= 17/8 on 2000 instances; witness ratio {rep.ratio}, "
                  f"optimum {opt.value} at {opt.y}")
    assert ok


def test_criterion_4_midm_max():
    bound = upper_bound("midm", "max")
    with localcontext() as ctx:
        ctx.prec = 50
        closed = (Decimal(29) + 20 * Decimal(10).sqrt()) / 54
    const_ok = abs(Decimal(float(MIDM_MAX_BOUND)) - closed) < Decimal("1e-9")
    worst = max_ratio(MechanismId.MidM, "max", suite(DEFAULT, 2000, 4))
    ok = const_ok and bound.holds(worst)
    record(4, ok, f"Mid-M max ratio {float(worst):.6f} <= (29+20*sqrt(10))/54 = {float(MIDM_MAX_BOUND):.9f} "
                  f"on 2000 instances")
    assert ok


def test_criterion_5_leftm_max():
    worst = max_ratio(MechanismId.LeftM, "max", suite(DEFAULT, 2000, 5))
    worst_single = max_ratio(MechanismId.LeftM, "max", suite(SINGLE, 500, 5))
    ok = worst <= 3 and worst_single <= 2
    record(5, ok, f"Left-M max ratio {float(worst):.6f} <= 3 on 2000 instances; "
                  f"single-group {float(worst_single):.6f} <= 2 on 500")
    assert ok


def test_criterion_6_single_group_closed_form():
    rng = np.random.default_rng(6)
    mismatches = extremes_bad = 0
    for inst in suite(SINGLE, 500, 6):
        if single_group_optimal_max(inst) != optimal_max(inst):
            mismatches += 1
        xs = inst.locations
        lo, hi = min(xs), max(xs)
        ends = [i for i, x in enumerate(xs) if x in (lo, hi)]
        for k in rng.integers(0, 1001, size=5):
            y = lo + (hi - lo) * F(int(k), 1000)
            _, arg = max_cost(y, inst)
            if arg not in ends:
                extremes_bad += 1
    w = get_witness("lemma6-tight").instance
    tight = max_cost(F(1), w)[0] / optimal_max(w).value
    ok = mismatches == 0 and extremes_bad == 0 and tight == 2
    record(6, ok, f"closed form equals optimal_max on 500 single-group instances ({mismatches} mismatches); "
                  f"argmax off the extremes {extremes_bad} times; lemma6-tight ratio at facility 1 = {tight}")
    assert ok


SP_SUITES = [
    (MechanismId.MedM, "both"),
    (MechanismId.LeftM, "both"),
    (MechanismId.ResM, "location"),
    (MechanismId.LofM, "location"),
    (MechanismId.MidM, "group"),
]


def test_criterion_7_strategyproofness():
    corpus = [i for w in witness_corpus().values() for i in w.all_instances() if i.aversion_consistent]
    randoms = suite(AUDIT_DEFAULTS, 500, 7)
    found = {}
    for mech, dev in SP_SUITES:
        count = 0
        for inst in corpus + randoms:
            count += len(unilateral_report(mech, inst, dev).violations)
            count += len(coalition_report(mech, inst, dev).violations)
        found[f"{mech.value}/{dev}"] = count
    sp_ok = not any(found.values())

    resm = len(unilateral_report("resm", get_witness("resm-group-ce").instance, "group").violations)
    midm = len(unilateral_report("midm", get_witness("midm-location-ce").instance, "location").violations)
    r = get_witness("thm8-pair").instance
    coal = [v for v in coalition_report("optmax", r, "group").violations if r.agents[v.deviators[0]].location == 1]
    expected_gain = F(1, 2) - (1 - SQRT2 / 2)
    gain_ok = len(coal) == 1 and abs(coal[0].gain - expected_gain) <= F(1, 10**6)
    ok = sp_ok and resm >= 1 and midm >= 1 and gain_ok
    record(7, ok, f"SP suites over {len(corpus)} witness + 500 random instances: "
                  f"{', '.join(f'{k}={v}' for k, v in found.items())} violations; "
                  f"Res-M group ce {resm}, Mid-M location ce {midm}, "
                  f"OptMax coalition gain {float(coal[0].gain) if coal else 'none'}")
    assert ok


def test_criterion_8_model_identities():
    rng = np.random.default_rng(8)
    mismatches = probe_failures = probed = 0
    for inst in suite(DEFAULT, 200, 8):
        ys = [F(int(k), 10000) for k in rng.integers(0, 10001, size=100)]
        mismatches += sum(social_cost(y, inst) != restructured_social_cost(y, inst) for y in ys)
        for g, members in inst.members.items():
            if not members:
                continue
            # the leftmost and rightmost group members have all competitors on one side
            for i in (min(members, key=lambda k: inst.agents[k].location),
                      max(members, key=lambda k: inst.agents[k].location)):
                probed += 1
                if aversion_probe(inst, i, ys) is not None:
                    probe_failures += 1
    # one violating instance: competitors short of 1 so the decreasing stretch is inside [0, 1]
    c = F(int(rng.integers(200, 900)), 1000)
    bad = Instance.build([(F(1, 10), 0), (c, 0), (c, 0)], {0: F(3, 5)})
    ys = [F(int(k), 10000) for k in rng.integers(0, 10001, size=100)] + [c, F(1)]
    witnessed = aversion_probe(bad, 0, ys)
    ok = mismatches == 0 and probe_failures == 0 and witnessed is not None
    record(8, ok, f"restructured social cost equal at 100 y x 200 instances ({mismatches} mismatches); "
                  f"{probed} monotonicity probes, {probe_failures} failures; violating instance decreases "
                  f"between {witnessed[0] if witnessed else '?'} and {witnessed[1] if witnessed else '?'}")
    assert ok


def test_criterion_9_grid_agreement():
    res = F(1, 10000)
    worst_excess = F(0)
    failures = 0
    for inst in suite(DEFAULT, 200, 9):
        tol = inst.n * (1 + max(inst.congestion)) * res
        for objective, exact in (("social", optimal_social(inst).value), ("max", optimal_max(inst).value)):
            _, v = grid_oracle(inst, objective, res)
            gap = abs(v - exact)
            worst_excess = max(worst_excess, gap / tol)
            failures += gap > tol
    ok = failures == 0
    record(9, ok, f"grid oracle within n(1+max C)/10000 of exact on 200 instances x 2 objectives "
                  f"(worst gap {float(worst_excess):.3f} of tolerance, {failures} failures)")
    assert ok
