from fractions import Fraction as F

import pytest

from congested_floc.audit.witnesses import (
    SQRT2,
    Fact,
    check_fact,
    check_witness,
    get_witness,
    medm_family,
    witness_corpus,
)
from congested_floc.oracle import grid_oracle, optimal_social
from congested_floc.model import social_cost

CORPUS = witness_corpus()


def test_corpus_names():
    assert set(CORPUS) == {
        "lemma6-tight", "thm4-family", "lof-17-8", "thm8-pair", "appendix-3-2",
        "medm-2-family-10", "resm-group-ce", "midm-location-ce", "fig1-consistent", "fig1-violating",
    }
    for name, w in CORPUS.items():
        assert w.instance.name == name


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_witness_facts_hold(name):
    results = check_witness(CORPUS[name])
    assert results
    failed = [(r.fact.label, r.observed) for r in results if not r.passed]
    assert not failed


def test_lof_coordinates():
    xs = CORPUS["lof-17-8"].instance.locations
    assert xs == (0, F(1, 7), 1)


def test_sqrt2_precision():
    assert abs(SQRT2 * SQRT2 - 2) / SQRT2 < F(1, 10**9)


def test_group_pair_variants():
    w = CORPUS["thm8-pair"]
    r, rp = w.instance, w.variants["r-prime"]
    assert r.group_sizes == {0: 6, 1: 0}
    assert rp.group_sizes == {0: 3, 1: 3}
    assert rp.congestion[-1] == 2 - SQRT2


@pytest.mark.parametrize("k", [1, 2, 5, 10, 50])
def test_medm_family_ratio(k):
    w = medm_family(k)
    assert all(r.passed for r in check_witness(w))
    inst = w.instance
    assert social_cost(F(0), inst) == 2 * k + 1
    assert optimal_social(inst).value == k + 1


def test_medm_family_grid_verified():
    inst = medm_family(10).instance
    y, v = grid_oracle(inst, "social")
    assert (y, v) == (1, 11)


def test_get_witness_lookup():
    assert get_witness("medm-2-family-7").name == "medm-2-family-7"
    assert get_witness("medm-2-family").name == "medm-2-family-10"
    assert get_witness("lof-17-8") is not None
    with pytest.raises(KeyError):
        get_witness("nonexistent")
    with pytest.raises(ValueError):
        medm_family(0)


def test_failing_fact_reported():
    w = CORPUS["lof-17-8"]
    r = check_fact(w, Fact("optimal_max_value", F(1, 2)))
    assert not r.passed and r.observed == F(4, 7)
    with pytest.raises(ValueError):
        check_fact(w, Fact("no-such-kind", 0))


def test_violating_witness_flags():
    assert not CORPUS["fig1-violating"].instance.aversion_consistent
    assert CORPUS["fig1-consistent"].instance.aversion_consistent
