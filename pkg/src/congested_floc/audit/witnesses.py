"""Builtin witness instances with machine-checkable expected facts.

Each witness is a concrete profile from a tightness or lower-bound
construction. Facts are data (kind + parameters + expected value), checked
by :func:`check_fact` against live computations.

Irrational constants enter only through :func:`rational_sqrt`; facts on
those witnesses carry a ``1e-6`` tolerance.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from ..model import Instance, agent_cost, check_aversion
from ..oracle import objective_value, optimal_max, optimal_social
from .bounds import rational_sqrt
from .deviations import coalition_report, resolve_mechanism, unilateral_report
from .ratios import approximation_ratio

APPROX_TOL = Fraction(1, 10**6)
SQRT2 = rational_sqrt(2, Fraction(1, 10**9))


@dataclass(frozen=True)
class Fact:
    """One expected property of a witness.

    kinds and their params:
      ``mechanism_output``  mechanism
      ``ratio``             mechanism, objective
      ``ratio_at``          y, objective  (objective(y) / optimum)
      ``optimal_max_y`` / ``optimal_max_value``
      ``optimal_social``    expected is (y_l, y_r)
      ``optimal_social_value``
      ``agent_cost``        agent, y
      ``aversion``          expected bool
      ``violations_min`` / ``violations_max``  mechanism, deviation, audit
      ``coalition_gain``    mechanism, deviation (smallest gain over violations)
    """

    kind: str
    expected: Any
    params: dict = field(default_factory=dict)
    variant: str | None = None
    tol: Fraction | None = None

    @property
    def label(self) -> str:
        bits = [self.kind] + [f"{k}={v}" for k, v in self.params.items()]
        if self.variant:
            bits.append(f"on={self.variant}")
        return " ".join(bits)


@dataclass(frozen=True)
class FactResult:
    fact: Fact
    observed: Any
    passed: bool


@dataclass(frozen=True)
class Witness:
    name: str
    instance: Instance
    description: str
    facts: tuple[Fact, ...] = ()
    variants: dict[str, Instance] = field(default_factory=dict)

    def target(self, variant: str | None) -> Instance:
        return self.instance if variant is None else self.variants[variant]

    def all_instances(self) -> list[Instance]:
        return [self.instance, *self.variants.values()]


def _close(observed, expected, tol) -> bool:
    if tol is None:
        return observed == expected
    if isinstance(expected, tuple):
        return all(abs(Fraction(o) - Fraction(e)) <= tol for o, e in zip(observed, expected))
    return abs(Fraction(observed) - Fraction(expected)) <= tol


def _observe(fact: Fact, inst: Instance):
    p = fact.params
    k = fact.kind
    if k == "mechanism_output":
        return resolve_mechanism(p["mechanism"])(inst)
    if k == "ratio":
        return approximation_ratio(p["mechanism"], inst, p["objective"]).ratio
    if k == "ratio_at":
        obj = p["objective"]
        opt = optimal_social(inst).value if obj == "social" else optimal_max(inst).value
        return objective_value(obj, Fraction(p["y"]), inst) / opt
    if k == "optimal_max_y":
        return optimal_max(inst).y
    if k == "optimal_max_value":
        return optimal_max(inst).value
    if k == "optimal_social":
        iv = optimal_social(inst)
        return (iv.y_l, iv.y_r)
    if k == "optimal_social_value":
        return optimal_social(inst).value
    if k == "agent_cost":
        return agent_cost(p["agent"], Fraction(p["y"]), inst)
    if k == "aversion":
        return all(check_aversion(inst).values())
    if k in ("violations_min", "violations_max", "coalition_gain"):
        audit = coalition_report if p.get("audit", "unilateral") == "coalition" else unilateral_report
        rep = audit(p["mechanism"], inst, p["deviation"])
        if k == "coalition_gain":
            return min((v.gain for v in rep.violations), default=Fraction(0))
        return len(rep.violations)
    raise ValueError(f"unknown fact kind {k!r}")


def check_fact(w: Witness, fact: Fact) -> FactResult:
    observed = _observe(fact, w.target(fact.variant))
    if fact.kind == "violations_min":
        ok = observed >= fact.expected
    elif fact.kind == "violations_max":
        ok = observed <= fact.expected
    else:
        ok = _close(observed, fact.expected, fact.tol)
    return FactResult(fact, observed, ok)


def check_witness(w: Witness) -> list[FactResult]:
    return [check_fact(w, f) for f in w.facts]


# -- constructions -------------------------------------------------------------

def single_group_tight(group_size: int = 4, alpha: Fraction = Fraction(1, 4)) -> Witness:
    """One agent at 0, the rest of its group at 1."""
    c = alpha * (group_size - 1)
    inst = Instance.build([(0, 0)] + [(1, 0)] * (group_size - 1), {0: alpha}, name="lemma6-tight")
    return Witness("lemma6-tight", inst,
                   "single group: facility at 1 costs exactly twice the optimum at 1/2",
                   (Fact("optimal_max_y", Fraction(1, 2)),
                    Fact("optimal_max_value", (1 + c) / 2),
                    Fact("ratio_at", Fraction(2), {"y": 1, "objective": "max"}),
                    Fact("ratio", Fraction(1), {"mechanism": "midm", "objective": "max"})))


def _split_profile(half: int, alpha_right: Fraction, name: str) -> Instance:
    return Instance.build([(0, 0)] * half + [(1, 1)] * half, {0: 0, 1: alpha_right}, name=name)


def split_location_family(half: int = 3) -> Witness:
    """Half the agents at 0 (alpha 0), half at 1 in a group with congestion constant 1."""
    inst = _split_profile(half, Fraction(1, half - 1), "thm4-family")
    return Witness("thm4-family", inst,
                   "agent-location lower bound: optimum at 0, the other agent location costs twice as much",
                   (Fact("optimal_social", (Fraction(0), Fraction(0))),
                    Fact("optimal_social_value", Fraction(half)),
                    Fact("ratio_at", Fraction(2), {"y": 1, "objective": "social"})))


def split_three_halves(half: int = 3) -> Witness:
    inst = _split_profile(half, Fraction(1, half - 1), "appendix-3-2")
    return Witness("appendix-3-2", inst,
                   "same geometry as thm4-family: any facility at >= 1/2 costs at least 3/2 of optimum",
                   (Fact("optimal_social", (Fraction(0), Fraction(0))),
                    Fact("ratio_at", Fraction(3, 2), {"y": Fraction(1, 2), "objective": "social"})))


def lof_17_8() -> Witness:
    """Three agents whose costs all equal 4/7 at the optimum; LoF-M sits at 0."""
    c = Fraction(1, 4)
    d2 = (1 - c) / (2 - c)
    d1 = c * (1 - d2)
    inst = Instance.build([(0, 0), (d1, 1), (d1 + 2 * d2, 1)], {0: 0, 1: c}, name="lof-17-8")
    return Witness("lof-17-8", inst, "LoF-M attains 17/8 for the maximum cost",
                   (Fact("mechanism_output", Fraction(0), {"mechanism": "lofm"}),
                    Fact("optimal_max_y", Fraction(4, 7)),
                    Fact("optimal_max_value", Fraction(4, 7)),
                    Fact("ratio", Fraction(17, 8), {"mechanism": "lofm", "objective": "max"})))


def group_misreport_pair(half: int = 3) -> Witness:
    """Profile r (everyone in the alpha-0 group) and r' (agents at 1 in a group with C = 2 - sqrt 2).

    The optimum moves from 1/2 to ~sqrt(2)/2, so an optimal-max rule hands the
    agents at 1 a joint group misreport worth ~sqrt(2)/2 - 1/2 each.
    """
    alpha2 = (2 - SQRT2) / (half - 1)
    r = Instance.build([(0, 0)] * half + [(1, 0)] * half,
                       {0: 0, 1: alpha2}, name="thm8-pair")
    r_prime = _split_profile(half, alpha2, "thm8-pair/r-prime")
    root_half = SQRT2 / 2
    return Witness("thm8-pair", r,
                   "group-only lower bound for the maximum cost; coalition at 1 gains by joining group 1",
                   (Fact("optimal_max_y", Fraction(1, 2)),
                    Fact("optimal_max_value", Fraction(1, 2)),
                    Fact("optimal_max_y", root_half, variant="r-prime", tol=APPROX_TOL),
                    Fact("optimal_max_value", root_half, variant="r-prime", tol=APPROX_TOL),
                    Fact("violations_min", 1, {"mechanism": "optmax", "deviation": "group",
                                               "audit": "coalition"}),
                    Fact("coalition_gain", root_half - Fraction(1, 2),
                         {"mechanism": "optmax", "deviation": "group", "audit": "coalition"},
                         tol=APPROX_TOL)),
                   {"r-prime": r_prime})


def medm_family(k: int) -> Witness:
    """k agents at 1 with C = 0 and k+1 agents at 0 with C = 1; Med-M picks 0."""
    if k < 1:
        raise ValueError("k must be >= 1")
    name = f"medm-2-family-{k}"
    inst = Instance.build([(1, 0)] * k + [(0, 1)] * (k + 1), {0: 0, 1: Fraction(1, k)}, name=name)
    return Witness(name, inst, "Med-M social-cost ratio (2k+1)/(k+1)",
                   (Fact("mechanism_output", Fraction(0), {"mechanism": "medm"}),
                    Fact("optimal_social", (Fraction(1), Fraction(1))),
                    Fact("optimal_social_value", Fraction(k + 1)),
                    Fact("ratio", Fraction(2 * k + 1, k + 1), {"mechanism": "medm", "objective": "social"})))


def resm_group_ce() -> Witness:
    inst = Instance.build([(0, 0), (1, 1), (1, 1)], {0: 0, 1: Fraction(3, 5)}, name="resm-group-ce")
    return Witness("resm-group-ce", inst,
                   "Res-M is manipulable by a group misreport: an agent at 1 joins group 0",
                   (Fact("mechanism_output", Fraction(0), {"mechanism": "resm"}),
                    Fact("violations_min", 1, {"mechanism": "resm", "deviation": "group"}),
                    Fact("coalition_gain", Fraction(2, 5), {"mechanism": "resm", "deviation": "group"}),
                    Fact("violations_max", 0, {"mechanism": "resm", "deviation": "location"})))


def midm_location_ce() -> Witness:
    inst = Instance.build([(Fraction(2, 5), 0), (Fraction(3, 5), 0)], {0: Fraction(1, 10)},
                          name="midm-location-ce")
    return Witness("midm-location-ce", inst,
                   "Mid-M is manipulable through locations",
                   (Fact("mechanism_output", Fraction(1, 2), {"mechanism": "midm"}),
                    Fact("violations_min", 1, {"mechanism": "midm", "deviation": "location"}),
                    Fact("violations_max", 0, {"mechanism": "midm", "deviation": "group"})))


def fig1(alpha: Fraction) -> Witness:
    consistent = alpha * 2 <= 1
    name = "fig1-consistent" if consistent else "fig1-violating"
    inst = Instance.build([(Fraction(1, 10), 0), (1, 0), (1, 0)], {0: alpha}, name=name)
    facts = [Fact("aversion", consistent), Fact("agent_cost", Fraction(1, 10), {"agent": 0, "y": 0})]
    if consistent:
        facts.append(Fact("agent_cost", Fraction(17, 10), {"agent": 0, "y": 1}))
    return Witness(name, inst, "one agent at 1/10 with two competitors at 1", tuple(facts))


def witness_corpus() -> dict[str, Witness]:
    ws = [single_group_tight(), split_location_family(), lof_17_8(), group_misreport_pair(), split_three_halves(),
          medm_family(10), resm_group_ce(), midm_location_ce(),
          fig1(Fraction(2, 5)), fig1(Fraction(3, 5))]
    return {w.name: w for w in ws}


def get_witness(name: str) -> Witness:
    """Look up a corpus entry; ``medm-2-family-<k>`` works for any k >= 1."""
    m = re.fullmatch(r"medm-2-family(?:[-:(](\d+)\)?)?", name)
    if m:
        return medm_family(int(m.group(1) or 10))
    corpus = witness_corpus()
    if name not in corpus:
        raise KeyError(f"unknown witness {name!r}; known: {', '.join(corpus)}")
    return corpus[name]
