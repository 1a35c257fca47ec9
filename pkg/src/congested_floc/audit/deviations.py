"""Strategyproofness audits: unilateral and co-located-coalition misreports.

A deviation counts as a violation only if every deviator's TRUE cost
strictly drops. Others report truthfully, so the audited profile is the
given instance itself.

Location candidates are {0, 1}, every reported location, and the midpoint
of each gap between consecutive points of that set. For the five rules a
single report changes the outcome's combinatorial structure only when it
crosses another location, so one probe per open cell plus the cell
boundaries exercises every branch. A uniform grid can be added for
mechanisms that depend on the report more finely.

Misreports whose reported profile breaks Consistency of Aversion are not
evaluated; they fall outside the cost model the rules are defined for. They
are counted in :attr:`AuditReport.skipped`. With
``allow_violating_aversion=True`` they are evaluated like any other report.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Callable, Iterator

from ..mechanisms import MechanismId, run
from ..model import AgentProfile, Instance, ONE, ZERO, agent_cost
from ..oracle import optimal_max, optimal_social

MechanismFn = Callable[[Instance], Fraction]


class DeviationModel(str, enum.Enum):
    LocationOnly = "location"
    GroupOnly = "group"
    Both = "both"

    @classmethod
    def parse(cls, value) -> "DeviationModel":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for d in cls:
            if key in (d.value, d.name.lower(), d.name.lower().replace("only", "")):
                return d
        raise ValueError(f"unknown deviation model {value!r}")


REFERENCE_MECHANISMS = {
    # not strategyproof; reproduce the lower-bound coalition arguments
    "optmax": lambda inst, allow=False: optimal_max(inst, allow_violating_aversion=allow).y,
    "optsoc": lambda inst, allow=False: optimal_social(inst, allow_violating_aversion=allow).y_l,
}


def mechanism_name(mech) -> str:
    if isinstance(mech, MechanismId):
        return mech.value
    if isinstance(mech, str):
        return mech.lower()
    return getattr(mech, "__name__", repr(mech))


def resolve_mechanism(mech, allow_violating_aversion: bool = False) -> MechanismFn:
    """Turn a MechanismId, its name, a reference-mechanism name or a callable into ``inst -> y``."""
    if callable(mech) and not isinstance(mech, (str, MechanismId)):
        return mech
    if isinstance(mech, str) and mech.lower() in REFERENCE_MECHANISMS:
        ref = REFERENCE_MECHANISMS[mech.lower()]
        return lambda inst: ref(inst, allow_violating_aversion)
    mid = MechanismId.parse(mech)
    return lambda inst: run(mid, inst, allow_violating_aversion=allow_violating_aversion).facility


@dataclass(frozen=True)
class Violation:
    deviators: tuple[int, ...]
    misreports: tuple[tuple[int, AgentProfile], ...]
    truthful_facility: Fraction
    deviated_facility: Fraction
    cost_before: tuple[Fraction, ...]
    cost_after: tuple[Fraction, ...]
    gain: Fraction  # smallest per-deviator gain; > 0


@dataclass
class AuditReport:
    mechanism: str
    deviation: DeviationModel
    kind: str  # "unilateral" | "coalition"
    instance: str | None
    checked: int = 0
    skipped: int = 0
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def location_candidates(inst: Instance, grid: Fraction | None = None) -> list[Fraction]:
    pts = sorted({ZERO, ONE, *inst.locations})
    cands = set(pts)
    cands.update((a + b) / 2 for a, b in zip(pts, pts[1:]))
    if grid is not None:
        grid = Fraction(grid)
        if grid <= 0:
            raise ValueError("grid spacing must be positive")
        k = 0
        while k * grid <= 1:
            cands.add(k * grid)
            k += 1
    return sorted(cands)


def _reports(profile: AgentProfile, dev: DeviationModel, locs, group_ids) -> Iterator[AgentProfile]:
    if dev is DeviationModel.LocationOnly:
        opts = ((x, profile.group) for x in locs)
    elif dev is DeviationModel.GroupOnly:
        opts = ((profile.location, g) for g in group_ids)
    else:
        opts = ((x, g) for x in locs for g in group_ids)
    for x, g in opts:
        if x != profile.location or g != profile.group:
            yield AgentProfile(x, g)


def _common_reports(inst: Instance, coalition, dev, locs, group_ids):
    """Joint reports where all coalition members say the same thing."""
    x0 = inst.agents[coalition[0]].location
    if dev is DeviationModel.LocationOnly:
        for x in locs:
            if x != x0:
                yield {i: AgentProfile(x, inst.agents[i].group) for i in coalition}
        return
    xs = [x0] if dev is DeviationModel.GroupOnly else locs
    for x in xs:
        for g in group_ids:
            change = {i: AgentProfile(x, g) for i in coalition}
            if any(change[i] != inst.agents[i] for i in coalition):
                yield change


def _evaluate(mech_fn, inst, truthful_y, before, changes, report, allow=False):
    reported = inst.replace_agents(changes)
    if not allow and not reported.aversion_consistent:
        report.skipped += 1
        return
    report.checked += 1
    y = mech_fn(reported)
    if y == truthful_y:
        return
    deviators = tuple(sorted(changes))
    after = tuple(agent_cost(i, y, inst) for i in deviators)
    gains = [before[i] - a for i, a in zip(deviators, after)]
    if min(gains) > 0:
        report.violations.append(Violation(
            deviators=deviators,
            misreports=tuple((i, changes[i]) for i in deviators),
            truthful_facility=truthful_y,
            deviated_facility=y,
            cost_before=tuple(before[i] for i in deviators),
            cost_after=after,
            gain=min(gains),
        ))


def _start(mech, inst, dev, kind, allow_violating_aversion):
    inst.require_nonempty()
    inst.require_consistent(allow_violating_aversion)
    dev = DeviationModel.parse(dev)
    fn = resolve_mechanism(mech, allow_violating_aversion)
    truthful_y = fn(inst)
    before = [agent_cost(i, truthful_y, inst) for i in range(inst.n)]
    report = AuditReport(mechanism_name(mech), dev, kind, inst.name)
    return dev, fn, truthful_y, before, report


def unilateral_report(mech, inst: Instance, dev, *, grid: Fraction | None = None,
                      allow_violating_aversion: bool = False) -> AuditReport:
    dev, fn, y0, before, report = _start(mech, inst, dev, "unilateral", allow_violating_aversion)
    locs = location_candidates(inst, grid)
    group_ids = [g.id for g in inst.groups]
    for i, profile in enumerate(inst.agents):
        for r in _reports(profile, dev, locs, group_ids):
            _evaluate(fn, inst, y0, before, {i: r}, report, allow_violating_aversion)
    return report


def colocated_coalitions(inst: Instance) -> list[tuple[int, ...]]:
    """Maximal sets of agents sharing a reported location, leftmost first."""
    order = sorted(range(inst.n), key=lambda i: (inst.agents[i].location, i))
    return [tuple(grp) for _, grp in groupby(order, key=lambda i: inst.agents[i].location)]


def coalition_report(mech, inst: Instance, dev, *, grid: Fraction | None = None,
                     allow_violating_aversion: bool = False) -> AuditReport:
    dev, fn, y0, before, report = _start(mech, inst, dev, "coalition", allow_violating_aversion)
    locs = location_candidates(inst, grid)
    group_ids = [g.id for g in inst.groups]
    for coalition in colocated_coalitions(inst):
        for changes in _common_reports(inst, coalition, dev, locs, group_ids):
            _evaluate(fn, inst, y0, before, changes, report, allow_violating_aversion)
    return report


def unilateral_audit(mech, inst: Instance, dev, **kw) -> list[Violation]:
    return unilateral_report(mech, inst, dev, **kw).violations


def coalition_colocated_audit(mech, inst: Instance, dev, **kw) -> list[Violation]:
    return coalition_report(mech, inst, dev, **kw).violations
