"""The five deterministic facility location rules.

Each rule is a pure function ``Instance -> Outcome``. Rules refuse instances
that break Consistency of Aversion unless ``allow_violating_aversion=True``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .model import EmptyInstanceError, Instance, ZERO


class MechanismId(str, enum.Enum):
    MedM = "medm"
    LeftM = "leftm"
    ResM = "resm"
    LofM = "lofm"
    MidM = "midm"

    @classmethod
    def parse(cls, value: "str | MechanismId") -> "MechanismId":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "")
        for m in cls:
            if key in (m.value, m.name.lower()):
                return m
        raise ValueError(f"unknown mechanism {value!r}")


@dataclass(frozen=True)
class Outcome:
    mechanism: MechanismId
    facility: Fraction
    trace: dict[str, Any] = field(default_factory=dict, compare=False)


def _sorted_order(inst: Instance) -> list[int]:
    # stable by agent index among equal locations
    return sorted(range(inst.n), key=lambda i: (inst.agents[i].location, i))


def _prepare(inst: Instance, allow_violating_aversion: bool) -> None:
    if not inst.agents:
        raise EmptyInstanceError("mechanisms need at least one agent")
    inst.require_consistent(allow_violating_aversion)


def med_m(inst: Instance, *, allow_violating_aversion: bool = False) -> Outcome:
    """Facility at the ceil(n/2)-th smallest reported location."""
    _prepare(inst, allow_violating_aversion)
    order = _sorted_order(inst)
    rank = (inst.n + 1) // 2
    agent = order[rank - 1]
    return Outcome(MechanismId.MedM, inst.agents[agent].location,
                   {"order": order, "rank": rank, "agent": agent})


def left_m(inst: Instance, *, allow_violating_aversion: bool = False) -> Outcome:
    _prepare(inst, allow_violating_aversion)
    return Outcome(MechanismId.LeftM, min(inst.locations))


def weighted_split(inst: Instance) -> list[tuple[Fraction, Fraction, Fraction]]:
    """For each distinct location x (ascending): (x, weight of x_i <= x, weight of x_i > x)."""
    by_loc: dict[Fraction, Fraction] = {}
    for a, w in zip(inst.agents, inst.weights):
        by_loc[a.location] = by_loc.get(a.location, ZERO) + w
    total = sum(by_loc.values(), ZERO)
    out = []
    left = ZERO
    for x in sorted(by_loc):
        left += by_loc[x]
        out.append((x, left, total - left))
    return out


def res_m(inst: Instance, *, allow_violating_aversion: bool = False) -> Outcome:
    """Smallest reported location whose left weight covers its right weight.

    With Consistency of Aversion all weights are nonnegative, so the last
    location (right weight 0) always qualifies. Under the override a
    negative total can leave no qualifying location; the rightmost one is
    returned then and the trace says so.
    """
    _prepare(inst, allow_violating_aversion)
    split = weighted_split(inst)
    for x, left, right in split:
        if left >= right:
            return Outcome(MechanismId.ResM, x, {"left_weight": left, "right_weight": right})
    x, left, right = split[-1]
    return Outcome(MechanismId.ResM, x,
                   {"left_weight": left, "right_weight": right, "fallback": True})


def lof_m(inst: Instance, *, allow_violating_aversion: bool = False) -> Outcome:
    """min(rightmost group-leftmost location, leftmost group-rightmost location).

    Declared groups without members are skipped.
    """
    _prepare(inst, allow_violating_aversion)
    lefts, rights = [], []
    for members in inst.members.values():
        if members:
            xs = [inst.agents[i].location for i in members]
            lefts.append(min(xs))
            rights.append(max(xs))
    x_lm, x_rm = max(lefts), min(rights)
    return Outcome(MechanismId.LofM, min(x_lm, x_rm), {"x_lm": x_lm, "x_rm": x_rm})


def mid_m(inst: Instance, *, allow_violating_aversion: bool = False) -> Outcome:
    _prepare(inst, allow_violating_aversion)
    xs = inst.locations
    return Outcome(MechanismId.MidM, (min(xs) + max(xs)) / 2)


MECHANISMS: dict[MechanismId, Callable[..., Outcome]] = {
    MechanismId.MedM: med_m,
    MechanismId.LeftM: left_m,
    MechanismId.ResM: res_m,
    MechanismId.LofM: lof_m,
    MechanismId.MidM: mid_m,
}


def run(mech: "MechanismId | str", inst: Instance, *,
        allow_violating_aversion: bool = False) -> Outcome:
    return MECHANISMS[MechanismId.parse(mech)](
        inst, allow_violating_aversion=allow_violating_aversion)
