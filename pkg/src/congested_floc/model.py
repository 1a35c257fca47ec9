"""Exact-arithmetic domain types and the congestion cost model.

Every location, externality factor and cost is a :class:`fractions.Fraction`.
An agent's cost for a facility at ``y`` is its distance to ``y`` plus a
penalty of ``alpha`` for each same-group competitor, scaled by how close the
facility is to that competitor::

    c_i(y) = |y - x_i| + alpha_g * sum_{k in G_g, k != i} (1 - |y - x_k|)
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

Coordinate = Fraction
RationalLike = Union[Fraction, int, str]

ZERO = Fraction(0)
ONE = Fraction(1)


class InstanceError(ValueError):
    """Malformed instance (bad location, unknown group, negative alpha...)."""


class EmptyInstanceError(InstanceError):
    pass


class AversionViolationError(InstanceError):
    """Raised when an instance breaks Consistency of Aversion and no override is set."""

    def __init__(self, groups: Sequence[int]):
        self.groups = tuple(groups)
        super().__init__(
            "instance violates Consistency of Aversion in group(s) "
            + ", ".join(str(g) for g in self.groups)
            + " (alpha must be <= 1/(|G|-1))"
        )


def as_rational(value: RationalLike) -> Fraction:
    """Convert ints, Fractions and ``"num/den"`` or decimal strings exactly.

    Floats are refused: ``0.1`` has no exact binary value and silently
    accepting it would defeat the point of exact tie handling.
    """
    if isinstance(value, bool):
        raise InstanceError(f"not a rational: {value!r}")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"cannot parse rational {value!r}") from exc
    raise InstanceError(f"expected an exact rational, got {type(value).__name__} {value!r}")


@dataclass(frozen=True)
class GroupSpec:
    id: int
    alpha: Fraction

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        if self.alpha < 0:
            raise InstanceError(f"group {self.id}: alpha must be nonnegative, got {self.alpha}")


@dataclass(frozen=True)
class AgentProfile:
    location: Fraction
    group: int

    def __post_init__(self):
        object.__setattr__(self, "location", as_rational(self.location))
        if not ZERO <= self.location <= ONE:
            raise InstanceError(f"location {self.location} outside [0, 1]")


@dataclass(frozen=True)
class Instance:
    """A reported (or true) profile set plus the public externality factors.

    Groups may be declared without members; they then play no role in costs
    or mechanisms but remain available as group-misreport targets.
    """

    agents: tuple[AgentProfile, ...]
    groups: tuple[GroupSpec, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "groups", tuple(self.groups))
        ids = [g.id for g in self.groups]
        if len(set(ids)) != len(ids):
            raise InstanceError(f"duplicate group ids: {ids}")
        known = set(ids)
        for i, a in enumerate(self.agents):
            if a.group not in known:
                raise InstanceError(f"agent {i} references undeclared group {a.group}")

    @classmethod
    def build(cls, agents: Iterable[tuple[RationalLike, int]],
              alphas: dict[int, RationalLike] | Sequence[RationalLike],
              name: str | None = None) -> "Instance":
        """Shorthand: ``Instance.build([("1/10", 0), (1, 0)], {0: "2/5"})``."""
        if not isinstance(alphas, dict):
            alphas = dict(enumerate(alphas))
        groups = tuple(GroupSpec(gid, as_rational(a)) for gid, a in alphas.items())
        profiles = tuple(AgentProfile(as_rational(x), g) for x, g in agents)
        return cls(profiles, groups, name)

    @property
    def n(self) -> int:
        return len(self.agents)

    @cached_property
    def alpha(self) -> dict[int, Fraction]:
        return {g.id: g.alpha for g in self.groups}

    @cached_property
    def group_sizes(self) -> dict[int, int]:
        sizes = Counter(a.group for a in self.agents)
        return {g.id: sizes.get(g.id, 0) for g in self.groups}

    @cached_property
    def members(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {g.id: [] for g in self.groups}
        for i, a in enumerate(self.agents):
            out[a.group].append(i)
        return {g: tuple(v) for g, v in out.items()}

    @cached_property
    def congestion(self) -> tuple[Fraction, ...]:
        """C_i = alpha_g (|G_g| - 1) for every agent."""
        return tuple(self.alpha[a.group] * (self.group_sizes[a.group] - 1) for a in self.agents)

    @cached_property
    def weights(self) -> tuple[Fraction, ...]:
        """w_i = 1 - C_i: the net marginal effect of agent i's distance on social cost."""
        return tuple(ONE - c for c in self.congestion)

    @property
    def locations(self) -> tuple[Fraction, ...]:
        return tuple(a.location for a in self.agents)

    @cached_property
    def aversion_violations(self) -> tuple[int, ...]:
        return tuple(gid for gid, ok in check_aversion(self).items() if not ok)

    @property
    def aversion_consistent(self) -> bool:
        return not self.aversion_violations

    def require_consistent(self, allow_violating_aversion: bool = False) -> None:
        if not allow_violating_aversion and self.aversion_violations:
            raise AversionViolationError(self.aversion_violations)

    def require_nonempty(self) -> None:
        if not self.agents:
            raise EmptyInstanceError("instance has no agents")

    def replace_agents(self, changes: dict[int, AgentProfile]) -> "Instance":
        """Copy with some agents' reported profiles swapped out."""
        agents = tuple(changes.get(i, a) for i, a in enumerate(self.agents))
        return Instance(agents, self.groups, self.name)

    def permuted(self, order: Sequence[int]) -> "Instance":
        return Instance(tuple(self.agents[i] for i in order), self.groups, self.name)


def distance(a: Fraction, b: Fraction) -> Fraction:
    return abs(a - b)


def agent_cost(i: int, y: Fraction, inst: Instance) -> Fraction:
    if not 0 <= i < inst.n:
        raise IndexError(f"agent index {i} out of range for {inst.n} agents")
    me = inst.agents[i]
    alpha = inst.alpha[me.group]
    cost = distance(y, me.location)
    if alpha:
        penalty = sum((ONE - distance(y, inst.agents[k].location))
                      for k in inst.members[me.group] if k != i)
        cost += alpha * penalty
    return cost


def agent_costs(y: Fraction, inst: Instance) -> list[Fraction]:
    """All agent costs at ``y`` in O(n), via per-group distance totals."""
    dists = [distance(y, a.location) for a in inst.agents]
    totals = {g: sum((dists[k] for k in ks), ZERO) for g, ks in inst.members.items()}
    out = []
    for i, a in enumerate(inst.agents):
        others = inst.group_sizes[a.group] - 1
        out.append(dists[i] + inst.alpha[a.group] * (others - (totals[a.group] - dists[i])))
    return out


def social_cost(y: Fraction, inst: Instance) -> Fraction:
    return sum(agent_costs(y, inst), ZERO)


def restructured_social_cost(y: Fraction, inst: Instance) -> Fraction:
    """sum_i w_i d(y, x_i) + C_i; equal to :func:`social_cost` for every instance."""
    return sum((w * distance(y, a.location) + c
                for a, w, c in zip(inst.agents, inst.weights, inst.congestion)), ZERO)


def max_cost(y: Fraction, inst: Instance) -> tuple[Fraction, int]:
    """Maximum agent cost at ``y`` and the smallest agent index attaining it."""
    inst.require_nonempty()
    costs = agent_costs(y, inst)
    best = max(costs)
    return best, costs.index(best)


def check_aversion(inst: Instance) -> dict[int, bool]:
    """Per group: True iff |G| <= 1 or alpha <= 1/(|G|-1)."""
    result = {}
    for g in inst.groups:
        size = inst.group_sizes[g.id]
        result[g.id] = size <= 1 or g.alpha * (size - 1) <= 1
    return result


def aversion_probe(inst: Instance, i: int, ys: Iterable[RationalLike]) -> tuple[Fraction, Fraction] | None:
    """Look for a pair y1 < y2 on the far side of agent ``i`` where moving the
    facility away from ``i`` lowers its cost.

    Applies when all of i's competitors sit on one side of x_i: the sample
    points are restricted to [x_i, 1] (competitors to the right) or [0, x_i]
    (competitors to the left), ordered by distance from x_i. Returns the first
    decreasing consecutive pair, or None when the cost is monotone on the
    samples. Raises InstanceError when competitors straddle x_i.
    """
    x = inst.agents[i].location
    rivals = [inst.agents[k].location for k in inst.members[inst.agents[i].group] if k != i]
    right = all(r >= x for r in rivals)
    if not right and not all(r <= x for r in rivals):
        raise InstanceError(f"agent {i} has competitors on both sides")
    pts = sorted({as_rational(y) for y in ys})
    pts = [y for y in pts if y >= x] if right else [y for y in reversed(pts) if y <= x]
    costs = [agent_cost(i, y, inst) for y in pts]
    for k in range(1, len(pts)):
        if costs[k] < costs[k - 1]:
            return pts[k - 1], pts[k]
    return None
