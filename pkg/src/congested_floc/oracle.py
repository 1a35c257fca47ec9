"""Exact optimal facility locations for social cost and maximum cost.

Social cost is piecewise linear with slope ``(weight right of y) - (weight
left of y)``, so its minimizers form an interval bounded by weighted-median
crossover points. Maximum cost is the upper envelope of the agent cost
functions; every one of them is linear between consecutive agent
locations, so the envelope is minimized segment by segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .mechanisms import weighted_split
from .model import (
    EmptyInstanceError, Instance, InstanceError, ONE, ZERO, max_cost, social_cost,
)

Objective = Literal["social", "max"]
DEFAULT_RESOLUTION = Fraction(1, 10000)


@dataclass(frozen=True)
class OptimalInterval:
    y_l: Fraction
    y_r: Fraction
    value: Fraction

    def __contains__(self, y) -> bool:
        return self.y_l <= y <= self.y_r


@dataclass(frozen=True)
class EnvelopePoint:
    y: Fraction
    value: Fraction
    argmax: int


def optimal_social(inst: Instance, *, allow_violating_aversion: bool = False) -> OptimalInterval:
    """All social-cost-optimal locations as ``[y_l, y_r]``.

    ``y_l`` is the sup of the region where left weight < right weight (0 if
    that region is empty); ``y_r`` the inf of the region where left weight >
    right weight (1 if empty).
    """
    inst.require_nonempty()
    inst.require_consistent(allow_violating_aversion)
    split = weighted_split(inst)
    if all(w == 0 for w in inst.weights):
        return OptimalInterval(ZERO, ONE, social_cost(ZERO, inst))

    first_x, first_left, first_right = split[0]
    left_at_zero = first_left if first_x == 0 else ZERO
    right_at_zero = first_right if first_x == 0 else first_left + first_right
    if left_at_zero < right_at_zero:
        y_l = next(x for x, left, right in split if left >= right)
    else:
        y_l = ZERO
    y_r = next((x for x, left, right in split if left > right), ONE)
    return OptimalInterval(y_l, y_r, social_cost(y_l, inst))


def segment_lines(inst: Instance, a: Fraction, b: Fraction) -> list[tuple[Fraction, Fraction]]:
    """(slope, intercept) of every agent's cost on ``[a, b]``.

    No agent may sit strictly inside ``(a, b)``.
    """
    sign = [1 if x.location <= a else -1 for x in inst.agents]
    s_tot: dict[int, int] = {}
    t_tot: dict[int, Fraction] = {}
    for i, ag in enumerate(inst.agents):
        s_tot[ag.group] = s_tot.get(ag.group, 0) + sign[i]
        t_tot[ag.group] = t_tot.get(ag.group, ZERO) + sign[i] * ag.location
    lines = []
    for i, ag in enumerate(inst.agents):
        g, s, x = ag.group, sign[i], ag.location
        alpha = inst.alpha[g]
        # |y - x_k| = s_k (y - x_k) on the segment
        slope = s - alpha * (s_tot[g] - s)
        intercept = -s * x + alpha * (inst.group_sizes[g] - 1 + t_tot[g] - s * x)
        lines.append((Fraction(slope), intercept))
    return lines


def upper_envelope(lines):
    """Lines of the pointwise maximum, ordered left to right (ascending slope)."""
    best: dict[Fraction, Fraction] = {}
    for m, q in lines:
        if m not in best or q > best[m]:
            best[m] = q
    hull: list[tuple[Fraction, Fraction]] = []
    for m3, q3 in sorted(best.items()):
        while len(hull) >= 2:
            (m1, q1), (m2, q2) = hull[-2], hull[-1]
            # middle line never on top when l1 and l3 cross left of l1/l2 crossing
            if (q1 - q3) * (m2 - m1) <= (q1 - q2) * (m3 - m1):
                hull.pop()
            else:
                break
        hull.append((m3, q3))
    return hull


def _breakpoints(inst: Instance) -> list[Fraction]:
    return sorted({ZERO, ONE, *inst.locations})


def _scaled_lines(inst: Instance, a: int, b: int, X: list[int], L: int, K: int,
                  anum: dict[int, int]) -> list[tuple[int, int]]:
    """Integer lines of ``K*L*cost`` as a function of ``Y = L*y`` on ``[a, b]``."""
    sign = [1 if x <= a else -1 for x in X]
    s_tot: dict[int, int] = {}
    t_tot: dict[int, int] = {}
    for i, ag in enumerate(inst.agents):
        s_tot[ag.group] = s_tot.get(ag.group, 0) + sign[i]
        t_tot[ag.group] = t_tot.get(ag.group, 0) + sign[i] * X[i]
    lines = []
    for i, ag in enumerate(inst.agents):
        g, s, x = ag.group, sign[i], X[i]
        slope = K * s - anum[g] * (s_tot[g] - s)
        intercept = -K * s * x + anum[g] * ((inst.group_sizes[g] - 1) * L + t_tot[g] - s * x)
        lines.append((slope, intercept))
    return lines


def _minimize_scaled(lines, a: int, b: int) -> tuple[int, int, int]:
    """Smallest minimizer of the max of integer lines over ``[a, b]``.

    Returns ``(y_num, value_num, den)``: minimizer ``y_num/den``, minimum ``value_num/den``.
    """
    hull = upper_envelope(lines)
    fa = max(m * a + q for m, q in hull)
    best = (a, fa, 1)
    for (m1, q1), (m2, q2) in zip(hull, hull[1:]):
        num, den = q1 - q2, m2 - m1
        if a * den < num < b * den:
            v = m1 * num + q1 * den
            if v * best[2] < best[1] * den:
                best = (num, v, den)
    fb = max(m * b + q for m, q in hull)
    if fb * best[2] < best[1]:
        best = (b, fb, 1)
    return best


def optimal_max(inst: Instance, *, allow_violating_aversion: bool = False) -> EnvelopePoint:
    """Exact minimizer of the maximum cost; ties resolved toward smaller y.

    Locations are scaled by the lcm ``L`` of their denominators and costs by
    ``K*L`` (``K`` the lcm of the alpha denominators), turning every segment's
    cost lines into integer lines; the envelope scan then needs only integer
    cross-multiplication.
    """
    if not inst.agents:
        raise EmptyInstanceError("optimal_max needs at least one agent")
    inst.require_consistent(allow_violating_aversion)
    L = math.lcm(*(x.denominator for x in inst.locations))
    K = math.lcm(*(a.denominator for a in inst.alpha.values()))
    anum = {g: int(a * K) for g, a in inst.alpha.items()}
    X = [int(x * L) for x in inst.locations]
    pts = sorted({0, L, *X})
    best_y = best_v = None
    for a, b in zip(pts, pts[1:]):
        y_num, v_num, den = _minimize_scaled(_scaled_lines(inst, a, b, X, L, K, anum), a, b)
        v = Fraction(v_num, den * K * L)
        if best_v is None or v < best_v:
            best_y, best_v = Fraction(y_num, den * L), v
    value, arg = max_cost(best_y, inst)
    return EnvelopePoint(best_y, value, arg)


def optimal_max_pairwise(inst: Instance) -> EnvelopePoint:
    """Quadratic-candidate minimizer of the maximum cost.

    Candidates per segment are its endpoints and every pairwise crossing of
    agent cost lines inside it. Slow; kept as an independent check on
    :func:`optimal_max`.
    """
    inst.require_nonempty()
    pts = _breakpoints(inst)
    cands = set(pts)
    for a, b in zip(pts, pts[1:]):
        lines = segment_lines(inst, a, b)
        for i, (m1, q1) in enumerate(lines):
            for m2, q2 in lines[i + 1:]:
                if m1 != m2:
                    y = (q2 - q1) / (m1 - m2)
                    if a < y < b:
                        cands.add(y)
    best = None
    for y in sorted(cands):
        v, arg = max_cost(y, inst)
        if best is None or v < best.value:
            best = EnvelopePoint(y, v, arg)
    return best


def single_group_optimal_max(inst: Instance) -> EnvelopePoint:
    """Closed-form max-cost optimum when all agents share one group.

    The leftmost and rightmost agents carry the maximum cost on
    ``[x_lm, x_rm]`` and their costs cross at the midpoint, so the optimum
    sits there. When all agents are co-located the cost is
    ``C + (1 - C)|y - x|``; with ``C = 1`` it is flat and 0 is returned to
    match the smaller-y tie rule.
    """
    used = [g for g, members in inst.members.items() if members]
    if len(used) != 1:
        raise InstanceError(f"expected exactly one nonempty group, found {len(used)}")
    (gid,) = used
    members = inst.members[gid]
    alpha = inst.alpha[gid]
    xs = [inst.agents[i].location for i in members]
    x_lm, x_rm = min(xs), max(xs)
    lm = min(members, key=lambda i: (inst.agents[i].location, i))
    y = (x_lm + x_rm) / 2
    value = (x_rm - x_lm) / 2 + alpha * sum(
        (ONE - abs(y - inst.agents[k].location) for k in members if k != lm), ZERO)
    if x_lm == x_rm and alpha * (len(members) - 1) == 1:
        y = ZERO
    _, arg = max_cost(y, inst)
    return EnvelopePoint(y, value, arg)


# -- brute-force grid oracle --------------------------------------------------

def _grid_points(inst: Instance, resolution: Fraction) -> tuple[list[int], int]:
    scale = math.lcm(resolution.denominator, *(x.denominator for x in inst.locations))
    step = resolution * scale
    if step.denominator != 1:
        raise AssertionError("grid step must be integral after scaling")
    step = int(step)
    pts = set(range(0, scale + 1, step))
    pts.update(int(x * scale) for x in inst.locations)
    return sorted(pts), scale


def grid_oracle(inst: Instance, objective: Objective = "social",
                resolution: Fraction = DEFAULT_RESOLUTION) -> tuple[Fraction, Fraction]:
    """Evaluate the objective on every multiple of ``resolution`` plus every agent location.

    Costs are scaled to integers so the scan is exact; it runs on int64 when
    the magnitudes fit and on Python integers otherwise.
    """
    resolution = Fraction(resolution)
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    inst.require_nonempty()
    ys, scale = _grid_points(inst, resolution)
    adenom = math.lcm(*(inst.alpha[a.group].denominator for a in inst.agents))
    anum = {g: int(a * adenom) for g, a in inst.alpha.items()}
    biggest_group = max(inst.group_sizes.values())
    bound = 4 * (inst.n + 1) * scale * (adenom + max(anum.values(), default=0) * (biggest_group + 1))
    dtype = np.int64 if bound < 2 ** 62 else object

    Y = np.array(ys, dtype=dtype)
    X = [int(x * scale) for x in inst.locations]
    dist = [np.abs(Y - xi) for xi in X]
    group_total: dict[int, np.ndarray] = {}
    for i, a in enumerate(inst.agents):
        group_total[a.group] = group_total[a.group] + dist[i] if a.group in group_total else dist[i].copy()

    # cost_i * scale * adenom
    def scaled_cost(i):
        g = inst.agents[i].group
        others = (inst.group_sizes[g] - 1) * scale
        return adenom * dist[i] + anum[g] * (others - (group_total[g] - dist[i]))

    if objective == "social":
        total = scaled_cost(0)
        for i in range(1, inst.n):
            total = total + scaled_cost(i)
    elif objective == "max":
        total = scaled_cost(0)
        for i in range(1, inst.n):
            total = np.maximum(total, scaled_cost(i))
    else:
        raise ValueError(f"unknown objective {objective!r}")
    k = int(np.argmin(total))
    return Fraction(ys[k], scale), Fraction(int(total[k]), scale * adenom)


def objective_value(objective: Objective, y: Fraction, inst: Instance) -> Fraction:
    if objective == "social":
        return social_cost(y, inst)
    if objective == "max":
        return max_cost(y, inst)[0]
    raise ValueError(f"unknown objective {objective!r}")


def optimum(objective: Objective, inst: Instance, *,
            allow_violating_aversion: bool = False) -> tuple[Fraction, Fraction]:
    """(smallest optimal y, optimal value) for either objective."""
    if objective == "social":
        iv = optimal_social(inst, allow_violating_aversion=allow_violating_aversion)
        return iv.y_l, iv.value
    if objective == "max":
        pt = optimal_max(inst, allow_violating_aversion=allow_violating_aversion)
        return pt.y, pt.value
    raise ValueError(f"unknown objective {objective!r}")
