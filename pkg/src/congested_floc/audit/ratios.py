"""Approximation ratios and seeded worst-case search."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from ..model import Instance
from ..oracle import Objective, objective_value, optimal_max, optimal_social
from .bounds import Bound, upper_bound
from .deviations import mechanism_name, resolve_mechanism
from .generator import GeneratorConfig, trial_instance

THREADS_ENV = "CONGESTED_FLOC_THREADS"


@dataclass(frozen=True)
class RatioReport:
    mechanism: str
    objective: str
    mechanism_value: Fraction
    oracle_value: Fraction
    ratio: "Fraction | float"  # math.inf when only the optimum is zero
    witness: str | None
    facility: Fraction
    optimal_facility: Fraction
    in_optimal_set: bool


def approximation_ratio(mech, inst: Instance, objective: Objective, *,
                        allow_violating_aversion: bool = False) -> RatioReport:
    inst.require_nonempty()
    inst.require_consistent(allow_violating_aversion)
    y = resolve_mechanism(mech, allow_violating_aversion)(inst)
    value = objective_value(objective, y, inst)
    if objective == "social":
        iv = optimal_social(inst, allow_violating_aversion=allow_violating_aversion)
        opt_y, opt_v, inside = iv.y_l, iv.value, y in iv
    else:
        pt = optimal_max(inst, allow_violating_aversion=allow_violating_aversion)
        opt_y, opt_v = pt.y, pt.value
        inside = value == opt_v
    if inside or value == opt_v:
        ratio = Fraction(1)
    elif opt_v == 0:
        ratio = math.inf
    else:
        ratio = value / opt_v
    return RatioReport(mechanism_name(mech), objective, value, opt_v, ratio,
                       inst.name, y, opt_y, inside)


@dataclass(frozen=True)
class SearchReport:
    best: RatioReport
    best_instance: Instance
    best_trial: int
    trials: int
    seed: int
    bound: Bound | None

    @property
    def within_bound(self) -> bool | None:
        return None if self.bound is None else self.bound.holds(self.best.ratio)


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _trial(args):
    mech, objective, config, seed, t = args
    inst = trial_instance(config, seed, t)
    return approximation_ratio(mech, inst, objective)


def worst_case_search(mech, objective: Objective, config: GeneratorConfig | None = None,
                      trials: int = 1000, seed: int = 0, workers: int | None = None) -> SearchReport:
    """Largest ratio over ``trials`` random instances; earliest trial wins ties.

    Trial ``t`` always sees the instance generated from ``(seed, t)``, so the
    result does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    config = config or GeneratorConfig()
    workers = worker_count() if workers is None else workers
    jobs = [(mech, objective, config, seed, t) for t in range(trials)]
    if workers > 1 and isinstance(mech, str):
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        reports = [_trial(j) for j in jobs]
    best_t = 0
    for t, rep in enumerate(reports):
        if rep.ratio > reports[best_t].ratio:
            best_t = t
    return SearchReport(reports[best_t], trial_instance(config, seed, best_t), best_t,
                        trials, seed, upper_bound(mech, objective))
