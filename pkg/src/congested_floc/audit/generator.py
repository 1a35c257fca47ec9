"""Seeded random instance generation.

All randomness is integer-valued (numpy ``Generator.integers``), so every
instance is exact and reproducible from ``(seed, trial)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..model import AgentProfile, GroupSpec, Instance

ALPHA_POLICIES = ("uniform", "extreme", "mixed", "zero")


@dataclass(frozen=True)
class GeneratorConfig:
    n_min: int = 1
    n_max: int = 50
    m_min: int = 1
    m_max: int = 5
    denominator: int = 1000
    alpha_policy: str = "uniform"
    alpha_denominator: int = 100

    def validate(self) -> None:
        if self.denominator < 1 or self.alpha_denominator < 1:
            raise ValueError("denominators must be >= 1")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError(f"need 1 <= n_min <= n_max, got {self.n_min}, {self.n_max}")
        if not 1 <= self.m_min <= self.m_max:
            raise ValueError(f"need 1 <= m_min <= m_max, got {self.m_min}, {self.m_max}")
        if self.m_min > self.n_max:
            raise ValueError("m_min exceeds n_max: groups would be empty")
        if self.alpha_policy not in ALPHA_POLICIES:
            raise ValueError(f"alpha_policy must be one of {ALPHA_POLICIES}")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, (list, tuple)):
        return np.random.default_rng(list(seed))
    return np.random.default_rng(seed)


def _draw_alpha(rng, size: int, policy: str, den: int) -> Fraction:
    cap = Fraction(1, size - 1) if size > 1 else Fraction(1)
    if policy == "mixed":
        policy = "extreme" if rng.integers(2) else "uniform"
    if policy == "zero":
        return Fraction(0)
    if policy == "extreme":
        return cap if rng.integers(2) else Fraction(0)
    return cap * Fraction(int(rng.integers(den + 1)), den)


def generate_instance(config: GeneratorConfig, seed: "int | Sequence[int]",
                      name: str | None = None) -> Instance:
    """Locations uniform on {0, 1/D, ..., 1}; a random surjection of agents onto
    groups; per-group alpha in [0, 1/(|G|-1)] so the result is always
    aversion-consistent (singletons draw from [0, 1])."""
    config.validate()
    rng = _rng(seed)
    n = int(rng.integers(config.n_min, config.n_max + 1))
    m = int(rng.integers(config.m_min, min(config.m_max, n) + 1))
    groups = list(range(m)) + [int(g) for g in rng.integers(0, m, size=n - m)]
    rng.shuffle(groups)
    xs = rng.integers(0, config.denominator + 1, size=n)
    sizes = [groups.count(j) for j in range(m)]
    specs = tuple(GroupSpec(j, _draw_alpha(rng, sizes[j], config.alpha_policy, config.alpha_denominator))
                  for j in range(m))
    agents = tuple(AgentProfile(Fraction(int(x), config.denominator), g) for x, g in zip(xs, groups))
    if name is None:
        name = f"random:{list(seed) if isinstance(seed, (list, tuple)) else seed}"
    return Instance(agents, specs, name)


def trial_instance(config: GeneratorConfig, seed: int, trial: int) -> Instance:
    """Instance for one trial; the stream depends only on (seed, trial)."""
    return generate_instance(config, (seed, trial), name=f"seed={seed}/trial={trial}")
