"""Seeded instance generator.

Uses ``random.Random`` (Mersenne Twister) seeded with the given integer;
only ``randint`` and ``random`` are drawn, in a fixed order, so a seed and a
profile determine the output bytes on every platform.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidInputError
from .santa import SantaInstance


@dataclass(frozen=True)
class Profile:
    n_children: int
    n_gifts: int
    value_dist: str = "uniform:1:100"
    eligibility_density: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.n_children < 0 or self.n_gifts < 0:
            raise InvalidInputError("profile sizes must be non-negative")
        d = Fraction(self.eligibility_density)
        if not 0 <= d <= 1:
            raise InvalidInputError("eligibility density must lie in [0, 1]")
        object.__setattr__(self, "eligibility_density", d)
        _value_sampler(self.value_dist)


def _value_sampler(spec: str):
    """``uniform:lo:hi``, ``const:v`` or ``twovalue:small:large:p_large`` (p as a rational)."""
    parts = spec.split(":")
    try:
        if parts[0] == "uniform" and len(parts) == 3:
            lo, hi = int(parts[1]), int(parts[2])
            if not 1 <= lo <= hi:
                raise ValueError
            return lambda rng: rng.randint(lo, hi)
        if parts[0] == "const" and len(parts) == 2:
            v = int(parts[1])
            if v < 1:
                raise ValueError
            return lambda rng: v
        if parts[0] == "twovalue" and len(parts) == 4:
            small, large, p = int(parts[1]), int(parts[2]), Fraction(parts[3])
            if not (1 <= small and 1 <= large and 0 <= p <= 1):
                raise ValueError
            return lambda rng: large if rng.random() < p else small
    except ValueError:
        pass
    raise InvalidInputError(f"bad value distribution {spec!r}")


def generate_instance(seed: int, profile: Profile) -> SantaInstance:
    rng = random.Random(seed)
    sample = _value_sampler(profile.value_dist)
    d = profile.eligibility_density
    values = []
    eligible = []
    for _ in range(profile.n_gifts):
        values.append(sample(rng))
        # compare against the exact rational so density 0 and 1 are exact
        eligible.append(frozenset(i for i in range(profile.n_children) if rng.random() < d))
    return SantaInstance(
        profile.n_children,
        tuple(values),
        tuple(eligible),
        tuple(f"c{i}" for i in range(profile.n_children)),
        tuple(f"g{j}" for j in range(profile.n_gifts)),
    )
