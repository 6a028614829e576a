"""Reduction of arbitrary radii to a normalized profile with the same body.

Viewing the radii as a function ``nu(z)`` on the set ``Z`` of inverse
exponents, two envelopes are taken in turn:

* ``nu_star(z) = min{nu(w) : w >= z}``, the largest nondecreasing minorant;
* ``nu_star_star(z) = min{nu_star(w) * N^(z - w) : w <= z}``, which caps the
  growth rate so that ``1 <= nu(z)/nu(w) <= N^(z - w)`` for ``w <= z``.

Neither step changes the intersection of the balls, and the result satisfies
the pairwise condition ``1 <= kappa <= N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .balls import BallFamily, BallSpec
from .exceptions import InvalidInputError


@dataclass(frozen=True)
class WeightProfile:
    """Radii as a function of ``z`` on a finite, strictly increasing grid."""

    points: tuple[tuple[float, float], ...]
    ambient_dim: int

    def __post_init__(self):
        pts = tuple(sorted((float(z), float(nu)) for z, nu in self.points))
        if not pts:
            raise InvalidInputError("profile must be non-empty")
        zs = [z for z, _ in pts]
        if len(set(zs)) != len(zs):
            raise InvalidInputError("profile z values must be distinct")
        if any(not (nu > 0.0 and math.isfinite(nu)) for _, nu in pts):
            raise InvalidInputError("profile radii must be positive and finite")
        if self.ambient_dim < 1:
            raise InvalidInputError("ambient dimension must be >= 1")
        object.__setattr__(self, "points", pts)

    @property
    def zs(self) -> list[float]:
        return [z for z, _ in self.points]

    @property
    def nus(self) -> list[float]:
        return [nu for _, nu in self.points]

    @classmethod
    def of(cls, fam: BallFamily) -> "WeightProfile":
        return cls(tuple((b.z, b.nu) for b in fam.balls), fam.ambient_dim)

    def to_family(self) -> BallFamily:
        return BallFamily(self.ambient_dim, tuple(BallSpec(z, nu) for z, nu in self.points))


def nu_star(profile: WeightProfile) -> WeightProfile:
    """Tail minimum, computed right to left."""
    out = []
    running = math.inf
    for z, nu in reversed(profile.points):
        running = min(running, nu)
        out.append((z, running))
    return WeightProfile(tuple(reversed(out)), profile.ambient_dim)


def nu_star_star(profile: WeightProfile) -> WeightProfile:
    """Growth cap ``min_{w <= z} nu_star(w) N^(z - w)``.

    The input is passed through :func:`nu_star` first, so any profile is
    accepted. Minimization is done on log radii.
    """
    mono = nu_star(profile)
    log_n = math.log(profile.ambient_dim)
    logs = [math.log(nu) for nu in mono.nus]
    zs = mono.zs
    out = []
    prev = 0.0
    for i, z in enumerate(zs):
        capped = min((logs[j] + (z - zs[j]) * log_n for j in range(i)), default=math.inf)
        # untouched radii are copied, not round-tripped through exp/log
        nu = mono.nus[i] if logs[i] <= capped else math.exp(capped)
        # rounding repair: the exact envelope is nondecreasing
        nu = max(nu, prev)
        out.append((z, nu))
        prev = nu
    return WeightProfile(tuple(out), profile.ambient_dim)


def normalize_family(fam: BallFamily) -> BallFamily:
    """Family with the same body ``M`` whose radii satisfy ``1 <= kappa <= N``."""
    return nu_star_star(WeightProfile.of(fam)).to_family()
