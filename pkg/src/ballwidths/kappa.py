"""Pairwise exchange scales between weighted balls.

For two balls ``nu_a B_{p_a}`` and ``nu_b B_{p_b}`` the scale

    kappa = (nu_b / nu_a) ** (1 / (z_b - z_a)),   z = 1/p,

is the support size at which flat vectors hit both boundaries at once, i.e.
``nu_a kappa^{-z_a} = nu_b kappa^{-z_b}``.
"""

from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .balls import BallFamily, BallSpec, format_p

DEGENERATE_GAP = 1e-12
_LOG_MAX = math.log(sys.float_info.max)
_LOG_MIN = math.log(sys.float_info.min)


class KappaWarning(RuntimeWarning):
    """kappa was clamped to the float range or computed for a near-degenerate pair."""


@dataclass(frozen=True)
class KappaMatrix:
    values: np.ndarray
    family_ref: BallFamily


@dataclass(frozen=True)
class Violation:
    i: int
    j: int
    kappa: float

    def describe(self, fam: BallFamily) -> str:
        a, b = fam.balls[self.i], fam.balls[self.j]
        return (
            f"kappa(p={format_p(a.z)}, nu={a.nu!r}; p={format_p(b.z)}, nu={b.nu!r}) = {self.kappa!r} "
            f"outside [1, N={fam.ambient_dim}]"
        )


def log_kappa(a: BallSpec, b: BallSpec) -> float:
    """``log kappa`` for a pair with distinct exponents (no clamping)."""
    lo, hi = sorted((a, b), key=lambda s: (s.z, s.nu))
    return (math.log(hi.nu) - math.log(lo.nu)) / (hi.z - lo.z)


def kappa_pair(a: BallSpec, b: BallSpec) -> float:
    """Exchange scale of two balls; 1 when the exponents coincide.

    The arguments are put in canonical order first, so the result is exactly
    symmetric. Values beyond the float range are clamped with a
    :class:`KappaWarning`.
    """
    gap = abs(a.z - b.z)
    if gap == 0.0:
        return 1.0
    if gap < DEGENERATE_GAP:
        warnings.warn(
            f"exponent gap {gap:.3g} below {DEGENERATE_GAP:g}; treating the pair as equal-p",
            KappaWarning,
            stacklevel=2,
        )
        return 1.0
    lk = log_kappa(a, b)
    if lk > _LOG_MAX:
        warnings.warn("kappa overflows; clamped to the largest float", KappaWarning, stacklevel=2)
        return sys.float_info.max
    if lk < _LOG_MIN:
        warnings.warn("kappa underflows; clamped to the smallest normal float", KappaWarning, stacklevel=2)
        return sys.float_info.min
    return math.exp(lk)


def kappa_identity_check(a: BallSpec, b: BallSpec, tol: float = 1e-12) -> bool:
    """Whether ``nu_a kappa^{-z_a}`` and ``nu_b kappa^{-z_b}`` agree to relative ``tol``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = kappa_pair(a, b)
    lhs = a.nu * k ** (-a.z)
    rhs = b.nu * k ** (-b.z)
    return abs(lhs - rhs) <= tol * max(lhs, rhs)


def kappa_matrix(fam: BallFamily) -> KappaMatrix:
    K = len(fam)
    values = np.ones((K, K))
    for i in range(K):
        for j in range(i + 1, K):
            values[i, j] = values[j, i] = kappa_pair(fam.balls[i], fam.balls[j])
    return KappaMatrix(values, fam)


def check_condition4(fam: BallFamily, rtol: float = 1e-9) -> list[Violation]:
    """Pairs with ``kappa`` outside ``[1, N]``; empty when the family is normalized.

    ``rtol`` absorbs rounding in ``kappa``, whose relative error grows like
    ``eps / |z_a - z_b|``.
    """
    N = fam.ambient_dim
    out = []
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            k = kappa_pair(fam.balls[i], fam.balls[j])
            if k < 1.0 - rtol or k > N * (1.0 + rtol):
                out.append(Violation(i, j, k))
    return out
