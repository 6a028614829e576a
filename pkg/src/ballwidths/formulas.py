"""Order estimates for Kolmogorov widths of ball intersections.

All values are order estimates with implied constant 1: the true width
``d_n(M, l_q^N)`` is within constant factors (possibly depending on q) of the
returned number. The single-ball formulas used as building blocks and test
anchors live here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

from .balls import BallFamily, BallSpec, format_p, z_from_p
from .exceptions import (
    ConditionViolationError,
    DomainRangeError,
    InvalidInputError,
    PreconditionError,
    RedirectError,
    UnsupportedRegimeError,
)
from .kappa import check_condition4, kappa_pair
from .normalize import normalize_family

INF = math.inf
HALF = 0.5


class Case(str, Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"
    CASE3 = "Case3"
    CASE4 = "Case4"
    CASE5 = "Case5"
    LINFTY = "LInfty"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class WidthQuery:
    """Identifies ``d_n(M, l_q^N)`` with ``zq = 1/q`` (0 for ``q = inf``)."""

    n: int
    N: int
    zq: float

    def __post_init__(self):
        for name in ("n", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise InvalidInputError(f"{name} must be an integer, got {v!r}")
        if self.n < 0:
            raise DomainRangeError(f"n must be >= 0, got {self.n}")
        if self.N < 1:
            raise InvalidInputError(f"N must be >= 1, got {self.N}")
        if not (0.0 <= self.zq <= 1.0):
            raise InvalidInputError(f"need 1 <= q <= inf, got 1/q = {self.zq!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "zq", float(self.zq))

    @classmethod
    def from_q(cls, n: int, N: int, q: float | str) -> "WidthQuery":
        return cls(n, N, z_from_p(q))

    @property
    def q(self) -> float:
        return INF if self.zq == 0.0 else 1.0 / self.zq


@dataclass(frozen=True)
class RegimePartition:
    """Index sets of a family relative to a target exponent.

    For ``q <= 2`` only the first two groups are used (``p > q`` / ``p < q``);
    for ``q > 2`` the three groups are ``p > q``, ``2 < p < q`` and ``p < 2``.
    The primed sets are the closed versions.
    """

    a1_strict: tuple[int, ...]
    a2_strict: tuple[int, ...]
    a3_strict: tuple[int, ...]
    a1p: tuple[int, ...]
    a2p: tuple[int, ...]
    a3p: tuple[int, ...]


@dataclass
class EstimateResult:
    value: float
    case_tag: Case
    phi_breakdown: dict = field(default_factory=dict)
    attaining: tuple = (None, None)
    term: str = ""
    warnings: list = field(default_factory=list)
    family: Optional[BallFamily] = None
    query: Optional[WidthQuery] = None

    @property
    def alpha_star(self) -> Optional[BallSpec]:
        i = self.attaining[0]
        return None if i is None else self.family.balls[i]

    @property
    def beta_star(self) -> Optional[BallSpec]:
        j = self.attaining[1]
        return None if j is None else self.family.balls[j]


def partition(fam: BallFamily, zq: float) -> RegimePartition:
    zs = [b.z for b in fam.balls]
    idx = range(len(zs))
    if zq >= HALF:
        return RegimePartition(
            a1_strict=tuple(i for i in idx if zs[i] < zq),
            a2_strict=tuple(i for i in idx if zs[i] > zq),
            a3_strict=(),
            a1p=tuple(i for i in idx if zs[i] <= zq),
            a2p=tuple(i for i in idx if zs[i] >= zq),
            a3p=(),
        )
    return RegimePartition(
        a1_strict=tuple(i for i in idx if zs[i] < zq),
        a2_strict=tuple(i for i in idx if zq < zs[i] < HALF),
        a3_strict=tuple(i for i in idx if zs[i] > HALF),
        a1p=tuple(i for i in idx if zs[i] <= zq),
        a2p=tuple(i for i in idx if zq <= zs[i] <= HALF),
        a3p=tuple(i for i in idx if zs[i] >= HALF),
    )


# --- closed-form terms shared by the evaluators and the identity tests ---


def euclidean_bracket(n: int, N: int, zq: float) -> float:
    """``min(1, n^{-1/2} N^{1/q})``; equal to 1 for ``n = 0``."""
    if n == 0:
        return 1.0
    return min(1.0, n**-0.5 * N**zq)


def case1_term(b: BallSpec, N: int, zq: float) -> float:
    return b.nu * N ** (zq - b.z)


def interpolation_term(a: BallSpec, b: BallSpec, s_z: float) -> float:
    """``nu_a kappa_ab^{s_z - z_a}``: radius of the ``l_{1/s_z}`` ball containing both."""
    return a.nu * kappa_pair(a, b) ** (s_z - a.z)


def gluskin_term(a: BallSpec, m: float, zq: float) -> float:
    return a.nu * m ** ((a.z - zq) / (HALF - zq))


def euclidean_term(a: BallSpec, b: BallSpec, m: float) -> float:
    return interpolation_term(a, b, HALF) * m


def linf_bracket(n: int, N: int, log: Callable[[float], float] = math.log) -> float:
    """``min(1, n^{-1} log(2N/n))``; equal to 1 for ``n = 0``."""
    if n == 0:
        return 1.0
    return min(1.0, log(2 * N / n) / n)


def linf_term(a: BallSpec, bracket: float) -> float:
    return a.nu * bracket**a.z


# --- single-ball formulas ---


def pietsch_stesin(zp: float, zq: float, n: int, N: int) -> float:
    """Exact width ``(N - n)^{1/q - 1/p}`` of the unit p-ball in ``l_q^N``, ``q <= p``.

    ``n = N`` returns 0 (the whole space approximates exactly).
    """
    if zq < zp:
        raise InvalidInputError("exact formula requires q <= p")
    if not (0 <= n <= N):
        raise DomainRangeError(f"need 0 <= n <= N, got n={n}, N={N}")
    if n == N:
        return 0.0
    return (N - n) ** (zq - zp)


def gluskin_rate_exponent(zp: float, zq: float) -> float:
    return min(1.0, (zp - zq) / (HALF - zq))


def gluskin_single_ball(zp: float, zq: float, n: int, N: int) -> float:
    """Order of ``d_n(B_p^N, l_q^N)`` for ``p <= q < inf`` and ``n <= N/2``."""
    if zp < zq:
        raise InvalidInputError("single-ball rate requires p <= q")
    if zq == 0.0:
        raise UnsupportedRegimeError("single-ball rate requires q < inf")
    if not (0 <= n and 2 * n <= N):
        raise DomainRangeError(f"need 0 <= n <= N/2, got n={n}, N={N}")
    if zq >= HALF:
        return 1.0
    return euclidean_bracket(n, N, zq) ** gluskin_rate_exponent(zp, zq)


def garnaev_gluskin(zp: float, n: int, N: int, log: Callable[[float], float] = math.log) -> float:
    """Order of ``d_n(B_p^N, l_inf^N)`` for ``p >= 2`` and ``n <= N - 1``."""
    if zp > HALF:
        raise UnsupportedRegimeError("no order estimate in l_inf for p < 2")
    if not (0 <= n <= N - 1):
        raise DomainRangeError(f"need 0 <= n <= N-1, got n={n}, N={N}")
    if n == 0:
        return 1.0
    return min(1.0, n ** (-zp) * log(1 + N / n) ** zp)


# --- family evaluators ---


def _argmin(candidates):
    """First (value, key) pair with the smallest value; (inf, None) when empty."""
    best_v, best_k = INF, None
    for v, k in candidates:
        if v < best_v:
            best_v, best_k = v, k
    return best_v, best_k


def _require_normalized(fam: BallFamily):
    bad = check_condition4(fam)
    if bad:
        raise ConditionViolationError(
            "condition 1 <= kappa <= N fails: " + "; ".join(v.describe(fam) for v in bad)
            + " (normalize the family first)",
            bad,
        )


def _check_dims(fam: BallFamily, query: WidthQuery):
    if fam.ambient_dim != query.N:
        raise InvalidInputError(f"family lives in R^{fam.ambient_dim} but the query has N={query.N}")


def select_case(fam: BallFamily, zq: float) -> Case:
    """Case label for finite ``q``; overlapping hypotheses resolve to the lowest case."""
    zs = [b.z for b in fam.balls]
    if all(z <= zq for z in zs):
        return Case.CASE1
    if zq >= HALF:
        return Case.CASE2 if all(z >= zq for z in zs) else Case.CASE3
    return Case.CASE4 if all(z >= HALF for z in zs) else Case.CASE5


def case3_value(fam: BallFamily, zq: float):
    part = partition(fam, zq)
    balls = fam.balls
    return _argmin(
        (interpolation_term(balls[i], balls[j], zq), (i, j)) for i in part.a1p for j in part.a2p
    )


def case5_phis(fam: BallFamily, n: int, N: int, zq: float) -> dict:
    """``{"phi1": (value, (i, j)), "phi2": (value, (i, None)), "phi3": ...}``."""
    part = partition(fam, zq)
    balls = fam.balls
    m = euclidean_bracket(n, N, zq)
    phi1 = _argmin(
        (interpolation_term(balls[i], balls[j], zq), (i, j))
        for i in part.a1p
        for j in sorted(set(part.a2p) | set(part.a3p))
    )
    phi2 = _argmin((gluskin_term(balls[i], m, zq), (i, None)) for i in part.a2p)
    phi3 = _argmin(
        (euclidean_term(balls[i], balls[j], m), (i, j))
        for i in sorted(set(part.a1p) | set(part.a2p))
        for j in part.a3p
    )
    return {"phi1": phi1, "phi2": phi2, "phi3": phi3}


def theorem1_estimate(fam: BallFamily, query: WidthQuery) -> EstimateResult:
    """Order estimate of ``d_n(M, l_q^N)`` for ``q < inf`` and ``n <= N/2``.

    The family must satisfy ``1 <= kappa <= N`` for every pair (see
    :func:`ballwidths.normalize.normalize_family`).
    """
    n, N, zq = query.n, query.N, query.zq
    if zq == 0.0:
        raise RedirectError("q = inf: use theorem2_estimate")
    if 2 * n > N:
        raise DomainRangeError(f"need n <= N/2, got n={n}, N={N}")
    _check_dims(fam, query)
    _require_normalized(fam)

    balls = fam.balls
    case = select_case(fam, zq)
    res = EstimateResult(value=INF, case_tag=case, family=fam, query=query)
    if case is Case.CASE1:
        v, i = _argmin((case1_term(b, N, zq), i) for i, b in enumerate(balls))
        res.value, res.attaining, res.term = v, (i, None), "case1"
    elif case is Case.CASE2:
        v, i = _argmin((b.nu, i) for i, b in enumerate(balls))
        res.value, res.attaining, res.term = v, (i, None), "case2"
    elif case is Case.CASE3:
        v, ij = case3_value(fam, zq)
        res.value, res.attaining, res.term = v, ij, "case3"
    elif case is Case.CASE4:
        m = euclidean_bracket(n, N, zq)
        v, i = _argmin((b.nu * m, i) for i, b in enumerate(balls))
        res.value, res.attaining, res.term = v, (i, None), "case4"
    else:
        phis = case5_phis(fam, n, N, zq)
        res.phi_breakdown = {k: v for k, (v, _) in phis.items()}
        v, name = _argmin((phis[k][0], k) for k in ("phi1", "phi2", "phi3"))
        if name is None:
            raise RuntimeError("internal error: all three competing expressions are infinite")
        res.value, res.attaining, res.term = v, phis[name][1], name
    return res


def theorem2_estimate(
    fam: BallFamily, query: WidthQuery, log: Callable[[float], float] = math.log
) -> EstimateResult:
    """Order estimate of ``d_n(M, l_inf^N)`` for families with every ``p >= 2``."""
    n, N = query.n, query.N
    if query.zq != 0.0:
        raise PreconditionError("theorem2_estimate handles q = inf only")
    low = [b for b in fam.balls if b.z > HALF]
    if low:
        raise UnsupportedRegimeError(
            "no order estimate in l_inf for balls with p < 2: "
            + ", ".join(f"p={format_p(b.z)}" for b in low)
        )
    if n > N - 1:
        raise DomainRangeError(f"need n <= N-1, got n={n}, N={N}")
    _check_dims(fam, query)
    _require_normalized(fam)

    bracket = linf_bracket(n, N, log)
    v, i = _argmin((linf_term(b, bracket), i) for i, b in enumerate(fam.balls))
    return EstimateResult(
        value=v, case_tag=Case.LINFTY, attaining=(i, None), term="linf", family=fam, query=query
    )


def estimate(
    fam: BallFamily,
    query: WidthQuery,
    auto_normalize: bool = False,
    log: Callable[[float], float] = math.log,
) -> EstimateResult:
    """Normalize (optionally), then dispatch on ``q``.

    Without ``auto_normalize`` a family violating ``1 <= kappa <= N`` is
    rejected with :class:`ConditionViolationError`.
    """
    warnings_ = []
    _check_dims(fam, query)
    if auto_normalize:
        normed = normalize_family(fam)
        changed = [format_p(a.z) for a, b in zip(fam.balls, normed.balls) if a.nu != b.nu]
        if changed:
            warnings_.append("normalized radii for p=" + ",".join(changed))
        fam = normed
    if query.zq == 0.0:
        res = theorem2_estimate(fam, query, log=log)
    else:
        res = theorem1_estimate(fam, query)
    res.warnings = warnings_ + res.warnings
    return res


def term_value(res: EstimateResult) -> float:
    """Recompute the attained expression from the reported indices."""
    fam, q = res.family, res.query
    i, j = res.attaining
    a = fam.balls[i]
    b = None if j is None else fam.balls[j]
    if res.term == "case1":
        return case1_term(a, q.N, q.zq)
    if res.term == "case2":
        return a.nu
    if res.term in ("case3", "phi1"):
        return interpolation_term(a, b, q.zq)
    if res.term == "case4":
        return a.nu * euclidean_bracket(q.n, q.N, q.zq)
    if res.term == "phi2":
        return gluskin_term(a, euclidean_bracket(q.n, q.N, q.zq), q.zq)
    if res.term == "phi3":
        return euclidean_term(a, b, euclidean_bracket(q.n, q.N, q.zq))
    if res.term == "linf":
        return linf_term(a, linf_bracket(q.n, q.N))
    raise ValueError(f"unknown term {res.term!r}")
