"""Weighted lp balls, their finite intersections and flat-vector extremals.

Exponents are carried as ``z = 1/p`` throughout, so ``p = inf`` is the plain
value ``z = 0`` and differences of exponents never involve infinities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainRangeError, InvalidInputError

# above this p the power sum is accumulated in log space
_LOG_DOMAIN_P = 64.0
# power sums below this are recomputed with scaling to avoid precision loss
_SAFE_MIN = 1e-250


def z_from_p(p: float | str) -> float:
    """Inverse exponent for ``p`` in ``[1, inf]``; ``"inf"`` is accepted."""
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity"):
            return 0.0
        p = float(p)
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidInputError(f"exponent p must satisfy 1 <= p <= inf, got {p!r}")
    return 0.0 if math.isinf(p) else 1.0 / p


def p_from_z(z: float) -> float:
    return math.inf if z == 0.0 else 1.0 / z


def format_p(z: float) -> str:
    """Short label for the exponent ``1/z`` (``"inf"`` for ``z = 0``)."""
    return "inf" if z == 0.0 else f"{1.0 / z:.12g}"


@dataclass(frozen=True)
class BallSpec:
    """One weighted ball ``nu * B_p`` stored through ``z = 1/p``."""

    z: float
    nu: float

    def __post_init__(self):
        z, nu = float(self.z), float(self.nu)
        if not (0.0 <= z <= 1.0):
            raise InvalidInputError(f"inverse exponent z must lie in [0, 1], got {z!r}")
        if not (math.isfinite(nu) and nu > 0.0):
            raise InvalidInputError(f"radius nu must be positive and finite, got {nu!r}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def from_p(cls, p: float | str, nu: float) -> "BallSpec":
        return cls(z_from_p(p), nu)

    @property
    def p(self) -> float:
        return p_from_z(self.z)

    def __repr__(self):
        return f"BallSpec(p={format_p(self.z)}, nu={self.nu!r})"


@dataclass(frozen=True)
class BallFamily:
    """The body ``M`` cut out by finitely many weighted balls in ``R^N``.

    ``balls`` is kept sorted by ``z`` with pairwise distinct exponents. Use
    :meth:`from_balls` to build a family from unsorted input that may repeat
    an exponent.
    """

    ambient_dim: int
    balls: tuple[BallSpec, ...]

    def __post_init__(self):
        if isinstance(self.ambient_dim, bool) or int(self.ambient_dim) != self.ambient_dim:
            raise InvalidInputError(f"ambient dimension must be an integer, got {self.ambient_dim!r}")
        if self.ambient_dim < 1:
            raise InvalidInputError(f"ambient dimension must be >= 1, got {self.ambient_dim}")
        balls = tuple(self.balls)
        if not balls:
            raise InvalidInputError("family must be non-empty")
        for b in balls:
            if not isinstance(b, BallSpec):
                raise InvalidInputError(f"expected BallSpec, got {type(b).__name__}")
        zs = [b.z for b in balls]
        if any(z1 >= z2 for z1, z2 in zip(zs, zs[1:])):
            raise InvalidInputError(
                "balls must be sorted by z with distinct exponents; use BallFamily.from_balls"
            )
        object.__setattr__(self, "ambient_dim", int(self.ambient_dim))
        object.__setattr__(self, "balls", balls)

    @classmethod
    def from_balls(cls, ambient_dim: int, balls: Iterable[BallSpec]) -> "BallFamily":
        """Sort by ``z`` and collapse repeated exponents to the smallest radius."""
        best: dict[float, BallSpec] = {}
        duplicates = False
        for b in balls:
            if b.z in best:
                duplicates = True
                if b.nu < best[b.z].nu:
                    best[b.z] = b
            else:
                best[b.z] = b
        if duplicates:
            warnings.warn(
                "repeated exponents collapsed to the ball with the smallest radius",
                UserWarning,
                stacklevel=2,
            )
        return cls(ambient_dim, tuple(best[z] for z in sorted(best)))

    @classmethod
    def from_pairs(cls, ambient_dim: int, pairs: Iterable[tuple[float | str, float]]) -> "BallFamily":
        """Build from ``(p, nu)`` pairs, e.g. ``[("inf", 1), (1, 2)]``."""
        return cls.from_balls(ambient_dim, (BallSpec.from_p(p, nu) for p, nu in pairs))

    def __len__(self):
        return len(self.balls)

    def __iter__(self):
        return iter(self.balls)

    def __getitem__(self, i):
        return self.balls[i]

    @property
    def zs(self) -> np.ndarray:
        return np.array([b.z for b in self.balls])

    @property
    def nus(self) -> np.ndarray:
        return np.array([b.nu for b in self.balls])

    def with_nus(self, nus: Sequence[float]) -> "BallFamily":
        return BallFamily(self.ambient_dim, tuple(BallSpec(b.z, v) for b, v in zip(self.balls, nus)))

    def with_dim(self, ambient_dim: int) -> "BallFamily":
        return BallFamily(ambient_dim, self.balls)

    def scaled(self, c: float) -> "BallFamily":
        return self.with_nus([c * b.nu for b in self.balls])


@dataclass(frozen=True)
class TruncatedOctahedron:
    """``V_k``: hull of all sign/permutation images of the vector with k ones.

    Equivalently the cube ``B_inf`` cut by ``k * B_1``.
    """

    k: int
    ambient_dim: int

    def __post_init__(self):
        if not (1 <= self.k <= self.ambient_dim):
            raise DomainRangeError(f"need 1 <= k <= N, got k={self.k}, N={self.ambient_dim}")

    def vertices(self) -> np.ndarray:
        """All ``2^k * C(N, k)`` distinct vertices as rows."""
        N, k = self.ambient_dim, self.k
        rows = []
        for support in combinations(range(N), k):
            for signs in product((-1.0, 1.0), repeat=k):
                v = np.zeros(N)
                v[list(support)] = signs
                rows.append(v)
        return np.array(rows)


def _as_points(x, ambient_dim: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim < 1:
        raise InvalidInputError(f"expected a vector or an array of row vectors, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("coordinates must be finite")
    if ambient_dim is not None and arr.shape[-1] != ambient_dim:
        raise InvalidInputError(f"dimension mismatch: vector has {arr.shape[-1]} coordinates, expected {ambient_dim}")
    return arr


def lp_norm(x, z: float):
    """The norm ``||x||_{1/z}`` over the last axis.

    ``z = 0`` gives the max-modulus norm. Accepts a single vector or a stack of
    row vectors; large exponents are handled without overflow.
    """
    arr = _as_points(x)
    if not (0.0 <= z <= 1.0):
        raise InvalidInputError(f"inverse exponent z must lie in [0, 1], got {z!r}")
    a = np.abs(arr)
    if z == 0.0:
        return a.max(axis=-1)
    if z == 1.0:
        return a.sum(axis=-1)
    p = 1.0 / z
    if p <= _LOG_DOMAIN_P:
        # unscaled power sum; rows that overflow or underflow are redone with max scaling
        # a is a fresh array, so the powers overwrite it
        with np.errstate(over="ignore", under="ignore"):
            np.power(a, p, out=a)
            total = np.sum(a, axis=-1)
        ok = np.isfinite(total) & (total > _SAFE_MIN)
        out = total**z
        if out.ndim:
            out[~ok] = _scaled_norm(np.abs(arr[~ok]), z)
        elif not ok:
            out = _scaled_norm(np.abs(arr), z)
    else:
        out = _scaled_norm(a, z)
    return out if np.ndim(out) else float(out)


def _scaled_norm(a: np.ndarray, z: float):
    p = 1.0 / z
    top = a.max(axis=-1, keepdims=True)
    safe = np.where(top > 0.0, top, 1.0)
    if p > _LOG_DOMAIN_P:
        with np.errstate(divide="ignore"):
            logs = p * np.log(a / safe)
        total = np.exp(z * np.logaddexp.reduce(logs, axis=-1))
    else:
        total = np.sum((a / safe) ** p, axis=-1) ** z
    return np.squeeze(top, axis=-1) * total


def member(x, fam: BallFamily, slack: float = 0.0):
    """Whether ``x`` lies in every ball ``nu * B_p`` (inflated by ``1 + slack``).

    Returns a bool for a single vector and a boolean array for a stack of rows.
    """
    if slack < 0:
        raise InvalidInputError("slack must be nonnegative")
    arr = _as_points(x, fam.ambient_dim)
    if arr.ndim == 1:
        return all(lp_norm(arr, b.z) <= b.nu * (1.0 + slack) for b in fam.balls)
    flat = arr.reshape(-1, arr.shape[-1])
    ok = np.ones(len(flat), dtype=bool)
    for b in fam.balls:
        # rows already outside are not evaluated again
        idx = np.flatnonzero(ok)
        ok[idx] = lp_norm(flat[idx], b.z) <= b.nu * (1.0 + slack)
    return ok.reshape(arr.shape[:-1])


def vk_member(x, vk: TruncatedOctahedron, slack: float = 0.0):
    """Membership in ``V_k`` through its description ``||x||_inf <= 1, ||x||_1 <= k``."""
    if slack < 0:
        raise InvalidInputError("slack must be nonnegative")
    arr = _as_points(x, vk.ambient_dim)
    a = np.abs(arr)
    ok = (a.max(axis=-1) <= 1.0 + slack) & (a.sum(axis=-1) <= vk.k * (1.0 + slack))
    return bool(ok) if ok.ndim == 0 else ok


def boundary_scale(fam: BallFamily, directions) -> np.ndarray:
    """Largest ``t`` with ``t * u`` in ``M`` for each (nonzero) direction ``u``."""
    u = _as_points(directions, fam.ambient_dim)
    scales = np.full(u.shape[:-1], np.inf)
    for b in fam.balls:
        scales = np.minimum(scales, b.nu / lp_norm(u, b.z))
    return scales


def flat_sup_norm(fam: BallFamily, zq: float, m: int) -> tuple[float, int]:
    """Largest q-norm of a flat vector of ``M`` supported on at most ``m`` coordinates.

    A flat vector has ``k`` nonzero entries of equal modulus ``t``; within ``M``
    the best ``t`` is ``min_alpha nu_alpha k^{-z_alpha}``, so the value is
    ``max_k k^{zq} * min_alpha nu_alpha k^{-z_alpha}``.

    Returns
    -------
    value, k : float, int
        The supremum over the flat family and the smallest maximizing ``k``.
    """
    if isinstance(m, bool) or int(m) != m or not (1 <= m <= fam.ambient_dim):
        raise DomainRangeError(f"need 1 <= m <= N={fam.ambient_dim}, got m={m}")
    ks = np.arange(1, int(m) + 1, dtype=float)
    heights = np.min([b.nu * ks ** (-b.z) for b in fam.balls], axis=0)
    values = ks**zq * heights
    i = int(np.argmax(values))
    return float(values[i]), i + 1
