"""Desk-scale numerical checks that bracket the width of a ball intersection.

Rigorous pieces
    * :func:`inscribed_lower_bound` -- the largest cube inside ``M`` together
      with the exact width of the cube.
    * :func:`coordinate_holder_bound` -- distance of ``M`` to a coordinate
      subspace, bounded through Hoelder interpolation between pairs of balls.
    * :func:`coordinate_upper_bound` -- the same distance evaluated on flat
      vectors; exact whenever :func:`coordinate_bound_is_exact` says so.

Heuristic pieces
    * :func:`brute_force_width` -- grid search over subspaces for ``N <= 4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import minimize

from .balls import BallFamily, boundary_scale, flat_sup_norm, lp_norm
from .exceptions import DomainRangeError, InvalidInputError
from .formulas import EstimateResult, WidthQuery, estimate, interpolation_term
from .normalize import normalize_family

BRUTE_MAX_N = 4
BRUTE_MAX_n = 2
DEFAULT_SEED = 20240611
_FRAME_CHUNK = 64


@dataclass(frozen=True)
class Resolution:
    """Grid parameters for :func:`brute_force_width`."""

    boundary_points: int = 1000
    random_frames: int = 200
    angle_steps: int = 720
    refine_top: int = 6
    refine_steps: tuple = (0.1, 0.03, 0.01, 0.003, 0.001)
    refine_sweeps: int = 3
    sup_restarts: int = 3
    exchange_rounds: int = 4
    irls_iters: int = 20


class BruteForceBounds(NamedTuple):
    lower: float
    upper: float


@dataclass
class SandwichReport:
    upper: float
    lower: float
    phi: float
    ratios: dict = field(default_factory=dict)
    method_tags: dict = field(default_factory=dict)
    heuristic_lower: Optional[float] = None
    coordinate_flat: Optional[float] = None
    estimate: Optional[EstimateResult] = None
    warnings: list = field(default_factory=list)


def _codim(fam: BallFamily, query: WidthQuery) -> int:
    if fam.ambient_dim != query.N:
        raise InvalidInputError(f"family lives in R^{fam.ambient_dim} but the query has N={query.N}")
    if not (0 <= query.n <= query.N):
        raise DomainRangeError(f"need 0 <= n <= N, got n={query.n}, N={query.N}")
    return query.N - query.n


def coordinate_upper_bound(fam: BallFamily, query: WidthQuery) -> float:
    """Flat-family distance of ``M`` to the span of ``n`` coordinate vectors."""
    m = _codim(fam, query)
    if m == 0:
        return 0.0
    return flat_sup_norm(fam, query.zq, m)[0]


def coordinate_bound_is_exact(fam: BallFamily, zq: float) -> bool:
    """True when flat vectors realize the coordinate-subspace distance.

    This holds when every ``p >= q`` (each ball's own extremal is the flat
    vector of full support), when every ``p <= q`` (extremal at ``k = 1``), and
    for a single ball.
    """
    zs = [b.z for b in fam.balls]
    return len(zs) == 1 or all(z <= zq for z in zs) or all(z >= zq for z in zs)


def coordinate_holder_bound(fam: BallFamily, query: WidthQuery) -> float:
    """Certified upper bound on the distance of ``M`` to a coordinate subspace."""
    m = _codim(fam, query)
    if m == 0:
        return 0.0
    zq = query.zq
    balls = fam.balls
    cands = [b.nu * m ** (zq - b.z) for b in balls if b.z <= zq]
    cands += [b.nu for b in balls if b.z >= zq]
    cands += [
        interpolation_term(a, b, zq)
        for a in balls
        for b in balls
        if a.z < zq < b.z
    ]
    return min(cands)


def inscribed_lower_bound(fam: BallFamily, query: WidthQuery) -> float:
    """``c (N - n)^{1/q}`` where ``c B_inf`` is the largest cube inside ``M``."""
    m = _codim(fam, query)
    N = query.N
    c = min(b.nu * N ** (-b.z) for b in fam.balls)
    if m == 0:
        return 0.0
    return c * m**query.zq


def vk_inclusion_constant(fam: BallFamily, k: int, scale: float) -> float:
    """Smallest ``c`` with ``scale * V_k`` inside ``c * M``.

    ``V_k`` is the hull of flat vectors with k unit entries and ``M`` is convex
    and symmetric, so checking the vertices is enough.
    """
    if not (1 <= k <= fam.ambient_dim):
        raise DomainRangeError(f"need 1 <= k <= N, got k={k}")
    return max(scale * k**b.z / b.nu for b in fam.balls)


# --- brute-force subspace search ---


def _distances(X: np.ndarray, U: Optional[np.ndarray], zq: float, iters: int) -> np.ndarray:
    """q-distance of each row of ``X`` to the column span of ``U``.

    ``U`` is one orthonormal frame ``(N, n)`` or a stack ``(F, N, n)``; the
    result has shape ``(P,)`` or ``(F, P)``. Exact for q in {1, 2}; otherwise
    an iteratively reweighted least-squares estimate, which can only overshoot
    the true distance.
    """
    if U is None or U.shape[-1] == 0:
        return lp_norm(X, zq)
    single = U.ndim == 2
    Us = U[None] if single else U
    out = np.concatenate(
        [_frame_distances(X, Us[s:s + _FRAME_CHUNK], zq, iters) for s in range(0, len(Us), _FRAME_CHUNK)]
    )
    return out[0] if single else out


def _solve_small(A, b):
    """Batched solve of ``A c = b`` for 1x1 or 2x2 systems, by Cramer's rule."""
    if A.shape[-1] == 1:
        return b / A[..., 0]
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    c0 = (b[..., 0] * A[..., 1, 1] - b[..., 1] * A[..., 0, 1]) / det
    c1 = (A[..., 0, 0] * b[..., 1] - A[..., 1, 0] * b[..., 0]) / det
    return np.stack([c0, c1], axis=-1)


def _frame_distances(X, U, zq, iters):
    Ut = U.transpose(0, 2, 1)
    C = X @ U
    R = X - C @ Ut
    if zq == 0.5:
        return np.sqrt(np.sum(R * R, axis=-1))
    F, N, n = U.shape
    if zq == 1.0:
        # some optimal residual vanishes on n coordinates
        best = np.full(R.shape[:2], np.inf)
        for S in combinations(range(N), n):
            S = list(S)
            US = U[:, S, :]
            ok = np.abs(np.linalg.det(US)) > 1e-12
            US = np.where(ok[:, None, None], US, np.eye(n))
            A = np.broadcast_to(US[:, None], (F, X.shape[0], n, n))
            C = _solve_small(A, np.broadcast_to(X[None, :, S], (F, X.shape[0], n)))
            vals = np.abs(X - C @ Ut).sum(axis=-1)
            vals[~ok] = np.inf
            best = np.minimum(best, vals)
        return best
    q = 1.0 / zq
    best = lp_norm(R, zq)
    floor = 1e-9 * np.maximum(np.abs(X).max(axis=-1), 1e-300)[None, :, None]
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    prods = {(i, j): (U[:, :, i] * U[:, :, j])[..., None] for i, j in pairs}
    for _ in range(iters):
        Wt = np.maximum(np.abs(R), floor) ** (q - 2.0)
        A = np.empty(R.shape[:2] + (n, n))
        for i, j in pairs:
            A[..., i, j] = A[..., j, i] = (Wt @ prods[i, j])[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            C_ls = _solve_small(A, (Wt * X) @ U)
        # singular weights (residual already zero) keep the current coefficients
        C_ls = np.where(np.isfinite(C_ls).all(axis=-1, keepdims=True), C_ls, C)
        step = C_ls - C
        # reweighted step vs Newton step (the same direction scaled by 1/(q-1))
        C_nt = C + step / (q - 1.0)
        R_ls, R_nt = X - C_ls @ Ut, X - C_nt @ Ut
        v_ls, v_nt = lp_norm(R_ls, zq), lp_norm(R_nt, zq)
        take_nt = v_nt < v_ls
        C = np.where(take_nt[..., None], C_nt, C_ls)
        R = np.where(take_nt[..., None], R_nt, R_ls)
        best = np.minimum(best, np.minimum(v_ls, v_nt))
        if np.max(np.abs(step)) < 1e-13 * (1.0 + np.max(np.abs(C))):
            break
    return best


def _structured_directions(N: int) -> np.ndarray:
    rows = []
    for v in product((-1.0, 0.0, 1.0), repeat=N):
        v = np.array(v)
        nz = np.flatnonzero(v)
        if nz.size and v[nz[0]] > 0:
            rows.append(v / np.linalg.norm(v))
    return np.array(rows)


def _frame_grid(N: int, n: int, res: Resolution, rng: np.random.Generator) -> list[np.ndarray]:
    dirs = _structured_directions(N)
    frames = []
    if n == 1:
        frames += [d[:, None] for d in dirs]
        if N == 2:
            theta = np.pi * np.arange(res.angle_steps) / res.angle_steps
            frames += [np.array([[math.cos(t)], [math.sin(t)]]) for t in theta]
        else:
            g = rng.standard_normal((res.random_frames, N))
            frames += [(v / np.linalg.norm(v))[:, None] for v in g]
    else:
        for a, b in combinations(range(len(dirs)), n):
            Q, R = np.linalg.qr(dirs[[a, b]].T)
            if abs(R[-1, -1]) > 1e-9:
                frames.append(Q)
        for _ in range(res.random_frames):
            frames.append(np.linalg.qr(rng.standard_normal((N, n)))[0])
    return frames


def _flat_candidates(fam: BallFamily) -> np.ndarray:
    N = fam.ambient_dim
    rows = []
    for k in range(1, N + 1):
        t = min(b.nu * k ** (-b.z) for b in fam.balls)
        for S in combinations(range(N), k):
            for signs in product((-1.0, 1.0), repeat=k):
                v = np.zeros(N)
                v[list(S)] = t * np.array(signs)
                rows.append(v)
    return np.array(rows)


def boundary_sample(fam: BallFamily, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points on the boundary of ``M`` along dense and sparse random directions."""
    N = fam.ambient_dim
    U = rng.standard_normal((count, N))
    sparse = np.arange(count) % 2 == 1
    sizes = rng.integers(1, N + 1, size=count)
    for i in np.flatnonzero(sparse):
        drop = rng.permutation(N)[sizes[i]:]
        U[i, drop] = 0.0
    return U * boundary_scale(fam, U)[:, None]


def _rotation_moves(U: np.ndarray, angle: float) -> np.ndarray:
    """All frames obtained by turning one basis vector towards one complement direction."""
    N, n = U.shape
    Q = np.linalg.qr(np.hstack([U, np.eye(N)]))[0][:, n:N]
    c, s = math.cos(angle), math.sin(angle)
    moves = []
    for i in range(n):
        for j in range(N - n):
            for sgn in (1.0, -1.0):
                V = U.copy()
                V[:, i] = c * U[:, i] + sgn * s * Q[:, j]
                moves.append(V)
    return np.array(moves)


def _refine_sup(fam: BallFamily, U, zq: float, starts: np.ndarray, iters: int):
    """Local ascent of the distance to ``span(U)`` over the boundary of ``M``.

    Returns the best value and the boundary point attaining it.
    """

    def point(u):
        return u * boundary_scale(fam, u[None, :])[0]

    def neg(u):
        if not np.any(u):
            return 0.0
        return -float(_distances(point(u)[None, :], U, zq, iters)[0])

    best, arg = -1.0, None
    for x0 in starts:
        r = minimize(
            neg, x0, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 200 * len(x0)},
        )
        for u, v in ((r.x, -r.fun), (x0, -neg(x0))):
            if v > best:
                best, arg = v, point(u)
    return best, arg


def _orbit(x: np.ndarray) -> np.ndarray:
    """All coordinate permutations and sign changes of ``x``."""
    perms = np.array(list(permutations(x)))
    signs = np.array(list(product((-1.0, 1.0), repeat=len(x))))
    return np.unique((perms[:, None, :] * signs[None, :, :]).reshape(-1, len(x)), axis=0)


def brute_force_width(
    fam: BallFamily,
    query: WidthQuery,
    resolution: Resolution = Resolution(),
    seed: int = DEFAULT_SEED,
) -> BruteForceBounds:
    """Grid search for the best ``n``-dimensional subspace, ``N <= 4``, ``n <= 2``.

    The search alternates between descending over frames against a witness
    set of boundary points of ``M`` and ascending over ``M`` for the current
    best frame, whose worst point (with its symmetry orbit) joins the witness
    set.

    ``upper`` is the refined worst-case distance of ``M`` to the best subspace
    found, and converges to the width from above as the grid is refined.
    ``lower`` is grid-certified only: the smallest worst-case distance over the
    evaluated subspaces, measured on the initial witness sample.
    """
    N, n, zq = query.N, query.n, query.zq
    if fam.ambient_dim != N:
        raise InvalidInputError(f"family lives in R^{fam.ambient_dim} but the query has N={N}")
    if N > BRUTE_MAX_N or not (0 <= n <= BRUTE_MAX_n):
        raise DomainRangeError(f"brute force supports N <= {BRUTE_MAX_N}, n <= {BRUTE_MAX_n}")
    if zq == 0.0:
        raise InvalidInputError("brute force supports q < inf only")
    if n >= N:
        return BruteForceBounds(0.0, 0.0)

    rng = np.random.default_rng(seed)
    W = np.vstack([_flat_candidates(fam), boundary_sample(fam, resolution.boundary_points, rng)])
    n0 = len(W)
    iters = resolution.irls_iters

    def top_points(U):
        d = _distances(W, U, zq, iters)
        return W[np.argsort(-d, kind="stable")[: resolution.sup_restarts]]

    if n == 0:
        lower = float(lp_norm(W, zq).max())
        upper = _refine_sup(fam, None, zq, top_points(None), iters)[0]
        return BruteForceBounds(lower, float(max(upper, lower)))

    frames = np.array(_frame_grid(N, n, resolution, rng))
    scores = _distances(W, frames, zq, iters).max(axis=1)
    lower = float(scores.min())
    candidates = [frames[i] for i in np.argsort(scores, kind="stable")[: resolution.refine_top]]

    def score_all(stack):
        d = _distances(W, stack, zq, iters)
        return d.max(axis=1), d[:, :n0].max(axis=1)

    upper = math.inf
    for _ in range(resolution.exchange_rounds):
        refined = []
        for U in candidates:
            score = float(score_all(U[None])[0][0])
            for step in resolution.refine_steps:
                for _ in range(resolution.refine_sweeps * n * (N - n)):
                    moves = _rotation_moves(U, step)
                    ms, ms0 = score_all(moves)
                    lower = min(lower, float(ms0.min()))
                    k = int(np.argmin(ms))
                    if ms[k] >= score:
                        break
                    U, score = moves[k], float(ms[k])
            refined.append((score, U))
        refined.sort(key=lambda t: t[0])
        score, U = refined[0]
        sup, worst = _refine_sup(fam, U, zq, top_points(U), iters)
        upper = min(upper, sup)
        if sup <= score * (1.0 + 1e-9):
            break
        W = np.vstack([W, _orbit(worst)])
        candidates = [V for _, V in refined]
    return BruteForceBounds(lower, float(upper))


def sandwich(
    fam: BallFamily,
    query: WidthQuery,
    auto_normalize: bool = True,
    resolution: Optional[Resolution] = None,
    seed: int = DEFAULT_SEED,
    brute: Optional[bool] = None,
) -> SandwichReport:
    """Compare the order estimate with certified bounds on the true width.

    ``brute=None`` runs the grid search whenever its size limits allow.
    """
    est = estimate(fam, query, auto_normalize=auto_normalize)
    body = est.family
    zq = query.zq

    lower = inscribed_lower_bound(body, query)
    tags = {"lower": "inscribed-cube"}
    flat = coordinate_upper_bound(body, query)
    if coordinate_bound_is_exact(body, zq):
        upper, tags["upper"] = flat, "coordinate-flat-exact"
    else:
        upper, tags["upper"] = coordinate_holder_bound(body, query), "coordinate-holder"

    report = SandwichReport(upper=upper, lower=lower, phi=est.value, coordinate_flat=flat, estimate=est)
    if brute is None:
        brute = query.N <= BRUTE_MAX_N and query.n <= BRUTE_MAX_n and zq > 0.0
    if brute:
        bf = brute_force_width(body, query, resolution or Resolution(), seed)
        report.heuristic_lower = bf.lower
        tags["heuristic_lower"] = "brute-force-grid"
        if bf.upper < lower * (1.0 - 1e-9):
            report.warnings.append("brute-force value below the certified lower bound; discarded")
        elif bf.upper < upper:
            report.upper, tags["upper"] = bf.upper, "brute-force"
    # the two rigorous bounds can coincide mathematically (n = 0, cube-like bodies); drop rounding noise
    report.lower = min(report.lower, report.upper)
    report.method_tags = tags
    report.warnings = est.warnings + report.warnings
    report.ratios = {
        "upper/phi": report.upper / report.phi,
        "phi/lower": report.phi / report.lower if report.lower > 0 else math.inf,
    }
    return report
