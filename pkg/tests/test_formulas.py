from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ballwidths import (
    BallFamily,
    BallSpec,
    Case,
    ConditionViolationError,
    DomainRangeError,
    InvalidInputError,
    RedirectError,
    UnsupportedRegimeError,
    WidthQuery,
    estimate,
    garnaev_gluskin,
    kappa_pair,
    gluskin_single_ball,
    normalize_family,
    partition,
    pietsch_stesin,
    theorem1_estimate,
    theorem2_estimate,
)
from ballwidths.formulas import (
    case1_term,
    case3_value,
    case5_phis,
    euclidean_bracket,
    euclidean_term,
    gluskin_term,
    interpolation_term,
    select_case,
    term_value,
)
from ballwidths.oracle import vk_inclusion_constant

from conftest import P_CHOICES, families, random_family, z_of

# reference values evaluated at 50 digits with mpmath
LINF_N8_N7 = 0.34365235198722641914965472178600848449865666945822
GG_P2_N8_N2 = 0.89706128899705074014199879740846993704636764610287
GG_P2_N1000_N500 = 0.04687456215620813009825575079561764451881064681371
CBRT2 = 1.2599210498948731647672106072782283505702514647015
QRT2 = 1.1892071150027210667174999705604759152929720924638
INV_SQRT2_CBRT = 0.89089871814033930474022620559051250798721261587816


def fam_of(N, *pairs):
    return BallFamily.from_pairs(N, pairs)


def query(n, N, q):
    return WidthQuery.from_q(n, N, q)


class TestPartition:
    def test_two_sets(self):
        part = partition(fam_of(16, (4, 1.0), (1, 2.0)), 0.5)
        assert part.a1_strict == (0,) and part.a2_strict == (1,)
        assert part.a1p == (0,) and part.a2p == (1,)

    def test_boundary_in_both_closed(self):
        part = partition(fam_of(16, (2, 1.0)), 0.5)
        assert part.a1_strict == () and part.a2_strict == ()
        assert part.a1p == (0,) and part.a2p == (0,)

    def test_three_sets(self):
        part = partition(fam_of(16, ("inf", 1.0), (3, 1.0), (1, 1.0)), 0.25)
        assert (part.a1p, part.a2p, part.a3p) == ((0,), (1,), (2,))

    @settings(max_examples=100)
    @given(fam=families(), zq=st.sampled_from([z_of(p) for p in P_CHOICES[:-1]] + [1.0]))
    def test_closed_sets_cover(self, fam, zq):
        part = partition(fam, zq)
        assert set(part.a1p) | set(part.a2p) | set(part.a3p) == set(range(len(fam)))
        strict = [part.a1_strict, part.a2_strict, part.a3_strict]
        assert sum(len(s) for s in strict) == len(set().union(*strict))


class TestTheorem1:
    def test_case1(self):
        res = theorem1_estimate(fam_of(16, ("inf", 1.0), (4, 1.0)), query(4, 16, 2))
        assert res.case_tag is Case.CASE1
        assert res.value == pytest.approx(2.0, rel=1e-15)
        assert res.alpha_star.z == 0.25

    def test_case3(self):
        res = theorem1_estimate(fam_of(16, (4, 1.0), (1, 2.0)), query(4, 16, 2))
        assert res.case_tag is Case.CASE3
        assert res.value == pytest.approx(CBRT2, rel=1e-14)

    def test_case5_three_phis(self):
        res = theorem1_estimate(fam_of(16, ("inf", 1.0), (1, 2.0)), query(4, 16, 4))
        assert res.case_tag is Case.CASE5
        assert res.phi_breakdown["phi1"] == pytest.approx(QRT2, rel=1e-14)
        assert res.phi_breakdown["phi2"] == math.inf
        assert res.phi_breakdown["phi3"] == pytest.approx(math.sqrt(2), rel=1e-14)
        assert res.value == res.phi_breakdown["phi1"]
        assert res.term == "phi1"

    def test_case5_single_ball(self):
        res = theorem1_estimate(fam_of(64, (3, 1.0)), query(16, 64, 4))
        assert res.case_tag is Case.CASE5
        assert res.phi_breakdown["phi2"] == pytest.approx(INV_SQRT2_CBRT, rel=1e-14)
        assert res.phi_breakdown["phi1"] == math.inf and res.phi_breakdown["phi3"] == math.inf

    def test_case2(self):
        res = theorem1_estimate(fam_of(16, (1.5, 1.0), (1, 1.2)), query(4, 16, 2))
        assert res.case_tag is Case.CASE2
        assert res.value == 1.0

    def test_case4(self):
        res = theorem1_estimate(fam_of(64, (2, 1.0), (1, 1.5)), query(16, 64, 4))
        assert res.case_tag is Case.CASE4
        assert res.value == pytest.approx(64**0.25 / 4, rel=1e-15)

    def test_condition_violation(self):
        with pytest.raises(ConditionViolationError) as info:
            theorem1_estimate(fam_of(8, (4, 1.0), (2, 2.0)), query(2, 8, 2))
        assert "p=4" in str(info.value) and len(info.value.violations) == 1

    def test_range(self):
        with pytest.raises(DomainRangeError):
            theorem1_estimate(fam_of(8, (2, 1.0)), query(5, 8, 2))

    def test_redirect(self):
        with pytest.raises(RedirectError):
            theorem1_estimate(fam_of(8, (2, 1.0)), query(2, 8, "inf"))

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            theorem1_estimate(fam_of(8, (2, 1.0)), query(2, 16, 2))

    def test_n_zero(self):
        res = theorem1_estimate(fam_of(16, (3, 1.0)), query(0, 16, 4))
        assert res.value == 1.0

    @pytest.mark.parametrize("q,tag", [(1, Case.CASE1), (2, Case.CASE1), (4, Case.CASE1)])
    def test_priority_all_equal_q(self, q, tag):
        res = theorem1_estimate(fam_of(16, (q, 1.0)), query(4, 16, q))
        assert res.case_tag is tag
        assert res.value == 1.0

    def test_priority_q_above_2(self):
        # p = 2 and p = q only: Case1 fails, Case4 fails, so Case5
        fam = normalize_family(fam_of(64, (4, 1.0), (2, 1.2)))
        assert select_case(fam, 0.25) is Case.CASE5


class TestTheorem2:
    def test_bracket_saturates(self):
        res = theorem2_estimate(fam_of(8, (2, 1.0)), query(2, 8, "inf"))
        assert res.case_tag is Case.LINFTY
        assert res.value == 1.0

    def test_cube(self):
        assert theorem2_estimate(fam_of(100, ("inf", 3.0)), query(10, 100, "inf")).value == 3.0

    def test_small_bracket(self):
        res = theorem2_estimate(fam_of(8, (2, 1.0)), query(7, 8, "inf"))
        assert res.value == pytest.approx(LINF_N8_N7, rel=1e-12)

    def test_unsupported(self):
        with pytest.raises(UnsupportedRegimeError):
            theorem2_estimate(fam_of(8, (2, 1.0), (1, 1.5)), query(2, 8, "inf"))

    def test_range(self):
        with pytest.raises(DomainRangeError):
            theorem2_estimate(fam_of(8, (2, 1.0)), query(8, 8, "inf"))

    def test_log_base(self):
        res = theorem2_estimate(fam_of(8, (2, 1.0)), query(7, 8, "inf"), log=math.log2)
        assert res.value == pytest.approx(math.sqrt(math.log2(16 / 7) / 7), rel=1e-14)


class TestSingleBall:
    def test_pietsch_stesin(self):
        assert pietsch_stesin(0.0, 1.0, 2, 4) == 2.0
        assert pietsch_stesin(0.5, 1.0, 5, 9) == 2.0
        assert pietsch_stesin(0.25, 0.25, 3, 9) == 1.0
        assert pietsch_stesin(0.25, 0.5, 9, 9) == 0.0
        with pytest.raises(InvalidInputError):
            pietsch_stesin(1.0, 0.5, 2, 4)

    def test_gluskin(self):
        for n in range(0, 9):
            assert gluskin_single_ball(1.0, 0.5, n, 16) == 1.0
        assert gluskin_single_ball(0.5, 0.25, 8, 16) == pytest.approx(2 / math.sqrt(8), rel=1e-15)
        assert gluskin_single_ball(1 / 3, 0.25, 16, 64) == pytest.approx(INV_SQRT2_CBRT, rel=1e-14)
        with pytest.raises(DomainRangeError):
            gluskin_single_ball(0.5, 0.25, 16, 16)
        with pytest.raises(InvalidInputError):
            gluskin_single_ball(0.2, 0.25, 4, 16)

    def test_garnaev_gluskin(self):
        assert garnaev_gluskin(0.0, 5, 20) == 1.0
        assert garnaev_gluskin(0.5, 2, 8) == pytest.approx(GG_P2_N8_N2, rel=1e-14)
        assert garnaev_gluskin(0.5, 500, 1000) == pytest.approx(GG_P2_N1000_N500, rel=1e-13)
        with pytest.raises(UnsupportedRegimeError):
            garnaev_gluskin(1.0, 2, 8)

    def test_single_ball_reduction(self):
        for zp in [z_of(p) for p in P_CHOICES]:
            for zq in [z_of(p) for p in P_CHOICES if p != "inf"]:
                for N in (4, 9, 64):
                    for n in range(0, N // 2 + 1):
                        res = theorem1_estimate(BallFamily(N, (BallSpec(zp, 1.0),)), WidthQuery(n, N, zq))
                        want = N ** (zq - zp) if zp <= zq else gluskin_single_ball(zp, zq, n, N)
                        assert res.value == want

    def test_case1_vs_pietsch_stesin(self):
        for N in (4, 16, 50):
            for n in range(N // 2 + 1):
                res = estimate(fam_of(N, (4, 1.0)), query(n, N, 2))
                exact = pietsch_stesin(0.25, 0.5, n, N)
                assert exact <= res.value <= exact * 2 ** 0.25 * (1 + 1e-15)


class TestEstimate:
    def test_auto_normalize(self):
        raw = fam_of(10, (2, 1.0), (1, 100.0))
        res = estimate(raw, query(2, 10, 2), auto_normalize=True)
        direct = theorem1_estimate(fam_of(10, (2, 1.0), (1, 10**0.5)), query(2, 10, 2))
        assert res.value == pytest.approx(direct.value, rel=1e-14)
        assert res.family.nus[1] == pytest.approx(10**0.5)
        assert any("normalized" in w for w in res.warnings)

    def test_refuses_raw(self):
        with pytest.raises(ConditionViolationError):
            estimate(fam_of(10, (2, 1.0), (1, 100.0)), query(2, 10, 2))

    def test_linf_unsupported(self):
        with pytest.raises(UnsupportedRegimeError):
            estimate(fam_of(10, (4, 1.0), (1, 2.0)), query(2, 10, "inf"), auto_normalize=True)

    def test_linf_dispatch(self):
        res = estimate(fam_of(8, (2, 1.0)), query(7, 8, "inf"))
        assert res.case_tag is Case.LINFTY


# --- closed-form identities at case boundaries ---


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def _partner(rng, fixed: BallSpec, N: int) -> BallSpec:
    """Random ball whose kappa with ``fixed`` lies in [1, N], as in a normalized family."""
    z = float(rng.uniform(0, 1))
    kappa = float(N ** rng.uniform(0, 1))
    return BallSpec(z, fixed.nu * kappa ** (z - fixed.z))


def test_remark_identities(rng):
    for _ in range(2000):
        N = int(rng.integers(4, 2000))
        n = int(rng.integers(0, N // 2 + 1))
        zq = float(rng.uniform(0.0, 0.5))
        m = euclidean_bracket(n, N, zq)
        at_q = BallSpec(zq, float(np.exp(rng.uniform(-3, 3))))
        at_2 = BallSpec(0.5, float(np.exp(rng.uniform(-3, 3))))
        other = _partner(rng, at_q, N)
        # p_alpha = q
        assert interpolation_term(at_q, other, zq) == at_q.nu == gluskin_term(at_q, m, zq)
        # p_beta = q
        v = interpolation_term(other, at_q, zq)
        assert _rel(v, at_q.nu) <= 1e-12 and _rel(v, gluskin_term(at_q, m, zq)) <= 1e-12
        other = _partner(rng, at_2, N)
        # p_alpha = 2
        assert gluskin_term(at_2, m, zq) == at_2.nu * m == euclidean_term(at_2, other, m)
        # p_beta = 2
        v = euclidean_term(other, at_2, m)
        assert _rel(v, at_2.nu * m) <= 1e-12 and _rel(v, gluskin_term(at_2, m, zq)) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(fam=families(), zq=st.sampled_from([1.0, 2 / 3, 0.5, 0.4, 0.25, 0.125]), data=st.data())
def test_case1_matches_boundary_extension(fam, zq, data):
    """Adding the ball (q, Case1 value) leaves M unchanged; the mixed formulas then give the same value."""
    keep = [b for b in fam if b.z <= zq and b.z != zq]
    assume(keep)
    base = BallFamily(fam.ambient_dim, tuple(keep))
    N = base.ambient_dim
    v = min(case1_term(b, N, zq) for b in base)
    ext = BallFamily.from_balls(N, list(base) + [BallSpec(zq, v)])
    n = data.draw(st.integers(0, N // 2))
    if zq >= 0.5:
        mixed = case3_value(ext, zq)[0]
    else:
        mixed = min(val for val, _ in case5_phis(ext, n, N, zq).values())
    assert _rel(mixed, v) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(fam=families(), zq=st.sampled_from([1.0, 0.75, 0.5, 0.3, 0.25, 0.1]), c=st.floats(1e-3, 1e3),
       data=st.data())
def test_scale_equivariance(fam, zq, c, data):
    n = data.draw(st.integers(0, fam.ambient_dim // 2))
    q = WidthQuery(n, fam.ambient_dim, zq)
    a = estimate(fam, q).value
    b = estimate(fam.scaled(c), q).value
    assert _rel(b, c * a) <= 1e-12


@settings(max_examples=150, deadline=None)
@given(fam=families(normalized=False), zq=st.sampled_from([1.0, 0.75, 0.5, 0.3, 0.25, 0.1]),
       grow=st.floats(1.0, 10.0), data=st.data())
def test_monotonicity(fam, zq, grow, data):
    N = fam.ambient_dim
    vals = [estimate(fam, WidthQuery(n, N, zq), auto_normalize=True).value for n in range(N // 2 + 1)]
    assert all(a >= b * (1 - 1e-12) for a, b in zip(vals, vals[1:]))
    i = data.draw(st.integers(0, len(fam) - 1))
    n = data.draw(st.integers(0, N // 2))
    bigger = fam.with_nus([b.nu * (grow if j == i else 1.0) for j, b in enumerate(fam)])
    q = WidthQuery(n, N, zq)
    assert estimate(bigger, q, auto_normalize=True).value >= estimate(fam, q, auto_normalize=True).value * (1 - 1e-12)


def test_attainment_bit_exact(rng):
    for _ in range(2000):
        N = int(rng.choice([4, 8, 16, 32, 64, 128]))
        fam = random_family(rng, N, k_max=5)
        zq = float(rng.choice([1.0, 0.75, 0.5, 0.4, 0.25, 0.2, 0.1, 0.0]))
        n = int(rng.integers(0, N // 2 + 1))
        if zq == 0.0 and any(b.z > 0.5 for b in fam):
            continue
        res = estimate(fam, WidthQuery(n, N, zq))
        assert term_value(res) == res.value
        if res.case_tag is Case.CASE5:
            finite = [v for v in res.phi_breakdown.values() if v < math.inf]
            assert res.value == min(finite)


def test_vk_inclusion_in_case3(rng):
    """For strict Case3 attainment, nu k^{-1/p} V_k with k = floor(kappa) sits in 2M."""
    checked = 0
    for _ in range(3000):
        N = int(rng.choice([8, 16, 64, 256]))
        fam = random_family(rng, N, k_max=5)
        zq = float(rng.choice([1.0, 0.75, 0.6, 0.5]))
        res = estimate(fam, WidthQuery(1, N, zq))
        if res.case_tag is not Case.CASE3:
            continue
        a, b = res.alpha_star, res.beta_star
        if not (a.z < zq < b.z):
            continue
        k = int(math.floor(kappa_pair(a, b) * (1 + 1e-12)))
        assert 1 <= k <= N
        assert vk_inclusion_constant(fam, k, a.nu * k ** (-a.z)) <= 2.0 * (1 + 1e-12)
        checked += 1
    assert checked > 100
