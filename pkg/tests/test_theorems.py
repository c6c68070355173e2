import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import RANK_ONE_POINT, families
from jacobizeros.coeffs import SupportModel, make_constant, make_periodic2, make_rank_one, make_section4, strip
from jacobizeros.polyeval import kernel_direct
from jacobizeros.theorems import (
    GapCertificate,
    PreconditionError,
    certify_theorem1,
    certify_theorem2,
    check_eq32,
    check_adjacent_interlace,
    check_interlace,
    check_lemma21,
    check_lemma22,
    delta_radius,
    estimate_nu_support,
    estimate_support,
    interlaces,
    lemma22_margins,
    m_function,
)
from jacobizeros.tridiag import count_zeros_in, zeros

FREE = make_constant(1, 0)
GAPPED = SupportModel(((-5.0, -1.0), (1.0, 5.0)))


def free_m(z):
    """Closed-form free resolvent, branch with Im m * Im z > 0."""
    root = cmath.sqrt(z * z - 4)
    m = (-z + root) / 2
    if m.imag * z.imag <= 0:
        m = (-z - root) / 2
    return m


def gap_points(support, margin=0.1):
    """Points of every bounded gap (and beyond the hull) at distance > margin."""
    pts = []
    lo, hi = support.intervals[0][0], support.intervals[-1][1]
    pts += [lo - margin - 0.05, lo - 1.0, hi + margin + 0.05, hi + 1.0]
    edges = sorted([e for iv in support.intervals for e in iv] + list(support.points) * 2)
    for left, right in zip(edges[1::2], edges[2::2]):
        for x in np.linspace(left, right, 9)[1:-1]:
            if support.dist(x) > margin:
                pts.append(float(x))
    return pts


class TestDeltaRadius:
    def test_examples(self):
        assert delta_radius(1, 1) == pytest.approx(1 / (1 + math.sqrt(2)), rel=1e-15)
        assert delta_radius(2, math.sqrt(2)) == pytest.approx(1.0, rel=1e-15)

    @given(st.floats(1e-6, 1e3), st.floats(1e-6, 1e3), st.floats(1e-6, 1e3))
    def test_inside_and_monotone(self, d, a, b):
        r = delta_radius(d, a)
        assert 0 < r < d
        if a < b:
            assert delta_radius(d, b) <= r

    @pytest.mark.parametrize("d, a", [(0, 1), (1, 0), (-1, 1)])
    def test_rejects(self, d, a):
        with pytest.raises(ValueError):
            delta_radius(d, a)


class TestGapCertificate:
    def test_periodic(self):
        seq = make_periodic2(3, 1, 0)
        supp = SupportModel(((-4.0, -2.0), (2.0, 4.0)))
        for n in range(301):
            cert = certify_theorem1(seq, supp, 0.0, n)
            assert cert.verified and cert.d == 2
            assert cert.delta_n == delta_radius(2, seq.a(n + 1))

    def test_section4(self):
        seq = make_section4()
        allowed = {delta_radius(1, 3), delta_radius(1, 1)}
        for n in range(301):
            cert = certify_theorem1(seq, GAPPED, 0.0, n)
            assert cert.verified and cert.delta_n in allowed

    def test_constant_outside(self):
        supp = SupportModel(((-2.0, 2.0),))
        for n in range(0, 120, 7):
            assert certify_theorem1(FREE, supp, 3.0, n).zero_free_degrees == (n, n + 1)

    def test_inside_rejected(self):
        with pytest.raises(PreconditionError):
            certify_theorem1(FREE, SupportModel(((-2.0, 2.0),)), 1.0, 3)

    def test_verified_iff_count_zero(self):
        seq = make_section4()
        for n in (3, 17, 50):
            cert = certify_theorem1(seq, GAPPED, 0.3, n)
            for k, c in zip((n, n + 1), cert.counts):
                assert c == count_zeros_in(seq, k, 0.3 - cert.delta_n, 0.3 + cert.delta_n)
                assert (k in cert.zero_free_degrees) == (c == 0)

    def test_all_families_all_gaps(self, family):
        name, seq, supp = family
        for x0 in gap_points(supp):
            for n in range(0, 301, 13):
                cert = certify_theorem1(seq, supp, x0, n)
                assert cert.verified, cert.verdict()

    def test_serialization(self):
        cert = certify_theorem1(make_section4(), GAPPED, 0.0, 4)
        d = cert.to_dict()
        assert set(d) == {"x0", "d", "n", "delta_n", "counts", "zero_free_degrees", "verified"}
        assert cert.verdict().startswith("VERIFIED n=4")
        assert isinstance(cert, GapCertificate)

    def test_wrong_support_can_fail(self):
        # with a bogus support far from 0 the radius is large, and the
        # certificate must catch both p_n and p_{n+1} having zeros near 0
        wrong = SupportModel(((-5.0, -4.9),))
        results = [certify_theorem1(make_section4(), wrong, 0.0, n).verified for n in range(1, 60)]
        assert not all(results)


class TestNuSupport:
    def test_constant(self):
        s = estimate_nu_support(FREE, 2000, 0.05)
        assert len(s.intervals) == 1
        lo, hi = s.intervals[0]
        assert lo == pytest.approx(-2.05, abs=1e-4) and hi == pytest.approx(2.05, abs=1e-4)

    def test_rank_one_strip(self):
        s = estimate_nu_support(make_rank_one(FREE, 3), 500, 0.02)
        assert s.dist(RANK_ONE_POINT) > 1.2

    def test_eps_monotone(self):
        seq = make_section4()
        small, big = estimate_support(seq, 300, 0.01), estimate_support(seq, 300, 0.05)
        for lo, hi in small.intervals:
            assert big.contains(lo) and big.contains(hi)

    def test_periodic_point(self):
        # stripping (3, 1) leaves (1, 3), which has a bound state at 0
        s = estimate_nu_support(make_periodic2(3, 1, 0), 600, 0.02)
        assert s.dist(0.0) == 0 and s.dist(1.0) > 0.9


class TestIsolatedCertificate:
    def test_rank_one(self):
        seq = make_rank_one(FREE, 3)
        nu = estimate_nu_support(seq)
        for n in range(0, 201):
            cert = certify_theorem2(seq, RANK_ONE_POINT, n, nu_support=nu, check_isolated=(n == 0))
            assert cert.status == "verified" and cert.zero_count <= 1
            assert cert.d0 == pytest.approx(4 / 3 - 0.02, abs=1e-3)
            if n >= 1:
                assert min(cert.q_counts) == 0

    def test_periodic_bound_state(self):
        seq = make_periodic2(1, 2, 0.5)
        nu = estimate_nu_support(seq, 1000)
        for n in range(0, 120):
            cert = certify_theorem2(seq, 0.5, n, nu_support=nu, check_isolated=False)
            assert cert.verified

    def test_constant_rejected(self):
        with pytest.raises(PreconditionError):
            certify_theorem2(FREE, 0.0, 5, N=400)

    def test_inconclusive(self):
        seq = make_rank_one(FREE, 3)
        fake = SupportModel(((3.0, 4.0),))
        cert = certify_theorem2(seq, RANK_ONE_POINT, 3, nu_support=fake, check_isolated=False)
        assert cert.status == "inconclusive" and not cert.verified
        assert cert.verdict().startswith("INCONCLUSIVE")

    def test_radius_uses_original_coefficient(self):
        seq = make_rank_one(make_periodic2(3, 1, 0), 8.0)
        nu = estimate_nu_support(seq, 800)
        x0 = float(zeros(seq, 800).zeros[-1])
        cert = certify_theorem2(seq, x0, 4, nu_support=nu, check_isolated=False)
        assert cert.delta_n == delta_radius(cert.d0, seq.a(5))


class TestZeroDistance:
    def test_constant_closed_form(self):
        # p_j(3) = sinh((j+1) t) / sinh t with 3 = 2 cosh t; zeros 2 cos(k pi / 6)
        supp = SupportModel(((-2.0, 2.0),))
        assert check_lemma21(FREE, supp, 3.0, 5, 5)
        t = math.acosh(1.5)
        p = [math.sinh((k + 1) * t) / math.sinh(t) for k in range(7)]
        K = sum(v * v for v in p[:6])
        for k in range(1, 6):
            w = 2 * math.cos(k * math.pi / 6)
            # zeros in the support give a zero right side
            assert abs(3 - w) >= p[5] * supp.dist(w) / math.sqrt(K)

    def test_gap_support(self):
        seq = make_section4()
        for z0 in (0.0, 0.4, -0.9, 5.5):
            for n in range(1, 60, 5):
                for j in (n, n + 1):
                    assert check_lemma21(seq, GAPPED, z0, j, n)

    def test_degenerate_zero_value(self):
        # p_3 of the free family vanishes at 0
        assert check_lemma21(FREE, SupportModel(((-2.0, 2.0),)), 0.0, 3, 3)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(families()), st.floats(-6, 6), st.integers(1, 80), st.booleans())
    def test_random(self, fam, z0, n, plus):
        _, seq, supp = fam
        j = n + 1 if plus else n
        assert check_lemma21(seq, supp, z0, j, n)

    def test_rejects_degree(self):
        with pytest.raises(ValueError):
            check_lemma21(FREE, SupportModel(((-2.0, 2.0),)), 0.0, 7, 3)


class TestKernelInequality:
    def test_periodic(self):
        supp = SupportModel(((-4.0, -2.0), (2.0, 4.0)))
        for n in range(201):
            assert check_lemma22(make_periodic2(3, 1, 0), supp, 0.0, n)

    def test_inside_support(self):
        assert check_lemma22(FREE, SupportModel(((-2.0, 2.0),)), 0.5, 10)

    def test_constant_direct(self):
        supp = SupportModel(((-2.0, 2.0),))
        k = kernel_direct(FREE, 2.5, 2.5, 10).value
        t = math.acosh(1.25)
        p10, p11 = (math.sinh(m * t) / math.sinh(t) for m in (11, 12))
        assert k * 0.25 <= p11**2 + p10**2
        assert check_lemma22(FREE, supp, 2.5, 10)

    def test_margins_match_scalar(self):
        seq = make_section4()
        xs = np.array([-0.5, 0.0, 0.7, 3.0, 6.0])
        m = lemma22_margins(seq, GAPPED, xs, 40)
        assert m.shape == (41, 5)
        assert np.all(np.isinf(m[:, 3]))
        for n in (0, 10, 40):
            for i, x in enumerate(xs):
                assert (m[n, i] >= -1e-9) == check_lemma22(seq, GAPPED, x, n)

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from(families()), st.integers(0, 300), st.floats(0, 1))
    def test_random_gap_points(self, fam, n, u):
        _, seq, supp = fam
        pts = gap_points(supp, 0.0)
        x = pts[int(u * (len(pts) - 1))]
        assert check_lemma22(seq, supp, x, n)


class TestInterlace:
    def test_helper(self):
        assert interlaces([-1, 1], [0])
        assert not interlaces([-1, 1], [1])
        assert not interlaces([-1, 1], [0, 0.5])

    def test_free_n1(self):
        assert np.allclose(zeros(FREE, 2).zeros, [-1, 1])
        assert check_interlace(FREE, 1)

    @pytest.mark.parametrize("seq", [make_section4(), make_periodic2(3, 1, 0), FREE])
    def test_up_to_100(self, seq):
        assert all(check_interlace(seq, n) for n in range(1, 101))

    def test_adjacent(self, family):
        _, seq, _ = family
        assert all(check_adjacent_interlace(seq, n) for n in range(1, 101))

    def test_rejects_n0(self):
        with pytest.raises(ValueError):
            check_interlace(FREE, 0)
        with pytest.raises(ValueError):
            check_adjacent_interlace(FREE, 0)


class TestMFunction:
    def test_free_closed_form(self):
        for z in (3j, 2j, 1 + 1j, -0.5 + 0.3j):
            N = 200 if abs(z.imag) >= 1 else 2000
            assert abs(m_function(FREE, z, N) - free_m(z)) < 1e-8

    @given(st.floats(-6, 6), st.floats(0.05, 5))
    def test_symmetry_herglotz(self, re, im):
        seq = make_section4()
        z = complex(re, im)
        m = m_function(seq, z, 300)
        assert m_function(seq, z.conjugate(), 300) == pytest.approx(m.conjugate(), rel=1e-12)
        assert m.imag > 0

    def test_rejects_real(self):
        with pytest.raises(ValueError):
            m_function(FREE, 1.0, 10)


class TestSecondKindRelation:
    def test_free(self):
        assert check_eq32(FREE, 2j, 500) < 1e-8

    def test_periodic(self):
        assert check_eq32(make_periodic2(3, 1, 0), 1j, 1000) < 1e-6

    def test_decreases(self, family):
        _, seq, _ = family
        assert check_eq32(seq, 2j, 500) <= check_eq32(seq, 2j, 20) + 1e-10
        prev = math.inf
        for N in (5, 10, 20, 40, 80, 160):
            r = check_eq32(seq, 2j, N)
            assert r <= max(prev, 1e-10) * (1 + 1e-6)
            prev = r

    def test_strip_is_nu(self):
        # m_nu from the identity matches the stripped continued fraction
        seq = make_section4()
        m_mu = m_function(seq, 0.3 + 2j, 400)
        m_nu = m_function(strip(seq), 0.3 + 2j, 400)
        assert m_nu == pytest.approx((seq.b(1) - (0.3 + 2j) - 1 / m_mu) / seq.a(1) ** 2, abs=1e-12)
