"""Independent reference computations ("oracles") that everything else is
judged against.

Every expected value here is produced by a route that shares no code with
the package: hand-evaluated determinants kept as exact Fractions, textbook
integral identities evaluated with bare mpmath quadrature, and a direct
Hamiltonian integration of the two-peakon system.  When a value is frozen
as a literal, the derivation is stated next to it.
"""

from fractions import Fraction
from math import comb

import mpmath as mp
import pytest

from peakonflow import measure as me
from peakonflow import hankel, inverse, forward, flow, asympt
from peakonflow._num import to_mpf

from _util import F, two_peakon_collision, quad_moment


# ---------------------------------------------------------------------------
# moments of the named families


def test_one_peakon_moments_hand():
    # single mass: s_k(t) = gam * lam^k * e^{-t/(2 lam)}, straight from the
    # definition of the evolved measure.
    spec = me.DiscreteMeasure(((3, 2),))
    for t in (-10, 0, 10):
        tb = me.moments(spec, t=t, K=3, digits=40)
        with mp.workdps(60):
            for k in range(-1, 7):
                want = 2 * mp.mpf(3) ** k * mp.exp(-mp.mpf(t) / 6)
                assert abs(to_mpf(tb.s(k)) - want) <= mp.mpf("1e-38") * abs(want)


def test_two_point_hankel_hand():
    # delta_1 + delta_2: s_k = 1 + 2^k.  2x2 and 1x1 determinants evaluated
    # by hand:
    #   D(0,2) = s0 s2 - s1^2 = 10 - 9 = 1
    #   D(1,2) = s1 s3 - s2^2 = 27 - 25 = 2
    #   D(2,2) = s2 s4 - s3^2 = 85 - 81 = 4
    #   D(-1,2) = s_-1 s1 - s0^2 = 9/2 - 4 = 1/2
    spec = me.DiscreteMeasure(((1, 1), (2, 1)))
    tb = me.moments(spec, t=0, K=3, digits=40)
    assert tb.exact
    assert tb.s(0) == Fraction(2) and tb.s(1) == Fraction(3)
    assert tb.s(-1) == Fraction(3, 2)
    assert hankel.hankel_det(tb, 0, 2) == Fraction(1)
    assert hankel.hankel_det(tb, 1, 2) == Fraction(2)
    assert hankel.hankel_det(tb, 2, 2) == Fraction(4)
    assert hankel.hankel_det(tb, -1, 2) == Fraction(1, 2)
    assert hankel.hankel_det(tb, 1, 1) == Fraction(3)
    # rank 2: every 3x3 vanishes
    assert hankel.hankel_det(tb, 0, 3) == 0


def test_two_point_profile_hand():
    # continuing by hand:  e^{x_1} = 1/s0 = 1/2,  e^{x_2} = D(2,1)/D(0,2) = 5,
    # w_1 = s0/s1 = 2/3,  w_2 = D(0,2) D(2,1) / (D(1,1) D(1,2)) = 5/6,
    # dipoles vanish off collisions.
    spec = me.DiscreteMeasure(((1, 1), (2, 1)))
    tb = me.moments(spec, t=0, K=3, digits=40)
    prof = inverse.peakon_profile(hankel.build_grid(tb))
    assert prof.exact and prof.complete
    assert prof.exp_x == [Fraction(1, 2), Fraction(5)]
    assert prof.omega == [Fraction(2, 3), Fraction(5, 6)]
    assert prof.upsilon == [0, 0]


def test_laguerre_moments_closed_form():
    # weight (lam-al)^g e^{-(lam-al)}/Gamma(g+1) on (al, inf):
    # shifting lam = al + mu gives s_k(0) = sum_j C(k,j) al^(k-j) (g+1)_j
    # (rising factorial), an exact rational for rational g, al.
    g, al = Fraction(1, 3), Fraction(1, 2)
    spec = me.LaguerreMeasure(g, al)
    tb = me.moments(spec, t=0, K=3, digits=40)

    def rising(x, n):
        out = Fraction(1)
        for i in range(n):
            out *= x + i
        return out

    with mp.workdps(60):
        for k in range(0, 7):
            want = sum(comb(k, j) * al ** (k - j) * rising(g + 1, j)
                       for j in range(k + 1))
            assert abs(to_mpf(tb.s(k)) - F(want)) <= mp.mpf("1e-35") * F(want)
        # s_-1 at g = 0 is the exponential integral: e^al E1(al)
        tb0 = me.moments(me.LaguerreMeasure(0, al), t=0, K=1, digits=40)
        want = mp.e ** F(al) * mp.e1(F(al))
        assert abs(to_mpf(tb0.s(-1)) - want) <= mp.mpf("1e-35")


def test_laguerre_moments_quadrature():
    g, al = Fraction(1, 3), Fraction(1, 2)
    spec = me.LaguerreMeasure(g, al)
    with mp.workdps(60):
        gamma_norm = mp.gamma(F(g) + 1)
    for t in (0, Fraction(3, 2), -2):
        tb = me.moments(spec, t=t, K=2, digits=40)
        with mp.workdps(60):
            def w(lam):
                return (lam - F(al)) ** F(g) * mp.exp(-(lam - F(al))) / gamma_norm
            for k in (-1, 0, 1, 3):
                want = quad_moment(w, al, mp.inf, k, t, dps=60)
                assert abs(to_mpf(tb.s(k)) - want) <= mp.mpf("1e-30") * abs(want)


def test_jacobi_moments_closed_form():
    # weight (lam-al)^b (1+al-lam)^a on (al, 1+al); with mu = lam - al,
    # s_k(0) = sum_j C(k,j) al^(k-j) B(b+1+j, a+1).
    a, b, al = Fraction(1, 4), Fraction(1, 3), Fraction(1, 5)
    spec = me.JacobiMeasure(a, b, al)
    tb = me.moments(spec, t=0, K=3, digits=40)
    with mp.workdps(60):
        for k in range(0, 7):
            want = mp.fsum(mp.binomial(k, j) * F(al) ** (k - j)
                           * mp.beta(F(b) + 1 + j, F(a) + 1)
                           for j in range(k + 1))
            assert abs(to_mpf(tb.s(k)) - want) <= mp.mpf("1e-35") * abs(want)
    # flat case: s_k = ((1+al)^{k+1} - al^{k+1})/(k+1), and
    # s_-1 = log((1+al)/al)
    spec0 = me.JacobiMeasure(0, 0, al)
    tb0 = me.moments(spec0, t=0, K=3, digits=40)
    with mp.workdps(60):
        for k in range(0, 7):
            want = (F(al) + 1) ** (k + 1) - F(al) ** (k + 1)
            want /= k + 1
            assert abs(to_mpf(tb0.s(k)) - want) <= mp.mpf("1e-35") * abs(want)
        want = mp.log((1 + F(al)) / F(al))
        assert abs(to_mpf(tb0.s(-1)) - want) <= mp.mpf("1e-35") * abs(want)


def test_jacobi_moments_quadrature():
    a, b, al = Fraction(1, 4), Fraction(1, 3), Fraction(1, 5)
    spec = me.JacobiMeasure(a, b, al)
    for t in (Fraction(3, 2), -2):
        tb = me.moments(spec, t=t, K=2, digits=40)
        with mp.workdps(60):
            def w(lam):
                return (lam - F(al)) ** F(b) * (1 + F(al) - lam) ** F(a)
            for k in (-1, 0, 1, 3):
                want = quad_moment(w, al, F(al) + 1, k, t, dps=60)
                assert abs(to_mpf(tb.s(k)) - want) <= mp.mpf("1e-30") * abs(want)


def test_stieltjes_wigert_moments_closed_form():
    # weight (kap/sqrt(pi)) e^{-kap^2 log^2 lam} on (0, inf): substituting
    # y = log lam gives a Gaussian, so s_k(0) = e^{(k+1)^2/(4 kap^2)}.
    kap = Fraction(3, 2)
    spec = me.StieltjesWigertMeasure(kap)
    tb = me.moments(spec, t=0, K=3, digits=40)
    with mp.workdps(60):
        for k in range(-1, 7):
            want = mp.exp(mp.mpf(k + 1) ** 2 / (4 * F(kap) ** 2))
            assert abs(to_mpf(tb.s(k)) - want) <= mp.mpf("1e-35") * abs(want)


def test_stieltjes_wigert_moments_quadrature():
    kap = Fraction(3, 2)
    spec = me.StieltjesWigertMeasure(kap)
    tb = me.moments(spec, t=1, K=2, digits=40)
    with mp.workdps(60):
        def w(lam):
            return F(kap) / mp.sqrt(mp.pi) * mp.exp(-F(kap) ** 2 * mp.log(lam) ** 2)
        for k in (-1, 0, 2):
            want = quad_moment(w, 0, mp.inf, k, 1, dps=60)
            assert abs(to_mpf(tb.s(k)) - want) <= mp.mpf("1e-30") * abs(want)


def test_asc_moments_lattice_sum():
    # direct summation over the q-lattice with mpmath's own q-Pochhammer
    # (mp.qp), independent of the package's series code.
    a, q = Fraction(6, 5), Fraction(4, 5)
    spec = me.AlSalamCarlitzMeasure(a, q)
    for t in (0, -3):
        tb = me.moments(spec, t=t, K=3, digits=40)
        with mp.workdps(80):
            af, qf = F(a), F(q)
            pref = mp.qp(qf / af, qf)
            for k in (-1, 0, 1, 4, 6):
                tot = mp.mpf(0)
                for n in range(1, 400):
                    lam = af * qf ** (1 - n) - 1
                    gam = pref * af ** (-(n - 1)) * qf ** ((n - 1) ** 2)
                    gam /= mp.qp(qf / af, qf, n - 1) * mp.qp(qf, qf, n - 1)
                    term = gam * lam ** k * mp.exp(-mp.mpf(t) / (2 * lam))
                    tot += term
                    if n > 8 and abs(term) < mp.mpf("1e-70") * abs(tot):
                        break
                assert abs(to_mpf(tb.s(k)) - tot) <= mp.mpf("1e-32") * abs(tot)


def test_asc_accumulation_point_against_qp():
    a, q = Fraction(6, 5), Fraction(4, 5)
    L = asympt.asc_limit_point(a, q, digits=50)
    with mp.workdps(70):
        want = -mp.log(mp.qp(F(a) * F(q), F(q)))
        assert abs(to_mpf(L.value) - want) <= mp.mpf("1e-45")


# ---------------------------------------------------------------------------
# the symmetric peakon-antipeakon pair (the collision benchmark)


def test_two_peakon_collision_ode():
    # Initial data p(0) = 65/63, q(0) = log(65/16).  The pair ODE conserves
    # p^2 (1 - e^{-2q}), which equals exactly 1 here, and separation of the
    # reduced equation gives the collision at t = log((1+s)/(1-s)) with
    # s = sqrt(1 - e^{-2q(0)}) = 63/65, i.e. exactly log 64.  The direct
    # numerical integration below never uses either fact.
    with mp.workdps(40):
        q0 = mp.log(mp.mpf(65) / 16)
    sol, tx = two_peakon_collision(q0, Fraction(65, 63), dps=40)
    with mp.workdps(40):
        assert abs(tx - mp.log(64)) < mp.mpf("1e-30")
        # conserved quantity along the way
        for t in (1, 2, 4):
            sig, v = sol(mp.mpf(t))
            qq, pp = sig * sig / 2, v / sig
            c = pp * pp * (1 - mp.e ** (-2 * qq))
            assert abs(c - 1) < mp.mpf("1e-30")


def test_fig1_spectrum_frozen():
    # Forward map of the pair above: peakon of height 65/63 at -q(0) and
    # its mirror antipeakon.  The spectrum freezes to two opposite-sign
    # poles lam = -1, +1 with couplings 1/16, 4.  The frozen values are
    # cross-validated against the direct Hamiltonian integration: the
    # spectral-route trajectory must match (q(t), p(t)) from the ODE.
    st = forward.string_from_peakon_data(
        [Fraction(16, 65), Fraction(65, 16)],
        [Fraction(65, 63), Fraction(-65, 63)], digits=60)
    w = forward.weyl_from_string(st)
    spec, _ = forward.measure_from_weyl(w, digits=60)
    pts = spec.points
    assert len(pts) == 2
    with mp.workdps(60):
        assert abs(to_mpf(pts[0][0]) + 1) < mp.mpf("1e-50")
        assert abs(to_mpf(pts[1][0]) - 1) < mp.mpf("1e-50")
        assert abs(to_mpf(pts[0][1]) - Fraction(1, 16)) < mp.mpf("1e-50")
        assert abs(to_mpf(pts[1][1]) - 4) < mp.mpf("1e-50")

    # trajectory cross-check at t = 2 against the regularized ODE
    with mp.workdps(40):
        q0 = mp.log(mp.mpf(65) / 16)
    sol, _ = two_peakon_collision(q0, Fraction(65, 63), dps=40)
    frozen = me.DiscreteMeasure(((-1, Fraction(1, 16)), (1, 4)))
    prof, _ = flow.snapshot(frozen, t=2, digits=60)
    with mp.workdps(40):
        sig, v = sol(mp.mpf(2))
        qq, pp = sig * sig / 2, v / sig
        assert abs(to_mpf(prof.x[0]) + qq) < mp.mpf("1e-28")
        assert abs(to_mpf(prof.x[1]) - qq) < mp.mpf("1e-28")
        assert abs(to_mpf(prof.omega[0]) - pp) < mp.mpf("1e-28")
        assert abs(to_mpf(prof.omega[1]) + pp) < mp.mpf("1e-28")


# ---------------------------------------------------------------------------
# the dual (right-anchored) measure


def test_rho_plus_two_point_hand():
    # For delta_1 + delta_2 the entire function with zeros at the spectrum is
    # W(z) = (1-z)(1-z/2); the dual couplings 1/(lam^2 W'(lam)^2 gam) are
    #   lam=1: W'(1) = -1/2  -> 1/(1 * 1/4 * 1) = 4
    #   lam=2: W'(2) = +1/2  -> 1/(4 * 1/4 * 1) = 1
    spec = me.DiscreteMeasure(((1, 1), (2, 1)))
    dual, report = forward.rho_plus(spec, digits=50)
    pts = list(dual.point_data())
    assert len(pts) == 2
    with mp.workdps(60):
        assert abs(to_mpf(pts[0][0]) - 1) < mp.mpf("1e-45")
        assert abs(to_mpf(pts[0][1]) - 4) < mp.mpf("1e-45")
        assert abs(to_mpf(pts[1][0]) - 2) < mp.mpf("1e-45")
        assert abs(to_mpf(pts[1][1]) - 1) < mp.mpf("1e-45")
        # positions then accumulate at L(0) = log(4 + 1) = log 5, which is
        # also the last position of the two-peakon profile.
        L, _ = flow.accumulation_L(spec, t=0, digits=50)
        assert abs(to_mpf(L) - mp.log(5)) < mp.mpf("1e-45")
