"""Shared helpers for the test suite: independent oracles built only on
mpmath/stdlib so they share no code with the package internals."""

from fractions import Fraction

import mpmath as mp


def F(x):
    """Fraction/str/number -> mpf at the current precision."""
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, str):
        return mp.mpf(x)
    return mp.mpf(x) if not isinstance(x, mp.mpf) else x


def two_peakon_collision(q0, p0, dps=40, bracket=(4, "4.3")):
    """Integrate the symmetric peakon-antipeakon pair

        u(x,t) = (p/2) e^{-|x+q|} - (p/2) e^{-|x-q|},
        qdot = -(p/2)(1 - e^{-2q}),   pdot = (p^2/2) e^{-2q},

    in the regularized variables sigma = sign*sqrt(2q), v = p*sigma, which
    extend analytically through the collision (sigma crosses 0 with
    sigma-dot = -v/2 != 0 there).  Returns (sol, t_cross) where sol(t) gives
    (sigma, v) and t_cross is the root of sigma.
    """
    with mp.workdps(dps):
        q0, p0 = F(q0), F(p0)
        sig0 = mp.sqrt(2 * q0)
        v0 = p0 * sig0
        cut = mp.mpf(10) ** (-dps // 4)

        def g(x):  # (1 - e^-x)/x, entire in x
            if abs(x) < cut:
                return 1 - x / 2 + x ** 2 / 6 - x ** 3 / 24
            return (1 - mp.e ** (-x)) / x

        def h(x):  # (e^-x - g(x))/x, entire in x
            if abs(x) < cut:
                return mp.mpf(-1) / 2 + x / 3 - x ** 2 / 8 + x ** 3 / 30
            return (mp.e ** (-x) - g(x)) / x

        def rhs(t, y):
            sig, v = y
            x = sig * sig
            return [-v * g(x) / 2, v * v * sig * h(x) / 2]

        sol = mp.odefun(rhs, 0, [sig0, v0], tol=mp.mpf(10) ** (-dps + 5))
        t_cross = mp.findroot(lambda t: sol(t)[0],
                              (F(bracket[0]), F(bracket[1])),
                              solver="anderson")
        return sol, t_cross


def quad_moment(weight, lo, hi, k, t, dps=40):
    """Direct tanh-sinh quadrature of integral lam^k e^{-t/(2 lam)} w(lam)
    over (lo, hi); the reference implementation for the continuous families."""
    with mp.workdps(dps):
        tt = F(t)

        def f(lam):
            return lam ** k * mp.exp(-tt / (2 * lam)) * weight(lam)

        return mp.quad(f, [F(lo), F(hi)])


def mpf_close(a, b, tol, dps=60):
    """|a - b| <= tol * max(1, |b|), evaluated at a controlled precision."""
    with mp.workdps(dps):
        aa, bb = F(a), F(b)
        return abs(aa - bb) <= mp.mpf(tol) * max(1, abs(bb))
