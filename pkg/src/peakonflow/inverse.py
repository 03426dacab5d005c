"""Peakon profiles out of determinant grids.

The map from a (possibly evolved) moment table to the solution profile goes

    moments -> Hankel grid -> kappa chain -> positions/weights -> u(x).

Positions and weights come in two equivalent coordinate systems: the
"string" data (xt_n, wt_n, vt_n) with xt_n = Delta_{2,kappa(n)} /
Delta_{0,kappa(n)+1}, and the profile data x_n = log xt_n, omega_n =
wt_n * xt_n, upsilon_n = vt_n * xt_n.  The string data is what the forward
(spectral) map consumes, so the core builder below produces it first.

Weight selection at index n: if Delta_{1,kappa(n)+1} does not vanish the
point carries an ordinary peakon weight

    wt_n = Delta_{0,kappa(n)+1}^2 / (Delta_{1,kappa(n)} Delta_{1,kappa(n)+1})

and no dipole part; if it vanishes (kappa jumps by 2) the weight is zero and
the dipole mass is the square form

    vt_n = Delta_{-1,kappa(n)+2}^2 / (Delta_{0,kappa(n)+1} Delta_{0,kappa(n)+2}).

Both are specializations of the general difference forms (also exported,
for cross-checking):

    wt_n = Delta_{-1,kappa(n)+1}/Delta_{1,kappa(n)}
             - Delta_{-1,kappa(n+1)+1}/Delta_{1,kappa(n+1)}
    vt_n = Delta_{-2,kappa(n)+2}/Delta_{0,kappa(n)+1}
             - Delta_{-2,kappa(n+1)+1}/Delta_{0,kappa(n+1)}

For a finite measure with D points the chain has N nonvanishing members and
the profile carries N-1 weighted positions (the formal N-th position sits at
+infinity); such a profile is `complete` and its right tail is determined.
"""

import bisect
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from ._num import is_exact, to_mpf, work_digits
from .errors import (ValidationError, InconsistencyError, PrecisionError,
                     DomainError)
from . import hankel as _hankel


def _div(a, b):
    if is_exact(a) and is_exact(b):
        return Fraction(a) / Fraction(b)
    return to_mpf(a) / to_mpf(b)


@dataclass
class PeakonProfile:
    """Positions, weights and dipole masses at one instant.

    x (and exp_x = e^x) list the resolved positions; omega/upsilon have one
    entry per position except that an incomplete profile's final position may
    lack them (the data ran out); then len(omega) == len(x) - 1 and
    `last_upsilon`, if not None, pins the dipole mass at the final position.
    """
    x: list
    exp_x: list
    omega: list
    upsilon: list
    s_minus1: object
    kappa: object
    complete: bool
    limited_by: str
    digits: int = 200
    last_upsilon: object = None
    exact: bool = False

    @property
    def n_positions(self):
        return len(self.x)

    @property
    def n_weights(self):
        return len(self.omega)

    def __repr__(self):
        return ("PeakonProfile(%d positions, %d weighted%s%s)"
                % (self.n_positions, self.n_weights,
                   ", complete" if self.complete else "",
                   ", exact" if self.exact else ""))


def _string_data(grid, n_peaks=None):
    """Core inverse step: string coordinates from a determinant grid.

    Returns a dict with keys xt, wt, vt (lists), km, complete, limited_by,
    last_upsilon.  Values are Fractions on the exact path.
    """
    km = _hankel.kappa(grid)
    N = km.N
    navail_pos = N - 1 if km.complete else N
    # can the terminal dipole mass be pinned?  (chain stopped because the
    # next minor vanished at the very edge of the data)
    terminal_v = None
    if not km.complete and km.zeros and km.zeros[-1] == km.kap[-1] + 1 \
            and km.kap[-1] + 1 == km.k_scanned:
        kN = km.kap[-1]
        if grid.has_delta(-1, kN + 2) and grid.has_delta(0, kN + 2):
            terminal_v = _div(grid.delta(-1, kN + 2) ** 2,
                              grid.delta(0, kN + 1) * grid.delta(0, kN + 2))
    navail_w = N - 1
    npos = navail_pos if n_peaks is None else min(n_peaks, navail_pos)
    nw = min(npos, navail_w)
    limited_by = "support" if km.complete else "moments"
    if n_peaks is not None and n_peaks < navail_pos:
        limited_by = "requested"
    xt, wt, vt = [], [], []
    for n in range(1, npos + 1):
        k = km(n)
        num, den = grid.delta(2, k), grid.delta(0, k + 1)
        if not grid.exact:
            num, den = to_mpf(num), to_mpf(den)
        if den <= 0:
            raise InconsistencyError(
                "Delta_{0,%d} must be positive for a genuine measure" % (k + 1,))
        if num <= 0:
            raise PrecisionError(
                "Delta_{2,%d} lost its sign; retry with more digits" % (k,),
                suggested_digits=2 * grid.digits)
        xt.append(_div(num, den))
        if n > 1 and not (xt[-1] > xt[-2]):
            raise PrecisionError(
                "positions not increasing at n=%d; retry with more digits" % n,
                suggested_digits=2 * grid.digits)
    for n in range(1, nw + 1):
        k = km(n)
        gap = (n < N and km(n + 1) == k + 2)
        if not gap:
            w = _div(grid.delta(0, k + 1) ** 2,
                     grid.delta(1, k) * grid.delta(1, k + 1))
            v = Fraction(0) if grid.exact else mp.mpf(0)
        else:
            w = Fraction(0) if grid.exact else mp.mpf(0)
            v = _div(grid.delta(-1, k + 2) ** 2,
                     grid.delta(0, k + 1) * grid.delta(0, k + 2))
            if (v if is_exact(v) else to_mpf(v)) < 0:
                raise InconsistencyError("negative dipole mass at n=%d" % n)
        wt.append(w)
        vt.append(v)
    if n_peaks is not None and npos < navail_pos:
        terminal_v = None  # truncation point is interior, nothing pinned
    return {"xt": xt, "wt": wt, "vt": vt, "km": km,
            "complete": km.complete and npos == navail_pos,
            "limited_by": limited_by, "last_upsilon": terminal_v}


def string_diff_forms(grid, n):
    """(wt_n, vt_n) by the general difference formulas -- the dual route to
    the closed forms used in _string_data; n runs 1..N-1."""
    km = _hankel.kappa(grid)
    if not 1 <= n <= km.N - 1:
        raise ValidationError("difference forms defined for n = 1..N-1")
    k, k1 = km(n), km(n + 1)
    wt = _div(grid.delta(-1, k + 1), grid.delta(1, k)) \
        - _div(grid.delta(-1, k1 + 1), grid.delta(1, k1))
    vt = _div(grid.delta(-2, k + 2), grid.delta(0, k + 1)) \
        - _div(grid.delta(-2, k1 + 1), grid.delta(0, k1))
    return wt, vt


def peakon_profile(grid, n_peaks=None):
    """Solution profile encoded in a determinant grid.

    Positions x_n = log(Delta_{2,kappa(n)} / Delta_{0,kappa(n)+1}) are
    returned as floats at the grid's target precision; exp_x and the weights
    keep Fractions on the exact path.
    """
    with mp.workdps(grid.wdps):
        sd = _string_data(grid, n_peaks)
    with mp.workdps(grid.digits):
        xs = []
        for n, xtn in enumerate(sd["xt"], start=1):
            k = sd["km"](n)
            num, den = grid.delta(2, k), grid.delta(0, k + 1)
            xs.append(mp.log(to_mpf(num)) - mp.log(to_mpf(den)))
    with mp.workdps(grid.wdps):
        omega = [w * xt for w, xt in zip(sd["wt"], sd["xt"])]
        upsilon = [v * xt for v, xt in zip(sd["vt"], sd["xt"])]
        last_v = sd["last_upsilon"]
        if last_v is not None and len(sd["xt"]) == sd["km"].N:
            last_v = last_v * sd["xt"][-1]
        elif last_v is not None:
            last_v = None
    return PeakonProfile(
        x=xs, exp_x=sd["xt"], omega=omega, upsilon=upsilon,
        s_minus1=grid.table.s(-1), kappa=sd["km"], complete=sd["complete"],
        limited_by=sd["limited_by"], digits=grid.digits,
        last_upsilon=last_v, exact=grid.exact)


def wavefront(table):
    """Leading edge of the support: x_1 = -log s_0.

    Computed exactly as the profile does for n = 1 (same conversion, same
    precision), so the two agree bit for bit.
    """
    with mp.workdps(table.digits):
        return -mp.log(to_mpf(table.s(0)))


def first_point_mass(table):
    """Mass sitting at the wavefront, s_0 / s_1."""
    s0, s1 = table.s(0), table.s(1)
    return _div(s0, s1)


# ---------------------------------------------------------------------------
# the piecewise-smooth solution


@dataclass
class PiecewiseSolution:
    """u on (-inf, x_last], glued from cosh/sinh pieces between peaks.

    Between peaks u solves u'' = u; left of the first peak u = (s_-1/2) e^x;
    right of the last peak the decaying tail e^-x is only available when the
    profile was complete.
    """
    x: list
    exp_x: list
    u_at: list         # u(x_n)
    up_minus: list     # u'(x_n-)
    omega: list
    upsilon: list
    s_minus1: object
    complete: bool
    digits: int
    tail_residual: object = None

    def _piece(self, n, xx):
        """Value on [x_n, x_{n+1}) measured from node n (0-based)."""
        dx = xx - self.x[n]
        up_plus = self.up_minus[n] - self.omega[n]
        return self.u_at[n] * mp.cosh(dx) + up_plus * mp.sinh(dx)

    def value(self, xx):
        with mp.workdps(self.digits + 10):
            xx = to_mpf(xx)
            if not self.x:
                return to_mpf(self.s_minus1) / 2 * mp.exp(xx)
            if xx <= self.x[0]:
                return to_mpf(self.s_minus1) / 2 * mp.exp(xx)
            i = bisect.bisect_right(self.x, xx) - 1
            if i >= len(self.x) - 1:
                if xx == self.x[-1]:
                    return self.u_at[-1]
                if not self.complete:
                    raise DomainError(
                        "u is only determined up to x = %s with this much data"
                        % mp.nstr(self.x[-1], 10))
                return self.u_at[-1] * mp.exp(-(xx - self.x[-1]))
            if i >= len(self.omega):
                raise DomainError("no weight data past node %d" % (i,))
            return self._piece(i, xx)

    def __call__(self, xx):
        return self.value(xx)

    def sample(self, xs):
        return [self.value(xx) for xx in xs]


def reconstruct_u(profile):
    """Glue the solution together from a profile.

    Seeds u = u'(.-) = (s_-1/2) e^{x_1} at the first peak, then propagates
    through each peak with the jump u'(x_n+) = u'(x_n-) - omega_n and the
    interval transfer built from r = exp(x_{n+1} - x_n), taken as the exact
    ratio of the cached determinant ratios rather than via logs.
    """
    wdps = work_digits(profile.digits, profile.n_positions + 2)
    with mp.workdps(wdps):
        if profile.n_positions == 0:
            return PiecewiseSolution([], [], [], [], [], [],
                                     profile.s_minus1, profile.complete,
                                     profile.digits)
        sm1 = to_mpf(profile.s_minus1)
        ex = [to_mpf(v) for v in profile.exp_x]
        u = [sm1 / 2 * ex[0]]
        upm = [u[0]]
        nprop = min(len(profile.omega), profile.n_positions - 1)
        for n in range(nprop):
            r = ex[n + 1] / ex[n]
            C, S = (r + 1 / r) / 2, (r - 1 / r) / 2
            up_plus = upm[n] - to_mpf(profile.omega[n])
            u.append(u[n] * C + up_plus * S)
            upm.append(u[n] * S + up_plus * C)
        tail = None
        if profile.complete and len(profile.omega) == profile.n_positions:
            up_out = upm[-1] - to_mpf(profile.omega[-1])
            scale = max(abs(u[-1]), abs(up_out), mp.mpf(1))
            tail = abs(up_out + u[-1]) / scale
        xs = [to_mpf(v) for v in profile.x]
        om = [to_mpf(w) for w in profile.omega]
        ups = [to_mpf(v) for v in profile.upsilon]
    return PiecewiseSolution(
        x=xs, exp_x=ex, u_at=u, up_minus=upm, omega=om, upsilon=ups,
        s_minus1=profile.s_minus1, complete=profile.complete,
        digits=profile.digits, tail_residual=tail)


def u_plus_uprime(grid, n):
    """u(x_n) + u'(x_n-) straight from the grid:
    Delta_{2,kappa(n)} Delta_{-1,kappa(n)+1} /
    (Delta_{0,kappa(n)+1} Delta_{1,kappa(n)})."""
    km = _hankel.kappa(grid)
    k = km(n)
    with mp.workdps(grid.wdps):
        return _div(grid.delta(2, k) * grid.delta(-1, k + 1),
                    grid.delta(0, k + 1) * grid.delta(1, k))


# ---------------------------------------------------------------------------
# summation identities


def partial_sum_identities(profile, grid, n):
    """Check the two closed-form partial sums against the grid at index n
    (1-based, n <= number of resolved positions):

      sum_{m<n} omega_m e^{-x_m}
          = Delta_{-1,1}/Delta_{1,0} - Delta_{-1,kappa(n)+1}/Delta_{1,kappa(n)}

      int_{-inf}^{x_n} e^{-x} (u + u')^2 dx  +  sum_{x_m < x_n} e^{-x_m} upsilon_m
          = -Delta_{-2,kappa(n)+2}/Delta_{0,kappa(n)+1}

    The energy integral is evaluated in closed form piece by piece (on each
    smooth interval u + u' is proportional to e^x).  Returns a dict with
    lhs/rhs/relative residual per identity.
    """
    km = profile.kappa
    if not 1 <= n <= profile.n_positions:
        raise ValidationError("n out of range")
    sol = reconstruct_u(profile)
    with mp.workdps(work_digits(profile.digits, km.N + 2)):
        k = km(n)
        ex = [to_mpf(v) for v in profile.exp_x]
        # mass identity
        lhs1 = mp.fsum(to_mpf(profile.omega[m]) / ex[m] for m in range(n - 1))
        rhs1 = to_mpf(_div(grid.delta(-1, 1), grid.delta(1, 0))) \
            - to_mpf(_div(grid.delta(-1, k + 1), grid.delta(1, k)))
        # energy identity
        sm1 = to_mpf(profile.s_minus1)
        lhs2 = sm1 ** 2 * ex[0]
        for m in range(n - 1):
            A = sol.u_at[m] + sol.up_minus[m] - sol.omega[m]
            lhs2 += A ** 2 / ex[m] ** 2 * (ex[m + 1] - ex[m])
            lhs2 += to_mpf(profile.upsilon[m]) / ex[m]
        rhs2 = -to_mpf(_div(grid.delta(-2, k + 2), grid.delta(0, k + 1)))

        def rel(a, b):
            sc = max(abs(a), abs(b))
            return abs(a - b) if sc == 0 else abs(a - b) / sc

        return {"mass": (lhs1, rhs1, rel(lhs1, rhs1)),
                "energy": (lhs2, rhs2, rel(lhs2, rhs2))}
