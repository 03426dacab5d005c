"""Time evolution: snapshots, trajectories, ODE residuals, collisions,
momentum and the accumulation point of infinite profiles.

The flow never integrates differential equations.  Deforming the measure by
e^{-t/(2 lam)} and rerunning the inverse map IS the time evolution; the ODE
residual routines exist to verify that the family of profiles produced this
way actually moves with the velocity field

    dx_n/dt     = u(x_n, t),
    domega_n/dt = -omega_n (u_x(x_n-, t) + u_x(x_n+, t)) / 2,

using centered differences in t against closed determinant expressions for
the right-hand sides.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from ._num import as_exact, is_exact, to_mpf, work_digits, rel_err
from .errors import (ValidationError, InconsistencyError, TruncationError,
                     PrecisionError)
from .measure import (DiscreteMeasure, AlSalamCarlitzMeasure, base_of,
                      moments)
from . import hankel as _hankel
from . import inverse as _inverse
from . import forward as _forward


def default_h(digits):
    """Step for centered differences in t: 10^(-digits/8), kept inside
    [1e-6, 1e-3] and exact so that rational specs stay on the exact path."""
    return Fraction(1, 10 ** max(3, min(6, digits // 8)))


def _as_time(x):
    """Rational when possible, so exact measures stay exact at t +- h."""
    if isinstance(x, mp.mpf):
        return x
    try:
        return as_exact(x)
    except (TypeError, ValueError):
        return to_mpf(x)


# ---------------------------------------------------------------------------
# snapshots and trajectories


def snapshot(spec, t=0, n_peaks=None, grid=None, digits=200, preset=None):
    """Profile of the first n_peaks peakons at time t, plus u sampled on
    `grid` (clipped to the region the data determines)."""
    base = base_of(spec)
    if n_peaks is None:
        if isinstance(base, DiscreteMeasure):
            n_peaks = base.support_size
        else:
            raise ValidationError(
                "n_peaks must be given for an infinite spectrum")
    finite = isinstance(base, DiscreteMeasure)
    K = n_peaks if (finite and n_peaks >= base.support_size) else n_peaks + 1
    table = moments(spec, t=t, K=K, digits=digits, preset=preset)
    g = _hankel.build_grid(table)
    want = None if (finite and n_peaks >= base.support_size) else n_peaks
    profile = _inverse.peakon_profile(g, n_peaks=want)
    samples = None
    if grid is not None:
        sol = _inverse.reconstruct_u(profile)
        xs = [x for x in grid if to_mpf(x) <= to_mpf(profile.x[-1])]
        samples = list(zip(xs, sol.sample(xs)))
    return profile, samples


@dataclass
class TrajectoryTable:
    """Profiles along a time grid; kappa_changed[i] flags a change of the
    determinant-chain layout between times[i] and times[i+1] (data on the
    two sides must not be interpolated across)."""
    times: list
    profiles: list
    kappa_changed: list


def trajectory(spec, times, n_peaks=None, digits=200, preset=None):
    ts = list(times)
    for a, b in zip(ts, ts[1:]):
        if not to_mpf(b) > to_mpf(a):
            raise ValidationError("time grid must be strictly increasing")
    profiles = [snapshot(spec, t, n_peaks, digits=digits, preset=preset)[0]
                for t in ts]
    changed = [p.kappa.kap != q.kappa.kap
               for p, q in zip(profiles, profiles[1:])]
    return TrajectoryTable(ts, profiles, changed)


# ---------------------------------------------------------------------------
# closed-form right-hand sides (two independent determinant routes each)


def _velocity_routes(grid, n):
    """u(x_n) both ways: from pure-Hankel products and from the
    column-skipped determinants."""
    d, g = grid.delta, grid.gamma
    route_a = (d(0, n) * d(3, n - 1) / (d(1, n) * d(2, n - 1))
               + d(-1, n + 1) * d(2, n - 1) / (d(0, n) * d(1, n))) / 2
    route_b = (g(-1, n) / d(0, n) - g(1, n - 1) / d(2, n - 1)) / 2
    return route_a, route_b


def _slope_routes(grid, n):
    """(u_x(x_n-) + u_x(x_n+))/2 = -omega_n'/omega_n, both ways."""
    d, g = grid.delta, grid.gamma
    route_a = (d(-1, n) * d(2, n - 1) / (d(0, n) * d(1, n - 1))
               - d(0, n) * d(3, n - 1) / (d(1, n) * d(2, n - 1))) / 2
    route_b = (g(-1, n) / d(0, n) + g(1, n - 1) / d(2, n - 1)
               - g(0, n - 1) / d(1, n - 1) - g(0, n) / d(1, n)) / 2
    return route_a, route_b


def _cross_checked(routes, digits, what):
    a, b = routes
    err = rel_err(a, b)
    if to_mpf(err) > mp.mpf(10) ** (-(digits // 2)):
        raise PrecisionError(
            "determinant routes for %s disagree by %s" % (what, mp.nstr(to_mpf(err), 5)),
            suggested_digits=2 * digits)
    return a


def _no_collision_near(grids, n):
    """All Delta_{1,k} nonzero with matching signs across the time stencil."""
    for k in range(1, n + 2):
        signs = set()
        for g in grids:
            if not g.has_delta(1, k):
                continue
            if g.is_zero(1, k):
                raise InconsistencyError(
                    "Delta_{1,%d} vanishes inside the difference stencil "
                    "(collision); move t or shrink h" % k)
            v = g.delta(1, k)
            signs.add(1 if (v > 0 if is_exact(v) else to_mpf(v) > 0) else -1)
        if len(signs) > 1:
            raise InconsistencyError(
                "Delta_{1,%d} changes sign inside the difference stencil "
                "(collision); move t or shrink h" % k)


def ode_residual(spec, t, n, h=None, digits=60):
    """Centered-difference residuals (r_x, r_omega) of the peakon system at
    peak n; both are O(h^2) away from collisions."""
    if h is None:
        h = default_h(digits)
    h, t = _as_time(h), _as_time(t)
    base = base_of(spec)
    finite = isinstance(base, DiscreteMeasure)
    npk = base.support_size if finite else n + 1
    if n > npk:
        raise ValidationError("peak index %d exceeds the profile" % n)
    K = npk + 1
    tabs = [moments(spec, t=tt, K=K, digits=digits)
            for tt in (t - h, t, t + h)]
    grids = [_hankel.build_grid(tb) for tb in tabs]
    _no_collision_near(grids, min(n, npk - 1) if finite else n)
    profs = [_inverse.peakon_profile(g, n_peaks=None if finite else npk)
             for g in grids]
    for p in profs:
        if p.kappa.kap[:n] != tuple(range(n)):
            raise InconsistencyError(
                "determinant chain is degenerate at peak %d" % n)
    gmid = grids[1]
    wdps = work_digits(digits, K + 2)
    with mp.workdps(wdps):
        u_n = _cross_checked(_velocity_routes(gmid, n), digits, "u(x_n)")
        slope = _cross_checked(_slope_routes(gmid, n), digits,
                               "u_x at peak %d" % n)
        hh = to_mpf(h)
        xm, xp = to_mpf(profs[0].x[n - 1]), to_mpf(profs[2].x[n - 1])
        r_x = abs((xp - xm) / (2 * hh) - to_mpf(u_n))
        wm, w0, wp = (to_mpf(p.omega[n - 1]) for p in profs)
        r_w = abs(-(wp - wm) / (2 * hh) / w0 - to_mpf(slope))
        return +r_x, +r_w


def infinite_ode_residual(spec, t, n, n_trunc, h=None, digits=60,
                          tail_tol=mp.mpf("1e-6")):
    """Residuals of the summed form of the system,

        dx_n/dt = (1/2) sum_k omega_k e^{-|x_n-x_k|},

    truncated at n_trunc terms.  The neglected tail sits entirely to the
    right of x_n, so the moment identity for sum omega_k e^{-x_k} prices it
    exactly: tail = (1/2) e^{x_n} (s_-1 - sum_{k<=N} omega_k e^{-x_k})."""
    if h is None:
        h = default_h(digits)
    h, t = _as_time(h), _as_time(t)
    if n > n_trunc:
        raise ValidationError("peak index beyond truncation")
    base = base_of(spec)
    finite = isinstance(base, DiscreteMeasure)
    if finite:
        n_trunc = min(n_trunc, base.support_size)
    profs = [snapshot(spec, tt, n_trunc, digits=digits)[0]
             for tt in (t - h, t, t + h)]
    p = profs[1]
    m = min(p.n_weights, n_trunc)
    wdps = work_digits(digits, n_trunc + 2)
    with mp.workdps(wdps):
        xs = [to_mpf(v) for v in p.x[:m]]
        ws = [to_mpf(v) for v in p.omega[:m]]
        xn = xs[n - 1]
        rhs_x = sum(w * mp.exp(-abs(xn - x)) for x, w in zip(xs, ws)) / 2
        rhs_w = sum(mp.sign(xn - x) * mp.exp(-abs(xn - x)) * w
                    for x, w in zip(xs, ws)) / 2
        left = sum(w * mp.exp(-x) for x, w in zip(xs, ws))
        tail = mp.exp(xn) * abs(to_mpf(p.s_minus1) - left) / 2
        if tail > tail_tol:
            raise TruncationError(
                "tail bound %s exceeds %s; increase n_trunc"
                % (mp.nstr(tail, 5), mp.nstr(to_mpf(tail_tol), 5)))
        hh = to_mpf(h)
        xm, xp = to_mpf(profs[0].x[n - 1]), to_mpf(profs[2].x[n - 1])
        wm, wp = to_mpf(profs[0].omega[n - 1]), to_mpf(profs[2].omega[n - 1])
        r_x = abs((xp - xm) / (2 * hh) - rhs_x)
        r_w = abs((wp - wm) / (2 * hh) / ws[n - 1] - rhs_w)
        return {"r_x": +r_x, "r_omega": +r_w, "tail_bound": +tail,
                "n_trunc": n_trunc}


# ---------------------------------------------------------------------------
# collisions


def _delta1k_at(spec, k, t, digits):
    table = moments(spec, t=t, K=k + 1, digits=digits)
    return _hankel.hankel_det(table, 1, k)


def collision_scan(spec, k, t_interval, digits=60, tol=mp.mpf("1e-12"),
                   max_points=4096):
    """Times in t_interval where Delta_{1,k}(t) crosses zero.

    Positive spectra never produce one (returns []).  For signed finite
    spectra the scan walks a grid whose initial step comes from the slowest
    pair of exponential rates 1/(2 lam), halving near sign changes, then
    bisects each bracket down to `tol`.  Returns the report dict used by the
    CLI: {"k", "grid": {...}, "roots": [{"t", "bracket", "upsilon_mass"}]}.
    """
    base = base_of(spec)
    if not isinstance(base, DiscreteMeasure):
        # the q-lattice and classical-weight families are all positive
        return {"k": k, "grid": {"points": 0}, "roots": []}
    lams = [l for l, _ in base.point_data()]
    if all(to_mpf(l) > 0 for l in lams):
        return {"k": k, "grid": {"points": 0}, "roots": []}
    a, b = (to_mpf(t_interval[0]), to_mpf(t_interval[1]))
    if not b > a:
        raise ValidationError("empty time interval")
    rates = sorted(to_mpf(1) / (2 * to_mpf(l)) for l in lams)
    seps = [abs(r2 - r1) for r1, r2 in zip(rates, rates[1:])]
    sep_min = min((s for s in seps if s > 0), default=mp.mpf(1))
    step = min(1 / (4 * sep_min), (b - a) / 64)
    npts = int(mp.ceil((b - a) / step)) + 1
    if npts > max_points:
        npts = max_points
        step = (b - a) / (npts - 1)
    with mp.workdps(work_digits(digits, k + 2)):
        ts = [a + step * i for i in range(npts)]
        ts[-1] = b
        vals = [to_mpf(_delta1k_at(spec, k, tt, digits)) for tt in ts]
        roots = []
        for (t1, v1), (t2, v2) in zip(zip(ts, vals), zip(ts[1:], vals[1:])):
            if v1 == 0:
                roots.append((t1, (t1, t1)))
                continue
            if v1 * v2 < 0:
                lo, hi, flo = t1, t2, v1
                while hi - lo > tol:
                    mid = (lo + hi) / 2
                    fm = to_mpf(_delta1k_at(spec, k, mid, digits))
                    if fm == 0:
                        lo = hi = mid
                        break
                    if flo * fm < 0:
                        hi = mid
                    else:
                        lo, flo = mid, fm
                roots.append(((lo + hi) / 2, (t1, t2)))
        if vals and vals[-1] == 0:
            roots.append((ts[-1], (ts[-1], ts[-1])))
        out = []
        for troot, bracket in roots:
            out.append({"t": +troot, "bracket": (+bracket[0], +bracket[1]),
                        "upsilon_mass": _upsilon_at_collision(spec, k, troot,
                                                              digits)})
    return {"k": k,
            "grid": {"points": npts, "step": +step,
                     "interval": (+a, +b), "certified": npts < max_points},
            "roots": out}


def _upsilon_at_collision(spec, k, troot, digits):
    """Dipole mass produced when Delta_{1,k} vanishes: the chain skips k,
    and the node in front of the gap carries

        upsilon = [Delta_{-1,k+1}^2 / (Delta_{0,k} Delta_{0,k+1})]
                  * Delta_{2,k-1} / Delta_{0,k}.

    Evaluated directly at the bisected root (the root is only known to the
    bisection tolerance, so the kappa scan would not flag the zero)."""
    table = moments(spec, t=troot, K=k + 2, digits=digits)
    grid = _hankel.build_grid(table, with_gamma=False)
    with mp.workdps(grid.wdps):
        d = grid.delta
        vt = to_mpf(d(-1, k + 1)) ** 2 / (to_mpf(d(0, k)) * to_mpf(d(0, k + 1)))
        xt = to_mpf(d(2, k - 1)) / to_mpf(d(0, k))
        return +(vt * xt)


# ---------------------------------------------------------------------------
# accumulation point, momentum, scaling


def accumulation_L(spec, t=0, terms=None, digits=60):
    """Accumulation point of the peakon positions for a purely discrete
    spectrum: L(t) = log sum_lam e^{+t/(2 lam)} / (lam^2 W'(lam)^2 gam_lam).
    Note the reversed sign in the exponent relative to the moments.
    Returns (L, report)."""
    dual, report = _forward.rho_plus(spec, terms=terms, digits=digits)
    with mp.workdps(work_digits(digits, dual.support_size + 2)):
        tt = to_mpf(t)
        total = mp.mpf(0)
        for lam, gam in dual.point_data():
            total += to_mpf(gam) * mp.exp(tt / (2 * to_mpf(lam)))
        if not total > 0:
            raise InconsistencyError("dual masses summed to a nonpositive value")
        val = +mp.log(total)
    return val, report


def total_momentum(spec, t=0, n_trunc=None, digits=60):
    """sum omega_n(t) over the first n_trunc peaks, plus a tail bound.

    The heights must be summable, which restricts this to purely discrete
    spectra.  Tail: sum_{k>N} omega_k = sum omega_k e^{-x_k} e^{x_k}
    <= e^{L(t)} (s_-1 - partial mass sum), both factors computable.
    Returns (value, tail_bound)."""
    base = base_of(spec)
    if not isinstance(base, (DiscreteMeasure, AlSalamCarlitzMeasure)):
        raise ValidationError(
            "total momentum needs summable heights (discrete spectrum)")
    finite = isinstance(base, DiscreteMeasure)
    if n_trunc is None:
        n_trunc = base.support_size if finite else 32
    # heights only: the slim determinant rows suffice, no Gamma chain
    K = n_trunc if finite and n_trunc >= (base.support_size or 0) \
        else n_trunc + 1
    tab = moments(spec, t=t, K=K, digits=digits)
    grid = _hankel.build_grid(tab, K=K, rows=(0, 1, 2), with_gamma=False)
    prof = _inverse.peakon_profile(grid, n_peaks=n_trunc)
    with mp.workdps(work_digits(digits, n_trunc + 2)):
        if prof.exact:
            val = sum(prof.omega, Fraction(0))
        else:
            val = +sum((to_mpf(w) for w in prof.omega), mp.mpf(0))
        if finite and prof.complete:
            return val, (Fraction(0) if prof.exact else mp.mpf(0))
        left = sum((to_mpf(w) * mp.exp(-to_mpf(x))
                    for x, w in zip(prof.x, prof.omega)), mp.mpf(0))
        rest = abs(to_mpf(prof.s_minus1) - left)
        L, _rep = accumulation_L(spec, t=t, terms=max(n_trunc, 48),
                                 digits=digits)
        tail = +(mp.exp(L) * rest)
        if not prof.exact:
            val = +to_mpf(val)
    return val, tail


def scaling_check(table, c=1, d=1, n_peaks=None):
    """Verify on computed profiles that s_k -> c d^k s_k only shifts
    positions by -log c and scales weights by 1/d (dipoles by 1/d^2).
    Returns the worst relative residual per field; exact zero on the
    rational path."""
    g0 = _hankel.build_grid(table)
    g1 = _hankel.build_grid(table.scaled(c, d))
    p0 = _inverse.peakon_profile(g0, n_peaks=n_peaks)
    p1 = _inverse.peakon_profile(g1, n_peaks=n_peaks)
    cc, dd = (c, d) if p0.exact and p1.exact else (to_mpf(c), to_mpf(d))
    with mp.workdps(g0.wdps):
        rx = max((abs(e1 * cc / e0 - 1) for e0, e1
                  in zip(p0.exp_x, p1.exp_x)), default=0)
        rw = max((abs(w1 * dd / w0 - 1) for w0, w1
                  in zip(p0.omega, p1.omega) if w0 != 0), default=0)
        rv = max((abs(v1 * dd * dd / v0 - 1) for v0, v1
                  in zip(p0.upsilon, p1.upsilon) if v0 != 0), default=0)
        if not (p0.exact and p1.exact):
            rx, rw, rv = +to_mpf(rx), +to_mpf(rw), +to_mpf(rv)
    return {"x": rx, "omega": rw, "upsilon": rv}


def moment_derivative_residual(spec, l, t=0, h=None, digits=60):
    """|(s_l(t+h) - s_l(t-h))/(2h) + s_{l-1}(t)/2|, O(h^2) for l >= 0."""
    if h is None:
        h = default_h(digits)
    h, t = _as_time(h), _as_time(t)
    if l < 0:
        raise ValidationError("the moment derivative identity needs l >= 0")
    K = max(1, l // 2 + 1)
    tm, t0, tp = (moments(spec, t=tt, K=K, digits=digits)
                  for tt in (t - h, t, t + h))
    with mp.workdps(work_digits(digits, K)):
        fd = (to_mpf(tp.s(l)) - to_mpf(tm.s(l))) / (2 * to_mpf(h))
        return +abs(fd + to_mpf(t0.s(l - 1)) / 2)
