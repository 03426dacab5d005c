"""Spectral measures and their time-evolved moment tables.

A measure spec describes a positive measure on the real line (finitely many
points, a q-lattice, or a classical weight).  The isospectral evolution only
multiplies the measure by exp(-t/(2*lam)), so the moments

    s_k(t) = integral lam^k exp(-t/(2*lam)) d rho0(lam),   k = -1 .. 2K

are the whole interface between a measure and everything downstream.  The
index runs from -1 because the reconstruction formulas genuinely use the
inverse moment; s_k for k <= -2 is taken to be 0 by convention.

Moments are produced on one of two paths:

* exact      -- Fractions, available for finite rational data at rational
                t = 0 (the evolution factor is transcendental otherwise);
* arbitrary-precision float -- mpmath at an inflated working precision,
                with quadrature spot-checks and automatic escalation where
                a three-term recurrence is used to extend the table.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from ._num import as_exact, is_exact, to_mpf, qpoch, work_digits
from .errors import ValidationError, PrecisionError, TruncationError

_MAX_ASC_TERMS = 200000


# ---------------------------------------------------------------------------
# measure specs


class DiscreteMeasure:
    """Finitely many mass points (lam_j, gam_j), gam_j > 0, lam_j != 0."""

    kind = "discrete"

    def __init__(self, points):
        if not points:
            raise ValidationError("discrete measure needs at least one point")
        pts = []
        for p in points:
            lam, gam = p
            lam = as_exact(lam) if not isinstance(lam, mp.mpf) else lam
            gam = as_exact(gam) if not isinstance(gam, mp.mpf) else gam
            if gam <= 0:
                raise ValidationError("masses must be positive, got %s" % (gam,))
            if lam == 0:
                raise ValidationError("support may not contain 0")
            pts.append((lam, gam))
        pts.sort(key=lambda p: to_mpf(p[0]))
        lams = [to_mpf(l) for l, _ in pts]
        for i in range(len(lams) - 1):
            if lams[i] == lams[i + 1]:
                raise ValidationError("support points must be distinct")
        self.points = pts
        self.exact = all(is_exact(l) and is_exact(g) for l, g in pts)

    @property
    def positive(self):
        return all(to_mpf(l) > 0 for l, _ in self.points)

    @property
    def support_size(self):
        return len(self.points)

    def point_data(self, count=None, digits=None):
        return list(self.points)

    def __repr__(self):
        return "DiscreteMeasure(%d points)" % len(self.points)


class AlSalamCarlitzMeasure:
    """The q-lattice measure with points a*q^(1-n) - 1, n >= 1, and masses

        gam_n = (q/a;q)_inf * a^-(n-1) q^((n-1)^2) / ((q/a;q)_(n-1) (q;q)_(n-1)).

    Needs 0 < q < 1 < a < 1/q so the support stays positive.  The masses
    include the normalizing infinite product.
    """

    kind = "al-salam-carlitz"

    def __init__(self, a, q):
        a, q = as_exact(a), as_exact(q)
        if not (0 < q < 1):
            raise ValidationError("need 0 < q < 1")
        if not (1 < a < 1 / q):
            raise ValidationError("need 1 < a < 1/q")
        self.a, self.q = a, q

    positive = True
    support_size = None  # countably infinite

    def lam(self, n):
        """n-th support point (n >= 1), increasing to infinity."""
        return self.a * self.q ** (1 - n) - 1

    def point_data(self, count, digits=None):
        """First `count` points with masses at the current mp precision."""
        a, q = to_mpf(self.a), to_mpf(self.q)
        pref = qpoch(q / a, q)
        out = []
        for n in range(1, count + 1):
            gam = pref * a ** (-(n - 1)) * q ** ((n - 1) ** 2)
            gam /= qpoch(q / a, q, n - 1) * qpoch(q, q, n - 1)
            out.append((self.lam(n), gam))
        return out

    def __repr__(self):
        return "AlSalamCarlitzMeasure(a=%s, q=%s)" % (self.a, self.q)


class LaguerreMeasure:
    """(lam - alpha)^gamma e^-(lam - alpha) / Gamma(gamma+1) on (alpha, inf),
    optionally perturbed by a positive weight factor h(lam)."""

    kind = "laguerre"
    positive = True
    support_size = None

    def __init__(self, gamma, alpha, h=None):
        gamma, alpha = as_exact(gamma), as_exact(alpha)
        if gamma <= -1:
            raise ValidationError("need gamma > -1")
        if alpha < 0 or (alpha == 0 and gamma <= 0):
            raise ValidationError("need alpha > 0 (or alpha = 0 with gamma > 0)")
        self.gamma, self.alpha, self.h = gamma, alpha, h

    def __repr__(self):
        return "LaguerreMeasure(gamma=%s, alpha=%s%s)" % (
            self.gamma, self.alpha, ", h" if self.h else "")


class JacobiMeasure:
    """(lam - alpha)^b (1 + alpha - lam)^a on (alpha, 1 + alpha), not
    normalized, optionally perturbed by h(lam)."""

    kind = "jacobi"
    positive = True
    support_size = None

    def __init__(self, a, b, alpha, h=None):
        a, b, alpha = as_exact(a), as_exact(b), as_exact(alpha)
        if a <= -1 or b <= -1:
            raise ValidationError("need a, b > -1")
        if alpha <= 0:
            raise ValidationError("need alpha > 0")
        self.a, self.b, self.alpha, self.h = a, b, alpha, h

    def __repr__(self):
        return "JacobiMeasure(a=%s, b=%s, alpha=%s)" % (self.a, self.b, self.alpha)


class StieltjesWigertMeasure:
    """(kappa/sqrt(pi)) exp(-kappa^2 log^2(lam - alpha)) on (alpha, inf)."""

    kind = "stieltjes-wigert"
    positive = True
    support_size = None

    def __init__(self, kappa, alpha=0, h=None):
        kappa, alpha = as_exact(kappa), as_exact(alpha)
        if kappa <= 0:
            raise ValidationError("need kappa > 0")
        if alpha < 0:
            raise ValidationError("need alpha >= 0")
        self.kappa, self.alpha, self.h = kappa, alpha, h

    def __repr__(self):
        return "StieltjesWigertMeasure(kappa=%s, alpha=%s)" % (self.kappa, self.alpha)


class EvolvedMeasure:
    """A measure spec pushed forward in time by t0; asking for its moments at
    time t reads the base measure at t0 + t.  Composition adds the shifts
    exactly when both are rational."""

    kind = "evolved"

    def __init__(self, base, t0):
        if isinstance(base, EvolvedMeasure):
            t0 = _add_times(base.t0, t0)
            base = base.base
        self.base = base
        self.t0 = t0

    @property
    def positive(self):
        return self.base.positive

    @property
    def support_size(self):
        return self.base.support_size

    def point_data(self, count=None, digits=None):
        return self.base.point_data(count, digits)

    def __repr__(self):
        return "EvolvedMeasure(%r, t0=%s)" % (self.base, self.t0)


def _add_times(t1, t2):
    if is_exact(t1) and is_exact(t2):
        return as_exact(t1) + as_exact(t2)
    return to_mpf(t1) + to_mpf(t2)


def evolve(spec, t):
    """Shift the measure in time: rho(., t0 + t).  Pure bookkeeping -- the
    moments are always computed from the closed-form evolution factor, never
    by integrating an ODE."""
    if isinstance(t, str):
        t = as_exact(t)
    return EvolvedMeasure(spec, t)


def base_of(spec):
    return spec.base if isinstance(spec, EvolvedMeasure) else spec


# ---------------------------------------------------------------------------
# moment tables


class MomentTable:
    """Moments s_k for k = -1 .. k_max at a fixed time.

    s(k) returns 0 for k <= -2 (the standing convention) and raises for
    k > k_max.  `exact` tells whether values are Fractions.
    """

    def __init__(self, values, t, digits, exact, family, truncation=None,
                 support_size=None):
        self._v = dict(values)
        self.t = t
        self.digits = digits
        self.exact = exact
        self.family = family
        self.truncation = truncation or {}
        self.support_size = support_size
        self.k_max = max(self._v)
        if min(self._v) != -1:
            raise ValidationError("moment table must start at k = -1")

    def s(self, k):
        if k <= -2:
            return Fraction(0) if self.exact else mp.mpf(0)
        try:
            return self._v[k]
        except KeyError:
            raise ValidationError(
                "moment s_%d not tabulated (k_max = %d)" % (k, self.k_max)) from None

    @property
    def K(self):
        return self.k_max // 2

    def scaled(self, c=1, d=1):
        """Table for the rescaled data s~_k = c * d^k * s_k."""
        c = as_exact(c) if is_exact(c) or isinstance(c, str) else to_mpf(c)
        d = as_exact(d) if is_exact(d) or isinstance(d, str) else to_mpf(d)
        vals = {}
        for k, v in self._v.items():
            vals[k] = c * d ** k * v
        exact = self.exact and is_exact(c) and is_exact(d)
        return MomentTable(vals, self.t, self.digits, exact,
                           self.family + "+scaled", self.truncation,
                           self.support_size)

    def __repr__(self):
        return "MomentTable(%s, t=%s, k=-1..%d, digits=%d%s)" % (
            self.family, self.t, self.k_max, self.digits,
            ", exact" if self.exact else "")


def moments(spec, t=0, K=12, digits=200, preset=None):
    """Moment table s_-1 .. s_2K of spec at time t.

    `digits` is the target relative accuracy of each entry; internal work
    runs at an inflated precision.  `preset='paper-300-terms'` pins the
    q-lattice truncation at exactly 300 terms for reproducibility.
    """
    if K < 1:
        raise ValidationError("K must be >= 1")
    if isinstance(t, str):
        t = as_exact(t)
    if isinstance(spec, EvolvedMeasure):
        t = _add_times(spec.t0, t)
        spec = spec.base
    if isinstance(spec, DiscreteMeasure):
        return _discrete_moments(spec, t, K, digits)
    if isinstance(spec, AlSalamCarlitzMeasure):
        return _asc_moments(spec, t, K, digits, preset)
    if isinstance(spec, LaguerreMeasure):
        return _laguerre_moments(spec, t, K, digits)
    if isinstance(spec, JacobiMeasure):
        return _jacobi_moments(spec, t, K, digits)
    if isinstance(spec, StieltjesWigertMeasure):
        return _sw_moments(spec, t, K, digits)
    raise ValidationError("unknown measure spec %r" % (spec,))


def _evo(lam, t):
    """exp(-t/(2 lam)) at current precision."""
    return mp.exp(-to_mpf(t) / (2 * to_mpf(lam)))


def _discrete_moments(spec, t, K, digits):
    if spec.exact and is_exact(t) and t == 0:
        vals = {}
        for k in range(-1, 2 * K + 1):
            vals[k] = sum((g * l ** k for l, g in spec.points), Fraction(0))
        return MomentTable(vals, as_exact(t), digits, True, "discrete",
                           support_size=spec.support_size)
    wdps = work_digits(digits, K)
    with mp.workdps(wdps):
        weights = [to_mpf(g) * _evo(l, t) for l, g in spec.points]
        lams = [to_mpf(l) for l, _ in spec.points]
        vals = {}
        for k in range(-1, 2 * K + 1):
            vals[k] = mp.fsum(w * l ** k for w, l in zip(weights, lams))
    return MomentTable(vals, t, digits, False, "discrete",
                       support_size=spec.support_size)


def _asc_moments(spec, t, K, digits, preset):
    kmax = 2 * K
    wdps = work_digits(digits, K)
    report = {"wdps": wdps}
    with mp.workdps(wdps):
        a, q = to_mpf(spec.a), to_mpf(spec.q)
        pref = qpoch(q / a, q)
        tol = mp.mpf(10) ** (-(wdps + 5))
        sums = {k: mp.mpf(0) for k in range(-1, kmax + 1)}
        fixed = None
        if preset == "paper-300-terms":
            fixed = 300
        elif preset is not None:
            raise ValidationError("unknown preset %r" % (preset,))
        n = 0
        gam = pref  # gam_1 has empty products
        while True:
            n += 1
            lam = to_mpf(spec.lam(n))
            w = gam * _evo(lam, t)
            small = True
            p = w / lam  # k = -1 term
            sums[-1] += p
            if abs(p) > tol * abs(sums[-1]):
                small = False
            for k in range(0, kmax + 1):
                p = w * lam ** k
                sums[k] += p
                if abs(p) > tol * abs(sums[k]):
                    small = False
            if fixed is not None:
                if n >= fixed:
                    break
            elif small and n >= max(16, K):
                break
            if n >= _MAX_ASC_TERMS:
                raise TruncationError(
                    "q-lattice sum did not settle after %d terms" % n)
            # next mass: gam_{n+1}/gam_n = q^(2n-1) / (a (1-q^n/a)(1-q^n))
            gam *= q ** (2 * n - 1) / (a * (1 - q ** n / a) * (1 - q ** n))
        report["terms"] = n
        report["rule"] = "fixed" if fixed else "relative-tail"
        vals = {k: +sums[k] for k in sums}
    return MomentTable(vals, t, digits, False, "al-salam-carlitz", report)


# -- quadrature helpers ------------------------------------------------------


def _spread(scales, lo=None, hi=None):
    """Panel endpoints spanning each scale by factors of 8, deduplicated."""
    pts = set()
    for s in scales:
        s = to_mpf(s)
        if s <= 0 or not mp.isfinite(s):
            continue
        for c in (mp.mpf(1) / 8, mp.mpf(1), mp.mpf(8)):
            x = c * s
            if (lo is None or x > lo) and (hi is None or x < hi):
                pts.add(x)
    out = []
    for x in sorted(pts):
        if out and x / out[-1] < mp.mpf("1.5"):
            continue
        out.append(x)
    return out


def _laguerre_integrand(spec, k, t):
    g, al = to_mpf(spec.gamma), to_mpf(spec.alpha)
    tt = to_mpf(t)
    lngam = mp.loggamma(g + 1)
    h = spec.h

    def f(x):
        # x = lam - alpha > 0
        lam = al + x
        ln = -x - tt / (2 * lam) - lngam
        if x > 0:
            ln += g * mp.log(x)
        elif g != 0:
            return mp.mpf(0)
        v = mp.exp(ln) * lam ** k
        if h is not None:
            v *= h(lam)
        return v

    return f


def _layer_ladder(lam_edge, t_abs, lam_lo=None, lam_hi=None):
    """Panel points resolving the exp(-|t|/(2 lam)) boundary layer at lam_edge.

    Steps uniformly in 1/lam so every panel spans at most ~30 decades of the
    exponential factor (a single catch-all panel next to a layer thousands of
    decades deep fools the tanh-sinh error estimator).  The ladder stops once
    the factor has dropped ~(dps+60) digits below the peak; whatever lies
    beyond is covered by one bulk panel and cannot contribute at that level.
    """
    decades_per_panel = mp.mpf(70)  # in ln units, ~30 decimal decades
    if t_abs == 0:
        return []
    delta = 2 * decades_per_panel / t_abs
    jmax = int(mp.ceil((mp.mp.dps + 60) * mp.log(10) / decades_per_panel)) + 1
    mu0 = 1 / lam_edge
    sgn = 1 if lam_lo is not None else -1  # walk toward lam_lo (down) or lam_hi (up)
    pts = []
    for j in range(1, jmax + 1):
        mu = mu0 + sgn * j * delta
        if mu <= 0:
            break
        lam = 1 / mu
        if lam_lo is not None and lam <= lam_lo:
            break
        if lam_hi is not None and lam >= lam_hi:
            break
        pts.append(lam)
    return pts


def _laguerre_panels(spec, k, t):
    al = to_mpf(spec.alpha)
    tt = to_mpf(t)
    kk = mp.mpf(max(k, 1))
    scales = [mp.mpf(1), kk]
    disc = kk * kk + 2 * tt
    if disc > 0:
        lam_star = (kk + mp.sqrt(disc)) / 2
        if lam_star > al:
            scales.append(lam_star - al)
    inner = _spread(scales, lo=mp.mpf(0))
    if tt < 0 and al > 0:
        # boundary layer at the left endpoint
        inner += [lam - al for lam in _layer_ladder(al, abs(tt), lam_hi=al + 8 * kk)]
    return [mp.mpf(0)] + sorted(set(inner)) + [mp.inf]


def _scaled_quad(f, pts, ln_scale):
    """Quadrature with the integrand normalized to unit peak magnitude.

    mp.quad stops on an *absolute* error estimate, so integrands living at
    magnitudes far from 1 either exit early with junk (tiny values, e.g. the
    e^(-t/(2 lam)) factor at large positive t) or grind to max degree in vain
    (huge values at large negative t).  Dividing by exp(ln_scale) makes the
    built-in test effectively relative; ln_scale only needs to be right to
    within a few dozen orders of magnitude."""
    s = mp.exp(-to_mpf(ln_scale))
    return mp.quad(lambda x: f(x) * s, pts) / s


def _laguerre_ln_scale(spec, k, t):
    g, al = to_mpf(spec.gamma), to_mpf(spec.alpha)
    tt = to_mpf(t)
    kk = mp.mpf(max(k, 0))
    cands = [al + 1]
    disc = kk * kk + 2 * tt
    if disc > 0:
        lam_star = (kk + mp.sqrt(disc)) / 2
        if lam_star > al:
            cands.append(lam_star)
    if al > 0:
        cands.append(al * (1 + mp.mpf("1e-6")))  # edge, dominant for t < 0
    best = None
    for lam in cands:
        v = -(lam - al) - tt / (2 * lam) + k * mp.log(lam)
        if best is None or v > best:
            best = v
    return best


def _laguerre_quad(spec, k, t):
    return _scaled_quad(_laguerre_integrand(spec, k, t),
                        _laguerre_panels(spec, k, t),
                        _laguerre_ln_scale(spec, k, t))


def _jacobi_integrand(spec, k, t):
    a, b, al = to_mpf(spec.a), to_mpf(spec.b), to_mpf(spec.alpha)
    tt = to_mpf(t)
    h = spec.h

    def f(lam):
        xl = lam - al
        xr = 1 + al - lam
        if xl <= 0 or xr <= 0:
            return mp.mpf(0)
        v = xl ** b * xr ** a * mp.exp(-tt / (2 * lam)) * lam ** k
        if h is not None:
            v *= h(lam)
        return v

    return f


def _jacobi_panels(spec, t):
    al = to_mpf(spec.alpha)
    tt = to_mpf(t)
    lo, hi = al, 1 + al
    inner = [al + mp.mpf("0.5")]
    if tt < 0:
        inner += _layer_ladder(lo, abs(tt), lam_hi=hi)
    if tt > 0:
        inner += _layer_ladder(hi, abs(tt), lam_lo=lo)
    return [lo] + sorted(set(p for p in inner if lo < p < hi)) + [hi]


def _jacobi_quad(spec, k, t):
    al = to_mpf(spec.alpha)
    tt = to_mpf(t)
    peak = 1 + al if tt >= 0 else al
    ln_scale = -tt / (2 * peak) + k * mp.log(peak)
    return _scaled_quad(_jacobi_integrand(spec, k, t), _jacobi_panels(spec, t),
                        ln_scale)


def _sw_quad(spec, k, t):
    """log substitution lam = alpha + e^u turns the weight into a Gaussian."""
    ka, al = to_mpf(spec.kappa), to_mpf(spec.alpha)
    tt = to_mpf(t)
    h = spec.h

    def f(u):
        lam = al + mp.exp(u)
        v = (ka / mp.sqrt(mp.pi)) * mp.exp(-(ka * u) ** 2 + u - tt / (2 * lam))
        v *= lam ** k
        if h is not None:
            v *= h(lam)
        return v

    sig = 1 / (ka * mp.sqrt(2))
    ustar = (k + 1) / (2 * ka ** 2)
    pts = sorted({ustar + c * sig for c in (-32, -8, -2, 0, 2, 8, 32)})
    if tt != 0:
        pts = sorted(set(pts) | {-abs(ustar) - 32 * sig, ustar + 64 * sig})

    def ln_f(u):
        lam = al + mp.exp(u)
        return -(ka * u) ** 2 + u - tt / (2 * lam) + k * mp.log(lam)

    ln_scale = max(ln_f(u) for u in (ustar, mp.mpf(0)))
    return _scaled_quad(f, [-mp.inf] + pts + [mp.inf], ln_scale)


# -- recurrence-extended tables ---------------------------------------------


def _recurrence_table(spec, t, K, digits, quad, step, extra_dps, family):
    """Seed s_-1 .. s_1 by quadrature, extend with the family's three-term
    moment recurrence, spot-check against quadrature, escalate on mismatch."""
    kmax = 2 * K
    wdps = work_digits(digits, K) + extra_dps
    for attempt in range(3):
        with mp.workdps(wdps):
            tt = to_mpf(t)
            vals = {k: quad(spec, k, tt) for k in (-1, 0, 1)}
            for k in range(-1, kmax - 2):
                vals[k + 3] = step(k, tt, vals[k + 2], vals[k + 1], vals[k])
            checks = sorted({2, kmax // 2, kmax} - {0, 1})
            worst = mp.mpf(0)
            for k in checks:
                if k > kmax:
                    continue
                ref = quad(spec, k, tt)
                err = abs(vals[k] - ref) / max(abs(ref), abs(vals[k]))
                worst = max(worst, err)
            ok = worst < mp.mpf(10) ** (-(digits + 5))
            if ok:
                rep = {"wdps": wdps, "spot_check": mp.nstr(worst, 5)}
                vals = {k: +v for k, v in vals.items()}
                return MomentTable(vals, t, digits, False, family, rep)
        wdps = wdps * 2
    raise PrecisionError(
        "moment recurrence for %s unstable at %d digits" % (family, digits),
        suggested_digits=wdps)


def _laguerre_moments(spec, t, K, digits):
    if spec.h is not None:
        return _quad_only_table(spec, t, K, digits, _laguerre_quad, "laguerre+h")
    g, al = spec.gamma, spec.alpha

    def step(k, tt, s2, s1, s0):
        g_, al_ = to_mpf(g), to_mpf(al)
        return ((k + 3 + g_ + al_) * s2 + (tt / 2 - al_ * (k + 2)) * s1
                - (tt * al_ / 2) * s0)

    return _recurrence_table(spec, t, K, digits, _laguerre_quad, step, 0, "laguerre")


def _jacobi_moments(spec, t, K, digits):
    if spec.h is not None:
        return _quad_only_table(spec, t, K, digits, _jacobi_quad, "jacobi+h")
    a, b, al = spec.a, spec.b, spec.alpha
    # forward contamination grows like ((1+alpha)/alpha)^k
    grow = mp.log10(to_mpf((1 + al) / al))
    extra = int(mp.ceil(2 * K * grow)) + 10

    def step(k, tt, s2, s1, s0):
        a_, b_, al_ = to_mpf(a), to_mpf(b), to_mpf(al)
        lhs = ((1 + 2 * al_) * (k + 3) + b_ * (1 + al_) + a_ * al_ - tt / 2) * s2
        lhs += (tt / 2 * (1 + 2 * al_) - al_ * (1 + al_) * (k + 2)) * s1
        lhs -= tt / 2 * al_ * (1 + al_) * s0
        return lhs / (k + 4 + a_ + b_)

    return _recurrence_table(spec, t, K, digits, _jacobi_quad, step, extra, "jacobi")


def _quad_only_table(spec, t, K, digits, quad, family):
    wdps = work_digits(digits, K)
    with mp.workdps(wdps):
        tt = to_mpf(t)
        vals = {k: quad(spec, k, tt) for k in range(-1, 2 * K + 1)}
    return MomentTable(vals, t, digits, False, family, {"wdps": wdps, "rule": "quad"})


def _sw_moments(spec, t, K, digits):
    wdps = work_digits(digits, K)
    with mp.workdps(wdps):
        tt = to_mpf(t)
        vals = {}
        closed = spec.h is None and spec.alpha == 0 and (is_exact(t) and t == 0)
        if closed:
            # s_n = q^(-(n+1)^2/2) with q = exp(-1/(2 kappa^2))
            ka = to_mpf(spec.kappa)
            for k in range(-1, 2 * K + 1):
                vals[k] = mp.exp((k + 1) ** 2 / (4 * ka ** 2))
            # representative quadrature cross-check
            ref = _sw_quad(spec, 2, tt)
            if abs(vals[2] - ref) / abs(ref) > mp.mpf(10) ** (-(digits + 5)):
                raise PrecisionError("log-normal quadrature check failed",
                                     suggested_digits=2 * wdps)
        else:
            for k in range(-1, 2 * K + 1):
                vals[k] = _sw_quad(spec, k, tt)
    return MomentTable(vals, t, digits, False, "stieltjes-wigert",
                       {"wdps": wdps, "closed_form": closed})


def density_and_panels(spec, t=0, k_hint=2):
    """Density of the evolved measure plus quadrature panels, for the
    continuous families.  Used by the low-order determinant cross-checks."""
    if isinstance(spec, EvolvedMeasure):
        t = _add_times(spec.t0, t)
        spec = spec.base
    tt = to_mpf(t)
    if isinstance(spec, LaguerreMeasure):
        al = to_mpf(spec.alpha)
        fx = _laguerre_integrand(spec, 0, tt)
        pan = [al + p for p in _laguerre_panels(spec, k_hint, tt)]
        return (lambda lam: fx(lam - al)), pan
    if isinstance(spec, JacobiMeasure):
        return _jacobi_integrand(spec, 0, tt), _jacobi_panels(spec, tt)
    if isinstance(spec, StieltjesWigertMeasure):
        ka, al = to_mpf(spec.kappa), to_mpf(spec.alpha)
        h = spec.h

        def f(lam):
            x = lam - al
            if x <= 0:
                return mp.mpf(0)
            v = (ka / mp.sqrt(mp.pi)) * mp.exp(-(ka * mp.log(x)) ** 2 - tt / (2 * lam))
            if h is not None:
                v *= h(lam)
            return v

        pan = [al] + [al + mp.exp(mp.mpf(u)) for u in (-8, -2, 0, 2, 8)] + [mp.inf]
        return f, pan
    raise ValidationError("no continuous density for %r" % (spec,))


# ---------------------------------------------------------------------------
# JSON measure descriptions (shared by the CLI and tests)


def measure_from_json(obj):
    if not isinstance(obj, dict) or "family" not in obj:
        raise ValidationError("measure JSON must be an object with a 'family' key")
    fam = obj["family"]
    try:
        if fam == "discrete":
            spec = DiscreteMeasure([(p[0], p[1]) for p in obj["points"]])
        elif fam == "al-salam-carlitz":
            spec = AlSalamCarlitzMeasure(obj["a"], obj["q"])
        elif fam == "laguerre":
            spec = LaguerreMeasure(obj["gamma"], obj["alpha"])
        elif fam == "jacobi":
            spec = JacobiMeasure(obj["a"], obj["b"], obj["alpha"])
        elif fam == "stieltjes-wigert":
            spec = StieltjesWigertMeasure(obj["kappa"], obj.get("alpha", 0))
        else:
            raise ValidationError("unknown measure family %r" % (fam,))
    except (KeyError, IndexError, TypeError) as e:
        raise ValidationError("bad measure JSON for family %r: %s" % (fam, e)) from e
    t0 = obj.get("t0")
    if t0 is not None:
        spec = evolve(spec, t0)
    return spec


def _num_str(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return mp.nstr(to_mpf(x), 30)


def measure_to_json(spec):
    t0 = None
    if isinstance(spec, EvolvedMeasure):
        t0 = spec.t0
        spec = spec.base
    if isinstance(spec, DiscreteMeasure):
        obj = {"family": "discrete",
               "points": [[_num_str(l), _num_str(g)] for l, g in spec.points]}
    elif isinstance(spec, AlSalamCarlitzMeasure):
        obj = {"family": "al-salam-carlitz", "a": _num_str(spec.a), "q": _num_str(spec.q)}
    elif isinstance(spec, LaguerreMeasure):
        obj = {"family": "laguerre", "gamma": _num_str(spec.gamma),
               "alpha": _num_str(spec.alpha)}
    elif isinstance(spec, JacobiMeasure):
        obj = {"family": "jacobi", "a": _num_str(spec.a), "b": _num_str(spec.b),
               "alpha": _num_str(spec.alpha)}
    elif isinstance(spec, StieltjesWigertMeasure):
        obj = {"family": "stieltjes-wigert", "kappa": _num_str(spec.kappa),
               "alpha": _num_str(spec.alpha)}
    else:
        raise ValidationError("cannot serialize %r" % (spec,))
    if t0 is not None:
        obj["t0"] = _num_str(t0)
    return obj
