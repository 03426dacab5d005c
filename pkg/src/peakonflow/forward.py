"""Forward spectral map: strings -> rational Weyl functions -> measures.

This closes the loop for round-trip verification.  A profile (positions,
weights, dipoles) is first re-encoded as a weighted string on [0, inf):

    xt_n = e^{x_n},  wt_n = omega_n e^{-x_n},  vt_n = upsilon_n e^{-x_n},

with an extra negative mass wt_0 = -sum_n wt_n placed at 0 (it encodes the
exponentially decaying left tail of u).  The fundamental system (theta, phi)
with theta(0) = phi'(0-) = 1, theta'(0-) = phi(0) = 0 is then pushed across
the string by the transfer recursion

    f(next)  = f(prev) + gap * f'(prev+)
    f'(pos+) = f'(pos-) - (z wt + z^2 vt) f(pos)

which keeps everything polynomial in z.  Past the last mass the Weyl
function is the rational function

    m(z) = -theta'(z, end+) / (z phi'(z, end+)),

whose poles are the spectrum and whose residues (negated) are the masses.
For a string made by psi_map (no mass at 0) the same m differs only by the
constant m(0) = s_-1; poles and residues are untouched.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from ._num import is_exact, to_mpf, work_digits
from .errors import ValidationError, InconsistencyError, PrecisionError
from .measure import DiscreteMeasure, AlSalamCarlitzMeasure, EvolvedMeasure, base_of
from . import hankel as _hankel
from . import inverse as _inverse


# ---------------------------------------------------------------------------
# polynomials as ascending coefficient lists (tiny, exact-friendly)


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
            for i in range(n)]


def _pscale(p, c):
    return [c * a for a in p]

def _pmul_z(p, c1, c2):
    """p(z) * (c1 z + c2 z^2)."""
    out = [0] * (len(p) + 2)
    for i, a in enumerate(p):
        if c1:
            out[i + 1] += c1 * a
        if c2:
            out[i + 2] += c2 * a
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _peval(p, z):
    acc = 0
    for a in reversed(p):
        acc = acc * z + a
    return acc


def _pderiv(p):
    return [i * a for i, a in enumerate(p)][1:] or [0]


# ---------------------------------------------------------------------------
# strings


@dataclass
class KreinLangerString:
    """Weighted string data: entries (position, mass, dipole mass) with
    strictly increasing positive positions, plus an optional mass/dipole
    pair sitting at position 0.  `digits` records the precision the numbers
    were produced at so downstream arithmetic can match it."""
    entries: list
    omega0: object = 0
    upsilon0: object = 0
    digits: int = None

    def __post_init__(self):
        prev = mp.mpf(0)
        for pos, w, v in self.entries:
            cur = to_mpf(pos)
            if not cur > prev:
                raise ValidationError("string positions must increase from 0")
            prev = cur

    @property
    def exact(self):
        vals = [self.omega0, self.upsilon0]
        for e in self.entries:
            vals.extend(e)
        return all(is_exact(v) for v in vals)

    def total_mass(self):
        return sum((w for _, w, _ in self.entries), self.omega0 * 1)

    def __repr__(self):
        return "KreinLangerString(%d entries%s)" % (
            len(self.entries), ", exact" if self.exact else "")


def string_from_profile(profile):
    """Re-encode a complete profile as a string with the tail mass at 0."""
    if not (profile.complete and profile.n_weights == profile.n_positions):
        raise ValidationError(
            "only a complete profile (all weights resolved) maps to a string")
    with mp.workdps(work_digits(profile.digits, profile.n_positions + 2)):
        entries = []
        total = Fraction(0) if profile.exact else mp.mpf(0)
        for xt, w, v in zip(profile.exp_x, profile.omega, profile.upsilon):
            if profile.exact:
                wt, vt = w / xt, v / xt
            else:
                xt = to_mpf(xt)
                wt, vt = to_mpf(w) / xt, to_mpf(v) / xt
            total += wt
            entries.append((xt, wt, vt))
    return KreinLangerString(entries, omega0=-total, digits=profile.digits)


def string_from_peakon_data(exp_x, omega, upsilon=None, digits=None):
    """String for a classical multipeakon u = (1/2) sum omega_n e^{-|x-x_n|},
    entered through e^{x_n} (exact-friendly) and the weights."""
    if len(exp_x) != len(omega):
        raise ValidationError("need one weight per position")
    ups = upsilon if upsilon is not None else [0] * len(omega)
    vals = list(exp_x) + list(omega) + list(ups)
    exact = all(is_exact(v) for v in vals)
    with mp.workdps(work_digits(digits or mp.mp.dps, len(omega) + 2)):
        entries = []
        total = Fraction(0) if exact else mp.mpf(0)
        for xt, w, v in zip(exp_x, omega, ups):
            if not exact:
                xt, w, v = to_mpf(xt), to_mpf(w), to_mpf(v)
            entries.append((xt, w / xt, v / xt))
            total += w / xt
    return KreinLangerString(entries, omega0=-total, digits=digits)


def psi_map(table, n_peaks=None):
    """String coordinates straight from a moment table (no mass at 0):
    xt_n = Delta_{2,kappa(n)}/Delta_{0,kappa(n)+1} with the matching closed
    forms for masses and dipoles."""
    grid = _hankel.build_grid(table, with_gamma=False)
    with mp.workdps(grid.wdps):
        sd = _inverse._string_data(grid, n_peaks)
    entries = list(zip(sd["xt"], sd["wt"], sd["vt"]))
    return KreinLangerString(entries, digits=grid.digits)


# ---------------------------------------------------------------------------
# Weyl functions


@dataclass
class RationalWeylFunction:
    """m(z) = num(z)/den(z), coefficient lists ascending in z."""
    num: list
    den: list

    @property
    def exact(self):
        return all(is_exact(c) for c in self.num + self.den)

    def __call__(self, z):
        return _peval(self.num, z) / _peval(self.den, z)

    @property
    def degree(self):
        return len(self.den) - 1

    def __repr__(self):
        return "RationalWeylFunction(deg %d / %d%s)" % (
            len(self.num) - 1, self.degree, ", exact" if self.exact else "")


def weyl_from_string(string):
    """Transfer the fundamental system across the string and form
    m = -theta'/(z phi') past the last mass."""
    if string.exact:
        return _weyl_transfer(string)
    with mp.workdps(work_digits(string.digits or mp.mp.dps,
                                len(string.entries) + 2)):
        return _weyl_transfer(string)


def _weyl_transfer(string):
    one = Fraction(1) if string.exact else mp.mpf(1)

    def val(x):
        return x if string.exact else to_mpf(x)

    theta = [one]
    dtheta = _pmul_z([one], -val(string.omega0), -val(string.upsilon0))
    phi, dphi = [0 * one], [one]
    prev = 0 * one
    for pos, w, v in string.entries:
        pos, w, v = val(pos), val(w), val(v)
        gap = pos - prev
        theta = _padd(theta, _pscale(dtheta, gap))
        phi = _padd(phi, _pscale(dphi, gap))
        dtheta = _padd(dtheta, _pmul_z(theta, -w, -v))
        dphi = _padd(dphi, _pmul_z(phi, -w, -v))
        prev = pos
    # -theta' always carries a factor z; cancel it against the z in front
    # of phi'
    p = _pscale(dtheta, -1)
    if p and p[0] != 0:
        if is_exact(p[0]):
            raise InconsistencyError("theta' lost its zero constant term")
        scale = max([abs(to_mpf(c)) for c in p] + [mp.mpf(1)])
        if abs(to_mpf(p[0])) > scale * mp.mpf(10) ** (-mp.mp.dps // 2):
            raise PrecisionError("theta' constant term did not cancel",
                                 suggested_digits=2 * mp.mp.dps)
    num = p[1:] if len(p) > 1 else [0 * one]
    return RationalWeylFunction(num, dphi)


def weyl_continued_fraction(string, z, tail=None):
    """Evaluate m(z) through the finite continued fraction

        m = wt_0 + vt_0 z + 1/(-ell_1 z + 1/(wt_1 + vt_1 z + 1/(...)))

    (dual route to the polynomial transfer; `tail` seeds the innermost
    level, defaulting to the open-ended -ell z gap term)."""
    exact = string.exact and is_exact(z) and (tail is None or is_exact(tail))

    def chain(z):
        acc = tail
        ents = list(string.entries)
        pos_prev = 0
        gaps = []
        for pos, w, v in ents:
            gaps.append(pos - pos_prev)
            pos_prev = pos
        for (pos, w, v), gap in zip(reversed(ents), reversed(gaps)):
            if not exact:
                w, v, gap = to_mpf(w), to_mpf(v), to_mpf(gap)
            if acc is None:
                acc = w + v * z
            else:
                acc = w + v * z + 1 / acc
            acc = -gap * z + 1 / acc
        w0, v0 = string.omega0, string.upsilon0
        if not exact:
            w0, v0 = to_mpf(w0), to_mpf(v0)
        if acc is None:
            return w0 + v0 * z
        return w0 + v0 * z + 1 / acc

    if exact:
        return chain(z)
    with mp.workdps(work_digits(string.digits or mp.mp.dps,
                                len(string.entries) + 2)):
        return +chain(to_mpf(z))


def measure_from_weyl(w, digits=60):
    """Poles and (negated) residues of a rational Weyl function.

    Returns (DiscreteMeasure, m(0)).  The poles must come out real and
    simple with positive masses, else the input was not a Weyl function of
    a string in this class.
    """
    den, num = w.den, w.num
    if len(den) < 2:
        raise ValidationError("Weyl function has no poles")
    wdps = work_digits(digits, len(den))
    with mp.workdps(wdps):
        cof = [to_mpf(c) for c in den]
        while cof and abs(cof[-1]) == 0:
            cof.pop()
        deg = len(cof) - 1
        roots = mp.polyroots([cof[i] for i in range(deg, -1, -1)],
                             maxsteps=200, extraprec=wdps)
        tol = mp.mpf(10) ** (-digits // 2)
        scale = max(abs(r) for r in roots)
        lams = []
        for r in roots:
            if abs(mp.im(r)) > tol * max(scale, 1):
                raise InconsistencyError("complex pole %s in Weyl function"
                                         % mp.nstr(r, 8))
            lams.append(mp.re(r))
        lams.sort()
        for i in range(len(lams) - 1):
            if abs(lams[i] - lams[i + 1]) <= tol * max(scale, 1):
                raise InconsistencyError("poles of the Weyl function collide")
        dprime = _pderiv(den)
        pts = []
        for lam in lams:
            # one Newton polish of the root at full working precision
            f, fp = _peval(cof, lam), _peval([to_mpf(c) for c in dprime], lam)
            if fp != 0:
                lam = lam - f / fp
            gam = -_peval([to_mpf(c) for c in num], lam) \
                / _peval([to_mpf(c) for c in dprime], lam)
            if not gam > 0:
                raise InconsistencyError(
                    "nonpositive mass %s at lam=%s" % (mp.nstr(gam, 8),
                                                       mp.nstr(lam, 8)))
            pts.append((+lam, +gam))
        at0 = w(mp.mpf(0))
    return DiscreteMeasure(pts), at0


# ---------------------------------------------------------------------------
# determinacy of the underlying moment problem


def determinacy(terms, ratio_bound=None, cap=mp.mpf(10) ** 40):
    """Classify the moment problem behind a (possibly infinite) string.

    `terms` iterates (ell_n, wt_n, vt_n) gap/mass/dipole triples from n = 1.
    The string's spectral measure has:

      * a unique Stieltjes solution  iff  sum (ell_n + wt_n) diverges,
      * a unique Hamburger solution  iff  sum (ell_n + ell_n W_n^2 + vt_n)
        diverges, where W_n is the running total mass.

    Divergence is certified by a partial sum crossing `cap`; convergence
    needs `ratio_bound(n) -> r < 1` bounding term_{k+1}/term_k of each of
    the three component sequences for every k >= n.  Anything in between
    raises InconclusiveError rather than guessing.  Returns a dict with
    verdicts ("determinate" / "indeterminate") and the bounds used.
    """
    from .errors import InconclusiveError
    s_st = mp.mpf(0)
    s_hb = mp.mpf(0)
    W = mp.mpf(0)
    ell_n = wt_n = vt_n = mp.mpf(0)
    n = 0
    for ell, wt, vt in terms:
        n += 1
        ell_n, wt_n, vt_n = to_mpf(ell), to_mpf(wt), to_mpf(vt)
        W += wt_n
        s_st += ell_n + wt_n
        s_hb += ell_n + ell_n * W ** 2 + vt_n
        if s_st > cap and s_hb > cap:
            break
    out = {"n_used": n, "stieltjes_sum": +s_st, "hamburger_sum": +s_hb}
    r = to_mpf(ratio_bound(n)) if ratio_bound is not None else None
    if r is not None and r < 1:
        geo = r / (1 - r)
        W_inf = W + wt_n * geo
        out["tail_bound_stieltjes"] = (ell_n + wt_n) * geo
        out["tail_bound_hamburger"] = \
            ell_n * geo * (1 + W_inf ** 2) + vt_n * geo
    for key, total in (("stieltjes", s_st), ("hamburger", s_hb)):
        if total > cap:
            out[key] = "determinate"
        elif "tail_bound_" + key in out:
            out[key] = "indeterminate"
        else:
            raise InconclusiveError(
                "%s series at %s after %d terms with no usable tail bound; "
                "supply ratio_bound or more terms" % (key, mp.nstr(total, 8), n))
    return out


# ---------------------------------------------------------------------------
# the dual measure (time reversal)


def rho_plus(spec, terms=None, digits=60):
    """Dual spectral measure: gam+_lam = 1 / (lam^2 W'(lam)^2 gam_lam) with
    W(z) = prod (1 - z/lam_i).

    Exact for finite rational data.  For the q-lattice family the product is
    truncated at `terms` points (the omitted factors differ from 1 by a
    geometrically small amount, reported in the annotation).
    Returns (DiscreteMeasure, report).
    """
    base = base_of(spec)
    if isinstance(spec, EvolvedMeasure) and not (is_exact(spec.t0) and spec.t0 == 0):
        raise ValidationError("dual measure is defined for the t = 0 data")
    if isinstance(base, DiscreteMeasure):
        pts = base.point_data()
        exact = base.exact
        report = {"truncated": False}
    elif isinstance(base, AlSalamCarlitzMeasure):
        if terms is None:
            terms = 64
        with mp.workdps(digits + 25):
            pts = base.point_data(terms)
        exact = False
        with mp.workdps(digits + 25):
            lam_last = to_mpf(base.lam(terms))
            lam_next = to_mpf(base.lam(terms + 1))
            report = {"truncated": True, "terms": terms,
                      "tail_factor_gap": +abs(lam_last / lam_next)}
    else:
        raise ValidationError("dual measure needs a purely discrete spectrum")
    out = []
    if exact:
        for j, (lam_j, gam_j) in enumerate(pts):
            wd = Fraction(-1, 1) / lam_j
            for i, (lam_i, _) in enumerate(pts):
                if i != j:
                    wd *= 1 - Fraction(lam_j) / Fraction(lam_i)
            out.append((lam_j, 1 / (lam_j ** 2 * wd ** 2 * gam_j)))
        return DiscreteMeasure(out), report
    with mp.workdps(digits + 25):
        lams = [to_mpf(l) for l, _ in pts]
        gams = [to_mpf(g) for _, g in pts]
        for j, lam_j in enumerate(lams):
            wd = -1 / lam_j
            for i, lam_i in enumerate(lams):
                if i != j:
                    wd *= 1 - lam_j / lam_i
            out.append((lam_j, 1 / (lam_j ** 2 * wd ** 2 * gams[j])))
    return DiscreteMeasure(out), report
