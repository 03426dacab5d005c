"""Hankel determinant grids.

The reconstruction runs entirely on two families of determinants of the
moment sequence:

* Delta_{l,k}: k x k Hankel determinant with top-left entry s_l
  (Delta_{l,0} = 1); and
* Gamma_{l,k}: the same matrix with the second row removed and a row
  appended at the bottom, i.e. rows s_l, s_{l+2}, s_{l+3}, ..., s_{l+k}
  (Gamma_{l,0} = 0, Gamma_{l,1} = s_l).

A HankelGrid caches Delta for l in {-2..3} up to order K+1 and Gamma for
l in {-1,0,1} up to order K.  On the float path the Delta rows come from
unpivoted symmetric elimination, whose pivots are exactly the ratios of
consecutive leading minors; if a pivot collapses (a genuinely vanishing or
near-vanishing minor) the remaining orders are recomputed one by one with
full pivoting.  On the exact path a fraction-free (Bareiss) chain is used.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import mpmath as mp

from ._num import (is_exact, to_mpf, det_exact, det_mpf, work_digits)
from .errors import ValidationError, InconsistencyError
from . import measure as _measure

DELTA_ROWS = (-2, -1, 0, 1, 2, 3)
GAMMA_ROWS = (-1, 0, 1)


def _hankel_rows(table, l, k):
    return [[table.s(l + i + j) for j in range(k)] for i in range(k)]


def _gamma_rows(table, l, k):
    rows = [[table.s(l + j) for j in range(k)]]
    for i in range(1, k):
        rows.append([table.s(l + i + 1 + j) for j in range(k)])
    return rows


def hankel_det(table, l, k):
    """Single Delta_{l,k}, computed directly (no chain)."""
    if k == 0:
        return Fraction(1) if table.exact else mp.mpf(1)
    rows = _hankel_rows(table, l, k)
    return det_exact(rows) if table.exact else det_mpf(rows)


def gamma_det(table, l, k):
    """Single Gamma_{l,k} (second row skipped)."""
    if k == 0:
        return Fraction(0) if table.exact else mp.mpf(0)
    if k == 1:
        return table.s(l)
    rows = _gamma_rows(table, l, k)
    return det_exact(rows) if table.exact else det_mpf(rows)


def _ldl_minors(entry, n, soft):
    """Leading principal minors of a symmetric matrix by unpivoted LDL^T.

    Returns (minors [1, m1, ...], broke_at or None).  `soft` is the relative
    pivot size below which the chain is no longer trusted.
    """
    a = [[entry(i, j) for j in range(i, n)] for i in range(n)]
    minors = [mp.mpf(1)]
    scale = mp.mpf(0)
    for k in range(n):
        piv = a[k][0]
        if piv == 0 or (scale > 0 and abs(piv) < soft * scale):
            return minors, k + 1
        minors.append(minors[-1] * piv)
        scale = max(scale, abs(piv))
        if k == n - 1:
            break
        rk = a[k]
        inv = 1 / piv
        for i in range(k + 1, n):
            f = rk[i - k] * inv
            if f:
                ai = a[i]
                for j in range(i, n):
                    ai[j - i] -= f * rk[j - k]
    return minors, None


def _bareiss_minors(entry, n):
    """Exact leading principal minors; stops at the first zero pivot."""
    a = [[Fraction(entry(i, j)) for j in range(n)] for i in range(n)]
    minors = [Fraction(1)]
    prev = Fraction(1)
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv == 0:
            return minors, k + 1
        if k == n - 1:
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (piv * a[i][j] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = piv
    return minors, None


class HankelGrid:
    def __init__(self, table, K, digits, dvals, gvals, report):
        self.table = table
        self.K = K
        self.digits = digits
        self.exact = table.exact
        self._d = dvals
        self._g = gvals
        self.report = report

    @property
    def wdps(self):
        return self.report["wdps"]

    def has_delta(self, l, k):
        return k == 0 or (l, k) in self._d

    def delta(self, l, k):
        # constants typed to match the grid so int/int division can never
        # sneak float64 into an exact chain downstream
        if k == 0:
            return Fraction(1) if self.exact else mp.mpf(1)
        try:
            return self._d[(l, k)]
        except KeyError:
            raise ValidationError("Delta_{%d,%d} not on the grid" % (l, k)) from None

    def has_gamma(self, l, k):
        return k <= 1 or (l, k) in self._g

    def gamma(self, l, k):
        if k == 0:
            return Fraction(0) if self.exact else mp.mpf(0)
        if k == 1:
            return self.table.s(l)
        try:
            return self._g[(l, k)]
        except KeyError:
            raise ValidationError("Gamma_{%d,%d} not on the grid" % (l, k)) from None

    def k_limit(self, l):
        k = 0
        while self.has_delta(l, k + 1):
            k += 1
        return k

    def tau(self, k):
        """Zero threshold for Delta_{1,k}: 10^(-digits/2) times the geometric
        mean of the nonvanishing neighbours."""
        if self.exact:
            return 0
        vals = []
        for kk in (k - 1, k + 1):
            if self.has_delta(1, kk):
                v = to_mpf(self.delta(1, kk))
                if v != 0:
                    vals.append(abs(v))
        if not vals:
            vals = [mp.mpf(1)]
        acc = mp.mpf(1)
        for v in vals:
            acc *= v
        gm = acc ** (mp.mpf(1) / len(vals))
        return mp.mpf(10) ** (mp.mpf(-self.digits) / 2) * gm

    def is_zero(self, l, k):
        if k == 0:
            return False  # Delta_{l,0} = 1 structurally; neighbours can dwarf
            # it at large |t| and fool the relative threshold below
        v = self.delta(l, k)
        if self.exact:
            return v == 0
        return abs(to_mpf(v)) < self.tau(k)

    def __repr__(self):
        return "HankelGrid(K=%d, digits=%d%s)" % (
            self.K, self.digits, ", exact" if self.exact else "")


def build_grid(table, K=None, rows=DELTA_ROWS, with_gamma=True,
               gamma_rows=GAMMA_ROWS, digits=None):
    """Determinant grid of a moment table.

    Delta rows go up to order min(K+1, what the table supports); Gamma rows
    (computed determinant-by-determinant, so noticeably more expensive for
    large K) up to order K.  Set with_gamma=False for big profile-only runs.
    """
    if K is None:
        K = table.K
    if K > table.K:
        raise ValidationError("grid order K=%d exceeds table K=%d" % (K, table.K))
    if digits is None:
        digits = table.digits
    dvals = {}
    report = {"fallback": {}}
    wdps = work_digits(digits, K)
    if table.exact:
        for l in rows:
            lim = min(K + 1, (table.k_max - l + 2) // 2)
            minors, broke = _bareiss_minors(lambda i, j, l=l: table.s(l + i + j),
                                            lim)
            for k in range(1, len(minors)):
                dvals[(l, k)] = minors[k]
            if broke is not None:
                report["fallback"][l] = broke
                for k in range(len(minors), lim + 1):
                    dvals[(l, k)] = det_exact(_hankel_rows(table, l, k))
    else:
        with mp.workdps(wdps):
            soft = mp.mpf(10) ** (-(2 * wdps) // 3)
            for l in rows:
                lim = min(K + 1, (table.k_max - l + 2) // 2)
                svals = [to_mpf(table.s(l + m)) for m in range(2 * lim - 1)]
                minors, broke = _ldl_minors(lambda i, j: svals[i + j], lim, soft)
                for k in range(1, len(minors)):
                    dvals[(l, k)] = minors[k]
                if broke is not None:
                    report["fallback"][l] = broke
                    for k in range(max(broke, 1), lim + 1):
                        dvals[(l, k)] = det_mpf(
                            [[svals[i + j] for j in range(k)] for i in range(k)])
    gvals = {}
    if with_gamma:
        if table.exact:
            for l in gamma_rows:
                lim = min(K, (table.k_max - l + 1) // 2)
                for k in range(2, lim + 1):
                    gvals[(l, k)] = det_exact(_gamma_rows(table, l, k))
        else:
            with mp.workdps(wdps):
                for l in gamma_rows:
                    lim = min(K, (table.k_max - l + 1) // 2)
                    for k in range(2, lim + 1):
                        gvals[(l, k)] = det_mpf(_gamma_rows(table, l, k))
    report["wdps"] = wdps
    return HankelGrid(table, K, digits, dvals, gvals, report)


# ---------------------------------------------------------------------------
# index map of nonvanishing minors


@dataclass(frozen=True)
class KappaMap:
    """Positions of the nonvanishing Delta_{1,k}, 1-indexed: kap[n-1] is
    kappa(n) for n = 1..N.  `zeros` lists the vanishing orders encountered;
    `complete` means the scan covered the full (finite) support."""
    kap: tuple
    zeros: tuple
    complete: bool
    k_scanned: int

    @property
    def N(self):
        return len(self.kap)

    def __call__(self, n):
        return self.kap[n - 1]


def kappa(grid, support_size=None):
    """Scan Delta_{1,0..K} for zeros (exactly on the rational path, against
    the tau threshold on the float path) and return the resulting index map.

    Two adjacent zeros cannot come from a genuine measure and raise
    InconsistencyError.  For a finite measure the scan stops at the support
    size (taken from the moment table unless overridden): every higher-order
    determinant vanishes structurally.
    """
    if support_size is None:
        support_size = grid.table.support_size
    lim = grid.k_limit(1)
    complete = False
    if support_size is not None:
        if support_size <= lim:
            lim = support_size
            complete = True
    kap, zeros = [], []
    prev_zero = False
    for k in range(0, lim + 1):
        z = grid.is_zero(1, k)
        if z and prev_zero:
            raise InconsistencyError(
                "Delta_{1,%d} and Delta_{1,%d} both vanish; "
                "not a moment sequence of the assumed class" % (k - 1, k))
        if z:
            zeros.append(k)
        else:
            kap.append(k)
        prev_zero = z
    if not kap or kap[0] != 0:
        raise InconsistencyError("Delta_{1,0} = 1 cannot vanish")
    if complete and kap[-1] != support_size:
        raise InconsistencyError(
            "Delta_{1,%d} vanished at the support size; data inconsistent"
            % (support_size,))
    return KappaMap(tuple(kap), tuple(zeros), complete, lim)


# ---------------------------------------------------------------------------
# internal consistency checks


def identity_residuals(grid):
    """Residuals of the quadratic determinant identities on the whole grid.

    Checks, wherever all participants are cached:
      * the Sylvester relation
            Delta_{l+1,k} Delta_{l-1,k} - Delta_{l+1,k-1} Delta_{l-1,k+1}
                = Delta_{l,k}^2
      * the two mixed bilinear relations tying Gamma to Delta:
            Delta_{l-1,k} Delta_{l+2,k-1}
                = Delta_{l+1,k-1} Gamma_{l-1,k} - Delta_{l,k} Gamma_{l,k-1}
            Delta_{l-1,k+1} Delta_{l+2,k-1}
                = Delta_{l+1,k} Gamma_{l-1,k} - Delta_{l,k} Gamma_{l,k}

    Returns max relative residuals (keys 'sylvester', 'bilinear_a',
    'bilinear_b') plus counts; exact grids must come back identically zero.
    For a finite measure only orders within the rank are checked -- beyond it
    every determinant vanishes structurally and the float residual is
    noise over noise.
    """
    rank = grid.table.support_size
    kcap = None if rank is None else rank - 1

    def rel(lhs, rhs, *terms):
        if grid.exact:
            return abs(Fraction(lhs - rhs))
        scale = max([abs(to_mpf(x)) for x in terms] + [mp.mpf(1) * 0])
        if scale == 0:
            return abs(to_mpf(lhs - rhs))
        return abs(to_mpf(lhs - rhs)) / scale

    worst = {"sylvester": 0, "bilinear_a": 0, "bilinear_b": 0}
    counts = {"sylvester": 0, "bilinear_a": 0, "bilinear_b": 0}

    def in_range(k):
        return grid.exact or kcap is None or k <= kcap

    with mp.workdps(grid.wdps):
        for l in (-1, 0, 1, 2):
            k = 1
            while (in_range(k) and grid.has_delta(l + 1, k)
                   and grid.has_delta(l - 1, k + 1) and grid.has_delta(l, k)):
                a = grid.delta(l + 1, k) * grid.delta(l - 1, k)
                b = grid.delta(l + 1, k - 1) * grid.delta(l - 1, k + 1)
                c = grid.delta(l, k) ** 2
                r = rel(a - b, c, a, b, c)
                worst["sylvester"] = max(worst["sylvester"], r)
                counts["sylvester"] += 1
                k += 1
        for l in (0, 1):
            k = 1
            while (in_range(k) and grid.has_delta(l - 1, k + 1)
                   and grid.has_delta(l + 2, k - 1) and grid.has_delta(l + 1, k)
                   and grid.has_gamma(l - 1, k) and grid.has_gamma(l, k)):
                ga = grid.delta(l + 1, k - 1) * grid.gamma(l - 1, k) \
                    - grid.delta(l, k) * grid.gamma(l, k - 1)
                lhs = grid.delta(l - 1, k) * grid.delta(l + 2, k - 1)
                r = rel(lhs, ga, lhs, ga)
                worst["bilinear_a"] = max(worst["bilinear_a"], r)
                counts["bilinear_a"] += 1
                gb = grid.delta(l + 1, k) * grid.gamma(l - 1, k) \
                    - grid.delta(l, k) * grid.gamma(l, k)
                lhs2 = grid.delta(l - 1, k + 1) * grid.delta(l + 2, k - 1)
                r = rel(lhs2, gb, lhs2, gb)
                worst["bilinear_b"] = max(worst["bilinear_b"], r)
                counts["bilinear_b"] += 1
                k += 1
    return {"worst": worst, "counts": counts}


# ---------------------------------------------------------------------------
# independent low-order reference values


def hankel_integral_oracle(spec, l, k, t=0, digits=25, terms=48):
    """Delta_{l,k}(t) via the k-fold integral/sum with squared Vandermonde:

        Delta_{l,k} = (1/k!) * int ... int  prod lam_i^l
                        * prod_{i<j} (lam_i - lam_j)^2  d rho(lam_1)...d rho(lam_k)

    Entirely independent of the elimination machinery.  Point measures sum
    over k-subsets (exactly, when the data is rational at t = 0); continuous
    families use nested quadrature, practical for k <= 2 (k = 3 works but is
    slow and carried at reduced accuracy).
    """
    if k == 0:
        return 1
    base = _measure.base_of(spec)
    if isinstance(spec, _measure.EvolvedMeasure):
        t = spec.t0 + t if (is_exact(spec.t0) and is_exact(t)) \
            else to_mpf(spec.t0) + to_mpf(t)
    if isinstance(base, (_measure.DiscreteMeasure, _measure.AlSalamCarlitzMeasure)):
        with mp.workdps(digits + 15):
            if isinstance(base, _measure.DiscreteMeasure):
                pts = base.point_data()
                exact = base.exact and is_exact(t) and t == 0
            else:
                pts = base.point_data(terms)
                exact = False
            if k > len(pts):
                return Fraction(0) if exact else mp.mpf(0)
            total = Fraction(0) if exact else mp.mpf(0)
            for J in combinations(range(len(pts)), k):
                lam = [pts[i][0] for i in J]
                gam = [pts[i][1] for i in J]
                term = Fraction(1) if exact else mp.mpf(1)
                for g in gam:
                    term *= g
                prod_lam = 1
                for x in lam:
                    prod_lam *= x
                term *= prod_lam ** l
                for i in range(k):
                    for j in range(i + 1, k):
                        term *= (lam[i] - lam[j]) ** 2
                if not exact:
                    term = to_mpf(term)
                    for x in lam:
                        term *= mp.exp(-to_mpf(t) / (2 * to_mpf(x)))
                total += term
            return total
    if k > 3:
        raise ValidationError("integral reference implemented for k <= 3")
    with mp.workdps(digits + 10):
        f, pan = _measure.density_and_panels(spec, t)
        ll = l

        if k == 1:
            val = mp.quad(lambda x: f(x) * x ** ll, pan)
        elif k == 2:
            val = mp.quad(
                lambda x, y: f(x) * f(y) * (x * y) ** ll * (x - y) ** 2,
                pan, pan) / 2
        else:
            val = mp.quad(
                lambda x, y, z: (f(x) * f(y) * f(z) * (x * y * z) ** ll
                                 * ((x - y) * (x - z) * (y - z)) ** 2),
                pan, pan, pan) / 6
        return +val
