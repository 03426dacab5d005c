"""The orthonormal-polynomial route to the peakon data.

From a positive-definite moment table one gets orthonormal polynomials
P_0..P_M (positive leading coefficients) with the three-term recurrence

    z P_k = b_k P_{k+1} + a_k P_k + b_{k-1} P_{k-1},        b_k > 0,

and everything the Hankel route produces can be re-derived from values at
zero:

    e^{x_n}  = sum_{k<n} P_k(0)^2
             = b_{n-1} (P_n'(0) P_{n-1}(0) - P_n(0) P_{n-1}'(0)),
    omega_n  = P_{n-1}'(0)/P_{n-1}(0) - P_n'(0)/P_n(0),

valid when the measure lives on (0, inf) (all Delta_{1,k} nonzero; the
signs P_k(0) then alternate strictly).  This module exists as an
independent cross-check of the determinant formulas, so it never reuses
them beyond the leading minors Delta_{0,k} needed for normalization.

Parameter extraction from moments:

    b_k = sqrt(Delta_{0,k} Delta_{0,k+2}) / Delta_{0,k+1},
    a_k = T_{k+1}/Delta_{0,k+1} - T_k/Delta_{0,k},

where T_k is the k x k minor with the second-to-last column skipped (its
ratio to Delta_{0,k} is the trace of the truncated recurrence matrix).
For the named weights the parameters also come in closed form
(jacobi_params), which gives a determinant-free route to the profile.

Values and derivatives at a point are always propagated through the
recurrence on (P_k, P_k') pairs; the stored coefficient lists are only for
inspection and low-order cross-checks -- high-degree coefficients cancel
catastrophically long before the values do.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from ._num import (as_exact, is_exact, to_mpf, det_exact, det_mpf,
                   work_digits, rel_err)
from .errors import ValidationError, InconsistencyError, PrecisionError
from .measure import (DiscreteMeasure, AlSalamCarlitzMeasure, LaguerreMeasure,
                      JacobiMeasure, StieltjesWigertMeasure, EvolvedMeasure)
from . import hankel as _hankel
from . import inverse as _inverse


def _sqrt_scalar(x):
    """Square root, kept exact when x is a rational perfect square."""
    if is_exact(x):
        fx = Fraction(x)
        if fx < 0:
            raise ValidationError("square root of a negative value")
        rn, rd = math.isqrt(fx.numerator), math.isqrt(fx.denominator)
        if rn * rn == fx.numerator and rd * rd == fx.denominator:
            return Fraction(rn, rd)
    return mp.sqrt(to_mpf(x))


# ---------------------------------------------------------------------------
# the polynomial set


@dataclass
class OrthoPolySet:
    """Orthonormal polynomials P_0..P_M plus their recurrence parameters.

    coeffs[k] is the ascending coefficient list of P_k; a and b hold
    a_0..a_{M-1}, b_0..b_{M-1} (exact rationals where the construction
    allows, mpf otherwise).  a_tail carries a_M when the source table had
    enough moments for it -- it is what lets peakons_via_op take the final
    (monic) step on a finite-rank table.  table is kept for the bordered
    determinant form of the kernel and may be None for parameter-built sets.
    """
    M: int
    coeffs: list
    a: list
    b: list
    digits: int
    table: object = None
    a_tail: object = None
    report: dict = field(default_factory=dict)

    @property
    def params_exact(self):
        return all(is_exact(v) for v in list(self.a) + list(self.b))

    def poly_value(self, k, z):
        """P_k(z) by Horner on the stored coefficients (small k only)."""
        if not 0 <= k <= self.M:
            raise ValidationError("polynomial degree %d not in the set" % k)
        acc = mp.mpf(0)
        for c in reversed(self.coeffs[k]):
            acc = acc * to_mpf(z) + to_mpf(c)
        return acc

    def eval_pairs(self, z, upto=None):
        """(P_k(z), P_k'(z)) for k = 0..upto via the value recurrence."""
        if upto is None:
            upto = self.M
        if upto > self.M:
            raise ValidationError(
                "set holds polynomials to degree %d, asked for %d"
                % (self.M, upto))
        with mp.workdps(work_digits(self.digits, upto + 2)):
            zf = to_mpf(z)
            out = [(to_mpf(self.coeffs[0][0]), mp.mpf(0))]
            for k in range(upto):
                ak, bk = to_mpf(self.a[k]), to_mpf(self.b[k])
                pk, dk = out[k]
                pm, dm = out[k - 1] if k > 0 else (mp.mpf(0), mp.mpf(0))
                bm = to_mpf(self.b[k - 1]) if k > 0 else mp.mpf(0)
                out.append((((zf - ak) * pk - bm * pm) / bk,
                            ((zf - ak) * dk + pk - bm * dm) / bk))
            return [(+p, +d) for p, d in out]

    def recurrence_residual(self, zs=(0, 1, -1)):
        """Worst relative residual of z P_k - b_k P_{k+1} - a_k P_k
        - b_{k-1} P_{k-1} over the sample points, using the coefficient
        lists as the independent source of values."""
        worst = mp.mpf(0)
        with mp.workdps(work_digits(self.digits, self.M + 2)):
            for z in zs:
                zf = to_mpf(z)
                vals = [self.poly_value(k, zf) for k in range(self.M + 1)]
                for k in range(self.M):
                    lhs = zf * vals[k]
                    rhs = to_mpf(self.b[k]) * vals[k + 1] \
                        + to_mpf(self.a[k]) * vals[k]
                    if k > 0:
                        rhs += to_mpf(self.b[k - 1]) * vals[k - 1]
                    scale = max(abs(lhs), abs(rhs), mp.mpf(1))
                    worst = max(worst, abs(lhs - rhs) / scale)
            return +worst

    def __repr__(self):
        return "OrthoPolySet(M=%d, digits=%d%s)" % (
            self.M, self.digits, ", exact params" if self.params_exact else "")


def _coeff_chain(a, b, c0, M):
    """Ascending coefficient lists of P_0..P_M from the recurrence (mpf)."""
    coeffs = [[to_mpf(c0)]]
    for k in range(M):
        ak, bk = to_mpf(a[k]), to_mpf(b[k])
        pk = coeffs[k]
        nxt = [mp.mpf(0)] * (k + 2)
        for i, c in enumerate(pk):
            nxt[i + 1] += c          # z * P_k
            nxt[i] -= ak * c
        if k > 0:
            bm = to_mpf(b[k - 1])
            for i, c in enumerate(coeffs[k - 1]):
                nxt[i] -= bm * c
        coeffs.append([c / bk for c in nxt])
    return coeffs


# ---------------------------------------------------------------------------
# construction from moments


def _trace_minor(table, k, wdps):
    """T_k: the k x k determinant over columns (0..k-2, k) of the moment
    array; T_k / Delta_{0,k} is the sum of the first k diagonal parameters."""
    if k == 0:
        return Fraction(0) if table.exact else mp.mpf(0)
    cols = list(range(k - 1)) + [k]
    if table.exact:
        rows = [[table.s(i + j) for j in cols] for i in range(k)]
        return det_exact(rows)
    with mp.workdps(wdps):
        rows = [[to_mpf(table.s(i + j)) for j in cols] for i in range(k)]
        return det_mpf(rows)


def _det_formula_coeffs(table, k, d_k, d_k1, wdps):
    """Coefficients of P_k straight from the bordered-determinant formula:
    the z^j coefficient is (-1)^(k+j) times the minor over the remaining
    columns, all over sqrt(Delta_{0,k} Delta_{0,k+1})."""
    with mp.workdps(wdps):
        norm = mp.sqrt(to_mpf(d_k) * to_mpf(d_k1))
        out = []
        for j in range(k + 1):
            cols = [c for c in range(k + 1) if c != j]
            if table.exact:
                m = det_exact([[table.s(i + c) for c in cols]
                               for i in range(k)])
            else:
                m = det_mpf([[to_mpf(table.s(i + c)) for c in cols]
                             for i in range(k)])
            sgn = 1 if (k + j) % 2 == 0 else -1
            out.append(sgn * to_mpf(m) / norm)
        return [+c for c in out]


def orthopoly_from_moments(table, M, digits=None, det_orders=8):
    """Orthonormal polynomial set of degree bound M from a moment table.

    Needs moments to s_{2M} (table K >= M); a_M is computed too when s_{2M+1}
    is available.  The leading minors Delta_{0,k} must be strictly positive up
    to order M+1 -- a signed or rank-deficient table has no orthonormal chain
    and raises InconsistencyError.

    Coefficients are produced by the recurrence and cross-checked against the
    determinant formula for orders up to det_orders; disagreement beyond
    10^(-digits/2) raises PrecisionError.
    """
    if M < 0:
        raise ValidationError("degree bound must be >= 0")
    if table.k_max < 2 * M:
        raise ValidationError(
            "degree bound M=%d needs moments to s_%d (table has k_max=%d)"
            % (M, 2 * M, table.k_max))
    if digits is None:
        digits = table.digits
    wdps = work_digits(digits, M + 2)
    grid = _hankel.build_grid(table, K=M, rows=(0,), with_gamma=False,
                              digits=digits)
    D = [grid.delta(0, k) for k in range(M + 2)]
    for k, v in enumerate(D):
        if (v <= 0) if is_exact(v) else (to_mpf(v) <= 0):
            raise InconsistencyError(
                "Delta_{0,%d} is not positive; no orthonormal chain "
                "(signed or rank-deficient data)" % k)
    T = [_trace_minor(table, k, wdps) for k in range(M + 2)]

    def diag_entry(k):
        # a_k = T_{k+1}/Delta_{0,k+1} - T_k/Delta_{0,k}; the subtraction
        # must happen at working precision, not ambient
        if table.exact:
            return Fraction(T[k + 1]) / D[k + 1] - Fraction(T[k]) / D[k]
        with mp.workdps(wdps):
            return +(to_mpf(T[k + 1]) / to_mpf(D[k + 1])
                     - to_mpf(T[k]) / to_mpf(D[k]))

    a = [diag_entry(k) for k in range(M)]
    b = []
    with mp.workdps(wdps):
        for k in range(M):
            if table.exact:
                b.append(_sqrt_scalar(Fraction(D[k]) * D[k + 2]
                                      / D[k + 1] ** 2))
            else:
                b.append(+(mp.sqrt(to_mpf(D[k]) * to_mpf(D[k + 2]))
                           / to_mpf(D[k + 1])))
    a_tail = diag_entry(M) if table.k_max >= 2 * M + 1 else None

    with mp.workdps(wdps):
        c0 = 1 / mp.sqrt(to_mpf(D[1]))
        coeffs = _coeff_chain(a, b, c0, M)
        coeffs = [[+c for c in row] for row in coeffs]
        worst = mp.mpf(0)
        for k in range(1, min(M, det_orders) + 1):
            ref = _det_formula_coeffs(table, k, D[k], D[k + 1], wdps)
            scale = max(abs(c) for c in ref)
            for cr, cd in zip(coeffs[k], ref):
                worst = max(worst, abs(cr - cd) / scale)
        if worst > mp.mpf(10) ** (-(digits // 2)):
            raise PrecisionError(
                "recurrence and determinant coefficients disagree by %s"
                % mp.nstr(worst, 5), suggested_digits=2 * digits)
        report = {"wdps": wdps, "det_check_orders": min(M, det_orders),
                  "det_check_worst": +worst}
    return OrthoPolySet(M=M, coeffs=coeffs, a=a, b=b, digits=digits,
                        table=table, a_tail=a_tail, report=report)


def orthopoly_from_params(a, b, s0, digits=60, table=None, a_tail=None):
    """Polynomial set straight from recurrence parameters (no determinants).

    For the named weights this is the cheap route to high degrees: M is just
    len(b), the only moment needed is s_0 for the seed P_0 = 1/sqrt(s_0).
    """
    if len(a) != len(b):
        raise ValidationError("need equally many diagonal and off-diagonal "
                              "parameters")
    for v in b:
        if (v <= 0) if is_exact(v) else (to_mpf(v) <= 0):
            raise ValidationError("off-diagonal parameters must be positive")
    M = len(b)
    wdps = work_digits(digits, M + 2)
    with mp.workdps(wdps):
        if to_mpf(s0) <= 0:
            raise ValidationError("s_0 must be positive")
        c0 = 1 / mp.sqrt(to_mpf(s0))
        coeffs = [[+c for c in row] for row in _coeff_chain(a, b, c0, M)]
    return OrthoPolySet(M=M, coeffs=coeffs, a=list(a), b=list(b),
                        digits=digits, table=table, a_tail=a_tail,
                        report={"wdps": wdps, "source": "params"})


# ---------------------------------------------------------------------------
# closed-form parameters for the named weights


def jacobi_params(spec, count, digits=60):
    """Recurrence parameters (a_0..a_{count-1}, b_0..b_{count-1}) of the
    orthonormal polynomials for a named weight, in closed form.

    laguerre (gamma, alpha):    a_n = 2n + 1 + gamma + alpha,
                                b_n = sqrt((n+1)(n+gamma+1))
    al-salam-carlitz (a, q):    a_n = (a+1) q^-n - 1,
                                b_n = sqrt(a (1 - q^(n+1))) / q^(n+1/2)
    jacobi (a, b, alpha):       symmetrized from the shifted-weight
                                recurrence; see _jacobi_weight_params
    stieltjes-wigert (kappa):   q = e^(-1/(2 kappa^2)),
                                a_n = alpha + q^-(4n+3)/2 + q^-(4n+1)/2
                                      - q^-(2n+1)/2,
                                b_n = q^-2(n+1) sqrt(1 - q^(n+1))

    Exact rationals wherever the formula allows.  The closed forms describe
    the t = 0 weight; evolved specs are rejected unless their shift is zero.
    """
    if count < 0:
        raise ValidationError("count must be >= 0")
    if isinstance(spec, EvolvedMeasure):
        if not (is_exact(spec.t0) and spec.t0 == 0):
            raise ValidationError(
                "closed-form parameters describe the t = 0 weight; "
                "evolved measures need the moment route")
        spec = spec.base
    if getattr(spec, "h", None) is not None:
        raise ValidationError("no closed-form parameters for a perturbed weight")
    with mp.workdps(work_digits(digits, count + 2)):
        if isinstance(spec, LaguerreMeasure):
            g, al = spec.gamma, spec.alpha
            a = [2 * n + 1 + g + al for n in range(count)]
            b = [_sqrt_scalar((n + 1) * (n + g + 1)) for n in range(count)]
            return a, b
        if isinstance(spec, AlSalamCarlitzMeasure):
            aa, q = spec.a, spec.q
            a = [(aa + 1) / q ** n - 1 for n in range(count)]
            b = [_sqrt_scalar(aa * (1 - q ** (n + 1)) / q ** (2 * n + 1))
                 for n in range(count)]
            return a, b
        if isinstance(spec, JacobiMeasure):
            return _jacobi_weight_params(spec.a, spec.b, spec.alpha, count)
        if isinstance(spec, StieltjesWigertMeasure):
            return _sw_params(spec.kappa, spec.alpha, count, digits)
    raise ValidationError(
        "closed-form parameters exist for the named weights only, not %r"
        % (spec,))


def _jacobi_weight_params(a, b, alpha, count):
    """Orthonormal parameters for the weight (lam-alpha)^b (1+alpha-lam)^a
    on (alpha, 1+alpha).

    Derived by mapping the standard interval [-1,1] affinely onto the
    support and symmetrizing the classical three-term recurrence: the
    monic diagonal (b^2-a^2)/((2n+a+b)(2n+a+b+2)) and monic square
    4n(n+a)(n+b)(n+a+b)/((2n+a+b)^2 ((2n+a+b)^2-1)) shift/shrink by the
    half-width 1/2.  The n = 0 entries carry the usual cancellations
    ((b-a)/(a+b+2); the (1+a+b) factor drops from the square), so a+b may
    sit anywhere in (-2, inf).
    """
    a, b, alpha = as_exact(a), as_exact(b), as_exact(alpha)
    diag, off = [], []
    for n in range(count):
        if n == 0:
            mon = (b - a) / (a + b + 2)
        else:
            mon = (b * b - a * a) \
                / ((2 * n + a + b) * (2 * n + a + b + 2))
        diag.append(alpha + Fraction(1, 2) + mon / 2)
        m = n + 1
        if m == 1:
            sq = (1 + a) * (1 + b) \
                / ((2 + a + b) ** 2 * (3 + a + b))
        else:
            sq = (Fraction(m) * (m + a) * (m + b) * (m + a + b)) \
                / ((2 * m + a + b) ** 2
                   * (2 * m + a + b + 1) * (2 * m + a + b - 1))
        off.append(_sqrt_scalar(sq))
    return diag, off


def _sw_params(kappa, alpha, count, digits):
    with mp.workdps(work_digits(digits, count + 2)):
        ka, al = to_mpf(kappa), to_mpf(alpha)
        c = 1 / (4 * ka * ka)          # q^(-x/2) = exp(c x)
        a = [+(al + mp.exp((4 * n + 3) * c) + mp.exp((4 * n + 1) * c)
               - mp.exp((2 * n + 1) * c)) for n in range(count)]
        b = [+(mp.exp(4 * (n + 1) * c)
               * mp.sqrt(1 - mp.exp(-2 * (n + 1) * c)))
             for n in range(count)]
    return a, b


def moments_from_params(a, b, s0, kmax, digits=60):
    """Rebuild s_0..s_kmax from recurrence parameters: s_k is s_0 times the
    (0,0) entry of the k-th power of the recurrence matrix.  Runs the
    monic version (sub-diagonal 1, super-diagonal b_{m-1}^2), which keeps
    everything rational when the inputs are.  Needs len(a) >= kmax."""
    if kmax < 0:
        raise ValidationError("kmax must be >= 0")
    if kmax >= 1 and (len(a) < kmax or len(b) < kmax - 1):
        raise ValidationError(
            "rebuilding s_%d needs %d diagonal parameters" % (kmax, kmax))
    exact = is_exact(s0) and all(is_exact(v) for v in list(a) + list(b))

    def run():
        zero = Fraction(0) if exact else mp.mpf(0)
        beta = [(v * v if exact else to_mpf(v) ** 2) for v in b]
        diag = [(v if exact else to_mpf(v)) for v in a]
        s0x = s0 if exact else to_mpf(s0)
        v = [zero] * (kmax + 2)
        v[0] = Fraction(1) if exact else mp.mpf(1)
        out = [s0x]
        for k in range(1, kmax + 1):
            w = [zero] * (kmax + 2)
            for i in range(k + 1):
                if v[i] == 0:
                    continue
                w[i] += diag[i] * v[i] if i < len(diag) else zero
                w[i + 1] += v[i]
                if i > 0:
                    w[i - 1] += beta[i - 1] * v[i]
            v = w
            out.append(s0x * v[0])
        return out

    if exact:
        return run()
    with mp.workdps(work_digits(digits, kmax + 2)):
        return [+x for x in run()]


# ---------------------------------------------------------------------------
# Christoffel-Darboux kernel


def cd_kernel(polys, z, n, forms=False):
    """Diagonal kernel K_n(z,z) = sum_{k<=n} P_k(z)^2.

    Computes the sum form, the confluent form b_n (P_{n+1}' P_n - P_{n+1}
    P_n') and -- when the set carries its moment table -- the bordered
    determinant -det(B)/Delta_{0,n+1}; all available forms must agree to
    10^(-digits/2) or PrecisionError is raised.  Returns the sum-form value
    (or the dict of forms with forms=True).  Needs polynomials to n+1.
    """
    if n < 0:
        raise ValidationError("kernel order must be >= 0")
    if n + 1 > polys.M:
        raise ValidationError(
            "K_%d needs polynomials to degree %d (set holds %d)"
            % (n, n + 1, polys.M))
    digits = polys.digits
    with mp.workdps(work_digits(digits, n + 3)):
        zf = to_mpf(z)
        pairs = polys.eval_pairs(zf, upto=n + 1)
        ssum = mp.fsum(p * p for p, _ in pairs[:n + 1])
        pn, dn = pairs[n]
        pn1, dn1 = pairs[n + 1]
        conf = to_mpf(polys.b[n]) * (dn1 * pn - pn1 * dn)
        out = {"sum": +ssum, "confluent": +conf}
        table = polys.table
        if table is not None and table.k_max >= 2 * n:
            size = n + 2
            rows = [[mp.mpf(0)] + [zf ** j for j in range(n + 1)]]
            for i in range(n + 1):
                rows.append([zf ** i]
                            + [to_mpf(table.s(i + j)) for j in range(n + 1)])
            d0 = det_mpf([[to_mpf(table.s(i + j)) for j in range(n + 1)]
                          for i in range(n + 1)])
            if d0 == 0:
                raise InconsistencyError("Delta_{0,%d} vanished under the "
                                         "bordered kernel" % (n + 1))
            out["bordered"] = +(-det_mpf(rows) / d0)
        worst = mp.mpf(0)
        vals = list(out.values())
        for u in vals[1:]:
            worst = max(worst, rel_err(vals[0], u))
        if worst > mp.mpf(10) ** (-(digits // 2)):
            raise PrecisionError(
                "kernel forms disagree by %s at n=%d" % (mp.nstr(worst, 5), n),
                suggested_digits=2 * digits)
    return out if forms else out["sum"]


# ---------------------------------------------------------------------------
# peakons out of the polynomial values


def peakons_via_op(polys, n_peaks=None):
    """Peakon profile from polynomial values at zero (positive spectra only).

    Position n uses the running kernel sum (all terms positive, no
    cancellation), cross-checked against the confluent form; the weight uses
    the log-derivative difference.  The n-th weight needs P_n, so a set of
    degree bound M yields n <= M -- except on a finite-rank table (support
    size M+1), where the final weight comes from one extra monic step (the
    log-derivative is normalization-free, so the missing 1/sqrt(Delta)
    factor of the nonexistent P_{M+1} drops out).

    A vanishing (or sign-repeating) P_n(0) means some Delta_{1,n} = 0: the
    measure is not supported in (0, inf) and this route does not apply.
    """
    table = polys.table
    terminal = (table is not None and table.support_size == polys.M + 1
                and polys.a_tail is not None)
    navail = polys.M + 1 if terminal else polys.M
    if n_peaks is None:
        n_peaks = navail
    if n_peaks < 1:
        raise ValidationError("need at least one peak")
    if n_peaks > navail:
        raise ValidationError(
            "profile to n=%d needs polynomials past the set (max %d)"
            % (n_peaks, navail))
    digits = polys.digits
    wdps = work_digits(digits, n_peaks + 2)
    tiny = mp.mpf(10) ** (-(digits // 2))
    with mp.workdps(wdps):
        pairs = polys.eval_pairs(0, upto=min(n_peaks, polys.M))
        exp_x, omega = [], []
        csum = pairs[0][0] ** 2
        for n in range(1, n_peaks + 1):
            pm, dm = pairs[n - 1]
            if n <= polys.M:
                pn, dn = pairs[n]
            else:
                pn, dn = _monic_tail(polys)
            if abs(pn) <= tiny * abs(pm) or pn * pm >= 0:
                raise InconsistencyError(
                    "P_%d(0) vanishes or repeats sign (Delta_{1,%d} = 0); "
                    "the positive route does not apply" % (n, n))
            if n <= polys.M:
                conf = to_mpf(polys.b[n - 1]) * (dn * pm - pn * dm)
                if rel_err(conf, csum) > tiny:
                    raise PrecisionError(
                        "kernel forms disagree at peak %d" % n,
                        suggested_digits=2 * digits)
            exp_x.append(+csum)
            omega.append(+(dm / pm - dn / pn))
            if n <= polys.M:
                csum += pn * pn
    with mp.workdps(digits):
        xs = [mp.log(to_mpf(v)) for v in exp_x]
    zero = mp.mpf(0)
    full = terminal and n_peaks == navail
    km = _hankel.KappaMap(tuple(range(n_peaks)), (), full, n_peaks)
    return _inverse.PeakonProfile(
        x=xs, exp_x=exp_x, omega=omega, upsilon=[zero] * n_peaks,
        s_minus1=table.s(-1) if table is not None else None,
        kappa=km, complete=full,
        limited_by="support" if full else "requested",
        digits=digits, exact=False)


def _monic_tail(polys):
    """(pi_{M+1}(0), pi_{M+1}'(0)) of the monic chain at zero.

    The weight formula only uses the log-derivative, which agrees between
    the monic and (nonexistent) normalized polynomial, so running
    pi_{k+1} = (z - a_k) pi_k - b_{k-1}^2 pi_{k-1} from scratch with the
    extra diagonal entry a_tail is enough."""
    p_prev, d_prev = mp.mpf(0), mp.mpf(0)
    p_cur, d_cur = mp.mpf(1), mp.mpf(0)
    for k in range(polys.M + 1):
        ak = to_mpf(polys.a[k]) if k < polys.M else to_mpf(polys.a_tail)
        b2 = to_mpf(polys.b[k - 1]) ** 2 if k > 0 else mp.mpf(0)
        p_nxt = -ak * p_cur - b2 * p_prev
        d_nxt = p_cur - ak * d_cur - b2 * d_prev
        p_prev, d_prev, p_cur, d_cur = p_cur, d_cur, p_nxt, d_nxt
    return p_cur, d_cur
