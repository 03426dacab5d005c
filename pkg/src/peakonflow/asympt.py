"""Closed-form predictors for the long-time / large-n behaviour of the peakon
data, plus a small harness for comparing them against computed trajectories.

Conventions used throughout:

  * ``sign`` is +1 or -1 and selects the t -> +inf / t -> -inf regime; when a
    time ``t`` is also supplied its sign has to agree.
  * peaks are counted from the wavefront, n = 1, 2, ...
  * predictors return AsymptoticPrediction records whose ``value`` is the
    evaluated closed form (mpf at ``digits`` working precision; exact
    rationals where the formula allows it).  Qualitative statements carry
    value None and machine-checkable flags in ``terms``.

The error terms are o(1) in t (or O-rates in n where stated in ``note``); no
sharper rates are available, so comparisons should look at trends, which is
what ``compare``/``trend_exponents`` report.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from ._num import as_exact, is_exact, to_mpf, qpoch, work_digits
from .errors import ValidationError
from .measure import AlSalamCarlitzMeasure, DiscreteMeasure, EvolvedMeasure

REGIME_PLUS = "t->+inf"
REGIME_MINUS = "t->-inf"
REGIME_N = "n->inf"


@dataclass
class AsymptoticPrediction:
    quantity: str            # "x_n" | "omega_n" | "gap_n" | "L"
    regime: str              # "t->+inf" | "t->-inf" | "n->inf"
    n: int = None
    t: object = None         # time the value was evaluated at (None for n->inf)
    value: object = None     # None when the statement is qualitative only
    terms: dict = field(default_factory=dict)
    note: str = "o(1)"


def _regime(sign):
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1, got %r" % (sign,))
    return REGIME_PLUS if sign == 1 else REGIME_MINUS


def _check_sign(t, sign):
    t = to_mpf(t)
    if t == 0:
        raise ValidationError("long-time predictors need t != 0")
    if mp.sign(t) != sign:
        raise ValidationError("t=%s does not lie in the %s regime" % (t, _regime(sign)))
    return t


# ---------------------------------------------------------------------------
# discrete spectra


def _spectrum_prefix(prefix, n, wdps):
    """First n (lam, gam) pairs of `prefix`, validated ascending positive."""
    if isinstance(prefix, EvolvedMeasure):
        prefix = prefix.base
    if isinstance(prefix, DiscreteMeasure):
        pts = prefix.point_data()
    elif isinstance(prefix, AlSalamCarlitzMeasure):
        with mp.workdps(wdps):
            pts = prefix.point_data(n)
    else:
        pts = [(lam, gam) for lam, gam in prefix]
    if n < 1:
        raise ValidationError("peak index must be >= 1, got %s" % (n,))
    if len(pts) < n:
        raise ValidationError(
            "prediction for peak %d needs the first %d support points, got %d"
            % (n, n, len(pts)))
    pts = pts[:n]
    prev = None
    for lam, gam in pts:
        lamf = to_mpf(lam)
        if lamf <= 0 or to_mpf(gam) <= 0:
            raise ValidationError("need positive support points and masses")
        if prev is not None and not lamf > prev:
            raise ValidationError("support points must be strictly increasing")
        prev = lamf
    return pts


def predict_discrete(prefix, n, t, sign, digits=60):
    """Peak n of the flow driven by a purely discrete positive spectrum.

    `prefix` may be a DiscreteMeasure, an AlSalamCarlitzMeasure, or a plain
    list of (lam, gam) pairs covering at least the first n support points
    (ascending).  Returns {"x_n": ..., "omega_n": ...}.

    For sign=-1 the prediction is affine in t with an explicit constant and
    the error decays exponentially.  For sign=+1 only qualitative trends are
    known: x_n diverges sublinearly and the heights vanish.
    """
    regime = _regime(sign)
    wdps = work_digits(digits, n + 4)
    pts = _spectrum_prefix(prefix, n, wdps)
    t0 = prefix.t0 if isinstance(prefix, EvolvedMeasure) else 0

    if sign == 1:
        x = AsymptoticPrediction(
            "x_n", regime, n=n, t=t, value=None,
            terms={"diverges": True, "sublinear_in_t": True},
            note="x_n -> inf with x_n = o(t); no rate available")
        w = AsymptoticPrediction(
            "omega_n", regime, n=n, t=t, value=mp.mpf(0),
            terms={"limit": 0}, note="omega_n -> 0; no rate available")
        return {"x_n": x, "omega_n": w}

    lam_n, gam_n = pts[-1]
    with mp.workdps(wdps):
        lamf = to_mpf(lam_n)
        slope = 1 / (2 * lamf)
        const = -mp.log(to_mpf(gam_n))
        for lam_i, _ in pts[:-1]:
            const -= 2 * mp.log(lamf / to_mpf(lam_i) - 1)
        teff = to_mpf(t) + to_mpf(t0)
        xval = slope * teff + const
        wlim = (Fraction(1) / lam_n) if is_exact(lam_n) else 1 / lamf
    x = AsymptoticPrediction(
        "x_n", regime, n=n, t=t, value=xval,
        terms={"slope": slope, "constant": const},
        note="o(1), approached at an exponential rate")
    w = AsymptoticPrediction(
        "omega_n", regime, n=n, t=t, value=wlim,
        terms={"limit": wlim}, note="o(1), approached at an exponential rate")
    return {"x_n": x, "omega_n": w}


# ---------------------------------------------------------------------------
# deformed-Laguerre spectra  (weight (lam-alpha)^gamma e^{alpha-lam} / Gamma(gamma+1))


def predict_laguerre_profile(n, gamma, alpha, digits=60):
    """Large-n shape of the t=0 profile: equally-spaced-in-sqrt(n) positions

        x_n = 4 sqrt(alpha n) + log(Gamma(gamma+1) / (8 pi alpha^(gamma+1) e^alpha)),

    with heights omega_n = 1/(2 sqrt(alpha n)).  Errors O(n^{-1/2}) and
    O(n^{-1}) respectively."""
    gamma, alpha = as_exact(gamma), as_exact(alpha)
    if not (gamma > -1 and alpha > 0):
        raise ValidationError("need gamma > -1 and alpha > 0")
    with mp.workdps(work_digits(digits, 4)):
        g, al = to_mpf(gamma), to_mpf(alpha)
        lead = 4 * mp.sqrt(al * n)
        const = mp.log(mp.gamma(g + 1) / (8 * mp.pi * al ** (g + 1) * mp.e ** al))
        xval = lead + const
        wval = 1 / (2 * mp.sqrt(al * n))
    x = AsymptoticPrediction("x_n", REGIME_N, n=n, value=xval,
                             terms={"leading": lead, "constant": const},
                             note="O(n^-1/2)")
    w = AsymptoticPrediction("omega_n", REGIME_N, n=n, value=wval,
                             terms={"leading": wval}, note="O(n^-1)")
    return x, w


def predict_laguerre_longtime(n, t, gamma, alpha, h_at_inf=1, h_at_alpha=1,
                              digits=60):
    """Peak n under the deformed-Laguerre flow, both time regimes (picked by
    the sign of t).

    t -> +inf:  omega_n = sqrt(2/t) + o(t^-1/2),
                x_n = sqrt(2t) + (n - gamma - 3/2) log sqrt(2t)
                      + log( 2^(gamma+1) Gamma(gamma+1)
                             / (sqrt(2 pi) e^alpha h_at_inf (n-1)!) ) + o(1).
    t -> -inf:  omega_n = 1/alpha + o(1),
                x_n = t/(2 alpha) + (2n - 1 + gamma) log(|t|/(2 alpha))
                      - log( alpha^(1+gamma) h_at_alpha Gamma(n+gamma) (n-1)!
                             / Gamma(gamma+1) ) + o(1).

    A smooth positive perturbation h of the weight enters only through its
    boundary values h_at_inf / h_at_alpha; both default to 1 (no perturbation).
    """
    gamma, alpha = as_exact(gamma), as_exact(alpha)
    if not (gamma > -1 and alpha > 0):
        raise ValidationError("need gamma > -1 and alpha > 0")
    if n < 1:
        raise ValidationError("peak index must be >= 1")
    tf = to_mpf(t)
    if tf == 0:
        raise ValidationError("long-time predictors need t != 0")
    sign = int(mp.sign(tf))
    regime = _regime(sign)
    with mp.workdps(work_digits(digits, n + 4)):
        g, al = to_mpf(gamma), to_mpf(alpha)
        if sign == 1:
            s = mp.sqrt(2 * tf)
            slope_part = s
            logcoef = n - g - mp.mpf(3) / 2
            const = mp.log(2 ** (g + 1) * mp.gamma(g + 1)
                           / (mp.sqrt(2 * mp.pi) * mp.e ** al
                              * to_mpf(h_at_inf) * mp.factorial(n - 1)))
            xval = s + logcoef * mp.log(s) + const
            wval = mp.sqrt(2 / tf)
            wnote = "o(t^-1/2)"
        else:
            slope_part = tf / (2 * al)
            logcoef = 2 * n - 1 + g
            const = -mp.log(al ** (1 + g) * to_mpf(h_at_alpha)
                            * mp.gamma(n + g) * mp.factorial(n - 1)
                            / mp.gamma(g + 1))
            xval = slope_part + logcoef * mp.log(abs(tf) / (2 * al)) + const
            wval = 1 / al
            wnote = "o(1)"
    x = AsymptoticPrediction("x_n", regime, n=n, t=t, value=xval,
                             terms={"leading": slope_part,
                                    "log_coefficient": logcoef,
                                    "constant": const})
    w = AsymptoticPrediction("omega_n", regime, n=n, t=t, value=wval,
                             terms={"limit": wval}, note=wnote)
    return x, w


def predict_laguerre_hankel(k, n, t, sign, gamma, alpha, digits=60):
    """Leading asymptote of the n-th Hankel determinant with top-left moment
    s_k under the deformed-Laguerre flow.

    sign=+1:  e^{-n sqrt(2t)} * sqrt(2t)^{n(n+2k+2gamma)/2} * d+_{k,n},
              d+_{k,n} = (2 pi)^{n/2} e^{alpha n} / 2^{n(n+k+gamma)}
                         * prod_{j<n} j! / Gamma(gamma+1).
    sign=-1:  e^{n|t|/(2 alpha)} * (|t|/(2 alpha))^{-n(n+gamma)} * d-_{k,n},
              d-_{k,n} = alpha^{n(n+k+gamma)}
                         * prod_{j<n} j! Gamma(gamma+j+1) / Gamma(gamma+1).

    n = 0 gives exactly 1.  Ratios of these asymptotes reproduce the peakon
    predictions above (that cross-check lives in the tests)."""
    gamma, alpha = as_exact(gamma), as_exact(alpha)
    if not (gamma > -1 and alpha > 0):
        raise ValidationError("need gamma > -1 and alpha > 0")
    if n < 0:
        raise ValidationError("matrix size must be >= 0")
    if n == 0:
        return mp.mpf(1)
    tf = _check_sign(t, sign)
    with mp.workdps(work_digits(digits, n + k if k > 0 else n)):
        g, al = to_mpf(gamma), to_mpf(alpha)
        if sign == 1:
            s = mp.sqrt(2 * tf)
            d = (2 * mp.pi) ** (mp.mpf(n) / 2) * mp.e ** (al * n)
            d /= mp.mpf(2) ** (n * (n + k + g))
            for j in range(n):
                d *= mp.factorial(j) / mp.gamma(g + 1)
            val = mp.e ** (-n * s) * s ** (mp.mpf(n * (n + 2 * k)) / 2 + n * g) * d
        else:
            base = abs(tf) / (2 * al)
            d = al ** (n * (n + k + g))
            for j in range(n):
                d *= mp.factorial(j) * mp.gamma(g + j + 1) / mp.gamma(g + 1)
            val = mp.e ** (n * abs(tf) / (2 * al)) * base ** (-n * (n + g)) * d
    return val


# ---------------------------------------------------------------------------
# deformed-Jacobi spectra  (weight on (alpha, 1+alpha))


def _jacobi_check(a, b, alpha):
    a, b, alpha = as_exact(a), as_exact(b), as_exact(alpha)
    if not (a > -1 and b > -1 and alpha > 0):
        raise ValidationError("need a, b > -1 and alpha > 0")
    return a, b, alpha


def predict_jacobi_profile(n, a, b, alpha, digits=60):
    """Large-n shape of the t=0 profile: asymptotically periodic with

        x_n = (2n + a + b) log B - log(8 pi alpha^(b+1) (1+alpha)^(a+1)) + o(1),
        B   = 1 + 2 alpha + 2 sqrt(alpha (1+alpha)),

    period c = 2 log B per peak, heights omega_n -> 1/sqrt(alpha(1+alpha)).

    The base B carries the factor 2 on the square root: B equals
    (sqrt(alpha) + sqrt(1+alpha))^2, the exterior conformal radius seen from
    the support endpoint ratio, and only this value makes ratios of the
    Hankel-column asymptotics consistent.  (The OP-string route in the tests
    pins this down numerically.)"""
    a, b, alpha = _jacobi_check(a, b, alpha)
    if n < 1:
        raise ValidationError("peak index must be >= 1")
    with mp.workdps(work_digits(digits, 4)):
        af, bf, al = to_mpf(a), to_mpf(b), to_mpf(alpha)
        B = 1 + 2 * al + 2 * mp.sqrt(al * (1 + al))
        period = 2 * mp.log(B)
        offset = ((af + bf) * mp.log(B)
                  - mp.log(8 * mp.pi * al ** (bf + 1) * (1 + al) ** (af + 1)))
        xval = n * period + offset
        wval = 1 / mp.sqrt(al * (1 + al))
    x = AsymptoticPrediction("x_n", REGIME_N, n=n, value=xval,
                             terms={"period": period, "offset": offset,
                                    "base": B})
    w = AsymptoticPrediction("omega_n", REGIME_N, n=n, value=wval,
                             terms={"limit": wval})
    return x, w


def predict_jacobi_longtime(n, t, a, b, alpha, digits=60):
    """Peak n under the deformed-Jacobi flow, both time regimes.

    t -> +inf: omega_n -> 1/(1+alpha),
               x_n = t/(2(1+alpha)) + (2n+a-1) log(t/(2(1+alpha))) - log j+_n,
               j+_n = (1+alpha)^(a+1) (n-1)! Gamma(n+a).
    t -> -inf: omega_n -> 1/alpha,
               x_n = t/(2 alpha) + (2n+b-1) log(|t|/(2 alpha)) - log j-_n,
               j-_n = alpha^(b+1) (n-1)! Gamma(n+b).

    Gaps then grow logarithmically: x_{n+1}-x_n = log(t^2) - log(4(1+alpha)^2
    (n^2+an)) (+inf regime; alpha,b for -inf), which is exactly the difference
    of these predictions, so no separate gap op is needed (see gap_of)."""
    a, b, alpha = _jacobi_check(a, b, alpha)
    if n < 1:
        raise ValidationError("peak index must be >= 1")
    tf = to_mpf(t)
    if tf == 0:
        raise ValidationError("long-time predictors need t != 0")
    sign = int(mp.sign(tf))
    regime = _regime(sign)
    with mp.workdps(work_digits(digits, n + 4)):
        af, bf, al = to_mpf(a), to_mpf(b), to_mpf(alpha)
        if sign == 1:
            speed, edge, off = 1 + al, af, (1 + al) ** (af + 1)
        else:
            speed, edge, off = al, bf, al ** (bf + 1)
        lead = tf / (2 * speed)
        logcoef = 2 * n + edge - 1
        const = -mp.log(off * mp.factorial(n - 1) * mp.gamma(n + edge))
        xval = lead + logcoef * mp.log(abs(tf) / (2 * speed)) + const
        wval = 1 / speed
    x = AsymptoticPrediction("x_n", regime, n=n, t=t, value=xval,
                             terms={"leading": lead, "log_coefficient": logcoef,
                                    "constant": const})
    w = AsymptoticPrediction("omega_n", regime, n=n, t=t, value=wval,
                             terms={"limit": wval})
    return x, w


def predict_jacobi_hankel(k, n, t, sign, a, b, alpha, digits=60):
    """Leading asymptote of the Hankel determinants for the deformed-Jacobi
    flow:

    sign=+1:  e^{-nt/(2(1+alpha))} t^{-n(n+a)} J+_{k,n},
              J+_{k,n} = 2^{n(n+a)} (1+alpha)^{n(2n+2a+k)}
                         prod_{j<n} j! Gamma(j+a+1).
    sign=-1:  e^{-nt/(2 alpha)} |t|^{-n(n+b)} J-_{k,n},
              J-_{k,n} = 2^{n(n+b)} alpha^{n(2n+2b+k)}
                         prod_{j<n} j! Gamma(j+b+1).
    """
    a, b, alpha = _jacobi_check(a, b, alpha)
    if n < 0:
        raise ValidationError("matrix size must be >= 0")
    if n == 0:
        return mp.mpf(1)
    tf = _check_sign(t, sign)
    with mp.workdps(work_digits(digits, n + k if k > 0 else n)):
        af, bf, al = to_mpf(a), to_mpf(b), to_mpf(alpha)
        if sign == 1:
            speed, edge, scale = 1 + al, af, 1 + al
        else:
            speed, edge, scale = al, bf, al
        J = mp.mpf(2) ** (n * (n + edge)) * scale ** (n * (2 * n + k) + 2 * n * edge)
        for j in range(n):
            J *= mp.factorial(j) * mp.gamma(j + edge + 1)
        val = mp.e ** (-n * tf / (2 * speed)) * abs(tf) ** (-n * (n + edge)) * J
    return val


# ---------------------------------------------------------------------------
# q-lattice spectra (finite accumulation point)


def _asc_check(a, q):
    a, q = as_exact(a), as_exact(q)
    if not (0 < q < 1):
        raise ValidationError("need 0 < q < 1")
    if not (1 < a < 1 / q):
        raise ValidationError("need 1 < a < 1/q")
    return a, q


def asc_profile(n, a, q, digits=60):
    """Exact t=0 peakon data for the q-lattice measure with parameters
    1 < a < 1/q:

        exp(x_n) = sum_{k<n} (aq)^k / (q;q)_k,    omega_n = (q;q)_{n-1} / a^n * exp(x_n).

    Returns (x_pred, omega_pred); omega and exp(x_n) are exact rationals for
    rational inputs (kept in terms["exp_x"]), x itself is the log.  Positions
    increase to the finite accumulation point L = -log((aq;q)_inf)."""
    a, q = _asc_check(a, q)
    if n < 1:
        raise ValidationError("peak index must be >= 1")
    xt = Fraction(0)
    for k in range(n):
        xt += (a * q) ** k / qpoch(q, q, k)
    om = qpoch(q, q, n - 1) / a ** n * xt
    with mp.workdps(work_digits(digits, n + 4)):
        xval = mp.log(to_mpf(xt))
    x = AsymptoticPrediction("x_n", REGIME_N, n=n, value=xval,
                             terms={"exp_x": xt}, note="exact")
    w = AsymptoticPrediction("omega_n", REGIME_N, n=n, value=om,
                             terms={}, note="exact")
    return x, w


def asc_limit_point(a, q, digits=60):
    """Accumulation point of the q-lattice peakon positions at t=0:
    L = -log((aq;q)_inf)."""
    a, q = _asc_check(a, q)
    with mp.workdps(work_digits(digits, 8)):
        val = -mp.log(qpoch(to_mpf(a) * to_mpf(q), to_mpf(q)))
    return AsymptoticPrediction("L", REGIME_N, value=val, note="exact")


def asc_string(a, q, count):
    """First `count` dual-string terms for the q-lattice measure, exact:

        gap_n  = (aq)^(n-1) / (q;q)_(n-1),   weight_n = (q;q)_(n-1) / a^n,

    n = 1..count.  Total length converges (finite accumulation point) while
    the product gap_n * weight_n^2 ... stays summable too -- which is what
    makes this spectrum a natural indeterminacy test case."""
    a, q = _asc_check(a, q)
    out = []
    for n in range(1, count + 1):
        gap = (a * q) ** (n - 1) / qpoch(q, q, n - 1)
        wt = qpoch(q, q, n - 1) / a ** n
        out.append((gap, wt))
    return out


# ---------------------------------------------------------------------------
# comparison harness


def gap_of(x_lo, x_hi):
    """Gap prediction x_{n+1} - x_n from two position predictions."""
    if x_lo.quantity != "x_n" or x_hi.quantity != "x_n":
        raise ValidationError("gap_of expects two x_n predictions")
    if x_lo.n is None or x_hi.n != x_lo.n + 1 or x_lo.regime != x_hi.regime:
        raise ValidationError("gap_of expects consecutive peaks, same regime")
    val = None
    if x_lo.value is not None and x_hi.value is not None:
        val = x_hi.value - x_lo.value
    return AsymptoticPrediction("gap_n", x_lo.regime, n=x_lo.n, t=x_lo.t,
                                value=val, note=x_lo.note)


def _same_time(ta, tb):
    ta, tb = to_mpf(ta), to_mpf(tb)
    return abs(ta - tb) <= mp.mpf("1e-12") * max(1, abs(ta), abs(tb))


def _computed_value(profile, quantity, n):
    if quantity == "x_n":
        seq = profile.x
    elif quantity == "omega_n":
        seq = profile.omega
    elif quantity == "gap_n":
        if n + 1 > len(profile.x):
            raise ValidationError("gap_%d needs %d computed positions" % (n, n + 1))
        return profile.x[n] - profile.x[n - 1]
    else:
        raise ValidationError("cannot read %r off a trajectory" % (quantity,))
    if n > len(seq):
        raise ValidationError("trajectory holds %d peaks, prediction wants n=%d"
                              % (len(seq), n))
    return seq[n - 1]


def compare(computed, predictions):
    """Match predictions against a TrajectoryTable and tabulate errors.

    Every prediction must name a quantity readable off the table (x_n,
    omega_n, gap_n), a peak index within the computed range and a time on the
    computed grid; qualitative predictions (value None) are skipped.  Rows
    come back as dicts with the keys

        quantity, n, t, computed, predicted, abs_err, rel_err
    """
    rows = []
    for pred in predictions:
        if pred.value is None:
            continue
        idx = None
        for i, ti in enumerate(computed.times):
            if _same_time(ti, pred.t):
                idx = i
                break
        if idx is None:
            raise ValidationError("no computed snapshot at t=%s" % (pred.t,))
        comp = _computed_value(computed.profiles[idx], pred.quantity, pred.n)
        comp_f, pred_f = to_mpf(comp), to_mpf(pred.value)
        abs_err = abs(comp_f - pred_f)
        den = max(abs(comp_f), abs(pred_f))
        rows.append({
            "quantity": pred.quantity,
            "n": pred.n,
            "t": pred.t,
            "computed": comp,
            "predicted": pred.value,
            "abs_err": abs_err,
            "rel_err": abs_err / den if den else mp.mpf(0),
        })
    return rows


def trend_exponents(rows):
    """Least-squares exponent p of |abs_err| ~ C |t|^p per (quantity, n).

    Negative p certifies the o(1) claim on the sampled window.  Rows with
    zero error or t=0 are skipped; groups with fewer than two usable points
    are reported as None."""
    groups = {}
    for row in rows:
        tf = to_mpf(row["t"]) if row["t"] is not None else mp.mpf(0)
        err = to_mpf(row["abs_err"])
        if tf == 0 or err == 0:
            continue
        groups.setdefault((row["quantity"], row["n"]), []).append(
            (mp.log(abs(tf)), mp.log(err)))
    out = {}
    for key, pts in groups.items():
        if len(pts) < 2:
            out[key] = None
            continue
        m = len(pts)
        sx = sum(p[0] for p in pts)
        sy = sum(p[1] for p in pts)
        sxx = sum(p[0] ** 2 for p in pts)
        sxy = sum(p[0] * p[1] for p in pts)
        denom = m * sxx - sx ** 2
        out[key] = (m * sxy - sx * sy) / denom if denom != 0 else None
    return out
