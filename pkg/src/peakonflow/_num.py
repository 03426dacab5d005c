"""Small numeric kernel: exact/float duality, determinants, q-products.

Everything downstream works with two kinds of scalars:

* exact values  -- int / fractions.Fraction (closed under +,-,*,/)
* float values  -- mpmath.mpf at whatever mp.dps is current

A computation stays exact as long as every input is exact; the moment a
float enters, results are mpf.  `to_mpf` is the single conversion point so
that equal inputs convert to bit-identical floats at equal precision.
"""

from fractions import Fraction

import mpmath as mp

from .errors import ValidationError


def as_exact(x):
    """Coerce x to Fraction.  Floats go through repr so '0.1' means 1/10."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError("cannot parse %r as a rational" % (x,)) from e
    if isinstance(x, float):
        return Fraction(repr(x))
    raise ValidationError("cannot treat %r as an exact number" % (x,))


def is_exact(x):
    return isinstance(x, (int, Fraction))


def to_mpf(x):
    """Convert to mpf at the current working precision."""
    if isinstance(x, mp.mpf):
        return +x  # round into current precision
    if isinstance(x, int):
        return mp.mpf(x)
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / mp.mpf(x.denominator)
    if isinstance(x, (str, float)):
        return mp.mpf(x)
    raise ValidationError("cannot convert %r to a float" % (x,))


def as_scalar(x):
    """Exact if possible (int/Fraction/str), mpf otherwise."""
    if is_exact(x):
        return x if isinstance(x, Fraction) else Fraction(x)
    if isinstance(x, str):
        return as_exact(x)
    if isinstance(x, mp.mpf):
        return x
    if isinstance(x, float):
        return as_exact(x)
    raise ValidationError("unsupported scalar %r" % (x,))


def sign_of(x):
    if is_exact(x):
        return (x > 0) - (x < 0)
    return mp.sign(x)


# ---------------------------------------------------------------------------
# determinants


def det_exact(rows):
    """Exact determinant of a square matrix of Fractions/ints (Bareiss with
    row pivoting)."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    a = [[Fraction(x) for x in r] for r in rows]
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (pivot * a[i][j] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = pivot
    return sign * a[n - 1][n - 1]


def det_mpf(rows):
    """Determinant at current mp precision, Gaussian elimination with partial
    pivoting."""
    n = len(rows)
    if n == 0:
        return mp.mpf(1)
    a = [[to_mpf(x) for x in r] for r in rows]
    det = mp.mpf(1)
    for k in range(n):
        p, pv = k, abs(a[k][k])
        for i in range(k + 1, n):
            if abs(a[i][k]) > pv:
                p, pv = i, abs(a[i][k])
        if pv == 0:
            return mp.mpf(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            m = a[i][k] * inv
            if m:
                for j in range(k + 1, n):
                    a[i][j] -= m * a[k][j]
    return det


def det_any(rows):
    if all(is_exact(x) for r in rows for x in r):
        return det_exact(rows)
    return det_mpf(rows)


def leading_minors_exact(rows):
    """Leading principal minors [1, m1, ..] of an exact matrix via the Bareiss
    chain (no pivoting -- pivots ARE the minors).  Stops at the first zero
    pivot; returns (minors_including_zero, broke_at_or_None)."""
    n = len(rows)
    a = [[Fraction(x) for x in r] for r in rows]
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


def leading_minors_mpf(rows, soft=None):
    """Leading principal minors of an mpf matrix by unpivoted elimination.

    Pivot products give the minors.  A pivot that is exactly zero, or smaller
    than `soft` relative to the running scale, ends the trustworthy part of
    the chain; we return (minors_so_far, broke_at) and let the caller fill in
    the rest with pivoted per-entry determinants.
    """
    n = len(rows)
    a = [[to_mpf(x) for x in r] for r in rows]
    minors = [mp.mpf(1)]
    scale = mp.mpf(0)
    for k in range(n):
        acc = minors[-1] * a[k][k]
        piv = a[k][k]
        if piv == 0 or (soft is not None and scale > 0 and abs(piv) < soft * scale):
            return minors, k + 1
        scale = max(scale, abs(piv))
        minors.append(acc)
        if k == n - 1:
            break
        inv = 1 / piv
        for i in range(k + 1, n):
            m = a[i][k] * inv
            if m:
                for j in range(k + 1, n):
                    a[i][j] -= m * a[k][j]
    return minors, None


# ---------------------------------------------------------------------------
# q-Pochhammer products


def qpoch(a, q, n=None):
    """(a;q)_n, or (a;q)_infinity when n is None.

    The infinite product is truncated once the factors sit within
    10^-(dps+5) of 1, with the tail bounded by a geometric series.
    """
    a = to_mpf(a) if not is_exact(a) else a
    q = to_mpf(q) if not is_exact(q) else q
    if n is not None:
        out = Fraction(1) if (is_exact(a) and is_exact(q)) else mp.mpf(1)
        qk = out * 1
        for _ in range(n):
            out *= 1 - a * qk
            qk *= q
        return out
    aq = to_mpf(a)
    qq = to_mpf(q)
    if not (0 <= qq < 1):
        raise ValidationError("infinite q-product needs 0 <= q < 1")
    tol = mp.mpf(10) ** (-(mp.mp.dps + 5))
    out = mp.mpf(1)
    term = aq
    for _ in range(100000):
        if abs(term) < tol:
            break
        out *= 1 - term
        term *= qq
    else:
        raise ValidationError("q-product did not converge")
    return out


# ---------------------------------------------------------------------------
# misc


def work_digits(digits, K):
    """Working precision for a target of `digits` on grids of order up to K.

    Determinants of smooth moment sequences are exponentially smaller than
    their cofactor expansions; empirically the cancellation costs a bit over
    0.6 decimal digits per order, so both the moment table and the
    elimination must carry that margin.
    """
    return digits + 25 + (7 * K) // 10


def geometric_mean(vals):
    vals = [abs(v) for v in vals if v != 0]
    if not vals:
        return mp.mpf(0)
    acc = mp.mpf(1)
    for v in vals:
        acc *= to_mpf(v)
    return acc ** (mp.mpf(1) / len(vals))


def rel_err(got, want):
    g, w = to_mpf(got), to_mpf(want)
    scale = max(abs(g), abs(w), mp.mpf(1) * 0)
    if scale == 0:
        return abs(g - w)
    return abs(g - w) / scale
