"""Command-line driver.

Commands
--------
snapshot    peakon profile (and optionally u on a grid) at one time
trajectory  profiles over a strictly increasing time grid
verify      self-check suites, machine-readable JSON report
collide     scan Delta_{1,k}(t) for sign changes (collision times)
asympt      computed trajectory vs long-time/large-n predictions
roundtrip   measure -> profile -> string -> Weyl -> measure comparison

Conventions: numeric inputs are parsed as exact decimal strings (so t=0.1
means 1/10, not the nearest double); output numbers are fixed-precision
decimal strings, making runs byte-for-byte reproducible; --digits defaults
to $PEAKON_DIGITS or 200.  Exit codes: 0 success / all checks pass, 1 bad
input, 2 computation or verification failure, 3 I/O trouble.
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath as mp

from ._num import as_exact, is_exact, to_mpf, work_digits, rel_err
from .errors import PeakonError, ValidationError, ComputationError
from .measure import (DiscreteMeasure, AlSalamCarlitzMeasure, LaguerreMeasure,
                      JacobiMeasure, StieltjesWigertMeasure, EvolvedMeasure,
                      base_of, evolve, moments, measure_from_json, _evo)
from . import hankel as _hankel
from . import inverse as _inverse
from . import forward as _forward
from . import flow as _flow
from . import asympt as _asympt
from . import ortho as _ortho

SIG = 30          # significant digits in emitted decimal strings
PRESETS = ("paper-300-terms",)


class _IOFailure(Exception):
    pass


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; that slot is reserved for
    # computation failures here, so route usage problems through exit 1
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# formatting / parsing helpers


def _fmt(x, sig=SIG):
    if x is None:
        return ""
    with mp.workdps(sig + 10):
        v = to_mpf(x)
        if v == 0:
            v = mp.mpf(0)        # normalize -0.0
        return mp.nstr(v, sig, strip_zeros=False)


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_scalar(text, what):
    try:
        return as_exact(text)
    except (ValueError, TypeError, ZeroDivisionError, ValidationError):
        raise ValidationError("cannot parse %s value %r as an exact decimal"
                              % (what, text))


def _parse_range(text, what, cap=200001):
    """ "a:b:step" -> exact, inclusive arithmetic progression."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError("%s expects a:b:step, got %r" % (what, text))
    a, b, step = (_parse_scalar(p, what) for p in parts)
    if step <= 0:
        raise ValidationError("%s step must be positive" % what)
    if b < a:
        raise ValidationError("%s has empty range %r" % (what, text))
    n = int((b - a) / step) + 1
    if n > cap:
        raise ValidationError("%s asks for %d points (cap %d)" % (what, n, cap))
    return [a + i * step for i in range(n)]


def _parse_tgrid(text):
    if text is None:
        raise ValidationError("--t-grid is required for this command")
    if ":" in text:
        return _parse_range(text, "--t-grid", cap=10001)
    return [_parse_scalar(p, "--t-grid") for p in text.split(",") if p.strip()]


def _load_json_arg(arg, what):
    """Inline JSON object or a path to a JSON file."""
    text = arg.strip()
    if not text.startswith("{"):
        try:
            with open(arg) as f:
                text = f.read()
        except OSError as e:
            raise _IOFailure("cannot read %s file %r: %s" % (what, arg, e))
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError("bad %s JSON: %s" % (what, e))


def _load_measure(arg):
    if arg is None:
        raise ValidationError("--measure is required for this command")
    return measure_from_json(_load_json_arg(arg, "measure"))


@dataclass
class RunConfig:
    """Validated run parameters shared by the data-producing commands."""
    digits: int
    times: list            # strictly increasing
    n_peaks: object = None  # None or int >= 1
    preset: object = None
    fmt: str = "csv"
    out: object = None

    def __post_init__(self):
        if self.digits < 30:
            raise ValidationError("--digits must be at least 30")
        for u, v in zip(self.times, self.times[1:]):
            if not v > u:
                raise ValidationError("time grid must be strictly increasing")
        if self.n_peaks is not None and self.n_peaks < 1:
            raise ValidationError("--n-peaks must be >= 1")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValidationError("unknown preset %r" % (self.preset,))


def _config(args, times):
    digits = args.digits
    if digits is None:
        envval = os.environ.get("PEAKON_DIGITS")
        if envval is not None:
            try:
                digits = int(envval)
            except ValueError:
                raise ValidationError("PEAKON_DIGITS=%r is not an integer"
                                      % envval)
        else:
            digits = 200
    return RunConfig(digits=digits, times=times,
                     n_peaks=getattr(args, "n_peaks", None),
                     preset=getattr(args, "preset", None),
                     fmt=getattr(args, "format", "csv"),
                     out=getattr(args, "out", None))


# ---------------------------------------------------------------------------
# artifact emission


def _emit(artifacts, out, extra_stdout=None):
    """Write (name, text) artifacts to the out dir, or a single artifact to
    stdout when no dir was given."""
    if out is None:
        if len(artifacts) > 1:
            raise ValidationError(
                "this invocation produces %d files (%s); pass --out DIR"
                % (len(artifacts), ", ".join(n for n, _ in artifacts)))
        sys.stdout.write(artifacts[0][1])
        if extra_stdout:
            sys.stdout.write(extra_stdout)
        return
    try:
        os.makedirs(out, exist_ok=True)
        for name, text in artifacts:
            with open(os.path.join(out, name), "w", newline="") as f:
                f.write(text)
    except OSError as e:
        raise _IOFailure("cannot write under %r: %s" % (out, e))
    for name, _ in artifacts:
        print(os.path.join(out, name))
    if extra_stdout:
        sys.stdout.write(extra_stdout)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _peakon_rows(t, profile):
    rows = []
    for i in range(len(profile.x)):
        om = profile.omega[i] if i < len(profile.omega) else None
        up = profile.upsilon[i] if i < len(profile.upsilon) else None
        rows.append([_fmt(t), i + 1, _fmt(profile.x[i]), _fmt(om), _fmt(up)])
    return rows


def _peakon_csv(pairs):
    rows = []
    for t, profile in pairs:
        rows.extend(_peakon_rows(t, profile))
    return _csv_text(["t", "n", "x_n", "omega_n", "upsilon_n"], rows)


def _solution_csv(samples):
    return _csv_text(["x", "u"],
                     [[_fmt(x), _fmt(u)] for x, u in samples])


def _profile_doc(t, profile):
    return {
        "t": _fmt(t),
        "complete": bool(profile.complete),
        "limited_by": profile.limited_by,
        "peaks": [{"n": i + 1,
                   "x_n": _fmt(profile.x[i]),
                   "omega_n": _fmt(profile.omega[i])
                   if i < len(profile.omega) else None,
                   "upsilon_n": _fmt(profile.upsilon[i])
                   if i < len(profile.upsilon) else None}
                  for i in range(len(profile.x))],
    }


def _comparison_csv(rows):
    out = []
    for r in rows:
        out.append([r["quantity"], r["n"], _fmt(r["t"]), _fmt(r["computed"]),
                    _fmt(r["predicted"]), _fmt(r["abs_err"]),
                    _fmt(r["rel_err"])])
    return _csv_text(["quantity", "n", "t", "computed", "predicted",
                      "abs_err", "rel_err"], out)


def _gnuplot_script(csvname, xcol, ycol, style, title):
    return ("set datafile separator ','\n"
            "set key off\nset title '%s'\n"
            "plot '%s' every ::1 using %d:%d with %s\n"
            % (title, csvname, xcol, ycol, style))


# ---------------------------------------------------------------------------
# snapshot / trajectory


def _debug_table(spec, t, n_peaks, digits, preset):
    base = base_of(spec)
    finite = isinstance(base, DiscreteMeasure)
    if n_peaks is None and finite:
        n_peaks = base.support_size
    if n_peaks is None:
        raise ValidationError("n_peaks must be given for an infinite spectrum")
    K = n_peaks if (finite and n_peaks >= base.support_size) else n_peaks + 1
    return moments(spec, t=t, K=K, digits=digits, preset=preset)


def _cmd_snapshot(args):
    spec = _load_measure(args.measure)
    t = _parse_scalar(args.t, "--t") if args.t is not None else Fraction(0)
    cfg = _config(args, [t])
    grid = _parse_range(args.grid, "--grid") if args.grid else None
    profile, samples = _flow.snapshot(spec, t=t, n_peaks=cfg.n_peaks,
                                      grid=grid, digits=cfg.digits,
                                      preset=cfg.preset)
    artifacts = []
    if cfg.fmt == "json":
        doc = _profile_doc(t, profile)
        doc["digits"] = cfg.digits
        if samples is not None:
            doc["solution"] = [{"x": _fmt(x), "u": _fmt(u)}
                               for x, u in samples]
        artifacts.append(("snapshot.json", _json_text(doc)))
    else:
        artifacts.append(("peakons.csv", _peakon_csv([(t, profile)])))
        if samples is not None:
            artifacts.append(("solution.csv", _solution_csv(samples)))
    if args.dump_hankel or args.dump_ortho:
        table = _debug_table(spec, t, cfg.n_peaks, cfg.digits, cfg.preset)
        if args.dump_hankel:
            g = _hankel.build_grid(table)
            rows = []
            for l in sorted(set(_hankel.DELTA_ROWS)):
                for k in range(g.k_limit(l) + 1):
                    rows.append([l, k, _fmt(g.delta(l, k))])
            artifacts.append((args.dump_hankel,
                              _csv_text(["l", "k", "delta"], rows)))
        if args.dump_ortho:
            M = min(table.K, len(profile.x))
            ps = _ortho.orthopoly_from_moments(table, M, digits=cfg.digits)
            pairs = ps.eval_pairs(0)
            rows = []
            for k in range(M + 1):
                rows.append([k,
                             _fmt(ps.a[k]) if k < M else "",
                             _fmt(ps.b[k]) if k < M else "",
                             _fmt(pairs[k][0])])
            artifacts.append((args.dump_ortho,
                              _csv_text(["k", "a_k", "b_k", "P_k0"], rows)))
    if args.gnuplot and cfg.fmt == "csv":
        artifacts.append(("peakons.gp", _gnuplot_script(
            "peakons.csv", 3, 4, "impulses", "peakon weights")))
        if samples is not None:
            artifacts.append(("solution.gp", _gnuplot_script(
                "solution.csv", 1, 2, "lines", "u(x)")))
    _emit(artifacts, cfg.out)
    return 0


def _cmd_trajectory(args):
    spec = _load_measure(args.measure)
    times = _parse_tgrid(args.t_grid)
    cfg = _config(args, times)
    traj = _flow.trajectory(spec, times, n_peaks=cfg.n_peaks,
                            digits=cfg.digits, preset=cfg.preset)
    if cfg.fmt == "json":
        doc = {"digits": cfg.digits,
               "snapshots": [_profile_doc(t, p)
                             for t, p in zip(traj.times, traj.profiles)],
               "kappa_changed": [bool(c) for c in traj.kappa_changed]}
        artifacts = [("trajectory.json", _json_text(doc))]
    else:
        artifacts = [("trajectory.csv",
                      _peakon_csv(zip(traj.times, traj.profiles)))]
        if args.gnuplot:
            artifacts.append(("trajectory.gp", _gnuplot_script(
                "trajectory.csv", 1, 3, "points", "peak positions")))
    _emit(artifacts, cfg.out)
    return 0


# ---------------------------------------------------------------------------
# verify suites


def _check(name, value, threshold):
    vf, tf = to_mpf(value), to_mpf(threshold)
    return {"name": name, "status": "pass" if vf <= tf else "fail",
            "value": _fmt(value), "threshold": _fmt(threshold)}


def _named_specs(given):
    if given is not None:
        return [("measure", given)]
    return [("laguerre", LaguerreMeasure(0, Fraction(1, 2))),
            ("jacobi", JacobiMeasure(0, 0, Fraction(1, 20))),
            ("asc", AlSalamCarlitzMeasure(Fraction(6, 5), Fraction(4, 5)))]


def _suite_identities(spec, digits, preset, k_order):
    checks = []
    thr = mp.mpf(10) ** (-(digits // 2))
    for name, s in _named_specs(spec):
        for t in (-1, 0, 1):
            table = moments(s, t=t, K=k_order, digits=digits, preset=preset)
            g = _hankel.build_grid(table)
            res = _hankel.identity_residuals(g)
            worst = max(to_mpf(v) for v in res["worst"].values())
            checks.append(_check("%s t=%d determinant identities (k<=%d)"
                                 % (name, t, k_order), worst, thr))
    return checks


def _suite_ode(spec, digits, preset):
    checks = []
    if spec is None:
        spec = LaguerreMeasure(0, Fraction(1, 2))
    h = _flow.default_h(digits)
    thr = mp.mpf(10) ** 4 * to_mpf(h) ** 2
    base = base_of(spec)
    n_top = 3
    if isinstance(base, DiscreteMeasure):
        n_top = min(n_top, base.support_size)
    for t in (-1, 0, 1):
        for n in range(1, n_top + 1):
            rx, rw = _flow.ode_residual(spec, t, n, digits=digits)
            checks.append(_check("ode t=%d n=%d position residual" % (t, n),
                                 rx, thr))
            checks.append(_check("ode t=%d n=%d weight residual" % (t, n),
                                 rw, thr))
    for l in range(0, 4):
        r = _flow.moment_derivative_residual(spec, l, t=0, digits=digits)
        checks.append(_check("moment derivative l=%d" % l, r, thr))
    return checks


def _roundtrip_points(spec, t, digits, preset):
    """(expected, recovered, m_at_0) for a finite discrete spectrum."""
    base = base_of(spec)
    if not isinstance(base, DiscreteMeasure):
        raise ValidationError("roundtrip needs a finite discrete spectrum")
    t_total = t
    if isinstance(spec, EvolvedMeasure):
        t_total = t + spec.t0
    table = moments(spec, t=t, K=base.support_size, digits=digits,
                    preset=preset)
    g = _hankel.build_grid(table)
    profile = _inverse.peakon_profile(g)
    string = _forward.string_from_profile(profile)
    weyl = _forward.weyl_from_string(string)
    rec, at0 = _forward.measure_from_weyl(weyl, digits=digits)
    with mp.workdps(work_digits(digits, base.support_size + 2)):
        expected = [(lam, _evo(lam, t_total) * gam if t_total != 0 else gam)
                    for lam, gam in base.points]
    return expected, rec.points, at0


def _suite_roundtrip(spec, digits, preset):
    if spec is None:
        spec = DiscreteMeasure([(1, 1), (2, 1)])
    expected, recovered, _ = _roundtrip_points(spec, Fraction(0), digits,
                                               preset)
    thr = mp.mpf(10) ** (-(digits // 3))
    with mp.workdps(work_digits(digits, len(expected) + 2)):
        wl = max(rel_err(to_mpf(a[0]), to_mpf(b[0]))
                 for a, b in zip(expected, recovered))
        wg = max(rel_err(to_mpf(a[1]), to_mpf(b[1]))
                 for a, b in zip(expected, recovered))
    return [_check("roundtrip eigenvalue error (%d points)" % len(expected),
                   wl, thr),
            _check("roundtrip mass error", wg, thr)]


def _suite_scaling(spec, digits, preset):
    if spec is None:
        spec = DiscreteMeasure([(1, 1), (2, 1)])
    base = base_of(spec)
    K = base.support_size if isinstance(base, DiscreteMeasure) else 6
    n_peaks = None if isinstance(base, DiscreteMeasure) else 5
    table = moments(spec, t=0, K=K, digits=digits, preset=preset)
    res = _flow.scaling_check(table, c=10, d=2, n_peaks=n_peaks)
    thr = 0 if table.exact else mp.mpf(10) ** (-(digits // 2))
    return [_check("scaling covariance (c=10, d=2) %s" % fld, res[fld], thr)
            for fld in ("x", "omega", "upsilon")]


def _suite_conservation(spec, digits, preset):
    if spec is None:
        spec = AlSalamCarlitzMeasure(Fraction(6, 5), Fraction(4, 5))
    base = base_of(spec)
    finite = isinstance(base, DiscreteMeasure)
    vals, tails = [], []
    for t in (-10, -1, 1, 10):
        v, tail = _flow.total_momentum(spec, t=t,
                                       n_trunc=None if finite else 48,
                                       digits=digits)
        vals.append(to_mpf(v))
        tails.append(to_mpf(tail))
    # the partial sums carry truncation tails; conservation is certified
    # when no pair of values differs by more than the two tail bounds allow
    with mp.workdps(work_digits(digits, 4)):
        scale = max(abs(v) for v in vals)
        excess = mp.mpf(0)
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                gap = abs(vals[i] - vals[j]) - tails[i] - tails[j]
                excess = max(excess, gap / scale)
    return [_check("total momentum drift beyond truncation tails "
                   "(t in [-10, 10])", excess, mp.mpf("1e-6"))]


def _suite_asympt(spec, digits, preset):
    checks = []
    # closed q-lattice forms vs the moment/Hankel pipeline
    asc = AlSalamCarlitzMeasure(Fraction(6, 5), Fraction(4, 5))
    profile, _ = _flow.snapshot(asc, t=0, n_peaks=6, digits=digits,
                                preset=preset)
    thr = mp.mpf(10) ** (-(digits // 3))
    worst = mp.mpf(0)
    with mp.workdps(work_digits(digits, 8)):
        for n in range(1, 7):
            xp, wp = _asympt.asc_profile(n, asc.a, asc.q, digits=digits)
            worst = max(worst, abs(to_mpf(profile.x[n - 1]) - to_mpf(xp.value)),
                        rel_err(to_mpf(profile.omega[n - 1]),
                                to_mpf(wp.value)))
    checks.append(_check("q-lattice closed forms n<=6", worst, thr))
    # discrete long-time limit, approached at rate e^{-|t|/4} here
    two = DiscreteMeasure([(1, 1), (2, 1)])
    prof, _ = _flow.snapshot(two, t=-80, digits=digits)
    worst = mp.mpf(0)
    with mp.workdps(work_digits(digits, 4)):
        for n in (1, 2):
            pred = _asympt.predict_discrete(two, n, -80, -1, digits=digits)
            worst = max(worst,
                        abs(to_mpf(prof.x[n - 1]) - to_mpf(pred["x_n"].value)),
                        abs(to_mpf(prof.omega[n - 1])
                            - to_mpf(pred["omega_n"].value)))
    checks.append(_check("discrete long-time limits at t=-80", worst,
                         mp.mpf("1e-6")))
    return checks


_SUITES = {
    "identities": lambda spec, d, p, k: _suite_identities(spec, d, p, k),
    "ode": lambda spec, d, p, k: _suite_ode(spec, d, p),
    "roundtrip": lambda spec, d, p, k: _suite_roundtrip(spec, d, p),
    "scaling": lambda spec, d, p, k: _suite_scaling(spec, d, p),
    "conservation": lambda spec, d, p, k: _suite_conservation(spec, d, p),
    "asympt": lambda spec, d, p, k: _suite_asympt(spec, d, p),
}


def _cmd_verify(args):
    spec = _load_measure(args.measure) if args.measure else None
    cfg = _config(args, [])
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    suites = []
    for name in names:
        checks = _SUITES[name](spec, cfg.digits, cfg.preset, args.k)
        suites.append({"suite": name,
                       "checks": checks,
                       "ok": all(c["status"] == "pass" for c in checks)})
    ok = all(s["ok"] for s in suites)
    doc = {"digits": cfg.digits, "suites": suites, "ok": ok}
    _emit([("verify.json", _json_text(doc))], cfg.out)
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# collisions


def _profile_measure(arg, digits):
    """Forward-map a peakon profile description to its spectral measure.

    The JSON object carries omega (weights, signs allowed), upsilon
    (optional dipoles) and positions as either exp_x (exact-friendly) or x.
    """
    obj = _load_json_arg(arg, "profile")
    if "omega" not in obj or ("x" not in obj and "exp_x" not in obj):
        raise ValidationError("profile JSON needs omega and x or exp_x")
    omega = [_parse_scalar(str(v), "omega") for v in obj["omega"]]
    ups = None
    if "upsilon" in obj:
        ups = [_parse_scalar(str(v), "upsilon") for v in obj["upsilon"]]
    if "exp_x" in obj:
        exp_x = [_parse_scalar(str(v), "exp_x") for v in obj["exp_x"]]
    else:
        with mp.workdps(work_digits(digits, len(omega) + 2)):
            exp_x = [+mp.exp(to_mpf(_parse_scalar(str(v), "x")))
                     for v in obj["x"]]
    for u, v in zip(exp_x, exp_x[1:]):
        if not to_mpf(v) > to_mpf(u):
            raise ValidationError("positions must increase")
    string = _forward.string_from_peakon_data(exp_x, omega, ups,
                                              digits=digits)
    weyl = _forward.weyl_from_string(string)
    measure, _ = _forward.measure_from_weyl(weyl, digits=digits)
    return measure


def _cmd_collide(args):
    if (args.measure is None) == (args.profile is None):
        raise ValidationError("collide needs exactly one of --measure or "
                              "--profile")
    cfg = _config(args, [])
    if args.profile is not None:
        spec = _profile_measure(args.profile, cfg.digits)
    else:
        spec = _load_measure(args.measure)
    lo, hi = (args.t_interval.split(":") + [""])[:2]
    lo = _parse_scalar(lo, "--t-interval")
    hi = _parse_scalar(hi, "--t-interval")
    scan = _flow.collision_scan(spec, args.k, (lo, hi), digits=cfg.digits)
    doc = {"k": scan["k"],
           "roots": [{"t": _fmt(r["t"]),
                      "bracket": [_fmt(r["bracket"][0]),
                                  _fmt(r["bracket"][1])],
                      "upsilon_mass": _fmt(r["upsilon_mass"])}
                     for r in scan["roots"]]}
    _emit([("collision.json", _json_text(doc))], cfg.out)
    return 0


# ---------------------------------------------------------------------------
# asymptotics


def _predictions_at(spec, base, t, n_peaks, digits):
    preds = []
    tf = to_mpf(t)
    sign = 1 if tf > 0 else -1

    def attach(pred):
        preds.append(replace(pred, t=t))

    if isinstance(base, DiscreteMeasure):
        if tf == 0:
            return preds
        for n in range(1, min(n_peaks, base.support_size) + 1):
            d = _asympt.predict_discrete(spec, n, t, sign, digits=digits)
            preds.extend([d["x_n"], d["omega_n"]])
        return preds
    if isinstance(base, AlSalamCarlitzMeasure):
        if tf == 0:
            for n in range(1, n_peaks + 1):
                xp, wp = _asympt.asc_profile(n, base.a, base.q, digits=digits)
                attach(xp), attach(wp)
        else:
            for n in range(1, n_peaks + 1):
                d = _asympt.predict_discrete(spec, n, t, sign, digits=digits)
                preds.extend([d["x_n"], d["omega_n"]])
        return preds
    if isinstance(base, LaguerreMeasure):
        mk = (lambda n: _asympt.predict_laguerre_profile(
                  n, base.gamma, base.alpha, digits=digits)) if tf == 0 \
             else (lambda n: _asympt.predict_laguerre_longtime(
                  n, t, base.gamma, base.alpha, digits=digits))
    elif isinstance(base, JacobiMeasure):
        mk = (lambda n: _asympt.predict_jacobi_profile(
                  n, base.a, base.b, base.alpha, digits=digits)) if tf == 0 \
             else (lambda n: _asympt.predict_jacobi_longtime(
                  n, t, base.a, base.b, base.alpha, digits=digits))
    else:
        raise ValidationError("no asymptotic predictors for %r" % (base,))
    xs = []
    for n in range(1, n_peaks + 1):
        xp, wp = mk(n)
        attach(xp), attach(wp)
        xs.append(replace(xp, t=t))
    for lo, hi in zip(xs, xs[1:]):
        preds.append(_asympt.gap_of(lo, hi))
    return preds


def _cmd_asympt(args):
    spec = _load_measure(args.measure)
    times = _parse_tgrid(args.t_grid)
    cfg = _config(args, times)
    base = base_of(spec)
    n_peaks = cfg.n_peaks
    if n_peaks is None:
        if not isinstance(base, DiscreteMeasure):
            raise ValidationError("--n-peaks is required for this spectrum")
        n_peaks = base.support_size
    preds = []
    for t in times:
        preds.extend(_predictions_at(spec, base, t, n_peaks, cfg.digits))
    traj = _flow.trajectory(spec, times, n_peaks=n_peaks, digits=cfg.digits,
                            preset=cfg.preset)
    rows = _asympt.compare(traj, preds)
    trends = _asympt.trend_exponents(rows)
    doc = {"digits": cfg.digits,
           "trend_exponents": {"%s n=%d" % key: (_fmt(v) if v is not None
                                                 else None)
                               for key, v in sorted(trends.items())}}
    artifacts = [
        ("trajectory.csv", _peakon_csv(zip(traj.times, traj.profiles))),
        ("comparison.csv", _comparison_csv(rows)),
        ("report.json", _json_text(doc)),
    ]
    _emit(artifacts, cfg.out)
    return 0


# ---------------------------------------------------------------------------
# roundtrip


def _cmd_roundtrip(args):
    spec = _load_measure(args.measure)
    t = _parse_scalar(args.t, "--t") if args.t is not None else Fraction(0)
    cfg = _config(args, [t])
    expected, recovered, at0 = _roundtrip_points(spec, t, cfg.digits,
                                                 cfg.preset)
    thr = mp.mpf(10) ** (-(cfg.digits // 3))
    pts = []
    worst = mp.mpf(0)
    with mp.workdps(work_digits(cfg.digits, len(expected) + 2)):
        for (le, ge), (lr, gr) in zip(expected, recovered):
            el = rel_err(to_mpf(le), to_mpf(lr))
            eg = rel_err(to_mpf(ge), to_mpf(gr))
            worst = max(worst, el, eg)
            pts.append({"lambda": _fmt(le), "lambda_recovered": _fmt(lr),
                        "gamma": _fmt(ge), "gamma_recovered": _fmt(gr),
                        "lambda_rel_err": _fmt(el), "gamma_rel_err": _fmt(eg)})
    ok = bool(worst <= thr)
    doc = {"t": _fmt(t), "digits": cfg.digits, "n_points": len(expected),
           "points": pts, "m_at_0": _fmt(at0), "worst_rel_err": _fmt(worst),
           "threshold": _fmt(thr), "ok": ok}
    _emit([("roundtrip.json", _json_text(doc))], cfg.out)
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# parser


def _add_common(p, fmt=True):
    p.add_argument("--digits", type=int, default=None,
                   help="working precision (default $PEAKON_DIGITS or 200)")
    p.add_argument("--out", default=None, metavar="DIR",
                   help="directory for output files (default: stdout)")
    p.add_argument("--preset", default=None, choices=PRESETS,
                   help="named accuracy preset for series truncations")
    if fmt:
        p.add_argument("--format", default="csv", choices=("csv", "json"))


def build_parser():
    ap = _Parser(prog="peakonflow",
                 description="high-precision conservative peakon flows from "
                             "spectral data")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("snapshot", help="profile (and u) at one time")
    ps.add_argument("--measure", required=True,
                    help="measure JSON (inline or a file path)")
    ps.add_argument("--t", default="0", help="time (exact decimal)")
    ps.add_argument("--n-peaks", type=int, default=None)
    ps.add_argument("--grid", default=None, metavar="A:B:STEP",
                    help="sample u on this x grid")
    ps.add_argument("--dump-hankel", default=None, metavar="NAME",
                    help="also write the determinant table CSV")
    ps.add_argument("--dump-ortho", default=None, metavar="NAME",
                    help="also write recurrence parameters / P_k(0) CSV")
    ps.add_argument("--gnuplot", action="store_true",
                    help="emit plot scripts next to the CSVs")
    _add_common(ps)
    ps.set_defaults(func=_cmd_snapshot)

    pt = sub.add_parser("trajectory", help="profiles over a time grid")
    pt.add_argument("--measure", required=True)
    pt.add_argument("--t-grid", required=True, metavar="A:B:STEP|T1,T2,...")
    pt.add_argument("--n-peaks", type=int, default=None)
    pt.add_argument("--gnuplot", action="store_true")
    _add_common(pt)
    pt.set_defaults(func=_cmd_trajectory)

    pv = sub.add_parser("verify", help="self-check suites (JSON report)")
    pv.add_argument("suite", choices=sorted(_SUITES) + ["all"])
    pv.add_argument("--measure", default=None,
                    help="run the suite against this measure instead of "
                         "the built-in examples")
    pv.add_argument("--k", type=int, default=6,
                    help="determinant order bound for the identities suite")
    _add_common(pv, fmt=False)
    pv.set_defaults(func=_cmd_verify)

    pc = sub.add_parser("collide", help="scan for peakon collisions")
    pc.add_argument("--measure", default=None)
    pc.add_argument("--profile", default=None,
                    help="peakon profile JSON (omega + x or exp_x); it is "
                         "forward-mapped to its measure first")
    pc.add_argument("--k", type=int, default=1,
                    help="index of the determinant whose zeros are scanned")
    pc.add_argument("--t-interval", default="-10:10", metavar="A:B")
    _add_common(pc, fmt=False)
    pc.set_defaults(func=_cmd_collide)

    pa = sub.add_parser("asympt", help="trajectory vs asymptotic predictions")
    pa.add_argument("--measure", required=True)
    pa.add_argument("--t-grid", required=True)
    pa.add_argument("--n-peaks", type=int, default=None)
    _add_common(pa, fmt=False)
    pa.set_defaults(func=_cmd_asympt)

    pr = sub.add_parser("roundtrip",
                        help="measure -> profile -> measure comparison")
    pr.add_argument("--measure", required=True)
    pr.add_argument("--t", default="0")
    _add_common(pr, fmt=False)
    pr.set_defaults(func=_cmd_roundtrip)

    return ap


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        print("peakonflow: error: %s" % e, file=sys.stderr)
        return 1
    except SystemExit as e:      # --help
        return 0 if e.code in (0, None) else 1
    try:
        return args.func(args)
    except _IOFailure as e:
        print("peakonflow: io error: %s" % e, file=sys.stderr)
        return 3
    except ValidationError as e:
        print("peakonflow: invalid input: %s" % e, file=sys.stderr)
        return 1
    except PeakonError as e:
        print("peakonflow: computation failed: %s" % e, file=sys.stderr)
        return 2
    except OSError as e:
        print("peakonflow: io error: %s" % e, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
