"""The analysis pipeline: solve -> certify -> select -> expand -> estimate (-> oracle).

``run`` never raises for a failed hypothesis; it returns a ``Report`` whose
``diagnostic`` names the failing stage.  Reports hold JSON-native data only,
so serialisation is lossless and a report can be re-read with ``Report.from_dict``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath

from .asymptotics import (AsymptoticExpansion, Estimate, evaluate, gamma_recip_derivs,
                          leading_asymptotic, local_geometry, rank_candidates)
from .backend import DEFAULT_PRECISION_BITS, BigFloat, ExactRational
from .errors import AnalysisError, NonSmoothPoint, NoPositiveSolution, NotMinimal, ParseError
from .oracle import (NARAYANA_H, GFSpec, GFTerm, catalan_log_spec, coefficient,
                     interlaced_spec, narayana_log_spec, necklace_spec, spec_series)
from .poly import BiPoly
from .polysys import (TORUS_CAVEAT, CriticalPointRecord, Direction, MinimalStatus,
                      check_minimal, check_smooth, singular_real_points, solve_critical)

EXAMPLES = ("necklace", "interlaced", "narayana-log", "catalan-log")
DEFAULT_NECKLACE_ANALYSIS_KMAX = 5
REPORT_KEYS = ("request", "critical_points", "geometry", "expansion", "rows", "warnings",
               "selected_term", "status", "diagnostic")


@dataclass
class AnalysisRequest:
    spec: GFSpec | None = None
    example: str | None = None
    direction: Direction | None = None
    targets: list = field(default_factory=list)
    oracle: bool = False
    oracle_box: tuple | None = None
    precision_bits: int = DEFAULT_PRECISION_BITS
    minimality_grid: int = 64
    ell: Fraction | None = None
    m: int = 2
    rpower: int = 1
    kmax: int = DEFAULT_NECKLACE_ANALYSIS_KMAX

    def __post_init__(self):
        if (self.spec is None) == (self.example is None):
            raise ValueError("give exactly one of spec or example")
        if self.example is not None and self.example not in EXAMPLES:
            raise ValueError(f"unknown example {self.example!r}; choose from {', '.join(EXAMPLES)}")
        self.targets = [tuple(int(v) for v in t) for t in self.targets]
        if self.direction is None:
            self.direction = _default_direction(self.example, self.ell)

    def to_dict(self) -> dict:
        return {
            "spec": spec_to_dict(self.spec) if self.spec is not None else None,
            "example": self.example,
            "ell": None if self.ell is None else str(self.ell),
            "direction": None if self.direction is None else str(self.direction),
            "targets": [list(t) for t in self.targets],
            "oracle": self.oracle,
            "oracle_box": None if self.oracle_box is None else list(self.oracle_box),
            "precision_bits": self.precision_bits,
            "minimality_grid": self.minimality_grid,
            "m": self.m,
            "rpower": self.rpower,
            "kmax": self.kmax,
        }


def _default_direction(example, ell):
    if example is None or example == "catalan-log":
        return None
    if ell is None:
        ell = {"necklace": 3, "interlaced": 1, "narayana-log": 2}[example]
    ell = Fraction(ell)
    if example == "interlaced":
        return Direction(ell.denominator, ell.numerator)
    return Direction(ell.numerator, ell.denominator)


# ---------------------------------------------------------------------------
# spec files

def spec_to_dict(spec: GFSpec) -> dict:
    return {"name": spec.name,
            "terms": [{"weight": str(t.weight), "H": str(t.H), "alpha": str(t.alpha),
                       "beta": t.beta} for t in spec.terms]}


def spec_from_dict(data, where: str = "spec") -> GFSpec:
    if not isinstance(data, dict):
        raise ParseError(f"{where}: expected an object")
    terms = data.get("terms")
    if not isinstance(terms, list) or not terms:
        raise ParseError(f"{where}: field 'terms' must be a nonempty list")
    out = []
    for i, t in enumerate(terms):
        ctx = f"{where}: terms[{i}]"
        if not isinstance(t, dict):
            raise ParseError(f"{ctx}: expected an object")
        for key in ("weight", "H", "alpha", "beta"):
            if key not in t:
                raise ParseError(f"{ctx}: missing field '{key}'")
        try:
            weight = Fraction(str(t["weight"]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{ctx}: field 'weight' is not a rational: {t['weight']!r}") from None
        try:
            alpha = Fraction(str(t["alpha"]))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{ctx}: field 'alpha' is not a rational or decimal: {t['alpha']!r}") from None
        beta = t["beta"]
        if isinstance(beta, bool) or not isinstance(beta, int) or beta < 0:
            raise ParseError(f"{ctx}: field 'beta' must be a nonnegative integer")
        try:
            H = BiPoly.parse(t["H"])
        except ParseError as exc:
            raise ParseError(f"{ctx}: field 'H': {exc}") from None
        try:
            out.append(GFTerm(weight, H, alpha, beta))
        except ValueError as exc:
            raise ParseError(f"{ctx}: {exc}") from None
    return GFSpec(out, str(data.get("name", "")))


def parse_spec(path) -> GFSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return spec_from_dict(data, str(path))


# ---------------------------------------------------------------------------
# reports

def _num(v) -> float:
    return float(v)


def _big(v) -> dict:
    e = v if isinstance(v, Estimate) else Estimate.from_value(v)
    return {"mantissa": e.mantissa, "exp10": e.exponent}


def _mp(v):
    if v is None:
        return None
    name = type(v).__name__
    if name == "mpq" or isinstance(v, Fraction):
        return mpmath.mpf(int(v.numerator)) / int(v.denominator)
    if name == "mpfr":
        return mpmath.mpf(str(v))
    return mpmath.mpf(v)


def _point_str(c: Fraction, digits: int = 40) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    with mpmath.workprec(4 * digits):
        return mpmath.nstr(mpmath.mpf(c.numerator) / c.denominator, digits)


def _describe_point(rec: CriticalPointRecord) -> str:
    if rec.is_exact:
        return f"({rec.p}, {rec.q})"
    return rec.describe()


@dataclass
class Report:
    request: dict
    critical_points: list = field(default_factory=list)
    geometry: dict | None = None
    expansion: dict | None = None
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    selected_term: int | None = None
    status: str = "ok"
    diagnostic: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in REPORT_KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(**{k: data.get(k) for k in REPORT_KEYS})

    def fail(self, stage: str, exc: Exception) -> "Report":
        self.status = "failed"
        self.diagnostic = {"stage": stage, "error": type(exc).__name__, "message": str(exc)}
        return self


def expansion_to_dict(e: AsymptoticExpansion) -> dict:
    return {
        "alpha": str(e.alpha),
        "beta": e.beta,
        "prefactor": _num(e.prefactor),
        "corrections": [_num(c) for c in e.corrections],
        "r_exponent": str(e.r_exponent),
        "log_power": e.log_power,
        "p": mpmath.nstr(e.p, 40),
        "q": mpmath.nstr(e.q, 40),
        "zero_alpha_branch": e.zero_alpha_branch,
    }


def expansion_from_dict(d: dict, direction: Direction | None = None) -> AsymptoticExpansion:
    with mpmath.workprec(160):
        return AsymptoticExpansion(
            alpha=Fraction(d["alpha"]), beta=int(d["beta"]),
            p=mpmath.mpf(d["p"]), q=mpmath.mpf(d["q"]),
            prefactor=mpmath.mpf(d["prefactor"]),
            corrections=tuple(mpmath.mpf(c) for c in d["corrections"]),
            zero_alpha_branch=bool(d["zero_alpha_branch"]),
            r_exponent=Fraction(d["r_exponent"]), log_power=int(d["log_power"]),
            direction=direction)


def recompute_estimate(report: Report | dict, r: int, s: int) -> Estimate:
    """Estimate at (r, s) from the parameters recorded in a report alone."""
    data = report.to_dict() if isinstance(report, Report) else report
    return evaluate(expansion_from_dict(data["expansion"]), r, s, check_direction=False)


# ---------------------------------------------------------------------------
# pipeline

class _Stage:
    """Tag AnalysisErrors with the pipeline stage they were raised in."""

    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, et, ev, tb):
        if ev is not None and isinstance(ev, AnalysisError) and ev.stage is None:
            ev.stage = self.name
        return False


def _analysis_terms(req: AnalysisRequest, report: Report) -> list[GFTerm]:
    if req.spec is not None:
        return list(req.spec.terms)
    if req.example == "interlaced":
        return list(interlaced_spec().terms)
    if req.example == "necklace":
        report.warnings.append(
            f"necklace: critical points computed for k <= {req.kmax}; the k-th term's point is "
            f"(p1^(1/k), q1^(1/k)), so its growth rate is the k-th root of the k = 1 rate")
        return list(necklace_spec(req.kmax).terms)
    raise AssertionError(req.example)


def _oracle_spec(req: AnalysisRequest) -> GFSpec:
    if req.spec is not None:
        return req.spec
    if req.example == "interlaced":
        return interlaced_spec()
    rmax = max([r for r, _ in req.targets] + [1])
    if req.oracle_box:
        rmax = max(rmax, req.oracle_box[0])
    return necklace_spec(rmax)


def _check_targets(req: AnalysisRequest, report: Report):
    d = req.direction
    for r, s in req.targets:
        if d is None:
            continue
        if s != d.on_ray(r):
            raise NotOnRay(f"target ({r}, {s}) is not on the ray {d}: s should be {d.on_ray(r)}")
        if Fraction(r * d.r2, d.r1) != s:
            report.warnings.append(f"target ({r}, {s}): s = round(r*{d.r2}/{d.r1}) applied")


class NotOnRay(AnalysisError):
    pass


def _locate(req: AnalysisRequest, terms: list[GFTerm], report: Report):
    """Critical points of every term, certified; returns the selected (index, record)."""
    d = req.direction
    candidates = []
    for idx, term in enumerate(terms):
        with _Stage("solve"):
            try:
                recs = solve_critical(term.H, d)
            except NoPositiveSolution:
                continue
        for rec in recs:
            with _Stage("smooth"):
                smooth = check_smooth(term.H, rec)
            status = None
            if smooth:
                with _Stage("minimal"):
                    status = check_minimal(term.H, rec, req.minimality_grid)
            rec = replace(rec, smooth=smooth, minimal_status=status, source_term=idx)
            report.critical_points.append({
                "term": idx, "p": _point_str(rec.p), "q": _point_str(rec.q),
                "smooth": smooth, "minimal": status.value if status else None})
            if status is not MinimalStatus.FAILED:
                candidates.append((idx, rec))
    if not candidates:
        if report.critical_points:
            raise NotMinimal("every positive critical point failed the minimality check")
        raise NoPositiveSolution(f"no term has a positive critical point in direction {d}")
    with _Stage("select"):
        idx, rec = rank_candidates(candidates, d)[0]
    report.selected_term = idx
    if not rec.smooth:
        exc = NonSmoothPoint(f"smoothness check failed at {_describe_point(rec)}: "
                             "H, H_x and H_y vanish together")
        exc.stage = "smooth"
        raise exc
    if rec.minimal_status is MinimalStatus.ASSUMED:
        report.warnings.append(f"minimality at {_describe_point(rec)} is Assumed: "
                               "some grid cells were inconclusive")
    elif rec.minimal_status is MinimalStatus.VERIFIED:
        report.warnings.append(TORUS_CAVEAT)
    with _Stage("smooth"):
        try:
            sing = singular_real_points(terms[idx].H)
        except AnalysisError:
            sing = None
    if sing:
        report.warnings.append(f"term {idx}: H has {len(sing)} real nonsmooth point(s) elsewhere")
    elif sing is None:
        report.warnings.append(f"term {idx}: global nonsmoothness check was inconclusive")
    return idx, rec


def _geometry_dict(g) -> dict:
    return {"chi1": _num(g.chi1), "chi2": _num(g.chi2), "M": _num(g.M), "hx": _num(g.hx)}


def _theorem_expansion(req, report):
    terms = _analysis_terms(req, report)
    idx, rec = _locate(req, terms, report)
    term = terms[idx]
    with _Stage("geometry"):
        geom = local_geometry(term.H, rec, req.direction)
    report.geometry = _geometry_dict(geom)
    with _Stage("expansion"):
        return leading_asymptotic(geom, term.alpha, term.beta, req.direction).scaled(term.weight)


def _narayana_expansion(req, report):
    """sqrt(H) carries the dominant singularity of log^r N: near (p, q),
    log^r N = log^r(A/(2p)) - r log^(r-1)(A/(2p)) sqrt(H)/A + ...  with A = 1 + p - pq,
    and sqrt(H) = H^(-alpha) with alpha = -1/2, beta = 0."""
    term = GFTerm(1, NARAYANA_H, Fraction(-1, 2), 0)
    idx, rec = _locate(req, [term], report)
    with _Stage("geometry"):
        geom = local_geometry(term.H, rec, req.direction)
    report.geometry = _geometry_dict(geom)
    with mpmath.workprec(128):
        p, q = geom.p, geom.q
        A = 1 + p - p * q
        weight = -req.rpower * mpmath.log(A / (2 * p)) ** (req.rpower - 1) / A
    report.warnings.append(
        "narayana-log: the dominant singularity is the algebraic branch point of N; the estimate "
        "applies the alpha = -1/2, beta = 0 case to the sqrt(H) term of log^r N")
    with _Stage("expansion"):
        return leading_asymptotic(geom, term.alpha, 0, req.direction).scaled(weight)


def _catalan_expansion(req, report):
    """D^(m) = log^m 2 - m log^(m-1) 2 sqrt(1 - 4z) + O(1 - 4z) at z = 1/4, and
    [z^n] sqrt(1 - 4z) ~ 4^n n^(-3/2) / Gamma(-1/2)."""
    with mpmath.workprec(128):
        c = -req.m * mpmath.log(2) ** (req.m - 1)
        prefactor = c * gamma_recip_derivs(Fraction(-1, 2), 0)[0]
    report.warnings.append(
        "catalan-log: univariate example; the only singularity is z = 1/4 from sqrt(1 - 4z)")
    return AsymptoticExpansion(Fraction(-1, 2), 0, mpmath.mpf(1) / 4, mpmath.mpf(1), prefactor,
                               (), False, Fraction(-3, 2), 0, None)


def _oracle_values(req: AnalysisRequest) -> list:
    bits = req.precision_bits
    targets = req.targets
    if req.example == "catalan-log":
        R = max(r for r, _ in targets)
        if req.oracle_box:
            R = max(R, req.oracle_box[0])
        D = catalan_log_spec(req.m, R, BigFloat(bits))
        return [D[r] if s == 0 else 0 for r, s in targets]
    if req.example == "narayana-log":
        Rx = max(r for r, _ in targets)
        Sy = max(s for _, s in targets)
        if req.oracle_box:
            Rx, Sy = max(Rx, req.oracle_box[0]), max(Sy, req.oracle_box[1])
        be = ExactRational() if req.rpower == 1 else BigFloat(bits)
        T = narayana_log_spec(req.rpower, Rx, Sy, be)
        return [T[r, s] for r, s in targets]
    spec = _oracle_spec(req)
    backend = ExactRational() if spec.exact_ok() else BigFloat(bits)
    if req.oracle_box:
        Rx, Sy = req.oracle_box
        if any(r > Rx or s > Sy for r, s in targets):
            raise NotOnRay(f"oracle box {req.oracle_box} does not contain every target")
        T = spec_series(spec, Rx, Sy, backend)
        return [T[r, s] for r, s in targets]
    return [coefficient(spec, r, s, backend) for r, s in targets]


def run(req: AnalysisRequest) -> Report:
    report = Report(request=req.to_dict())
    stage = "parse"
    try:
        with _Stage("targets"):
            _check_targets(req, report)
        if req.example == "catalan-log":
            if any(s != 0 for _, s in req.targets):
                raise NotOnRay("catalan-log is univariate: targets must be (n, 0)")
            expansion = _catalan_expansion(req, report)
        elif req.example == "narayana-log":
            expansion = _narayana_expansion(req, report)
        else:
            expansion = _theorem_expansion(req, report)
        report.expansion = expansion_to_dict(expansion)
        oracle = [None] * len(req.targets)
        if req.oracle and req.targets:
            with _Stage("oracle"):
                oracle = _oracle_values(req)
        for (r, s), ov in zip(req.targets, oracle):
            with _Stage("evaluate"):
                est = evaluate(expansion, r, s, check_direction=False)
            row = {"r": r, "s": s, "estimate": _big(est), "oracle": None, "relative_error": None}
            if ov is not None:
                with mpmath.workprec(256):
                    o = _mp(ov)
                    row["oracle"] = _big(o)
                    if o != 0:
                        row["relative_error"] = _num(abs(est.value - o) / abs(o))
            report.rows.append(row)
    except AnalysisError as exc:
        return report.fail(exc.stage or stage, exc)
    return report


# ---------------------------------------------------------------------------
# output

def _fmt_big(b):
    return "" if b is None else f"{b['mantissa']:.6f}e{b['exp10']:+d}"


def emit(report: Report, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "s", "estimate_mantissa", "estimate_exp10", "oracle_mantissa",
                    "oracle_exp10", "rel_error"])
        for row in report.rows:
            o = row["oracle"]
            w.writerow([row["r"], row["s"], repr(row["estimate"]["mantissa"]),
                        row["estimate"]["exp10"],
                        "" if o is None else repr(o["mantissa"]),
                        "" if o is None else o["exp10"],
                        "" if row["relative_error"] is None else repr(row["relative_error"])])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    req = report.request
    lines = [f"analysis: {req.get('example') or (req.get('spec') or {}).get('name') or 'spec'}"
             f"   direction {req.get('direction')}   status {report.status}"]
    if report.diagnostic:
        d = report.diagnostic
        lines.append(f"FAILED at stage '{d['stage']}': {d['error']}: {d['message']}")
    if report.critical_points:
        lines.append("critical points:")
        lines.append(f"  {'term':>4}  {'p':<24} {'q':<24} {'smooth':<7} minimal")
        for cp in report.critical_points:
            lines.append(f"  {cp['term']:>4}  {cp['p'][:24]:<24} {cp['q'][:24]:<24} "
                         f"{str(cp['smooth']):<7} {cp['minimal']}")
    if report.selected_term is not None:
        lines.append(f"selected term: {report.selected_term}")
    if report.geometry:
        g = report.geometry
        lines.append("geometry: " + "  ".join(f"{k}={g[k]:.12g}" for k in ("chi1", "chi2", "M", "hx")))
    if report.expansion:
        e = report.expansion
        corr = ", ".join(f"{c:.10g}" for c in e["corrections"]) or "none"
        lines.append(f"expansion: alpha={e['alpha']} beta={e['beta']} prefactor={e['prefactor']:.12g}"
                     f" r^{e['r_exponent']} log^{e['log_power']} corrections=[{corr}]")
    if report.rows:
        lines.append(f"  {'r':>6} {'s':>6}  {'estimate':>16}  {'oracle':>16}  rel_error")
        for row in report.rows:
            rel = "" if row["relative_error"] is None else f"{row['relative_error']:.6g}"
            lines.append(f"  {row['r']:>6} {row['s']:>6}  {_fmt_big(row['estimate']):>16}  "
                         f"{_fmt_big(row['oracle']):>16}  {rel}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
