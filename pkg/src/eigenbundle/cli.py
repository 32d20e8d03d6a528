"""Command line front end: ``analyze``, ``theta``, ``construct`` and ``relations``.

Reports are ``key=value`` lines in a fixed order; the exit status is 0 on
success, 2 when a precondition fails (validation, infeasible input,
mismatched characteristic polynomials), 3 when the mesh is too coarse for a
trustworthy integer answer, and 64 for usage or configuration errors.

Scenario configs are JSON objects with the keys ``domain``, ``field``,
``tolerances`` and ``output``; for example::

    {"domain": {"kind": "sphere", "grid": "64x32"},
     "field": {"fixture": "A"},
     "tolerances": {"normal": 1e-9, "gap": 1e-6}}

Product domains use ``{"kind": "product", "grid": "16x8", "grid2": "16x8",
"basepoints": [[0, 0], [0, 0]]}`` together with a field carrying
``"pullback": "first"`` or ``"second"``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

from . import construct as cons
from .equivalence import diag_obstruction, theta, verdict
from .errors import DomainError, EigenbundleError, InconclusiveError, PreconditionError
from .fieldfile import read_field_file, write_field_file
from .geometry import ProductDomain, SphereGrid, first_factor, second_factor
from .matrixfield import TOL_GAP, TOL_NORMAL, MatrixField, validate
from .relations import (ProductOfSpheres, ProjectiveSpace, RingClass, Sphere,
                        cp_forced_diagonalizable, enumerate_admissible_n2, star_check,
                        symmetric_poly_check)
from .spectral import order_globally

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64

DEFAULT_GRID = "64x32"

_TOP_KEYS = {"domain", "field", "tolerances", "output"}
_DOMAIN_KEYS = {"kind", "grid", "grid2", "basepoints"}
_FIELD_KEYS = {"fixture", "file", "constructor", "params", "pullback"}
_TOL_KEYS = {"normal", "gap"}
_OUTPUT_KEYS = {"report"}
_CONSTRUCTORS = {"bloch", "clutching", "diagonal", "transplant"}


class UsageError(Exception):
    pass


class Report:
    """Ordered ``key=value`` lines."""

    def __init__(self):
        self.items = []

    def add(self, key, value):
        self.items.append((key, _fmt(value)))

    def get(self, key):
        for k, v in self.items:
            if k == key:
                return v
        raise KeyError(key)

    def text(self):
        return "".join(f"{k}={v}\n" for k, v in self.items)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.6e}"
    return str(v)


# ----------------------------------------------------------------- configs

@dataclass
class ScenarioConfig:
    domain: dict = field(default_factory=lambda: {"kind": "sphere"})
    field: dict = field(default_factory=dict)
    tol_normal: float = TOL_NORMAL
    tol_gap: float = TOL_GAP
    report_path: str | None = None


def _reject_unknown(section, data, allowed):
    if not isinstance(data, dict):
        raise UsageError(f"config section {section!r} must be an object")
    extra = set(data) - allowed
    if extra:
        raise UsageError(f"unknown key(s) in {section}: {', '.join(sorted(extra))}")


def parse_config(data):
    _reject_unknown("config", data, _TOP_KEYS)
    if "field" not in data:
        raise UsageError("config needs a 'field' section")
    dom = data.get("domain", {"kind": "sphere"})
    _reject_unknown("domain", dom, _DOMAIN_KEYS)
    fld = data["field"]
    _reject_unknown("field", fld, _FIELD_KEYS)
    if sum(k in fld for k in ("fixture", "file", "constructor")) != 1:
        raise UsageError("field needs exactly one of 'fixture', 'file', 'constructor'")
    tol = data.get("tolerances", {})
    _reject_unknown("tolerances", tol, _TOL_KEYS)
    out = data.get("output", {})
    _reject_unknown("output", out, _OUTPUT_KEYS)
    try:
        return ScenarioConfig(dict(dom), dict(fld), float(tol.get("normal", TOL_NORMAL)),
                              float(tol.get("gap", TOL_GAP)), out.get("report"))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad tolerance value: {exc}") from exc


def load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def parse_field_shorthand(text):
    """``fixture:A``, ``bloch:2``, ``clutching:2,-1,-1``, ``diagonal:3``, ``file:PATH``."""
    kind, _, arg = text.partition(":")
    if kind == "fixture":
        return {"fixture": arg}
    if kind == "file":
        return {"file": arg}
    if kind in ("bloch", "clutching", "diagonal"):
        return {"constructor": kind, "params": _int_list(arg) if arg else []}
    raise UsageError(f"unrecognized field {text!r}")


def _int_list(text):
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def parse_grid(text):
    try:
        nt, nph = (int(v) for v in str(text).lower().split("x"))
    except ValueError as exc:
        raise UsageError(f"grid must look like NTxNP, got {text!r}") from exc
    try:
        return SphereGrid(nt, nph)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from exc


def build_domain(dom, grid_override=None):
    kind = dom.get("kind", "sphere")
    grid = parse_grid(grid_override or dom.get("grid", DEFAULT_GRID))
    if kind == "sphere":
        return grid
    if kind == "product":
        grid2 = parse_grid(dom.get("grid2", grid_override or dom.get("grid", DEFAULT_GRID)))
        bp = dom.get("basepoints", [[0, 0], [0, 0]])
        try:
            p0, q0 = tuple(bp[0]), tuple(bp[1])
        except (TypeError, IndexError) as exc:
            raise UsageError("basepoints must be [[b, a], [b, a]]") from exc
        return ProductDomain(grid, grid2, p0, q0)
    raise UsageError(f"unknown domain kind {kind!r}")


def _sphere_field(fld, grid):
    if "fixture" in fld:
        name = str(fld["fixture"]).upper()
        if name not in ("A", "B"):
            raise UsageError(f"unknown fixture {fld['fixture']!r}")
        return cons.fixture_A(grid) if name == "A" else cons.fixture_B(grid)
    ctor = fld["constructor"]
    params = fld.get("params", [])
    if ctor not in _CONSTRUCTORS:
        raise UsageError(f"unknown constructor {ctor!r}")
    if ctor == "bloch":
        k = int(params[0]) if params else 1
        return cons.assemble(cons.default_profile(2), cons.bloch(k), grid)
    if ctor == "clutching":
        c = _int_list(params) if isinstance(params, str) else [int(v) for v in params]
        fam = cons.clutching(c)
        return cons.assemble(cons.default_profile(len(c)), fam, grid)
    if ctor == "diagonal":
        n = int(params[0]) if params else 2
        return cons.assemble(cons.default_profile(n), cons.coordinate_family(n), grid)
    # transplant: {"fixture": "A", "values": ["0", "1"]}
    if not isinstance(params, dict) or set(params) != {"fixture", "values"}:
        raise UsageError("transplant params need exactly 'fixture' and 'values'")
    base = _sphere_field({"fixture": params["fixture"]}, grid)
    try:
        values = [complex(str(v).replace(" ", "")) for v in params["values"]]
    except ValueError as exc:
        raise UsageError(f"bad eigenvalue in transplant: {exc}") from exc
    return cons.transplant(order_globally(base), cons.constant_profile(values))


def build_field(cfg, grid_override=None):
    """Return ``(field, domain)`` for a scenario."""
    fld = cfg.field
    if "file" in fld:
        if cfg.domain.get("kind", "sphere") != "sphere":
            raise UsageError("field files are sphere fields")
        grid, values = read_field_file(fld["file"])
        if grid_override and parse_grid(grid_override) != grid:
            raise UsageError("--grid disagrees with the grid stored in the field file")
        return MatrixField.from_samples(grid, values, name=os.path.basename(fld["file"])), grid
    domain = build_domain(cfg.domain, grid_override)
    if isinstance(domain, ProductDomain):
        side = fld.get("pullback")
        if side not in ("first", "second"):
            raise UsageError("product domains need field.pullback = 'first' or 'second'")
        grid = domain.first if side == "first" else domain.second
        base = _sphere_field(fld, grid)
        f = first_factor if side == "first" else second_factor
        return cons.pullback(base, f, domain), domain
    if "pullback" in fld:
        raise UsageError("pullback only applies to product domains")
    return _sphere_field(fld, domain).with_domain(domain), domain


# --------------------------------------------------------------- reporting

def _describe_domain(rep, domain):
    if isinstance(domain, ProductDomain):
        rep.add("domain", "product")
        rep.add("grid", f"{domain.first.n_theta}x{domain.first.n_phi}")
        rep.add("grid2", f"{domain.second.n_theta}x{domain.second.n_phi}")
        rep.add("basepoints", f"{domain.basepoint_first}|{domain.basepoint_second}".replace(" ", ""))
    else:
        rep.add("domain", "sphere")
        rep.add("grid", f"{domain.n_theta}x{domain.n_phi}")


def _validation(rep, A, tol_n, tol_g, prefix=""):
    v = validate(A, tol_n, tol_g)
    rep.add(prefix + "normality_residual", v.normality_residual)
    rep.add(prefix + "normal", v.normal)
    rep.add(prefix + "min_gap", v.min_gap)
    rep.add(prefix + "multiplicity_free", v.multiplicity_free)
    return v


def _finish(rep, code, status):
    rep.add("status", status)
    rep.add("exit_status", code)
    return rep, code


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run_analyze(cfg, grid_override=None):
    rep = Report()
    rep.add("command", "analyze")
    A, domain = build_field(cfg, grid_override)
    _describe_domain(rep, domain)
    rep.add("n", A.n)
    rep.add("tol_normal", cfg.tol_normal)
    rep.add("tol_gap", cfg.tol_gap)
    v = _validation(rep, A, cfg.tol_normal, cfg.tol_gap)
    if not v.passed:
        return _finish(rep, EXIT_PRECONDITION, "validation_failed")
    try:
        sd = order_globally(A, domain, strict=False)
        rep.add("ordering_certificate", "pass" if sd.certificate.passed else "fail")
        rep.add("ordering_max_edge_ratio", sd.certificate.max_edge_ratio)
        if not sd.certificate.passed:
            rep.add("message", "no continuous eigenvalue ordering at this resolution; retry finer")
            return _finish(rep, EXIT_INCONCLUSIVE, "inconclusive")
        inv = diag_obstruction(sd)
    except InconclusiveError as exc:
        rep.add("message", str(exc))
        return _finish(rep, EXIT_INCONCLUSIVE, "inconclusive")
    labels = inv.labels
    for cv in inv.bands:
        for j, (p, r) in enumerate(zip(cv.pairings, cv.residuals), start=1):
            rep.add(f"band{cv.band + 1}_cycle{j}", p)
            rep.add(f"band{cv.band + 1}_cycle{j}_residual", float(r))
    for j, label in enumerate(labels, start=1):
        rep.add(f"cycle{j}_label", label)
        rep.add(f"cycle{j}_band_sum", int(inv.components[:, j - 1].sum()))
    if not inv.conclusive:
        return _finish(rep, EXIT_INCONCLUSIVE, "inconclusive")
    vd = verdict(inv)
    rep.add("diagonalizable", vd.holds)
    rep.add("witness", _witness(vd))
    return _finish(rep, EXIT_OK, "ok")


def _witness(vd):
    return ",".join(f"band{b}:{label}:{p}" for b, label, p in vd.witness) or "none"


def run_theta(cfg_a, cfg_b, grid_override=None):
    rep = Report()
    rep.add("command", "theta")
    A, dom_a = build_field(cfg_a, grid_override)
    B, dom_b = build_field(cfg_b, grid_override)
    _describe_domain(rep, dom_a)
    rep.add("n", A.n)
    rep.add("tol_normal", cfg_a.tol_normal)
    rep.add("tol_gap", cfg_a.tol_gap)
    if dom_a != dom_b or A.n != B.n:
        rep.add("message", "theta undefined: fields live on different domains")
        return _finish(rep, EXIT_PRECONDITION, "precondition_failed")
    va = _validation(rep, A, cfg_a.tol_normal, cfg_a.tol_gap, "a_")
    vb = _validation(rep, B, cfg_a.tol_normal, cfg_a.tol_gap, "b_")
    if not (va.passed and vb.passed):
        return _finish(rep, EXIT_PRECONDITION, "validation_failed")
    try:
        sa = order_globally(A, dom_a)
        sb = order_globally(B, dom_b)
        inv = theta(sa, sb)
    except DomainError as exc:
        rep.add("message", str(exc))
        return _finish(rep, EXIT_PRECONDITION, "precondition_failed")
    except InconclusiveError as exc:
        rep.add("message", str(exc))
        return _finish(rep, EXIT_INCONCLUSIVE, "inconclusive")
    single = len(inv.labels) == 1
    for cv in inv.bands:
        i = cv.band + 1
        if single:
            rep.add(f"theta_band{i}", cv.pairings[0])
        for j, (p, r) in enumerate(zip(cv.pairings, cv.residuals), start=1):
            rep.add(f"theta_band{i}_cycle{j}", p)
            rep.add(f"theta_band{i}_cycle{j}_residual", float(r))
    if not inv.conclusive:
        return _finish(rep, EXIT_INCONCLUSIVE, "inconclusive")
    vd = verdict(inv)
    rep.add("equivalent", vd.holds)
    rep.add("witness", _witness(vd))
    return _finish(rep, EXIT_OK, "ok")


def run_construct(kind, params, grid, out):
    rep = Report()
    rep.add("command", "construct")
    rep.add("kind", kind)
    if kind == "fixture":
        fld = {"fixture": params or "A"}
    elif kind in ("bloch", "clutching", "diagonal"):
        fld = {"constructor": kind, "params": _int_list(params) if params else []}
        rep.add("params", ",".join(str(v) for v in fld["params"]))
    else:
        raise UsageError(f"unknown construction kind {kind!r}")
    try:
        A = _sphere_field(fld, grid)
    except PreconditionError as exc:
        rep.add("message", str(exc))
        return _finish(rep, EXIT_PRECONDITION, "precondition_failed")
    write_field_file(out, grid, A.sample(grid))
    rep.add("grid", f"{grid.n_theta}x{grid.n_phi}")
    rep.add("n", A.n)
    rep.add("out", out)
    return _finish(rep, EXIT_OK, "ok")


_RINGS = {"S2": Sphere, "S2xS2": ProductOfSpheres}


def run_relations(args):
    rep = Report()
    rep.add("command", "relations")
    if args.star is not None:
        res = star_check(*args.star)
        rep.add("star_args", ",".join(str(v) for v in args.star))
        rep.add("star_holds", res.holds)
        rep.add("star_lhs", res.lhs)
    if args.enumerate_n2:
        pairs = enumerate_admissible_n2(args.bound)
        rep.add("enumerate_n2_bound", args.bound)
        rep.add("enumerate_n2_count", len(pairs))
        rep.add("enumerate_n2", ";".join(f"{k},{l}" for k, l in pairs))
    if args.cp is not None:
        res = cp_forced_diagonalizable(args.cp, _int_list(args.coeffs or ""))
        rep.add("cp_m", args.cp)
        rep.add("cp_feasible", res.feasible)
        rep.add("cp_sum_squares", res.sum_squares)
        rep.add("cp_reason", res.reason)
    if args.classes is not None:
        if args.ring.startswith("CP"):
            model = ProjectiveSpace(int(args.ring[2:]))
        elif args.ring in _RINGS:
            model = _RINGS[args.ring]()
        else:
            raise UsageError(f"unknown ring {args.ring!r}")
        try:
            classes = [RingClass(model, 2, _int_list(c)) for c in args.classes.split(";")]
        except PreconditionError as exc:
            raise UsageError(str(exc)) from exc
        res = symmetric_poly_check(classes)
        rep.add("ring", model.name)
        rep.add("s1", ",".join(map(str, res.s1.coeffs)))
        rep.add("s2", ",".join(map(str, res.s2.coeffs)) or "0")
        rep.add("s1_ok", res.s1_ok)
        rep.add("s2_ok", res.s2_ok)
        rep.add("symmetric_ok", res.ok)
    if len(rep.items) == 1:
        raise UsageError("relations needs at least one of --star, --enumerate-n2, --cp, --classes")
    return _finish(rep, EXIT_OK, "ok")


# ---------------------------------------------------------------- argparse

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    # both flags feed one list so that command-line order fixes which field is A and which B
    p.add_argument("--config", dest="scenarios", action="append", default=[],
                   type=lambda v: ("config", v), help="JSON scenario config")
    p.add_argument("--field", dest="scenarios", action="append",
                   type=lambda v: ("field", v), help="field shorthand: fixture:A, bloch:K, clutching:C1,C2,..., diagonal:N, file:PATH")
    p.add_argument("--grid", help="sphere grid NTxNP (overrides the config)")
    p.add_argument("--tol-normal", type=float)
    p.add_argument("--tol-gap", type=float)
    p.add_argument("--out", help="also write the report to this path")


def make_parser():
    parser = _Parser(prog="eigenbundle", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _common(sub.add_parser("analyze", help="diagonalizability obstructions of one field"))
    _common(sub.add_parser("theta", help="unitary-equivalence invariant of two fields"))
    pc = sub.add_parser("construct", help="sample a constructed field to a field file")
    pc.add_argument("kind", choices=["fixture", "bloch", "clutching", "diagonal"])
    pc.add_argument("--params", default="", help="A|B, K, C1,C2,..., or N")
    pc.add_argument("--grid", default=DEFAULT_GRID)
    pc.add_argument("--out", required=True)
    pr = sub.add_parser("relations", help="cohomological relations on Chern tuples")
    pr.add_argument("--star", type=int, nargs=4, metavar=("K1", "K2", "L1", "L2"))
    pr.add_argument("--enumerate-n2", action="store_true")
    pr.add_argument("--bound", type=int, default=1)
    pr.add_argument("--cp", type=int, metavar="M")
    pr.add_argument("--coeffs")
    pr.add_argument("--ring", default="S2xS2", help="S2, S2xS2 or CP<m>")
    pr.add_argument("--classes", help="degree-2 classes, e.g. '1,0;-1,0'")
    pr.add_argument("--out")
    return parser


def _scenarios(args):
    cfgs = [load_config(v) if kind == "config" else ScenarioConfig(field=parse_field_shorthand(v))
            for kind, v in args.scenarios]
    for c in cfgs:
        if args.tol_normal is not None:
            c.tol_normal = args.tol_normal
        if args.tol_gap is not None:
            c.tol_gap = args.tol_gap
    return cfgs


def run(argv=None):
    """Parse ``argv`` and return ``(report_text, exit_code)``."""
    try:
        args = make_parser().parse_args(argv)
        report_path = getattr(args, "out", None)
        if args.command == "analyze":
            cfgs = _scenarios(args)
            if len(cfgs) != 1:
                raise UsageError("analyze takes exactly one --config or --field")
            rep, code = run_analyze(cfgs[0], args.grid)
            report_path = report_path or cfgs[0].report_path
        elif args.command == "theta":
            cfgs = _scenarios(args)
            if len(cfgs) != 2:
                raise UsageError("theta takes exactly two fields (--config/--field, A then B)")
            rep, code = run_theta(cfgs[0], cfgs[1], args.grid)
            report_path = report_path or cfgs[0].report_path
        elif args.command == "construct":
            rep, code = run_construct(args.kind, args.params, parse_grid(args.grid), args.out)
            report_path = None
        else:
            rep, code = run_relations(args)
    except (UsageError, OSError) as exc:
        return f"error={exc}\nexit_status={EXIT_USAGE}\n", EXIT_USAGE
    except PreconditionError as exc:
        return f"error={exc}\nexit_status={EXIT_PRECONDITION}\n", EXIT_PRECONDITION
    except InconclusiveError as exc:
        return f"error={exc}\nexit_status={EXIT_INCONCLUSIVE}\n", EXIT_INCONCLUSIVE
    except EigenbundleError as exc:
        return f"error={exc}\nexit_status={EXIT_INCONCLUSIVE}\n", EXIT_INCONCLUSIVE
    text = rep.text()
    if report_path:
        _write_atomic(report_path, text)
    return text, code


def main(argv=None):
    text, code = run(argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_PRECONDITION, EXIT_INCONCLUSIVE) else sys.stderr
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
