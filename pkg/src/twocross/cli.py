"""Command-line front end: ``twocross <subcommand> ...``.

Model files are line oriented::

    # comment
    param a = 0.25
    field ++ : -1 + x1^2, -1 + x2^2, x3
    field +- : ...

Exit status is 0 on success, 2 when the analysis is undetermined and 1 on
errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .codim2 import SLIDING, UNDETERMINED, axis_verdict, constant_approximation
from .expr import ExpressionError
from .fields import CUBIC, IDENTITY, SIGNS, PiecewiseField, SmoothField3, parse_sign_label, sign_label, stratum_of
from .filippov import SLIDING as SLIDING1, classify_codim1, sliding_field_codim1
from .integrator import convergence_probe, integrate_piecewise, integrate_regularized
from .quadratic import (
    QuadSystem,
    affine_normalize,
    bifurcation_region,
    bt_normal_form,
    saddle_node_discriminant,
)
from .regularization import (
    POINTWISE,
    STRICT,
    UNNORMALIZED,
    DegenerateLambda,
    Regime,
    canonical_csist4,
    canonical_csist5,
    reduced_bilinear_system,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDETERMINED = 2


class ModelError(ValueError):
    pass


_FIELD_RE = re.compile(r"^field\s+([+-]{2})\s*:\s*(.*)$")
_PARAM_RE = re.compile(r"^param\s+([A-Za-z_]\w*)\s*=\s*(\S+)\s*$")


def _split_components(text: str) -> list[str]:
    """Split on top-level commas (commas inside parentheses are kept)."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_model_text(text: str, source: str = "<model>") -> PiecewiseField:
    params: dict[str, float] = {}
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        m = _PARAM_RE.match(line)
        if m:
            try:
                params[m.group(1)] = float(m.group(2))
            except ValueError:
                raise ModelError(f"{where}: bad number {m.group(2)!r}") from None
            continue
        m = _FIELD_RE.match(line)
        if not m:
            raise ModelError(f"{where}: expected 'field <s> : e1, e2, e3' or 'param <name> = <number>'")
        s = parse_sign_label(m.group(1))
        if s in fields:
            raise ModelError(f"{where}: duplicate quadrant {m.group(1)}")
        comps = _split_components(m.group(2))
        if len(comps) != 3:
            raise ModelError(f"{where}: quadrant {m.group(1)} needs 3 components, got {len(comps)}")
        try:
            fields[s] = SmoothField3.from_text(*comps, params=params)
        except ExpressionError as exc:
            raise ModelError(f"{where}: {exc}") from None
    missing = [sign_label(s) for s in SIGNS if s not in fields]
    if missing:
        raise ModelError(f"{source}: missing quadrant field(s) {', '.join(missing)}")
    return PiecewiseField(fields)


def parse_model(path) -> PiecewiseField:
    p = Path(path)
    return parse_model_text(p.read_text(encoding="utf-8"), str(p))


# --------------------------------------------------------------------------
# helpers

def _floats(text: str, n: int | None = None, what: str = "value") -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad {what} list {text!r}") from None
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"{what} needs {n} comma-separated numbers")
    return vals


def _point3(text):
    return _floats(text, 3, "point")


def _num_list(text):
    return _floats(text, None, "number")


def _grid(text: str):
    try:
        axes = []
        for part in text.split(","):
            a0, a1, n = part.split(":")
            axes.append((float(a0), float(a1), int(n)))
        if len(axes) != 2 or any(n < 1 for _, _, n in axes):
            raise ValueError
        return axes
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed grid {text!r}; use a0:a1:n,b0:b1:n") from None


def _linspace(a0, a1, n):
    if n == 1:
        return [a0]
    return [a0 + (a1 - a0) * i / (n - 1) for i in range(n)]


def _phi(name: str):
    return CUBIC if name == "cubic" else IDENTITY


def _num(v) -> str:
    return f"{float(v) + 0.0:.12g}"  # no "-0"


def _mode(text: str) -> str:
    text = {"paper": POINTWISE}.get(text, text)  # accepted synonym
    if text not in (STRICT, POINTWISE):
        raise argparse.ArgumentTypeError(f"mode must be {STRICT} or {POINTWISE}")
    return text


def _tup(vals) -> str:
    return "(" + ", ".join(_num(v) for v in vals) + ")"


def _fmt(v) -> str:
    if isinstance(v, float):
        return _num(v)
    return str(v)


def _emit(out, pairs):
    for k, v in pairs:
        out.write(f"{k}: {_fmt(v)}\n")


def _verdict_lines(v, args) -> list[tuple[str, object]]:
    rows = [
        ("verdict", v.tag),
        ("criterion", v.criterion),
        ("regime", str(v.regime)),
        ("scaling", UNNORMALIZED),
        ("mode", args.mode),
        ("K", float(args.K)),
        ("x3", float(args.x3)),
        ("equilibria", len(v.equilibria)),
    ]
    for i, r in enumerate(v.equilibria, 1):
        st = v.stabilities[i - 1] if i <= len(v.stabilities) else ""
        D = v.indicator[i - 1] if i <= len(v.indicator) else float("nan")
        rows.append((f"equilibrium.{i}",
                     f"({_num(r.location[0])}, {_num(r.location[1])}) {r.type_tag} {st} "
                     f"in_box={'yes' if r.in_unit_square else 'no'}"))
        rows.append((f"trace.{i}", r.trace))
        rows.append((f"det.{i}", r.det))
        rows.append((f"D.{i}", D))
    att = v.attracting
    cert = "none"
    if v.tag == SLIDING:
        parts = []
        for r, st in zip(v.equilibria, v.stabilities):
            if r.in_unit_square:
                kind = r.type_tag.split("_")[-1]
                parts.append(kind if kind == "saddle" else f"{st} {kind}")
        cert = ", ".join(parts) if parts else "indicator"
    rows.append(("certificate", cert))
    rows.append(("attracting", "none" if att is None else f"({_num(att.location[0])}, {_num(att.location[1])})"))
    rows.append(("note", v.note))
    return rows


# --------------------------------------------------------------------------
# subcommands

def cmd_classify(args, out) -> int:
    pw = parse_model(args.model)
    p = args.point
    st = stratum_of(p, args.tol)
    rows = [("point", f"({_num(p[0])}, {_num(p[1])}, {_num(p[2])})"), ("stratum", str(st)),
            ("codimension", st.codimension)]
    code = EXIT_OK
    if st.codimension == 0:
        rows.append(("type", "open quadrant"))
        rows.append(("field", _tup(pw.eval(st.signs, p))))
    elif st.codimension == 1:
        c = classify_codim1(pw, p, args.tol)
        rows += [("type", c.tag), ("lie_plus", c.lie_plus), ("lie_minus", c.lie_minus)]
        if c.tag == SLIDING1:
            sc = sliding_field_codim1(pw, p, args.tol)
            rows += [("rho", sc.rho), ("sliding_field", _tup(round(float(v), 12) for v in sc.field_value))]
    else:
        args.x3 = p[2]
        v = axis_verdict(pw, p[2], args.regime, args.K, args.mode, _phi(args.phi))
        rows += [("type", "codim-2 axis")] + _verdict_lines(v, args)
        if v.tag == UNDETERMINED:
            code = EXIT_UNDETERMINED
    _emit(out, rows)
    return code


def _constant_for_reduce(pw, x3, out_rows):
    if pw.is_constant:
        return pw
    frozen, valid = constant_approximation(pw, (0.0, 0.0, x3))
    out_rows.append(("frozen_at", f"(0, 0, {_num(x3)})"))
    out_rows.append(("frozen_valid", "yes" if valid else "no"))
    return frozen


def cmd_reduce(args, out) -> int:
    pw = parse_model(args.model)
    rows: list = []
    pwc = _constant_for_reduce(pw, args.x3, rows)
    b = reduced_bilinear_system(pwc, args.regime)
    rows += [("regime", str(args.regime)),
             ("eqx", _tup(b.eqx)),
             ("eqy", _tup(b.eqy)),
             ("form", "x' = c00 + c10 x + c01 y + c11 xy ; y' = r (d00 + d10 x + d01 y + d11 xy)")]
    try:
        c4 = canonical_csist4(b)
        c5 = canonical_csist5(c4)
    except DegenerateLambda as exc:
        rows.append(("csist4", f"unavailable ({exc})"))
        _emit(out, rows)
        return EXIT_UNDETERMINED
    for name in ("lambda1", "alpha1", "beta1", "delta1", "lambda2", "alpha2", "beta2", "delta2"):
        rows.append((f"csist4.{name}", getattr(c4, name)))
    for name in ("delta1", "C", "alpha2p", "beta2p", "delta2"):
        rows.append((f"csist5.{name}", getattr(c5, name)))
    rows.append(("csist5.shift", f"({_num(c5.shift[0])}, {_num(c5.shift[1])})"))
    rows.append(("csist5.time_scale", c5.time_scale))
    rows.append(("csist5.reverses_time", "yes" if c5.reverses_time else "no"))
    _emit(out, rows)
    return EXIT_OK


def cmd_verdict(args, out) -> int:
    pw = parse_model(args.model)
    v = axis_verdict(pw, args.x3, args.regime, args.K, args.mode, _phi(args.phi))
    _emit(out, _verdict_lines(v, args))
    return EXIT_UNDETERMINED if v.tag == UNDETERMINED else EXIT_OK


def _quad_from_model(args) -> QuadSystem:
    pw = parse_model(args.model)
    rows: list = []
    pwc = _constant_for_reduce(pw, args.x3, rows)
    b = reduced_bilinear_system(pwc, args.regime)
    c4 = canonical_csist4(b)
    r = args.regime.ladder[0]
    return QuadSystem(c4.lambda1, c4.delta1, r * c4.lambda2, r * c4.delta2,
                      c4.alpha1, c4.beta1, c4.alpha2, c4.beta2)


def cmd_normal_form(args, out) -> int:
    if args.quad is not None:
        A, B, C, D, a, b, c, d = args.quad
        q = QuadSystem(A, B, C, D, a, b, c, d)
    elif args.model is not None:
        q = _quad_from_model(args)
    else:
        raise ModelError("normal-form needs a model file or --quad")
    n = affine_normalize(q)
    rows = [("system", f"A={_num(q.A)} B={_num(q.B)} C={_num(q.C)} D={_num(q.D)} "
                       f"a={_num(q.a)} b={_num(q.b)} c={_num(q.c)} d={_num(q.d)}"),
            ("case", n.case_tag)]
    for k in sorted(n.params):
        rows.append((k, float(n.params[k])))
    rows += [("map", f"x = {_num(n.u)} X + {_num(n.v)}, y = {_num(n.w)} Y + {_num(n.r)}"),
             ("time_factor", n.kappa), ("residual", n.residual(q))]
    if n.case_tag == "I":
        Cn = n.params["C"]
        if Cn in (-1.0, 0.0) or abs(Cn - 1.0) <= 1e-12:
            rows.append(("bt", "unavailable (C in {-1, 0, 1})"))
        else:
            B1 = n.params["B"] - Cn * Cn / (1 + Cn) ** 2
            D1 = n.params["D"] - Cn / (1 + Cn) ** 2
            bt = bt_normal_form(Cn, B1, D1)
            rows += [("bt.B1", B1), ("bt.D1", D1), ("bt.b00", bt.b00), ("bt.b01", bt.b01),
                     ("bt.b20", bt.b20), ("bt.b11", bt.b11), ("bt.residual", bt.residual)]
    _emit(out, rows)
    return EXIT_OK


def cmd_regions(args, out) -> int:
    (a0, a1, na), (b0, b1, nb) = args.grid
    pts = [(a, b) for a in _linspace(a0, a1, na) for b in _linspace(b0, b1, nb)]

    def one(ab):
        return ab, bifurcation_region(*ab), saddle_node_discriminant(*ab)

    with ThreadPoolExecutor(max_workers=args.workers) as ex:
        rows = list(ex.map(one, pts))  # map keeps input order
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["alpha", "beta", "region", "delta"])
    for (a, b), reg, delta in rows:
        w.writerow([f"{a:.17g}", f"{b:.17g}", reg, f"{delta:.17g}"])
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    pw = parse_model(args.model)
    if args.eps is not None:
        eta = args.eta if args.eta is not None else args.eps
        traj = integrate_regularized(pw, _phi(args.phi), args.eps, eta, args.x0, args.tmax, args.step)
    else:
        traj = integrate_piecewise(pw, args.x0, args.tmax, args.step, args.event_tol, args.regime)
    if args.out:
        traj.write_csv(args.out)
    if args.events:
        traj.write_events_csv(args.events)
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", "kind", "x1", "x2", "x3"])
        for e in traj.events:
            w.writerow([f"{e.time:.17g}", e.kind, *(f"{v:.17g}" for v in e.point)])
    last = traj.events[-1]
    if last.note and last.note not in ("tmax reached",):
        sys.stderr.write(f"stopped: {last.note}\n")
    return EXIT_OK


def cmd_probe(args, out) -> int:
    pw = parse_model(args.model)
    etas = args.eta_list if args.eta_list is not None else args.eps_list
    if len(etas) != len(args.eps_list):
        raise ModelError("--eta-list must have as many entries as --eps-list")
    rows = convergence_probe(pw, _phi(args.phi), args.x0, list(zip(args.eps_list, etas)), args.tmax, args.step)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["eps", "eta", "distance"])
    for r in rows:
        w.writerow([f"{r.eps:.17g}", f"{r.eta:.17g}", f"{r.distance:.17g}"])
    return EXIT_OK


# --------------------------------------------------------------------------

def _regime(text):
    try:
        return Regime.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twocross",
        description="Sliding analysis and simulation of piecewise-smooth fields switching on two planes.",
        epilog="exit status: 0 success, 2 analysis undetermined, 1 error",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def analysis_opts(p, model_required=True):
        if model_required:
            p.add_argument("model", help="model file")
        p.add_argument("--regime", type=_regime, default=Regime(), help="k=V, to-zero or to-inf (default k=1)")
        p.add_argument("--x3", type=float, default=0.0)
        p.add_argument("--mode", type=_mode, default=STRICT, help="strict (fields frozen on the axis) or pointwise")
        p.add_argument("--K", type=float, default=1.0, help="eta = K*eps along the regularizing curve")
        p.add_argument("--phi", choices=("identity", "cubic"), default="identity")

    p = sub.add_parser("classify", help="classify a point of the switching set")
    analysis_opts(p)
    p.add_argument("--point", type=_point3, required=True, help="x1,x2,x3")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", help="reduced xy-system and canonical forms")
    analysis_opts(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("verdict", help="sliding verdict on the codim-2 axis")
    analysis_opts(p)
    p.set_defaults(func=cmd_verdict)

    p = sub.add_parser("normal-form", help="affine case and normal form of a quadratic system")
    p.add_argument("model", nargs="?", help="model file (constant fields)")
    analysis_opts(p, model_required=False)
    p.add_argument("--quad", type=lambda s: _floats(s, 8, "quad"), help="A,B,C,D,a,b,c,d")
    p.set_defaults(func=cmd_normal_form)

    p = sub.add_parser("regions", help="bifurcation regions of the two-parameter family")
    p.add_argument("--grid", type=_grid, required=True, help="a0:a1:n,b0:b1:n")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("simulate", help="integrate a trajectory")
    analysis_opts(p)
    p.add_argument("--x0", type=_point3, required=True)
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--event-tol", type=float, default=1e-10)
    p.add_argument("--eps", type=float, help="integrate the regularized field instead")
    p.add_argument("--eta", type=float)
    p.add_argument("--out", help="trajectory CSV")
    p.add_argument("--events", help="events CSV (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("probe", help="convergence probe of the regularized flow")
    analysis_opts(p)
    p.add_argument("--eps-list", type=_num_list, required=True)
    p.add_argument("--eta-list", type=_num_list)
    p.add_argument("--x0", type=_point3, required=True)
    p.add_argument("--tmax", type=float, default=5.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(func=cmd_probe)
    return ap


_VALUE_OPTIONS = ("--point", "--x0", "--grid", "--eps-list", "--eta-list", "--quad", "--x3")
_NEGATIVE = re.compile(r"-[0-9.]")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Let ``--x0 -0.5,1,0`` mean ``--x0=-0.5,1,0`` (argparse would read an option)."""
    out: list[str] = []
    i = 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTIONS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (ModelError, ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"twocross: error: {exc}\n")
        return EXIT_ERROR


def run_command(argv) -> tuple[int, str]:
    """Run the CLI in-process; returns ``(exit_code, stdout_text)``."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
