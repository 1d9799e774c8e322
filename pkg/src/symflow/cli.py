"""Command line interface: ``symflow COMMAND MODEL [options]``.

Exit codes: 0 on success, 1 on domain errors (the error class name goes
to stderr), 2 on usage and parse errors.  Output is deterministic:
rationals print as ``p/q`` and reals with 12 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

from .bowen_walters import BasicPath, dr_interval
from .counting import growth_csv, growth_table
from .dichotomy import cycle_lattice, recode_constant, solve_transfer, verify_cycle_map, verify_spectrum
from .errors import ParseError, SymflowError, ValidationError
from .flow import FlowPoint, flow, length_spectrum
from .model import load_model, model_to_dict
from .roof import as_fraction, format_fraction
from .shift import Cylinder, is_transitive, label_str, primitive_cycles
from .thermo import Potential, mme_flow, pressure

THREADS_ENV = "SYMFLOW_THREADS"


class UsageError(Exception):
    """Bad flag value detected after argparse (exit code 2)."""


def real(x: float) -> str:
    return f"{x:.12g}"


def thread_limit(environ=os.environ) -> int:
    """Parallelism cap from ``SYMFLOW_THREADS`` (default 1).

    The current algorithms run single-threaded; the value is validated so
    that scripts setting it get an early, clear error.
    """
    raw = environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except ValidationError:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _positive_rational(text: str) -> Fraction:
    q = _rational(text)
    if q <= 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return q


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return n


def _real(text: str) -> float:
    try:
        x = float(_rational(text))
    except (argparse.ArgumentTypeError, OverflowError):
        raise argparse.ArgumentTypeError(f"not a real number: {text!r}") from None
    return x


def _word(text: str) -> tuple:
    if not text:
        raise argparse.ArgumentTypeError("empty cylinder word")
    return tuple(p.strip() for p in text.split(",")) if "," in text else tuple(text)


# ---------------------------------------------------------------------------
# commands; each returns (text, json_object)

def cmd_info(model, args):
    g, r = model.graph, model.roof
    transitive = is_transitive(g)
    c = cycle_lattice(g, r).c if transitive else None
    parts = [f"{len(g.vertices)} vertices", f"{len(g.edges)} edges"]
    parts.append("transitive" if transitive else "not transitive")
    if r.inf == r.sup:
        parts.append(f"inf r = sup r = {format_fraction(r.inf)}")
    else:
        parts.append(f"inf r = {format_fraction(r.inf)}, sup r = {format_fraction(r.sup)}")
    if c is not None:
        parts.append(f"c = {format_fraction(c)}")
    data = {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "transitive": transitive,
        "range": r.k,
        "inf_r": format_fraction(r.inf),
        "sup_r": format_fraction(r.sup),
        "c": None if c is None else format_fraction(c),
    }
    if model.name:
        data["name"] = model.name
    return ", ".join(parts), data


def cmd_entropy(model, args):
    g, r = model.graph, model.roof
    h_top = pressure(g, Potential.zero(g))
    res = mme_flow(g, r)
    text = f"base entropy: {real(h_top)}\nflow entropy h: {real(res.h)}"
    return text, {"base_entropy": real(h_top), "flow_entropy": real(res.h)}


def cmd_pressure(model, args):
    g, r = model.graph, model.roof
    value = pressure(g, Potential.from_function(r, -args.h))
    return f"P(-{real(args.h)} r) = {real(value)}", {"h": real(args.h), "pressure": real(value)}


def _matrix_rows(M) -> list:
    return [[real(float(x)) for x in row] for row in M]


def cmd_mme(model, args):
    res = mme_flow(model.graph, model.roof)
    m = res.measure
    names = [label_str(v) for v in m.states.vertices]
    lines = [
        f"h = {real(res.h)} in [{real(res.bracket[0])}, {real(res.bracket[1])}]",
        f"base entropy = {real(res.base_entropy)}",
        f"mean roof = {real(res.mean_roof)}",
        "transition matrix:",
    ]
    width = max(len(n) for n in names)
    for name, row in zip(names, _matrix_rows(m.P)):
        lines.append(f"  {name:>{width}}  " + " ".join(row))
    lines.append("stationary vector:")
    for name, p in zip(names, m.pi):
        lines.append(f"  {name:>{width}}  {real(float(p))}")
    data = {
        "h": real(res.h),
        "bracket": [real(res.bracket[0]), real(res.bracket[1])],
        "base_entropy": real(res.base_entropy),
        "mean_roof": real(res.mean_roof),
        "states": names,
        "transition": _matrix_rows(m.P),
        "stationary": [real(float(p)) for p in m.pi],
    }
    return "\n".join(lines), data


def cmd_orbits(model, args):
    spec = length_spectrum(model.graph, model.roof, args.tmax, method=args.method)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["length_num", "length_den", "count"])
    for length, count in spec.items:
        w.writerow([length.numerator, length.denominator, count])
    data = {
        "tmax": format_fraction(spec.T),
        "pi": spec.pi,
        "spectrum": [[format_fraction(q), n] for q, n in spec.items],
    }
    return buf.getvalue().rstrip("\n"), data


def cmd_census(model, args):
    g, r = model.graph, model.roof
    steps = args.grid
    if steps is None:
        steps = int(args.tmax) if args.tmax.denominator == 1 else 1
    cylinder = None
    if args.cyl is not None:
        if args.eps is None:
            raise UsageError("--cyl needs --eps")
        cylinder = Cylinder(args.cyl, args.cyl_offset)
    rows = growth_table(g, r, args.tmax, steps, h=args.h, cylinder=cylinder, eps=args.eps)
    data = [
        {
            "T": format_fraction(row.T),
            "pi": row.pi,
            "predictor": real(row.predictor),
            "ratio": real(row.ratio),
            **({"S": real(row.S)} if row.S is not None else {}),
        }
        for row in rows
    ]
    return growth_csv(rows).rstrip("\n"), data


def _point(text, r):
    try:
        return FlowPoint.parse(text, r)
    except ParseError:
        raise
    except ValidationError as exc:
        raise ValidationError(f"{text!r}: {exc}") from None


def cmd_bw(model, args):
    r = model.roof
    z, w = _point(args.z, r), _point(args.w, r)
    iv = dr_interval(r, z, w, args.K)
    # the search runs on the unit suspension; show corners at roof heights
    path = iv.witness_path
    corners = tuple(FlowPoint(p.base, p.height * r(p.base)) for p in path.points)
    witness = str(BasicPath(corners, path.kinds))
    text = f"lo = {real(iv.lo)}\nhi = {real(iv.hi)}\nwitness: {witness}"
    return text, {"lo": real(iv.lo), "hi": real(iv.hi), "witness": witness}


def _provenance(model, res) -> dict:
    tf = res.transfer
    contract = res.stages[3]
    split_origin = res.stages[4].origin
    vertices = {}
    for name in res.graph.vertices:
        word, piece = split_origin[name]
        vertices[name] = {
            "word": [label_str(e) for e in word],
            "piece": piece,
            "roof": format_fraction(contract.roof[word]),
        }
    return {
        "source": model.name,
        "c": format_fraction(res.c),
        "stages": [s.name for s in res.stages],
        "block_level": tf.form.level,
        "transfer": {label_str(v): format_fraction(u) for v, u in sorted(
            tf.U.items(), key=lambda item: tf.form.graph.index[item[0]]
        )},
        "paired": res.paired,
        "vertex_map": vertices,
    }


def cmd_recode(model, args):
    g, r = model.graph, model.roof
    res = recode_constant(g, r)
    name = f"{model.name} (constant roof)" if model.name else "constant roof"
    out = model_to_dict(res.graph, res.roof, name)
    out["provenance"] = _provenance(model, res)
    lines = [
        f"c = {format_fraction(res.c)}",
        f"{len(res.graph.vertices)} vertices, {len(res.graph.edges)} edges",
    ]
    data = {"c": format_fraction(res.c), "model": out}
    if args.verify_tmax is not None:
        spectra = verify_spectrum(g, r, res, args.verify_tmax)
        cycles = verify_cycle_map(res, args.verify_tmax)
        h_src = mme_flow(g, r).h
        h_dst = mme_flow(res.graph, res.roof).h
        entropy_ok = abs(h_src - h_dst) <= 1e-9
        lines += [
            f"spectra match: {str(spectra).lower()}",
            f"cycle map: {str(cycles).lower()}",
            f"entropy match: {str(entropy_ok).lower()}",
        ]
        data.update(spectra_match=spectra, cycle_map=cycles, entropy_match=entropy_ok)
    if args.model_out is not None:
        with open(args.model_out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(out, indent=2) + "\n")
        lines.append(f"wrote {args.model_out}")
    return "\n".join(lines), data


def _eigen_samples(g, r, n_max=3):
    # points at rational heights on short periodic orbits, in canonical order
    for cycle in primitive_cycles(g, n_max):
        x = cycle.point()
        for q in (Fraction(0), Fraction(1, 3), Fraction(3, 4)):
            yield FlowPoint(x, q * r(x))


def cmd_mix_test(model, args):
    g, r = model.graph, model.roof
    lattice = cycle_lattice(g, r)
    tf = solve_transfer(g, r, lattice.c)
    worst = 0.0
    count = 0
    for z in _eigen_samples(g, r):
        for tau in (Fraction(1, 2), Fraction(7, 3), lattice.c, Fraction(-5, 4)):
            lhs = tf.eigenfunction(flow(r, z, tau))
            rhs = tf.eigenvalue(tau) * tf.eigenfunction(z)
            worst = max(worst, abs(lhs - rhs))
            count += 1
    ok = worst <= 1e-9
    weights = ", ".join(format_fraction(w) for w in lattice.weights)
    lines = [
        f"cycle weights: {weights}",
        f"c = {format_fraction(lattice.c)}",
        f"theta = {real(lattice.theta)}",
        "weakly mixing: false",
        f"eigenfunction check: {'passed' if ok else 'FAILED'} on {count} samples",
    ]
    data = {
        "weights": [format_fraction(w) for w in lattice.weights],
        "c": format_fraction(lattice.c),
        "theta": real(lattice.theta),
        "weakly_mixing": False,
        "eigenfunction_ok": ok,
        "samples": count,
    }
    return "\n".join(lines), data


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the report to a file")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print a JSON report")

    parser = argparse.ArgumentParser(
        prog="symflow",
        description="Suspension flows over subshifts of finite type.",
    )
    parser.add_argument("--out", default=None, help="write the report to a file")
    parser.add_argument("--json", action="store_true", default=False, help="print a JSON report")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("model", help="model JSON file")
        p.set_defaults(func=func)
        return p

    add("info", cmd_info, "graph and roof summary")
    add("entropy", cmd_entropy, "base and flow entropy")
    p = add("pressure", cmd_pressure, "pressure of -h r")
    p.add_argument("--h", type=_real, required=True, help="the multiplier h")
    add("mme", cmd_mme, "measure of maximal entropy of the flow")
    p = add("orbits", cmd_orbits, "length spectrum of simple closed orbits")
    p.add_argument("--tmax", type=_positive_rational, required=True)
    p.add_argument("--method", choices=("dp", "enumerate"), default="dp")
    p = add("census", cmd_census, "growth table for pi(T) and S(T)")
    p.add_argument("--tmax", type=_positive_rational, required=True)
    p.add_argument("--grid", type=_positive_int, default=None, help="number of T values")
    p.add_argument("--cyl", type=_word, default=None, help="cylinder word, e.g. a or ab or x,y")
    p.add_argument("--cyl-offset", type=int, default=0)
    p.add_argument("--eps", type=_positive_rational, default=None)
    p.add_argument("--h", type=_real, default=None, help="exponent (default: flow entropy)")
    p = add("bw", cmd_bw, "certified interval for the Bowen-Walters distance")
    p.add_argument("--z", required=True, help='point "LEFT|CORE|RIGHT@t"')
    p.add_argument("--w", required=True)
    p.add_argument("-K", type=_positive_int, default=4, help="maximum number of segments")
    p = add("recode", cmd_recode, "conjugate to a constant-roof flow")
    p.add_argument("--verify-tmax", type=_positive_rational, default=None)
    add("mix-test", cmd_mix_test, "lattice constant and eigenfunction check")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        thread_limit()
    except UsageError as exc:
        print(f"symflow: error: {exc}", file=sys.stderr)
        return 2
    # for recode, --out names the recoded model file
    args.model_out = None
    if args.command == "recode":
        args.model_out, args.out = args.out, None
    try:
        model = load_model(args.model)
        text, data = args.func(model, args)
    except UsageError as exc:
        print(f"symflow: error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return 2
    except SymflowError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"symflow: error: {exc}", file=sys.stderr)
        return 1
    report = json.dumps(data, indent=2) if args.json else text
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report + "\n")
    else:
        print(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
