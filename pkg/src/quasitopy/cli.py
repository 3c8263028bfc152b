"""Command line: ``quasitopy <subcommand> ...``.

Exit status is 0 on success, 1 when an input fails validation or an operation
refuses it, 2 on usage errors.  Documents are read and written in QSC.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import List, Optional, Sequence

from . import assembly, invariants, metric_lab, qsc, render
from .curve import Multicurve, crossing_report, crossing_sign, validate_curve
from .errors import QscError
from .resolver import resolve_counted
from .surface import SideRef, evaluation_basis, validate_complex, validate_path

FLOAT = "{:.9f}"


class _Usage(Exception):
    pass


def _read(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return qsc.parse(fh.read())
    except OSError as exc:
        raise QscError("IO_ERROR", f"{path}: {exc.strerror}") from None


def _curve(path: str, need: bool = True):
    c, m, paths = _read(path)
    validate_complex(c)
    if m is None and need:
        raise QscError("NO_CURVE", f"{path} has no curve section")
    return c, m, paths


def _basis(args, c, m, doc_paths):
    choice = getattr(args, "basis", None)
    if choice in (None, "auto"):
        if choice is None and doc_paths:
            basis = doc_paths
        else:
            basis = evaluation_basis(c, "relative")
    else:
        _, _, basis = _read(choice)
        if not basis:
            raise QscError("NO_PATHS", f"{choice} declares no paths")
    for p in basis:
        validate_path(c, p)
    return list(basis)


def _emit(args, out: List[str], text: str) -> None:
    """Send a QSC document to ``-o`` or, without it, to stdout."""
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        out.append(f"wrote: {args.output}")
    else:
        out.append(text.rstrip("\n"))


def _ints(text: str, n: Optional[int] = None) -> List[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise _Usage(f"expected comma-separated integers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise _Usage(f"expected {n} integers, got {text!r}")
    return vals


def _floats(text: str, n: Optional[int] = None) -> List[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise _Usage(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise _Usage(f"expected {n} numbers, got {text!r}")
    return vals


def _side(text: str) -> SideRef:
    face, _, idx = text.rpartition(".")
    if not face or not idx.isdigit():
        raise _Usage(f"expected a side like F.0, got {text!r}")
    return SideRef(face, int(idx))


# ------------------------------------------------------------------ commands


def cmd_validate(args, out):
    c, m, paths = _read(args.file)
    s = validate_complex(c)
    out.append(f"complex: ok ({s.face_count} faces, {s.edge_count} edges, {s.vertex_count} vertices)")
    if m is not None:
        cs = validate_curve(m)
        out.append(f"curve: ok ({cs.closed_count} closed, {cs.arc_count} arcs)")
    for p in paths:
        validate_path(c, p)
    if paths:
        out.append(f"paths: ok ({len(paths)})")


def cmd_info(args, out):
    c, m, paths = _read(args.file)
    s = validate_complex(c)
    rows = [
        ("components", s.component_count),
        ("euler_characteristic", s.euler_characteristic),
        ("orientable", "yes" if s.orientable else "no"),
        ("boundary_components", s.boundary_component_count),
        ("h1_rank_abs", s.h1_rank_abs),
        ("h1_rank_rel", s.h1_rank_rel),
        ("vertices", s.vertex_count),
        ("edges", s.edge_count),
        ("faces", s.face_count),
    ]
    out.extend(f"{k}: {v}" for k, v in rows)
    for mode in ("absolute", "relative"):
        for p in evaluation_basis(c, mode):
            steps = " ".join(qsc._fmt_step(c, st) for st in p.steps)
            ends = f" {p.start} .. {p.end}" if not p.closed else ""
            out.append(f"basis_{mode[:3]} {p.name}:{ends} {steps}".rstrip())
    if m is not None:
        cs = validate_curve(m)
        out.append(f"curve_components: {cs.component_count}")
        out.append(f"points: {len(m.points)}")
        out.append(f"chords: {len(m.chords)}")


def _rho_lines(values, label="rho_mod2") -> List[str]:
    if len(values) == 1:
        return [f"{label}: {next(iter(values.values()))}"]
    return [f"{label}[{k}]: {v}" for k, v in values.items()]


def cmd_crossings(args, out):
    _, m, _ = _curve(args.file)
    rep = crossing_report(m)
    out.append("face\tchord_a\tchord_b\tsign")
    for face, x, y in rep.crossings:
        out.append(f"{face}\t{x}\t{y}\t{crossing_sign(m, m.chord(x), m.chord(y)):+d}")
    out.append(f"total: {rep.total}")
    out.extend(_rho_lines(rep.rho_mod2))


def cmd_resolve(args, out):
    c, m, paths = _curve(args.file)
    res, n = resolve_counted(m)
    _emit(args, out, qsc.serialize(c, res, paths))
    out.append(f"smoothings: {n}")


def cmd_class(args, out):
    c, m, paths = _curve(args.file)
    cv = invariants.class_vector(m, _basis(args, c, m, paths))
    out.append(str(cv))


def cmd_realize(args, out):
    c, _, paths = _curve(args.file, need=False)
    basis = _basis(args, c, None, paths)
    target = _ints(args.target, len(basis))
    m = invariants.realize_class(c, basis, target, relative=args.relative)
    _emit(args, out, qsc.serialize(c, m, basis))


def cmd_flip(args, out):
    c, m, paths = _curve(args.file)
    _emit(args, out, qsc.serialize(c, invariants.flip(m), paths))


def cmd_bsigma(args, out):
    _, m, _ = _curve(args.file)
    out.extend(_rho_lines(invariants.bsigma(m)))


def cmd_bsum(args, out):
    c1, m1, p1 = _curve(args.left, need=False)
    c2, m2, p2 = _curve(args.right, need=False)
    s1, s2 = _side(args.side1), _side(args.side2)
    c, m = assembly.boundary_sum(c1, m1, s1, c2, m2, s2)
    paths = assembly.boundary_sum_basis(p1, s1, p2, s2) if p1 and p2 else []
    s = validate_complex(c)
    _emit(args, out, qsc.serialize(c, m, paths))
    out.append(f"euler_characteristic: {s.euler_characteristic}")


def cmd_perturb(args, out):
    c, m, paths = _curve(args.file, need=not args.random)
    if args.random:
        m = assembly.random_curve(c, args.seed, args.classes, args.fingers, args.kinks)
        for k, v in m.provenance.items():
            out.append(f"# {k}: {v}")
    elif args.kink:
        chord, _, host = args.kink.partition(":")
        m = assembly.add_kink(m, chord, host)
    elif args.finger:
        chord, _, target = args.finger.partition(":")
        m = assembly.finger_move(m, chord, target)
    else:
        raise _Usage("perturb needs --kink, --finger or --random")
    _emit(args, out, qsc.serialize(c, m, paths))


def cmd_render(args, out):
    c, m, _ = _read(args.file)
    validate_complex(c)
    if m is not None:
        validate_curve(m)
    svg = render.render_svg(c, m)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
        out.append(f"wrote: {args.output}")
    else:
        out.append(svg.rstrip("\n"))


def cmd_localmodel(args, out):
    eps_list = _floats(args.eps) if args.eps else [0.25]
    out.append("q\tepsilon\tvol0\tvol_eps\tdrop\tstderr\tcheck")
    rows = []
    for eps in eps_list:
        cfg = metric_lab.LocalModelConfig(
            args.q, eps, args.w, args.step, args.samples, args.seed, args.workers
        )
        v0 = metric_lab.volume_estimate(metric_lab.LocalModelConfig(args.q, 0.0, args.w))
        ve = metric_lab.volume_estimate(cfg)
        check = "-" if ve.check is None else FLOAT.format(ve.check)
        out.append(
            "\t".join(
                [str(args.q), f"{eps:g}", FLOAT.format(v0.value), FLOAT.format(ve.value),
                 FLOAT.format(v0.value - ve.value), FLOAT.format(ve.stderr), check]
            )
        )
        rows.append((eps, v0.value, ve.value))
    if args.plot:
        render.plot_volume_sweep(rows, args.q, args.plot)
        out.append(f"plot: {args.plot}")


def cmd_flow(args, out):
    arc = _floats(args.arc)
    if args.q == 2:
        if len(arc) != 2:
            raise _Usage("--arc takes x0,x1 when q=2")
        shape = (arc[0], arc[1])
    else:
        if len(arc) != 4:
            raise _Usage("--arc takes x0,x1,y0,y1 when q=3")
        shape = ((arc[0], arc[1]), (arc[2], arc[3]))
    levels = metric_lab.gradient_flow_trace(args.q, args.eps0, args.eps1, shape, args.steps)
    out.append("epsilon\tvolume\tdiscrete\tresidual")
    for lv in levels:
        out.append(f"{lv.epsilon:.6f}\t{FLOAT.format(lv.volume)}\t{FLOAT.format(lv.discrete)}\t{lv.residual:.3e}")
    dec = all(b.volume < a.volume for a, b in zip(levels, levels[1:]))
    out.append(f"strictly_decreasing: {'yes' if dec else 'no'}")
    if args.plot:
        render.plot_flow(levels, args.q, args.plot)
        out.append(f"plot: {args.plot}")


def cmd_norm(args, out):
    g = metric_lab.LatticeMetric.from_flat(_floats(args.lattice, 4))
    if args.triangle:
        bad = metric_lab.triangle_check(g, args.triangle, args.seed)
        out.append(f"triangle_violations: {bad}")
        return
    if args.target is None:
        raise _Usage("norm needs --class or --triangle")
    rep = metric_lab.torus_norm(g, _ints(args.target, 2))
    out.append(FLOAT.format(rep.norm))
    if args.verbose:
        out.append(f"representative: {rep.representative}")


def cmd_ball(args, out):
    g = metric_lab.LatticeMetric.from_flat(_floats(args.lattice, 4))
    rep = metric_lab.unit_ball_probe(g, args.directions)
    out.append(f"directions: {rep.directions}")
    out.append(f"min_margin: {rep.min_margin:.3e}")
    out.append(f"ellipse_deviation: {rep.ellipse_deviation:.3e}")
    out.append(f"semi_axes: {FLOAT.format(rep.semi_axes[0])}, {FLOAT.format(rep.semi_axes[1])}")
    out.append(f"strictly_convex: {'yes' if rep.strictly_convex else 'no'}")
    out.append(f"note: {rep.note}")
    if args.table:
        out.append("theta\tx\ty\tmargin")
        for i, ((x, y), mg) in enumerate(zip(rep.boundary, rep.margins)):
            out.append(f"{2 * math.pi * i / rep.directions:.6f}\t{FLOAT.format(x)}\t{FLOAT.format(y)}\t{mg:.3e}")
    if args.plot:
        render.plot_unit_ball(rep, args.plot)
        out.append(f"plot: {args.plot}")


# -------------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-o", "--output", help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--basis", help="'auto' or a QSC file whose paths form the basis")

    p = _Parser(prog="quasitopy", description="Cooriented curves on polygonal surfaces, and the local volume models behind their resolution.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, fn, help_, *, file=True):
        sp = sub.add_parser(name, parents=[common], help=help_)
        if file:
            sp.add_argument("file")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check a document")
    add("info", cmd_info, "surface summary and evaluation bases")
    add("crossings", cmd_crossings, "list double points and their parity")
    add("resolve", cmd_resolve, "smooth every crossing")
    add("class", cmd_class, "class vector on a basis")
    sp = add("realize", cmd_realize, "embedded curve with a given class vector")
    sp.add_argument("--class", dest="target", required=True, help="comma-separated integers")
    sp.add_argument("--relative", action="store_true")
    add("flip", cmd_flip, "reverse the coorientation")
    add("bsigma", cmd_bsigma, "double-point parity per component")
    sp = add("bsum", cmd_bsum, "boundary connected sum of two documents", file=False)
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--side1", required=True)
    sp.add_argument("--side2", required=True)
    sp = add("perturb", cmd_perturb, "kink, finger move or random curve")
    sp.add_argument("--kink", metavar="CHORD:HOST")
    sp.add_argument("--finger", metavar="CHORD:TARGET")
    sp.add_argument("--random", action="store_true")
    sp.add_argument("--classes", type=int, default=2)
    sp.add_argument("--fingers", type=int, default=1)
    sp.add_argument("--kinks", type=int, default=0)
    add("render", cmd_render, "draw as SVG")
    sp = add("localmodel", cmd_localmodel, "volume of the resolved local model", file=False)
    sp.add_argument("--q", type=int, default=2, choices=(2, 3))
    sp.add_argument("--eps", help="comma-separated epsilons")
    sp.add_argument("--w", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=0.05)
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--plot")
    sp = add("flow", cmd_flow, "gradient flow through the level sets", file=False)
    sp.add_argument("--q", type=int, default=2, choices=(2, 3))
    sp.add_argument("--eps0", type=float, default=0.1)
    sp.add_argument("--eps1", type=float, default=0.3)
    sp.add_argument("--steps", type=int, default=20)
    sp.add_argument("--arc", default="0.2,0.8")
    sp.add_argument("--plot")
    sp = add("norm", cmd_norm, "flat-torus norm of a class", file=False)
    sp.add_argument("--lattice", default="1,0,0,1")
    sp.add_argument("--class", dest="target")
    sp.add_argument("--triangle", type=int, metavar="N_PAIRS")
    sp.add_argument("-v", "--verbose", action="store_true")
    sp = add("ball", cmd_ball, "probe the unit ball of the flat-torus norm", file=False)
    sp.add_argument("--lattice", default="1,0,0,1")
    sp.add_argument("--directions", type=int, default=360)
    sp.add_argument("--table", action="store_true")
    sp.add_argument("--plot")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    out: List[str] = []
    try:
        args = build_parser().parse_args(argv)
        args.fn(args, out)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except QscError as exc:
        if out:
            print("\n".join(out))
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if out:
        print("\n".join(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
