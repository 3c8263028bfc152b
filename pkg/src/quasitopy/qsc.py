"""QSC: the line-oriented text format for complexes, curves and dual paths.

::

    # square torus with its meridian
    face F 4
    glue g0 F.0 F.2 compatible
    glue g1 F.1 F.3 compatible
    curve
    point p g1 0.5
    chord m p:b p:a F right
    path a0 closed F>g1

Ranks are decimals or ``p/q`` strictly between 0 and 1.  A path step
``F>g`` leaves face ``F`` through gluing ``g``; when both sides of ``g`` lie
on ``F`` the side must be named, ``F>g:a`` or ``F>g:b``.

Parsing checks syntax only.  Duplicate ids, dangling references and the like
are left to the validators so that their error codes stay uniform.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Optional, Tuple

from .curve import Chord, Circle, EdgePoint, Multicurve, PointCopy
from .errors import QscSyntaxError
from .surface import Alignment, DualPath, Gluing, SideRef, Step, SurfaceComplex, natural_key

__all__ = ["parse", "serialize", "format_rank", "parse_rank"]

_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_SIDE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\.(\d+)\Z")
_COPY = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?::([ab]))?\Z")
_STEP = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)>([A-Za-z_][A-Za-z0-9_]*)(?::([ab]))?\Z")
_RANK = re.compile(r"(?:0?\.\d+|\d+/\d+)\Z")


def parse_rank(text: str) -> Optional[Fraction]:
    if not _RANK.match(text):
        return None
    r = Fraction(text)
    return r if 0 < r < 1 else None


def format_rank(r: Fraction) -> str:
    r = Fraction(r)
    d = r.denominator
    while d % 2 == 0:
        d //= 2
    while d % 5 == 0:
        d //= 5
    if d != 1:
        return f"{r.numerator}/{r.denominator}"
    digits = 0
    while (r * 10**digits).denominator != 1:
        digits += 1
    return f"0.{(r.numerator * 10**digits // r.denominator):0{digits}d}"


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        self.tokens: List[Tuple[int, str]] = [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", text)]

    def fail(self, index: int, message: str):
        if index < len(self.tokens):
            col, tok = self.tokens[index]
        else:
            col = (self.tokens[-1][0] + len(self.tokens[-1][1])) if self.tokens else 1
            tok = "<end of line>"
        raise QscSyntaxError(self.number, col, tok, message)

    def arity(self, lo: int, hi: Optional[int] = None):
        n = len(self.tokens)
        hi = lo if hi is None else hi
        if n < lo:
            self.fail(n, f"{self.tokens[0][1]} needs {lo - 1} argument(s)")
        if hi >= 0 and n > hi:
            self.fail(hi, "unexpected extra token")

    def tok(self, i: int) -> str:
        return self.tokens[i][1]

    def ident(self, i: int) -> str:
        t = self.tok(i)
        if not _ID.match(t):
            self.fail(i, "expected an identifier")
        return t

    def side(self, i: int) -> SideRef:
        m = _SIDE.match(self.tok(i))
        if not m:
            self.fail(i, "expected a side reference like F.0")
        return SideRef(m.group(1), int(m.group(2)))

    def rank(self, i: int) -> Fraction:
        r = parse_rank(self.tok(i))
        if r is None:
            self.fail(i, "rank must be a decimal or p/q strictly between 0 and 1")
        return r

    def choice(self, i: int, options) -> str:
        t = self.tok(i)
        if t not in options:
            self.fail(i, "expected one of " + ", ".join(options))
        return t


def _step(line: _Line, i: int, gluings) -> Step:
    m = _STEP.match(line.tok(i))
    if not m:
        line.fail(i, "expected a step like F>g0 or F>g0:b")
    face, gid, side = m.groups()
    if side is None:
        g = gluings.get(gid)
        side = "b" if g is not None and g.b.face == face and g.a.face != face else "a"
    return Step(face, gid, side)


def parse(text: str) -> Tuple[SurfaceComplex, Optional[Multicurve], List[DualPath]]:
    """Parse a document into ``(complex, curve or None, paths)``."""
    faces, gluings, points, chords, circles, paths = [], [], [], [], [], []
    relative = None
    glue_table = {}
    pending_paths = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw.split("#", 1)[0])
        if not line.tokens:
            continue
        kw = line.tok(0)
        if kw == "face":
            line.arity(3)
            k = line.tok(2)
            if not k.isdigit() or int(k) < 1:
                line.fail(2, "side count must be a positive integer")
            faces.append((line.ident(1), int(k)))
        elif kw == "glue":
            line.arity(5)
            g = Gluing(line.ident(1), line.side(2), line.side(3), Alignment(line.choice(4, ("compatible", "twisted"))))
            gluings.append(g)
            glue_table[g.id] = g
        elif kw == "curve":
            line.arity(1, 2)
            if relative is not None:
                line.fail(0, "a document holds at most one curve")
            relative = len(line.tokens) == 2 and line.choice(1, ("relative",)) == "relative"
        elif kw in ("point", "bpoint", "chord", "circle"):
            if relative is None:
                line.fail(0, f"{kw} outside a curve section")
            if kw == "point":
                line.arity(4)
                points.append(EdgePoint(line.ident(1), line.ident(2), line.rank(3)))
            elif kw == "bpoint":
                line.arity(4)
                points.append(EdgePoint(line.ident(1), line.side(2), line.rank(3)))
            elif kw == "chord":
                line.arity(6)
                ends = []
                for i in (2, 3):
                    m = _COPY.match(line.tok(i))
                    if not m:
                        line.fail(i, "expected a point copy like p:a")
                    ends.append(PointCopy(m.group(1), m.group(2) or "a"))
                coor = line.choice(5, ("left", "right"))
                chords.append(Chord(line.ident(1), ends[0], ends[1], line.ident(4), coor))
            else:
                line.arity(3)
                sign = line.choice(2, ("+1", "-1"))
                circles.append(Circle(line.ident(1), int(sign)))
        elif kw == "path":
            line.arity(4, -1)
            line.choice(2, ("closed",))
            pending_paths.append((line, "closed"))
        elif kw == "rpath":
            line.arity(4, -1)
            line.side(2)
            line.side(len(line.tokens) - 1)
            pending_paths.append((line, "boundary_to_boundary"))
        else:
            line.fail(0, "unknown keyword")
    # steps may name gluings declared further down, so resolve them last
    for line, kind in pending_paths:
        name = line.ident(1)
        if kind == "closed":
            steps = tuple(_step(line, i, glue_table) for i in range(3, len(line.tokens)))
            paths.append(DualPath(steps, "closed", name=name))
        else:
            last = len(line.tokens) - 1
            steps = tuple(_step(line, i, glue_table) for i in range(3, last))
            paths.append(DualPath(steps, kind, line.side(2), line.side(last), name))
    c = SurfaceComplex(tuple(faces), tuple(gluings))
    curve = None
    if relative is not None:
        curve = Multicurve(c, tuple(points), tuple(chords), tuple(circles), relative)
    return c, curve, paths


def _fmt_step(c: SurfaceComplex, st: Step) -> str:
    text = f"{st.face}>{st.gluing}"
    g = next((x for x in c.gluings if x.id == st.gluing), None)
    implied = "b" if g is not None and g.b.face == st.face and g.a.face != st.face else "a"
    if g is None or (g.a.face == st.face and g.b.face == st.face) or st.side != implied:
        text += f":{st.side}"
    return text


def serialize(c: SurfaceComplex, m: Optional[Multicurve] = None, paths: Optional[List[DualPath]] = None) -> str:
    """Canonical text: ids in natural order, exact ranks, one declaration per line."""
    out = []
    for f, k in sorted(c.faces, key=lambda t: natural_key(t[0])):
        out.append(f"face {f} {k}")
    for g in sorted(c.gluings, key=lambda g: natural_key(g.id)):
        out.append(f"glue {g.id} {g.a} {g.b} {g.alignment.value}")
    if m is not None:
        out.append("curve relative" if m.relative else "curve")
        pts = sorted(m.points, key=lambda p: natural_key(p.id))
        for p in pts:
            if p.boundary:
                out.append(f"bpoint {p.id} {p.host} {format_rank(p.rank)}")
            else:
                out.append(f"point {p.id} {p.host} {format_rank(p.rank)}")
        for ch in sorted(m.chords, key=lambda ch: natural_key(ch.id)):
            out.append(f"chord {ch.id} {ch.tail} {ch.head} {ch.face} {ch.coor}")
        for ci in m.circles:
            out.append(f"circle {ci.face} {'+1' if ci.sign > 0 else '-1'}")
    for i, p in enumerate(paths or []):
        name = p.name or f"path{i}"
        steps = " ".join(_fmt_step(c, st) for st in p.steps)
        if p.closed:
            out.append(f"path {name} closed {steps}")
        else:
            out.append(" ".join(x for x in ("rpath", name, str(p.start), steps, str(p.end)) if x))
    return "\n".join(out) + "\n"
