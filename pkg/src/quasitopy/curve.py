"""Cooriented multicurves in normal position on a surface complex.

A curve meets the 1-skeleton in edge points and crosses each face along
straight chords.  An interior point has two copies, ``:a`` and ``:b``, one on
each glued side.  Each chord carries a coorientation bit: its normal lies to
the ``left`` or ``right`` of the tail-to-head direction, read in the face's
reference orientation.

Positions along a side are measured in that side's own direction, so the
cyclic order of chord ends around a face is just ``(side index, position)``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .errors import QscError
from .surface import SideRef, SurfaceComplex, _analyze, face_components, natural_key, reverse_face

__all__ = [
    "EdgePoint",
    "PointCopy",
    "Chord",
    "Circle",
    "Multicurve",
    "CurveSummary",
    "CrossingReport",
    "validate_curve",
    "crossing_report",
    "obstruction_nontrivial",
    "edge_cochain",
    "interleave",
    "count_crossings",
    "reverse_face_curve",
]

Host = Union[str, SideRef]


@dataclass(frozen=True)
class EdgePoint:
    id: str
    host: Host
    rank: Fraction

    def __post_init__(self):
        object.__setattr__(self, "rank", Fraction(self.rank))

    @property
    def boundary(self) -> bool:
        return isinstance(self.host, SideRef)


@dataclass(frozen=True, order=True)
class PointCopy:
    point: str
    copy: str = "a"

    def __str__(self) -> str:
        return f"{self.point}:{self.copy}"


@dataclass(frozen=True)
class Chord:
    id: str
    tail: PointCopy
    head: PointCopy
    face: str
    coor: str = "left"

    def normalized(self) -> "Chord":
        """The same chord directed so that its normal is on the left."""
        if self.coor == "left":
            return self
        return Chord(self.id, self.head, self.tail, self.face, "left")

    def flipped(self) -> "Chord":
        return Chord(self.id, self.tail, self.head, self.face, "right" if self.coor == "left" else "left")


@dataclass(frozen=True, order=True)
class Circle:
    face: str
    sign: int = 1


@dataclass(frozen=True)
class Multicurve:
    complex: SurfaceComplex
    points: Tuple[EdgePoint, ...] = ()
    chords: Tuple[Chord, ...] = ()
    circles: Tuple[Circle, ...] = ()
    relative: bool = False
    provenance: Mapping = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(sorted(self.points, key=lambda p: natural_key(p.id))))
        object.__setattr__(self, "chords", tuple(sorted(self.chords, key=lambda c: natural_key(c.id))))
        object.__setattr__(self, "circles", tuple(sorted(self.circles, key=lambda c: (natural_key(c.face), c.sign))))

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.complex, self.points, self.chords, self.circles, self.relative))
            object.__setattr__(self, "_hash", h)
        return h

    def point(self, pid: str) -> EdgePoint:
        try:
            return _point_table(self)[pid]
        except KeyError:
            raise QscError("UNKNOWN_POINT", f"no point {pid!r}") from None

    def chord(self, cid: str) -> Chord:
        for c in self.chords:
            if c.id == cid:
                return c
        raise QscError("UNKNOWN_CHORD", f"no chord {cid!r}")

    def replace(self, **changes) -> "Multicurve":
        data = dict(
            complex=self.complex,
            points=self.points,
            chords=self.chords,
            circles=self.circles,
            relative=self.relative,
            provenance=self.provenance,
        )
        data.update(changes)
        return Multicurve(**data)


@lru_cache(maxsize=1024)
def _point_table(m: Multicurve) -> Dict[str, EdgePoint]:
    return {p.id: p for p in m.points}


# ------------------------------------------------------------ geometry of copies


def copy_side(m: Multicurve, pc: PointCopy) -> SideRef:
    p = m.point(pc.point)
    if p.boundary:
        return p.host
    return m.complex.gluing(p.host).side(pc.copy)


def copy_position(m: Multicurve, pc: PointCopy) -> Fraction:
    """Position of a copy along its side, in the side's own direction."""
    p = m.point(pc.point)
    if p.boundary or pc.copy == "a":
        return p.rank
    g = m.complex.gluing(p.host)
    return 1 - p.rank if g.compatible else p.rank


def boundary_key(m: Multicurve, pc: PointCopy) -> Tuple[int, Fraction]:
    return copy_side(m, pc).side, copy_position(m, pc)


def end_sign(chord: Chord, at_tail: bool) -> int:
    """Sign of the normal against the side direction at one chord end.

    In a counterclockwise face a chord leaves its tail inward, so a left
    normal points backwards along the boundary there (-1) and forwards at the
    head (+1).
    """
    s = -1 if at_tail else 1
    return s if chord.coor == "left" else -s


def interleave(p1, p2, q1, q2) -> bool:
    lo, hi = (p1, p2) if p1 < p2 else (p2, p1)
    return (lo < q1 < hi) != (lo < q2 < hi)


def copy_usage(m: Multicurve) -> Dict[PointCopy, List[Tuple[Chord, bool]]]:
    use: Dict[PointCopy, List[Tuple[Chord, bool]]] = defaultdict(list)
    for c in m.chords:
        use[c.tail].append((c, True))
        use[c.head].append((c, False))
    return use


def copy_signs(m: Multicurve) -> Dict[PointCopy, int]:
    out = {}
    for c in m.chords:
        out[c.tail] = end_sign(c, True)
        out[c.head] = end_sign(c, False)
    return out


def point_sign(m: Multicurve, p: EdgePoint, signs: Optional[Dict[PointCopy, int]] = None) -> int:
    """Sign of the point's normal along its host (side ``a`` for gluings)."""
    signs = copy_signs(m) if signs is None else signs
    return signs[PointCopy(p.id, "a")]


def edge_cochain(m: Multicurve) -> Dict[Tuple[str, str], int]:
    """Signed point count on every edge: the cellular cocycle dual to the curve."""
    signs = copy_signs(m)
    out: Dict[Tuple[str, str], int] = defaultdict(int)
    for p in m.points:
        key = ("free", str(p.host)) if p.boundary else ("glue", p.host)
        out[key] += signs[PointCopy(p.id, "a")]
    return {k: v for k, v in out.items() if v}


# ------------------------------------------------------------------ validation


@dataclass(frozen=True)
class CurveSummary:
    component_count: int
    closed_count: int
    arc_count: int
    components: Tuple[Tuple[str, ...], ...]  # chord ids per component
    point_counts: Tuple[int, ...]
    circle_count: int = 0


def _structure(m: Multicurve) -> None:
    c = m.complex
    _analyze(c)
    faces = dict(c.faces)
    for kind, ids in (("point", [p.id for p in m.points]), ("chord", [ch.id for ch in m.chords])):
        if len(set(ids)) != len(ids):
            raise QscError("DUPLICATE_ID", f"{kind} ids must be unique")
    ranks = defaultdict(set)
    for p in m.points:
        if not 0 < p.rank < 1:
            raise QscError("BAD_RANK", f"point {p.id} has rank {p.rank} outside (0, 1)")
        if p.boundary:
            if p.host.face not in faces or not 0 <= p.host.side < faces[p.host.face]:
                raise QscError("DANGLING_SIDE_REF", f"point {p.id} on missing side {p.host}")
            if not c.is_free(p.host):
                raise QscError("NOT_A_BOUNDARY_SIDE", f"bpoint {p.id} lies on glued side {p.host}")
            if not m.relative:
                raise QscError("BOUNDARY_POINT_IN_CLOSED_CURVE", f"bpoint {p.id} in a closed curve")
        else:
            c.gluing(p.host)
        key = str(p.host) if p.boundary else p.host
        if p.rank in ranks[key]:
            raise QscError("RANK_COLLISION", f"two points with rank {p.rank} on {key}")
        ranks[key].add(p.rank)
    use = copy_usage(m)
    for ch in m.chords:
        if ch.face not in faces:
            raise QscError("DANGLING_SIDE_REF", f"chord {ch.id} in missing face {ch.face}")
        if ch.coor not in ("left", "right"):
            raise QscError("BAD_COORIENTATION", f"chord {ch.id} has coorientation {ch.coor!r}")
        if ch.tail == ch.head:
            raise QscError("DEGREE_VIOLATION", f"chord {ch.id} starts and ends at {ch.tail}")
        for pc in (ch.tail, ch.head):
            p = m.point(pc.point)
            if pc.copy not in ("a", "b") or (p.boundary and pc.copy != "a"):
                raise QscError("DEGREE_VIOLATION", f"chord {ch.id} uses nonexistent copy {pc}")
            if copy_side(m, pc).face != ch.face:
                raise QscError("CHORD_OFF_FACE", f"chord {ch.id} end {pc} is not on face {ch.face}")
    for p in m.points:
        copies = ("a",) if p.boundary else ("a", "b")
        for cp in copies:
            n = len(use.get(PointCopy(p.id, cp), ()))
            if n != 1:
                raise QscError("DEGREE_VIOLATION", f"copy {p.id}:{cp} is used by {n} chord ends")
    for circ in m.circles:
        if circ.face not in faces or circ.sign not in (1, -1):
            raise QscError("BAD_CIRCLE", f"circle {circ}")


def _coorientation(m: Multicurve) -> None:
    signs = copy_signs(m)
    use = copy_usage(m)
    bad = []
    for p in m.points:
        if p.boundary:
            continue
        g = m.complex.gluing(p.host)
        sa, sb = signs[PointCopy(p.id, "a")], signs[PointCopy(p.id, "b")]
        if (sa == -sb) != g.compatible:
            bad.append(p)
    if not bad:
        return
    # Is there any consistent choice of bits?  Flipping a chord flips both its
    # end signs, so each interior point imposes a parity constraint.
    adj = defaultdict(list)
    for p in m.points:
        if p.boundary:
            continue
        g = m.complex.gluing(p.host)
        sa, sb = signs[PointCopy(p.id, "a")], signs[PointCopy(p.id, "b")]
        mismatch = int((sa == -sb) != g.compatible)
        ca = use[PointCopy(p.id, "a")][0][0].id
        cb = use[PointCopy(p.id, "b")][0][0].id
        adj[ca].append((cb, mismatch, p.id))
        adj[cb].append((ca, mismatch, p.id))
    label: Dict[str, int] = {}
    for ch in m.chords:
        if ch.id in label:
            continue
        label[ch.id] = 0
        stack = [ch.id]
        while stack:
            u = stack.pop()
            for w, par, pid in adj[u]:
                want = label[u] ^ par
                if w not in label:
                    label[w] = want
                    stack.append(w)
                elif label[w] != want:
                    raise QscError(
                        "ONE_SIDED_COMPONENT",
                        f"coorientation cannot be transported consistently through point {pid}",
                    )
    raise QscError(
        "COORIENTATION_MISMATCH", f"stored coorientation bits disagree at point {bad[0].id}"
    )


@lru_cache(maxsize=1024)
def _components(m: Multicurve) -> List[Tuple[List[str], int, bool]]:
    parent = {ch.id: ch.id for ch in m.chords}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    use = copy_usage(m)
    for p in m.points:
        if p.boundary:
            continue
        ca = use[PointCopy(p.id, "a")][0][0].id
        cb = use[PointCopy(p.id, "b")][0][0].id
        ra, rb = find(ca), find(cb)
        if ra != rb:
            parent[max(ra, rb, key=natural_key)] = min(ra, rb, key=natural_key)
    groups = defaultdict(list)
    for ch in m.chords:
        groups[find(ch.id)].append(ch.id)
    points_in = defaultdict(int)
    arcs = defaultdict(bool)
    for p in m.points:
        ch = use[PointCopy(p.id, "a")][0][0].id
        points_in[find(ch)] += 1
        if p.boundary:
            arcs[find(ch)] = True
    out = []
    for root in sorted(groups, key=natural_key):
        out.append((sorted(groups[root], key=natural_key), points_in[root], arcs[root]))
    return out


@lru_cache(maxsize=1024)
def validate_curve(m: Multicurve) -> CurveSummary:
    _structure(m)
    _coorientation(m)
    comps = _components(m)
    arcs = sum(1 for _, _, arc in comps if arc)
    return CurveSummary(
        component_count=len(comps) + len(m.circles),
        closed_count=len(comps) - arcs + len(m.circles),
        arc_count=arcs,
        components=tuple(tuple(ids) for ids, _, _ in comps),
        point_counts=tuple(n for _, n, _ in comps),
        circle_count=len(m.circles),
    )


def require_valid(m: Multicurve, closed: bool = False) -> CurveSummary:
    try:
        summary = validate_curve(m)
    except QscError as exc:
        raise QscError("INVALID_CURVE", str(exc)) from exc
    if closed and m.relative:
        raise QscError("INVALID_CURVE", "a closed curve is required")
    return summary


# ------------------------------------------------------------------- crossings


@dataclass(frozen=True)
class CrossingReport:
    crossings: Tuple[Tuple[str, str, str], ...]
    per_component_count: Dict[str, int]
    rho_mod2: Dict[str, int]
    rho_signed_experimental: Dict[str, int]

    @property
    def total(self) -> int:
        return len(self.crossings)


def face_chords(m: Multicurve) -> Dict[str, List[Chord]]:
    out = defaultdict(list)
    for ch in m.chords:
        out[ch.face].append(ch)
    return out


@lru_cache(maxsize=256)
def _chord_key_table(m: Multicurve):
    return {ch.id: (boundary_key(m, ch.tail), boundary_key(m, ch.head)) for ch in m.chords}


def chord_keys(m: Multicurve, ch: Chord):
    hit = _chord_key_table(m).get(ch.id)
    if hit is not None and m.chord(ch.id) == ch:
        return hit
    return boundary_key(m, ch.tail), boundary_key(m, ch.head)


def chords_cross(m: Multicurve, c1: Chord, c2: Chord) -> bool:
    if c1.face != c2.face:
        return False
    (p1, p2), (q1, q2) = chord_keys(m, c1), chord_keys(m, c2)
    return interleave(p1, p2, q1, q2)


def _unit_circle(k: int, key: Tuple[int, Fraction]) -> Tuple[float, float]:
    theta = 2 * math.pi * (key[0] + float(key[1])) / k
    return math.cos(theta), math.sin(theta)


def crossing_sign(m: Multicurve, a: Chord, b: Chord) -> int:
    """Orientation of the pair (t_a, t_b) of coorientation-induced tangents."""
    k = m.complex.side_count(a.face)
    vecs = []
    for ch in (a.normalized(), b.normalized()):
        x0, y0 = _unit_circle(k, boundary_key(m, ch.tail))
        x1, y1 = _unit_circle(k, boundary_key(m, ch.head))
        vecs.append((x1 - x0, y1 - y0))
    cross = vecs[0][0] * vecs[1][1] - vecs[0][1] * vecs[1][0]
    return 1 if cross > 0 else -1


def _raw_crossings(m: Multicurve) -> List[Tuple[str, str, str]]:
    out = []
    for face, chords in face_chords(m).items():
        keyed = [(ch, chord_keys(m, ch)) for ch in chords]
        for i in range(len(keyed)):
            for j in range(i + 1, len(keyed)):
                (c1, (p1, p2)), (c2, (q1, q2)) = keyed[i], keyed[j]
                if interleave(p1, p2, q1, q2):
                    x, y = sorted((c1.id, c2.id), key=natural_key)
                    out.append((face, x, y))
    out.sort(key=lambda t: (natural_key(t[0]), natural_key(t[1]), natural_key(t[2])))
    return out


def count_crossings(m: Multicurve) -> int:
    return len(_raw_crossings(m))


def crossing_report(m: Multicurve) -> CrossingReport:
    require_valid(m)
    crossings = _raw_crossings(m)
    comp = face_components(m.complex)
    labels = sorted(set(comp.values()), key=natural_key)
    counts = {lab: 0 for lab in labels}
    signed = {lab: 0 for lab in labels}
    for face, x, y in crossings:
        counts[comp[face]] += 1
        signed[comp[face]] += crossing_sign(m, m.chord(x), m.chord(y))
    return CrossingReport(
        crossings=tuple(crossings),
        per_component_count=counts,
        rho_mod2={k: v % 2 for k, v in counts.items()},
        rho_signed_experimental=signed,
    )


def obstruction_nontrivial(m: Multicurve) -> Dict[str, bool]:
    """Per ambient component: an odd number of double points certifies non-embeddability."""
    require_valid(m, closed=True)
    return {k: bool(v) for k, v in crossing_report(m).rho_mod2.items()}


def reverse_face_curve(m: Multicurve, face: str) -> Multicurve:
    """Carry ``m`` through :func:`reverse_face`; the drawn curve does not move.

    Sides of ``face`` run backwards afterwards, so ranks measured along them
    become ``1 - r`` and chords in the face swap left for right.
    """
    c = m.complex
    k = c.side_count(face)
    new_c = reverse_face(c, face)
    points = []
    for p in m.points:
        if p.boundary:
            if p.host.face == face:
                p = EdgePoint(p.id, SideRef(face, k - 1 - p.host.side), 1 - p.rank)
        elif c.gluing(p.host).a.face == face:
            p = EdgePoint(p.id, p.host, 1 - p.rank)
        points.append(p)
    chords = tuple(ch.flipped() if ch.face == face else ch for ch in m.chords)
    circles = tuple(Circle(ci.face, -ci.sign) if ci.face == face else ci for ci in m.circles)
    return Multicurve(new_c, tuple(points), chords, circles, m.relative)
