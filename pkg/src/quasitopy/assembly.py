"""Building new curves and complexes from old ones.

Perturbations and what they preserve:

* ``finger_move`` is an isotopy, so it keeps the quasitopy class; it adds
  exactly two double points.
* ``add_kink`` adds one double point and keeps the class vector, but flips the
  parity of the double-point count, so it changes the quasitopy class.
* ``trivial_loop`` adds a small embedded null-homotopic circle; it changes
  neither crossings nor class vector.
"""

from __future__ import annotations

import logging
import warnings
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .curve import (
    Chord,
    Circle,
    EdgePoint,
    Multicurve,
    PointCopy,
    boundary_key,
    chords_cross,
    copy_side,
    require_valid,
    validate_curve,
)
from .errors import QscError
from .invariants import realize_class
from .surface import (
    Alignment,
    DualPath,
    Gluing,
    SideRef,
    Step,
    SurfaceComplex,
    boundary_component_of,
    evaluation_basis,
    natural_key,
    subdivide_side,
    validate_complex,
)

log = logging.getLogger(__name__)

__all__ = [
    "disjoint_union",
    "normalize_ids",
    "boundary_sum",
    "boundary_sum_basis",
    "add_kink",
    "finger_move",
    "trivial_loop",
    "random_curve",
    "subdivide_curve",
]


def empty_curve(c: SurfaceComplex, relative: bool = False) -> Multicurve:
    return Multicurve(c, relative=relative)


def _fresh(prefix: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    n = 0
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def normalize_ids(m: Multicurve) -> Multicurve:
    """Rename points ``p0, p1, ...`` and chords ``c0, c1, ...`` in a canonical order."""

    def host_key(p: EdgePoint):
        if p.boundary:
            return (1, natural_key(p.host.face), p.host.side, p.rank)
        return (0, natural_key(p.host), 0, p.rank)

    pmap = {p.id: f"p{i}" for i, p in enumerate(sorted(m.points, key=host_key))}
    points = tuple(EdgePoint(pmap[p.id], p.host, p.rank) for p in m.points)

    def chord_key(ch: Chord):
        return (natural_key(ch.face), tuple(sorted((boundary_key(m, ch.tail), boundary_key(m, ch.head)))))

    cmap = {ch.id: f"c{i}" for i, ch in enumerate(sorted(m.chords, key=chord_key))}
    chords = tuple(
        Chord(
            cmap[ch.id],
            PointCopy(pmap[ch.tail.point], ch.tail.copy),
            PointCopy(pmap[ch.head.point], ch.head.copy),
            ch.face,
            ch.coor,
        )
        for ch in m.chords
    )
    return m.replace(points=points, chords=chords)


def disjoint_union(m1: Multicurve, m2: Multicurve) -> Multicurve:
    """Overlay two curves on the same complex; ids of ``m2`` are renamed on collision."""
    if m1.complex != m2.complex:
        raise QscError("COMPLEX_MISMATCH", "curves live on different complexes")
    if m1.relative != m2.relative:
        raise QscError("COMPLEX_MISMATCH", "cannot mix closed and relative curves")
    taken_p = {p.id for p in m1.points}
    taken_c = {c.id for c in m1.chords}
    pmap, cmap = {}, {}
    for p in m2.points:
        new = p.id
        while new in taken_p:
            new += "_2"
        pmap[p.id] = new
        taken_p.add(new)
    for ch in m2.chords:
        new = ch.id
        while new in taken_c:
            new += "_2"
        cmap[ch.id] = new
        taken_c.add(new)
    seen = {(str(p.host), p.rank) for p in m1.points}
    for p in m2.points:
        if (str(p.host), p.rank) in seen:
            raise QscError("RANK_COLLISION", f"both curves have a point at rank {p.rank} on {p.host}")
    points = m1.points + tuple(EdgePoint(pmap[p.id], p.host, p.rank) for p in m2.points)
    chords = m1.chords + tuple(
        Chord(
            cmap[ch.id],
            PointCopy(pmap[ch.tail.point], ch.tail.copy),
            PointCopy(pmap[ch.head.point], ch.head.copy),
            ch.face,
            ch.coor,
        )
        for ch in m2.chords
    )
    return m1.replace(points=points, chords=chords, circles=m1.circles + m2.circles, provenance={})


def subdivide_curve(m: Multicurve, s: SideRef) -> Multicurve:
    """:func:`subdivide_side` carrying the curve along.

    A boundary point of rank ``r`` on ``s`` lands on the first half at ``2r``
    or on the second half at ``2r - 1``; the midpoint itself becomes a vertex,
    so a point exactly there is refused.
    """
    c = subdivide_side(m.complex, s)
    points = []
    for p in m.points:
        if not p.boundary or p.host.face != s.face or p.host.side < s.side:
            points.append(EdgePoint(p.id, p.host, p.rank))
        elif p.host.side > s.side:
            points.append(EdgePoint(p.id, SideRef(s.face, p.host.side + 1), p.rank))
        elif p.rank == Fraction(1, 2):
            raise QscError("RANK_AT_SPLIT", f"point {p.id} sits at the midpoint of {s}")
        elif p.rank < Fraction(1, 2):
            points.append(EdgePoint(p.id, s, 2 * p.rank))
        else:
            points.append(EdgePoint(p.id, SideRef(s.face, s.side + 1), 2 * p.rank - 1))
    return Multicurve(c, tuple(points), m.chords, m.circles, m.relative)


# ------------------------------------------------------------- boundary sum


def _rename_complex(c: SurfaceComplex, tag: str) -> SurfaceComplex:
    faces = tuple((f"{tag}_{f}", k) for f, k in c.faces)
    gluings = tuple(
        Gluing(
            f"{tag}_{g.id}",
            SideRef(f"{tag}_{g.a.face}", g.a.side),
            SideRef(f"{tag}_{g.b.face}", g.b.side),
            g.alignment,
        )
        for g in c.gluings
    )
    return SurfaceComplex(faces, gluings)


def _rename_side(s: SideRef, tag: str) -> SideRef:
    return SideRef(f"{tag}_{s.face}", s.side)


def _rename_curve(m: Multicurve, c: SurfaceComplex, tag: str) -> Multicurve:
    points = tuple(
        EdgePoint(
            f"{tag}_{p.id}",
            _rename_side(p.host, tag) if p.boundary else f"{tag}_{p.host}",
            p.rank,
        )
        for p in m.points
    )
    chords = tuple(
        Chord(
            f"{tag}_{ch.id}",
            PointCopy(f"{tag}_{ch.tail.point}", ch.tail.copy),
            PointCopy(f"{tag}_{ch.head.point}", ch.head.copy),
            f"{tag}_{ch.face}",
            ch.coor,
        )
        for ch in m.chords
    )
    circles = tuple(Circle(f"{tag}_{ci.face}", ci.sign) for ci in m.circles)
    return Multicurve(c, points, chords, circles, m.relative)


def _check_sum_side(c: SurfaceComplex, m: Optional[Multicurve], s: SideRef) -> None:
    summary = validate_complex(c)
    if s.face not in dict(c.faces) or not 0 <= s.side < c.side_count(s.face) or not c.is_free(s):
        raise QscError("SIDE_NOT_FREE", f"{s} is not a free side")
    if m is not None and any(p.boundary and p.host == s for p in m.points):
        raise QscError("POINTS_ON_SIDE", f"curve points lie on {s}")
    if len(boundary_component_of(c, s)) < 2:
        raise QscError("SINGLE_SIDE_BOUNDARY", f"the boundary circle through {s} has one side; subdivide it first")
    if summary.component_count != 1 or summary.boundary_component_count != 1:
        warnings.warn(
            f"boundary sum along {s}: complex has {summary.component_count} components and "
            f"{summary.boundary_component_count} boundary circles",
            stacklevel=3,
        )


HANDLE = "H"


def boundary_sum(
    c1: SurfaceComplex,
    m1: Optional[Multicurve],
    s1: SideRef,
    c2: SurfaceComplex,
    m2: Optional[Multicurve],
    s2: SideRef,
) -> Tuple[SurfaceComplex, Multicurve]:
    """Join two surfaces by a square 1-handle glued along ``s1`` and ``s2``.

    Faces, gluings, points and chords of the first input get the prefix ``L_``,
    those of the second ``R_``; the handle is the square face ``H``.
    """
    _check_sum_side(c1, m1, s1)
    _check_sum_side(c2, m2, s2)
    r1, r2 = _rename_complex(c1, "L"), _rename_complex(c2, "R")
    handle = (
        Gluing("H_0", SideRef(HANDLE, 0), _rename_side(s1, "L"), Alignment.COMPATIBLE),
        Gluing("H_2", SideRef(HANDLE, 2), _rename_side(s2, "R"), Alignment.COMPATIBLE),
    )
    c = SurfaceComplex(r1.faces + r2.faces + ((HANDLE, 4),), r1.gluings + r2.gluings + handle)
    relative = any(x is not None and x.relative for x in (m1, m2))
    parts = [
        _rename_curve(x if x is not None else empty_curve(orig, relative), c, tag)
        for x, orig, tag in ((m1, c1, "L"), (m2, c2, "R"))
    ]
    if parts[0].relative != parts[1].relative:
        raise QscError("COMPLEX_MISMATCH", "cannot join a closed curve with a relative one")
    m = Multicurve(
        c,
        parts[0].points + parts[1].points,
        parts[0].chords + parts[1].chords,
        parts[0].circles + parts[1].circles,
        relative,
    )
    return c, m


def _rename_path(p: DualPath, tag: str, s: SideRef, glue: str, free_side: int) -> DualPath:
    steps = [Step(f"{tag}_{st.face}", f"{tag}_{st.gluing}", st.side) for st in p.steps]
    start = _rename_side(p.start, tag) if p.start else None
    end = _rename_side(p.end, tag) if p.end else None
    joined = _rename_side(s, tag)
    # paths that used the consumed side continue through the handle
    if start == joined:
        steps.insert(0, Step(HANDLE, glue, "a"))
        start = SideRef(HANDLE, free_side)
    if end == joined:
        steps.append(Step(joined.face, glue, "b"))
        end = SideRef(HANDLE, free_side)
    return DualPath(tuple(steps), p.kind, start, end, f"{tag}_{p.name}" if p.name else "")


def boundary_sum_basis(
    basis1: Sequence[DualPath], s1: SideRef, basis2: Sequence[DualPath], s2: SideRef
) -> List[DualPath]:
    """Block-concatenated evaluation basis for the output of :func:`boundary_sum`."""
    return [_rename_path(p, "L", s1, "H_0", 1) for p in basis1] + [
        _rename_path(p, "R", s2, "H_2", 3) for p in basis2
    ]


# ------------------------------------------------------------ perturbations


def _host_side(m: Multicurve, host: str, face: str) -> Tuple[Gluing, str]:
    if "." in host and host not in {g.id for g in m.complex.gluings}:
        raise QscError("HOST_IS_BOUNDARY", f"{host} is a boundary side; a kink must pass through a gluing")
    g = m.complex.gluing(host)
    if g.a.face == face:
        return g, "a"
    if g.b.face == face:
        return g, "b"
    raise QscError("HOST_NOT_ON_FACE", f"gluing {host} has no side on face {face}")


def _gaps(m: Multicurve, host: str) -> List[Tuple[Fraction, Fraction]]:
    ranks = sorted(p.rank for p in m.points if not p.boundary and p.host == host)
    bounds = [Fraction(0)] + ranks + [Fraction(1)]
    return list(zip(bounds[:-1], bounds[1:]))


def _detour(
    m: Multicurve, ch: Chord, g: Gluing, side: str, xr: Fraction, yr: Fraction
) -> Tuple[Multicurve, Chord, Chord, Chord]:
    """Reroute ``ch`` out through gluing ``g`` at rank ``xr`` and back in at ``yr``."""
    u = ch.normalized()
    other = "b" if side == "a" else "a"
    pids = {p.id for p in m.points}
    x = _fresh("x", pids)
    y = _fresh("y", pids | {x})
    cids = {c.id for c in m.chords}
    cap_id = _fresh(f"{ch.id}_cap", cids)
    back_id = _fresh(f"{ch.id}_back", cids | {cap_id})
    first = Chord(ch.id, u.tail, PointCopy(x, side), ch.face, "left")
    back = Chord(back_id, PointCopy(y, side), u.head, ch.face, "left")
    cap_coor = "left" if g.compatible else "right"
    cap = Chord(cap_id, PointCopy(x, other), PointCopy(y, other), g.side(other).face, cap_coor)
    rest = tuple(c for c in m.chords if c.id != ch.id)
    out = m.replace(
        points=m.points + (EdgePoint(x, g.id, xr), EdgePoint(y, g.id, yr)),
        chords=rest + (first, cap, back),
        provenance={},
    )
    return out, first, cap, back


def _touching(m: Multicurve, ids) -> int:
    """Crossings that involve at least one chord in ``ids``."""
    ids = set(ids)
    n = 0
    for a in m.chords:
        if a.id not in ids:
            continue
        for b in m.chords:
            if b.id != a.id and (b.id not in ids or b.id > a.id) and chords_cross(m, a, b):
                n += 1
    return n


def _rank_pairs(lo: Fraction, hi: Fraction):
    a, b = lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3
    return ((a, b), (b, a))


def add_kink(m: Multicurve, chord_id: str, host: str) -> Multicurve:
    """Add one small self-crossing loop to a chord, detouring through ``host``."""
    require_valid(m)
    ch = m.chord(chord_id)
    g, side = _host_side(m, host, ch.face)
    before = _touching(m, {ch.id})
    for lo, hi in _gaps(m, g.id):
        for xr, yr in _rank_pairs(lo, hi):
            cand, first, cap, back = _detour(m, ch, g, side, xr, yr)
            try:
                validate_curve(cand)
            except QscError:
                continue
            after = _touching(cand, {first.id, cap.id, back.id})
            if chords_cross(cand, first, back) and after == before + 1:
                return cand
    raise QscError("KINK_BLOCKED", f"no placement on {host} adds exactly one crossing to {chord_id}")


def finger_move(m: Multicurve, chord_id: str, target_chord_id: str) -> Multicurve:
    """Push ``chord_id`` across ``target_chord_id`` and back: exactly two new crossings."""
    require_valid(m)
    ch, tgt = m.chord(chord_id), m.chord(target_chord_id)
    if ch.id == tgt.id or ch.face != tgt.face:
        raise QscError("NOT_SAME_FACE", f"{chord_id} and {target_chord_id} are not distinct chords of one face")
    if chords_cross(m, ch, tgt):
        raise QscError("ALREADY_CROSSING", f"{chord_id} already crosses {target_chord_id}")
    before = _touching(m, {ch.id})
    for end in (tgt.tail, tgt.head):
        p = m.point(end.point)
        if p.boundary:
            continue
        g = m.complex.gluing(p.host)
        side = end.copy
        for lo, hi in _gaps(m, g.id):
            if p.rank not in (lo, hi):
                continue
            for xr, yr in _rank_pairs(lo, hi):
                cand, first, cap, back = _detour(m, ch, g, side, xr, yr)
                try:
                    validate_curve(cand)
                except QscError:
                    continue
                new_t = cand.chord(tgt.id)
                if (
                    _touching(cand, {first.id, cap.id, back.id}) == before + 2
                    and chords_cross(cand, first, new_t)
                    and chords_cross(cand, back, new_t)
                ):
                    return cand
    raise QscError("FINGER_OBSTRUCTED", f"no finger of {chord_id} across {target_chord_id} adds exactly two crossings")


def trivial_loop(m: Multicurve, gluing: str) -> Multicurve:
    """Add a small embedded circle straddling ``gluing`` (crosses it twice)."""
    require_valid(m)
    g = m.complex.gluing(gluing)
    lo, hi = _gaps(m, g.id)[-1]
    xr, yr = _rank_pairs(lo, hi)[0]
    pids = {p.id for p in m.points}
    x = _fresh("t", pids)
    y = _fresh("t", pids | {x})
    cids = {c.id for c in m.chords}
    ca = _fresh("loop", cids)
    cb = _fresh("loop", cids | {ca})
    cap_a = Chord(ca, PointCopy(x, "a"), PointCopy(y, "a"), g.a.face, "left")
    if g.compatible:
        cap_b = Chord(cb, PointCopy(y, "b"), PointCopy(x, "b"), g.b.face, "left")
    else:
        cap_b = Chord(cb, PointCopy(x, "b"), PointCopy(y, "b"), g.b.face, "left")
    out = m.replace(
        points=m.points + (EdgePoint(x, g.id, xr), EdgePoint(y, g.id, yr)),
        chords=m.chords + (cap_a, cap_b),
        provenance={},
    )
    validate_curve(out)
    return out


def _finger_candidates(m: Multicurve) -> List[Tuple[str, str]]:
    out = []
    for a in m.chords:
        for b in m.chords:
            if a.id != b.id and a.face == b.face and not chords_cross(m, a, b):
                out.append((a.id, b.id))
    return out


def random_curve(
    c: SurfaceComplex,
    seed: int,
    n_classes: int = 2,
    n_fingers: int = 1,
    n_kinks: int = 0,
) -> Multicurve:
    """Seeded test curve: a realized class followed by finger moves and kinks.

    ``n_classes`` bounds the absolute value of each target class coordinate.
    The expected class vector, crossing count and parity are recorded in
    ``provenance``; fingers keep the class and parity, each kink flips parity.
    """
    summary = validate_complex(c)
    if not summary.orientable:
        raise QscError("NON_ORIENTABLE_INTEGER_TARGET", "random curves are built from integer classes")
    if not c.gluings:
        raise QscError("NO_GLUING", "the complex has no interior edge to carry a closed curve")
    rng = np.random.default_rng(seed)
    basis = evaluation_basis(c, "relative")
    target = tuple(int(v) for v in rng.integers(-n_classes, n_classes + 1, size=len(basis)))
    m = realize_class(c, basis, target)
    gids = [g.id for g in c.gluings]
    if not m.chords:
        m = trivial_loop(m, gids[int(rng.integers(len(gids)))])
    fingers = 0
    for _ in range(n_fingers):
        for _attempt in range(8):
            pairs = _finger_candidates(m)
            order = rng.permutation(len(pairs)) if pairs else []
            done = False
            for i in order:
                try:
                    m = finger_move(m, *pairs[int(i)])
                    done = True
                    break
                except QscError:
                    continue
            if done:
                fingers += 1
                break
            m = trivial_loop(m, gids[int(rng.integers(len(gids)))])
    kinks = 0
    for _ in range(n_kinks):
        chords = list(m.chords)
        for i in rng.permutation(len(chords)):
            ch = chords[int(i)]
            hosts = [g.id for g in c.gluings if ch.face in (g.a.face, g.b.face)]
            placed = False
            for j in rng.permutation(len(hosts)):
                try:
                    m = add_kink(m, ch.id, hosts[int(j)])
                    placed = True
                    break
                except QscError:
                    continue
            if placed:
                kinks += 1
                break
    prov = {
        "seed": seed,
        "basis": tuple(p.name for p in basis),
        "expected_class": target,
        "fingers": fingers,
        "kinks": kinks,
        "expected_crossings": 2 * fingers + kinks,
        "expected_rho_parity": kinks % 2,
    }
    log.debug("random_curve %s", prov)
    return m.replace(provenance=prov)
