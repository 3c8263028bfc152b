"""The intersection functional of a cooriented curve and its inverse.

A cooriented curve in normal position defines an integral cellular cocycle:
on each edge, the signed number of curve points, signed by whether the normal
runs along the edge direction.  Its value on a dual path is the algebraic
intersection number of the path with the curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from . import snf
from .curve import (
    Chord,
    Circle,
    EdgePoint,
    Multicurve,
    PointCopy,
    boundary_key,
    edge_cochain,
    crossing_report,
    require_valid,
)
from .errors import QscError
from .surface import (
    DualPath,
    SideRef,
    SurfaceComplex,
    _analyze,
    natural_key,
    path_route,
    side_coefficient,
    validate_complex,
)

__all__ = [
    "ClassVector",
    "evaluate_path",
    "class_vector",
    "flip",
    "realize_class",
    "bsigma",
]


@dataclass(frozen=True)
class ClassVector:
    basis: Tuple[DualPath, ...]
    values: Tuple[int, ...]
    coefficient_mode: str = "integer"

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


def evaluate_path(m: Multicurve, p: DualPath) -> int:
    require_valid(m)
    if m.relative and not p.closed:
        raise QscError("PATH_CURVE_MISMATCH", "a relative curve pairs only with closed paths")
    route = path_route(m.complex, p)
    cochain = edge_cochain(m)
    return sum(coef * cochain.get(key, 0) for key, coef in route.items())


def class_vector(m: Multicurve, basis: Sequence[DualPath]) -> ClassVector:
    values = [evaluate_path(m, p) for p in basis]
    if validate_complex(m.complex).orientable:
        return ClassVector(tuple(basis), tuple(values), "integer")
    return ClassVector(tuple(basis), tuple(v % 2 for v in values), "mod2")


def flip(m: Multicurve) -> Multicurve:
    """Reverse the coorientation of every component."""
    return m.replace(
        chords=tuple(ch.flipped() for ch in m.chords),
        circles=tuple(Circle(ci.face, -ci.sign) for ci in m.circles),
    )


def bsigma(m: Multicurve) -> Dict[str, int]:
    """Double-point parity per ambient component; zero on every embedding."""
    require_valid(m, closed=True)
    return dict(crossing_report(m).rho_mod2)


# --------------------------------------------------------------- realization


def _edge_keys(c: SurfaceComplex, relative: bool) -> List[Tuple[str, str]]:
    keys = [("glue", g.id) for g in c.gluings]
    if relative:
        keys += [("free", str(s)) for s in c.free_sides()]
    return keys


def _edge_ends(c: SurfaceComplex) -> Dict[Tuple[str, str], Tuple[int, int]]:
    """Start and end vertex index of every edge (gluings run along side a)."""
    corner_vertex = {}
    for i, v in enumerate(_analyze(c).vertices):
        for fc in v.corners:
            corner_vertex[fc] = i
    out = {}
    for g in c.gluings:
        k = c.side_count(g.a.face)
        out[("glue", g.id)] = (corner_vertex[(g.a.face, g.a.side)], corner_vertex[(g.a.face, (g.a.side + 1) % k)])
    for s in c.free_sides():
        k = c.side_count(s.face)
        out[("free", str(s))] = (corner_vertex[(s.face, s.side)], corner_vertex[(s.face, (s.side + 1) % k)])
    return out


def _reduce_support(c: SurfaceComplex, keys, w: List[int], relative: bool) -> List[int]:
    """Greedy L1 descent over vertex coboundaries (deterministic order)."""
    vertices = _analyze(c).vertices
    ends = _edge_ends(c)
    index = {k: i for i, k in enumerate(keys)}
    moves = []
    for vi, v in enumerate(vertices):
        if not relative and not v.interior:
            continue
        delta = [0] * len(keys)
        for key, (s, e) in ends.items():
            if key not in index:
                continue
            delta[index[key]] += int(e == vi) - int(s == vi)
        if any(delta):
            moves.append(delta)
    improved = True
    while improved:
        improved = False
        for delta in moves:
            for sgn in (1, -1):
                trial = [x + sgn * d for x, d in zip(w, delta)]
                if sum(map(abs, trial)) < sum(map(abs, w)):
                    w = trial
                    improved = True
    return w


def realize_class(
    c: SurfaceComplex, basis: Sequence[DualPath], target: Sequence[int], relative: bool = False
) -> Multicurve:
    """An embedded cooriented multicurve whose class vector on ``basis`` is ``target``."""
    summary = validate_complex(c)
    if not summary.orientable:
        raise QscError("NON_ORIENTABLE_INTEGER_TARGET", "integer classes need an orientable complex")
    if len(target) != len(basis):
        raise QscError("INCONSISTENT_TARGET", "target and basis lengths differ")
    for p in basis:
        if relative and not p.closed:
            raise QscError("PATH_CURVE_MISMATCH", "relative curves pair only with closed paths")
    keys, n_faces, factored = _realization_system(c, tuple(basis), relative)
    rhs = [0] * n_faces + [int(t) for t in target]
    w = _solve_factored(factored, rhs, len(keys))
    if w is None:
        raise QscError("INCONSISTENT_TARGET", f"target {tuple(target)} is not in the image")
    w = _reduce_support(c, keys, w, relative)
    return _curve_from_cochain(c, dict(zip(keys, w)), relative)


@lru_cache(maxsize=64)
def _realization_system(c: SurfaceComplex, basis: Tuple[DualPath, ...], relative: bool):
    """Cocycle conditions (one row per face) stacked on the basis functionals, factored once."""
    keys = _edge_keys(c, relative)
    index = {k: i for i, k in enumerate(keys)}
    rows = []
    for f, k in c.faces:
        row = [0] * len(keys)
        for i in range(k):
            key, sgn = side_coefficient(c, SideRef(f, i))
            if key in index:
                row[index[key]] += sgn
        rows.append(row)
    for p in basis:
        row = [0] * len(keys)
        for key, coef in path_route(c, p).items():
            if key in index:
                row[index[key]] += coef
        rows.append(row)
    return keys, len(c.faces), snf.smith_normal_form(rows, len(keys))


def _solve_factored(factored, rhs: List[int], n: int):
    d, u, v = factored
    ub = snf.matvec(u, rhs)
    y = [0] * n
    for i, val in enumerate(ub):
        piv = d[i][i] if i < n else 0
        if piv == 0:
            if val:
                return None
        elif val % piv:
            return None
        else:
            y[i] = val // piv
    return snf.matvec(v, y) if n else []


def _curve_from_cochain(c: SurfaceComplex, w: Dict[Tuple[str, str], int], relative: bool) -> Multicurve:
    points: List[EdgePoint] = []
    sign_a: Dict[str, int] = {}
    n = 0
    for key in sorted(w, key=lambda k: (k[0], natural_key(k[1]))):
        val = w[key]
        for j in range(abs(val)):
            pid = f"p{n}"
            n += 1
            rank = Fraction(j + 1, abs(val) + 1)
            if key[0] == "glue":
                points.append(EdgePoint(pid, key[1], rank))
            else:
                face, side = key[1].rsplit(".", 1)
                points.append(EdgePoint(pid, SideRef(face, int(side)), rank))
            sign_a[pid] = 1 if val > 0 else -1
    draft = Multicurve(c, tuple(points), (), (), relative)
    by_face: Dict[str, List[Tuple[tuple, PointCopy, int]]] = {f: [] for f in c.face_ids}
    for p in points:
        copies = ["a"] if p.boundary else ["a", "b"]
        for cp in copies:
            pc = PointCopy(p.id, cp)
            s = sign_a[p.id]
            if cp == "b" and c.gluing(p.host).compatible:
                s = -s
            side = p.host if p.boundary else c.gluing(p.host).side(cp)
            by_face[side.face].append((boundary_key(draft, pc), pc, s))
    chords = []
    for f in c.face_ids:
        stack: List[Tuple[PointCopy, int]] = []
        for _, pc, s in sorted(by_face[f], key=lambda t: t[0]):
            if stack and stack[-1][1] == -s:
                other, os_ = stack.pop()
                tail, head = (other, pc) if os_ < 0 else (pc, other)
                chords.append(Chord(f"c{len(chords)}", tail, head, f, "left"))
            else:
                stack.append((pc, s))
        if stack:
            raise QscError("INCONSISTENT_TARGET", f"cochain is not a cocycle on face {f}")
    return Multicurve(c, tuple(points), tuple(chords), (), relative)
