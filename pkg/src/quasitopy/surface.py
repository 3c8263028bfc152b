"""Polygonal surface complexes: faces with side gluings.

Side ``i`` of a ``k``-gon runs from corner ``i`` to corner ``i + 1 (mod k)`` in
the face's reference orientation.  A ``compatible`` gluing identifies two sides
with their traversal directions reversed (the orientable case); a ``twisted``
gluing keeps them.

Homology is computed on the dual complex: faces are dual vertices, gluings
(plus free sides, in relative mode) are dual edges and vertex links are dual
2-cells.  Evaluation paths live on that dual graph.
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Tuple

from . import snf
from .errors import QscError

__all__ = [
    "Alignment",
    "SideRef",
    "Gluing",
    "SurfaceComplex",
    "SurfaceSummary",
    "Step",
    "DualPath",
    "validate_complex",
    "evaluation_basis",
    "subdivide_side",
    "reverse_face",
    "reverse_face_path",
    "natural_key",
]


def natural_key(s: str):
    """Sort key treating digit runs numerically (``F2`` before ``F10``)."""
    return tuple((0, int(t)) if t.isdigit() else (1, t) for t in re.split(r"(\d+)", s) if t)


class Alignment(str, Enum):
    COMPATIBLE = "compatible"
    TWISTED = "twisted"


@dataclass(frozen=True, order=True)
class SideRef:
    face: str
    side: int

    def __str__(self) -> str:
        return f"{self.face}.{self.side}"


@dataclass(frozen=True)
class Gluing:
    id: str
    a: SideRef
    b: SideRef
    alignment: Alignment = Alignment.COMPATIBLE

    def side(self, which: str) -> SideRef:
        return self.a if which == "a" else self.b

    @property
    def compatible(self) -> bool:
        return self.alignment is Alignment.COMPATIBLE


@dataclass(frozen=True)
class SurfaceComplex:
    faces: Tuple[Tuple[str, int], ...]
    gluings: Tuple[Gluing, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "faces", tuple(sorted(((str(f), int(k)) for f, k in self.faces), key=lambda t: natural_key(t[0])))
        )
        object.__setattr__(self, "gluings", tuple(sorted(self.gluings, key=lambda g: natural_key(g.id))))

    def __hash__(self) -> int:
        # complexes key many caches; hash once
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.faces, self.gluings))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def face_ids(self) -> List[str]:
        return [f for f, _ in self.faces]

    def side_count(self, face: str) -> int:
        return _face_table(self)[face]

    def gluing(self, gid: str) -> Gluing:
        try:
            return _gluing_table(self)[gid]
        except KeyError:
            raise QscError("UNKNOWN_GLUING", f"no gluing {gid!r}") from None

    def partner(self, side: SideRef) -> Optional[Tuple[Gluing, str]]:
        """The gluing holding ``side`` and which of its sides it is, or None if free."""
        return _side_table(self).get(side)

    def sides(self) -> Iterable[SideRef]:
        for f, k in self.faces:
            for i in range(k):
                yield SideRef(f, i)

    def free_sides(self) -> List[SideRef]:
        return [s for s in self.sides() if self.partner(s) is None]

    def is_free(self, side: SideRef) -> bool:
        return self.partner(side) is None


@lru_cache(maxsize=256)
def _face_table(c: SurfaceComplex) -> Dict[str, int]:
    return dict(c.faces)


@lru_cache(maxsize=256)
def _gluing_table(c: SurfaceComplex) -> Dict[str, Gluing]:
    return {g.id: g for g in c.gluings}


@lru_cache(maxsize=256)
def _side_table(c: SurfaceComplex) -> Dict[SideRef, Tuple[Gluing, str]]:
    table = {}
    for g in c.gluings:
        table.setdefault(g.a, (g, "a"))
        table.setdefault(g.b, (g, "b"))
    return table


@dataclass(frozen=True)
class SurfaceSummary:
    component_count: int
    euler_characteristic: int
    orientable: bool
    boundary_component_count: int
    h1_rank_abs: int
    h1_rank_rel: int
    vertex_count: int = 0
    edge_count: int = 0
    face_count: int = 0


# ---------------------------------------------------------------- validation


def _check_structure(c: SurfaceComplex) -> None:
    ids = [f for f, _ in c.faces]
    if len(set(ids)) != len(ids):
        raise QscError("DUPLICATE_ID", "face ids must be unique")
    gids = [g.id for g in c.gluings]
    if len(set(gids)) != len(gids):
        raise QscError("DUPLICATE_ID", "gluing ids must be unique")
    for f, k in c.faces:
        if k < 1:
            raise QscError("DANGLING_SIDE_REF", f"face {f} has side count {k} < 1")
    table = _face_table(c)
    seen: Dict[SideRef, str] = {}
    for g in c.gluings:
        for s in (g.a, g.b):
            if s.face not in table or not 0 <= s.side < table[s.face]:
                raise QscError("DANGLING_SIDE_REF", f"gluing {g.id} refers to missing side {s}")
        if g.a == g.b:
            raise QscError("SIDE_GLUED_TWICE", f"gluing {g.id} glues {g.a} to itself")
        for s in (g.a, g.b):
            if s in seen:
                raise QscError("SIDE_GLUED_TWICE", f"side {s} is in gluings {seen[s]} and {g.id}")
            seen[s] = g.id


def _corner_identifications(c: SurfaceComplex):
    for g in c.gluings:
        ka, kb = c.side_count(g.a.face), c.side_count(g.b.face)
        a0, a1 = (g.a.face, g.a.side), (g.a.face, (g.a.side + 1) % ka)
        b0, b1 = (g.b.face, g.b.side), (g.b.face, (g.b.side + 1) % kb)
        if g.compatible:
            yield a0, b1
            yield a1, b0
        else:
            yield a0, b0
            yield a1, b1


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if natural_key(str(ry)) < natural_key(str(rx)):
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self):
        out = defaultdict(list)
        for x in self.parent:
            out[self.find(x)].append(x)
        return list(out.values())


def _link_walk(c: SurfaceComplex, face: str, corner: int, exit_start: bool):
    """Walk around a vertex starting at ``(face, corner)``.

    ``exit_start`` selects which flanking side is crossed first: the side that
    starts at the corner, or the one that ends there.  Yields
    ``(face, corner, crossed)`` where ``crossed`` is ``(gluing, which)`` for the
    side just crossed, or ``None`` when the walk hits a free side.
    """
    state = (face, corner, exit_start)
    start = state
    for _ in range(4 * sum(k for _, k in c.faces) + 4):
        f, cn, ex = state
        k = c.side_count(f)
        side = SideRef(f, cn if ex else (cn - 1) % k)
        hit = c.partner(side)
        if hit is None:
            yield f, cn, None, side
            return
        g, which = hit
        other = g.side("b" if which == "a" else "a")
        at_start = ex  # position of the corner on the exit side
        if g.compatible:
            at_start = not at_start
        ko = c.side_count(other.face)
        if at_start:
            state = (other.face, other.side, False)
        else:
            state = (other.face, (other.side + 1) % ko, True)
        yield f, cn, (g, which), side
        if state == start:
            return
    raise QscError("NON_MANIFOLD_VERTEX", "vertex link walk did not close")


@dataclass
class _Vertex:
    corners: List[Tuple[str, int]]
    interior: bool
    crossings: List[Tuple[Gluing, str]]
    entry: Optional[SideRef] = None
    exit: Optional[SideRef] = None


@dataclass
class _Analysis:
    vertices: List[_Vertex]
    components: List[List[str]]
    face_component: Dict[str, int]
    signs: Optional[Dict[str, int]]
    boundary_components: List[List[SideRef]]


@lru_cache(maxsize=256)
def _analyze(c: SurfaceComplex) -> _Analysis:
    _check_structure(c)
    corners = [(f, i) for f, k in c.faces for i in range(k)]
    uf = _UnionFind(corners)
    for x, y in _corner_identifications(c):
        uf.union(x, y)
    vertices = []
    for orbit in sorted(uf.classes(), key=lambda cl: min((natural_key(f), i) for f, i in cl)):
        orbit_set = set(orbit)
        f0, c0 = min(orbit, key=lambda fc: (natural_key(fc[0]), fc[1]))
        start = None
        # a boundary vertex is walked from a corner flanked by a free side
        for f, cn in sorted(orbit, key=lambda fc: (natural_key(fc[0]), fc[1])):
            k = c.side_count(f)
            if c.is_free(SideRef(f, cn)):
                start = (f, cn, False, SideRef(f, cn))
                break
            if c.is_free(SideRef(f, (cn - 1) % k)):
                start = (f, cn, True, SideRef(f, (cn - 1) % k))
                break
        if start is None:
            steps = list(_link_walk(c, f0, c0, True))
            v = _Vertex([(f, cn) for f, cn, _, _ in steps], True, [x for _, _, x, _ in steps])
        else:
            f, cn, ex, entry = start
            steps = list(_link_walk(c, f, cn, ex))
            v = _Vertex(
                [(f, cn) for f, cn, _, _ in steps],
                False,
                [x for _, _, x, _ in steps if x is not None],
                entry=entry,
                exit=steps[-1][3],
            )
        if set(v.corners) != orbit_set:
            raise QscError("NON_MANIFOLD_VERTEX", f"vertex at corner {f0}.{c0} is not a disk or half-disk")
        vertices.append(v)

    # face components and orientation signs
    adj = defaultdict(list)
    for g in c.gluings:
        adj[g.a.face].append((g.b.face, g))
        adj[g.b.face].append((g.a.face, g))
    comp_of: Dict[str, int] = {}
    components: List[List[str]] = []
    signs: Dict[str, int] = {}
    orientable = True
    for f in c.face_ids:
        if f in comp_of:
            continue
        idx = len(components)
        members = [f]
        comp_of[f] = idx
        signs[f] = 1
        queue = deque([f])
        while queue:
            u = queue.popleft()
            for w, g in adj[u]:
                want = signs[u] if g.compatible else -signs[u]
                if w not in comp_of:
                    comp_of[w] = idx
                    signs[w] = want
                    members.append(w)
                    queue.append(w)
                elif signs[w] != want:
                    orientable = False
        components.append(members)

    free = c.free_sides()
    buf = _UnionFind(free)
    for v in vertices:
        if not v.interior:
            buf.union(v.entry, v.exit)
    bcomps = sorted(buf.classes(), key=lambda cl: min(cl)) if free else []
    return _Analysis(vertices, components, comp_of, signs if orientable else None, bcomps)


def validate_complex(c: SurfaceComplex) -> SurfaceSummary:
    a = _analyze(c)
    v = len(a.vertices)
    e = len(c.gluings) + len(c.free_sides())
    f = len(c.faces)
    return SurfaceSummary(
        component_count=len(a.components),
        euler_characteristic=v - e + f,
        orientable=a.signs is not None,
        boundary_component_count=len(a.boundary_components),
        h1_rank_abs=_dual_homology(c, "absolute").rank,
        h1_rank_rel=_dual_homology(c, "relative").rank,
        vertex_count=v,
        edge_count=e,
        face_count=f,
    )


def face_components(c: SurfaceComplex) -> Dict[str, str]:
    """Map each face to a label of its ambient connected component (smallest face id)."""
    a = _analyze(c)
    labels = {i: min(members, key=natural_key) for i, members in enumerate(a.components)}
    return {f: labels[i] for f, i in a.face_component.items()}


def orientation_signs(c: SurfaceComplex) -> Optional[Dict[str, int]]:
    return _analyze(c).signs


def boundary_component_of(c: SurfaceComplex, side: SideRef) -> List[SideRef]:
    for comp in _analyze(c).boundary_components:
        if side in comp:
            return sorted(comp)
    raise QscError("SIDE_NOT_FREE", f"{side} is not a boundary side")


# ---------------------------------------------------------------- dual paths


@dataclass(frozen=True)
class Step:
    """Cross gluing ``gluing`` outward from ``face`` through its side ``side`` ('a' or 'b')."""

    face: str
    gluing: str
    side: str = "a"


@dataclass(frozen=True)
class DualPath:
    steps: Tuple[Step, ...]
    kind: str = "closed"  # or "boundary_to_boundary"
    start: Optional[SideRef] = None
    end: Optional[SideRef] = None
    name: str = ""

    @property
    def closed(self) -> bool:
        return self.kind == "closed"


def step_target(c: SurfaceComplex, step: Step) -> Tuple[SideRef, SideRef]:
    """Exit side and entry side of a step."""
    g = c.gluing(step.gluing)
    out = g.side(step.side)
    if out.face != step.face:
        raise QscError("BAD_PATH", f"gluing {g.id} side {step.side} is not on face {step.face}")
    return out, g.side("b" if step.side == "a" else "a")


def validate_path(c: SurfaceComplex, p: DualPath) -> None:
    face = None
    if p.kind == "closed":
        if not p.steps:
            raise QscError("BAD_PATH", "closed path needs at least one step")
        face = p.steps[0].face
    elif p.kind == "boundary_to_boundary":
        if p.start is None or p.end is None:
            raise QscError("BAD_PATH", "boundary path needs two endpoints")
        for s in (p.start, p.end):
            if s.face not in _face_table(c) or not c.is_free(s):
                raise QscError("BAD_PATH", f"{s} is not a free side")
        face = p.start.face
    else:
        raise QscError("BAD_PATH", f"unknown path kind {p.kind!r}")
    for st in p.steps:
        if st.face != face:
            raise QscError("BAD_PATH", f"step {st.face}>{st.gluing} does not start in face {face}")
        _, entry = step_target(c, st)
        face = entry.face
    final = p.steps[0].face if p.closed else p.end.face
    if face != final:
        raise QscError("BAD_PATH", f"path ends in face {face}, expected {final}")


def side_coefficient(c: SurfaceComplex, side: SideRef) -> Tuple[Tuple[str, str], int]:
    """Edge key and sign of ``side`` traversed along its own direction."""
    hit = c.partner(side)
    if hit is None:
        return ("free", str(side)), 1
    g, which = hit
    if which == "a" or not g.compatible:
        return ("glue", g.id), 1
    return ("glue", g.id), -1


def path_route(c: SurfaceComplex, p: DualPath) -> Dict[Tuple[str, str], int]:
    """Primal edge chain freely homotopic (rel boundary) to the dual path."""
    validate_path(c, p)
    chain: Dict[Tuple[str, str], int] = defaultdict(int)

    def walk(face: str, frm: int, to: int):
        k = c.side_count(face)
        i = frm
        while i != to:
            key, sgn = side_coefficient(c, SideRef(face, i))
            chain[key] += sgn
            i = (i + 1) % k

    if p.closed:
        face, corner = p.steps[0].face, 0
    else:
        face, corner = p.start.face, p.start.side
    for st in p.steps:
        out, entry = step_target(c, st)
        walk(face, corner, out.side)
        g = c.gluing(st.gluing)
        face = entry.face
        corner = (entry.side + 1) % c.side_count(face) if g.compatible else entry.side
    if p.closed:
        walk(face, corner, 0)
    else:
        walk(face, corner, p.end.side)
    return {k: v for k, v in chain.items() if v}


# ------------------------------------------------------------ dual homology


@dataclass
class _DualHomology:
    rank: int
    torsion: List[int]
    basis: List[DualPath]


def _dual_edges(c: SurfaceComplex, mode: str):
    edges = [(("glue", g.id), g.a.face, g.b.face) for g in c.gluings]
    if mode == "relative":
        edges += [(("free", str(s)), s.face, "*") for s in c.free_sides()]
    return edges


@lru_cache(maxsize=256)
def _dual_homology(c: SurfaceComplex, mode: str) -> _DualHomology:
    a = _analyze(c)
    edges = _dual_edges(c, mode)
    nodes = (["*"] if mode == "relative" and any(e[2] == "*" for e in edges) else []) + c.face_ids
    inc = defaultdict(list)
    for idx, (_, u, v) in enumerate(edges):
        inc[u].append((idx, v, +1))
        inc[v].append((idx, u, -1))
    parent: Dict[str, Optional[Tuple[int, str, int]]] = {}
    depth: Dict[str, int] = {}
    tree = set()
    for root in nodes:
        if root in parent:
            continue
        parent[root] = None
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for idx, w, sgn in inc[u]:
                if w not in parent:
                    parent[w] = (idx, u, sgn)  # edge idx traversed u -> w in direction sgn
                    depth[w] = depth[u] + 1
                    tree.add(idx)
                    queue.append(w)
    cotree = [i for i in range(len(edges)) if i not in tree]

    def up_path(node, stop):
        # traversals from `stop` down to `node`, as (edge idx, direction)
        out = []
        while node != stop:
            idx, u, sgn = parent[node]
            out.append((idx, sgn))
            node = u
        return out[::-1]

    def lca(x, y):
        while depth[x] > depth[y]:
            x = parent[x][1]
        while depth[y] > depth[x]:
            y = parent[y][1]
        while x != y:
            x, y = parent[x][1], parent[y][1]
        return x

    cycles = []
    for idx in cotree:
        _, u, v = edges[idx]
        top = lca(u, v)
        down = up_path(u, top)
        back = [(i, -s) for i, s in reversed(up_path(v, top))]
        cycles.append(down + [(idx, +1)] + back)

    # relations: vertex links, in fundamental-cycle coordinates (= cotree coefficients)
    col = {idx: j for j, idx in enumerate(cotree)}
    key_index = {e[0]: i for i, e in enumerate(edges)}
    relations = []
    for v in a.vertices:
        if mode == "absolute" and not v.interior:
            continue
        vec = [0] * len(cotree)
        chain = defaultdict(int)
        for g, which in v.crossings:
            chain[key_index[("glue", g.id)]] += 1 if which == "a" else -1
        if not v.interior:
            chain[key_index[("free", str(v.entry))]] -= 1
            chain[key_index[("free", str(v.exit))]] += 1
        for idx, val in chain.items():
            if idx in col:
                vec[col[idx]] += val
        relations.append(vec)

    k = len(cotree)
    rel_t = [[relations[j][i] for j in range(len(relations))] for i in range(k)]  # k x m
    d, u, _ = snf.smith_normal_form(rel_t, len(relations))
    factors = [d[i][i] for i in range(min(k, len(relations))) if d[i][i]]
    r = len(factors)
    free_rank = k - r
    coords = [[u[i][j] for i in range(r, k)] for j in range(k)]  # free coords of cycle j

    chosen = _unimodular_subset(coords, free_rank)
    basis = [_cycle_to_path(c, edges, cycles[j], f"{mode[0]}{n}") for n, j in enumerate(chosen)]
    return _DualHomology(free_rank, [x for x in factors if x > 1], basis)


def _unimodular_subset(coords: List[List[int]], rank: int, limit: int = 50000) -> List[int]:
    if rank == 0:
        return []
    n = len(coords)
    for count, combo in enumerate(itertools.combinations(range(n), rank)):
        if count >= limit:
            break
        if abs(snf.determinant([coords[j] for j in combo])) == 1:
            return list(combo)
    # fall back to a rationally independent subset (finite index)
    chosen: List[int] = []
    for j in range(n):
        trial = chosen + [j]
        if snf.rank([coords[i] for i in trial]) == len(trial):
            chosen = trial
        if len(chosen) == rank:
            break
    return chosen


def _cycle_to_path(c: SurfaceComplex, edges, traversals, name: str) -> DualPath:
    steps = []
    start = end = None
    for idx, sgn in traversals:
        key, u, v = edges[idx]
        if key[0] == "free":
            face, side = key[1].rsplit(".", 1)
            ref = SideRef(face, int(side))
            if sgn < 0:
                start = ref
            else:
                end = ref
            continue
        g = c.gluing(key[1])
        if sgn > 0:
            steps.append(Step(g.a.face, g.id, "a"))
        else:
            steps.append(Step(g.b.face, g.id, "b"))
    if start is not None or end is not None:
        return DualPath(tuple(steps), "boundary_to_boundary", start, end, name)
    return DualPath(tuple(steps), "closed", None, None, name)


def evaluation_basis(c: SurfaceComplex, mode: str = "relative") -> List[DualPath]:
    """Dual paths whose classes form a basis of the free part of H_1.

    ``absolute`` gives closed paths (H_1(Z)); ``relative`` also allows paths
    running from boundary to boundary (H_1(Z, dZ)).
    """
    if mode not in ("absolute", "relative"):
        raise QscError("BAD_MODE", f"unknown mode {mode!r}")
    try:
        _analyze(c)
    except QscError as exc:
        raise QscError("NOT_VALID_COMPLEX", str(exc)) from exc
    return list(_dual_homology(c, mode).basis)


def homology_torsion(c: SurfaceComplex, mode: str) -> List[int]:
    return list(_dual_homology(c, mode).torsion)


# ------------------------------------------------------------- edits


def subdivide_side(c: SurfaceComplex, s: SideRef) -> SurfaceComplex:
    """Split the free side ``s`` in two; later sides of the face shift up by one."""
    _analyze(c)
    if s.face not in _face_table(c) or not 0 <= s.side < c.side_count(s.face):
        raise QscError("DANGLING_SIDE_REF", f"no side {s}")
    if not c.is_free(s):
        raise QscError("SIDE_NOT_FREE", f"{s} is glued")

    def shift(ref: SideRef) -> SideRef:
        if ref.face == s.face and ref.side > s.side:
            return SideRef(ref.face, ref.side + 1)
        return ref

    faces = tuple((f, k + 1 if f == s.face else k) for f, k in c.faces)
    gluings = tuple(Gluing(g.id, shift(g.a), shift(g.b), g.alignment) for g in c.gluings)
    return SurfaceComplex(faces, gluings)


def reverse_face(c: SurfaceComplex, face: str) -> SurfaceComplex:
    """Reverse one face's reference orientation (a gauge change of the same surface).

    Side ``i`` becomes side ``k - 1 - i`` and every gluing with exactly one
    side on ``face`` switches alignment.
    """
    k = c.side_count(face)

    def flip(ref: SideRef) -> SideRef:
        return SideRef(face, k - 1 - ref.side) if ref.face == face else ref

    gluings = []
    for g in c.gluings:
        touches = (g.a.face == face) + (g.b.face == face)
        align = g.alignment
        if touches == 1:
            align = Alignment.TWISTED if g.compatible else Alignment.COMPATIBLE
        gluings.append(Gluing(g.id, flip(g.a), flip(g.b), align))
    return SurfaceComplex(c.faces, tuple(gluings))


def reverse_face_path(c: SurfaceComplex, p: DualPath, face: str) -> DualPath:
    """The same dual path described on ``reverse_face(c, face)``."""
    k = c.side_count(face)

    def flip(ref: Optional[SideRef]) -> Optional[SideRef]:
        if ref is not None and ref.face == face:
            return SideRef(face, k - 1 - ref.side)
        return ref

    return DualPath(p.steps, p.kind, flip(p.start), flip(p.end), p.name)
