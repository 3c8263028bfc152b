"""Resolution of double points by positive-chamber smoothing.

Near a crossing the two cooriented strands look like the coordinate axes with
normals along ``+x`` and ``+y``; the smoothing replaces them by the level set
``xy = eps > 0``.  In chord terms: direct both chords so their normals are on
the left, then rejoin tail of one to head of the other.  Edge points and the
normal sign at every edge point are untouched, so every evaluation of the
curve's class survives exactly.
"""

from __future__ import annotations

from typing import Tuple

from .curve import Chord, Multicurve, _raw_crossings, chords_cross, require_valid
from .errors import QscError
from .surface import natural_key

__all__ = ["smooth_crossing", "resolve", "resolve_counted"]


def smooth_crossing(m: Multicurve, crossing: Tuple[str, str, str]) -> Multicurve:
    face, x, y = crossing
    a, b = sorted((m.chord(x), m.chord(y)), key=lambda ch: natural_key(ch.id))
    if a.face != face or b.face != face or not chords_cross(m, a, b):
        raise QscError("NOT_A_CROSSING", f"chords {x} and {y} do not cross in face {face}")
    a, b = a.normalized(), b.normalized()
    new_a = Chord(a.id, a.tail, b.head, face, "left")
    new_b = Chord(b.id, b.tail, a.head, face, "left")
    rest = tuple(ch for ch in m.chords if ch.id not in (a.id, b.id))
    return m.replace(chords=rest + (new_a, new_b))


def resolve_counted(m: Multicurve) -> Tuple[Multicurve, int]:
    """Resolve every crossing; also return the number of smoothings performed."""
    require_valid(m)
    count = 0
    while True:
        crossings = _raw_crossings(m)
        if not crossings:
            return m, count
        m = smooth_crossing(m, crossings[0])
        count += 1


def resolve(m: Multicurve) -> Multicurve:
    return resolve_counted(m)[0]
