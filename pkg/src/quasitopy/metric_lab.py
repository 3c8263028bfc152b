"""Numerics for the local crossing model and the flat-torus norm.

Local model: near a crossing of ``q`` sheets the immersion looks like the
union of coordinate hyperplanes ``x_1 ... x_q = 0``; the resolution replaces
it by the level set ``H_eps = {x_1 ... x_q = eps}``.  Everything is clipped to
the cube ``[-w, w]^q``.

Flat torus: ``R^2 / A Z^2``.  A class ``h`` is represented by straight closed
geodesics, so its norm is ``|A h|``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from .errors import QscError

__all__ = [
    "LocalModelConfig",
    "VolumeEstimate",
    "VolumeDrop",
    "FlowLevel",
    "LatticeMetric",
    "NormReport",
    "BallProbeReport",
    "hypersurface_volume",
    "volume_estimate",
    "resolution_volume_drop",
    "level_set_samples",
    "gradient_flow_trace",
    "torus_norm",
    "triangle_check",
    "unit_ball_probe",
]

MC_CHUNK = 1 << 16


@dataclass(frozen=True)
class LocalModelConfig:
    q: int = 2
    epsilon: float = 0.0
    window_halfwidth: float = 1.0
    quadrature_step: float = 0.05
    mc_samples: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        bad = []
        if self.q not in (2, 3):
            bad.append(f"q={self.q} (only 2 or 3)")
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            bad.append(f"epsilon={self.epsilon}")
        if not self.window_halfwidth > 0:
            bad.append(f"window_halfwidth={self.window_halfwidth}")
        if not self.quadrature_step > 0:
            bad.append(f"quadrature_step={self.quadrature_step}")
        if self.mc_samples < 1 or self.workers < 1:
            bad.append("mc_samples and workers must be positive")
        if bad:
            raise QscError("BAD_CONFIG", "; ".join(bad))


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float = 0.0
    method: str = "exact"
    # independent second estimate (q=2 only)
    check: Optional[float] = None


@dataclass(frozen=True)
class VolumeDrop:
    vol0: float
    vol_eps: float
    drop: float
    stderr: float
    falsified: bool


# --------------------------------------------------------------- q = 2


def _branch_limits(eps: float, w: float) -> Optional[Tuple[float, float]]:
    lo = eps / w
    return (lo, w) if lo < w else None


def _arc_length_x(eps: float, x0: float, x1: float) -> float:
    """Length of ``y = eps/x`` over ``[x0, x1]``, integrating in ``x``."""
    f = lambda x: math.sqrt(1.0 + (eps / (x * x)) ** 2)
    # the integrand is steep near x0 when eps is small; split at the vertex
    v = math.sqrt(eps)
    pts = [p for p in (v,) if x0 < p < x1]
    val, _ = integrate.quad(f, x0, x1, points=pts or None, epsabs=0.0, epsrel=1e-13, limit=500)
    return val


def _arc_length_log(eps: float, x0: float, x1: float, step: float) -> float:
    """Same length, in the parametrization ``x = e^u`` with composite Gauss-Legendre."""
    u0, u1 = math.log(x0), math.log(x1)
    g = lambda u: np.sqrt(np.exp(2 * u) + eps * eps * np.exp(-2 * u))
    nodes, weights = np.polynomial.legendre.leggauss(20)
    panels = max(4, math.ceil((u1 - u0) / step))
    prev = None
    for _ in range(12):
        edges = np.linspace(u0, u1, panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[1:] + edges[:-1])
        u = mid[:, None] + half[:, None] * nodes[None, :]
        val = float(np.sum(half * (g(u) @ weights)))
        if prev is not None and abs(val - prev) <= 1e-14 * abs(val):
            return val
        prev = val
        panels *= 2
    return val


# --------------------------------------------------------------- q = 3


def _sheet_samples(eps: float, w: float, n: int, rng: np.random.Generator):
    """Uniform samples of the log-coordinate triangle carrying one sheet.

    With ``x = e^u, y = e^v`` the (+,+,+) sheet ``z = eps/(xy)`` inside the
    cube is ``u <= L, v <= L, u + v >= M`` where ``L = ln w`` and
    ``M = ln(eps/w)``; its area element is
    ``sqrt(x^2 y^2 + eps^2/x^2 + eps^2/y^2) du dv``, which is bounded there.
    """
    L, M = math.log(w), math.log(eps / w)
    side = 2 * L - M
    a, b = rng.random(n), rng.random(n)
    flip = a + b > 1
    a = np.where(flip, 1 - a, a)
    b = np.where(flip, 1 - b, b)
    # (a, b) uniform on the unit right triangle; map its corner to (L, L)
    u, v = L - side * a, L - side * b
    return u, v, side * side / 2


def _sheet_chunk(eps: float, w: float, seed: int, index: int, n: int) -> Tuple[float, float]:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    u, v, area = _sheet_samples(eps, w, n, rng)
    x, y = np.exp(u), np.exp(v)
    f = area * np.sqrt((x * y) ** 2 + (eps / x) ** 2 + (eps / y) ** 2)
    return float(f.sum()), float((f * f).sum())


def _sheet_area_mc(eps: float, w: float, samples: int, seed: int, workers: int) -> Tuple[float, float]:
    sizes = [MC_CHUNK] * (samples // MC_CHUNK)
    if samples % MC_CHUNK:
        sizes.append(samples % MC_CHUNK)
    jobs = [(eps, w, seed, i, n) for i, n in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda j: _sheet_chunk(*j), jobs))
    else:
        parts = [_sheet_chunk(*j) for j in jobs]
    # combine in chunk order so the result does not depend on scheduling
    s = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s / samples
    var = max(s2 / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / max(samples - 1, 1))


def volume_estimate(cfg: LocalModelConfig) -> VolumeEstimate:
    w, eps = cfg.window_halfwidth, cfg.epsilon
    if eps == 0:
        return VolumeEstimate(4 * w if cfg.q == 2 else 12 * w * w)
    if cfg.q == 2:
        lim = _branch_limits(eps, w)
        if lim is None:
            return VolumeEstimate(0.0, method="quadrature", check=0.0)
        a = 2 * _arc_length_x(eps, *lim)
        b = 2 * _arc_length_log(eps, *lim, cfg.quadrature_step)
        if abs(a - b) > 1e-6 * max(abs(a), 1e-300):
            raise QscError("QUADRATURE_DISAGREEMENT", f"x-quadrature {a!r} vs log-quadrature {b!r}")
        return VolumeEstimate(a, method="quadrature", check=b)
    if eps >= w**3:
        return VolumeEstimate(0.0, method="monte-carlo")
    mean, se = _sheet_area_mc(eps, w, cfg.mc_samples, cfg.seed, cfg.workers)
    # four congruent sheets, one per chamber with positive product
    return VolumeEstimate(4 * mean, 4 * se, "monte-carlo")


def hypersurface_volume(cfg: LocalModelConfig) -> float:
    """(q-1)-volume of ``H_eps`` inside the window."""
    return volume_estimate(cfg).value


def resolution_volume_drop(cfg: LocalModelConfig) -> VolumeDrop:
    if not cfg.epsilon > 0:
        raise QscError("BAD_CONFIG", "the volume drop needs epsilon > 0")
    v0 = volume_estimate(LocalModelConfig(cfg.q, 0.0, cfg.window_halfwidth)).value
    ve = volume_estimate(cfg)
    drop = v0 - ve.value
    return VolumeDrop(v0, ve.value, drop, ve.stderr, falsified=not drop > 3 * ve.stderr)


def level_set_samples(cfg: LocalModelConfig, n: int) -> np.ndarray:
    """Points of ``H_eps`` in the window, spread over every positive-product chamber."""
    if not cfg.epsilon > 0:
        raise QscError("BAD_CONFIG", "samples need epsilon > 0")
    w, eps = cfg.window_halfwidth, cfg.epsilon
    rng = np.random.default_rng(cfg.seed)
    if cfg.q == 2:
        lo, hi = _branch_limits(eps, w) or (w, w)
        x = np.exp(rng.uniform(math.log(lo), math.log(hi), n))
        pts = np.stack([x, eps / x], axis=1)
        signs = np.array([[1, 1], [-1, -1]])
    else:
        u, v, _ = _sheet_samples(eps, w, n, rng)
        x, y = np.exp(u), np.exp(v)
        pts = np.stack([x, y, eps / (x * y)], axis=1)
        signs = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]])
    return pts * signs[rng.integers(len(signs), size=n)]


# ------------------------------------------------------------ gradient flow


@dataclass(frozen=True)
class FlowLevel:
    epsilon: float
    volume: float
    # discrete estimate of the same quantity from the flowed sample points
    discrete: float
    residual: float


def _flow(points: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Carry points along ``grad f / |grad f|^2`` so that ``f`` advances with time."""
    n, q = points.shape

    def rhs(_t, flat):
        x = flat.reshape(n, q)
        prod = np.prod(x, axis=1, keepdims=True)
        grad = prod / x
        return (grad / np.sum(grad * grad, axis=1, keepdims=True)).ravel()

    if len(levels) == 1:
        return points[None].copy()
    sol = integrate.solve_ivp(
        rhs, (levels[0], levels[-1]), points.ravel(), method="DOP853", t_eval=levels, rtol=1e-12, atol=1e-14
    )
    if not sol.success:
        raise QscError("FLOW_FAILED", sol.message)
    return sol.y.T.reshape(len(levels), n, q)


def _triangulated_area(grid: np.ndarray) -> float:
    a, b, c, d = grid[:-1, :-1], grid[1:, :-1], grid[:-1, 1:], grid[1:, 1:]
    t1 = np.linalg.norm(np.cross(b - a, c - a), axis=-1)
    t2 = np.linalg.norm(np.cross(b - d, c - d), axis=-1)
    return 0.5 * float(t1.sum() + t2.sum())


def gradient_flow_trace(
    q: int,
    eps0: float,
    eps1: float,
    arc,
    steps: int = 20,
    resolution: int = 200,
) -> List[FlowLevel]:
    """Push a piece of ``H_eps0`` through the levels up to ``eps1``.

    ``arc`` is an interval ``(x0, x1)`` on the branch ``y = eps0/x`` for
    ``q = 2``, or a rectangle ``((x0, x1), (y0, y1))`` parametrizing the
    sheet ``z = eps0/(xy)`` for ``q = 3``.
    """
    if q not in (2, 3):
        raise QscError("BAD_CONFIG", f"q={q}")
    if not (0 < eps0 <= eps1):
        raise QscError("BAD_CONFIG", f"need 0 < eps0 <= eps1, got {eps0}, {eps1}")
    if eps0 == eps1:
        steps = 1
    levels = np.linspace(eps0, eps1, steps)
    if q == 2:
        x0, x1 = sorted(float(t) for t in arc)
        if not (x0 > 0 or x1 < 0):
            raise QscError("ARC_NOT_IN_POSITIVE_CHAMBER", f"arc x in [{x0}, {x1}] crosses an axis")
        sgn = 1.0 if x0 > 0 else -1.0
        xs = sgn * np.exp(np.linspace(math.log(abs(x0 if sgn > 0 else x1)), math.log(abs(x1 if sgn > 0 else x0)), resolution))
        pts = np.stack([xs, eps0 / xs], axis=1)
        track = _flow(pts, levels)
        out = []
        for eps, p in zip(levels, track):
            ends = np.abs(p[[0, -1], 0])
            exact = _arc_length_x(float(eps), float(ends.min()), float(ends.max()))
            poly = float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1)))
            out.append(FlowLevel(float(eps), exact, poly, float(np.max(np.abs(np.prod(p, axis=1) - eps)))))
        return out
    (x0, x1), (y0, y1) = (sorted(map(float, r)) for r in arc)
    if not (x0 > 0 and y0 > 0):
        raise QscError("ARC_NOT_IN_POSITIVE_CHAMBER", "the patch must have x, y > 0 (then z > 0 too)")
    m = max(8, resolution // 4)
    gx, gy = np.meshgrid(np.linspace(x0, x1, m), np.linspace(y0, y1, m), indexing="ij")
    pts = np.stack([gx, gy, eps0 / (gx * gy)], axis=-1).reshape(-1, 3)
    track = _flow(pts, levels)
    out = []
    for eps, p in zip(levels, track):
        grid = p.reshape(m, m, 3)
        area = _triangulated_area(grid)
        out.append(FlowLevel(float(eps), area, area, float(np.max(np.abs(np.prod(p, axis=1) - eps)))))
    return out


# ---------------------------------------------------------------- flat torus


@dataclass(frozen=True)
class LatticeMetric:
    basis: Tuple[Tuple[float, float], Tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))

    def __post_init__(self):
        a = np.asarray(self.basis, dtype=float)
        if a.shape != (2, 2) or not np.all(np.isfinite(a)):
            raise QscError("BAD_CONFIG", "lattice basis must be a finite 2x2 matrix")
        if abs(np.linalg.det(a)) <= 1e-14 * max(1.0, float(np.abs(a).max()) ** 2):
            raise QscError("BAD_CONFIG", "lattice basis is singular")
        object.__setattr__(self, "basis", tuple(tuple(float(v) for v in row) for row in a))

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.basis)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "LatticeMetric":
        if len(values) != 4:
            raise QscError("BAD_CONFIG", "a lattice needs four numbers a11,a12,a21,a22")
        return cls(((values[0], values[1]), (values[2], values[3])))


@dataclass(frozen=True)
class NormReport:
    h: Tuple[int, int]
    norm: float
    copies: int
    primitive: Tuple[int, int]
    copy_length: float

    @property
    def representative(self) -> str:
        if self.copies == 0:
            return "empty"
        return f"{self.copies} parallel closed geodesic(s) of class {self.primitive}, length {self.copy_length:.9f} each"


def torus_norm(g: LatticeMetric, h: Sequence[int]) -> NormReport:
    a, b = (int(v) for v in h)
    d = math.gcd(a, b)
    if d == 0:
        return NormReport((0, 0), 0.0, 0, (0, 0), 0.0)
    prim = (a // d, b // d)
    length = float(np.hypot(*(g.matrix @ np.array(prim, dtype=float))))
    return NormReport((a, b), d * length, d, prim, length)


def triangle_check(g: LatticeMetric, n_pairs: int = 10_000, seed: int = 0, bound: int = 1000, rtol: float = 1e-9) -> int:
    """Number of sampled pairs violating the triangle inequality beyond ``rtol``."""
    rng = np.random.default_rng(seed)
    hs = rng.integers(-bound, bound + 1, size=(n_pairs, 2, 2))
    bad = 0
    for h1, h2 in hs:
        n1 = torus_norm(g, h1).norm
        n2 = torus_norm(g, h2).norm
        n12 = torus_norm(g, h1 + h2).norm
        if n12 > (n1 + n2) * (1 + rtol):
            bad += 1
    return bad


@dataclass(frozen=True)
class BallProbeReport:
    directions: int
    boundary: np.ndarray = field(repr=False)
    margins: np.ndarray = field(repr=False)
    ellipse_deviation: float
    semi_axes: Tuple[float, float]
    # extreme sampled radii; equal to the semi-axes when the axes are sampled
    radius_range: Tuple[float, float]

    @property
    def min_margin(self) -> float:
        return float(self.margins.min())

    @property
    def strictly_convex(self) -> bool:
        return bool(np.all(self.margins > 0))

    @property
    def note(self) -> str:
        if self.strictly_convex:
            return (
                "every sampled chord midpoint is strictly inside: no flat boundary pieces, "
                "so this unit ball is an ellipse and not a polyhedron"
            )
        return "some midpoint is not strictly inside; flat boundary pieces are possible"


def unit_ball_probe(g: LatticeMetric, n_directions: int = 360) -> BallProbeReport:
    if n_directions < 8:
        raise QscError("BAD_CONFIG", f"need at least 8 directions, got {n_directions}")
    A = g.matrix
    norm = lambda x: float(np.hypot(*(A @ x)))
    theta = 2 * np.pi * np.arange(n_directions) / n_directions
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    radii = np.empty(n_directions)
    for i, u in enumerate(dirs):
        hi = 1.0
        while norm(hi * u) < 1:
            hi *= 2
        radii[i] = optimize.brentq(lambda t: norm(t * u) - 1.0, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    boundary = dirs * radii[:, None]
    closed = 1.0 / np.hypot(*(A @ dirs.T))
    mids = 0.5 * (boundary + np.roll(boundary, -1, axis=0))
    margins = 1.0 - np.hypot(*(A @ mids.T))
    s = np.linalg.svd(A, compute_uv=False)
    return BallProbeReport(
        n_directions,
        boundary,
        margins,
        float(np.max(np.abs(radii - closed))),
        tuple(sorted(float(v) for v in 1.0 / s)),
        (float(radii.min()), float(radii.max())),
    )
