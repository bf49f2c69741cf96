"""GT-spline blending functions, GB-spline curves and rational surfaces."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, SingularFit, ZeroDenominator
from .gbspline import POLY, GBBasis, SectionCore, build_basis
from .tmesh import Anchor, IndexTMesh, KnotData, anchors, tensor_mesh

__all__ = [
    "local_basis",
    "blend",
    "blend_matrix",
    "eval_curve",
    "ControlNet",
    "GTSurface",
    "eval_surface",
    "ReferenceShape",
    "helicoid_section",
    "spring",
    "reference_setup",
    "fit_surface",
    "reproduce_reference",
    "export_csv",
    "export_obj",
]


@lru_cache(maxsize=4096)
def _cached_basis(knots: tuple, cores: tuple, p: int) -> GBBasis:
    return build_basis(knots, list(cores), p)


def local_basis(knots: KnotData, local: tuple, direction: str) -> GBBasis:
    """Single-function basis on the knots and cores picked out by a local index vector."""
    if direction == "s":
        kv, cores = knots.sigma_s(local), knots.omega_s(local)
    else:
        kv, cores = knots.sigma_t(local), knots.omega_t(local)
    return _cached_basis(tuple(kv), tuple(cores), len(local) - 1)


def _univariate(knots: KnotData, local: tuple, direction: str, x: np.ndarray) -> np.ndarray:
    basis = local_basis(knots, local, direction)
    kv = basis.knots
    if kv[0] == kv[-1]:
        return np.zeros_like(x)
    return basis.values(x)[0]


def blend(mesh: IndexTMesh, anchor: Anchor, s, t, knots: KnotData | None = None) -> np.ndarray:
    """Tensor product of the anchor's two univariate GB-splines at points ``(s, t)``."""
    knots = KnotData.uniform(mesh) if knots is None else knots
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    s, t = np.broadcast_arrays(s, t)
    fs = _univariate(knots, anchor.local_s, "s", s.ravel())
    ft = _univariate(knots, anchor.local_t, "t", t.ravel())
    out = (fs * ft).reshape(s.shape)
    return float(out) if out.ndim == 0 else out


def blend_matrix(mesh: IndexTMesh, knots: KnotData, s: np.ndarray, t: np.ndarray,
                 anchor_list=None) -> np.ndarray:
    """Values of every blending function on the grid ``s x t``.

    Returns shape ``(n_anchors, len(s) * len(t))`` with ``s`` varying slowest.
    """
    anchor_list = anchors(mesh) if anchor_list is None else anchor_list
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    rows = []
    for a in anchor_list:
        fs = _univariate(knots, a.local_s, "s", s)
        ft = _univariate(knots, a.local_t, "t", t)
        rows.append(np.outer(fs, ft).ravel())
    return np.array(rows).reshape(len(anchor_list), s.size * t.size)


def eval_curve(basis: GBBasis, points):
    """Return ``C(s) = sum_i P_i N_i(s)`` as a callable giving ``(len(s), dim)``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] != basis.n:
        raise DimensionMismatch(f"need {basis.n} control points, got {pts.shape[0]}")

    def curve(s):
        vals = basis.values(np.atleast_1d(np.asarray(s, dtype=float)))
        return vals.T @ pts

    return curve


@dataclass(frozen=True)
class ControlNet:
    """Control points ``(n, 3)`` and positive weights ``(n,)`` in anchor order."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise DimensionMismatch("control points must have shape (n, 3)")
        if w.shape != (pts.shape[0],):
            raise DimensionMismatch("need exactly one weight per control point")
        if not np.all(w > 0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def constant(cls, n: int, point) -> "ControlNet":
        return cls(np.tile(np.asarray(point, dtype=float), (n, 1)), np.ones(n))


@dataclass(frozen=True)
class GTSurface:
    mesh: IndexTMesh
    knots: KnotData
    net: ControlNet

    def __post_init__(self):
        n = len(anchors(self.mesh))
        if self.net.points.shape[0] != n:
            raise DimensionMismatch(f"mesh has {n} anchors, net has {self.net.points.shape[0]} points")

    @property
    def domain(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.knots.active_s(self.mesh), self.knots.active_t(self.mesh)

    def grid(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Surface points on the grid ``s x t``, shape ``(len(s), len(t), 3)``."""
        vals = blend_matrix(self.mesh, self.knots, s, t)
        w = self.net.weights[:, None] * vals
        den = w.sum(axis=0)
        if np.any(den <= 1e-300):
            raise ZeroDenominator("rational denominator vanishes at some sample")
        num = w.T @ self.net.points
        return (num / den[:, None]).reshape(len(s), len(t), 3)


def eval_surface(surface: GTSurface, s: float, t: float) -> np.ndarray:
    return surface.grid(np.array([s], dtype=float), np.array([t], dtype=float))[0, 0]


# -- reference shapes and fitting ---------------------------------------------------


@dataclass(frozen=True)
class ReferenceShape:
    """Closed-form parametrization together with its parameter box."""

    name: str
    s_range: tuple[float, float]
    t_range: tuple[float, float]
    omega_s: float
    omega_t: float
    func: object

    def __call__(self, s, t) -> np.ndarray:
        return self.func(np.asarray(s, dtype=float), np.asarray(t, dtype=float))


def helicoid_section(r1: float = 0.5, r2: float = 1.0, h: float = 6.0, omega: float = 3.0) -> ReferenceShape:
    """Helicoid piece over ``[r1, r2] x [0, h]``."""

    def func(s, t):
        return np.stack([s * np.cos(omega * t), s * np.sin(omega * t), t], axis=-1)

    return ReferenceShape("helicoid", (r1, r2), (0.0, h), omega, omega, func)


def spring(R: float = 3.0, r: float = 1.0, h: float = 8 * np.pi, omega_s: float = 1.0,
           omega_t: float = 2.0) -> ReferenceShape:
    """Helicoidal spring over ``[0, 2 pi] x [0, h]``."""

    def func(s, t):
        ring = R + r * np.cos(omega_s * s)
        return np.stack([ring * np.cos(omega_t * t), ring * np.sin(omega_t * t), r * np.sin(omega_s * s) + t], axis=-1)

    return ReferenceShape("spring", (0.0, 2 * np.pi), (0.0, h), omega_s, omega_t, func)


def reference_setup(shape: ReferenceShape, mu: int, nu: int, polynomial: bool = False,
                    p: int = 4, q: int = 4) -> tuple[IndexTMesh, KnotData]:
    """Tensor mesh with clamped knots on the shape's box and matching trigonometric cores."""
    mesh = tensor_mesh(p, q, mu, nu)
    cs = POLY if polynomial else SectionCore.trigonometric(shape.omega_s)
    ct = POLY if polynomial else SectionCore.trigonometric(shape.omega_t)
    knots = KnotData.clamped(mesh, shape.s_range, shape.t_range, cs, ct)
    return mesh, knots


def fit_surface(mesh: IndexTMesh, knots: KnotData, shape, samples: int | None = None) -> GTSurface:
    """Least-squares control net (unit weights) reproducing ``shape`` on the active region."""
    (s0, s1), (t0, t1) = knots.active_s(mesh), knots.active_t(mesh)
    if samples is None:
        samples = 4 * max(mesh.mu, mesh.nu) + 20
    s = np.linspace(s0, s1, samples)
    t = np.linspace(t0, t1, samples)
    vals = blend_matrix(mesh, knots, s, t)
    den = vals.sum(axis=0)
    if np.any(den <= 0):
        raise ZeroDenominator("blending functions vanish at a fitting sample")
    B = (vals / den).T
    S, T = np.meshgrid(s, t, indexing="ij")
    target = shape(S, T).reshape(-1, 3)
    sol, _, rank, _ = np.linalg.lstsq(B, target, rcond=None)
    if rank < B.shape[1]:
        raise SingularFit(f"sample grid determines only {rank} of {B.shape[1]} control points")
    return GTSurface(mesh, knots, ControlNet(sol, np.ones(B.shape[1])))


def reproduce_reference(shape, mesh: IndexTMesh, knots: KnotData, resolution: int = 101,
                        samples: int | None = None) -> tuple[float, GTSurface]:
    """Fit ``shape`` and return the max coordinate error on a ``resolution^2`` grid."""
    surf = fit_surface(mesh, knots, shape, samples)
    (s0, s1), (t0, t1) = surf.domain
    s = np.linspace(s0, s1, resolution)
    t = np.linspace(t0, t1, resolution)
    S, T = np.meshgrid(s, t, indexing="ij")
    err = np.abs(surf.grid(s, t) - shape(S, T)).max()
    return float(err), surf


# -- export ----------------------------------------------------------------------------


def sample_grid(surface: GTSurface, resolution: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    (s0, s1), (t0, t1) = surface.domain
    s = np.linspace(s0, s1, resolution)
    t = np.linspace(t0, t1, resolution)
    return s, t, surface.grid(s, t)


def export_csv(s: np.ndarray, t: np.ndarray, pts: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "t", "x", "y", "z"])
    for a, sv in enumerate(s):
        for b, tv in enumerate(t):
            w.writerow([repr(float(sv)), repr(float(tv))] + [repr(float(v)) for v in pts[a, b]])
    return buf.getvalue()


def export_obj(pts: np.ndarray) -> str:
    """Triangulated grid as Wavefront OBJ text."""
    ns, nt = pts.shape[:2]
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in pts.reshape(-1, 3).tolist()]
    for a in range(ns - 1):
        for b in range(nt - 1):
            k = a * nt + b + 1
            lines.append(f"f {k} {k + nt} {k + nt + 1}")
            lines.append(f"f {k} {k + nt + 1} {k + 1}")
    return "\n".join(lines) + "\n"
