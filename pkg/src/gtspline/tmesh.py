"""Index T-meshes: topology, admissibility, anchors and index vectors.

An index T-mesh of bi-order ``(p, q)`` is a partition of the integer box
``[-p//2 + 1, mu + p//2] x [-q//2 + 1, nu + q//2]`` into axis-aligned
rectangles (cells) with integer corners.  The skeleton is stored as unit
segments so that every topological query is an array lookup.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InsufficientIntersections, MalformedPartition, MultiplicityTooHigh, ParseError
from .gbspline import POLY, SectionCore

__all__ = [
    "IndexTMesh",
    "Anchor",
    "Extension",
    "KnotData",
    "NOT_ADMISSIBLE",
    "ADMISSIBLE",
    "ADMISSIBLE_PLUS",
    "validate",
    "anchors",
    "index_vectors",
    "bar_index_vector",
    "underlying_tp_mesh",
    "extensions",
    "tensor_mesh",
    "from_skeleton",
    "remove_segments",
    "thin_lines",
    "load_mesh",
    "loads_mesh",
    "dumps_mesh",
    "save_mesh",
]

NOT_ADMISSIBLE = "not-admissible"
ADMISSIBLE = "admissible"
ADMISSIBLE_PLUS = "admissible-plus"

Cell = tuple[int, int, int, int]


@dataclass(frozen=True)
class IndexTMesh:
    """Rectangular partition of the index domain.

    ``cells`` holds ``(i1, i2, j1, j2)`` for the rectangle
    ``[i1, i2] x [j1, j2]``.  Equality and hashing use the normalized cell
    set together with the orders and active extents.
    """

    p: int
    q: int
    mu: int
    nu: int
    cells: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.p < 2 or self.q < 2:
            raise ValueError("orders p, q must be at least 2")
        if self.mu < 2 or self.nu < 2:
            raise ValueError("active extents mu, nu must be at least 2")
        cells = frozenset(tuple(int(v) for v in c) for c in self.cells)
        object.__setattr__(self, "cells", cells)
        self._check_partition()

    # -- index domain ---------------------------------------------------------

    @property
    def ilo(self) -> int:
        return -(self.p // 2) + 1

    @property
    def ihi(self) -> int:
        return self.mu + self.p // 2

    @property
    def jlo(self) -> int:
        return -(self.q // 2) + 1

    @property
    def jhi(self) -> int:
        return self.nu + self.q // 2

    def sorted_cells(self) -> list[Cell]:
        return sorted(self.cells)

    def _check_partition(self):
        ilo, ihi, jlo, jhi = self.ilo, self.ihi, self.jlo, self.jhi
        cover = np.zeros((ihi - ilo, jhi - jlo), dtype=int)
        for i1, i2, j1, j2 in self.cells:
            if not (ilo <= i1 < i2 <= ihi and jlo <= j1 < j2 <= jhi):
                raise MalformedPartition(f"cell {(i1, i2, j1, j2)} is empty or leaves the index domain")
            cover[i1 - ilo:i2 - ilo, j1 - jlo:j2 - jlo] += 1
        if (cover > 1).any():
            i, j = np.argwhere(cover > 1)[0]
            raise MalformedPartition(f"cells overlap on unit square ({i + ilo}, {j + jlo})")
        if (cover == 0).any():
            i, j = np.argwhere(cover == 0)[0]
            raise MalformedPartition(f"unit square ({i + ilo}, {j + jlo}) is not covered")

    # -- skeleton ---------------------------------------------------------------

    @cached_property
    def hseg(self) -> np.ndarray:
        """``hseg[i - ilo, j - jlo]``: unit segment ``[i, i+1] x {j}`` lies on the skeleton."""
        h = np.zeros((self.ihi - self.ilo, self.jhi - self.jlo + 1), dtype=bool)
        for i1, i2, j1, j2 in self.cells:
            h[i1 - self.ilo:i2 - self.ilo, j1 - self.jlo] = True
            h[i1 - self.ilo:i2 - self.ilo, j2 - self.jlo] = True
        return h

    @cached_property
    def vseg(self) -> np.ndarray:
        """``vseg[i - ilo, j - jlo]``: unit segment ``{i} x [j, j+1]`` lies on the skeleton."""
        v = np.zeros((self.ihi - self.ilo + 1, self.jhi - self.jlo), dtype=bool)
        for i1, i2, j1, j2 in self.cells:
            v[i1 - self.ilo, j1 - self.jlo:j2 - self.jlo] = True
            v[i2 - self.ilo, j1 - self.jlo:j2 - self.jlo] = True
        return v

    def has_h(self, i: int, j: int) -> bool:
        if not (self.ilo <= i < self.ihi and self.jlo <= j <= self.jhi):
            return False
        return bool(self.hseg[i - self.ilo, j - self.jlo])

    def has_v(self, i: int, j: int) -> bool:
        if not (self.ilo <= i <= self.ihi and self.jlo <= j < self.jhi):
            return False
        return bool(self.vseg[i - self.ilo, j - self.jlo])

    def arms(self, i: int, j: int) -> dict[str, bool]:
        return {
            "left": self.has_h(i - 1, j),
            "right": self.has_h(i, j),
            "down": self.has_v(i, j - 1),
            "up": self.has_v(i, j),
        }

    def valence(self, i: int, j: int) -> int:
        return sum(self.arms(i, j).values())

    @cached_property
    def vertices(self) -> frozenset:
        verts = set()
        for i1, i2, j1, j2 in self.cells:
            verts.update({(i1, j1), (i1, j2), (i2, j1), (i2, j2)})
        return frozenset(verts)

    def is_vertex(self, i: int, j: int) -> bool:
        return (i, j) in self.vertices

    @cached_property
    def horizontal_edges(self) -> list[tuple[int, int, int]]:
        """Edges ``(i1, i2, j)`` between consecutive vertices on horizontal lines."""
        edges = []
        for j in range(self.jlo, self.jhi + 1):
            start = None
            for i in range(self.ilo, self.ihi + 1):
                if start is not None and (i, j) in self.vertices:
                    edges.append((start, i, j))
                    start = None
                if (i, j) in self.vertices and self.has_h(i, j):
                    start = i
        return edges

    @cached_property
    def vertical_edges(self) -> list[tuple[int, int, int]]:
        """Edges ``(i, j1, j2)`` between consecutive vertices on vertical lines."""
        edges = []
        for i in range(self.ilo, self.ihi + 1):
            start = None
            for j in range(self.jlo, self.jhi + 1):
                if start is not None and (i, j) in self.vertices:
                    edges.append((i, start, j))
                    start = None
                if (i, j) in self.vertices and self.has_v(i, j):
                    start = j
        return edges

    # -- ray intersections -----------------------------------------------------

    def horizontal_list(self, y2: int) -> list[int]:
        """Indices ``k`` where the line ``t = y2/2`` meets vertical skeleton material."""
        if y2 % 2 == 0:
            j = y2 // 2
            return [k for k in range(self.ilo, self.ihi + 1) if self.has_v(k, j - 1) or self.has_v(k, j)]
        j = (y2 - 1) // 2
        return [k for k in range(self.ilo, self.ihi + 1) if self.has_v(k, j)]

    def vertical_list(self, x2: int) -> list[int]:
        """Indices ``k`` where the line ``s = x2/2`` meets horizontal skeleton material."""
        if x2 % 2 == 0:
            i = x2 // 2
            return [k for k in range(self.jlo, self.jhi + 1) if self.has_h(i - 1, k) or self.has_h(i, k)]
        i = (x2 - 1) // 2
        return [k for k in range(self.jlo, self.jhi + 1) if self.has_h(i, k)]

    def in_active_region(self, i1: float, i2: float, j1: float, j2: float) -> bool:
        return 1 <= i1 and i2 <= self.mu and 1 <= j1 and j2 <= self.nu

    def in_frame(self, i: int, j: int) -> bool:
        return i <= 1 or i >= self.mu or j <= 1 or j >= self.nu

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "mu": self.mu,
            "nu": self.nu,
            "cells": [list(c) for c in self.sorted_cells()],
        }


def from_skeleton(p: int, q: int, mu: int, nu: int, hseg: np.ndarray, vseg: np.ndarray) -> IndexTMesh:
    """Rebuild the cell set from unit-segment occupancy arrays.

    The arrays use the layout of :attr:`IndexTMesh.hseg` and
    :attr:`IndexTMesh.vseg`.  Unit squares are merged across missing
    segments; every merged face must be a rectangle.
    """
    ilo, jlo = -(p // 2) + 1, -(q // 2) + 1
    ni, nj = mu + p // 2 - ilo, nu + q // 2 - jlo
    hseg = np.asarray(hseg, dtype=bool)
    vseg = np.asarray(vseg, dtype=bool)
    if hseg.shape != (ni, nj + 1) or vseg.shape != (ni + 1, nj):
        raise MalformedPartition("skeleton arrays do not match the index domain")
    label = -np.ones((ni, nj), dtype=int)
    cells = []
    for a in range(ni):
        for b in range(nj):
            if label[a, b] >= 0:
                continue
            k = len(cells)
            stack, members = [(a, b)], []
            label[a, b] = k
            while stack:
                x, y = stack.pop()
                members.append((x, y))
                nbrs = []
                if x > 0 and not vseg[x, y]:
                    nbrs.append((x - 1, y))
                if x < ni - 1 and not vseg[x + 1, y]:
                    nbrs.append((x + 1, y))
                if y > 0 and not hseg[x, y]:
                    nbrs.append((x, y - 1))
                if y < nj - 1 and not hseg[x, y + 1]:
                    nbrs.append((x, y + 1))
                for u in nbrs:
                    if label[u] < 0:
                        label[u] = k
                        stack.append(u)
            xs = [m[0] for m in members]
            ys = [m[1] for m in members]
            x0, x1, y0, y1 = min(xs), max(xs) + 1, min(ys), max(ys) + 1
            if (x1 - x0) * (y1 - y0) != len(members):
                raise MalformedPartition(f"face containing unit square ({a + ilo}, {b + jlo}) is not a rectangle")
            cells.append((x0 + ilo, x1 + ilo, y0 + jlo, y1 + jlo))
    mesh = IndexTMesh(p, q, mu, nu, frozenset(cells))
    if not (np.array_equal(mesh.hseg, hseg) and np.array_equal(mesh.vseg, vseg)):
        raise MalformedPartition("skeleton has dangling segments inside cells")
    return mesh


def thin_lines(p: int, q: int, mu: int, nu: int, missing_v: Iterable = (), missing_h: Iterable = ()) -> IndexTMesh:
    """Tensor mesh without some unit segments of the interior index lines.

    ``missing_v`` lists ``(i, j)`` for ``{i} x [j, j+1]`` with ``1 < i < mu``
    and ``1 <= j < nu``; ``missing_h`` lists ``(i, j)`` for
    ``[i, i+1] x {j}`` with ``1 <= i < mu`` and ``1 < j < nu``.  The part of
    an interior line inside the frame follows the segment where the line
    enters the active region, as admissibility requires.
    """
    mesh = tensor_mesh(p, q, mu, nu)
    missing_v, missing_h = set(map(tuple, missing_v)), set(map(tuple, missing_h))
    for i, j in missing_v:
        if not (1 < i < mu and 1 <= j < nu):
            raise ValueError(f"vertical segment {(i, j)} is not on an interior line of the active region")
    for i, j in missing_h:
        if not (1 <= i < mu and 1 < j < nu):
            raise ValueError(f"horizontal segment {(i, j)} is not on an interior line of the active region")
    h, v = mesh.hseg.copy(), mesh.vseg.copy()
    for i in range(2, mu):
        for j in range(mesh.jlo, mesh.jhi):
            v[i - mesh.ilo, j - mesh.jlo] = (i, min(max(j, 1), nu - 1)) not in missing_v
    for j in range(2, nu):
        for i in range(mesh.ilo, mesh.ihi):
            h[i - mesh.ilo, j - mesh.jlo] = (min(max(i, 1), mu - 1), j) not in missing_h
    return from_skeleton(p, q, mu, nu, h, v)


def remove_segments(mesh: IndexTMesh, hsegs: Iterable = (), vsegs: Iterable = ()) -> IndexTMesh:
    """Copy of ``mesh`` without the given unit segments ``(i, j)``."""
    h, v = mesh.hseg.copy(), mesh.vseg.copy()
    for i, j in hsegs:
        h[i - mesh.ilo, j - mesh.jlo] = False
    for i, j in vsegs:
        v[i - mesh.ilo, j - mesh.jlo] = False
    return from_skeleton(mesh.p, mesh.q, mesh.mu, mesh.nu, h, v)


def tensor_mesh(p: int, q: int, mu: int, nu: int) -> IndexTMesh:
    """Full unit grid over the index domain."""
    ilo, ihi = -(p // 2) + 1, mu + p // 2
    jlo, jhi = -(q // 2) + 1, nu + q // 2
    cells = [(i, i + 1, j, j + 1) for i in range(ilo, ihi) for j in range(jlo, jhi)]
    return IndexTMesh(p, q, mu, nu, frozenset(cells))


def underlying_tp_mesh(mesh: IndexTMesh) -> IndexTMesh:
    return tensor_mesh(mesh.p, mesh.q, mesh.mu, mesh.nu)


# -- admissibility --------------------------------------------------------------


def _is_admissible(mesh: IndexTMesh) -> bool:
    m = mesh
    frame_cols = list(range(m.ilo, 2)) + list(range(m.mu, m.ihi + 1))
    frame_rows = list(range(m.jlo, 2)) + list(range(m.nu, m.jhi + 1))
    for l in frame_cols:
        if not m.vseg[l - m.ilo, :].all():
            return False
    for l in frame_rows:
        if not m.hseg[:, l - m.jlo].all():
            return False
    for i, j in m.vertices:
        if m.ilo < i < m.ihi and m.jlo < j < m.jhi and m.in_frame(i, j):
            if m.valence(i, j) != 4:
                return False
    return True


def _has_facing_junctions(mesh: IndexTMesh) -> bool:
    for i1, i2, j1, j2 in mesh.cells:
        for i in range(i1 + 1, i2):
            if mesh.has_v(i, j1 - 1) and mesh.has_v(i, j2):
                return True
        for j in range(j1 + 1, j2):
            if mesh.has_h(i1 - 1, j) and mesh.has_h(i2, j):
                return True
    return False


def _check_junctions(mesh: IndexTMesh) -> None:
    for i, j in mesh.vertices:
        if mesh.ilo < i < mesh.ihi and mesh.jlo < j < mesh.jhi:
            a = mesh.arms(i, j)
            if sum(a.values()) < 3:
                kind = "I" if (a["left"] and a["right"]) or (a["up"] and a["down"]) else "L"
                raise MalformedPartition(f"{kind}-junction at {(i, j)}")


def validate(mesh: IndexTMesh) -> str:
    """Classify as ``not-admissible``, ``admissible`` or ``admissible-plus``."""
    _check_junctions(mesh)
    if not _is_admissible(mesh):
        return NOT_ADMISSIBLE
    if _has_facing_junctions(mesh):
        return ADMISSIBLE
    return ADMISSIBLE_PLUS


# -- anchors --------------------------------------------------------------------


@dataclass(frozen=True)
class Anchor:
    """Vertex, edge or cell carrying one blending function.

    Geometry is ``[i1, i2] x [j1, j2]`` (degenerate for vertices and edges).
    Index vectors are attached but do not take part in equality.
    """

    kind: str
    i1: int
    i2: int
    j1: int
    j2: int
    local_s: tuple = field(default=(), compare=False)
    local_t: tuple = field(default=(), compare=False)
    global_s: tuple = field(default=(), compare=False, repr=False)
    global_t: tuple = field(default=(), compare=False, repr=False)

    @property
    def label(self) -> str:
        if self.kind == "vertex":
            return f"v({self.i1};{self.j1})"
        if self.kind == "hedge":
            return f"h({self.i1}:{self.i2};{self.j1})"
        if self.kind == "vedge":
            return f"e({self.i1};{self.j1}:{self.j2})"
        return f"c({self.i1}:{self.i2};{self.j1}:{self.j2})"

    @property
    def sort_key(self):
        return (max(self.local_t), max(self.local_s), self.j1, self.i1, self.j2, self.i2)


def _local_vector(entries: list[int], lo: int, hi: int, order: int, what: str) -> tuple[int, ...]:
    if order % 2 == 0:
        k = entries.index(lo)
        half = order // 2
        if k - half < 0 or k + half >= len(entries):
            raise InsufficientIntersections(f"{what}: not enough skeleton crossings")
        return tuple(entries[k - half:k + half + 1])
    half = (order - 1) // 2
    a, b = entries.index(lo), entries.index(hi)
    if a - half < 0 or b + half >= len(entries):
        raise InsufficientIntersections(f"{what}: not enough skeleton crossings")
    return tuple(entries[a - half:a + 1] + entries[b:b + half + 1])


def index_vectors(mesh: IndexTMesh, anchor: Anchor) -> tuple[tuple, tuple, tuple, tuple]:
    """``(I^s, I_l^s, I^t, I_l^t)`` by shooting rays through the anchor."""
    a = anchor
    hlist = mesh.horizontal_list(a.j1 + a.j2)
    vlist = mesh.vertical_list(a.i1 + a.i2)
    try:
        local_s = _local_vector(hlist, a.i1, a.i2, mesh.p, f"{a.label} s-direction")
        local_t = _local_vector(vlist, a.j1, a.j2, mesh.q, f"{a.label} t-direction")
    except ValueError as exc:  # anchor coordinate not on the ray list
        raise InsufficientIntersections(f"{a.label}: {exc}") from None
    return tuple(hlist), local_s, tuple(vlist), local_t


def _anchor_geometry(mesh: IndexTMesh) -> list[tuple[str, int, int, int, int]]:
    m = mesh
    pe, qe = m.p % 2 == 0, m.q % 2 == 0
    out = []
    if pe and qe:
        for i, j in m.vertices:
            if m.in_active_region(i, i, j, j):
                out.append(("vertex", i, i, j, j))
    elif not pe and qe:
        for i1, i2, j in m.horizontal_edges:
            if m.in_active_region(i1, i2, j, j):
                out.append(("hedge", i1, i2, j, j))
    elif pe and not qe:
        for i, j1, j2 in m.vertical_edges:
            if m.in_active_region(i, i, j1, j2):
                out.append(("vedge", i, i, j1, j2))
    else:
        for i1, i2, j1, j2 in m.cells:
            if m.in_active_region(i1, i2, j1, j2):
                out.append(("cell", i1, i2, j1, j2))
    return out


def anchors(mesh: IndexTMesh) -> list[Anchor]:
    """Anchors in canonical order: by ``(max I_l^t, max I_l^s)`` then geometry."""
    return _anchors_cached(mesh)


_ANCHOR_CACHE: dict = {}


def _anchors_cached(mesh: IndexTMesh) -> list[Anchor]:
    key = mesh
    hit = _ANCHOR_CACHE.get(key)
    if hit is not None:
        return list(hit)
    out = []
    for kind, i1, i2, j1, j2 in _anchor_geometry(mesh):
        bare = Anchor(kind, i1, i2, j1, j2)
        gs, ls, gt, lt = index_vectors(mesh, bare)
        out.append(Anchor(kind, i1, i2, j1, j2, ls, lt, gs, gt))
    out.sort(key=lambda a: a.sort_key)
    if len(_ANCHOR_CACHE) > 512:
        _ANCHOR_CACHE.clear()
    _ANCHOR_CACHE[key] = tuple(out)
    return out


# -- knot data --------------------------------------------------------------------


@dataclass(frozen=True)
class KnotData:
    """Global knot and section-core vectors of both directions.

    ``knots_s[k - first_s]`` is the knot with index ``k``;
    ``cores_s[k - first_s]`` is the core of the interval ``[s_k, s_{k+1}]``.
    """

    knots_s: tuple
    knots_t: tuple
    cores_s: tuple
    cores_t: tuple
    first_s: int = 0
    first_t: int = 0

    def __post_init__(self):
        for name in ("knots_s", "knots_t"):
            vals = tuple(float(v) for v in getattr(self, name))
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise ValueError(f"{name} must be non-decreasing")
            object.__setattr__(self, name, vals)
        for name in ("cores_s", "cores_t"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.cores_s) != len(self.knots_s) - 1 or len(self.cores_t) != len(self.knots_t) - 1:
            raise ValueError("need exactly one section core per knot interval")

    @classmethod
    def for_mesh(cls, mesh: IndexTMesh, knots_s, knots_t, cores_s=None, cores_t=None) -> "KnotData":
        knots_s, knots_t = list(knots_s), list(knots_t)
        ns = mesh.ihi - mesh.ilo + 1
        nt = mesh.jhi - mesh.jlo + 1
        if len(knots_s) != ns or len(knots_t) != nt:
            raise ValueError(f"mesh needs {ns} s-knots and {nt} t-knots")
        cores_s = _expand_cores(cores_s, ns - 1)
        cores_t = _expand_cores(cores_t, nt - 1)
        out = cls(tuple(knots_s), tuple(knots_t), cores_s, cores_t, mesh.ilo, mesh.jlo)
        out.check_multiplicity(mesh)
        return out

    @classmethod
    def uniform(cls, mesh: IndexTMesh, core_s=POLY, core_t=POLY, scale_s: float = 1.0, scale_t: float = 1.0) -> "KnotData":
        """Simple knots ``s_k = scale * k``."""
        ks = [scale_s * k for k in range(mesh.ilo, mesh.ihi + 1)]
        kt = [scale_t * k for k in range(mesh.jlo, mesh.jhi + 1)]
        return cls.for_mesh(mesh, ks, kt, core_s, core_t)

    @classmethod
    def clamped(cls, mesh: IndexTMesh, s_range=(0.0, 1.0), t_range=(0.0, 1.0), core_s=POLY, core_t=POLY) -> "KnotData":
        """Order-fold end knots so the parametric active region is ``s_range x t_range``."""
        ks = _clamped(mesh.ihi - mesh.ilo + 1, mesh.p, *s_range)
        kt = _clamped(mesh.jhi - mesh.jlo + 1, mesh.q, *t_range)
        return cls.for_mesh(mesh, ks, kt, core_s, core_t)

    def check_multiplicity(self, mesh: IndexTMesh) -> None:
        for vals, order in ((self.knots_s, mesh.p), (self.knots_t, mesh.q)):
            worst = max(vals.count(v) for v in vals)
            if worst > order:
                raise MultiplicityTooHigh(f"knot multiplicity {worst} exceeds order {order}")

    def s(self, k: int) -> float:
        return self.knots_s[k - self.first_s]

    def t(self, k: int) -> float:
        return self.knots_t[k - self.first_t]

    def sigma_s(self, indices: Iterable[int]) -> tuple[float, ...]:
        return tuple(self.knots_s[k - self.first_s] for k in indices)

    def sigma_t(self, indices: Iterable[int]) -> tuple[float, ...]:
        return tuple(self.knots_t[k - self.first_t] for k in indices)

    def omega_s(self, indices: Sequence[int]) -> tuple[SectionCore, ...]:
        """Cores attached to a local index vector (all entries but the last)."""
        return tuple(self.cores_s[k - self.first_s] for k in indices[:-1])

    def omega_t(self, indices: Sequence[int]) -> tuple[SectionCore, ...]:
        return tuple(self.cores_t[k - self.first_t] for k in indices[:-1])

    def with_cores(self, core_s: SectionCore, core_t: SectionCore) -> "KnotData":
        return KnotData(
            self.knots_s,
            self.knots_t,
            (core_s,) * len(self.cores_s),
            (core_t,) * len(self.cores_t),
            self.first_s,
            self.first_t,
        )

    @property
    def s_range(self) -> tuple[float, float]:
        return self.knots_s[0], self.knots_s[-1]

    def active_s(self, mesh: IndexTMesh) -> tuple[float, float]:
        return self.s(1), self.s(mesh.mu)

    def active_t(self, mesh: IndexTMesh) -> tuple[float, float]:
        return self.t(1), self.t(mesh.nu)

    def to_dict(self) -> dict:
        return {
            "knots_s": list(self.knots_s),
            "knots_t": list(self.knots_t),
            "cores_s": [c.to_dict() for c in self.cores_s],
            "cores_t": [c.to_dict() for c in self.cores_t],
        }


def _expand_cores(cores, count: int) -> tuple:
    if cores is None:
        return (POLY,) * count
    if isinstance(cores, SectionCore):
        return (cores,) * count
    cores = tuple(cores)
    if len(cores) != count:
        raise ValueError(f"expected {count} section cores, got {len(cores)}")
    return cores


def _clamped(count: int, order: int, a: float, b: float) -> list[float]:
    interior = count - 2 * order
    if interior < 0:
        raise ValueError(f"too few knots ({count}) to clamp both ends with multiplicity {order}")
    inner = np.linspace(a, b, interior + 2)[1:-1]
    return [float(a)] * order + [float(v) for v in inner] + [float(b)] * order


def bar_index_vector(local: Sequence[int], knots: Sequence[float], first_index: int = 0) -> tuple[int, ...]:
    """Gap-filled, multiplicity-trimmed version of a local index vector.

    ``knots[k - first_index]`` is the knot of index ``k``.  Missing indices
    between the ends are added, then leading and trailing entries are
    dropped until the end-knot multiplicities match those of ``local``.
    """
    local = sorted(local)

    def value(k):
        return knots[k - first_index]

    def mult_first(ix):
        v = value(ix[0])
        return sum(1 for k in ix if value(k) == v)

    def mult_last(ix):
        v = value(ix[-1])
        return sum(1 for k in ix if value(k) == v)

    bar = list(range(local[0], local[-1] + 1))
    target_first, target_last = mult_first(local), mult_last(local)
    while mult_first(bar) > target_first:
        bar.pop(0)
    while mult_last(bar) > target_last:
        bar.pop()
    return tuple(bar)


# -- T-junction extensions -----------------------------------------------------


@dataclass(frozen=True)
class Extension:
    """Face and edge parts of one T-junction extension.

    ``direction`` is ``"h"`` (segments on the line ``t = junction[1]``) or
    ``"v"`` (segments on ``s = junction[0]``); segments are closed index
    intervals along that line.  ``missing`` names the absent arm.
    """

    junction: tuple[int, int]
    direction: str
    missing: str
    face: tuple[int, int]
    edge: tuple[int, int]

    @property
    def span(self) -> tuple[int, int]:
        return min(self.face[0], self.edge[0]), max(self.face[1], self.edge[1])

    def segment(self) -> tuple[tuple[int, int], tuple[int, int]]:
        a, b = self.span
        i, j = self.junction
        if self.direction == "h":
            return (a, j), (b, j)
        return (i, a), (i, b)

    def to_dict(self) -> dict:
        return {
            "junction": list(self.junction),
            "direction": self.direction,
            "missing": self.missing,
            "face": list(self.face),
            "edge": list(self.edge),
        }


def _extension_parts(entries: list[int], c: int, order: int, forward: bool) -> tuple[tuple[int, int], tuple[int, int]]:
    k = -(-order // 2)  # ceil(order/2), 1-based position of the junction
    idx = entries.index(c)
    if forward:
        lo, hi = idx - (k - 1), idx + (order - k)
    else:
        lo, hi = idx - (order - k), idx + (k - 1)
    if lo < 0 or hi >= len(entries):
        raise InsufficientIntersections(f"extension of junction at {c} leaves the index domain")
    if forward:
        return (c, entries[hi]), (entries[lo], c)
    return (entries[lo], c), (c, entries[hi])


def extensions(mesh: IndexTMesh) -> list[Extension]:
    """Extensions of all valence-3 T-junctions lying in the active region."""
    out = []
    for i, j in sorted(mesh.vertices):
        if not mesh.in_active_region(i, i, j, j):
            continue
        arms = mesh.arms(i, j)
        if sum(arms.values()) != 3:
            continue
        missing = next(k for k, v in arms.items() if not v)
        if missing in ("left", "right"):
            entries = mesh.horizontal_list(2 * j)
            face, edge = _extension_parts(entries, i, mesh.p, forward=missing == "right")
            out.append(Extension((i, j), "h", missing, face, edge))
        else:
            entries = mesh.vertical_list(2 * i)
            face, edge = _extension_parts(entries, j, mesh.q, forward=missing == "up")
            out.append(Extension((i, j), "v", missing, face, edge))
    return out


# -- serialization ----------------------------------------------------------------


def dumps_mesh(mesh: IndexTMesh, knots: KnotData | None = None) -> str:
    """Canonical JSON text (cells sorted lexicographically)."""
    data = mesh.to_dict()
    if knots is not None:
        data.update(knots.to_dict())
    return json.dumps(data, indent=1) + "\n"


def save_mesh(path, mesh: IndexTMesh, knots: KnotData | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_mesh(mesh, knots))


def loads_mesh(text: str) -> tuple[IndexTMesh, KnotData]:
    """Parse a mesh document; knots default to uniform polynomial data."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("mesh document must be a JSON object")
    try:
        mesh = IndexTMesh(
            int(data["p"]),
            int(data["q"]),
            int(data["mu"]),
            int(data["nu"]),
            frozenset(tuple(int(v) for v in c) for c in data["cells"]),
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad mesh field: {exc}") from None
    for c in data["cells"]:
        if len(c) != 4:
            raise ParseError(f"cell {c} must have four integers [i1, i2, j1, j2]")
    try:
        if "knots_s" in data or "knots_t" in data:
            cores_s = [SectionCore.from_dict(c) for c in data["cores_s"]] if "cores_s" in data else None
            cores_t = [SectionCore.from_dict(c) for c in data["cores_t"]] if "cores_t" in data else None
            knots = KnotData.for_mesh(mesh, data["knots_s"], data["knots_t"], cores_s, cores_t)
        else:
            knots = KnotData.uniform(mesh)
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad knot data: {exc}") from None
    return mesh, knots


def load_mesh(path) -> tuple[IndexTMesh, KnotData]:
    with open(path, encoding="utf-8") as fh:
        return loads_mesh(fh.read())
