"""Combinatorial linear-independence tests for T-meshes.

The sparsity proxy matrix only needs local index vectors and knot
multiplicities, so everything here is exact integer/boolean work.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import MalformedPartition, RequiresAdPlus, StepLimitExceeded
from .tmesh import (
    ADMISSIBLE_PLUS,
    NOT_ADMISSIBLE,
    Anchor,
    IndexTMesh,
    KnotData,
    anchors,
    bar_index_vector,
    extensions,
    from_skeleton,
    thin_lines,
    underlying_tp_mesh,
    validate,
)

__all__ = [
    "SparsityMatrix",
    "sparsity_matrix",
    "column_reduction",
    "column_reduction_trace",
    "is_vmcr",
    "shifted",
    "DIRECTIONS",
    "WDC_TYPES",
    "is_weakly_dc",
    "is_dual_compatible",
    "is_analysis_suitable",
    "refine_example4",
    "refine_example4_with_knots",
    "random_admissible_mesh",
    "classification_report",
]

DIRECTIONS = ("left-h", "right-h", "down-v", "up-v")
WDC_TYPES = {
    "RD": ("right-h", "down-v"),
    "RU": ("right-h", "up-v"),
    "LD": ("left-h", "down-v"),
    "LU": ("left-h", "up-v"),
}


def _knots(mesh: IndexTMesh, knots: KnotData | None) -> KnotData:
    return KnotData.uniform(mesh) if knots is None else knots


@dataclass(frozen=True)
class SparsityMatrix:
    """Boolean pattern with anchors of ``M`` as rows and of ``M-hat`` as columns."""

    entries: np.ndarray
    rows: tuple
    cols: tuple

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def to_text(self) -> str:
        return "\n".join("".join("1" if v else "0" for v in row) for row in self.entries) + "\n"


def bar_vectors(mesh: IndexTMesh, anchor: Anchor, knots: KnotData) -> tuple[tuple, tuple]:
    bs = bar_index_vector(anchor.local_s, knots.knots_s, knots.first_s)
    bt = bar_index_vector(anchor.local_t, knots.knots_t, knots.first_t)
    return bs, bt


def sparsity_matrix(mesh: IndexTMesh, knots: KnotData | None = None) -> SparsityMatrix:
    knots = _knots(mesh, knots)
    rows = anchors(mesh)
    cols = anchors(underlying_tp_mesh(mesh))
    out = np.zeros((len(rows), len(cols)), dtype=bool)
    col_s = [set(c.local_s) for c in cols]
    col_t = [set(c.local_t) for c in cols]
    for r, a in enumerate(rows):
        bs, bt = bar_vectors(mesh, a, knots)
        bs, bt = set(bs), set(bt)
        for c in range(len(cols)):
            out[r, c] = col_s[c] <= bs and col_t[c] <= bt
    return SparsityMatrix(out, tuple(rows), tuple(cols))


def column_reduction_trace(matrix) -> tuple[np.ndarray, list[int]]:
    """Reduce and also return the removed original column indices in order.

    Each pass drops zero rows, then removes the column singled out by the
    lowest row holding exactly one nonzero.
    """
    m = np.asarray(matrix, dtype=bool)
    rows = np.arange(m.shape[0])
    cols = np.arange(m.shape[1])
    removed = []
    while True:
        sub = m[np.ix_(rows, cols)]
        keep = sub.any(axis=1)
        rows, sub = rows[keep], sub[keep]
        counts = sub.sum(axis=1)
        single = np.flatnonzero(counts == 1)
        if single.size == 0:
            return m[np.ix_(rows, cols)], removed
        c = int(np.flatnonzero(sub[single[0]])[0])
        removed.append(int(cols[c]))
        cols = np.delete(cols, c)


def column_reduction(matrix) -> np.ndarray:
    return column_reduction_trace(matrix)[0]


def is_void(matrix) -> bool:
    return np.asarray(matrix).size == 0


def is_vmcr(mesh: IndexTMesh, knots: KnotData | None = None) -> bool:
    return is_void(column_reduction(sparsity_matrix(mesh, knots).entries.T))


# -- shifted anchors and weak dual compatibility -----------------------------------


def _end_info(local: tuple, values: tuple, first: int, use_max: bool) -> tuple[int, float, int]:
    idx = max(local) if use_max else min(local)
    kv = [values[k - first] for k in local]
    v = values[idx - first]
    return idx, v, kv.count(v)


def shifted(a1: Anchor, a2: Anchor, direction: str, knots: KnotData) -> bool:
    """Extremal local indices differ, and equal end knots carry different multiplicities."""
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    if direction in ("left-h", "right-h"):
        l1, l2, values, first = a1.local_s, a2.local_s, knots.knots_s, knots.first_s
    else:
        l1, l2, values, first = a1.local_t, a2.local_t, knots.knots_t, knots.first_t
    use_max = direction in ("right-h", "up-v")
    i1, v1, m1 = _end_info(l1, values, first, use_max)
    i2, v2, m2 = _end_info(l2, values, first, use_max)
    if i1 == i2:
        return False
    return v1 != v2 or m1 != m2


def is_weakly_dc(mesh: IndexTMesh, knots: KnotData | None = None) -> set[str]:
    knots = _knots(mesh, knots)
    ancs = anchors(mesh)
    flags = {d: np.ones(0, dtype=bool) for d in DIRECTIONS}
    pairs = list(combinations(ancs, 2))
    for d in DIRECTIONS:
        flags[d] = np.array([shifted(a, b, d, knots) for a, b in pairs], dtype=bool)
    return {name for name, (d1, d2) in WDC_TYPES.items() if np.all(flags[d1] | flags[d2])}


def _overlap(l1: tuple, l2: tuple) -> bool:
    s1, s2 = set(l1), set(l2)
    return all(k in s2 for k in l1 if l2[0] <= k <= l2[-1]) and all(k in s1 for k in l2 if l1[0] <= k <= l1[-1])


def is_dual_compatible(mesh: IndexTMesh) -> bool:
    """Every pair of anchors overlaps horizontally or vertically."""
    if validate(mesh) != ADMISSIBLE_PLUS:
        raise RequiresAdPlus("dual compatibility is defined on admissible-plus meshes")
    ancs = anchors(mesh)
    for a, b in combinations(ancs, 2):
        if not (_overlap(a.local_s, b.local_s) or _overlap(a.local_t, b.local_t)):
            return False
    return True


def _segments_meet(h, v) -> bool:
    (hx0, hy), (hx1, _) = h
    (vx, vy0), (_, vy1) = v
    return hx0 <= vx <= hx1 and vy0 <= hy <= vy1


def is_analysis_suitable(mesh: IndexTMesh) -> bool:
    """No closed horizontal extension meets a closed vertical extension."""
    exts = extensions(mesh)
    hs = [e.segment() for e in exts if e.direction == "h"]
    vs = [e.segment() for e in exts if e.direction == "v"]
    return not any(_segments_meet(h, v) for h in hs for v in vs)


# -- generators ----------------------------------------------------------------------


def _mesh_from_lines(p, q, xs, ys, hsegs, vsegs, mu_range, nu_range) -> IndexTMesh:
    """Index mesh from parametric line positions and segments.

    ``xs``/``ys`` are the sorted distinct line positions; segments are
    ``(y, x0, x1)`` and ``(x, y0, y1)`` in the same parametric units.
    """
    xi = {x: k for k, x in enumerate(xs)}
    yi = {y: k for k, y in enumerate(ys)}
    h = np.zeros((len(xs) - 1, len(ys)), dtype=bool)
    v = np.zeros((len(xs), len(ys) - 1), dtype=bool)
    for y, x0, x1 in hsegs:
        h[xi[x0]:xi[x1], yi[y]] = True
    for x, y0, y1 in vsegs:
        v[xi[x], yi[y0]:yi[y1]] = True
    ilo, jlo = -(p // 2) + 1, -(q // 2) + 1
    mu = xi[mu_range[1]] + ilo
    nu = yi[nu_range[1]] + jlo
    if xi[mu_range[0]] + ilo != 1 or yi[nu_range[0]] + jlo != 1:
        raise MalformedPartition("frame width does not match the orders")
    return from_skeleton(p, q, mu, nu, h, v)


def refine_example4(steps: int, max_steps: int = 8, p: int = 4, q: int = 4, size: int = 4) -> list[IndexTMesh]:
    """Corner refinement sequence toward the bottom-right of the active region.

    See :func:`refine_example4_with_knots`; this drops the knot data.
    """
    return [m for m, _ in refine_example4_with_knots(steps, max_steps, p, q, size)]


def refine_example4_with_knots(steps: int, max_steps: int = 8, p: int = 4, q: int = 4,
                               size: int = 4) -> list[tuple[IndexTMesh, KnotData]]:
    """Corner refinement sequence with its parametric knot lines.

    Step 0 is the ``size x size`` tensor mesh with unit spacing.  Each later
    step splits the bottom-right 2x2 block of finest cells: first both
    columns by vertical edges (prolonged downward through the frame), then
    both rows by horizontal edges (prolonged rightward through the frame).
    The block shrinks by half every step and all knots stay simple.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps > max_steps:
        raise StepLimitExceeded(f"steps={steps} exceeds the limit {max_steps}")

    fp, fq = p // 2, q // 2
    xs = [Fraction(k) for k in range(-fp + 1, size + fp + 1)]
    ys = [Fraction(k) for k in range(-fq + 1, size + fq + 1)]
    x_hi, y_lo = xs[-1], ys[0]
    hsegs = [(y, xs[0], x_hi) for y in ys]
    vsegs = [(x, y_lo, ys[-1]) for x in xs]
    right, bottom, w = Fraction(size), Fraction(1), Fraction(1)

    def snapshot():
        mesh = _mesh_from_lines(p, q, xs, ys, hsegs, vsegs, (1, size), (1, size))
        knots = KnotData.for_mesh(mesh, [float(x) for x in xs], [float(y) for y in ys])
        return mesh, knots

    out = [snapshot()]
    for _ in range(steps):
        left, top = right - 2 * w, bottom + 2 * w
        for x in (left + w / 2, right - w / 2):
            vsegs.append((x, y_lo, top))
        for y in (bottom + w / 2, top - w / 2):
            hsegs.append((y, left, x_hi))
        xs = sorted(set(xs) | {left + w / 2, right - w / 2})
        ys = sorted(set(ys) | {bottom + w / 2, top - w / 2})
        w /= 2
        out.append(snapshot())
    return out


def random_admissible_mesh(rng: np.random.Generator, p: int, q: int, mu: int, nu: int,
                           removals: int | None = None, ad_plus: bool = False) -> IndexTMesh:
    """Tensor mesh with random interior unit segments removed.

    Each removal is kept only if the result is still a rectangular
    partition that is admissible (and admissible-plus when requested).
    """
    vbits = {(i, j): True for i in range(2, mu) for j in range(1, nu)}
    hbits = {(i, j): True for j in range(2, nu) for i in range(1, mu)}
    cand = [("v", k) for k in vbits] + [("h", k) for k in hbits]

    def current():
        return thin_lines(p, q, mu, nu,
                          [k for k, on in vbits.items() if not on],
                          [k for k, on in hbits.items() if not on])

    if removals is None:
        removals = int(rng.integers(0, max(1, len(cand) // 2) + 1))
    done = 0
    for k in rng.permutation(len(cand)):
        if done >= removals:
            break
        kind, key = cand[k]
        bits = vbits if kind == "v" else hbits
        bits[key] = False
        try:
            trial = current()
            status = validate(trial)
        except MalformedPartition:
            status = NOT_ADMISSIBLE
        if status == NOT_ADMISSIBLE or (ad_plus and status != ADMISSIBLE_PLUS):
            bits[key] = True
            continue
        done += 1
    return current()


# -- report ------------------------------------------------------------------------


def classification_report(mesh: IndexTMesh, knots: KnotData | None = None) -> dict:
    """Summary used by the command line ``check`` command."""
    knots = _knots(mesh, knots)
    status = validate(mesh)
    admissible = status != NOT_ADMISSIBLE
    ad_plus = status == ADMISSIBLE_PLUS
    report = {
        "admissible": admissible,
        "ad_plus": ad_plus,
        "analysis_suitable": None,
        "dual_compatible": None,
        "weakly_dc_types": [],
        "vmcr": None,
        "anchors_count": 0,
        "extensions": [],
    }
    if not admissible:
        return report
    exts = extensions(mesh)
    report["analysis_suitable"] = is_analysis_suitable(mesh)
    report["dual_compatible"] = is_dual_compatible(mesh) if ad_plus else None
    report["weakly_dc_types"] = sorted(is_weakly_dc(mesh, knots))
    report["vmcr"] = is_vmcr(mesh, knots)
    report["anchors_count"] = len(anchors(mesh))
    report["extensions"] = [e.to_dict() for e in exts]
    return report
