"""Refinement matrices of T-mesh blending functions and rank tests.

Each blending function of a T-mesh is expanded, by repeated knot
insertion in both directions, over the blending functions of the
underlying tensor-product mesh.  The coefficient matrix is full rank
exactly when the T-mesh functions are linearly independent.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import FunctionVectorMismatch
from .gbspline import POLY, build_basis, refine_with_basis
from .surface import blend_matrix
from .tmesh import Anchor, IndexTMesh, KnotData, anchors, underlying_tp_mesh

__all__ = [
    "GB",
    "POLYNOMIAL_FLAVOR",
    "RANK_TOL",
    "ZERO_TOL",
    "RefinementMatrix",
    "univariate_expansion",
    "build_refinement_matrix",
    "numeric_rank",
    "is_full_rank",
    "gram_rank_oracle",
]

GB = "gb"
POLYNOMIAL_FLAVOR = "poly"
RANK_TOL = 1e-8
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class RefinementMatrix:
    """Coefficients ``N_A = sum_B entries[A, B] * Nhat_B``."""

    entries: np.ndarray
    rows: tuple
    cols: tuple
    flavor: str

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def pattern(self, zero_tol: float = ZERO_TOL) -> np.ndarray:
        return np.abs(self.entries) > zero_tol

    def pattern_text(self, zero_tol: float = ZERO_TOL) -> str:
        return "\n".join("".join("1" if v else "0" for v in row) for row in self.pattern(zero_tol)) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["anchor"] + [c.label for c in self.cols])
        for a, row in zip(self.rows, self.entries):
            w.writerow([a.label] + [repr(float(v)) for v in row])
        return buf.getvalue()


@lru_cache(maxsize=8192)
def _expansion(knots: tuple, cores: tuple, targets: tuple) -> tuple[np.ndarray, tuple, tuple]:
    basis = build_basis(knots, list(cores), len(knots) - 1)
    coef, refined = refine_with_basis(basis, targets)
    coef.setflags(write=False)
    return coef, tuple(refined.knots.tolist()), refined.cores


def univariate_expansion(local: tuple, values: tuple, cores: tuple, first: int) -> tuple[np.ndarray, list[tuple]]:
    """Expand one univariate function over the consecutive windows it covers.

    ``local`` is a local index vector, ``values[k - first]`` the knot with
    index ``k`` and ``cores[k - first]`` the core of ``[s_k, s_{k+1}]``.
    Returns the coefficients and, for each one, the index window of the
    target function.
    """
    lo, hi = min(local), max(local)
    local_knots = tuple(values[k - first] for k in local)
    local_cores = tuple(cores[k - first] for k in local[:-1])
    targets = tuple(values[k - first] for k in range(lo, hi + 1) if k not in set(local))
    coef, refined_knots, refined_cores = _expansion(local_knots, local_cores, targets)
    full = list(range(lo, hi + 1))
    # refined spans must carry the same section data as the global vectors
    for a in range(len(full) - 1):
        k = full[a]
        if refined_knots[a + 1] > refined_knots[a] and refined_cores[a] != cores[k - first]:
            raise FunctionVectorMismatch(
                f"span [{k}, {k + 1}] carries {refined_cores[a]} after insertion but {cores[k - first]} globally"
            )
    p = len(local) - 1
    windows = [tuple(full[m:m + p + 1]) for m in range(len(coef))]
    return np.asarray(coef), windows


def build_refinement_matrix(mesh: IndexTMesh, knots: KnotData | None = None, flavor: str = GB) -> RefinementMatrix:
    """Matrix ``C`` (GB flavor) or ``D`` (polynomial flavor) of the mesh."""
    knots = KnotData.uniform(mesh) if knots is None else knots
    if flavor == POLYNOMIAL_FLAVOR:
        knots = knots.with_cores(POLY, POLY)
    elif flavor != GB:
        raise ValueError(f"unknown flavor {flavor!r}")
    rows = anchors(mesh)
    cols = anchors(underlying_tp_mesh(mesh))
    col_index = {(c.local_s, c.local_t): k for k, c in enumerate(cols)}
    out = np.zeros((len(rows), len(cols)))
    for r, a in enumerate(rows):
        cs, ws = univariate_expansion(a.local_s, knots.knots_s, knots.cores_s, knots.first_s)
        ct, wt = univariate_expansion(a.local_t, knots.knots_t, knots.cores_t, knots.first_t)
        for x, win_s in zip(cs, ws):
            for y, win_t in zip(ct, wt):
                val = x * y
                if val == 0.0:
                    continue
                k = col_index.get((win_s, win_t))
                if k is None:
                    raise FunctionVectorMismatch(f"window {win_s} x {win_t} has no tensor-product anchor")
                out[r, k] = val
    return RefinementMatrix(out, tuple(rows), tuple(cols), flavor)


def numeric_rank(matrix, tol: float = RANK_TOL) -> int:
    m = np.asarray(matrix, dtype=float)
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(sv > tol * sv[0])) if sv[0] > 0 else 0


def is_full_rank(matrix, tol: float = RANK_TOL) -> bool:
    """Numeric rank equals the row count."""
    m = matrix.entries if isinstance(matrix, RefinementMatrix) else np.asarray(matrix, dtype=float)
    n, nhat = m.shape
    if n > nhat:
        return False
    return numeric_rank(m, tol) == n


def _gauss_samples(breaks: np.ndarray, minimum: int) -> np.ndarray:
    spans = [(a, b) for a, b in zip(breaks[:-1], breaks[1:]) if b > a]
    per = max(2, -(-minimum // max(1, len(spans))))
    x, _ = leggauss(per)
    pts = [0.5 * (a + b) + 0.5 * (b - a) * x for a, b in spans]
    return np.concatenate(pts)


def gram_rank_oracle(mesh: IndexTMesh, knots: KnotData | None = None, flavor: str = GB,
                     tol: float = RANK_TOL, anchor_list: list[Anchor] | None = None) -> bool:
    """Independence verdict from sampled blending functions.

    Functions are sampled at Gauss points of every knot span inside the
    parametric active region, rows are normalized, and the numeric rank of
    the function-by-sample matrix is compared with the number of functions.
    """
    knots = KnotData.uniform(mesh) if knots is None else knots
    if flavor == POLYNOMIAL_FLAVOR:
        knots = knots.with_cores(POLY, POLY)
    anchor_list = anchors(mesh) if anchor_list is None else anchor_list
    (s0, s1), (t0, t1) = knots.active_s(mesh), knots.active_t(mesh)
    bs = np.array([v for v in knots.knots_s if s0 <= v <= s1])
    bt = np.array([v for v in knots.knots_t if t0 <= v <= t1])
    need = 4 * (mesh.p + mesh.q)
    s = _gauss_samples(bs, need)
    t = _gauss_samples(bt, need)
    vals = blend_matrix(mesh, knots, s, t, anchor_list)
    norms = np.linalg.norm(vals, axis=1)
    norms[norms == 0] = 1.0
    vals = vals / norms[:, None]
    return numeric_rank(vals, tol) == len(anchor_list)
