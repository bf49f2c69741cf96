"""Univariate generalized B-splines (GB-splines) of arbitrary order.

A GB-spline space of order ``p`` is spanned, on every knot span
``[s_j, s_{j+1}]``, by ``{u_j, v_j, 1, s, ..., s^(p-3)}`` where the
``(p-2)``-th derivatives ``U_j, V_j`` of ``u_j, v_j`` form a Chebyshev
space.  Three section cores are supported: trigonometric (``sin``/``cos``
with frequency ``omega``), hyperbolic (``sinh``/``cosh``) and polynomial.

The basis is built by the integral recursion

    N_i^(2)  = V_i / V_i(s_{i+1})  on [s_i, s_{i+1}),  U_{i+1} / U_{i+1}(s_{i+1})  on [s_{i+1}, s_{i+2})
    N_i^(p)  = int_{-inf}^{s} delta_i^(p-1) N_i^(p-1) - delta_{i+1}^(p-1) N_{i+1}^(p-1)
    delta_i^(p) = 1 / int N_i^(p)

and every piece is stored in closed form: on span ``j`` the order-``k``
function reads ``a * A^(k-2)[U_j] + b * A^(k-2)[V_j] + poly(x)`` with
``x = s - s_j`` and ``A^m`` the ``m``-fold primitive vanishing to order
``m`` at the left end of the span.

Indices are 0-based throughout: ``basis.evaluate(0, s)`` is the first
basis function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ChebyshevViolation,
    DegenerateSpan,
    IndexOutOfRange,
    KnotOutsideDomain,
    MultiplicityOverflow,
    MultiplicityTooHigh,
)

__all__ = [
    "SectionCore",
    "GeneratorPair",
    "KnotVector",
    "GBBasis",
    "ZeroSplineStep",
    "make_generator_pair",
    "build_basis",
    "evaluate",
    "delta",
    "insert_knot",
    "refine_to",
]

TRIGONOMETRIC = "trigonometric"
HYPERBOLIC = "hyperbolic"
POLYNOMIAL = "polynomial"
KINDS = (TRIGONOMETRIC, HYPERBOLIC, POLYNOMIAL)


@dataclass(frozen=True)
class SectionCore:
    """Kind of local Chebyshev space attached to one knot interval."""

    kind: str = POLYNOMIAL
    omega: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown section core kind {self.kind!r}")
        if self.kind == POLYNOMIAL:
            object.__setattr__(self, "omega", 0.0)
        elif not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError(f"{self.kind} core needs a positive finite omega")
        else:
            object.__setattr__(self, "omega", float(self.omega))

    @classmethod
    def trigonometric(cls, omega: float) -> "SectionCore":
        return cls(TRIGONOMETRIC, omega)

    @classmethod
    def hyperbolic(cls, omega: float) -> "SectionCore":
        return cls(HYPERBOLIC, omega)

    @classmethod
    def polynomial(cls) -> "SectionCore":
        return cls(POLYNOMIAL)

    def check_span(self, length: float) -> None:
        if length <= 0:
            raise DegenerateSpan(f"span length {length} is not positive")
        if self.kind == TRIGONOMETRIC and self.omega * length >= math.pi:
            raise ChebyshevViolation(
                f"omega*h = {self.omega * length:.6g} >= pi for trigonometric core"
            )

    def to_dict(self) -> dict:
        if self.kind == POLYNOMIAL:
            return {"kind": self.kind}
        return {"kind": self.kind, "omega": self.omega}

    @classmethod
    def from_dict(cls, data: dict) -> "SectionCore":
        return cls(data["kind"], data.get("omega", 0.0))

    def __str__(self):
        if self.kind == POLYNOMIAL:
            return "poly"
        return f"{self.kind[:4]}({self.omega:g})"


POLY = SectionCore.polynomial()


class GeneratorPair:
    """Canonical generating functions ``(U, V)`` of one non-degenerate span.

    ``U`` vanishes at the right end and ``V`` at the left end.  Internally
    both are combinations of a cosine-like ``C`` and sine-like ``S`` in the
    local variable ``x = s - left``:  ``U = uc*C + us*S`` and ``V = S``.
    """

    def __init__(self, core: SectionCore, left: float, right: float):
        self.core = core
        self.left = float(left)
        self.right = float(right)
        self.length = self.right - self.left
        core.check_span(self.length)
        w, h = core.omega, self.length
        if core.kind == POLYNOMIAL:
            self._u = (h, -1.0)
        elif core.kind == TRIGONOMETRIC:
            self._u = (math.sin(w * h), -math.cos(w * h))
        else:
            if w * h > 700:
                raise ValueError("hyperbolic omega*h too large for double precision")
            self._u = (math.sinh(w * h), -math.cosh(w * h))
        # enough series terms for |omega*x| <= omega*h
        self._nterms = 20 + int(math.ceil(w * h))

    def __repr__(self):
        return f"GeneratorPair({self.core}, [{self.left:g}, {self.right:g}])"

    def _series(self, m: int, x: np.ndarray, odd: bool) -> np.ndarray:
        w = self.core.omega
        sigma = -1.0 if self.core.kind == TRIGONOMETRIC else 1.0
        e = m + 1 if odd else m
        term = (w if odd else 1.0) * x**e / math.factorial(e)
        total = term.copy()
        w2x2 = sigma * w * w * x * x
        for k in range(self._nterms):
            term = term * w2x2 / ((e + 2 * k + 1) * (e + 2 * k + 2))
            total += term
        return total

    def _cs(self, m: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """m-fold primitives of (C, S); negative m gives derivatives."""
        kind, w = self.core.kind, self.core.omega
        if kind == POLYNOMIAL:
            if m >= 0:
                return x**m / math.factorial(m), x ** (m + 1) / math.factorial(m + 1)
            zero = np.zeros_like(x)
            return zero, (np.ones_like(x) if m == -1 else zero)
        if m >= 0:
            return self._series(m, x, odd=False), self._series(m, x, odd=True)
        d = -m
        if kind == TRIGONOMETRIC:
            phase = d * math.pi / 2
            return w**d * np.cos(w * x + phase), w**d * np.sin(w * x + phase)
        if d % 2 == 0:
            return w**d * np.cosh(w * x), w**d * np.sinh(w * x)
        return w**d * np.sinh(w * x), w**d * np.cosh(w * x)

    def primitives(self, m: int, s) -> tuple[np.ndarray, np.ndarray]:
        """``(A^m U, A^m V)`` at global abscissae ``s``; ``m < 0`` differentiates."""
        x = np.asarray(s, dtype=float) - self.left
        c, sn = self._cs(m, x)
        uc, us = self._u
        return uc * c + us * sn, sn

    def U(self, s):
        return self.primitives(0, s)[0]

    def V(self, s):
        return self.primitives(0, s)[1]


def make_generator_pair(core: SectionCore, span: tuple[float, float]) -> GeneratorPair:
    return GeneratorPair(core, span[0], span[1])


def _multiplicities(knots: Sequence[float]) -> list[int]:
    arr = np.asarray(knots, dtype=float)
    return [int(np.count_nonzero(arr == v)) for v in arr]


@dataclass(frozen=True)
class KnotVector:
    """Non-decreasing knots ``s_1 <= ... <= s_{n+p}`` for order ``p``."""

    knots: tuple[float, ...]
    order: int

    def __post_init__(self):
        knots = tuple(float(v) for v in self.knots)
        object.__setattr__(self, "knots", knots)
        if self.order < 2:
            raise ValueError("order must be at least 2")
        if len(knots) < self.order + 1:
            raise ValueError(f"need at least {self.order + 1} knots for order {self.order}")
        if any(b < a for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be non-decreasing")
        worst = max(_multiplicities(knots))
        if worst > self.order:
            raise MultiplicityTooHigh(f"knot multiplicity {worst} exceeds order {self.order}")

    @property
    def n(self) -> int:
        return len(self.knots) - self.order

    def multiplicity(self, i: int) -> int:
        return self.knots.count(self.knots[i])

    def __len__(self):
        return len(self.knots)


@dataclass(frozen=True)
class ZeroSplineStep:
    """Stands in for ``delta`` of an identically zero spline.

    The normalized primitive of such a spline is the unit step located at
    ``knot``: 0 for ``s < knot`` and 1 for ``s >= knot``.
    """

    knot: float

    def __call__(self, s):
        return np.where(np.asarray(s, dtype=float) >= self.knot, 1.0, 0.0)


@dataclass
class _Level:
    a: np.ndarray  # (nfun, nspan)
    b: np.ndarray
    c: np.ndarray  # (nfun, nspan, npoly)
    delta: np.ndarray | None = None  # (nfun,), inf marks a zero spline


def _poly_eval(c: np.ndarray, x: np.ndarray, deriv: int = 0) -> np.ndarray:
    """Evaluate rows of coefficients ``c[f, e]`` (powers of x) at ``x``."""
    out = np.zeros((c.shape[0], x.size))
    for e in range(deriv, c.shape[1]):
        scale = math.factorial(e) / math.factorial(e - deriv)
        out += (scale * c[:, e])[:, None] * x[None, :] ** (e - deriv)
    return out


class GBBasis:
    """All ``n`` GB-splines of order ``p`` over a knot vector.

    Immutable after construction.  Lower orders ``2..p`` are kept because
    knot insertion needs their normalization constants.
    """

    def __init__(self, knots: KnotVector, cores: Sequence[SectionCore]):
        self.knot_vector = knots
        self.knots = np.asarray(knots.knots)
        self.order = knots.order
        self.n = knots.n
        cores = tuple(cores)
        if len(cores) != len(self.knots) - 1:
            raise ValueError(
                f"expected {len(self.knots) - 1} section cores, got {len(cores)}"
            )
        self.cores = cores
        self.pairs: list[GeneratorPair | None] = []
        for j, core in enumerate(cores):
            lo, hi = self.knots[j], self.knots[j + 1]
            self.pairs.append(GeneratorPair(core, lo, hi) if hi > lo else None)
        self._nondegenerate = [j for j, pr in enumerate(self.pairs) if pr is not None]
        self._levels: dict[int, _Level] = {}
        self._build()

    def __repr__(self):
        return f"GBBasis(order={self.order}, n={self.n}, knots={list(self.knots)})"

    @property
    def nspans(self) -> int:
        return len(self.knots) - 1

    def _build(self):
        L, p, t = len(self.knots), self.order, self.knots
        nspan = L - 1
        npoly = max(p - 2, 1)

        nf = L - 2
        a = np.zeros((nf, nspan))
        b = np.zeros((nf, nspan))
        c = np.zeros((nf, nspan, npoly))
        for i in range(nf):
            left, right = self.pairs[i], self.pairs[i + 1]
            if left is not None:
                b[i, i] = 1.0 / left.V(left.right)
            if right is not None:
                a[i, i + 1] = 1.0 / right.U(right.left)
        self._levels[2] = _Level(a, b, c)

        for k in range(2, p):
            lev = self._levels[k]
            nf = L - k
            m = k - 2
            integrals = np.zeros((nf, nspan))
            prim_u = np.zeros(nspan)
            prim_v = np.zeros(nspan)
            for j in self._nondegenerate:
                pr = self.pairs[j]
                prim_u[j], prim_v[j] = (float(v) for v in pr.primitives(m + 1, pr.right))
                h = pr.length
                powers = np.array([h ** (e + 1) / (e + 1) for e in range(npoly)])
                integrals[:, j] = lev.a[:, j] * prim_u[j] + lev.b[:, j] * prim_v[j] + lev.c[:, j, :] @ powers
            total = integrals.sum(axis=1)
            zero = np.array([t[i] == t[i + k] for i in range(nf)])
            dlt = np.where(zero, np.inf, 1.0 / np.where(zero, 1.0, total))
            lev.delta = dlt

            # normalized cumulative primitive Phi_i of the order-k function
            cum = np.cumsum(integrals, axis=1) - integrals
            pa = np.zeros((nf, nspan))
            pb = np.zeros((nf, nspan))
            pc = np.zeros((nf, nspan, npoly))
            for i in range(nf):
                if zero[i]:
                    pc[i, i + k:, 0] = 1.0
                    continue
                d = dlt[i]
                span = slice(i, i + k)
                pa[i, span] = d * lev.a[i, span]
                pb[i, span] = d * lev.b[i, span]
                pc[i, span, 0] = d * cum[i, span]
                for e in range(npoly - 1):
                    pc[i, span, e + 1] = d * lev.c[i, span, e] / (e + 1)
                pc[i, i + k:, 0] = 1.0
            self._levels[k + 1] = _Level(pa[:-1] - pa[1:], pb[:-1] - pb[1:], pc[:-1] - pc[1:])

        last = self._levels[p]
        if p >= 2 and last.delta is None:
            # delta of the top order, used by refinement bookkeeping and reports
            nf = L - p
            integ = np.zeros(nf)
            for j in self._nondegenerate:
                pr = self.pairs[j]
                pu, pv = (float(v) for v in pr.primitives(p - 1, pr.right))
                powers = np.array([pr.length ** (e + 1) / (e + 1) for e in range(npoly)])
                integ += last.a[:, j] * pu + last.b[:, j] * pv + last.c[:, j, :] @ powers
            zero = np.array([t[i] == t[i + p] for i in range(nf)])
            last.delta = np.where(zero, np.inf, 1.0 / np.where(zero, 1.0, integ))

    # -- evaluation ---------------------------------------------------------

    def _span_index(self, s: np.ndarray) -> np.ndarray:
        t = self.knots
        j = np.searchsorted(t, s, side="right") - 1
        j = np.where(s == t[-1], self._nondegenerate[-1], j)
        inside = (s >= t[0]) & (s <= t[-1])
        return np.where(inside, j, -1)

    def values(self, s, order: int | None = None, deriv: int = 0) -> np.ndarray:
        """Matrix ``(nfun, len(s))`` of all order-``order`` functions (or derivatives)."""
        order = self.order if order is None else order
        if not 2 <= order <= self.order:
            raise ValueError(f"order must lie in [2, {self.order}]")
        lev = self._levels[order]
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros((lev.a.shape[0], s.size))
        jidx = self._span_index(s)
        m = order - 2
        for j in np.unique(jidx):
            if j < 0:
                continue
            mask = jidx == j
            pr = self.pairs[j]
            x = s[mask] - pr.left
            au, av = pr.primitives(m - deriv, s[mask])
            block = lev.a[:, j, None] * au[None, :] + lev.b[:, j, None] * av[None, :]
            block += _poly_eval(lev.c[:, j, :], x, deriv)
            out[:, mask] = block
        if deriv == 0:
            # true values are nonnegative; remove rounding noise near span ends
            np.maximum(out, 0.0, out=out)
        return out

    def evaluate(self, i: int, s, deriv: int = 0, order: int | None = None):
        order = self.order if order is None else order
        nfun = len(self.knots) - order
        if not 0 <= i < nfun:
            raise IndexOutOfRange(f"basis index {i} outside [0, {nfun})")
        scalar = np.ndim(s) == 0
        row = self.values(s, order=order, deriv=deriv)[i]
        return float(row[0]) if scalar else row

    def __call__(self, s):
        return self.values(s)

    def delta(self, i: int, order: int | None = None):
        """Reciprocal integral of ``N_i``, or a :class:`ZeroSplineStep`."""
        order = self.order if order is None else order
        lev = self._levels[order]
        if not 0 <= i < len(lev.delta):
            raise IndexOutOfRange(f"basis index {i} outside [0, {len(lev.delta)})")
        d = lev.delta[i]
        if np.isinf(d):
            return ZeroSplineStep(float(self.knots[i + order]))
        return float(d)

    def _delta_raw(self, order: int) -> np.ndarray:
        return self._levels[order].delta

    def piece(self, i: int, j: int, order: int | None = None) -> tuple[float, float, np.ndarray]:
        """Closed-form coefficients ``(a, b, poly)`` of function ``i`` on span ``j``."""
        order = self.order if order is None else order
        lev = self._levels[order]
        npoly = max(order - 2, 0)
        return float(lev.a[i, j]), float(lev.b[i, j]), lev.c[i, j, :npoly].copy()

    @property
    def support_interval(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def reflected(self) -> "GBBasis":
        """Basis on the mirrored knot vector ``-s``; function ``i`` maps to ``n-1-i``."""
        knots = KnotVector(tuple(-self.knots[::-1]), self.order)
        return GBBasis(knots, self.cores[::-1])


def build_basis(knots, cores: Sequence[SectionCore] | SectionCore | None = None, p: int | None = None) -> GBBasis:
    """Build the order-``p`` GB-spline basis.

    ``knots`` may be a :class:`KnotVector` or a plain sequence (then ``p``
    is required).  ``cores`` is one core per knot interval, or a single core
    used everywhere (polynomial by default).
    """
    if not isinstance(knots, KnotVector):
        if p is None:
            raise ValueError("order p is required with a plain knot sequence")
        knots = KnotVector(tuple(knots), p)
    elif p is not None and p != knots.order:
        raise ValueError("p disagrees with the knot vector order")
    if cores is None:
        cores = POLY
    if isinstance(cores, SectionCore):
        cores = [cores] * (len(knots) - 1)
    return GBBasis(knots, cores)


def evaluate(basis: GBBasis, i: int, s, deriv: int = 0):
    return basis.evaluate(i, s, deriv=deriv)


def delta(basis: GBBasis, i: int, p: int | None = None):
    return basis.delta(i, p)


def _ratio(num: float, den: float) -> float:
    # both infinite: the same Dirac step on both sides of the identity
    if np.isinf(num) and np.isinf(den):
        return 1.0
    if np.isinf(num) or np.isinf(den):
        raise AssertionError("zero spline paired with a nonzero spline in insertion recursion")
    return num / den


def _insertion_coefficients(basis: GBBasis, refined: GBBasis, i0: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """alpha_{j,p}, beta_{j,p} in 1-based indexing (index 0 unused).

    ``i0`` is the 0-based span containing the new knot, ``r`` the
    multiplicity of the new knot before insertion.
    """
    L = len(basis.knots)
    p = basis.order
    i = i0 + 1
    pair = basis.pairs[i0]
    sbar = refined.knots[i0 + 1]

    alpha = np.zeros(L + 2)
    beta = np.zeros(L + 2)
    for j in range(1, L - 1):
        if j < i:
            alpha[j] = 1.0
        elif j == i:
            alpha[j] = float(pair.V(sbar) / pair.V(pair.right))
    for j in range(1, L + 1):
        if j == i:
            beta[j] = float(pair.U(sbar) / pair.U(pair.left))
        elif j > i:
            beta[j] = 1.0

    for k in range(3, p + 1):
        d = basis._delta_raw(k - 1)
        dbar = refined._delta_raw(k - 1)
        new_alpha = np.zeros(L + 2)
        new_beta = np.zeros(L + 2)
        nk = L - k
        for j in range(1, nk + 1):
            if j <= i - k:
                new_alpha[j] = 1.0
            elif j < i - r + 1:
                new_alpha[j] = _ratio(d[j - 1], dbar[j - 1]) * alpha[j]
        for j in range(1, nk + 2):
            if j <= i - k + 1:
                continue
            if j < i - r + 2:
                new_beta[j] = _ratio(d[j - 1], dbar[j]) * beta[j + 1]
            else:
                new_beta[j] = 1.0
        alpha, beta = new_alpha, new_beta
    return alpha, beta


def insert_knot(basis: GBBasis, sbar: float) -> tuple[GBBasis, list[tuple[float, float]]]:
    """Insert ``sbar`` and return the refined basis with ``(alpha_j, beta_{j+1})`` pairs.

    ``N_j = alpha_j * Nbar_j + beta_{j+1} * Nbar_{j+1}`` for every original
    function ``j``.  The new spans on either side of ``sbar`` inherit the
    section core of the span that contained it.
    """
    t = basis.knots
    sbar = float(sbar)
    if sbar < t[0] or sbar > t[-1]:
        raise KnotOutsideDomain(f"{sbar} outside [{t[0]}, {t[-1]}]")
    r = int(np.count_nonzero(t == sbar))
    if r + 1 > basis.order:
        raise MultiplicityOverflow(
            f"inserting {sbar} gives multiplicity {r + 1} > order {basis.order}"
        )
    if sbar == t[-1]:
        mirrored, coeffs = insert_knot(basis.reflected(), -sbar)
        n = basis.n
        flipped = [(coeffs[n - 1 - j][1], coeffs[n - 1 - j][0]) for j in range(n)]
        return mirrored.reflected(), flipped

    i0 = int(np.searchsorted(t, sbar, side="right")) - 1
    knots = KnotVector(tuple(np.insert(t, i0 + 1, sbar)), basis.order)
    cores = basis.cores[: i0 + 1] + (basis.cores[i0],) + basis.cores[i0 + 1:]
    refined = GBBasis(knots, cores)
    alpha, beta = _insertion_coefficients(basis, refined, i0, r)
    coeffs = [(float(alpha[j]), float(beta[j + 1])) for j in range(1, basis.n + 1)]
    return refined, coeffs


def _refine(local: GBBasis, targets: Sequence[float]) -> tuple[np.ndarray, GBBasis]:
    coef = np.ones(1)
    basis = local
    for sbar in sorted(float(v) for v in targets):
        basis, pairs = insert_knot(basis, sbar)
        new = np.zeros(basis.n)
        for j, (al, be) in enumerate(pairs):
            new[j] += coef[j] * al
            new[j + 1] += coef[j] * be
        coef = new
    return coef, basis


def refine_to(local: GBBasis, targets: Sequence[float]) -> np.ndarray:
    """Expand a single GB-spline over the basis refined by ``targets``.

    ``local`` must hold exactly one function (``p+1`` knots).  The result
    ``c`` satisfies ``N = sum_k c[k] * Nbar_k`` where ``Nbar_k`` lives on the
    ``k``-th consecutive ``p+1`` window of the refined knot vector.
    """
    if local.n != 1:
        raise ValueError("refine_to expects a basis with exactly one function")
    return _refine(local, targets)[0]


def refine_with_basis(local: GBBasis, targets: Sequence[float]) -> tuple[np.ndarray, GBBasis]:
    """Like :func:`refine_to` but also returns the refined basis."""
    if local.n != 1:
        raise ValueError("refine_to expects a basis with exactly one function")
    return _refine(local, targets)
