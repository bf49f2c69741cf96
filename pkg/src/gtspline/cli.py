"""Command line front end.

Exit codes: 0 success, 2 unreadable or malformed input, 3 mesh not
admissible.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .classify import classification_report, column_reduction, is_void, random_admissible_mesh, refine_example4_with_knots
from .errors import GTSplineError, MalformedPartition, NotAdmissible, ParseError, StepLimitExceeded
from .gbspline import POLY, SectionCore
from .independence import GB, POLYNOMIAL_FLAVOR, RANK_TOL, ZERO_TOL, build_refinement_matrix, is_full_rank, numeric_rank
from .surface import (
    ControlNet,
    GTSurface,
    export_csv,
    export_obj,
    helicoid_section,
    reference_setup,
    reproduce_reference,
    sample_grid,
    spring,
)
from .tmesh import NOT_ADMISSIBLE, KnotData, dumps_mesh, load_mesh, validate

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_NOT_ADMISSIBLE = 3


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _resolution(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("resolution must be at least 2")
    return v


def _write(text: str, output) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _load(path):
    try:
        return load_mesh(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _require_admissible(mesh) -> None:
    if validate(mesh) == NOT_ADMISSIBLE:
        raise NotAdmissible("mesh is not admissible for its bi-order")


# -- commands ---------------------------------------------------------------------


def cmd_check(args) -> int:
    mesh, knots = _load(args.input)
    report = classification_report(mesh, knots)
    _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)
    if args.figure:
        from .plotting import plot_mesh

        plot_mesh(mesh, args.figure)
    if not report["admissible"]:
        print("error: mesh is not admissible for its bi-order", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    return EXIT_OK


def cmd_matrix(args) -> int:
    mesh, knots = _load(args.input)
    _require_admissible(mesh)
    flavor = GB if args.flavor == "gb" else POLYNOMIAL_FLAVOR
    mat = build_refinement_matrix(mesh, knots, flavor)
    if args.output:
        Path(args.output).write_text(mat.to_csv(), encoding="utf-8")
    if args.pattern:
        Path(args.pattern).write_text(mat.pattern_text(args.zero_tol), encoding="utf-8")
    pattern = mat.pattern(args.zero_tol)
    n, nhat = mat.shape
    rank = numeric_rank(mat.entries, args.rank_tol)
    full = is_full_rank(mat, args.rank_tol)
    void = is_void(column_reduction(pattern.T))
    print("flavor,n,n_hat,rank,full_rank,pattern_void")
    print(f"{args.flavor},{n},{nhat},{rank},{str(full).lower()},{str(void).lower()}")
    if args.figure:
        from .plotting import plot_pattern

        plot_pattern(pattern, args.figure, title=f"{args.flavor} refinement pattern")
    return EXIT_OK


def cmd_refine(args) -> int:
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    seq = refine_example4_with_knots(args.steps, max_steps=args.max_steps)
    for k, (mesh, knots) in enumerate(seq):
        path = out / f"step_{k:02d}.json"
        path.write_text(dumps_mesh(mesh, knots), encoding="utf-8")
        print(path)
    if args.figure:
        from .plotting import plot_mesh

        plot_mesh(seq[-1][0], args.figure)
    return EXIT_OK


def _spans_needed(length: float, omega: float) -> int:
    # keep omega * span below pi/2 so every core is comfortably Chebyshev
    return max(2, math.ceil(length * omega / (math.pi / 2)) + 1)


def cmd_surface(args) -> int:
    if args.shape:
        if args.shape == "helicoid":
            shape = helicoid_section(args.r1, args.r2, args.height if args.height else 6.0, args.omega)
        else:
            shape = spring(args.R, args.r, args.height if args.height else 8 * math.pi, args.omega_s, args.omega_t)
        if args.input:
            mesh, _ = _load(args.input)
            _require_admissible(mesh)
            poly = args.flavor == "poly"
            cs = POLY if poly else SectionCore.trigonometric(shape.omega_s)
            ct = POLY if poly else SectionCore.trigonometric(shape.omega_t)
            knots = KnotData.clamped(mesh, shape.s_range, shape.t_range, cs, ct)
        else:
            ls = shape.s_range[1] - shape.s_range[0]
            lt = shape.t_range[1] - shape.t_range[0]
            mu = args.mu or _spans_needed(ls, shape.omega_s) + 3
            nu = args.nu or _spans_needed(lt, shape.omega_t) + 3
            mesh, knots = reference_setup(shape, mu, nu, args.flavor == "poly")
        err, surf = reproduce_reference(shape, mesh, knots, resolution=args.resolution)
        s, t, pts = sample_grid(surf, args.resolution)
        err_line = f"max_error,{err!r}\n"
    else:
        if not args.input or not args.net:
            raise ParseError("surface needs --shape, or both --input and --net")
        mesh, knots = _load(args.input)
        _require_admissible(mesh)
        net = _load_net(args.net)
        surf = GTSurface(mesh, knots, net)
        s, t, pts = sample_grid(surf, args.resolution)
        err_line = None
    text = export_obj(pts) if args.output and str(args.output).endswith(".obj") else export_csv(s, t, pts)
    _write(text, args.output)
    if err_line:
        (sys.stdout if args.output else sys.stderr).write(err_line)
    if args.figure:
        from .plotting import plot_surface

        plot_surface(pts, args.figure)
    return EXIT_OK


def _load_net(path) -> ControlNet:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        pts = np.asarray(data["points"], dtype=float)
        w = np.asarray(data.get("weights", np.ones(len(pts))), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad control net: {exc}") from None
    return ControlNet(pts, w)


def cmd_random(args) -> int:
    rng = np.random.default_rng(args.seed)
    mesh = random_admissible_mesh(rng, args.p, args.q, args.mu, args.nu, ad_plus=args.ad_plus)
    _write(dumps_mesh(mesh, KnotData.uniform(mesh)), args.output)
    if args.figure:
        from .plotting import plot_mesh

        plot_mesh(mesh, args.figure)
    return EXIT_OK


# -- parser ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtspline", description="GT-spline mesh classification and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        p.add_argument("--input", required=needs_input, help="mesh JSON file")
        p.add_argument("--output", help="output file (stdout when omitted)")
        p.add_argument("--figure", help="also render a PNG figure to this path")

    p = sub.add_parser("check", help="validate and classify a mesh")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("matrix", help="build the refinement matrix and test its rank")
    common(p)
    p.add_argument("--flavor", choices=("gb", "poly"), default="gb")
    p.add_argument("--rank-tol", type=_positive, default=RANK_TOL)
    p.add_argument("--zero-tol", type=_positive, default=ZERO_TOL)
    p.add_argument("--pattern", help="write the 0/1 pattern grid to this file")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("refine", help="write the corner refinement sequence")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--max-steps", type=int, default=8)
    p.add_argument("--output", required=True, help="directory for step_NN.json files")
    p.add_argument("--figure", help="render the last mesh to this path")
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("surface", help="sample a GT-spline surface")
    common(p, needs_input=False)
    p.add_argument("--net", help="control net JSON with points and optional weights")
    p.add_argument("--shape", choices=("helicoid", "spring"))
    p.add_argument("--flavor", choices=("gb", "poly"), default="gb")
    p.add_argument("--resolution", type=_resolution, default=101)
    p.add_argument("--r1", type=float, default=0.5)
    p.add_argument("--r2", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=3.0)
    p.add_argument("--R", type=float, default=3.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--omega-s", type=float, default=1.0)
    p.add_argument("--omega-t", type=float, default=2.0)
    p.add_argument("--height", type=float)
    p.add_argument("--mu", type=int)
    p.add_argument("--nu", type=int)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("random", help="write a seeded random admissible mesh")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=int, default=4)
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--mu", type=int, default=6)
    p.add_argument("--nu", type=int, default=6)
    p.add_argument("--ad-plus", action="store_true")
    p.add_argument("--output")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_random)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, MalformedPartition) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NotAdmissible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_ADMISSIBLE
    except (StepLimitExceeded, ValueError, GTSplineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
