"""Generalized B-splines and GT-splines over index T-meshes.

Modules: ``gbspline`` (univariate basis and knot insertion), ``tmesh``
(index T-meshes, anchors, index vectors), ``classify`` (sparsity pattern
and mesh classes), ``independence`` (refinement matrices and rank),
``surface`` (blending functions and rational surfaces) and ``cli``.
"""
from .errors import *  # noqa: F401,F403
from .gbspline import (
    POLY,
    GBBasis,
    GeneratorPair,
    KnotVector,
    SectionCore,
    build_basis,
    delta,
    evaluate,
    insert_knot,
    make_generator_pair,
    refine_to,
)
from .tmesh import (
    Anchor,
    Extension,
    IndexTMesh,
    KnotData,
    anchors,
    bar_index_vector,
    extensions,
    index_vectors,
    load_mesh,
    tensor_mesh,
    thin_lines,
    underlying_tp_mesh,
    validate,
)
from .classify import (
    column_reduction,
    is_analysis_suitable,
    is_dual_compatible,
    is_vmcr,
    is_weakly_dc,
    refine_example4,
    shifted,
    sparsity_matrix,
)
from .independence import build_refinement_matrix, gram_rank_oracle, is_full_rank
from .surface import ControlNet, GTSurface, blend, eval_curve, eval_surface, reproduce_reference

__version__ = "0.1.0"
