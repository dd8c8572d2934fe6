"""Spectral-spatial manifold scaling-cut dimensionality reduction for
hyperspectral image cubes, with built-in classification and evaluation."""

from .classify import (
    LinearModel,
    Metrics,
    default_palette,
    evaluate,
    predict,
    predict_1nn,
    render_map,
    train_linear_ovr,
)
from .data import (
    HsiCube,
    LabelMap,
    SampleSet,
    Split,
    flatten,
    load_cube,
    minmax_normalize,
    save_cube,
    stratified_split,
    subset,
)
from .estimators import (
    HierarchicalGuidedFilter,
    OneNearestNeighbor,
    OvRHingeClassifier,
    S3RMLSC,
)
from .filters import FilterParams, box_mean, guided_filter, hgf, pca_guidance
from .graph import Graph, LaplacianBundle, knn_adjacency, laplacian, semisup_penalty
from .patches import (
    LinearityParams,
    Patch,
    build_patches,
    geodesic_matrix,
    hdc_mlp,
    nonlinearity_degree,
    pair_patches,
)
from .pipeline import PipelineConfig, load_projection, run_pipeline, save_projection
from .scatter import (
    ScatterPair,
    SpatialContext,
    fuse,
    mlsc_scatter,
    npmlsc_scatter,
    regularize_spectral,
    spatial_neighborhood,
)
from .solver import Projection, assemble_objective, project, sym_eig_topd, trace_ratio_dnm
from .synth import synth_dataset

__version__ = "0.1.0"

__all__ = [
    "FilterParams",
    "Graph",
    "HierarchicalGuidedFilter",
    "HsiCube",
    "LabelMap",
    "LaplacianBundle",
    "LinearModel",
    "LinearityParams",
    "Metrics",
    "OneNearestNeighbor",
    "OvRHingeClassifier",
    "Patch",
    "PipelineConfig",
    "Projection",
    "S3RMLSC",
    "SampleSet",
    "ScatterPair",
    "SpatialContext",
    "Split",
    "assemble_objective",
    "box_mean",
    "build_patches",
    "default_palette",
    "evaluate",
    "flatten",
    "fuse",
    "geodesic_matrix",
    "guided_filter",
    "hdc_mlp",
    "hgf",
    "knn_adjacency",
    "laplacian",
    "load_cube",
    "load_projection",
    "minmax_normalize",
    "mlsc_scatter",
    "nonlinearity_degree",
    "npmlsc_scatter",
    "pair_patches",
    "pca_guidance",
    "predict",
    "predict_1nn",
    "project",
    "regularize_spectral",
    "render_map",
    "run_pipeline",
    "save_cube",
    "save_projection",
    "spatial_neighborhood",
    "stratified_split",
    "subset",
    "sym_eig_topd",
    "synth_dataset",
    "trace_ratio_dnm",
    "train_linear_ovr",
]
