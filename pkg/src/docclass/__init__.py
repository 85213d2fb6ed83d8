"""docclass: five-class scanned-page classifier.

Block-based chroma/luminance features feed a DAG of ten pairwise RBF SVMs
trained by SMO. See the README for the CLI surface.
"""

from .dagsvm import DagSvmModel, classify, classify_trace, train_dag
from .dataset import SynthSpec, generate, load_corpus, load_model, save_model
from .evaluate import (
    DEFAULT_WEIGHTS,
    grid_search,
    loo_cross_validate,
    select_features,
    weighted_misclassification,
)
from .features import (
    FEATURE_NAMES,
    ClassLabel,
    FeatureConfig,
    FeatureVector,
    extract_features,
)
from .raster import ColorSpace, Raster, partition_blocks, rgb_to_yuv
from .svm import SMO_BACKEND, BinarySvmModel, rbf_kernel, train_binary

__version__ = "0.1.0"

__all__ = [
    "BinarySvmModel",
    "ClassLabel",
    "ColorSpace",
    "DagSvmModel",
    "DEFAULT_WEIGHTS",
    "FEATURE_NAMES",
    "FeatureConfig",
    "FeatureVector",
    "Raster",
    "SMO_BACKEND",
    "SynthSpec",
    "classify",
    "classify_trace",
    "extract_features",
    "generate",
    "grid_search",
    "load_corpus",
    "load_model",
    "loo_cross_validate",
    "partition_blocks",
    "rbf_kernel",
    "rgb_to_yuv",
    "save_model",
    "select_features",
    "train_binary",
    "train_dag",
    "weighted_misclassification",
]
