"""Descriptor-based binary few-shot classification from precomputed
image-descriptor similarity matrices.

The numeric pipeline is decoupled from any vision-language model: a
similarity matrix (images x descriptors, with binary labels) is the input
to everything here. Class scoring, descriptor selection/weighting,
threshold calibration, metrics, mask shape features and the experiment
protocols live in the submodules:

- core: domain types and file formats
- scoring: class/classification scores, descriptor selection, weighting
- metrics: ROC/AUC, cut-off calibration, Spearman, ICC, ensembling
- shape: binary-mask geometry and PGM files
- experiments: n-shot curves, variability study, feature export
- cli: the ``descshot`` command
"""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    NEGATIVE,
    POSITIVE,
    DescriptorKey,
    DescriptorSet,
    LabeledScores,
    SimilarityMatrix,
    read_descriptor_sets,
    read_similarity_matrix,
    write_similarity_matrix,
)
from .errors import (  # noqa: F401
    DescshotError,
    MaskError,
    ParseError,
    UndefinedStatisticError,
    ValidationError,
)
from .metrics import (  # noqa: F401
    EvaluationReport,
    RocCurve,
    calibrate_cutoff,
    icc,
    roc_auc,
    spearman,
)
from .scoring import (  # noqa: F401
    SelectionResult,
    WeightedSelected,
    ZeroShot,
    class_score,
    classification_score,
    classify,
    descriptor_scores,
    weighted_class_score,
)
from .shape import Mask, ShapeFeatures, crop_bbox_with_margin, shape_features  # noqa: F401
