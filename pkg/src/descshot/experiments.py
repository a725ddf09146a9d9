"""Experiment protocols: n-shot sampling curves, multi-set variability,
descriptor frequency counting and feature-vector export.

Every sampled quantity draws from an RNG derived only from
(base_seed, n, run_index), so results are bit-identical regardless of
execution order or thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    NEGATIVE,
    POSITIVE,
    DescriptorSet,
    SimilarityMatrix,
    normalize_descriptor,
)
from .errors import UndefinedStatisticError, ValidationError
from .metrics import (
    ICC_TWO_WAY_RANDOM,
    accuracy_at,
    calibrate_cutoff,
    ensemble_scores,
    icc,
    roc_auc,
)
from .scoring import (
    SIGN_PER_CLASS,
    WeightedSelected,
    ZeroShot,
    descriptor_scores,
    labeled_scores,
)

SAMPLE_WITH_REPLACEMENT = "with_replacement"
SAMPLE_WITHOUT_REPLACEMENT = "without_replacement"

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, n: int, run: int) -> int:
    """Stable 64-bit seed for one (n, run) cell, independent of ordering."""
    return base_seed ^ _splitmix64(_splitmix64(n) ^ run)


@dataclass(frozen=True)
class NShotConfig:
    n_values: tuple[int, ...]
    runs_per_n: int = 100
    sampling: str = SAMPLE_WITHOUT_REPLACEMENT
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ValidationError("n_values must be positive integers")
        if self.runs_per_n < 1:
            raise ValidationError("runs_per_n must be >= 1")
        if self.sampling not in (SAMPLE_WITH_REPLACEMENT, SAMPLE_WITHOUT_REPLACEMENT):
            raise ValidationError(f"unknown sampling mode {self.sampling!r}")
        if self.base_seed < 0:
            raise ValidationError("base_seed must be unsigned")


@dataclass(frozen=True)
class NShotCurvePoint:
    n: int
    mean_accuracy: float
    mean_auc: float
    mean_kept_positive: float
    mean_kept_negative: float


@dataclass(frozen=True)
class VariabilityReport:
    per_set_auc: tuple[float, ...]
    mean_auc: float
    min_auc: float
    max_auc: float
    ensemble_auc: float
    icc: float | None
    icc_undefined: bool
    descriptor_frequencies: dict[int, tuple[tuple[str, int], ...]]

    def to_json_dict(self) -> dict:
        return {
            "per_set_auc": list(self.per_set_auc),
            "mean_auc": self.mean_auc,
            "min_auc": self.min_auc,
            "max_auc": self.max_auc,
            "ensemble_auc": self.ensemble_auc,
            "icc": self.icc,
            "icc_undefined": self.icc_undefined,
            "descriptor_frequencies": {
                ("+1" if cls == POSITIVE else "-1"): [
                    [text, count] for text, count in items
                ]
                for cls, items in self.descriptor_frequencies.items()
            },
        }


def _class_indices(m: SimilarityMatrix, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    labels = m.labels[indices]
    return indices[labels == POSITIVE], indices[labels == NEGATIVE]


def _run_one(
    m: SimilarityMatrix,
    pos_train: np.ndarray,
    neg_train: np.ndarray,
    test_indices: np.ndarray,
    n: int,
    run: int,
    cfg: NShotConfig,
    sign_convention: str,
) -> tuple[float, float, int, int]:
    rng = np.random.default_rng(derive_seed(cfg.base_seed, n, run))
    replace = cfg.sampling == SAMPLE_WITH_REPLACEMENT
    # sorted samples: runs drawing the same multiset are bit-identical
    sample = np.concatenate(
        (
            np.sort(rng.choice(pos_train, size=n, replace=replace)),
            np.sort(rng.choice(neg_train, size=n, replace=replace)),
        )
    )
    selection = descriptor_scores(m, sample, sign_convention=sign_convention)
    mode = WeightedSelected(selection)
    # cutoff calibrated on the sampled training images only (duplicates
    # from with-replacement sampling count per occurrence)
    cutoff = calibrate_cutoff(labeled_scores(m, mode, sample))
    test_scores = labeled_scores(m, mode, test_indices)
    conf = accuracy_at(test_scores, cutoff)
    auc = roc_auc(test_scores).auc
    return conf.accuracy, auc, len(selection.kept_positive), len(selection.kept_negative)


def run_nshot(
    m: SimilarityMatrix,
    train_indices,
    test_indices,
    cfg: NShotConfig,
    sign_convention: str = SIGN_PER_CLASS,
    threads: int = 1,
) -> list[NShotCurvePoint]:
    """n-shot protocol: for each n, ``cfg.runs_per_n`` runs each sample n
    positive and n negative training images, select and weight descriptors
    on the sample, calibrate the cutoff on the sample, and evaluate
    accuracy/AUC on the test split; per-n means are returned.
    """
    train = np.unique(np.asarray(train_indices, dtype=np.intp))
    test = np.asarray(test_indices, dtype=np.intp)
    if train.size == 0 or test.size == 0:
        raise ValidationError("train and test splits must be non-empty")
    if np.intersect1d(train, test).size:
        raise ValidationError("train and test splits must be disjoint")
    for name, idx in (("train", train), ("test", test)):
        if idx.min() < 0 or idx.max() >= m.n_images:
            raise ValidationError(f"{name} index out of range")
        labs = m.labels[idx]
        if not ((labs == POSITIVE).any() and (labs == NEGATIVE).any()):
            raise ValidationError(f"{name} split must contain both classes")
    pos_train, neg_train = _class_indices(m, train)
    if cfg.sampling == SAMPLE_WITHOUT_REPLACEMENT:
        limit = min(pos_train.size, neg_train.size)
        bad = [n for n in cfg.n_values if n > limit]
        if bad:
            raise ValidationError(
                f"without-replacement sampling infeasible: n={bad[0]} exceeds the "
                f"smaller training class ({limit} images)"
            )

    tasks = [(n, run) for n in cfg.n_values for run in range(cfg.runs_per_n)]

    def work(task):
        n, run = task
        return _run_one(
            m, pos_train, neg_train, test, n, run, cfg, sign_convention
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]

    points: list[NShotCurvePoint] = []
    for i, n in enumerate(cfg.n_values):
        chunk = results[i * cfg.runs_per_n : (i + 1) * cfg.runs_per_n]
        acc = [c[0] for c in chunk]
        auc = [c[1] for c in chunk]
        kp = [c[2] for c in chunk]
        kn = [c[3] for c in chunk]
        points.append(
            NShotCurvePoint(
                n=n,
                mean_accuracy=float(np.mean(acc)),
                mean_auc=float(np.mean(auc)),
                mean_kept_positive=float(np.mean(kp)),
                mean_kept_negative=float(np.mean(kn)),
            )
        )
    return points


def run_variability(
    matrices: list[SimilarityMatrix],
    descriptor_sets: list[list[DescriptorSet]] | None = None,
    icc_variant: str = ICC_TWO_WAY_RANDOM,
) -> VariabilityReport:
    """Zero-shot performance variability across descriptor-set runs.

    All matrices must share image ids and labels. Produces per-set AUC,
    their mean/min/max, the AUC of the score ensemble (per-image mean),
    the ICC of the runs x images score table, and descriptor frequency
    counts per class (normalized text, counted once per run).
    """
    if not matrices:
        raise ValidationError("need at least one matrix")
    first = matrices[0]
    for i, m in enumerate(matrices[1:], start=2):
        if m.image_ids != first.image_ids:
            raise ValidationError(f"matrix {i} image ids differ from matrix 1")
        if not np.array_equal(m.labels, first.labels):
            raise ValidationError(f"matrix {i} labels differ from matrix 1")
    if descriptor_sets is not None and len(descriptor_sets) != len(matrices):
        raise ValidationError("one descriptor-set list per matrix is required")

    per_run = [labeled_scores(m, ZeroShot()) for m in matrices]
    per_set_auc = tuple(roc_auc(s).auc for s in per_run)
    ensemble_auc = roc_auc(ensemble_scores(per_run)).auc

    icc_value: float | None
    icc_undefined = False
    if len(matrices) >= 2 and len(first.image_ids) >= 2:
        try:
            icc_value = icc(np.stack([s.scores for s in per_run]), variant=icc_variant)
        except UndefinedStatisticError:
            icc_value = None
            icc_undefined = True
    else:
        icc_value = None
        icc_undefined = True

    frequencies: dict[int, tuple[tuple[str, int], ...]] = {POSITIVE: (), NEGATIVE: ()}
    if descriptor_sets is not None:
        frequencies = count_descriptor_frequencies(descriptor_sets)

    min_auc = float(np.min(per_set_auc))
    max_auc = float(np.max(per_set_auc))
    # summation rounding may push the float mean a ulp outside [min, max]
    mean_auc = min(max(float(np.mean(per_set_auc)), min_auc), max_auc)
    return VariabilityReport(
        per_set_auc=per_set_auc,
        mean_auc=mean_auc,
        min_auc=min_auc,
        max_auc=max_auc,
        ensemble_auc=ensemble_auc,
        icc=icc_value,
        icc_undefined=icc_undefined,
        descriptor_frequencies=frequencies,
    )


def count_descriptor_frequencies(
    runs: list[list[DescriptorSet]],
) -> dict[int, tuple[tuple[str, int], ...]]:
    """Count normalized descriptors per class across generation runs.

    A descriptor counts at most once per run (sets already enforce
    within-set uniqueness after normalization). Results are sorted by
    descending count, then text.
    """
    counts: dict[int, dict[str, int]] = {POSITIVE: {}, NEGATIVE: {}}
    for run_sets in runs:
        seen: dict[int, set[str]] = {POSITIVE: set(), NEGATIVE: set()}
        for s in run_sets:
            for d in s.descriptors:
                norm = normalize_descriptor(d)
                if norm not in seen[s.class_label]:
                    seen[s.class_label].add(norm)
                    counts[s.class_label][norm] = counts[s.class_label].get(norm, 0) + 1
    return {
        cls: tuple(sorted(items.items(), key=lambda kv: (-kv[1], kv[0])))
        for cls, items in counts.items()
    }


def export_feature_vectors(m: SimilarityMatrix) -> SimilarityMatrix:
    """Reorder columns so the positive-class block comes first.

    The result is a valid similarity matrix (one row per image, all
    similarity columns) ready for CSV export and 2D embedding downstream.
    """
    pos = m.columns_for_class(POSITIVE)
    neg = m.columns_for_class(NEGATIVE)
    order = np.concatenate((pos, neg)).astype(np.intp)
    return SimilarityMatrix(
        image_ids=m.image_ids,
        labels=m.labels,
        descriptor_keys=tuple(m.descriptor_keys[j] for j in order),
        values=m.values[:, order],
    )
