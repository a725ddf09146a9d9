"""Class scores, binary classification scores and descriptor selection.

The class score of an image is the arithmetic mean of its similarity
values over the class's descriptor columns; the classification score is
the positive-class score minus the negative-class score. Selection
assigns each descriptor a score r equal to the label-weighted mean of its
column over a small training sample, prunes strictly negative r, and
replaces the plain mean with an r-weighted mean.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    NEGATIVE,
    POSITIVE,
    DescriptorKey,
    LabeledScores,
    SimilarityMatrix,
)
from .errors import ValidationError

SIGN_PER_CLASS = "per_class"
SIGN_AS_PRINTED = "as_printed"
SIGN_CONVENTIONS = (SIGN_PER_CLASS, SIGN_AS_PRINTED)


@dataclass(frozen=True)
class DescriptorScore:
    key: DescriptorKey
    r: float
    kept: bool


@dataclass(frozen=True)
class SelectionResult:
    """Per-descriptor scores with kept/pruned flags.

    ``kept`` is r >= 0 (strictly negative scores are pruned). If every
    descriptor of a class scores negative, the single highest-r descriptor
    of that class is kept instead and the corresponding fallback flag is
    set, so both kept lists are always non-empty.
    """

    per_descriptor: tuple[DescriptorScore, ...]
    kept_positive: tuple[DescriptorKey, ...]
    kept_negative: tuple[DescriptorKey, ...]
    sign_convention: str = SIGN_PER_CLASS
    fallback_positive: bool = False
    fallback_negative: bool = False

    def __post_init__(self):
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise ValidationError(f"unknown sign convention {self.sign_convention!r}")
        if not self.kept_positive or not self.kept_negative:
            raise ValidationError("each class must keep at least one descriptor")
        kept_flags = {d.key for d in self.per_descriptor if d.kept}
        if set(self.kept_positive) | set(self.kept_negative) != kept_flags:
            raise ValidationError("kept lists do not match per-descriptor kept flags")

    def r_by_key(self) -> dict[DescriptorKey, float]:
        return {d.key: d.r for d in self.per_descriptor}

    def kept_for_class(self, class_label: int) -> tuple[DescriptorKey, ...]:
        return self.kept_positive if class_label == POSITIVE else self.kept_negative

    def to_json_dict(self) -> dict:
        return {
            "sign_convention": self.sign_convention,
            "per_descriptor": [
                {"key": d.key.encode(), "r": d.r, "kept": d.kept}
                for d in self.per_descriptor
            ],
            "kept_positive": [k.encode() for k in self.kept_positive],
            "kept_negative": [k.encode() for k in self.kept_negative],
            "fallback_positive": self.fallback_positive,
            "fallback_negative": self.fallback_negative,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "SelectionResult":
        try:
            per = tuple(
                DescriptorScore(
                    DescriptorKey.decode(e["key"]), float(e["r"]), bool(e["kept"])
                )
                for e in payload["per_descriptor"]
            )
            return cls(
                per_descriptor=per,
                kept_positive=tuple(
                    DescriptorKey.decode(k) for k in payload["kept_positive"]
                ),
                kept_negative=tuple(
                    DescriptorKey.decode(k) for k in payload["kept_negative"]
                ),
                sign_convention=payload.get("sign_convention", SIGN_PER_CLASS),
                fallback_positive=bool(payload.get("fallback_positive", False)),
                fallback_negative=bool(payload.get("fallback_negative", False)),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed selection JSON: {exc}") from None


@dataclass(frozen=True)
class ZeroShot:
    """Unweighted class means over the full descriptor set."""


@dataclass(frozen=True)
class WeightedSelected:
    """r-weighted class means over the kept descriptors of a selection."""

    selection: SelectionResult


ScoringMode = ZeroShot | WeightedSelected


def class_score(m: SimilarityMatrix, image_index: int, class_label: int) -> float:
    """Mean similarity of one image over all descriptors of a class."""
    _check_image_index(m, image_index)
    cols = m.columns_for_class(class_label)
    if cols.size == 0:
        raise ValidationError(f"matrix has no descriptors for class {class_label:+d}")
    return float(m.values[image_index, cols].mean())


def weighted_class_score(
    m: SimilarityMatrix,
    image_index: int,
    class_label: int,
    selection: SelectionResult,
) -> float:
    """r-weighted mean over the kept descriptors of a class.

    Falls back to the unweighted mean over the kept set when the weights
    sum to exactly zero.
    """
    _check_image_index(m, image_index)
    cols, weights = _kept_columns(m, class_label, selection)
    row = m.values[image_index, cols]
    wsum = weights.sum()
    if wsum == 0.0:
        return float(row.mean())
    return float((row * weights).sum() / wsum)


def classification_score(
    m: SimilarityMatrix, image_index: int, mode: ScoringMode
) -> float:
    """Positive-class score minus negative-class score for one image."""
    if isinstance(mode, ZeroShot):
        return class_score(m, image_index, POSITIVE) - class_score(
            m, image_index, NEGATIVE
        )
    return weighted_class_score(
        m, image_index, POSITIVE, mode.selection
    ) - weighted_class_score(m, image_index, NEGATIVE, mode.selection)


def classification_scores(m: SimilarityMatrix, mode: ScoringMode) -> np.ndarray:
    """Classification scores for every image (vectorized)."""
    if isinstance(mode, ZeroShot):
        pos = m.columns_for_class(POSITIVE)
        neg = m.columns_for_class(NEGATIVE)
        if pos.size == 0 or neg.size == 0:
            raise ValidationError("matrix must have descriptors for both classes")
        return m.values[:, pos].mean(axis=1) - m.values[:, neg].mean(axis=1)
    pos_cols, pos_w = _kept_columns(m, POSITIVE, mode.selection)
    neg_cols, neg_w = _kept_columns(m, NEGATIVE, mode.selection)
    return _weighted_means(m.values, pos_cols, pos_w) - _weighted_means(
        m.values, neg_cols, neg_w
    )


def labeled_scores(m: SimilarityMatrix, mode: ScoringMode, indices=None) -> LabeledScores:
    """Classification scores of the selected images as a LabeledScores table."""
    scores = classification_scores(m, mode)
    if indices is None:
        return LabeledScores(m.image_ids, m.labels, scores)
    idx = np.asarray(indices, dtype=np.intp)
    return LabeledScores(
        tuple(m.image_ids[i] for i in idx), m.labels[idx], scores[idx]
    )


def descriptor_scores(
    m: SimilarityMatrix,
    training_indices,
    sign_convention: str = SIGN_PER_CLASS,
) -> SelectionResult:
    """Score every descriptor over a training sample and prune.

    For each descriptor column, r is the mean over the training images of
    the image label times the similarity value; under the default
    ``per_class`` convention the product is additionally multiplied by the
    descriptor's own class label, so descriptors of either class score
    high exactly when they fire on their own class. ``as_printed`` uses
    the image label alone. Duplicate indices are counted per occurrence.
    """
    if sign_convention not in SIGN_CONVENTIONS:
        raise ValidationError(f"unknown sign convention {sign_convention!r}")
    idx = np.asarray(training_indices, dtype=np.intp)
    if idx.size == 0:
        raise ValidationError("training set is empty")
    if idx.min() < 0 or idx.max() >= m.n_images:
        raise ValidationError("training index out of range")
    labels = m.labels[idx].astype(np.float64)
    n_pos = int((labels > 0).sum())
    n_neg = idx.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("training set must contain at least one image per class")
    if n_pos != n_neg:
        warnings.warn(
            f"training sample is imbalanced ({n_pos} positive, {n_neg} negative); "
            "descriptor scores are label-weighted means and shift with imbalance",
            stacklevel=2,
        )

    base = (m.values[idx] * labels[:, None]).mean(axis=0)
    col_classes = np.array([k.class_label for k in m.descriptor_keys], dtype=np.float64)
    if sign_convention == SIGN_PER_CLASS:
        r = base * col_classes  # exact sign flips only
    else:
        r = base.copy()

    kept = r >= 0.0
    fallback = {POSITIVE: False, NEGATIVE: False}
    for cls in (POSITIVE, NEGATIVE):
        cols = m.columns_for_class(cls)
        if cols.size == 0:
            raise ValidationError(f"matrix has no descriptors for class {cls:+d}")
        if not kept[cols].any():
            kept[cols[int(np.argmax(r[cols]))]] = True
            fallback[cls] = True

    per = tuple(
        DescriptorScore(k, float(r[j]), bool(kept[j]))
        for j, k in enumerate(m.descriptor_keys)
    )
    return SelectionResult(
        per_descriptor=per,
        kept_positive=tuple(
            k for j, k in enumerate(m.descriptor_keys)
            if kept[j] and k.class_label == POSITIVE
        ),
        kept_negative=tuple(
            k for j, k in enumerate(m.descriptor_keys)
            if kept[j] and k.class_label == NEGATIVE
        ),
        sign_convention=sign_convention,
        fallback_positive=fallback[POSITIVE],
        fallback_negative=fallback[NEGATIVE],
    )


def classify(score: float, cutoff: float) -> int:
    """+1 iff score strictly exceeds the cutoff, else -1."""
    if not (np.isfinite(score) and np.isfinite(cutoff)):
        raise ValidationError("score and cutoff must be finite")
    return POSITIVE if score > cutoff else NEGATIVE


def _check_image_index(m: SimilarityMatrix, image_index: int) -> None:
    if not 0 <= image_index < m.n_images:
        raise ValidationError(
            f"image index {image_index} out of range for {m.n_images} images"
        )


def _kept_columns(
    m: SimilarityMatrix, class_label: int, selection: SelectionResult
) -> tuple[np.ndarray, np.ndarray]:
    """Map a selection's kept descriptors for one class onto matrix columns."""
    kept = selection.kept_for_class(class_label)
    if not kept:
        raise ValidationError(f"selection keeps no descriptors for class {class_label:+d}")
    col_of = m.column_index()
    r_of = selection.r_by_key()
    try:
        cols = np.array([col_of[k] for k in kept], dtype=np.intp)
    except KeyError as exc:
        raise ValidationError(
            f"selection refers to descriptor {exc.args[0].encode()} absent from the matrix"
        ) from None
    weights = np.array([r_of[k] for k in kept], dtype=np.float64)
    return cols, weights


def _weighted_means(values: np.ndarray, cols: np.ndarray, weights: np.ndarray) -> np.ndarray:
    block = values[:, cols]
    wsum = weights.sum()
    if wsum == 0.0:
        return block.mean(axis=1)
    return (block * weights).sum(axis=1) / wsum
