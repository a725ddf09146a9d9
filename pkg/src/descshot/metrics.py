"""Classification metrics: ROC/AUC, cut-off calibration, rank and
agreement statistics, score ensembling.

Tie handling is explicit everywhere: AUC credits tied positive-negative
pairs 0.5, Spearman uses mid-ranks, and classification is strict
(score > cutoff predicts positive, ties predict negative).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import NEGATIVE, POSITIVE, LabeledScores, format_value
from .errors import UndefinedStatisticError, ValidationError

ICC_TWO_WAY_RANDOM = "icc2"   # two-way random effects, absolute agreement, single
ICC_TWO_WAY_MIXED = "icc3"    # two-way mixed effects, consistency, single


@dataclass(frozen=True)
class RocCurve:
    """ROC points sorted by descending cutoff, (0,0) first, (1,1) last.

    ``auc`` is the Mann-Whitney statistic: the fraction of
    positive-negative pairs won by the positive score, ties counting 0.5.
    """

    points: tuple[tuple[float, float, float], ...]
    auc: float


@dataclass(frozen=True)
class ConfusionReport:
    """Confusion counts and accuracy at one cutoff (strict score > cutoff)."""

    accuracy: float
    cutoff: float
    tp: int
    fp: int
    tn: int
    fn: int


@dataclass(frozen=True)
class EvaluationReport:
    accuracy: float
    auc: float
    cutoff: float
    tp: int
    fp: int
    tn: int
    fn: int
    n_kept_positive: int | None = None
    n_kept_negative: int | None = None

    def to_json_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "auc": self.auc,
            "cutoff": self.cutoff,
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "n_kept_positive": self.n_kept_positive,
            "n_kept_negative": self.n_kept_negative,
        }


def _split_scores(scores: LabeledScores) -> tuple[np.ndarray, np.ndarray]:
    pos = scores.scores[scores.labels == POSITIVE]
    neg = scores.scores[scores.labels == NEGATIVE]
    if pos.size == 0 or neg.size == 0:
        raise ValidationError("both classes must be present")
    return pos, neg


def roc_auc(scores: LabeledScores) -> RocCurve:
    """ROC curve and AUC of labeled scores.

    The curve enumerates the confusion state at every distinct score used
    as a cutoff (strict >), descending, plus the all-positive state one
    unit below the minimum. AUC is computed from integer win/tie pair
    counts, so it matches a brute-force pair count bit for bit.
    """
    pos, neg = _split_scores(scores)
    n_pos, n_neg = pos.size, neg.size

    values = scores.scores
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    sorted_pos = (scores.labels[order] == POSITIVE).astype(np.int64)

    # group by distinct value, ascending
    boundaries = np.flatnonzero(np.diff(sorted_vals)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [sorted_vals.size]))
    group_vals = sorted_vals[starts]
    group_pos = np.add.reduceat(sorted_pos, starts)
    group_neg = (ends - starts) - group_pos

    neg_below = np.concatenate(([0], np.cumsum(group_neg)[:-1]))
    wins = int((group_pos * neg_below).sum())
    ties = int((group_pos * group_neg).sum())
    auc = (wins + 0.5 * ties) / (n_pos * n_neg)

    # descending cutoffs: point at cutoff t counts scores strictly above t
    pos_desc = group_pos[::-1]
    neg_desc = group_neg[::-1]
    vals_desc = group_vals[::-1]
    tp = np.concatenate(([0], np.cumsum(pos_desc)))
    fp = np.concatenate(([0], np.cumsum(neg_desc)))
    cutoffs = np.concatenate((vals_desc, [vals_desc[-1] - 1.0]))
    points = tuple(
        (fp[i] / n_neg, tp[i] / n_pos, float(cutoffs[i])) for i in range(len(cutoffs))
    )
    return RocCurve(points=points, auc=auc)


def calibrate_cutoff(scores: LabeledScores) -> float:
    """Cut-off maximizing Youden's J = TPR - FPR.

    Candidates are the midpoints between consecutive distinct sorted
    scores plus one candidate below the minimum and one above the maximum.
    Ties on J prefer higher TPR, then the smaller cutoff. Comparison is
    done on integer numerators (TP * N - FP * P), so tie handling is not
    subject to float rounding.
    """
    pos, neg = _split_scores(scores)
    n_pos, n_neg = pos.size, neg.size
    distinct = np.unique(scores.scores)
    candidates = np.concatenate(
        (
            [distinct[0] - 1.0],
            (distinct[:-1] + distinct[1:]) / 2.0,
            [distinct[-1] + 1.0],
        )
    )
    pos_sorted = np.sort(pos)
    neg_sorted = np.sort(neg)
    # strict >: count of scores > c is n - searchsorted(c, side="right")
    tp = n_pos - np.searchsorted(pos_sorted, candidates, side="right")
    fp = n_neg - np.searchsorted(neg_sorted, candidates, side="right")
    j_num = tp * n_neg - fp * n_pos  # J * (P*N), exact integers

    best = 0
    for i in range(1, len(candidates)):
        if j_num[i] > j_num[best] or (j_num[i] == j_num[best] and tp[i] > tp[best]):
            best = i
    return float(candidates[best])


def accuracy_at(scores: LabeledScores, cutoff: float) -> ConfusionReport:
    """Confusion counts and accuracy under strict score > cutoff."""
    if not np.isfinite(cutoff):
        raise ValidationError("cutoff must be finite")
    predicted_pos = scores.scores > cutoff
    actual_pos = scores.labels == POSITIVE
    tp = int((predicted_pos & actual_pos).sum())
    fp = int((predicted_pos & ~actual_pos).sum())
    fn = int((~predicted_pos & actual_pos).sum())
    tn = int((~predicted_pos & ~actual_pos).sum())
    total = len(scores)
    if total == 0:
        raise ValidationError("score list is empty")
    return ConfusionReport(
        accuracy=(tp + tn) / total, cutoff=float(cutoff), tp=tp, fp=fp, tn=tn, fn=fn
    )


def evaluation_report(
    scores: LabeledScores,
    cutoff: float,
    n_kept_positive: int | None = None,
    n_kept_negative: int | None = None,
) -> EvaluationReport:
    """Full report: confusion at the cutoff plus AUC over the same scores."""
    conf = accuracy_at(scores, cutoff)
    curve = roc_auc(scores)
    return EvaluationReport(
        accuracy=conf.accuracy,
        auc=curve.auc,
        cutoff=conf.cutoff,
        tp=conf.tp,
        fp=conf.fp,
        tn=conf.tn,
        fn=conf.fn,
        n_kept_positive=n_kept_positive,
        n_kept_negative=n_kept_negative,
    )


def midranks(xs) -> np.ndarray:
    """1-based ranks with ties replaced by their average rank."""
    a = np.asarray(xs, dtype=np.float64)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(a.size, dtype=np.float64)
    i = 0
    while i < a.size:
        j = i
        while j + 1 < a.size and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Spearman rank correlation: Pearson correlation of mid-ranks."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("inputs must be 1-D and of equal length")
    if x.size < 3:
        raise ValidationError("need at least 3 pairs")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValidationError("inputs must be finite")
    rx = midranks(x)
    ry = midranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = np.sqrt((rx * rx).sum() * (ry * ry).sum())
    if denom == 0.0:
        raise UndefinedStatisticError(
            "rank correlation undefined: an input has zero rank variance"
        )
    return float((rx * ry).sum() / denom)


def icc(scores_by_run, variant: str = ICC_TWO_WAY_RANDOM) -> float:
    """Intraclass correlation of a runs x images score matrix.

    Default is the two-way random-effects, absolute-agreement,
    single-measurement coefficient computed from the mean squares of the
    subject (image), rater (run) and residual effects:

        (MSR - MSE) / (MSR + (k-1) MSE + k (MSC - MSE) / n)

    with k runs and n images. ``variant="icc3"`` drops the rater-variance
    term (two-way mixed, consistency).
    """
    data = np.asarray(scores_by_run, dtype=np.float64)
    if data.ndim != 2:
        raise ValidationError("scores_by_run must be 2-D (runs x images)")
    k, n = data.shape
    if k < 2 or n < 2:
        raise ValidationError("need at least 2 runs and 2 images")
    if not np.isfinite(data).all():
        raise ValidationError("entries must be finite")
    if variant not in (ICC_TWO_WAY_RANDOM, ICC_TWO_WAY_MIXED):
        raise ValidationError(f"unknown ICC variant {variant!r}")

    m = data.T  # subjects (images) x raters (runs)
    grand = m.mean()
    sst = float(((m - grand) ** 2).sum())
    if sst == 0.0:
        raise UndefinedStatisticError("ICC undefined: zero total variance")
    row_means = m.mean(axis=1, keepdims=True)
    col_means = m.mean(axis=0, keepdims=True)
    ssr = float(k * ((row_means - grand) ** 2).sum())
    ssc = float(n * ((col_means - grand) ** 2).sum())
    # residual SS computed directly (not SST - SSR - SSC): the subtraction
    # form cancels catastrophically when runs agree almost exactly
    sse = float(((m - row_means - col_means + grand) ** 2).sum())
    msr = ssr / (n - 1)
    msc = ssc / (k - 1)
    mse = sse / ((n - 1) * (k - 1))
    if variant == ICC_TWO_WAY_MIXED:
        denom = msr + (k - 1) * mse
    else:
        denom = msr + (k - 1) * mse + k * (msc - mse) / n
    if denom == 0.0:
        raise UndefinedStatisticError("ICC undefined: zero denominator")
    return float((msr - mse) / denom)


def ensemble_scores(per_run: list[LabeledScores]) -> LabeledScores:
    """Per-image mean of classification scores across runs."""
    if not per_run:
        raise ValidationError("need at least one run")
    first = per_run[0]
    for i, run in enumerate(per_run[1:], start=2):
        if run.image_ids != first.image_ids:
            raise ValidationError(f"run {i} image ids differ from run 1")
        if not np.array_equal(run.labels, first.labels):
            raise ValidationError(f"run {i} labels differ from run 1")
    stacked = np.stack([run.scores for run in per_run])
    return LabeledScores(first.image_ids, first.labels, stacked.mean(axis=0))


def write_roc_csv(curve: RocCurve, path) -> None:
    """Export curve points as ``fpr,tpr,cutoff`` CSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("fpr,tpr,cutoff\n")
        for fpr, tpr, cutoff in curve.points:
            fh.write(f"{format_value(fpr)},{format_value(tpr)},{format_value(cutoff)}\n")
