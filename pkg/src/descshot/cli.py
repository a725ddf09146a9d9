"""Command-line entry point.

Subcommands: score, select, evaluate, shape, nshot, variability,
export-features. Every subcommand is deterministic given its flags (all
randomness flows from an explicit --seed), never mutates its inputs, and
follows one exit-code policy: 0 success, 1 input/contract error, 2
internal invariant violation. Diagnostics go to stderr; data goes to the
requested output files or stdout.

An optional ``--config FILE`` supplies defaults as ``key = value`` lines
(keys are the long flag names without the leading dashes; lists are
comma-separated; booleans are true/false). Explicit flags override the
file.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import (
    NEGATIVE,
    POSITIVE,
    LabeledScores,
    read_descriptor_sets,
    read_id_list,
    read_scores,
    read_similarity_matrix,
    write_scores,
    write_similarity_matrix,
)
from .errors import DescshotError, ParseError, ValidationError
from .experiments import (
    NShotConfig,
    run_nshot,
    run_variability,
    export_feature_vectors,
)
from .metrics import (
    ICC_TWO_WAY_MIXED,
    ICC_TWO_WAY_RANDOM,
    calibrate_cutoff,
    evaluation_report,
    roc_auc,
    write_roc_csv,
)
from .scoring import (
    SIGN_AS_PRINTED,
    SIGN_PER_CLASS,
    SelectionResult,
    WeightedSelected,
    ZeroShot,
    descriptor_scores,
    labeled_scores,
)
from .shape import crop_bbox_with_margin, read_mask_pgm, shape_features


def _fail(message: str):
    raise ValidationError(message)


def _load_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    config: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config


def _merge_config(args: argparse.Namespace, spec: dict[str, type]) -> None:
    """Fill argparse fields still at None from the config file."""
    config = _load_config(getattr(args, "config", None))
    unknown = set(config) - set(spec)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is not None:
            continue  # flag wins
        typ = spec[key]
        if typ is bool:
            if value.lower() not in ("true", "false"):
                raise ValidationError(f"config key {key}: expected true/false")
            setattr(args, attr, value.lower() == "true")
        elif typ is int:
            setattr(args, attr, int(value))
        elif typ is float:
            setattr(args, attr, float(value))
        elif typ is list:
            setattr(args, attr, [v.strip() for v in value.split(",") if v.strip()])
        else:
            setattr(args, attr, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_"), None) is None:
            _fail(f"missing required option --{name} (flag or config file)")


def _read_matrix(path: str):
    if not Path(path).exists():
        _fail(f"matrix file does not exist: {path}")
    return read_similarity_matrix(path)


def _load_selection(path: str) -> SelectionResult:
    if not Path(path).exists():
        _fail(f"selection file does not exist: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
    return SelectionResult.from_json_dict(payload)


def _indices_for_ids(m, ids: list[str], what: str) -> np.ndarray:
    index = m.image_index()
    missing = [i for i in ids if i not in index]
    if missing:
        _fail(f"{what} ids not present in the matrix: {', '.join(missing[:5])}")
    return np.array([index[i] for i in ids], dtype=np.intp)


def _write_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# subcommands


def _cmd_score(args) -> int:
    _merge_config(args, {"matrix": str, "output": str, "selection": str})
    _require(args, "matrix", "output")
    m = _read_matrix(args.matrix)
    mode = ZeroShot() if args.selection is None else WeightedSelected(
        _load_selection(args.selection)
    )
    write_scores(labeled_scores(m, mode), args.output)
    return 0


def _cmd_select(args) -> int:
    _merge_config(
        args,
        {"matrix": str, "train-ids": str, "output": str, "sign-convention": str},
    )
    _require(args, "matrix", "train-ids", "output")
    m = _read_matrix(args.matrix)
    if not Path(args.train_ids).exists():
        _fail(f"train-ids file does not exist: {args.train_ids}")
    train = _indices_for_ids(m, read_id_list(args.train_ids), "train")
    convention = args.sign_convention or SIGN_PER_CLASS
    selection = descriptor_scores(m, train, sign_convention=convention)
    _write_json(selection.to_json_dict(), args.output)
    return 0


def _cmd_evaluate(args) -> int:
    _merge_config(
        args,
        {
            "matrix": str,
            "scores": str,
            "selection": str,
            "test-ids": str,
            "cutoff": float,
            "calibrate-ids": str,
            "output": str,
            "roc-csv": str,
        },
    )
    if (args.matrix is None) == (args.scores is None):
        _fail("exactly one of --matrix and --scores is required")
    if (args.cutoff is None) == (args.calibrate_ids is None):
        _fail("exactly one of --cutoff and --calibrate-ids is required")

    n_kept_pos: int | None = None
    n_kept_neg: int | None = None
    if args.matrix is not None:
        m = _read_matrix(args.matrix)
        if args.selection is not None:
            selection = _load_selection(args.selection)
            mode = WeightedSelected(selection)
            n_kept_pos = len(selection.kept_positive)
            n_kept_neg = len(selection.kept_negative)
        else:
            mode = ZeroShot()
            n_kept_pos = int(m.columns_for_class(POSITIVE).size)
            n_kept_neg = int(m.columns_for_class(NEGATIVE).size)
        all_scores = labeled_scores(m, mode)
    else:
        if args.selection is not None:
            _fail("--selection requires --matrix")
        if not Path(args.scores).exists():
            _fail(f"scores file does not exist: {args.scores}")
        all_scores = read_scores(args.scores)

    by_id = {i: k for k, i in enumerate(all_scores.image_ids)}

    def subset(ids: list[str], what: str) -> LabeledScores:
        missing = [i for i in ids if i not in by_id]
        if missing:
            _fail(f"{what} ids not present: {', '.join(missing[:5])}")
        return all_scores.subset([by_id[i] for i in ids])

    test_scores = (
        subset(read_id_list(args.test_ids), "test")
        if args.test_ids is not None
        else all_scores
    )
    if args.cutoff is not None:
        cutoff = args.cutoff
    else:
        cutoff = calibrate_cutoff(subset(read_id_list(args.calibrate_ids), "calibration"))

    report = evaluation_report(test_scores, cutoff, n_kept_pos, n_kept_neg)
    _write_json(report.to_json_dict(), args.output)
    if args.roc_csv is not None:
        write_roc_csv(roc_auc(test_scores), args.roc_csv)
    return 0


def _cmd_shape(args) -> int:
    _merge_config(
        args, {"masks": str, "output": str, "largest-component": bool, "margin": int}
    )
    _require(args, "masks", "output")
    mask_dir = Path(args.masks)
    if not mask_dir.is_dir():
        _fail(f"mask directory does not exist: {args.masks}")
    paths = sorted(p for p in mask_dir.iterdir() if p.suffix.lower() == ".pgm")
    if not paths:
        _fail(f"no .pgm masks found in {args.masks}")
    margin = args.margin if args.margin is not None else 0
    largest = bool(args.largest_component)
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "image_id,area,perimeter,roundness,rectangularity,"
            "bbox_x0,bbox_y0,bbox_x1,bbox_y1\n"
        )
        for path in paths:
            mask = read_mask_pgm(path)
            feats = shape_features(mask, largest_component=largest)
            bbox = (
                crop_bbox_with_margin(mask, margin) if margin > 0 else feats.bbox
            )
            fh.write(
                f"{path.stem},{feats.area},{feats.perimeter!r},"
                f"{feats.roundness!r},{feats.rectangularity!r},"
                f"{bbox[0]},{bbox[1]},{bbox[2]},{bbox[3]}\n"
            )
    return 0


def _cmd_nshot(args) -> int:
    _merge_config(
        args,
        {
            "matrix": str,
            "train-ids": str,
            "test-ids": str,
            "n": list,
            "runs": int,
            "sampling": str,
            "seed": int,
            "sign-convention": str,
            "threads": int,
            "output": str,
            "curve-csv": str,
        },
    )
    _require(args, "matrix", "train-ids", "test-ids", "n", "output")
    if args.seed is None:
        _fail("--seed is required: sampling subcommands have no hidden entropy")
    m = _read_matrix(args.matrix)
    train = _indices_for_ids(m, read_id_list(args.train_ids), "train")
    test = _indices_for_ids(m, read_id_list(args.test_ids), "test")
    try:
        n_values = tuple(int(v) for v in args.n)
    except ValueError:
        _fail(f"--n must be a comma-separated list of integers, got {args.n!r}")
    cfg = NShotConfig(
        n_values=n_values,
        runs_per_n=args.runs if args.runs is not None else 100,
        sampling=args.sampling or "without_replacement",
        base_seed=args.seed,
    )
    convention = args.sign_convention or SIGN_PER_CLASS
    points = run_nshot(
        m,
        train,
        test,
        cfg,
        sign_convention=convention,
        threads=args.threads if args.threads is not None else 1,
    )
    payload = {
        "config": {
            "n_values": list(cfg.n_values),
            "runs_per_n": cfg.runs_per_n,
            "sampling": cfg.sampling,
            "base_seed": cfg.base_seed,
            "sign_convention": convention,
        },
        "points": [
            {
                "n": p.n,
                "mean_accuracy": p.mean_accuracy,
                "mean_auc": p.mean_auc,
                "mean_kept_positive": p.mean_kept_positive,
                "mean_kept_negative": p.mean_kept_negative,
            }
            for p in points
        ],
    }
    _write_json(payload, args.output)
    if args.curve_csv is not None:
        with open(args.curve_csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("n,mean_accuracy,mean_auc,mean_kept_positive,mean_kept_negative\n")
            for p in points:
                fh.write(
                    f"{p.n},{p.mean_accuracy!r},{p.mean_auc!r},"
                    f"{p.mean_kept_positive!r},{p.mean_kept_negative!r}\n"
                )
    return 0


def _cmd_variability(args) -> int:
    _merge_config(
        args,
        {"matrices": list, "descriptors": list, "output": str, "icc-variant": str},
    )
    if not args.matrices:
        _fail("at least one matrix file is required")
    if args.descriptors and len(args.descriptors) != len(args.matrices):
        _fail("--descriptors needs one JSON file per matrix")
    matrices = [_read_matrix(p) for p in args.matrices]
    descriptor_sets = (
        [read_descriptor_sets(p) for p in args.descriptors] if args.descriptors else None
    )
    variant = {
        None: ICC_TWO_WAY_RANDOM,
        "icc2": ICC_TWO_WAY_RANDOM,
        "icc3": ICC_TWO_WAY_MIXED,
    }.get(args.icc_variant)
    if variant is None:
        _fail(f"unknown ICC variant {args.icc_variant!r} (use icc2 or icc3)")
    report = run_variability(matrices, descriptor_sets, icc_variant=variant)
    _write_json(report.to_json_dict(), args.output)
    return 0


def _cmd_export_features(args) -> int:
    _merge_config(args, {"matrix": str, "output": str})
    _require(args, "matrix", "output")
    m = _read_matrix(args.matrix)
    write_similarity_matrix(export_feature_vectors(m), args.output)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="descshot",
        description=(
            "Descriptor-based binary few-shot classification from "
            "precomputed image-descriptor similarity matrices"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="key = value file supplying flag defaults")
        p.set_defaults(func=func)
        return p

    p = add("score", _cmd_score, "write per-image classification scores")
    p.add_argument("--matrix", help="similarity matrix CSV")
    p.add_argument("--output", help="scores CSV to write")
    p.add_argument("--selection", help="selection JSON (weighted mode); default zero-shot")

    p = add("select", _cmd_select, "score and prune descriptors on a training sample")
    p.add_argument("--matrix", help="similarity matrix CSV")
    p.add_argument("--train-ids", help="file with one training image id per line")
    p.add_argument("--output", help="selection JSON to write")
    p.add_argument(
        "--sign-convention",
        choices=[SIGN_PER_CLASS, SIGN_AS_PRINTED],
        help=f"descriptor score sign rule (default {SIGN_PER_CLASS})",
    )

    p = add("evaluate", _cmd_evaluate, "accuracy/AUC report at a cutoff")
    p.add_argument("--matrix", help="similarity matrix CSV")
    p.add_argument("--scores", help="scores CSV (alternative to --matrix)")
    p.add_argument("--selection", help="selection JSON (with --matrix)")
    p.add_argument("--test-ids", help="restrict evaluation to these image ids")
    p.add_argument("--cutoff", type=float, help="explicit classification cutoff")
    p.add_argument(
        "--calibrate-ids",
        help="calibrate the cutoff (max Youden J) on these image ids",
    )
    p.add_argument("--output", help="report JSON (default stdout)")
    p.add_argument("--roc-csv", help="also export the ROC curve as CSV")

    p = add("shape", _cmd_shape, "mask features CSV for a directory of PGM masks")
    p.add_argument("--masks", help="directory of .pgm mask files")
    p.add_argument("--output", help="features CSV to write")
    p.add_argument(
        "--largest-component",
        action="store_true",
        default=None,
        help="keep the largest component instead of rejecting multi-component masks",
    )
    p.add_argument(
        "--margin", type=int, help="report bbox expanded by this margin (default 0)"
    )

    p = add("nshot", _cmd_nshot, "n-shot selection curves over sampled runs")
    p.add_argument("--matrix", help="similarity matrix CSV")
    p.add_argument("--train-ids", help="training image ids (sampled)")
    p.add_argument("--test-ids", help="evaluation image ids")
    p.add_argument("--n", type=lambda s: s.split(","), help="comma-separated n values")
    p.add_argument("--runs", type=int, help="runs per n (default 100)")
    p.add_argument(
        "--sampling",
        choices=["with_replacement", "without_replacement"],
        help="pair sampling mode (default without_replacement)",
    )
    p.add_argument("--seed", type=int, help="base RNG seed (required)")
    p.add_argument(
        "--sign-convention", choices=[SIGN_PER_CLASS, SIGN_AS_PRINTED], help=argparse.SUPPRESS
    )
    p.add_argument("--threads", type=int, help="worker threads (default 1)")
    p.add_argument("--output", help="report JSON to write")
    p.add_argument("--curve-csv", help="also export per-n means as CSV")

    p = add("variability", _cmd_variability, "multi-set zero-shot variability report")
    p.add_argument(
        "--matrices", nargs="+", help="similarity matrix CSVs, one per descriptor-set run"
    )
    p.add_argument(
        "--descriptors", nargs="*", help="descriptor-set JSONs aligned with --matrices"
    )
    p.add_argument("--icc-variant", help="icc2 (default) or icc3")
    p.add_argument("--output", help="report JSON (default stdout)")

    p = add("export-features", _cmd_export_features, "feature-vector CSV for embedding")
    p.add_argument("--matrix", help="similarity matrix CSV")
    p.add_argument("--output", help="feature CSV to write (positive block first)")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DescshotError, OSError) as exc:
        print(f"descshot {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal invariant violation
        print(f"descshot {args.command}: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
