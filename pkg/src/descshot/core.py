"""Domain types and the on-disk formats shared by every module.

Similarity matrix CSV
    Header line ``image_id,label,<key1>,<key2>,...`` where each key is
    ``<class>:<index>:<base64url(text)>`` (base64url of the UTF-8
    descriptor text, no padding) and class is the literal token ``+1`` or
    ``-1``. One row per image: ``<image_id>,<label>,<v1>,...``. UTF-8, LF
    line endings, ``.`` decimal separator, values written with 17
    significant digits (lossless for doubles).

Descriptor set JSON
    Top-level array of objects ``{"set_id", "class_label", "class_name",
    "descriptors", "provenance"}``; ``class_label`` is the integer 1 or -1.

Scores CSV
    Header ``image_id,label,score``; same conventions as the matrix CSV.

All types are immutable after construction (arrays are marked read-only)
and safe to share across threads.
"""

from __future__ import annotations

import base64
import binascii
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError, ValidationError

POSITIVE = 1
NEGATIVE = -1

_LABEL_TOKENS = {"+1": POSITIVE, "-1": NEGATIVE}


def label_token(label: int) -> str:
    """File token for a class label (+1 -> "+1", -1 -> "-1")."""
    if label == POSITIVE:
        return "+1"
    if label == NEGATIVE:
        return "-1"
    raise ValidationError(f"class label must be +1 or -1, got {label!r}")


def normalize_descriptor(text: str) -> str:
    """Normalization used for uniqueness checks and frequency counting."""
    return text.strip().casefold()


def _check_image_id(image_id: str) -> str:
    if not image_id:
        raise ValidationError("image_id must be non-empty")
    if "," in image_id or "\n" in image_id or "\r" in image_id:
        raise ValidationError(f"image_id may not contain ',' or newlines: {image_id!r}")
    return image_id


@dataclass(frozen=True, order=True)
class DescriptorKey:
    """Identity of one similarity-matrix column."""

    class_label: int
    index: int
    text: str

    def __post_init__(self):
        label_token(self.class_label)
        if self.index < 0:
            raise ValidationError(f"descriptor index must be >= 0, got {self.index}")

    def encode(self) -> str:
        b64 = base64.urlsafe_b64encode(self.text.encode("utf-8")).decode("ascii")
        return f"{label_token(self.class_label)}:{self.index}:{b64.rstrip('=')}"

    @classmethod
    def decode(cls, token: str) -> "DescriptorKey":
        parts = token.split(":")
        if len(parts) != 3:
            raise ParseError(f"malformed descriptor key {token!r} (expected class:index:base64)")
        cls_tok, idx_tok, b64 = parts
        if cls_tok not in _LABEL_TOKENS:
            raise ParseError(f"unknown class token {cls_tok!r} in descriptor key {token!r}")
        try:
            index = int(idx_tok, 10)
        except ValueError:
            raise ParseError(f"non-integer index {idx_tok!r} in descriptor key {token!r}") from None
        if index < 0:
            raise ParseError(f"negative index in descriptor key {token!r}")
        pad = "=" * (-len(b64) % 4)
        try:
            text = base64.urlsafe_b64decode(b64 + pad).decode("utf-8")
        except (binascii.Error, UnicodeDecodeError) as exc:
            raise ParseError(f"undecodable descriptor text in key {token!r}: {exc}") from None
        return cls(_LABEL_TOKENS[cls_tok], index, text)


@dataclass(frozen=True)
class DescriptorSet:
    """Named, class-tagged list of text descriptors."""

    set_id: str
    class_label: int
    class_name: str
    descriptors: tuple[str, ...]
    provenance: str = ""

    def __post_init__(self):
        label_token(self.class_label)
        stripped = tuple(d.strip() for d in self.descriptors)
        if not stripped:
            raise ValidationError(f"descriptor set {self.set_id!r}: descriptor list is empty")
        seen: dict[str, str] = {}
        for d in stripped:
            if not d:
                raise ValidationError(f"descriptor set {self.set_id!r}: empty descriptor string")
            norm = normalize_descriptor(d)
            if norm in seen:
                raise ValidationError(
                    f"descriptor set {self.set_id!r}: duplicate descriptor "
                    f"{d!r} (collides with {seen[norm]!r} after case-folding)"
                )
            seen[norm] = d
        object.__setattr__(self, "descriptors", stripped)

    def keys(self) -> tuple[DescriptorKey, ...]:
        """Matrix column keys for this set, indexed in list order."""
        return tuple(
            DescriptorKey(self.class_label, i, d) for i, d in enumerate(self.descriptors)
        )


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Images x descriptors table of similarity values with binary labels."""

    image_ids: tuple[str, ...]
    labels: np.ndarray
    descriptor_keys: tuple[DescriptorKey, ...]
    values: np.ndarray

    def __post_init__(self):
        labels = _readonly(np.asarray(self.labels, dtype=np.int64))
        values = _readonly(np.asarray(self.values, dtype=np.float64))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)
        n, d = len(self.image_ids), len(self.descriptor_keys)
        if labels.shape != (n,):
            raise ValidationError(f"labels shape {labels.shape} != ({n},)")
        if values.shape != (n, d):
            raise ValidationError(f"values shape {values.shape} != ({n}, {d})")
        bad = (labels != POSITIVE) & (labels != NEGATIVE)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValidationError(f"label of image {self.image_ids[i]!r} must be +1 or -1")
        if not np.isfinite(values).all():
            i, j = np.argwhere(~np.isfinite(values))[0]
            raise ValidationError(
                f"non-finite value at image {self.image_ids[i]!r}, "
                f"column {self.descriptor_keys[j].encode()}"
            )
        seen_ids = set()
        for image_id in self.image_ids:
            _check_image_id(image_id)
            if image_id in seen_ids:
                raise ValidationError(f"duplicate image_id {image_id!r}")
            seen_ids.add(image_id)
        seen_keys = set()
        for key in self.descriptor_keys:
            if key in seen_keys:
                raise ValidationError(f"duplicate descriptor key {key.encode()}")
            seen_keys.add(key)

    @property
    def n_images(self) -> int:
        return len(self.image_ids)

    @property
    def n_descriptors(self) -> int:
        return len(self.descriptor_keys)

    def columns_for_class(self, class_label: int) -> np.ndarray:
        """Column indices whose key belongs to the given class, in order."""
        label_token(class_label)
        return np.array(
            [j for j, k in enumerate(self.descriptor_keys) if k.class_label == class_label],
            dtype=np.intp,
        )

    def column_index(self) -> dict[DescriptorKey, int]:
        return {k: j for j, k in enumerate(self.descriptor_keys)}

    def image_index(self) -> dict[str, int]:
        return {image_id: i for i, image_id in enumerate(self.image_ids)}


@dataclass(frozen=True, eq=False)
class LabeledScores:
    """Per-image classification scores paired with ground-truth labels."""

    image_ids: tuple[str, ...]
    labels: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        labels = _readonly(np.asarray(self.labels, dtype=np.int64))
        scores = _readonly(np.asarray(self.scores, dtype=np.float64))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "scores", scores)
        n = len(self.image_ids)
        if labels.shape != (n,) or scores.shape != (n,):
            raise ValidationError("image_ids, labels and scores must have equal length")
        bad = (labels != POSITIVE) & (labels != NEGATIVE)
        if bad.any():
            i = int(np.argmax(bad))
            raise ValidationError(f"label of {self.image_ids[i]!r} must be +1 or -1")
        if not np.isfinite(scores).all():
            i = int(np.argmax(~np.isfinite(scores)))
            raise ValidationError(f"non-finite score for {self.image_ids[i]!r}")

    def __len__(self) -> int:
        return len(self.image_ids)

    def subset(self, indices) -> "LabeledScores":
        idx = np.asarray(indices, dtype=np.intp)
        return LabeledScores(
            tuple(self.image_ids[i] for i in idx),
            self.labels[idx],
            self.scores[idx],
        )


def format_value(v: float) -> str:
    """Serialize a float with 17 significant digits (round-trip exact)."""
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# similarity matrix CSV


def write_similarity_matrix(m: SimilarityMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = ["image_id", "label"] + [k.encode() for k in m.descriptor_keys]
        fh.write(",".join(header) + "\n")
        for i, image_id in enumerate(m.image_ids):
            row = [image_id, label_token(int(m.labels[i]))]
            row.extend(format_value(v) for v in m.values[i])
            fh.write(",".join(row) + "\n")


def read_similarity_matrix(path) -> SimilarityMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError(f"{path}: empty file")
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != "image_id" or header[1] != "label":
        raise ParseError(f"{path}: line 1: header must start with 'image_id,label'")
    try:
        keys = tuple(DescriptorKey.decode(tok) for tok in header[2:])
    except ParseError as exc:
        raise ParseError(f"{path}: line 1: {exc}") from None

    image_ids: list[str] = []
    labels: list[int] = []
    values = np.empty((len(lines) - 1, len(keys)), dtype=np.float64)
    for r, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 2 + len(keys):
            raise ParseError(
                f"{path}: line {r}: expected {2 + len(keys)} fields, got {len(fields)}"
            )
        image_id, lab_tok = fields[0], fields[1]
        if lab_tok not in _LABEL_TOKENS:
            raise ParseError(f"{path}: line {r}: unknown label token {lab_tok!r}")
        for j, tok in enumerate(fields[2:]):
            try:
                v = float(tok)
            except ValueError:
                raise ParseError(
                    f"{path}: line {r}, column {keys[j].encode()}: "
                    f"unparseable value {tok!r}"
                ) from None
            if not math.isfinite(v):
                raise ParseError(
                    f"{path}: line {r}, column {keys[j].encode()}: non-finite value {tok!r}"
                )
            values[r - 2, j] = v
        image_ids.append(image_id)
        labels.append(_LABEL_TOKENS[lab_tok])

    try:
        return SimilarityMatrix(tuple(image_ids), np.array(labels), keys, values)
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# descriptor set JSON


def read_descriptor_sets(path) -> list[DescriptorSet]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(payload, list):
        raise ParseError(f"{path}: top level must be an array of descriptor sets")
    sets: list[DescriptorSet] = []
    for i, entry in enumerate(payload):
        if not isinstance(entry, dict):
            raise ParseError(f"{path}: entry {i}: expected an object")
        if "class_label" not in entry:
            raise ParseError(f"{path}: entry {i}: missing class_label")
        class_label = entry["class_label"]
        if class_label not in (POSITIVE, NEGATIVE):
            raise ParseError(f"{path}: entry {i}: class_label must be 1 or -1")
        descriptors = entry.get("descriptors")
        if not isinstance(descriptors, list) or not all(
            isinstance(d, str) for d in descriptors
        ):
            raise ParseError(f"{path}: entry {i}: descriptors must be a list of strings")
        try:
            sets.append(
                DescriptorSet(
                    set_id=str(entry.get("set_id", f"set-{i}")),
                    class_label=class_label,
                    class_name=str(entry.get("class_name", "")),
                    descriptors=tuple(descriptors),
                    provenance=str(entry.get("provenance", "")),
                )
            )
        except ValidationError as exc:
            raise ParseError(f"{path}: entry {i}: {exc}") from None
    return sets


def write_descriptor_sets(sets, path) -> None:
    payload = [
        {
            "set_id": s.set_id,
            "class_label": s.class_label,
            "class_name": s.class_name,
            "descriptors": list(s.descriptors),
            "provenance": s.provenance,
        }
        for s in sets
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# scores CSV


def write_scores(scores: LabeledScores, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("image_id,label,score\n")
        for i, image_id in enumerate(scores.image_ids):
            fh.write(
                f"{image_id},{label_token(int(scores.labels[i]))},"
                f"{format_value(scores.scores[i])}\n"
            )


def read_scores(path) -> LabeledScores:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].split(",") != ["image_id", "label", "score"]:
        raise ParseError(f"{path}: line 1: expected header 'image_id,label,score'")
    ids: list[str] = []
    labels: list[int] = []
    vals: list[float] = []
    for r, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 3:
            raise ParseError(f"{path}: line {r}: expected 3 fields, got {len(fields)}")
        if fields[1] not in _LABEL_TOKENS:
            raise ParseError(f"{path}: line {r}: unknown label token {fields[1]!r}")
        try:
            v = float(fields[2])
        except ValueError:
            raise ParseError(f"{path}: line {r}: unparseable score {fields[2]!r}") from None
        if not math.isfinite(v):
            raise ParseError(f"{path}: line {r}: non-finite score {fields[2]!r}")
        ids.append(fields[0])
        labels.append(_LABEL_TOKENS[fields[1]])
        vals.append(v)
    try:
        return LabeledScores(tuple(ids), np.array(labels), np.array(vals))
    except ValidationError as exc:
        raise ParseError(f"{path}: {exc}") from None


def read_id_list(path) -> list[str]:
    """Read an image-id list file: one id per line, blank lines ignored."""
    with open(path, "r", encoding="utf-8") as fh:
        ids = [line.strip() for line in fh]
    ids = [i for i in ids if i]
    seen = set()
    for image_id in ids:
        if image_id in seen:
            raise ParseError(f"{path}: duplicate id {image_id!r}")
        seen.add(image_id)
    return ids
