"""Labeled dataset ingestion: vocabularies, clip manifests, stratified splits.

A manifest is a UTF-8 CSV with header ``clip_id,file_path,dataset_id,label``.
Splits are 60/20/20 per class, shuffled with the documented LCG so the same
seed reproduces the same assignment everywhere.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ClassTooSmall, MalformedRow, MissingFile, UnknownLabel
from .rng import Lcg64

MANIFEST_HEADER = ["clip_id", "file_path", "dataset_id", "label"]

TRAIN_FRACTION = 0.6
VAL_FRACTION = 0.2
TEST_FRACTION = 0.2


class DatasetId(str, Enum):
    ESC50 = "esc50"
    US8K = "us8k"
    TUT = "tut"
    # Bundled synthetic tone corpus; lets the full pipeline run without any
    # of the real datasets on disk.
    SYNTH = "synth"


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"


# Default vocabularies for the three public datasets. Label text is the
# natural-language form used downstream in search queries.
ESC50_LABELS = (
    "dog", "rooster", "pig", "cow", "frog",
    "cat", "hen", "insects", "sheep", "crow",
    "rain", "sea waves", "crackling fire", "crickets", "chirping birds",
    "water drops", "wind", "pouring water", "toilet flush", "thunderstorm",
    "crying baby", "sneezing", "clapping", "breathing", "coughing",
    "footsteps", "laughing", "brushing teeth", "snoring", "drinking sipping",
    "door wood knock", "mouse click", "keyboard typing", "door wood creaks",
    "can opening", "washing machine", "vacuum cleaner", "clock alarm",
    "clock tick", "glass breaking",
    "helicopter", "chainsaw", "siren", "car horn", "engine",
    "train", "church bells", "airplane", "fireworks", "hand saw",
)

US8K_LABELS = (
    "air conditioner", "car horn", "children playing", "dog bark",
    "drilling", "engine idling", "gun shot", "jackhammer",
    "siren", "street music",
)

# Home and residential-area events. "people walking" occurs in both source
# contexts; the residential occurrence is disambiguated to keep labels unique.
TUT_LABELS = (
    "rustling", "snapping", "cupboard", "cutlery", "dishes", "drawer",
    "glass jingling", "object impact", "people walking", "washing dishes",
    "water tap running",
    "door banging", "bird singing", "car passing by", "children shouting",
    "people speaking", "people walking outside", "wind blowing",
)

SYNTH_LABELS = ("tone low", "tone mid", "tone high")


@dataclass(frozen=True)
class LabelVocabulary:
    dataset_id: DatasetId
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError("vocabulary must contain at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate labels in {self.dataset_id.value} vocabulary")
        for label in self.labels:
            if not label or not label.strip():
                raise ValueError("empty label in vocabulary")

    @property
    def class_count(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        return self.labels.index(label)

    def __contains__(self, label: str) -> bool:
        return label in self.labels


_BUILTIN = {
    DatasetId.ESC50: ESC50_LABELS,
    DatasetId.US8K: US8K_LABELS,
    DatasetId.TUT: TUT_LABELS,
    DatasetId.SYNTH: SYNTH_LABELS,
}


def builtin_vocabulary(dataset_id: DatasetId) -> LabelVocabulary:
    return LabelVocabulary(dataset_id, _BUILTIN[dataset_id])


@dataclass
class ClipManifestEntry:
    clip_id: str
    file_path: str
    dataset_id: DatasetId
    label: str
    duration_s: float | None = None


@dataclass(frozen=True)
class SplitAssignment:
    clip_id: str
    split: Split


def load_manifest(
    path: str | Path,
    vocabularies: dict[DatasetId, LabelVocabulary] | None = None,
) -> list[ClipManifestEntry]:
    """Parse a clip manifest CSV, validating labels against the vocabulary.

    `vocabularies` defaults to the built-in ones; pass replacements when a
    dataset uses custom labels.
    """
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    vocabs = dict(vocabularies) if vocabularies else {}

    entries: list[ClipManifestEntry] = []
    seen_ids: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (line for line in fh if not line.startswith("#"))
        reader = csv.reader(lines)
        header = next(reader, None)
        if header != MANIFEST_HEADER:
            raise MalformedRow(1, f"header must be {','.join(MANIFEST_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise MalformedRow(line_no, f"expected 4 fields, got {len(row)}")
            clip_id, file_path, dataset_raw, label = (f.strip() for f in row)
            if not clip_id or not file_path or not label:
                raise MalformedRow(line_no, "empty field")
            try:
                dataset_id = DatasetId(dataset_raw)
            except ValueError:
                raise MalformedRow(line_no, f"unknown dataset_id {dataset_raw!r}") from None
            if clip_id in seen_ids:
                raise MalformedRow(line_no, f"duplicate clip_id {clip_id!r}")
            vocab = vocabs.get(dataset_id) or builtin_vocabulary(dataset_id)
            vocabs.setdefault(dataset_id, vocab)
            if label not in vocab:
                raise UnknownLabel(label, dataset_id.value)
            seen_ids.add(clip_id)
            entries.append(ClipManifestEntry(clip_id, file_path, dataset_id, label))
    return entries


def _split_counts(n: int) -> tuple[int, int, int]:
    n_train = round(TRAIN_FRACTION * n)
    n_val = round(VAL_FRACTION * n)
    return n_train, n_val, n - n_train - n_val


def split_dataset(
    entries: Sequence[ClipManifestEntry],
    seed: int,
    min_per_class: int = 5,
) -> list[SplitAssignment]:
    """Stratified 60/20/20 split, deterministic for a given seed.

    Each class is shuffled independently (classes visited in sorted label
    order, one shared LCG stream) and cut at the rounded fractions, so per
    class every split count is within one clip of its exact target.
    """
    if not entries:
        raise ValueError("entries must be non-empty")
    by_class: dict[str, list[str]] = {}
    for e in entries:
        by_class.setdefault(e.label, []).append(e.clip_id)

    rng = Lcg64(seed)
    assigned: dict[str, Split] = {}
    for label in sorted(by_class):
        clip_ids = sorted(by_class[label])
        if len(clip_ids) < min_per_class:
            raise ClassTooSmall(label, len(clip_ids), min_per_class)
        rng.shuffle(clip_ids)
        n_train, n_val, _ = _split_counts(len(clip_ids))
        for i, clip_id in enumerate(clip_ids):
            if i < n_train:
                assigned[clip_id] = Split.TRAIN
            elif i < n_train + n_val:
                assigned[clip_id] = Split.VAL
            else:
                assigned[clip_id] = Split.TEST
    return [SplitAssignment(e.clip_id, assigned[e.clip_id]) for e in entries]


def write_split_csv(assignments: Iterable[SplitAssignment], path: str | Path,
                    comment: str | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "split"])
        for a in assignments:
            writer.writerow([a.clip_id, a.split.value])


def read_split_csv(path: str | Path) -> list[SplitAssignment]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (line for line in fh if not line.startswith("#"))
        reader = csv.reader(lines)
        header = next(reader, None)
        if header != ["clip_id", "split"]:
            raise MalformedRow(1, "header must be clip_id,split")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedRow(line_no, f"expected 2 fields, got {len(row)}")
            try:
                out.append(SplitAssignment(row[0], Split(row[1])))
            except ValueError:
                raise MalformedRow(line_no, f"unknown split {row[1]!r}") from None
    return out
