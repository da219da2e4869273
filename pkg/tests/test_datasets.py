"""Manifest parsing and the stratified split."""

import pytest

from websed.datasets import (
    ClipManifestEntry,
    DatasetId,
    Split,
    builtin_vocabulary,
    load_manifest,
    read_split_csv,
    split_dataset,
    write_split_csv,
)
from websed.errors import ClassTooSmall, MalformedRow, MissingFile, UnknownLabel


def entries_for(label_counts, dataset=DatasetId.SYNTH):
    out = []
    for label, n in label_counts.items():
        for i in range(n):
            cid = f"{label.replace(' ', '_')}_{i}"
            out.append(ClipManifestEntry(cid, f"{cid}.wav", dataset, label))
    return out


class TestVocabulary:
    def test_builtin_sizes(self):
        assert builtin_vocabulary(DatasetId.ESC50).class_count == 50
        assert builtin_vocabulary(DatasetId.US8K).class_count == 10
        assert builtin_vocabulary(DatasetId.TUT).class_count == 18
        assert builtin_vocabulary(DatasetId.SYNTH).class_count == 3

    def test_total_real_dataset_classes(self):
        total = sum(builtin_vocabulary(d).class_count
                    for d in (DatasetId.ESC50, DatasetId.US8K, DatasetId.TUT))
        assert total == 78

    def test_index_round_trip(self):
        vocab = builtin_vocabulary(DatasetId.US8K)
        for i, label in enumerate(vocab.labels):
            assert vocab.index_of(label) == i
            assert label in vocab


class TestManifest:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "clip_id,file_path,dataset_id,label\n"
            "a,1.wav,synth,tone low\n"
            "b,2.wav,synth,tone mid\n"
        )
        entries = load_manifest(path)
        assert [e.clip_id for e in entries] == ["a", "b"]
        assert entries[0].label == "tone low"
        assert entries[1].dataset_id is DatasetId.SYNTH

    def test_comment_lines_skipped(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "# config_hash=deadbeef\n"
            "clip_id,file_path,dataset_id,label\n"
            "a,1.wav,synth,tone low\n"
        )
        assert len(load_manifest(path)) == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            load_manifest(tmp_path / "nope.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("id,path\n")
        with pytest.raises(MalformedRow):
            load_manifest(path)

    def test_duplicate_clip_id(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "clip_id,file_path,dataset_id,label\n"
            "a,1.wav,synth,tone low\n"
            "a,2.wav,synth,tone mid\n"
        )
        with pytest.raises(MalformedRow) as err:
            load_manifest(path)
        assert "duplicate" in str(err.value)

    def test_unknown_label(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "clip_id,file_path,dataset_id,label\n"
            "a,1.wav,esc50,space laser\n"
        )
        with pytest.raises(UnknownLabel):
            load_manifest(path)

    def test_unknown_dataset(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "clip_id,file_path,dataset_id,label\n"
            "a,1.wav,imaginary,dog\n"
        )
        with pytest.raises(MalformedRow):
            load_manifest(path)

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(
            "clip_id,file_path,dataset_id,label\n"
            "a,1.wav,synth\n"
        )
        with pytest.raises(MalformedRow):
            load_manifest(path)


class TestSplit:
    def brute_force_check(self, entries, assignments):
        """Per class: counts hit round(0.6n)/round(0.2n)/rest exactly."""
        split_of = {a.clip_id: a.split for a in assignments}
        label_of = {e.clip_id: e.label for e in entries}
        per_class = {}
        for cid, split in split_of.items():
            per_class.setdefault(label_of[cid], {s: 0 for s in Split})[split] += 1
        for label, counts in per_class.items():
            n = sum(counts.values())
            assert counts[Split.TRAIN] == round(0.6 * n), label
            assert counts[Split.VAL] == round(0.2 * n), label
            assert counts[Split.TEST] == n - counts[Split.TRAIN] - counts[Split.VAL]

    def test_fractions_exact_per_class(self):
        entries = entries_for({"tone low": 60, "tone mid": 60, "tone high": 60})
        self.brute_force_check(entries, split_dataset(entries, seed=0))

    @pytest.mark.parametrize("n", [5, 7, 10, 11, 13, 25, 99])
    def test_fractions_for_odd_sizes(self, n):
        entries = entries_for({"tone low": n, "tone mid": n + 2, "tone high": n + 4})
        self.brute_force_check(entries, split_dataset(entries, seed=3))

    def test_every_clip_assigned_once(self):
        entries = entries_for({"tone low": 10, "tone mid": 10, "tone high": 10})
        assignments = split_dataset(entries, seed=1)
        assert sorted(a.clip_id for a in assignments) == sorted(e.clip_id for e in entries)

    def test_deterministic_per_seed(self):
        entries = entries_for({"tone low": 30, "tone mid": 30, "tone high": 30})
        a = split_dataset(entries, seed=5)
        b = split_dataset(entries, seed=5)
        assert a == b

    def test_seed_changes_assignment(self):
        entries = entries_for({"tone low": 30, "tone mid": 30, "tone high": 30})
        a = {x.clip_id: x.split for x in split_dataset(entries, seed=0)}
        b = {x.clip_id: x.split for x in split_dataset(entries, seed=1)}
        assert a != b

    def test_entry_order_does_not_matter(self):
        entries = entries_for({"tone low": 12, "tone mid": 12, "tone high": 12})
        a = {x.clip_id: x.split for x in split_dataset(entries, seed=9)}
        b = {x.clip_id: x.split for x in split_dataset(list(reversed(entries)), seed=9)}
        assert a == b

    def test_class_too_small(self):
        entries = entries_for({"tone low": 3, "tone mid": 10, "tone high": 10})
        with pytest.raises(ClassTooSmall):
            split_dataset(entries, seed=0)

    def test_csv_round_trip(self, tmp_path):
        entries = entries_for({"tone low": 10, "tone mid": 10, "tone high": 10})
        assignments = split_dataset(entries, seed=2)
        path = tmp_path / "splits.csv"
        write_split_csv(assignments, path, comment="config_hash=abc123")
        assert path.read_text().startswith("# config_hash=abc123\n")
        assert read_split_csv(path) == assignments
