"""Bundled synthetic tone corpus so the whole pipeline runs offline.

Three classes of sine tones (440, 1,000 and 3,000 Hz) with random phase,
small frequency jitter and additive noise. The classes sit far apart on
the mel axis, so a sane feature + classifier stack separates them easily;
anything below ~90% accuracy here points at a real defect.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .audio import CANONICAL_RATE, AudioClip, write_wav
from .datasets import (
    MANIFEST_HEADER,
    SYNTH_LABELS,
    ClipManifestEntry,
    DatasetId,
)

TONE_FREQS_HZ = {
    "tone low": 440.0,
    "tone mid": 1000.0,
    "tone high": 3000.0,
}
CLIP_SECONDS = 1.5  # 66,150 samples: three segments per clip

# Narrow net for the three-tone corpus: same stage structure, fewer filters,
# so the full demo pipeline trains in seconds instead of minutes.
TOY_CNN = {"conv1_filters": 16, "conv2_filters": 16, "fc_width": 64,
           "dropout_p": 0.25}
TOY_TRAIN = {"batch_size": 50, "learning_rate": 0.005, "momentum": 0.9,
             "l2": 0.001, "epochs": 30, "early_stop_patience": 30}


def synth_clip(label: str, rng: np.random.Generator,
               sample_rate: int = CANONICAL_RATE,
               seconds: float = CLIP_SECONDS,
               source_id: str = "synth") -> AudioClip:
    """One noisy sine clip for the given tone class."""
    freq = TONE_FREQS_HZ[label] * rng.uniform(0.98, 1.02)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    amp = rng.uniform(0.3, 0.8)
    noise_std = rng.uniform(0.01, 0.05)
    n = int(round(seconds * sample_rate))
    t = np.arange(n, dtype=np.float64) / sample_rate
    samples = amp * np.sin(2.0 * np.pi * freq * t + phase)
    samples += rng.normal(0.0, noise_std, size=n)
    return AudioClip(np.clip(samples, -1.0, 1.0), sample_rate, source_id)


def synth_corpus(clips_per_class: int = 60, seed: int = 0,
                 seconds: float = CLIP_SECONDS,
                 ) -> list[tuple[ClipManifestEntry, AudioClip]]:
    """In-memory corpus: (manifest entry, clip) pairs, deterministic per seed."""
    rng = np.random.default_rng(seed)
    out: list[tuple[ClipManifestEntry, AudioClip]] = []
    for label in SYNTH_LABELS:
        slug = label.replace(" ", "_")
        for i in range(clips_per_class):
            clip_id = f"{slug}_{i:03d}"
            clip = synth_clip(label, rng, seconds=seconds, source_id=clip_id)
            entry = ClipManifestEntry(clip_id=clip_id, file_path=f"{clip_id}.wav",
                                      dataset_id=DatasetId.SYNTH, label=label)
            out.append((entry, clip))
    return out


def write_corpus(out_dir: str | Path, clips_per_class: int = 60, seed: int = 0,
                 seconds: float = CLIP_SECONDS) -> Path:
    """Materialize the corpus: WAVs in audio/, manifest.csv beside them.

    Returns the manifest path. File paths in the manifest are relative to
    the manifest's directory.
    """
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.csv"
    with open(manifest_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for entry, clip in synth_corpus(clips_per_class, seed, seconds):
            rel = Path("audio") / f"{entry.clip_id}.wav"
            write_wav(out_dir / rel, clip.samples, clip.sample_rate)
            writer.writerow([entry.clip_id, str(rel), entry.dataset_id.value,
                             entry.label])
    return manifest_path


def write_crawl_corpus(root: str | Path, clips_per_label: int = 4,
                       seed: int = 0, seconds: float = 4.0) -> Path:
    """Folder-per-query layout the local fetcher walks: root/<label>/NNN.wav.

    Clips default to 4 s so they clear the crawler's minimum duration.
    """
    root = Path(root)
    rng = np.random.default_rng(seed)
    for label in SYNTH_LABELS:
        label_dir = root / label
        label_dir.mkdir(parents=True, exist_ok=True)
        for i in range(clips_per_label):
            clip = synth_clip(label, rng, seconds=seconds)
            write_wav(label_dir / f"{i:03d}.wav", clip.samples, clip.sample_rate)
    return root
