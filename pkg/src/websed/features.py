"""Two-channel CNN input features: log mel spectrogram plus delta slopes.

The default configuration (1024-sample Hann window, hop 512, 60 mel bands,
101 frames per patch) turns one 52,224-sample segment into exactly one
60 x 101 x 2 patch.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegenerateStd, InputTooShort, InvalidConfig

DELTA_HALF_WINDOW = 4


@dataclass(frozen=True)
class FeatureConfig:
    sample_rate: int = 44100
    fft_window: int = 1024
    hop: int = 512
    mel_bands: int = 60
    frames_per_patch: int = 101
    patch_stride_frames: int = 10
    log_floor: float = 1e-10
    # 2.0 = power spectrum, 1.0 = magnitude.
    spectrum_power: float = 2.0
    # Natural log by default; set to 10.0 for log10, etc.
    log_base: float = math.e

    def __post_init__(self):
        if self.fft_window < 2 or self.fft_window & (self.fft_window - 1):
            raise InvalidConfig("fft_window must be a power of two")
        if self.mel_bands < 1:
            raise InvalidConfig("mel_bands must be >= 1")
        if self.frames_per_patch < 1:
            raise InvalidConfig("frames_per_patch must be >= 1")
        if self.hop < 1 or self.sample_rate < 1:
            raise InvalidConfig("hop and sample_rate must be positive")
        if self.patch_stride_frames < 1:
            raise InvalidConfig("patch_stride_frames must be >= 1")
        if self.log_floor <= 0:
            raise InvalidConfig("log_floor must be positive")

    @property
    def segment_window_samples(self) -> int:
        return (self.frames_per_patch - 1) * self.hop + self.fft_window

    @property
    def segment_stride_samples(self) -> int:
        return self.patch_stride_frames * self.hop


def config_hash(cfg) -> str:
    """Short stable hash of a (dataclass) config, for artifact stamping."""
    payload = asdict(cfg) if hasattr(cfg, "__dataclass_fields__") else dict(cfg)
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelFilterbank:
    weights: np.ndarray          # [mel_bands, fft_window // 2 + 1]
    center_freqs_hz: np.ndarray  # [mel_bands]


def build_mel_filterbank(cfg: FeatureConfig) -> MelFilterbank:
    """Triangular filters with centers equally spaced on the mel scale.

    Band m rises from mel point m to m+1 and falls to m+2, over
    mel_bands + 2 points spanning 0 Hz to Nyquist.
    """
    n_bins = cfg.fft_window // 2 + 1
    nyquist = cfg.sample_rate / 2.0
    mel_points = np.linspace(hz_to_mel(0.0), hz_to_mel(nyquist), cfg.mel_bands + 2)
    hz_points = mel_to_hz(mel_points)
    bin_freqs = np.arange(n_bins) * cfg.sample_rate / cfg.fft_window

    weights = np.zeros((cfg.mel_bands, n_bins))
    for m in range(cfg.mel_bands):
        left, center, right = hz_points[m], hz_points[m + 1], hz_points[m + 2]
        rising = (bin_freqs - left) / (center - left)
        falling = (right - bin_freqs) / (right - center)
        weights[m] = np.maximum(0.0, np.minimum(rising, falling))
    return MelFilterbank(weights=weights, center_freqs_hz=hz_points[1:-1])


def hann_window(n: int) -> np.ndarray:
    """Periodic Hann window."""
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


def frame_signal(x: np.ndarray, window: int, hop: int) -> np.ndarray:
    """Non-centered framing: frames [T, window] at starts 0, hop, 2*hop, ..."""
    n = len(x)
    if n < window:
        raise InputTooShort(f"need >= {window} samples, got {n}")
    t = (n - window) // hop + 1
    idx = np.arange(window)[None, :] + hop * np.arange(t)[:, None]
    return x[idx]


def stft_spectra(x: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    """Hann-windowed one-sided spectra, |.|^spectrum_power, shape [T, bins]."""
    frames = frame_signal(np.asarray(x, dtype=np.float64), cfg.fft_window, cfg.hop)
    spectra = np.fft.rfft(frames * hann_window(cfg.fft_window), axis=1)
    return np.abs(spectra) ** cfg.spectrum_power


def log_mel_spectrogram(x: np.ndarray, cfg: FeatureConfig,
                        filterbank: MelFilterbank | None = None) -> np.ndarray:
    """Log-compressed mel spectrogram, shape [mel_bands, T]."""
    fb = filterbank or build_mel_filterbank(cfg)
    spectra = stft_spectra(x, cfg)
    mel = fb.weights @ spectra.T
    logmel = np.log(np.maximum(mel, cfg.log_floor))
    if cfg.log_base != math.e:
        logmel = logmel / math.log(cfg.log_base)
    return logmel


def delta_coefficients(logmel: np.ndarray) -> np.ndarray:
    """Regression slope over +/-4 neighbouring frames, edges replicated.

    d[t] = sum_{n=1..4} n * (c[t+n] - c[t-n]) / 60, where 60 = 2 * sum(n^2).
    """
    bands, t = logmel.shape
    if t < 1:
        raise ValueError("need at least one frame")
    padded = np.pad(logmel, ((0, 0), (DELTA_HALF_WINDOW, DELTA_HALF_WINDOW)), mode="edge")
    denom = 2.0 * sum(n * n for n in range(1, DELTA_HALF_WINDOW + 1))
    delta = np.zeros_like(logmel)
    for n in range(1, DELTA_HALF_WINDOW + 1):
        shift_fwd = padded[:, DELTA_HALF_WINDOW + n:DELTA_HALF_WINDOW + n + t]
        shift_back = padded[:, DELTA_HALF_WINDOW - n:DELTA_HALF_WINDOW - n + t]
        delta += n * (shift_fwd - shift_back)
    return delta / denom


@dataclass
class FeaturePatch:
    values: np.ndarray  # [mel_bands, frames_per_patch, 2]
    segment_id: str


def patchify(logmel: np.ndarray, delta: np.ndarray, cfg: FeatureConfig,
             segment_id: str = "") -> list[FeaturePatch]:
    """Cut aligned log-mel/delta matrices into patches at 10-frame offsets."""
    if logmel.shape != delta.shape:
        raise ValueError("log-mel and delta shapes differ")
    t = logmel.shape[1]
    width, step = cfg.frames_per_patch, cfg.patch_stride_frames
    if t < width:
        return []
    patches = []
    for i in range((t - width) // step + 1):
        lo = i * step
        values = np.stack([logmel[:, lo:lo + width], delta[:, lo:lo + width]], axis=-1)
        pid = segment_id if segment_id and i == 0 else f"{segment_id or 'patch'}+{lo}"
        patches.append(FeaturePatch(values=values, segment_id=pid))
    return patches


def segment_patch(samples: np.ndarray, cfg: FeatureConfig, segment_id: str,
                  filterbank: MelFilterbank | None = None) -> FeaturePatch:
    """Feature patch for one exact segment window (101 frames -> 1 patch)."""
    logmel = log_mel_spectrogram(samples, cfg, filterbank)
    patches = patchify(logmel, delta_coefficients(logmel), cfg, segment_id)
    if len(patches) != 1:
        raise InputTooShort(
            f"segment {segment_id!r} produced {len(patches)} patches, expected 1")
    return patches[0]


@dataclass
class ChannelStats:
    mean: np.ndarray  # [2]
    std: np.ndarray   # [2]

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelStats":
        return cls(np.asarray(d["mean"], dtype=np.float64),
                   np.asarray(d["std"], dtype=np.float64))


def channel_stats(patches: list[FeaturePatch]) -> ChannelStats:
    """Per-channel mean/std over a training set of patches."""
    if not patches:
        raise ValueError("no patches")
    stacked = np.stack([p.values for p in patches]).astype(np.float64)
    mean = stacked.mean(axis=(0, 1, 2))
    std = stacked.std(axis=(0, 1, 2))
    if np.any(std <= 0):
        raise DegenerateStd(f"zero-variance channel, std={std.tolist()}")
    return ChannelStats(mean, std)


def normalize(patches: list[FeaturePatch], stats: ChannelStats) -> list[FeaturePatch]:
    """Z-score every patch with the supplied training-set statistics."""
    if np.any(stats.std <= 0):
        raise DegenerateStd(f"std must be positive, got {stats.std.tolist()}")
    return [
        FeaturePatch(values=(p.values - stats.mean) / stats.std, segment_id=p.segment_id)
        for p in patches
    ]


# -- optional on-disk patch cache ---------------------------------------------
#
# <prefix>.f32  little-endian float32 blocks of shape [mel_bands][frames][2]
# <prefix>.json sidecar: segment ids in block order, config hash, shape

def save_patch_cache(prefix: str | Path, patches: list[FeaturePatch],
                     cfg: FeatureConfig, extra: dict | None = None) -> None:
    prefix = Path(prefix)
    shape = [cfg.mel_bands, cfg.frames_per_patch, 2]
    with open(prefix.with_suffix(".f32"), "wb") as fh:
        for p in patches:
            if list(p.values.shape) != shape:
                raise ValueError(f"patch {p.segment_id} has shape {p.values.shape}")
            fh.write(p.values.astype("<f4").tobytes())
    sidecar = {
        "config_hash": config_hash(cfg),
        "shape": shape,
        "segment_ids": [p.segment_id for p in patches],
    }
    if extra:
        sidecar.update(extra)
    prefix.with_suffix(".json").write_text(json.dumps(sidecar, indent=1))


def load_patch_cache(prefix: str | Path, cfg: FeatureConfig | None = None
                     ) -> tuple[list[FeaturePatch], dict]:
    prefix = Path(prefix)
    sidecar = json.loads(prefix.with_suffix(".json").read_text())
    if cfg is not None and sidecar["config_hash"] != config_hash(cfg):
        raise InvalidConfig("patch cache was built with a different feature config")
    shape = tuple(sidecar["shape"])
    block = int(np.prod(shape))
    raw = np.frombuffer(prefix.with_suffix(".f32").read_bytes(), dtype="<f4")
    if raw.size != block * len(sidecar["segment_ids"]):
        raise InvalidConfig("patch cache size does not match its sidecar")
    patches = [
        FeaturePatch(values=raw[i * block:(i + 1) * block].reshape(shape).astype(np.float64),
                     segment_id=sid)
        for i, sid in enumerate(sidecar["segment_ids"])
    ]
    return patches, sidecar
