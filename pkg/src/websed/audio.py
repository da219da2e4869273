"""Audio ingestion: WAV decode, canonical mono 44.1 kHz form, segmentation.

Clips are sliced into fixed windows of 52,224 samples moved by 5,120
(window = 100 * hop + fft_window, stride = 10 * hop), so each segment
produces exactly 101 feature frames downstream.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import upfirdn

from .errors import UnreadableFile, UnsupportedEncoding

CANONICAL_RATE = 44100
SEGMENT_WINDOW = 52224
SEGMENT_STRIDE = 5120

_PCM_SCALE = {
    np.dtype(np.uint8): (128.0, 128.0),   # offset, divisor
    np.dtype(np.int16): (0.0, 32768.0),
    np.dtype(np.int32): (0.0, 2147483648.0),
}


@dataclass
class AudioClip:
    samples: np.ndarray          # float64 in [-1, 1]
    sample_rate: int
    source_id: str

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class Segment:
    segment_id: str
    source_id: str
    start_sample: int
    length_samples: int


def _read_wav(path: Path) -> tuple[int, np.ndarray]:
    try:
        rate, data = wavfile.read(str(path))
    except FileNotFoundError as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    except ValueError as exc:
        msg = str(exc)
        if "Unknown wave file format" in msg or "bit depth" in msg:
            raise UnsupportedEncoding(f"{path}: {msg}") from exc
        raise UnreadableFile(f"{path}: {msg}") from exc
    except Exception as exc:
        raise UnreadableFile(f"{path}: {exc}") from exc
    return rate, data


def decode_and_canonicalize(
    path: str | Path,
    target_rate: int = CANONICAL_RATE,
    source_id: str | None = None,
) -> AudioClip:
    """Decode a WAV file to mono float samples at the canonical rate.

    Multi-channel input is downmixed by arithmetic mean; integer PCM is
    scaled to [-1, 1]; any sample rate is accepted and resampled.
    """
    path = Path(path)
    rate, data = _read_wav(path)
    if data.size == 0:
        raise UnreadableFile(f"{path}: no audio data")

    if data.dtype in _PCM_SCALE:
        offset, divisor = _PCM_SCALE[data.dtype]
        samples = (data.astype(np.float64) - offset) / divisor
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise UnsupportedEncoding(f"{path}: sample dtype {data.dtype}")

    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if not np.all(np.isfinite(samples)):
        raise UnreadableFile(f"{path}: non-finite samples")
    samples = np.clip(samples, -1.0, 1.0)

    if rate != target_rate:
        samples = resample(samples, rate, target_rate)
        samples = np.clip(samples, -1.0, 1.0)
    return AudioClip(samples, target_rate, source_id or path.stem)


def design_resample_filter(up: int, down: int, taps_per_phase: int = 64,
                           beta: float = 8.0) -> np.ndarray:
    """Kaiser-windowed sinc lowpass for polyphase resampling by up/down.

    Odd length 2*(taps_per_phase/2)*up + 1 keeps the filter symmetric
    (linear phase); cutoff sits at the tighter of the two Nyquist limits.
    Passband gain is `up` to compensate the zero stuffing.
    """
    half = (taps_per_phase // 2) * up
    n = np.arange(-half, half + 1, dtype=np.float64)
    fc = 1.0 / max(up, down)  # relative to Nyquist at the upsampled rate
    h = fc * np.sinc(fc * n) * np.kaiser(2 * half + 1, beta)
    return h * up


def resample(x: np.ndarray, from_rate: int, to_rate: int) -> np.ndarray:
    """Polyphase windowed-sinc resampling between two integer rates."""
    if from_rate <= 0 or to_rate <= 0:
        raise ValueError("sample rates must be positive")
    if from_rate == to_rate:
        return np.array(x, dtype=np.float64, copy=True)
    g = math.gcd(from_rate, to_rate)
    up, down = to_rate // g, from_rate // g
    h = design_resample_filter(up, down)
    y = upfirdn(h, np.asarray(x, dtype=np.float64), up=up, down=down)
    # Group delay is (len(h)-1)/2 samples at the upsampled rate.
    offset = int(round(((len(h) - 1) // 2) / down))
    n_out = -(-len(x) * up // down)
    y = y[offset:offset + n_out]
    if len(y) < n_out:
        y = np.pad(y, (0, n_out - len(y)))
    return y


def segment_clip(
    clip: AudioClip,
    window_samples: int = SEGMENT_WINDOW,
    stride_samples: int = SEGMENT_STRIDE,
) -> list[Segment]:
    """Fixed-length overlapped segments at starts 0, stride, 2*stride, ...

    A clip shorter than one window yields an empty list.
    """
    n = len(clip.samples)
    if n < window_samples:
        return []
    count = (n - window_samples) // stride_samples + 1
    return [
        Segment(
            segment_id=f"{clip.source_id}@{i * stride_samples}",
            source_id=clip.source_id,
            start_sample=i * stride_samples,
            length_samples=window_samples,
        )
        for i in range(count)
    ]


def segment_samples(clip: AudioClip, segment: Segment) -> np.ndarray:
    return clip.samples[segment.start_sample:segment.start_sample + segment.length_samples]


def read_clip(path: str | Path, source_id: str | None = None) -> AudioClip:
    """Load a WAV already in (or convertible to) the canonical form."""
    return decode_and_canonicalize(path, CANONICAL_RATE, source_id)


def write_wav(path: str | Path, samples: np.ndarray, rate: int = CANONICAL_RATE) -> None:
    """Write mono float samples as 16-bit PCM."""
    pcm = np.round(np.clip(samples, -1.0, 1.0) * 32767.0).astype(np.int16)
    wavfile.write(str(path), rate, pcm)


def wav_bytes(samples_or_pcm: np.ndarray, rate: int = CANONICAL_RATE) -> bytes:
    """Serialize samples to an in-memory 16-bit PCM WAV."""
    if samples_or_pcm.dtype == np.int16:
        pcm = samples_or_pcm
    else:
        pcm = np.round(np.clip(samples_or_pcm, -1.0, 1.0) * 32767.0).astype(np.int16)
    buf = io.BytesIO()
    wavfile.write(buf, rate, pcm)
    return buf.getvalue()
