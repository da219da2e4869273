"""Query-driven corpus building over a pluggable fetcher.

Search queries follow the fixed template "<label> sound". Fetched audio is
duration-filtered to [3 s, 600 s], canonicalized to mono 44.1 kHz WAV, and
registered in an inventory CSV: video_id,query_label,dataset_id,duration_s,audio_path.
"""

from __future__ import annotations

import csv
import logging
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Protocol

import requests

from .audio import CANONICAL_RATE, AudioClip, decode_and_canonicalize, write_wav
from .datasets import DatasetId, LabelVocabulary
from .errors import FetcherUnavailable, MalformedRow, MissingFile, WebsedError

log = logging.getLogger(__name__)

MIN_DURATION_S = 3.0
MAX_DURATION_S = 600.0
QUERY_SUFFIX = " sound"

INVENTORY_HEADER = ["video_id", "query_label", "dataset_id", "duration_s", "audio_path"]


@dataclass(frozen=True)
class QueryRecord:
    label: str
    query_string: str
    dataset_id: DatasetId


@dataclass
class CrawledVideo:
    video_id: str
    query: QueryRecord
    duration_s: float
    audio_path: str


@dataclass
class FetchResult:
    """One candidate from a fetcher: a file path or raw WAV bytes.

    duration_s is the fetcher-reported duration when known (e.g. from
    search metadata); the decoded duration is checked again after download.
    """
    video_id: str
    duration_s: float | None = None
    path: Path | None = None
    data: bytes | None = None


class Fetcher(Protocol):
    def fetch(self, query: str, limit: int) -> Iterator[FetchResult]: ...


def build_queries(vocab: LabelVocabulary) -> list[QueryRecord]:
    """One query per label, '<label> sound', vocabulary order preserved."""
    return [QueryRecord(label, label + QUERY_SUFFIX, vocab.dataset_id)
            for label in vocab.labels]


def duration_ok(duration_s: float) -> bool:
    return MIN_DURATION_S <= duration_s <= MAX_DURATION_S


class LocalDirectoryFetcher:
    """Reads corpus_root/<query label>/<files>; label = query minus ' sound'."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        if not self.root.is_dir():
            raise FetcherUnavailable(f"no such corpus root: {self.root}")

    def fetch(self, query: str, limit: int) -> Iterator[FetchResult]:
        label = query[:-len(QUERY_SUFFIX)] if query.endswith(QUERY_SUFFIX) else query
        folder = self.root / label
        if not folder.is_dir():
            return
        # Prefix with the folder so same-named files under different labels
        # cannot collide in the crawl's shared audio directory.
        prefix = label.replace(" ", "_")
        count = 0
        for path in sorted(folder.iterdir()):
            if count >= limit:
                return
            if path.is_file():
                yield FetchResult(video_id=f"{prefix}_{path.stem}", path=path)
                count += 1


class HttpManifestFetcher:
    """Fetches from a JSON manifest of [{video_id, query, url, duration_s?}, ...].

    The manifest itself may live at an http(s) URL or a local path.
    """

    def __init__(self, manifest: str, timeout: float = 30.0):
        self.timeout = timeout
        try:
            if manifest.startswith(("http://", "https://")):
                resp = requests.get(manifest, timeout=timeout)
                resp.raise_for_status()
                self.entries = resp.json()
            else:
                import json
                self.entries = json.loads(Path(manifest).read_text())
        except (OSError, ValueError, requests.RequestException) as exc:
            raise FetcherUnavailable(f"cannot load manifest {manifest}: {exc}") from exc

    def fetch(self, query: str, limit: int) -> Iterator[FetchResult]:
        matched = [e for e in self.entries if e.get("query") == query]
        for entry in matched[:limit]:
            try:
                resp = requests.get(entry["url"], timeout=self.timeout)
                resp.raise_for_status()
            except requests.RequestException as exc:
                log.warning("fetch failed for %s: %s", entry.get("video_id"), exc)
                continue
            yield FetchResult(video_id=entry["video_id"],
                              duration_s=entry.get("duration_s"),
                              data=resp.content)


def _decode_result(result: FetchResult, sample_rate: int) -> AudioClip:
    if result.path is not None:
        return decode_and_canonicalize(result.path, sample_rate, source_id=result.video_id)
    if result.data is None:
        raise WebsedError(f"fetch result {result.video_id} carries no audio")
    with tempfile.NamedTemporaryFile(suffix=".wav") as tmp:
        tmp.write(result.data)
        tmp.flush()
        return decode_and_canonicalize(tmp.name, sample_rate, source_id=result.video_id)


def crawl(
    queries: Iterable[QueryRecord],
    fetcher: Fetcher,
    limit_per_query: int,
    out_dir: str | Path,
    sample_rate: int = CANONICAL_RATE,
) -> list[CrawledVideo]:
    """Fetch, duration-filter, canonicalize, and inventory candidate audio.

    Decode failures are logged and skipped; the crawl continues. The
    inventory CSV is rewritten whole, so re-crawling identical fetcher
    output is idempotent.
    """
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    accepted: list[CrawledVideo] = []
    for query in queries:
        kept = 0
        for result in fetcher.fetch(query.query_string, limit_per_query):
            if result.duration_s is not None and not duration_ok(result.duration_s):
                continue
            try:
                clip = _decode_result(result, sample_rate)
            except WebsedError as exc:
                log.warning("skipping %s: %s", result.video_id, exc)
                continue
            if not duration_ok(clip.duration_s):
                continue
            dst = audio_dir / f"{result.video_id}.wav"
            write_wav(dst, clip.samples, clip.sample_rate)
            accepted.append(CrawledVideo(
                video_id=result.video_id,
                query=query,
                duration_s=round(clip.duration_s, 6),
                audio_path=str(dst),
            ))
            kept += 1
        log.info("query %r: kept %d", query.query_string, kept)

    write_inventory(accepted, out_dir / "inventory.csv")
    return accepted


def write_inventory(videos: Iterable[CrawledVideo], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(INVENTORY_HEADER)
        for v in videos:
            writer.writerow([v.video_id, v.query.label, v.query.dataset_id.value,
                             f"{v.duration_s:.6f}", v.audio_path])


def read_inventory(path: str | Path) -> list[CrawledVideo]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    videos = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (line for line in fh if not line.startswith("#"))
        reader = csv.reader(lines)
        header = next(reader, None)
        if header != INVENTORY_HEADER:
            raise MalformedRow(1, f"header must be {','.join(INVENTORY_HEADER)}")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(INVENTORY_HEADER):
                raise MalformedRow(line_no, f"expected 5 fields, got {len(row)}")
            video_id, label, dataset_raw, duration, audio_path = row
            try:
                query = QueryRecord(label, label + QUERY_SUFFIX, DatasetId(dataset_raw))
                videos.append(CrawledVideo(video_id, query, float(duration), audio_path))
            except ValueError:
                raise MalformedRow(line_no, "bad dataset_id or duration") from None
    return videos


def query_ground_truth(video: CrawledVideo) -> str:
    """The query's label, inherited by every segment of the video."""
    return video.query.label
