"""Human evaluation round: assignments, vote collection, majority verdicts.

Top-ranked segments per (classifier, class) are spread across evaluators so
each segment collects at least ``min_votes`` verdicts from distinct people.
Votes land in an append-only JSONL log; board state is whatever replaying
that log yields, so a crashed round resumes by reloading the file.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    CorruptFile,
    DuplicateVote,
    NotEnoughEvaluators,
    UnknownAssignment,
)
from .rng import Lcg64

MIN_VOTES = 3
K_PER_CLASS = 40

JUDGMENT_CORRECT = "Correct"
JUDGMENT_INCORRECT = "Incorrect"
JUDGMENT_PENDING = "Pending"


@dataclass(frozen=True)
class EvalTask:
    """One segment put before humans, with the label the model asserted."""
    segment_id: str
    predicted_label: str


@dataclass(frozen=True)
class VoteRecord:
    segment_id: str
    evaluator_id: str
    verdict: str  # "correct" | "incorrect"
    ts: float

    def to_json(self) -> str:
        return json.dumps({
            "segment_id": self.segment_id,
            "evaluator_id": self.evaluator_id,
            "verdict": self.verdict,
            "ts": self.ts,
        }, sort_keys=True)


def select_evaluation_set(predictions: Sequence, k_per_class: int = K_PER_CLASS,
                          ) -> list[EvalTask]:
    """Top-k segments per (classifier, predicted class), deduplicated.

    A segment scored by several classifiers appears once, under the label of
    the first (classifier, class) group that ranked it. Group order follows
    classifier then class name so reruns agree.
    """
    from .evaluation import rank_segments

    groups = sorted({(p.classifier, p.predicted_class) for p in predictions})
    seen: set[str] = set()
    tasks: list[EvalTask] = []
    for classifier, label in groups:
        subset = [p for p in predictions if p.classifier == classifier]
        for segment_id in rank_segments(subset, label, k_per_class):
            if segment_id not in seen:
                seen.add(segment_id)
                tasks.append(EvalTask(segment_id=segment_id, predicted_label=label))
    return tasks


def assign_tasks(tasks: Sequence[EvalTask], evaluators: Sequence[str],
                 min_votes: int = MIN_VOTES, seed: int = 0,
                 ) -> dict[str, list[EvalTask]]:
    """Give every task to min_votes distinct evaluators, loads kept even.

    Greedy: each task goes to the currently least-loaded evaluators, with a
    seeded shuffle breaking ties so no one always drains first. Total load
    spread stays within one task.
    """
    names = sorted(set(evaluators))
    if len(names) < min_votes:
        raise NotEnoughEvaluators(
            f"{len(names)} evaluators cannot supply {min_votes} distinct votes")
    rng = Lcg64(seed)
    load = {name: 0 for name in names}
    queues: dict[str, list[EvalTask]] = {name: [] for name in names}
    for task in tasks:
        order = list(names)
        rng.shuffle(order)
        order.sort(key=lambda name: load[name])
        for name in order[:min_votes]:
            queues[name].append(task)
            load[name] += 1
    return queues


def aggregate_verdict(correct: int, incorrect: int, min_votes: int = MIN_VOTES) -> str:
    """Majority rule; short counts and ties stay pending."""
    if correct + incorrect < min_votes:
        return JUDGMENT_PENDING
    if correct > incorrect:
        return JUDGMENT_CORRECT
    if incorrect > correct:
        return JUDGMENT_INCORRECT
    return JUDGMENT_PENDING


@dataclass
class EvaluatorProgress:
    done: int
    total: int


@dataclass
class FeedbackBoard:
    """In-memory vote state over a fixed assignment, backed by a JSONL log."""

    assignments: dict[str, list[EvalTask]]
    log_path: Path | None = None
    min_votes: int = MIN_VOTES
    votes: dict[tuple[str, str], VoteRecord] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self) -> None:
        self._tasks: dict[str, EvalTask] = {}
        self._queue_index: dict[str, set[str]] = {}
        for evaluator, queue in self.assignments.items():
            self._queue_index[evaluator] = {t.segment_id for t in queue}
            for task in queue:
                self._tasks[task.segment_id] = task
        if self.log_path is not None:
            self.log_path = Path(self.log_path)
            if self.log_path.exists():
                self._replay()

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    row = json.loads(line)
                    record = VoteRecord(row["segment_id"], row["evaluator_id"],
                                        row["verdict"], float(row["ts"]))
                except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                    raise CorruptFile(f"{self.log_path}:{line_no}") from None
                self.votes[(record.segment_id, record.evaluator_id)] = record

    def record_vote(self, segment_id: str, evaluator_id: str, verdict: str,
                    ts: float | None = None) -> VoteRecord:
        """Append one verdict; rejects unknown pairings and second votes."""
        if verdict not in ("correct", "incorrect"):
            raise ValueError(f"verdict must be correct|incorrect, got {verdict!r}")
        with self._lock:
            assigned = self._queue_index.get(evaluator_id)
            if assigned is None or segment_id not in assigned:
                raise UnknownAssignment(
                    f"segment {segment_id!r} is not assigned to {evaluator_id!r}")
            key = (segment_id, evaluator_id)
            if key in self.votes:
                raise DuplicateVote(f"{evaluator_id!r} already voted on {segment_id!r}")
            record = VoteRecord(segment_id, evaluator_id, verdict,
                                time.time() if ts is None else ts)
            if self.log_path is not None:
                with open(self.log_path, "a", encoding="utf-8") as fh:
                    fh.write(record.to_json() + "\n")
                    fh.flush()
            self.votes[key] = record
            return record

    def next_task(self, evaluator_id: str) -> EvalTask | None:
        """First of this evaluator's queue still missing their vote."""
        for task in self.assignments.get(evaluator_id, []):
            if (task.segment_id, evaluator_id) not in self.votes:
                return task
        return None

    def tallies(self) -> dict[str, tuple[int, int]]:
        counts: dict[str, list[int]] = {sid: [0, 0] for sid in self._tasks}
        for record in self.votes.values():
            pair = counts.get(record.segment_id)
            if pair is None:
                continue  # stale log rows for tasks dropped from the round
            pair[0 if record.verdict == "correct" else 1] += 1
        return {sid: (c, i) for sid, (c, i) in counts.items()}

    def judgments(self) -> dict[str, str]:
        """segment_id -> Correct | Incorrect | Pending over all tasks."""
        return {
            sid: aggregate_verdict(c, i, self.min_votes)
            for sid, (c, i) in self.tallies().items()
        }

    def human_gt(self) -> dict[str, str]:
        """Settled verdicts only, as a ground-truth map for precision."""
        return {sid: v for sid, v in self.judgments().items()
                if v != JUDGMENT_PENDING}

    def progress(self, evaluator_id: str | None = None,
                 ) -> EvaluatorProgress | dict[str, EvaluatorProgress]:
        def one(name: str) -> EvaluatorProgress:
            queue = self.assignments.get(name, [])
            done = sum((t.segment_id, name) in self.votes for t in queue)
            return EvaluatorProgress(done=done, total=len(queue))

        if evaluator_id is not None:
            return one(evaluator_id)
        return {name: one(name) for name in self.assignments}

    def predicted_label(self, segment_id: str) -> str:
        task = self._tasks.get(segment_id)
        if task is None:
            raise UnknownAssignment(f"segment {segment_id!r} is not in this round")
        return task.predicted_label

    @property
    def task_count(self) -> int:
        return len(self._tasks)


def board_from_predictions(predictions: Sequence, evaluators: Sequence[str],
                           log_path: str | Path | None = None,
                           k_per_class: int = K_PER_CLASS,
                           min_votes: int = MIN_VOTES, seed: int = 0,
                           ) -> FeedbackBoard:
    tasks = select_evaluation_set(predictions, k_per_class)
    assignments = assign_tasks(tasks, evaluators, min_votes, seed)
    return FeedbackBoard(assignments=assignments,
                         log_path=Path(log_path) if log_path else None,
                         min_votes=min_votes)


def progress_summary(board: FeedbackBoard) -> dict:
    per = board.progress()
    assert isinstance(per, dict)
    votes_needed = sum(p.total for p in per.values())
    votes_cast = sum(p.done for p in per.values())
    judged = sum(v != JUDGMENT_PENDING for v in board.judgments().values())
    return {
        "segments": board.task_count,
        "votes_cast": votes_cast,
        "votes_needed": votes_needed,
        "segments_judged": judged,
        "evaluators": {
            name: {"done": p.done, "total": p.total} for name, p in sorted(per.items())
        },
    }


def load_votes(log_path: str | Path) -> list[VoteRecord]:
    """Read a vote log without a board, e.g. for offline inspection."""
    records: list[VoteRecord] = []
    with open(log_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                records.append(VoteRecord(row["segment_id"], row["evaluator_id"],
                                          row["verdict"], float(row["ts"])))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise CorruptFile(f"{log_path}:{line_no}") from None
    return records


def human_gt_from_votes(votes: Sequence[VoteRecord],
                        min_votes: int = MIN_VOTES) -> Mapping[str, str]:
    counts: dict[str, list[int]] = {}
    seen: set[tuple[str, str]] = set()
    for record in votes:
        key = (record.segment_id, record.evaluator_id)
        if key in seen:
            continue
        seen.add(key)
        pair = counts.setdefault(record.segment_id, [0, 0])
        pair[0 if record.verdict == "correct" else 1] += 1
    return {
        sid: verdict
        for sid, (c, i) in counts.items()
        if (verdict := aggregate_verdict(c, i, min_votes)) != JUDGMENT_PENDING
    }
