"""Vote aggregation, task assignment, and the append-only vote log."""

import itertools
import json

import pytest

from websed.datasets import DatasetId
from websed.errors import (
    CorruptFile,
    DuplicateVote,
    NotEnoughEvaluators,
    UnknownAssignment,
)
from websed.evaluation import PredictionRow
from websed.feedback import (
    JUDGMENT_CORRECT,
    JUDGMENT_INCORRECT,
    JUDGMENT_PENDING,
    EvalTask,
    FeedbackBoard,
    aggregate_verdict,
    assign_tasks,
    board_from_predictions,
    human_gt_from_votes,
    load_votes,
    progress_summary,
    select_evaluation_set,
)

EVALUATORS = ["alice", "bob", "carol", "dan", "erin"]


def oracle_verdict(verdicts, min_votes):
    """Count the multiset longhand, no arithmetic shared with the package."""
    correct = sum(1 for v in verdicts if v == "correct")
    incorrect = len(verdicts) - correct
    if len(verdicts) < min_votes:
        return JUDGMENT_PENDING
    if correct > incorrect:
        return JUDGMENT_CORRECT
    if correct < incorrect:
        return JUDGMENT_INCORRECT
    return JUDGMENT_PENDING


class TestAggregateVerdict:
    def test_all_multisets_up_to_five_votes(self):
        for size in range(6):
            for combo in itertools.combinations_with_replacement(
                    ("correct", "incorrect"), size):
                c = combo.count("correct")
                i = combo.count("incorrect")
                assert aggregate_verdict(c, i, 3) == oracle_verdict(combo, 3), combo

    def test_odd_quorum_never_ties(self):
        # With an odd min_votes, any quorum-sized multiset settles.
        for min_votes in (1, 3, 5):
            for c in range(min_votes + 1):
                verdict = aggregate_verdict(c, min_votes - c, min_votes)
                assert verdict in (JUDGMENT_CORRECT, JUDGMENT_INCORRECT)

    def test_even_count_can_tie(self):
        assert aggregate_verdict(2, 2, 3) == JUDGMENT_PENDING

    def test_short_count_pends(self):
        assert aggregate_verdict(2, 0, 3) == JUDGMENT_PENDING
        assert aggregate_verdict(0, 0, 3) == JUDGMENT_PENDING


def make_tasks(n):
    return [EvalTask(f"seg{i:03d}@0", f"class {i % 3}") for i in range(n)]


class TestAssignment:
    def test_each_task_gets_min_votes_distinct_evaluators(self):
        tasks = make_tasks(17)
        queues = assign_tasks(tasks, EVALUATORS, min_votes=3, seed=0)
        holders = {t.segment_id: [] for t in tasks}
        for name, queue in queues.items():
            for task in queue:
                holders[task.segment_id].append(name)
        for sid, names in holders.items():
            assert len(names) == 3, sid
            assert len(set(names)) == 3, sid

    def test_load_spread_within_one(self):
        for n_tasks in (1, 5, 17, 40):
            for seed in (0, 1, 2):
                queues = assign_tasks(make_tasks(n_tasks), EVALUATORS,
                                      min_votes=3, seed=seed)
                loads = [len(q) for q in queues.values()]
                assert max(loads) - min(loads) <= 1, (n_tasks, seed)
                assert sum(loads) == 3 * n_tasks

    def test_deterministic_per_seed(self):
        tasks = make_tasks(12)
        a = assign_tasks(tasks, EVALUATORS, seed=7)
        b = assign_tasks(tasks, EVALUATORS, seed=7)
        assert a == b

    def test_seed_changes_tie_breaks(self):
        tasks = make_tasks(12)
        a = assign_tasks(tasks, EVALUATORS, seed=0)
        b = assign_tasks(tasks, EVALUATORS, seed=1)
        assert a != b

    def test_not_enough_evaluators(self):
        with pytest.raises(NotEnoughEvaluators):
            assign_tasks(make_tasks(3), ["alice", "bob"], min_votes=3)
        with pytest.raises(NotEnoughEvaluators):
            assign_tasks(make_tasks(3), ["alice", "alice", "alice"], min_votes=2)


class TestSelectEvaluationSet:
    def make_predictions(self):
        rows = []
        for c in range(3):
            for i in range(6):
                rows.append(PredictionRow(f"s{c}{i}@0", DatasetId.SYNTH,
                                          f"class {c}", 1.0 - i / 10))
        return rows

    def test_top_k_per_class(self):
        tasks = select_evaluation_set(self.make_predictions(), k_per_class=4)
        assert len(tasks) == 12
        by_label = {}
        for t in tasks:
            by_label.setdefault(t.predicted_label, []).append(t.segment_id)
        assert by_label["class 0"] == ["s00@0", "s01@0", "s02@0", "s03@0"]

    def test_deduplicates_shared_segments(self):
        rows = [
            PredictionRow("shared@0", DatasetId.SYNTH, "x", 0.9),
            PredictionRow("shared@0", DatasetId.ESC50, "dog", 0.8),
        ]
        tasks = select_evaluation_set(rows, k_per_class=5)
        assert len(tasks) == 1
        # esc50 sorts before synth, so the dog label claims the segment.
        assert tasks[0].predicted_label == "dog"

    def test_deterministic(self):
        rows = self.make_predictions()
        assert select_evaluation_set(rows) == select_evaluation_set(list(reversed(rows)))


class TestFeedbackBoard:
    def make_board(self, tmp_path, n_tasks=5):
        queues = assign_tasks(make_tasks(n_tasks), EVALUATORS, min_votes=3, seed=0)
        return FeedbackBoard(assignments=queues, log_path=tmp_path / "votes.jsonl")

    def vote_all(self, board, verdict_for):
        for name in EVALUATORS:
            while (task := board.next_task(name)) is not None:
                board.record_vote(task.segment_id, name, verdict_for(task), ts=0.0)

    def test_majority_settles_judgments(self, tmp_path):
        board = self.make_board(tmp_path)
        self.vote_all(board, lambda t: "correct")
        assert set(board.judgments().values()) == {JUDGMENT_CORRECT}
        assert board.human_gt() == board.judgments()

    def test_duplicate_vote_rejected(self, tmp_path):
        board = self.make_board(tmp_path)
        task = board.next_task("alice")
        board.record_vote(task.segment_id, "alice", "correct")
        with pytest.raises(DuplicateVote):
            board.record_vote(task.segment_id, "alice", "incorrect")
        # The first verdict stands.
        assert board.votes[(task.segment_id, "alice")].verdict == "correct"

    def test_unknown_assignment_rejected(self, tmp_path):
        board = self.make_board(tmp_path)
        with pytest.raises(UnknownAssignment):
            board.record_vote("nonexistent@0", "alice", "correct")
        with pytest.raises(UnknownAssignment):
            board.record_vote(make_tasks(1)[0].segment_id, "mallory", "correct")

    def test_bad_verdict_rejected(self, tmp_path):
        board = self.make_board(tmp_path)
        task = board.next_task("alice")
        with pytest.raises(ValueError):
            board.record_vote(task.segment_id, "alice", "maybe")

    def test_next_task_walks_queue_in_order(self, tmp_path):
        board = self.make_board(tmp_path)
        queue = board.assignments["alice"]
        seen = []
        while (task := board.next_task("alice")) is not None:
            seen.append(task)
            board.record_vote(task.segment_id, "alice", "correct")
        assert seen == queue
        assert board.next_task("alice") is None

    def test_log_replay_rebuilds_identical_state(self, tmp_path):
        board = self.make_board(tmp_path, n_tasks=7)
        # Mixed verdicts keyed on the segment number, some rounds unfinished.
        self.vote_all(board, lambda t: "correct" if t.segment_id < "seg004" else "incorrect")
        reborn = FeedbackBoard(assignments=board.assignments,
                               log_path=tmp_path / "votes.jsonl")
        assert reborn.votes == board.votes
        assert reborn.judgments() == board.judgments()
        assert reborn.tallies() == board.tallies()
        assert progress_summary(reborn) == progress_summary(board)

    def test_log_is_append_only_json_lines(self, tmp_path):
        board = self.make_board(tmp_path, n_tasks=2)
        task = board.next_task("alice")
        board.record_vote(task.segment_id, "alice", "correct", ts=1.5)
        lines = (tmp_path / "votes.jsonl").read_text().splitlines()
        assert len(lines) == 1
        row = json.loads(lines[0])
        assert row == {"segment_id": task.segment_id, "evaluator_id": "alice",
                       "verdict": "correct", "ts": 1.5}

    def test_corrupt_log_rejected(self, tmp_path):
        log = tmp_path / "votes.jsonl"
        log.write_text('{"segment_id": "a"}\n')
        with pytest.raises(CorruptFile):
            FeedbackBoard(assignments={}, log_path=log)
        log.write_text("not json\n")
        with pytest.raises(CorruptFile):
            load_votes(log)

    def test_progress_counts(self, tmp_path):
        board = self.make_board(tmp_path, n_tasks=5)
        task = board.next_task("alice")
        board.record_vote(task.segment_id, "alice", "correct")
        per = board.progress("alice")
        assert per.done == 1
        assert per.total == len(board.assignments["alice"])
        summary = progress_summary(board)
        assert summary["segments"] == 5
        assert summary["votes_cast"] == 1
        assert summary["votes_needed"] == 15
        assert summary["segments_judged"] == 0

    def test_memory_only_board(self):
        queues = assign_tasks(make_tasks(2), EVALUATORS, min_votes=3, seed=0)
        board = FeedbackBoard(assignments=queues, log_path=None)
        task = board.next_task("alice")
        board.record_vote(task.segment_id, "alice", "correct")
        assert board.progress("alice").done == 1


class TestOfflineVoteMath:
    def test_human_gt_from_votes_majority(self, tmp_path):
        board_path = tmp_path / "votes.jsonl"
        queues = assign_tasks(make_tasks(3), EVALUATORS, min_votes=3, seed=0)
        board = FeedbackBoard(assignments=queues, log_path=board_path)
        verdicts = {"seg000@0": ["correct", "correct", "incorrect"],
                    "seg001@0": ["incorrect", "incorrect", "incorrect"],
                    "seg002@0": ["correct"]}
        for name in EVALUATORS:
            while (task := board.next_task(name)) is not None:
                stack = verdicts[task.segment_id]
                if not stack:
                    break
                board.record_vote(task.segment_id, name, stack.pop(0), ts=0.0)
        gt = human_gt_from_votes(load_votes(board_path), min_votes=3)
        assert gt == {"seg000@0": JUDGMENT_CORRECT, "seg001@0": JUDGMENT_INCORRECT}

    def test_duplicate_pairs_in_log_count_once(self, tmp_path):
        from websed.feedback import VoteRecord
        votes = [VoteRecord("s@0", "alice", "correct", 0.0),
                 VoteRecord("s@0", "alice", "correct", 1.0),
                 VoteRecord("s@0", "alice", "correct", 2.0),
                 VoteRecord("s@0", "bob", "correct", 3.0)]
        # Three log rows from alice are one vote; quorum is not reached.
        assert human_gt_from_votes(votes, min_votes=3) == {}


class TestBoardFromPredictions:
    def test_end_to_end_wiring(self, tmp_path):
        rows = [PredictionRow(f"s{i}@0", DatasetId.SYNTH, "class a", 1.0 - i / 10)
                for i in range(6)]
        board = board_from_predictions(rows, EVALUATORS,
                                       log_path=tmp_path / "v.jsonl",
                                       k_per_class=4, min_votes=3, seed=0)
        assert board.task_count == 4
        assert board.predicted_label("s0@0") == "class a"
        with pytest.raises(UnknownAssignment):
            board.predicted_label("s5@0")
