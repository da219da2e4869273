"""HTTP facade for the human evaluation round.

Serves evaluator assignments, raw segment audio, vote submission and live
precision results. Task payloads carry only the segment id, the asserted
label and an audio URL: nothing that hints at the clip's origin, so the
vote is driven by listening alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .audio import SEGMENT_WINDOW, AudioClip, read_clip, wav_bytes
from .datasets import DatasetId
from .errors import DuplicateVote, UnknownAssignment, WebsedError
from .evaluation import (
    GtMode,
    PredictionRow,
    classifier_curve,
)
from .feedback import FeedbackBoard, progress_summary


@dataclass
class ServerState:
    """Everything one evaluation round needs behind the API."""
    board: FeedbackBoard
    predictions: list[PredictionRow]
    query_gt: dict[str, str]
    audio_paths: dict[str, Path] = field(default_factory=dict)
    audio_clips: dict[str, AudioClip] = field(default_factory=dict)
    k_grid: tuple[int, ...] = (1, 5, 10, 20, 40)

    def segment_audio(self, segment_id: str) -> np.ndarray | None:
        source_id, sep, start_text = segment_id.rpartition("@")
        if not sep or not start_text.isdigit():
            return None
        start = int(start_text)
        clip = self.audio_clips.get(source_id)
        if clip is None:
            path = self.audio_paths.get(source_id)
            if path is None:
                return None
            clip = read_clip(path, source_id)
            self.audio_clips[source_id] = clip
        window = clip.samples[start:start + SEGMENT_WINDOW]
        if window.shape[0] != SEGMENT_WINDOW:
            return None
        return window


class VoteBody(BaseModel):
    segment_id: str
    evaluator_id: str
    verdict: str


def create_app(state: ServerState) -> FastAPI:
    app = FastAPI(title="websed feedback service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.websed = state

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed request"})

    @app.get("/api/assignments")
    def next_assignment(evaluator: str):
        board = state.board
        if evaluator not in board.assignments:
            return JSONResponse(status_code=404,
                                content={"error": f"unknown evaluator {evaluator!r}"})
        progress = board.progress(evaluator)
        task = board.next_task(evaluator)
        if task is None:
            return {
                "done": True,
                "progress": {"done": progress.done, "total": progress.total},
            }
        return {
            "done": False,
            "segment_id": task.segment_id,
            "predicted_label": task.predicted_label,
            "audio_url": f"/api/segments/{task.segment_id}/audio",
            "progress": {"done": progress.done, "total": progress.total},
        }

    @app.get("/api/segments/{segment_id}/audio")
    def segment_audio(segment_id: str):
        window = state.segment_audio(segment_id)
        if window is None:
            return JSONResponse(status_code=404,
                                content={"error": f"unknown segment {segment_id!r}"})
        return Response(content=wav_bytes(window), media_type="audio/wav")

    @app.post("/api/votes", status_code=201)
    def submit_vote(body: VoteBody):
        if body.verdict not in ("correct", "incorrect"):
            return JSONResponse(status_code=400,
                                content={"error": "verdict must be correct|incorrect"})
        try:
            record = state.board.record_vote(body.segment_id, body.evaluator_id,
                                             body.verdict)
        except UnknownAssignment as exc:
            return JSONResponse(status_code=404, content={"error": str(exc)})
        except DuplicateVote as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        progress = state.board.progress(body.evaluator_id)
        return {
            "recorded": True,
            "segment_id": record.segment_id,
            "progress": {"done": progress.done, "total": progress.total},
        }

    @app.get("/api/progress")
    def progress():
        return progress_summary(state.board)

    @app.get("/api/results/precision")
    def precision(gt: str = "query", classifier: str | None = None,
                  kmax: int | None = None):
        try:
            mode = GtMode(gt)
        except ValueError:
            return JSONResponse(status_code=400,
                                content={"error": "gt must be query|human"})
        ks = [k for k in state.k_grid if kmax is None or k <= kmax]
        if not ks:
            return JSONResponse(status_code=400,
                                content={"error": f"kmax below smallest k {state.k_grid[0]}"})
        if mode is GtMode.QUERY:
            gt_map = state.query_gt
        else:
            gt_map = state.board.human_gt()

        rows = state.predictions
        if classifier is not None:
            try:
                wanted = DatasetId(classifier)
            except ValueError:
                return JSONResponse(status_code=400,
                                    content={"error": f"unknown classifier {classifier!r}"})
            rows = [p for p in rows if p.classifier == wanted]
            if not rows:
                return JSONResponse(status_code=404,
                                    content={"error": f"no predictions for {classifier!r}"})

        # Human mode can only score segments with settled verdicts.
        if mode is GtMode.HUMAN:
            rows = [p for p in rows if p.segment_id in gt_map]

        classes = sorted({p.predicted_class for p in rows})
        try:
            curve = classifier_curve(rows, gt_map, classes, ks, mode,
                                     classifier=classifier or "all")
        except WebsedError as exc:
            return JSONResponse(status_code=500, content={"error": str(exc)})
        return {
            "gt_mode": mode.value,
            "classifier": classifier or "all",
            "points": [{"k": k, "precision": p} for k, p in curve.points],
        }

    return app
