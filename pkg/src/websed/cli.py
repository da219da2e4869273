"""Command line pipeline driver.

Subcommands cover the whole loop: fixture, split, crawl, featurize, train,
predict, rank, evaluate, serve, and run (fixture pipeline end to end).
Every artifact starts with a `# config_hash=...` line so outputs can be
matched to the settings that produced them. Failures print one JSON line
on stderr and exit with a code that identifies the error family:
2 bad config, 3 missing input, 4 bad data, 5 other pipeline error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import traceback
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import audio as audio_mod
from . import crawl as crawl_mod
from .cnn import load_model, predict_segments, save_model, train
from .config import PipelineConfig, load_config
from .datasets import (
    DatasetId,
    Split,
    builtin_vocabulary,
    load_manifest,
    read_split_csv,
    split_dataset,
    write_split_csv,
)
from .errors import (
    BadConfig,
    MissingFile,
    MissingInput,
    WebsedError,
)
from .evaluation import (
    GtMode,
    LabeledClip,
    PredictionRow,
    class_count_weights,
    class_curve,
    classifier_curve,
    corpus_precision,
    read_predictions_csv,
    read_query_gt_csv,
    measure_accuracy,
    weighted_average_curve,
    write_curve_csv,
    write_predictions_csv,
    write_query_gt_csv,
)
from .features import (
    FeatureConfig,
    ChannelStats,
    channel_stats,
    load_patch_cache,
    normalize,
    segment_patch,
)
from .feedback import board_from_predictions, human_gt_from_votes, load_votes
from .fixtures import TOY_CNN, TOY_TRAIN, write_corpus

log = logging.getLogger("websed")

EXIT_BAD_CONFIG = 2
EXIT_MISSING_INPUT = 3
EXIT_BAD_DATA = 4
EXIT_PIPELINE = 5

TRAINING_LOG_HEADER = ["epoch", "train_loss", "val_acc"]
RANKINGS_HEADER = ["classifier", "class", "rank", "segment_id", "confidence"]
SPLIT_CACHES = {Split.TRAIN: "train", Split.VAL: "val", Split.TEST: "test"}


def source_of(segment_id: str) -> str:
    """clip id carried inside a segment id of the form "<clip>@<start>"."""
    source, sep, _ = segment_id.rpartition("@")
    return source if sep else segment_id


def _stamp(cfg: PipelineConfig) -> str:
    return f"config_hash={cfg.hash()}"


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise MissingInput(f"{path} not found; run `websed {hint}` first")
    return path


def _thread_count(cfg: PipelineConfig) -> int:
    n = int(cfg["threads"])
    return n if n > 0 else (os.cpu_count() or 1)


# -- subcommand cores ----------------------------------------------------------

def do_fixture(out_dir: Path, clips_per_class: int, seed: int,
               crawl_dir: Path | None) -> Path:
    manifest = write_corpus(out_dir, clips_per_class=clips_per_class, seed=seed)
    print(f"wrote {manifest}")
    if crawl_dir is not None:
        from .fixtures import write_crawl_corpus
        write_crawl_corpus(crawl_dir, seed=seed)
        print(f"wrote crawl corpus under {crawl_dir}")
    return manifest


def do_split(cfg: PipelineConfig) -> Path:
    entries = load_manifest(_require(cfg.path("manifest"), "fixture"))
    assignments = split_dataset(entries, seed=cfg.seed)
    out_dir = cfg.path("out_dir")
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "splits.csv"
    write_split_csv(assignments, out, comment=_stamp(cfg))
    counts = {s.value: 0 for s in Split}
    for a in assignments:
        counts[a.split.value] += 1
    print(f"wrote {out} ({counts})")
    return out


def do_crawl(cfg: PipelineConfig, source: str | None, manifest_url: str | None,
             limit: int) -> Path:
    if (source is None) == (manifest_url is None):
        raise BadConfig("crawl needs exactly one of --source or --manifest-url")
    if source is not None:
        fetcher = crawl_mod.LocalDirectoryFetcher(source)
    else:
        fetcher = crawl_mod.HttpManifestFetcher(manifest_url)
    vocab = builtin_vocabulary(DatasetId(cfg.dataset))
    queries = crawl_mod.build_queries(vocab)
    out_dir = cfg.path("out_dir") / "crawl"
    videos = crawl_mod.crawl(queries, fetcher, limit_per_query=limit,
                             out_dir=out_dir)
    print(f"kept {len(videos)} videos under {out_dir}")
    return out_dir / "inventory.csv"


def _featurize_one(task, fcfg: FeatureConfig):
    """Decode one clip and cut it into per-segment feature patches."""
    clip_id, path, label = task
    clip = audio_mod.decode_and_canonicalize(path, fcfg.sample_rate, clip_id)
    segments = audio_mod.segment_clip(clip, fcfg.segment_window_samples,
                                      fcfg.segment_stride_samples)
    patches = [
        segment_patch(audio_mod.segment_samples(clip, seg), fcfg, seg.segment_id)
        for seg in segments
    ]
    return clip_id, label, patches


def _run_featurize_tasks(tasks, fcfg: FeatureConfig, threads: int):
    if threads <= 1:
        return [_featurize_one(t, fcfg) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: _featurize_one(t, fcfg), tasks))


def do_featurize(cfg: PipelineConfig, inventory: str | None = None) -> Path:
    fcfg = cfg.feature_config()
    out_dir = cfg.path("out_dir")
    feat_dir = out_dir / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)
    threads = _thread_count(cfg)

    if inventory is None:
        manifest_path = _require(cfg.path("manifest"), "fixture")
        entries = load_manifest(manifest_path)
        split_of = {a.clip_id: a.split
                    for a in read_split_csv(_require(out_dir / "splits.csv", "split"))}
        missing = [e.clip_id for e in entries if e.clip_id not in split_of]
        if missing:
            raise MissingInput(f"splits.csv lacks {len(missing)} clips, e.g. {missing[0]!r}")
        tasks = []
        for e in entries:
            path = Path(e.file_path)
            if not path.is_absolute():
                path = manifest_path.parent / path
            tasks.append((e.clip_id, path, e.label))
        results = _run_featurize_tasks(tasks, fcfg, threads)

        buckets: dict[Split, list] = {s: [] for s in Split}
        gt: dict[str, str] = {}
        for clip_id, label, patches in results:
            buckets[split_of[clip_id]].extend(patches)
            for p in patches:
                gt[p.segment_id] = label
        stats = channel_stats(buckets[Split.TRAIN])
        for split, name in SPLIT_CACHES.items():
            normalized = normalize(buckets[split], stats)
            _save_cache(feat_dir / name, normalized, fcfg)
        stats_path = feat_dir / "stats.json"
        stats_path.write_text(json.dumps({**stats.to_dict(),
                                          "config_hash": cfg.hash()}, indent=2))
        write_query_gt_csv(gt, out_dir / "query_gt.csv", comment=_stamp(cfg))
        total = sum(len(b) for b in buckets.values())
        print(f"wrote {total} patches to {feat_dir} "
              f"({', '.join(f'{SPLIT_CACHES[s]}={len(buckets[s])}' for s in Split)})")
        return feat_dir

    videos = crawl_mod.read_inventory(inventory)
    stats_path = _require(feat_dir / "stats.json", "featurize")
    stats = ChannelStats.from_dict(json.loads(stats_path.read_text()))
    tasks = [(v.video_id, Path(v.audio_path), crawl_mod.query_ground_truth(v))
             for v in videos]
    results = _run_featurize_tasks(tasks, fcfg, threads)
    patches, gt = [], {}
    for _, label, clip_patches in results:
        patches.extend(clip_patches)
        for p in clip_patches:
            gt[p.segment_id] = label
    _save_cache(feat_dir / "crawl", normalize(patches, stats), fcfg)
    write_query_gt_csv(gt, out_dir / "query_gt.csv", comment=_stamp(cfg))
    print(f"wrote {len(patches)} patches to {feat_dir / 'crawl'}.f32")
    return feat_dir


def _save_cache(prefix: Path, patches, fcfg: FeatureConfig) -> None:
    from .features import save_patch_cache
    save_patch_cache(prefix, patches, fcfg)


def do_train(cfg: PipelineConfig) -> Path:
    out_dir = cfg.path("out_dir")
    feat_dir = out_dir / "features"
    fcfg = cfg.feature_config()
    manifest_path = _require(cfg.path("manifest"), "fixture")
    label_of = {e.clip_id: e.label for e in load_manifest(manifest_path)}

    train_patches, _ = load_patch_cache(_require_cache(feat_dir, "train"), fcfg)
    val_patches, _ = load_patch_cache(_require_cache(feat_dir, "val"), fcfg)
    stats = ChannelStats.from_dict(
        json.loads(_require(feat_dir / "stats.json", "featurize").read_text()))

    vocab = builtin_vocabulary(DatasetId(cfg.dataset))
    train_set = [(p, label_of[source_of(p.segment_id)]) for p in train_patches]
    val_set = [(p, label_of[source_of(p.segment_id)]) for p in val_patches]

    result = train(train_set, val_set, cfg.train_config(),
                   cfg.cnn_config(vocab.class_count), vocab, stats)

    model_dir = cfg.path("model_dir")
    model_dir.mkdir(parents=True, exist_ok=True)
    model_path = model_dir / f"{cfg.dataset}.wsed"
    save_model(result.model, model_path)

    log_path = out_dir / "training_log.csv"
    with open(log_path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {_stamp(cfg)}\n")
        writer = csv.writer(fh)
        writer.writerow(TRAINING_LOG_HEADER)
        for row in result.log:
            writer.writerow([row["epoch"], f"{row['train_loss']:.6f}",
                             f"{row['val_acc']:.6f}"])
    best = max(row["val_acc"] for row in result.log)
    print(f"wrote {model_path} (best val_acc {best:.3f}) and {log_path}")
    return model_path


def _require_cache(feat_dir: Path, name: str) -> Path:
    _require(feat_dir / f"{name}.f32", "featurize")
    _require(feat_dir / f"{name}.json", "featurize")
    return feat_dir / name


def do_predict(cfg: PipelineConfig, model_path: str | None, cache: str) -> Path:
    out_dir = cfg.path("out_dir")
    path = Path(model_path) if model_path else cfg.path("model_dir") / f"{cfg.dataset}.wsed"
    model = load_model(_require(path, "train"))
    patches, _ = load_patch_cache(_require_cache(out_dir / "features", cache),
                                  cfg.feature_config())
    preds = predict_segments(model, patches)
    rows = [
        PredictionRow(p.segment_id, model.vocabulary.dataset_id,
                      p.predicted_class, p.confidence)
        for p in preds
    ]
    out = out_dir / "predictions.csv"
    write_predictions_csv(rows, out, comment=_stamp(cfg))
    print(f"wrote {len(rows)} predictions to {out}")
    return out


def do_rank(cfg: PipelineConfig, predictions: str | None, kmax: int | None) -> Path:
    from .evaluation import rank_segments

    out_dir = cfg.path("out_dir")
    pred_path = Path(predictions) if predictions else out_dir / "predictions.csv"
    rows = read_predictions_csv(_require(pred_path, "predict"))
    k = kmax if kmax is not None else cfg.k_per_class
    out = out_dir / "rankings.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# {_stamp(cfg)}\n")
        writer = csv.writer(fh)
        writer.writerow(RANKINGS_HEADER)
        for classifier in sorted({r.classifier for r in rows}):
            subset = [r for r in rows if r.classifier == classifier]
            conf = {r.segment_id: r.confidence for r in subset}
            for label in sorted({r.predicted_class for r in subset}):
                for rank, seg in enumerate(rank_segments(subset, label, k), start=1):
                    writer.writerow([classifier.value, label, rank, seg,
                                     f"{conf[seg]:.9f}"])
    print(f"wrote {out}")
    return out


def do_evaluate(cfg: PipelineConfig, gt_mode: GtMode, kmax: int | None,
                predictions: str | None, votes: str | None) -> list[Path]:
    out_dir = cfg.path("out_dir")
    pred_path = Path(predictions) if predictions else out_dir / "predictions.csv"
    rows = read_predictions_csv(_require(pred_path, "predict"))

    if gt_mode is GtMode.QUERY:
        gt = read_query_gt_csv(_require(out_dir / "query_gt.csv", "featurize"))
    else:
        vote_path = Path(votes) if votes else out_dir / "votes.jsonl"
        gt = dict(human_gt_from_votes(load_votes(_require(vote_path, "serve")),
                                      cfg.min_votes))
        rows = [r for r in rows if r.segment_id in gt]

    ks = [k for k in cfg.k_grid if kmax is None or k <= kmax]
    if not ks:
        raise BadConfig(f"kmax {kmax} is below the smallest configured k")

    per_class, summary = [], []
    by_classifier: dict[DatasetId, list[PredictionRow]] = {}
    for r in rows:
        by_classifier.setdefault(r.classifier, []).append(r)

    weights, macro_curves = [], []
    for classifier in sorted(by_classifier):
        subset = by_classifier[classifier]
        classes = sorted({r.predicted_class for r in subset})
        for label in classes:
            curve = class_curve(subset, gt, label, ks, gt_mode)
            per_class.append(
                type(curve)(points=curve.points, gt_mode=gt_mode,
                            classifier=f"{classifier.value}:{label}"))
        macro = classifier_curve(subset, gt, classes, ks, gt_mode,
                                 classifier=classifier.value)
        macro_curves.append(macro)
        summary.append(macro)
        weights.append(builtin_vocabulary(classifier).class_count)

    if macro_curves:
        summary.append(weighted_average_curve(macro_curves,
                                              class_count_weights(weights)))

    tag = gt_mode.value
    paths = [out_dir / f"curves_per_class_{tag}.csv",
             out_dir / f"curves_summary_{tag}.csv"]
    write_curve_csv(per_class, paths[0], comment=_stamp(cfg))
    write_curve_csv(summary, paths[1], comment=_stamp(cfg))

    if gt_mode is GtMode.QUERY:
        cp = corpus_precision(rows, gt)
        cp_path = out_dir / "corpus_precision.csv"
        with open(cp_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# {_stamp(cfg)}\n")
            writer = csv.writer(fh)
            writer.writerow(["classifier", "precision"])
            for ds in sorted(cp):
                writer.writerow([ds.value, f"{cp[ds]:.9f}"])
        paths.append(cp_path)

    for p in paths:
        print(f"wrote {p}")
    return paths


def build_demo_state(cfg: PipelineConfig, demo_dir: Path, clips_per_class: int = 4,
                     wrong_rate: float = 0.2):
    """Small self-contained evaluation round over freshly synthesized tones.

    Predictions are the true label most of the time with seeded mistakes, so
    human votes have something to disagree with.
    """
    from .server import ServerState

    manifest_path = write_corpus(demo_dir, clips_per_class=clips_per_class,
                                 seed=cfg.seed)
    entries = load_manifest(manifest_path)
    vocab = builtin_vocabulary(DatasetId.SYNTH)
    rng = np.random.default_rng(cfg.seed)

    rows, gt, audio_paths = [], {}, {}
    for e in entries:
        path = manifest_path.parent / e.file_path
        audio_paths[e.clip_id] = path
        clip = audio_mod.read_clip(path, e.clip_id)
        for seg in audio_mod.segment_clip(clip):
            gt[seg.segment_id] = e.label
            if rng.random() < wrong_rate:
                others = [l for l in vocab.labels if l != e.label]
                label = others[int(rng.integers(len(others)))]
            else:
                label = e.label
            rows.append(PredictionRow(seg.segment_id, DatasetId.SYNTH, label,
                                      float(rng.uniform(0.4, 1.0))))

    board = board_from_predictions(rows, cfg.evaluators,
                                   log_path=demo_dir / "votes.jsonl",
                                   k_per_class=cfg.k_per_class,
                                   min_votes=cfg.min_votes, seed=cfg.seed)
    return ServerState(board=board, predictions=rows, query_gt=gt,
                       audio_paths=audio_paths, k_grid=cfg.k_grid)


def build_serve_state(cfg: PipelineConfig, predictions: str | None,
                      inventory: str | None):
    from .server import ServerState

    out_dir = cfg.path("out_dir")
    pred_path = Path(predictions) if predictions else out_dir / "predictions.csv"
    rows = read_predictions_csv(_require(pred_path, "predict"))
    gt = read_query_gt_csv(_require(out_dir / "query_gt.csv", "featurize"))

    audio_paths: dict[str, Path] = {}
    if inventory is not None:
        for v in crawl_mod.read_inventory(inventory):
            audio_paths[v.video_id] = Path(v.audio_path)
    else:
        manifest_path = _require(cfg.path("manifest"), "fixture")
        for e in load_manifest(manifest_path):
            path = Path(e.file_path)
            if not path.is_absolute():
                path = manifest_path.parent / path
            audio_paths[e.clip_id] = path

    board = board_from_predictions(rows, cfg.evaluators,
                                   log_path=out_dir / "votes.jsonl",
                                   k_per_class=cfg.k_per_class,
                                   min_votes=cfg.min_votes, seed=cfg.seed)
    return ServerState(board=board, predictions=rows, query_gt=gt,
                       audio_paths=audio_paths, k_grid=cfg.k_grid)


def do_serve(cfg: PipelineConfig, port: int | None, demo: bool,
             predictions: str | None, inventory: str | None) -> int:
    import uvicorn

    from .server import create_app

    if demo:
        demo_dir = cfg.path("out_dir") / "demo"
        state = build_demo_state(cfg, demo_dir)
    else:
        state = build_serve_state(cfg, predictions, inventory)
    app = create_app(state)
    host = str(cfg["serve"]["host"])
    use_port = port if port is not None else int(cfg["serve"]["port"])
    print(f"serving {state.board.task_count} tasks on http://{host}:{use_port}")
    uvicorn.run(app, host=host, port=use_port, log_level="warning")
    return 0


def do_run(cfg: PipelineConfig) -> int:
    """Fixture pipeline end to end: data, split, features, train, evaluate."""
    out_dir = cfg.path("out_dir")
    manifest = cfg.path("manifest")
    if not manifest.exists():
        do_fixture(manifest.parent, clips_per_class=60, seed=cfg.seed,
                   crawl_dir=None)
    do_split(cfg)
    do_featurize(cfg)
    do_train(cfg)
    do_predict(cfg, model_path=None, cache="test")
    do_evaluate(cfg, GtMode.QUERY, kmax=None, predictions=None, votes=None)

    # Clip-level score on the held-out split, for the console summary.
    fcfg = cfg.feature_config()
    label_of = {e.clip_id: e.label for e in load_manifest(manifest)}
    patches, _ = load_patch_cache(out_dir / "features" / "test", fcfg)
    by_clip: dict[str, LabeledClip] = {}
    for p in patches:
        clip_id = source_of(p.segment_id)
        by_clip.setdefault(clip_id,
                           LabeledClip(clip_id, label_of[clip_id], [])).patches.append(p)
    model = load_model(cfg.path("model_dir") / f"{cfg.dataset}.wsed")
    report = measure_accuracy(model, list(by_clip.values()))
    print(f"test accuracy: patch {report.patch_level:.3f} "
          f"clip {report.clip_level:.3f}")
    return 0


# -- argument parsing ----------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--dataset", choices=[d.value for d in DatasetId])
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--model-dir", dest="model_dir")
    p.add_argument("--manifest")


def _config_from(args: argparse.Namespace) -> PipelineConfig:
    flags = {key: getattr(args, key, None)
             for key in ("dataset", "seed", "threads", "out_dir", "model_dir",
                         "manifest")}
    return load_config(getattr(args, "config", None), flags)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="websed",
        description="Crawl web audio, classify sound events, collect human feedback.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fixture", help="generate the bundled synthetic tone corpus")
    p.add_argument("--out", default="data", help="corpus directory")
    p.add_argument("--clips-per-class", type=int, default=60)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--crawl-dir", help="also write a folder-per-query crawl corpus")
    p.set_defaults(func=lambda a: (do_fixture(Path(a.out), a.clips_per_class,
                                              a.seed,
                                              Path(a.crawl_dir) if a.crawl_dir else None),
                                   0)[1])

    p = sub.add_parser("split", help="stratified train/val/test assignment")
    _add_common(p)
    p.set_defaults(func=lambda a: (do_split(_config_from(a)), 0)[1])

    p = sub.add_parser("crawl", help="fetch and filter candidate audio for each label")
    _add_common(p)
    p.add_argument("--source", help="local folder-per-query corpus root")
    p.add_argument("--manifest-url", help="JSON manifest of fetchable audio")
    p.add_argument("--limit", type=int, default=20, help="max results per query")
    p.set_defaults(func=lambda a: (do_crawl(_config_from(a), a.source,
                                            a.manifest_url, a.limit), 0)[1])

    p = sub.add_parser("featurize", help="decode, segment, and extract feature patches")
    _add_common(p)
    p.add_argument("--inventory", help="featurize a crawl inventory instead of the manifest")
    p.set_defaults(func=lambda a: (do_featurize(_config_from(a), a.inventory), 0)[1])

    p = sub.add_parser("train", help="train the classifier on cached features")
    _add_common(p)
    p.set_defaults(func=lambda a: (do_train(_config_from(a)), 0)[1])

    p = sub.add_parser("predict", help="score cached patches with a trained model")
    _add_common(p)
    p.add_argument("--model", help="model file (default <model_dir>/<dataset>.wsed)")
    p.add_argument("--cache", default="test", help="feature cache name to score")
    p.set_defaults(func=lambda a: (do_predict(_config_from(a), a.model, a.cache), 0)[1])

    p = sub.add_parser("rank", help="top segments per predicted class")
    _add_common(p)
    p.add_argument("--predictions", help="predictions CSV (default <out_dir>/predictions.csv)")
    p.add_argument("--kmax", type=int)
    p.set_defaults(func=lambda a: (do_rank(_config_from(a), a.predictions, a.kmax), 0)[1])

    p = sub.add_parser("evaluate", help="precision curves against a ground truth")
    _add_common(p)
    p.add_argument("--gt", choices=["query", "human"], default="query")
    p.add_argument("--kmax", type=int)
    p.add_argument("--predictions")
    p.add_argument("--votes", help="vote log for --gt human")
    p.set_defaults(func=lambda a: (do_evaluate(_config_from(a), GtMode(a.gt),
                                               a.kmax, a.predictions, a.votes), 0)[1])

    p = sub.add_parser("serve", help="run the human evaluation service")
    _add_common(p)
    p.add_argument("--port", type=int)
    p.add_argument("--demo", action="store_true",
                   help="serve a self-contained synthetic round")
    p.add_argument("--predictions")
    p.add_argument("--inventory", help="crawl inventory supplying segment audio")
    p.set_defaults(func=lambda a: do_serve(_config_from(a), a.port, a.demo,
                                           a.predictions, a.inventory))

    p = sub.add_parser("run", help="full pipeline on the bundled fixture")
    _add_common(p)
    p.set_defaults(func=lambda a: do_run(_run_config(a)))

    return parser


def _run_config(args: argparse.Namespace) -> PipelineConfig:
    """Config for `run`: fixture-friendly model defaults unless overridden."""
    cfg = _config_from(args)
    if cfg.dataset == DatasetId.SYNTH.value:
        if not cfg.values["cnn"]:
            cfg.values["cnn"] = dict(TOY_CNN)
        if not cfg.values["train"]:
            cfg.values["train"] = dict(TOY_TRAIN)
    return cfg


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except BadConfig as exc:
        return _fail(exc, EXIT_BAD_CONFIG)
    except (MissingInput, MissingFile) as exc:
        return _fail(exc, EXIT_MISSING_INPUT)
    except WebsedError as exc:
        code = EXIT_PIPELINE if type(exc) is WebsedError else EXIT_BAD_DATA
        return _fail(exc, code)
    except Exception as exc:  # pragma: no cover - defensive
        traceback.print_exc()
        return _fail(exc, 1)


def _fail(exc: Exception, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
