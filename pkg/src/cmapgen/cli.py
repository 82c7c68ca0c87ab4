"""Command-line surface.

Exit codes: 0 ok, 1 usage error, 2 data/validation error, 3 numeric fault.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .annotate import chunk_heuristic, load_annotations, save_annotations
from .autodiff import NumericFault
from .corpus import load_corpus, save_corpus, split_corpus, save_embeddings, \
    load_embeddings
from .errors import CmapError, DataError, UsageError
from .experiments import run_label_efficiency, run_seed_repeats, \
    run_size_distribution, label_efficiency_csv, size_distribution_csv, \
    DEFAULT_PROPORTIONS, DEFAULT_MAX_SIZES, DEFAULT_SEEDS
from .export import export_dot, export_json
from .graphs import build_initial_graph, build_textrank_graph, \
    build_cooccurrence_graph
from .pipeline import annotations_for, load_config, prepare, save_checkpoint, \
    load_checkpoint
from .synth import SynthSpec, generate_synthetic
from .trainer import TrainConfig, evaluate, train, _forward
from .translator import assemble_graph
from .verification import pipeline_grad_check, primitive_grad_checks

log = logging.getLogger("cmapgen")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for interface compatibility; runs are "
                        "single-threaded for determinism")
    p.add_argument("--log-level", default="INFO")


def build_parser():
    parser = _Parser(prog="cmapgen",
                     description="Concept-map generation from documents")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus and emit splits")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--out", required=True, help="validated corpus JSONL")
    p.add_argument("--splits-out")
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    _add_common(p)

    p = sub.add_parser("annotate", help="produce AnnotationSet JSONL")
    p.add_argument("--in", dest="path", required=True)
    p.add_argument("--out", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--heuristic", action="store_true")
    group.add_argument("--from", dest="from_file",
                       help="validate and re-emit an existing annotation file")
    _add_common(p)

    p = sub.add_parser("build-graphs", help="emit one concept graph per doc")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations")
    p.add_argument("--method", choices=("init", "textrank", "cooc"),
                   default="init")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("train")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--config")
    p.add_argument("--variant", choices=("neigh", "path", "init", "var"))
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("generate", help="translate docs with a checkpoint")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--format", choices=("dot", "json"), default="json")
    p.add_argument("--threshold", type=float, default=0.5)
    _add_common(p)

    p = sub.add_parser("evaluate")
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--checkpoint", required=True)
    _add_common(p)

    p = sub.add_parser("experiment")
    p.add_argument("protocol",
                   choices=("label-efficiency", "size-dist", "seed-repeats"))
    p.add_argument("--corpus", required=True)
    p.add_argument("--annotations")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--config")
    p.add_argument("--variant", choices=("neigh", "path", "init", "var"))
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("synth", help="generate a planted-signature corpus")
    p.add_argument("--spec", help="JSON file of generator settings")
    p.add_argument("--out-dir", required=True)
    _add_common(p)

    p = sub.add_parser("gradcheck", help="finite-difference gradient suite")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--tolerance", type=float, default=1e-4)
    _add_common(p)

    return parser


def _load_cfg(args):
    overrides = {"variant": getattr(args, "variant", None),
                 "seed": getattr(args, "seed", None)}
    if getattr(args, "config", None):
        return load_config(args.config, **overrides)
    from .pipeline import parse_config
    return parse_config("", **overrides)


def _load_inputs(args, cfg):
    corpus = load_corpus(args.corpus)
    anns = annotations_for(corpus, args.annotations)
    emb = load_embeddings(args.embeddings, cfg.embedding_dim)
    graphs, features = prepare(corpus, anns, emb, cfg.window)
    return corpus, anns, emb, graphs, features


def _splits_for(corpus, cfg):
    return split_corpus(corpus, (0.8, 0.1, 0.1), cfg.seed)


def cmd_ingest(args):
    corpus = load_corpus(args.path)
    save_corpus(corpus, args.out)
    if args.splits_out:
        ratios = tuple(float(x) for x in args.ratios.split(","))
        splits = split_corpus(corpus, ratios, args.seed)
        with open(args.splits_out, "w", encoding="utf-8") as fh:
            fh.write(splits.to_json())
    print(f"ingested {len(corpus)} docs, {corpus.num_classes} classes")
    return 0


def cmd_annotate(args):
    corpus = load_corpus(args.path)
    if args.from_file:
        anns = load_annotations(args.from_file)
        missing = [d.id for d in corpus.documents if d.id not in anns]
        if missing:
            raise DataError(f"annotations missing for docs: {missing[:5]}")
        ordered = [anns[d.id] for d in corpus.documents]
    else:
        ordered = [chunk_heuristic(d.text, d.id) for d in corpus.documents]
    save_annotations(ordered, args.out)
    print(f"annotated {len(ordered)} docs -> {args.out}")
    return 0


def cmd_build_graphs(args):
    corpus = load_corpus(args.corpus)
    anns = annotations_for(corpus, args.annotations)
    with open(args.out, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            ann = anns[doc.id]
            if args.method == "init":
                graph = build_initial_graph(ann, args.window)
            elif args.method == "textrank":
                graph = build_textrank_graph(ann, args.window, args.top_n,
                                             args.damping)
            else:
                graph = build_cooccurrence_graph(None, ann, args.top_n)
            fh.write(json.dumps({"doc_id": doc.id,
                                 "graph": json.loads(export_json(graph))})
                     + "\n")
    print(f"built {len(corpus)} graphs ({args.method}) -> {args.out}")
    return 0


def cmd_train(args):
    cfg = _load_cfg(args)
    corpus, _, _, graphs, features = _load_inputs(args, cfg)
    splits = _splits_for(corpus, cfg)
    params, report = train(corpus, splits, graphs, features, cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    save_checkpoint(os.path.join(args.out_dir, "checkpoint.json"), params, cfg,
                    {"num_classes": corpus.num_classes,
                     "feature_dim": features[0].shape[1]})
    with open(os.path.join(args.out_dir, "report.json"), "w",
              encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    print(f"best valid acc {report.best_valid_accuracy:.4f} "
          f"(epoch {report.best_epoch}); test acc {report.test_accuracy:.4f}")
    return 0


def cmd_generate(args):
    params, cfg, meta = load_checkpoint(args.checkpoint)
    corpus, _, _, graphs, features = _load_inputs(args, cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    run_report = []
    for idx, doc in enumerate(corpus.documents):
        _, _, tg, _ = _forward(idx, corpus, graphs, features, params, cfg,
                               tau=cfg.tau_min, mode="eval", rng=None)
        if cfg.variant == "init" or tg is None:
            out_graph = graphs[idx]
            entry = {"doc_id": doc.id, "size": len(out_graph.nodes),
                     "eos_step": -1, "forced_selection": False}
        else:
            out_graph = assemble_graph(tg, graphs[idx], args.threshold)
            entry = {"doc_id": doc.id, "size": tg.size, "eos_step": tg.eos_step,
                     "forced_selection": tg.forced_selection,
                     "edgeless": not out_graph.edges}
        text = export_dot(out_graph) if args.format == "dot" \
            else export_json(out_graph)
        path = os.path.join(args.out_dir, f"{doc.id}.{args.format}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        run_report.append(entry)
    with open(os.path.join(args.out_dir, "run_report.json"), "w",
              encoding="utf-8") as fh:
        json.dump(run_report, fh, indent=2)
    print(f"generated {len(run_report)} graphs -> {args.out_dir}")
    return 0


def cmd_evaluate(args):
    params, cfg, meta = load_checkpoint(args.checkpoint)
    corpus, _, _, graphs, features = _load_inputs(args, cfg)
    splits = _splits_for(corpus, cfg)
    acc = evaluate(params, corpus, splits.test, graphs, features, cfg)
    print(f"test accuracy {acc:.4f}")
    return 0


def cmd_experiment(args):
    cfg = _load_cfg(args)
    corpus, _, _, graphs, features = _load_inputs(args, cfg)
    splits = _splits_for(corpus, cfg)
    os.makedirs(args.out_dir, exist_ok=True)
    if args.protocol == "seed-repeats":
        result = run_seed_repeats(corpus, splits, graphs, features, cfg,
                                  DEFAULT_SEEDS)
        with open(os.path.join(args.out_dir, "seed_repeats.json"), "w",
                  encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(result), fh, indent=2)
        print(f"accuracy {result.mean:.4f} +/- {result.std:.4f}")
    elif args.protocol == "label-efficiency":
        points = run_label_efficiency(corpus, splits, graphs, features, cfg,
                                      DEFAULT_PROPORTIONS)
        with open(os.path.join(args.out_dir, "label_efficiency.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write(label_efficiency_csv(points))
        print(f"wrote {len(points)} points")
    else:
        results = run_size_distribution(corpus, splits, graphs, features, cfg,
                                        DEFAULT_MAX_SIZES)
        with open(os.path.join(args.out_dir, "size_distribution.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write(size_distribution_csv(results))
        for dist in results:
            print(f"max_size {dist.max_size}: sizes std {dist.std:.3f}")
    return 0


def cmd_synth(args):
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = SynthSpec.from_json(fh.read())
    else:
        spec = SynthSpec(seed=args.seed)
    corpus, gold, emb = generate_synthetic(spec)
    os.makedirs(args.out_dir, exist_ok=True)
    save_corpus(corpus, os.path.join(args.out_dir, "corpus.jsonl"))
    save_embeddings(emb, os.path.join(args.out_dir, "embeddings.txt"))
    with open(os.path.join(args.out_dir, "gold.json"), "w",
              encoding="utf-8") as fh:
        json.dump(gold, fh, indent=2, sort_keys=True)
    print(f"wrote {len(corpus)} docs to {args.out_dir}")
    return 0


def cmd_gradcheck(args):
    failures = 0
    for name, report in primitive_grad_checks(args.epsilon,
                                              args.tolerance).items():
        status = "ok" if report.ok else "FAIL"
        print(f"primitive {name:16s} max rel err {report.max_rel_err:.2e} "
              f"{status}")
        failures += 0 if report.ok else 1
    for variant in ("neigh", "path"):
        report = pipeline_grad_check(variant=variant, epsilon=args.epsilon,
                                     tolerance=args.tolerance)
        status = "ok" if report.ok else "FAIL"
        print(f"pipeline {variant:16s} max rel err {report.max_rel_err:.2e} "
              f"{status}")
        failures += 0 if report.ok else 1
    if failures:
        raise NumericFault(f"{failures} gradient check(s) failed")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "annotate": cmd_annotate,
    "build-graphs": cmd_build_graphs,
    "train": cmd_train,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "experiment": cmd_experiment,
    "synth": cmd_synth,
    "gradcheck": cmd_gradcheck,
}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=getattr(args, "log_level", "INFO"))
        return _COMMANDS[args.command](args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (NumericFault, FloatingPointError) as e:
        print(f"numeric fault: {e}", file=sys.stderr)
        return 3
    except (CmapError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
