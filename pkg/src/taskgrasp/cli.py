"""Command line entry point: generate, train, synth, eval."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import TaskGraspError
from .geometry import load_xyz

log = logging.getLogger("taskgrasp")


def _provider(args, part_labels=None):
    from .language import HttpProvider, StubProvider

    if args.provider == "http":
        return HttpProvider()
    return StubProvider(seed=args.provider_seed, part_labels=part_labels)


def _cache(args):
    from .language import DescriptionCache

    return DescriptionCache(args.cache) if args.cache else None


def cmd_generate(args) -> int:
    from .pipeline import GraspPipeline, GroundTruthSegmenter, KMeansSegmenter, PipelineConfig, TaskRequest

    segmenter = GroundTruthSegmenter(args.segments) if args.segments else KMeansSegmenter(seed=args.seed)
    kwargs = dict(provider=_provider(args), segmenter=segmenter, cache=_cache(args))
    if args.checkpoint:
        pipeline = GraspPipeline.load(args.checkpoint, **kwargs)
    else:
        pipeline = GraspPipeline(config=PipelineConfig.load(args.config), **kwargs)
    request = TaskRequest(load_xyz(args.object), args.category, args.task, args.seed,
                          object_path=str(Path(args.object).resolve()))
    result = pipeline.run(request, out=args.out)
    sel = result.selected
    print(f"selected part {sel.part.label!r} score {sel.score:.4f} -> {args.out}")
    return 0


def cmd_train(args) -> int:
    from .diffusion import train
    from .pipeline import GraspPipeline, PipelineConfig, StubHandModel, build_training_pairs, load_dataset

    objects, manifest = load_dataset(args.dataset)
    config = PipelineConfig.load(args.config)
    labels = {cat: (list(parts), []) for cat, parts in manifest["categories"].items()}
    pipeline = GraspPipeline(provider=_provider(args, part_labels=labels), config=config, cache=_cache(args))
    hand = StubHandModel()
    pairs = build_training_pairs(objects, hand, pipeline, seed=config.train.seed)
    if not pairs:
        print("no training pairs: every grasp missed every valid part", file=sys.stderr)
        return 1
    log.info("training on %d pairs", len(pairs))
    result = train(pairs, config.train, denoiser=pipeline.denoiser)
    pipeline.denoiser = result.denoiser.eval()
    pipeline.save(args.out, meta={"dataset": str(Path(args.dataset).resolve()), "pairs": len(pairs),
                                  "epoch_losses": result.epoch_losses})
    first, last = result.epoch_losses[:1], result.epoch_losses[-1:]
    print(f"trained {result.steps} steps in {result.seconds:.1f}s; loss {first} -> {last}; saved {args.out}")
    return 0


def cmd_synth(args) -> int:
    from .pipeline import generate_synthetic_dataset

    spec = json.loads(Path(args.spec).read_text())
    objects = generate_synthetic_dataset(spec, args.seed, out=args.out)
    print(f"wrote {len(objects)} objects, {sum(len(o.grasps) for o in objects)} grasps to {args.out}")
    return 0


def cmd_eval(args) -> int:
    from .conditioning import SetAbstractionConfig, SetAbstractionEncoder, encode_pointcloud
    from .eval import build_report, load_result_samples, write_report_csv
    from .pipeline import StubHandModel, load_dataset

    import torch

    hand = StubHandModel()
    samples = load_result_samples(args.results)
    reference = feature_fn = None
    if args.reference:
        objects, _ = load_dataset(args.reference)
        reference = [g for o in objects for g, _, _ in o.grasps]
        cfg = SetAbstractionConfig()
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(args.feature_seed)
            encoder = SetAbstractionEncoder(cfg).eval()
        feature_fn = lambda g: encode_pointcloud(hand.surface(g), cfg, encoder)  # noqa: E731
    report = build_report(samples, hand, lam=args.contact_threshold, voxel=args.voxel,
                          reference=reference, feature_fn=feature_fn)
    Path(args.report).write_text(json.dumps(report.to_dict(), indent=2))
    if args.csv:
        write_report_csv(report, args.csv)
    print(json.dumps({k: v for k, v in report.to_dict().items() if k != "config"}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="taskgrasp", description="Part-aware task-oriented dexterous grasp generation")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def provider_opts(sp):
        sp.add_argument("--provider", choices=("stub", "http"), default="stub",
                        help="description provider; http reads LLM_ENDPOINT / LLM_API_KEY")
        sp.add_argument("--provider-seed", type=int, default=0)
        sp.add_argument("--cache", help="directory for cached provider responses")

    g = sub.add_parser("generate", help="generate and select a grasp for one object")
    g.add_argument("--object", required=True, help="object point cloud (.xyz)")
    g.add_argument("--category", required=True)
    g.add_argument("--task", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--config", help="pipeline config JSON (ignored with --checkpoint)")
    g.add_argument("--checkpoint", help="trained model archive from `train`")
    g.add_argument("--segments", help="directory of ground-truth segment JSON files")
    g.add_argument("--out", required=True)
    provider_opts(g)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train the denoiser on a synthetic dataset")
    t.add_argument("--dataset", required=True)
    t.add_argument("--config", help="pipeline config JSON")
    t.add_argument("--out", required=True, help="output archive (.npz)")
    provider_opts(t)
    t.set_defaults(func=cmd_train)

    s = sub.add_parser("synth", help="write a seeded synthetic dataset")
    s.add_argument("--spec", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="compute metrics over a directory of result JSON files")
    e.add_argument("--results", required=True)
    e.add_argument("--report", required=True)
    e.add_argument("--csv", help="also write a one-row CSV table")
    e.add_argument("--reference", help="synthetic dataset whose grasps are the Frechet reference set")
    e.add_argument("--feature-seed", type=int, default=0)
    e.add_argument("--voxel", type=float, default=0.005)
    e.add_argument("--contact-threshold", type=float, default=0.005)
    e.set_defaults(func=cmd_eval)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (TaskGraspError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
