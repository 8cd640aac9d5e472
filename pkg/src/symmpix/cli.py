"""Command-line front end.

Subcommands: pairs, superpixels, axes, segment, eval, synth.  All outputs
are written atomically; identical invocations with identical inputs and
seeds produce byte-identical files.  Exit status is nonzero on any error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from symmpix import fileio
from symmpix.axes import (
    SymmetryAxis,
    axes_from_json,
    axes_to_json,
    axis_from_cluster,
    f_score,
    match_axes,
)
from symmpix.clustering import (
    PairCluster,
    build_pair_graph,
    clusters_to_json,
    extract_cliques,
)
from symmpix.config import PipelineConfig, load_config_file, thread_cap
from symmpix.image import load_image
from symmpix.pairs import detect_pairs, pairs_from_json, pairs_to_json
from symmpix.segmentation import error_rate, symmetric_segment
from symmpix.slic import run_symmetric_slic
from symmpix.synth import generate


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--seed", type=int)
    p.add_argument("-p", "--curve-samples", type=int, dest="curve_samples")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--score-threshold", type=float, dest="score_threshold")
    p.add_argument("--tau", type=float)
    p.add_argument("--n-axes", type=int, dest="n_axes")
    p.add_argument("--min-cluster-size", type=int, dest="min_cluster_size")
    p.add_argument("--max-graph-vertices", type=int, dest="max_graph_vertices")
    p.add_argument("--partner-draws", type=int, dest="partner_draws")
    p.add_argument("--canny-low", type=float, dest="canny_low")
    p.add_argument("--canny-high", type=float, dest="canny_high")


def _config_from_args(args) -> PipelineConfig:
    cfg = PipelineConfig()
    if getattr(args, "config", None):
        cfg = load_config_file(args.config, cfg)
    overrides = {}
    for name in (
        "seed",
        "curve_samples",
        "epsilon",
        "score_threshold",
        "tau",
        "n_axes",
        "min_cluster_size",
        "max_graph_vertices",
        "partner_draws",
        "canny_low",
        "canny_high",
        "k",
        "compactness",
        "max_iters",
    ):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    return replace(cfg, **overrides).validated()


def _detect_and_cluster(image_path: str, cfg: PipelineConfig):
    img = load_image(image_path)
    detection = detect_pairs(img, cfg)
    pairs = detection.pairs
    if len(pairs) > cfg.max_graph_vertices:
        pairs = sorted(pairs, key=lambda p: (-p.score, p.i, p.j))[: cfg.max_graph_vertices]
        pairs.sort(key=lambda p: (p.i, p.j))
    clusters: list[PairCluster] = []
    if len(pairs) >= 2:
        graph = build_pair_graph(pairs, cfg.tau)
        clusters = extract_cliques(graph, cfg.n_axes)
        clusters = [c for c in clusters if len(c.members) >= cfg.min_cluster_size]
    return img, detection, pairs, clusters


def cmd_pairs(args) -> int:
    cfg = _config_from_args(args)
    img, detection, pairs, clusters = _detect_and_cluster(args.image, cfg)
    fileio.write_json(args.out, pairs_to_json(detection.pairs))
    if args.clusters:
        fileio.write_json(args.clusters, clusters_to_json(clusters))
    if args.edges:
        fileio.write_mask_png(args.edges, detection.edges.mask)
    if args.overlay:
        overlay = fileio.render_pairs_overlay(img.data, detection.pairs)
        fileio.save_rgb_png(args.overlay, overlay)
    return 0


def cmd_superpixels(args) -> int:
    cfg = _config_from_args(args)
    img = load_image(args.image)
    result = run_symmetric_slic(img, cfg)
    labels = result.label_map.labels
    prefix = args.out_prefix
    fileio.write_label_png(f"{prefix}_labels.png", labels)
    fileio.write_label_csv(f"{prefix}_labels.csv", labels)
    pairing_json = [
        {
            "i": ln.left,
            "j": ln.right,
            "theta": ln.transform.theta,
            "t": [ln.transform.t[0], ln.transform.t[1]],
        }
        for ln in result.label_map.pairing.active_links()
    ]
    fileio.write_json(f"{prefix}_pairing.json", pairing_json)
    if args.overlay:
        overlay = fileio.render_label_overlay(img.data, labels, result.label_map.pairing)
        fileio.save_rgb_png(args.overlay, overlay)
    return 0


def cmd_axes(args) -> int:
    cfg = _config_from_args(args)
    if args.input.endswith(".json"):
        clusters_json = fileio.read_json(args.input)
        clusters = [
            PairCluster(
                cluster_id=int(c["cluster_id"]),
                members=pairs_from_json(c["pairs"]),
                vertex_ids=None,
            )
            for c in clusters_json
        ]
        img = None
    else:
        img, _detection, _pairs, clusters = _detect_and_cluster(args.input, cfg)
    axes = []
    for c in clusters:
        if not c.members:
            continue
        try:
            axes.append(axis_from_cluster(c))
        except ValueError:
            continue
    fileio.write_json(args.out, axes_to_json(axes))
    if args.overlay:
        if img is None:
            raise ValueError("--overlay requires an image input")
        fileio.save_rgb_png(args.overlay, fileio.render_axes_overlay(img.data, axes))
    return 0


def cmd_segment(args) -> int:
    cfg = _config_from_args(args)
    img = load_image(args.image)
    result = run_symmetric_slic(img, cfg)
    mask = symmetric_segment(result.label_map, largest_component_only=args.largest_component)
    fileio.write_mask_png(args.out, mask)
    return 0


def cmd_eval(args) -> int:
    from symmpix.metrics import (
        achievable_segmentation_accuracy,
        boundary_recall,
        under_segmentation_error,
    )

    metric = args.metric
    record: dict = {"metric": metric}
    if metric in ("use", "br", "asa"):
        if not args.labels or not args.gt:
            raise ValueError(f"--metric {metric} requires --labels and --gt")
        labels = fileio.read_labels_any(args.labels)
        gt = fileio.read_labels_any(args.gt)
        if metric == "use":
            value = under_segmentation_error(labels, gt)
        elif metric == "br":
            value = boundary_recall(labels, gt, r=args.r)
            record["r"] = args.r
        else:
            value = achievable_segmentation_accuracy(labels, gt)
        record["n_labels"] = int(labels.max()) + 1
    elif metric == "error-rate":
        if not args.mask or not args.gt_mask:
            raise ValueError("--metric error-rate requires --mask and --gt-mask")
        mask = fileio.read_mask_png(args.mask)
        gt = fileio.read_mask_png(args.gt_mask)
        value = error_rate(mask, gt)
    elif metric == "fscore":
        if not args.detected or not args.truth:
            raise ValueError("--metric fscore requires --detected and --truth")
        detected = axes_from_json(fileio.read_json(args.detected))
        truth = axes_from_json(fileio.read_json(args.truth))
        counts = match_axes(detected, truth, args.angle_tol, args.dist_tol)
        record.update(counts)
        value = f_score(counts["tp"], counts["fp"], counts["fn"])
    else:
        raise ValueError(f"unknown metric {metric!r}")
    record["value"] = value
    fileio.write_json(args.out, record)
    if args.csv:
        row = f"{metric},{record.get('n_labels', '')},{value!r}\n"
        fileio.atomic_write_bytes(args.csv, row.encode("ascii"))
    return 0


def cmd_synth(args) -> int:
    import os

    ang = math.radians(args.angle)
    axis = SymmetryAxis(
        point=(args.axis_x, args.axis_y),
        direction=(math.cos(ang), math.sin(ang)),
    )
    result = generate(
        w=args.width,
        h=args.height,
        axis=axis,
        n_blobs=args.n_blobs,
        noise_sigma=args.noise_sigma,
        seed=args.seed if args.seed is not None else 42,
    )
    os.makedirs(args.out_dir, exist_ok=True)
    fileio.save_rgb_png(os.path.join(args.out_dir, "image.png"), result.image.data)
    fileio.write_mask_png(os.path.join(args.out_dir, "mask.png"), result.mask)
    ys, xs = result.mask.nonzero()
    sampled = []
    step = max(1, len(xs) // 512)
    for i in range(0, len(xs), step):
        partner = result.partner_of(int(xs[i]), int(ys[i]))
        if partner is not None:
            sampled.append([[int(xs[i]), int(ys[i])], [partner[0], partner[1]]])
    truth = {
        "axis": axes_to_json([result.axis])[0],
        "mask_png": "mask.png",
        "exact": bool(result.exact),
        "correspondences": sampled,
    }
    fileio.write_json(os.path.join(args.out_dir, "truth.json"), truth)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symmpix",
        description="Mirror-symmetry aware superpixels, axes, and masks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pairs", help="detect mirror-symmetric pixel pairs")
    p.add_argument("image")
    p.add_argument("--out", required=True, help="pairs JSON output")
    p.add_argument("--clusters", help="per-axis cluster JSON output")
    p.add_argument("--edges", help="edge-map debug PNG (1-bit)")
    p.add_argument("--overlay", help="pair overlay PNG")
    _add_config_flags(p)
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("superpixels", help="symmetry-preserving superpixels")
    p.add_argument("image")
    p.add_argument("--out-prefix", default="out")
    p.add_argument("-k", type=int, dest="k")
    p.add_argument("--lambda", type=float, dest="compactness")
    p.add_argument("--iters", type=int, dest="max_iters")
    p.add_argument("--overlay")
    _add_config_flags(p)
    p.set_defaults(func=cmd_superpixels)

    p = sub.add_parser("axes", help="estimate symmetry axes")
    p.add_argument("input", help="image, or clusters.json")
    p.add_argument("--out", required=True)
    p.add_argument("--overlay")
    _add_config_flags(p)
    p.set_defaults(func=cmd_axes)

    p = sub.add_parser("segment", help="unsupervised symmetric-object mask")
    p.add_argument("image")
    p.add_argument("--out", required=True)
    p.add_argument("-k", type=int, dest="k")
    p.add_argument("--lambda", type=float, dest="compactness")
    p.add_argument("--largest-component", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="quality metrics")
    p.add_argument("--metric", required=True, choices=["use", "br", "asa", "error-rate", "fscore"])
    p.add_argument("--labels")
    p.add_argument("--gt")
    p.add_argument("--mask")
    p.add_argument("--gt-mask", dest="gt_mask")
    p.add_argument("--detected")
    p.add_argument("--truth")
    p.add_argument("-r", type=int, default=2)
    p.add_argument("--angle-tol", type=float, default=10.0, dest="angle_tol")
    p.add_argument("--dist-tol", type=float, default=20.0, dest="dist_tol")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("synth", help="generate a symmetric test image + truth")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--angle", type=float, default=90.0, help="axis angle, degrees")
    p.add_argument("--axis-x", type=float, default=None)
    p.add_argument("--axis-y", type=float, default=None)
    p.add_argument("--n-blobs", type=int, default=4, dest="n_blobs")
    p.add_argument("--noise-sigma", type=float, default=0.0, dest="noise_sigma")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    thread_cap()  # validate SYMMPIX_THREADS early
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "synth":
        if args.axis_x is None:
            args.axis_x = (args.width - 1) / 2.0
        if args.axis_y is None:
            args.axis_y = (args.height - 1) / 2.0
    try:
        return args.func(args)
    except Exception as exc:  # CLI boundary: report and exit nonzero
        print(f"symmpix: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
