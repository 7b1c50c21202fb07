"""Command line interface.

Usage:
    edgewire gen   --kind gable --out cloud.xyz --gt gt.obj --seed 7
    edgewire fit   --cloud cloud.xyz --gt gt.obj --out pred_raw.json --trace trace.json
    edgewire nms   --in pred_raw.json --conf-threshold 0.7 --nms-threshold 0.5 --out pred.obj
    edgewire match --pred pred.obj --gt gt.obj --out match.json
    edgewire eval  --pred pred.obj --gt gt.obj --corner-threshold 0.1 --out report.json

Every subcommand accepts ``--config run.json`` (sections ``similarity``,
``loss``, ``fit``, ``dbscan``, ``eval``, ``roof``); explicit flags win.
Diagnostics go to stderr; data goes to files, or stdout when ``--out`` is
omitted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import MISSING, fields
from typing import Dict, Optional, Sequence

from . import io
from .config import SECTIONS, RunConfig
from .errors import InvalidArgument, InvalidEdge, ParseError
from .fitter import fit
from .matching import match_edges
from .metrics import evaluate
from .pipeline import postprocess
from .similarity import similarity_matrix
from .synthetic import generate_roof

logger = logging.getLogger("edgewire")

# (section, field, flag) per subcommand; flag defaults to the kebab-case field name
SIMILARITY_FLAGS = [("similarity", f, None) for f in ("alpha", "beta", "gamma", "samples_per_edge")]
LOSS_FLAGS = [
    ("loss", f, None)
    for f in ("lambda_mid", "lambda_comp", "lambda_con", "lambda_quad", "lambda_sim")
]
FIT_FLAGS = [
    ("fit", f, None)
    for f in ("num_queries", "iterations", "step_size", "rematch_every", "init_length",
              "seed", "labels", "step_halvings")
]
THRESHOLD_FLAGS = [("fit", "conf_threshold", None), ("fit", "nms_threshold", None)]
DBSCAN_FLAGS = [("dbscan", "eps", None), ("dbscan", "min_points", None)]
ROOF_FLAGS = [
    ("roof", f, None)
    for f in ("kind", "width", "depth", "eave_height", "ridge_height", "point_count",
              "noise_sigma", "dropout_fraction", "seed")
]
EVAL_FLAGS = [("eval", "corner_match_threshold", "corner-threshold")]


def _field_type(section: str, name: str):
    for f in fields(SECTIONS[section]):
        if f.name == name:
            default = f.default if f.default is not MISSING else None
            return type(default) if default is not None else str
    raise KeyError(name)


def _add_flags(parser: argparse.ArgumentParser, specs) -> None:
    for section, name, flag in specs:
        flag = flag or name.replace("_", "-")
        parser.add_argument(
            f"--{flag}",
            dest=f"{section}__{name}",
            type=_field_type(section, name),
            default=None,
            help=f"[{section}] {name}",
        )


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg = RunConfig.from_dict(json.loads(io.read_text(args.config)))
    overrides: Dict[str, Dict[str, object]] = {}
    for key, value in vars(args).items():
        if "__" in key and value is not None:
            section, name = key.split("__", 1)
            overrides.setdefault(section, {})[name] = value
    for section, values in overrides.items():
        cfg = cfg.override(section, **values)
    return cfg


def _emit(path: Optional[str], text: str) -> None:
    if path:
        io.write_text(path, text)
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def cmd_gen(args, cfg: RunConfig) -> None:
    cloud, wf = generate_roof(cfg.roof)
    io.write_text(args.out, io.write_xyz(cloud))
    io.write_text(args.gt, io.write_obj_wireframe(wf))
    logger.info("generated %s roof: %d points, %d edges", cfg.roof.kind, len(cloud), len(wf.edges))


def cmd_fit(args, cfg: RunConfig) -> None:
    cloud = io.parse_xyz(io.read_text(args.cloud))
    gt = io.parse_obj_wireframe(io.read_text(args.gt))
    preds, trace = fit(cloud, gt, cfg.fit, cfg.similarity, cfg.loss)
    _emit(args.out, io.dumps_json(io.predictions_to_dict(preds)))
    if args.trace:
        io.write_text(args.trace, io.dumps_json({"total_loss": trace}))


def cmd_nms(args, cfg: RunConfig) -> None:
    preds = io.predictions_from_dict(json.loads(io.read_text(args.input)))
    wf = postprocess(preds, cfg.fit.conf_threshold, cfg.fit.nms_threshold, cfg.similarity, cfg.dbscan)
    logger.info("kept %d of %d edges", len(wf.edges), len(preds))
    _emit(args.out, io.write_obj_wireframe(wf))


def cmd_match(args, cfg: RunConfig) -> None:
    pred = io.parse_obj_wireframe(io.read_text(args.pred)).segments()
    gt = io.parse_obj_wireframe(io.read_text(args.gt)).segments()
    sims = similarity_matrix(pred, gt, cfg.similarity)
    result = match_edges(pred, gt, cfg.similarity)
    payload = {
        "pairs": [{"pred": i, "gt": j, "cost": c} for i, j, c in result.pairs],
        "similarity": sims.tolist(),
        "total_cost": result.total_cost,
        "unmatched_gts": result.unmatched_gts,
        "unmatched_preds": result.unmatched_preds,
    }
    _emit(args.out, io.dumps_json(payload))


def cmd_eval(args, cfg: RunConfig) -> None:
    pred = io.parse_obj_wireframe(io.read_text(args.pred))
    gt = io.parse_obj_wireframe(io.read_text(args.gt))
    report = evaluate(pred, gt, cfg.eval)
    _emit(args.out, io.dumps_json(report.as_dict()))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgewire", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run configuration")
        p.set_defaults(func=func)
        return p

    p = add("gen", cmd_gen, "generate a synthetic roof cloud and wireframe")
    p.add_argument("--out", required=True, help="output XYZ point cloud")
    p.add_argument("--gt", required=True, help="output OBJ wireframe")
    _add_flags(p, ROOF_FLAGS)

    p = add("fit", cmd_fit, "fit edge predictions to a ground-truth wireframe")
    p.add_argument("--cloud", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out", help="raw predictions JSON (stdout if omitted)")
    p.add_argument("--trace", help="loss trace JSON")
    _add_flags(p, FIT_FLAGS + SIMILARITY_FLAGS + LOSS_FLAGS)

    p = add("nms", cmd_nms, "confidence filter + E-NMS + corner merge")
    p.add_argument("--in", dest="input", required=True, help="raw predictions JSON")
    p.add_argument("--out", help="output OBJ wireframe (stdout if omitted)")
    _add_flags(p, THRESHOLD_FLAGS + SIMILARITY_FLAGS + DBSCAN_FLAGS)

    p = add("match", cmd_match, "edge similarity matrix and optimal assignment")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out")
    _add_flags(p, SIMILARITY_FLAGS)

    p = add("eval", cmd_eval, "corner/edge precision, recall and F1")
    p.add_argument("--pred", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--out")
    _add_flags(p, EVAL_FLAGS)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _load_config(args)
        args.func(args, cfg)
    except (InvalidArgument, InvalidEdge, ParseError, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"edgewire {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
