"""Command-line entry point: ``persorec <command> [options]``.

Exit codes: 0 success, 1 usage or validation error, 2 data error, 3 internal
error. ``--config FILE`` reads ``key = value`` lines (keys are option names
with underscores, e.g. ``max_neighbors = 20``); explicit flags win.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .data import SynthConfig, generate_synthetic, load_dataset_dir, save_dataset
from .evaluation import (
    HoldoutConfig,
    classify_population,
    histogram_csv,
    metrics_csv,
    run_sweep,
    write_histogram_csv,
    write_metrics_csv,
)
from .exceptions import DatasetError, UnknownIdError, ValidationError
from .personality import PersonalityModel, score_bfi10
from .recommender import HybridConfig, PredictorConfig, recommend_top_n
from .similarity import BlendConfig, Combiner

_log = logging.getLogger("persorec")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _int_list(text):
    """``0,5,10`` or an inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] < 1:
            raise argparse.ArgumentTypeError(f"bad range {text!r}, expected start:stop:step")
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _model_list(text):
    try:
        return [PersonalityModel.parse(p) for p in text.split(",") if p.strip()]
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_data_args(p):
    p.add_argument("--data", required=True, type=Path, help="directory with users.csv, items.csv, events.csv")
    p.add_argument("--min-views", type=_non_negative_int, default=0, help="drop users with fewer events")


def _add_predictor_args(p):
    d = PredictorConfig()
    p.add_argument("--model", default=d.model.value, choices=[m.value for m in PersonalityModel])
    p.add_argument("--alpha0", type=float, default=d.blend.alpha0)
    p.add_argument("--decay-count", type=int, default=d.blend.decay_count)
    p.add_argument("--combiner", default=d.blend.combiner.value, choices=[c.value for c in Combiner])
    p.add_argument("--lambda", dest="lambda_", type=float, default=d.hybrid.lambda_)
    p.add_argument("--delta", type=float, default=d.hybrid.delta)
    p.add_argument("--coldstart-count", type=int, default=d.hybrid.coldstart_view_count)
    p.add_argument("--hybrid-traits", default=d.hybrid_trait_model.value, choices=[m.value for m in PersonalityModel if m.is_trait_model])
    p.add_argument("--neighbor-threshold", type=float, default=d.neighbor_threshold)
    p.add_argument("--max-neighbors", type=int, default=d.max_neighbors)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="persorec", description="Personality-aware collaborative filtering.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, help="key=value file with option defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic dataset")
    s = SynthConfig()
    g.add_argument("--users", type=int, default=s.n_users)
    g.add_argument("--items", type=int, default=s.n_items)
    g.add_argument("--labels", type=int, default=s.n_labels)
    g.add_argument("--views-per-user", type=int, default=s.views_per_user)
    g.add_argument("--affinity", type=float, default=s.affinity_strength)
    g.add_argument("--seed", type=int, default=s.seed)
    g.add_argument("--out", type=Path, required=True)

    r = sub.add_parser("recommend", help="top-n items for one user")
    _add_data_args(r)
    _add_predictor_args(r)
    r.add_argument("--user", type=int, required=True)
    r.add_argument("--n", type=_non_negative_int, default=10)

    w = sub.add_parser("sweep", help="precision/recall/F against revealed history length")
    _add_data_args(w)
    _add_predictor_args(w)
    w.add_argument("--models", type=_model_list, default=list(PersonalityModel))
    w.add_argument("--buckets", type=_int_list, default=list(range(0, 51, 5)))
    w.add_argument("--relevance-margin", type=float, default=HoldoutConfig().relevance_margin)
    w.add_argument("--jobs", type=_positive_int, default=1)
    w.add_argument("--out", type=Path, help="CSV path (default: standard output)")

    c = sub.add_parser("classify", help="histogram of dominant traits or MBTI types")
    _add_data_args(c)
    c.add_argument("--model", required=True, choices=[m.value for m in PersonalityModel if m is not PersonalityModel.HYBRID])
    c.add_argument("--out", type=Path, help="CSV path (default: standard output)")

    b = sub.add_parser("score-bfi10", help="score BFI-10 answers")
    b.add_argument("--answers", required=True, help="ten comma-separated answers in 1..5")
    return parser


def read_config(path: Path) -> dict[str, str]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser, argv, values):
    """Re-parse with config values inserted before the explicit flags."""
    # locate the subcommand so config options land after it
    cmd_pos = next((k for k, a in enumerate(argv) if a in _commands(parser)), None)
    if cmd_pos is None:
        return parser.parse_args(argv)
    sub = _commands(parser)[argv[cmd_pos]]
    known = {a.dest: a for a in sub._actions if a.option_strings}
    extra = []
    for key, value in values.items():
        if key == "lambda":
            key = "lambda_"
        if key not in known:
            raise UsageError(f"unknown config key {key!r} for {argv[cmd_pos]}")
        extra += [known[key].option_strings[-1], value]
    return parser.parse_args(argv[: cmd_pos + 1] + extra + argv[cmd_pos + 1 :])


def _commands(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def _predictor_config(args) -> PredictorConfig:
    return PredictorConfig(
        model=PersonalityModel.parse(args.model),
        blend=BlendConfig(alpha0=args.alpha0, decay_count=args.decay_count, combiner=Combiner.parse(args.combiner)),
        hybrid=HybridConfig(lambda_=args.lambda_, delta=args.delta, coldstart_view_count=args.coldstart_count),
        neighbor_threshold=args.neighbor_threshold,
        max_neighbors=args.max_neighbors,
        hybrid_trait_model=PersonalityModel.parse(args.hybrid_traits),
    )


def cmd_generate(args, out) -> int:
    cfg = SynthConfig(
        n_users=args.users,
        n_items=args.items,
        n_labels=args.labels,
        views_per_user=args.views_per_user,
        affinity_strength=args.affinity,
        seed=args.seed,
    )
    ds = generate_synthetic(cfg)
    save_dataset(ds, args.out)
    out.write(f"users={len(ds.users)} items={len(ds.items)} events={len(ds.events)} dir={args.out}\n")
    return EXIT_OK


def cmd_recommend(args, out) -> int:
    cfg = _predictor_config(args)
    ds = load_dataset_dir(args.data, min_views=args.min_views)
    for item, score in recommend_top_n(args.user, args.n, ds, cfg):
        out.write(f"{item},{score:.6f}\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    cfg = _predictor_config(args)
    ds = load_dataset_dir(args.data, min_views=args.min_views)
    points = run_sweep(ds, args.models, args.buckets, cfg, HoldoutConfig(args.relevance_margin), n_jobs=args.jobs)
    if args.out:
        write_metrics_csv(points, args.out)
    else:
        out.write(metrics_csv(points))
    return EXIT_OK


def cmd_classify(args, out) -> int:
    ds = load_dataset_dir(args.data, min_views=args.min_views)
    hist = classify_population(ds, PersonalityModel.parse(args.model))
    if args.out:
        write_histogram_csv(hist, args.out)
    else:
        out.write(histogram_csv(hist))
    return EXIT_OK


def cmd_score_bfi10(args, out) -> int:
    try:
        answers = [int(x) for x in args.answers.split(",")]
    except ValueError:
        raise ValidationError(f"answers must be integers, got {args.answers!r}") from None
    vec = score_bfi10(answers)
    for name, value in vec.as_dict().items():
        out.write(f"{name},{value:.6f}\n")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "recommend": cmd_recommend,
    "sweep": cmd_sweep,
    "classify": cmd_classify,
    "score-bfi10": cmd_score_bfi10,
}


def main(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config is not None:
            args = _apply_config(parser, argv, read_config(args.config))
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=err)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (UnknownIdError, DatasetError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_DATA
    except ValidationError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
