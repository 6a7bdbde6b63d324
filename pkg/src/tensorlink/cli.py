"""Batch command line: ``tensorlink run`` and ``tensorlink gen``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numeric failure (Katz series does not converge).
"""
import argparse
import dataclasses
import io
import os
import sys
import tempfile
from fractions import Fraction

from . import tensor as tensor_io
from ._validation import check_beta, check_theta
from .evaluation import ExperimentConfig, reports_to_csv, reports_to_json, run_experiment
from .exceptions import (
    ConvergenceError,
    EmptyBenchmarkError,
    EntropyBoundError,
    KnowledgeError,
    TraceFormatError,
)
from .katz import DIRECTIONS
from .scores import KNOWLEDGE_MODES, METRICS, NORMALIZATIONS, TWO_HOP_METRICS
from .tensor import FILE_EXTENSION, holdout
from .trace import (
    DiscretizationConfig,
    SyntheticSpec,
    associations_to_contacts,
    discretize,
    generate_synthetic,
    read_associations,
    read_contacts,
    tensor_to_contacts,
    write_contacts,
)
from .weighting import MAX_ENTROPY_MODES

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
TRACE_FORMATS = ("pairwise", "association")


class ConfigError(ValueError):
    pass


@dataclasses.dataclass
class RunConfig:
    trace_path: str = None
    trace_format: str = "pairwise"
    window_start: float = 0.0
    window_end: float = None
    period_lengths: tuple = (300.0, 600.0, 1800.0, 3600.0)
    theta: float = 0.2
    beta: float = 0.001
    knowledge: str = "full"
    metrics: tuple = ("katz",)
    normalization: str = "analytic"
    max_entropy: str = "log"
    ego_scope: str = "union"
    directions: dict = dataclasses.field(default_factory=dict)
    seed: int = 0
    output_dir: str = "."
    save_tensors: bool = False

    def validate(self):
        if not self.trace_path:
            raise ConfigError("trace_path: a trace file is required")
        if self.trace_format not in TRACE_FORMATS:
            raise ConfigError(f"trace_format: must be one of {TRACE_FORMATS}")
        if self.window_end is None or self.window_end <= self.window_start:
            raise ConfigError("window_end: must be given and later than window_start")
        if not self.period_lengths:
            raise ConfigError("period_lengths: at least one period length is required")
        span = Fraction(self.window_end) - Fraction(self.window_start)
        for length in self.period_lengths:
            if length <= 0 or span % Fraction(length):
                raise ConfigError(f"period_lengths: {length:g} does not divide the window")
        for name, check in (("theta", check_theta), ("beta", check_beta)):
            try:
                check(getattr(self, name))
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from None
        choices = (
            ("knowledge", KNOWLEDGE_MODES),
            ("normalization", NORMALIZATIONS),
            ("max_entropy", MAX_ENTROPY_MODES),
            ("ego_scope", ("union", "per-period")),
        )
        for name, allowed in choices:
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name}: must be one of {allowed}")
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown or not self.metrics:
            raise ConfigError(f"metrics: unknown or empty metric list {list(self.metrics)}")
        for metric, direction in self.directions.items():
            if metric not in METRICS or direction not in DIRECTIONS:
                raise ConfigError(f"directions: invalid override {metric}={direction}")
        if self.knowledge == "ego1":
            needs_two = [m for m in self.metrics if m in TWO_HOP_METRICS]
            if needs_two:
                raise KnowledgeError(
                    f"metric requires two-hop knowledge: {', '.join(needs_two)}"
                )


def _split_list(text, cast=str):
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(cast(item.strip()) for item in str(text).split(",") if item.strip())


def _parse_directions(items):
    out = {}
    for item in items:
        metric, sep, direction = item.partition("=")
        if not sep:
            raise ConfigError(f"directions: expected metric=direction, got {item!r}")
        out[metric.strip()] = direction.strip()
    return out


_CASTS = {
    "trace_path": str,
    "trace_format": str,
    "window_start": float,
    "window_end": float,
    "period_lengths": lambda v: _split_list(v, float),
    "theta": float,
    "beta": float,
    "knowledge": str,
    "metrics": _split_list,
    "normalization": str,
    "max_entropy": str,
    "ego_scope": str,
    "directions": lambda v: _parse_directions(_split_list(v)),
    "seed": int,
    "output_dir": str,
    "save_tensors": lambda v: str(v).strip().lower() in ("1", "true", "yes", "on"),
}


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in _CASTS:
                raise ConfigError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
            values[key] = value.strip()
    return values


def build_config(file_values, overrides):
    merged = {**file_values, **{k: v for k, v in overrides.items() if v is not None}}
    kwargs = {}
    for key, value in merged.items():
        try:
            kwargs[key] = _CASTS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key}: {exc}") from None
    return RunConfig(**kwargs)


def _atomic_write(path, data):
    """Write-then-rename so readers never see a partial file."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _fmt(value):
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def load_events(config):
    with open(config.trace_path, "rb") as fh:
        if config.trace_format == "pairwise":
            events, labels = read_contacts(fh)
        else:
            assoc, labels, _ = read_associations(fh)
            events = associations_to_contacts(assoc)
    return events, labels


def run(config):
    """Evaluate every requested metric for every period length.

    For a period length ``t`` the window holds ``T`` tracked periods and
    the period ``[window_end, window_end + t)`` is the benchmark.
    """
    config.validate()
    events, labels = load_events(config)
    os.makedirs(config.output_dir, exist_ok=True)
    experiment = ExperimentConfig(
        theta=config.theta,
        beta=config.beta,
        knowledge=config.knowledge,
        normalization=config.normalization,
        max_entropy=config.max_entropy,
        ego_scope=config.ego_scope,
        directions=dict(config.directions),
    )
    rows = []
    for length in config.period_lengths:
        disc = DiscretizationConfig(
            config.window_start,
            config.window_end + length,
            length,
            node_universe=tuple(range(len(labels))),
        )
        full = discretize(events, disc)
        history, truth = holdout(full)
        scenario = {
            "period_length": _fmt(length),
            "n_periods": history.n_periods,
            "knowledge": config.knowledge,
            "n_nodes": history.n_nodes,
            "theta": config.theta,
            "beta": config.beta,
            "seed": config.seed,
        }
        reports = run_experiment(history, truth, config.metrics, experiment)
        stem = os.path.join(config.output_dir, f"report_{_fmt(length)}s")
        _atomic_write(stem + ".json", reports_to_json(reports, scenario))
        if config.save_tensors:
            buf = io.BytesIO()
            tensor_io.save(full, buf)
            _atomic_write(
                os.path.join(config.output_dir, f"tensor_{_fmt(length)}s{FILE_EXTENSION}"),
                buf.getvalue(),
            )
        rows.extend((scenario, r) for r in reports)
    _atomic_write(os.path.join(config.output_dir, "summary.csv"), reports_to_csv(rows))
    return rows


def gen(spec, seed, output, period_length=300.0, start=0.0):
    """Write a pairwise contact CSV realising a synthetic tensor."""
    tensor = generate_synthetic(spec, seed)
    events = tensor_to_contacts(tensor, period_length, start)
    labels = [f"n{i}" for i in range(spec.n_nodes)]
    if output == "-":
        write_contacts(events, sys.stdout, labels)
    else:
        buf = io.StringIO()
        write_contacts(events, buf, labels)
        _atomic_write(output, buf.getvalue())
    return tensor


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="tensorlink", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="evaluate link prediction metrics on a trace")
    r.add_argument("--config", help="flat key = value settings file")
    r.add_argument("--trace", dest="trace_path")
    r.add_argument("--format", dest="trace_format", choices=TRACE_FORMATS)
    r.add_argument("--window-start", type=float)
    r.add_argument("--window-end", type=float)
    r.add_argument("--period-lengths", help="comma-separated seconds, e.g. 300,600")
    r.add_argument("--theta", type=float)
    r.add_argument("--beta", type=float)
    r.add_argument("--knowledge", choices=KNOWLEDGE_MODES)
    r.add_argument("--metrics", help=f"comma-separated subset of {','.join(METRICS)}")
    r.add_argument("--normalization", choices=NORMALIZATIONS)
    r.add_argument("--max-entropy", choices=MAX_ENTROPY_MODES)
    r.add_argument("--ego-scope", choices=("union", "per-period"))
    r.add_argument(
        "--direction",
        dest="directions",
        action="append",
        metavar="METRIC=DIR",
        help="override a metric's ranking direction (ascending|descending)",
    )
    r.add_argument("--seed", type=int)
    r.add_argument("--output-dir")
    r.add_argument("--save-tensors", action="store_const", const="true", default=None)

    g = sub.add_parser("gen", help="write a synthetic pairwise contact trace")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--periods", type=int, required=True)
    g.add_argument("--stable-pairs", type=int, default=0)
    g.add_argument("--p-stable", type=float, default=1.0)
    g.add_argument("--flip-prob", type=float, default=0.05)
    g.add_argument("--p-noise", type=float, default=0.0)
    g.add_argument("--initial-state", type=int, choices=(0, 1))
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--period-length", type=float, default=300.0)
    g.add_argument("--start", type=float, default=0.0)
    g.add_argument("--output", "-o", default="-")
    return parser


def _run_command(args):
    overrides = {
        key: getattr(args, key)
        for key in _CASTS
        if key not in ("directions",) and getattr(args, key, None) is not None
    }
    if args.directions:
        overrides["directions"] = args.directions
    file_values = read_config_file(args.config) if args.config else {}
    run(build_config(file_values, overrides))


def _gen_command(args):
    if args.period_length <= 0:
        raise ConfigError("period_length: must be positive")
    spec = SyntheticSpec(
        n_nodes=args.nodes,
        n_periods=args.periods,
        stable_pairs=args.stable_pairs,
        p_stable=args.p_stable,
        flip_prob=args.flip_prob,
        p_noise=args.p_noise,
        initial_state=args.initial_state,
    )
    gen(spec, args.seed, args.output, args.period_length, args.start)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            _run_command(args)
        else:
            _gen_command(args)
    except (ConfigError, KnowledgeError) as exc:
        print(f"tensorlink: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TraceFormatError, EmptyBenchmarkError, EntropyBoundError, OSError) as exc:
        print(f"tensorlink: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        # gen only sees its own flags; anything else in run comes from the data
        code = EXIT_CONFIG if args.command == "gen" else EXIT_DATA
        print(f"tensorlink: error: {exc}", file=sys.stderr)
        return code
    except ConvergenceError as exc:
        print(f"tensorlink: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
