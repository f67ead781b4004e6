"""Command-line entry point: ``signednet <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure
(non-convergence or a self-check mismatch).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .clustering import OracleMismatch, clustering_coefficients
from .embedding import EMBED_METHODS, embed
from .errors import ConvergenceError, DataError, UsageError
from .graph import DUPLICATE_POLICIES, SELF_LOOP_POLICIES, file_digest, read_edge_list, write_edge_list
from .linkpred import (
    METHODS, SPECTRAL_METHODS, evaluate_split, make_predictor, parse_k_list, split_edges, sweep_k,
)
from .ranking import MEASURES, compute_measure, evaluate_troll_prediction, parse_sweep
from .selfcheck import run_self_check
from .spectral import DecompositionCache
from .stats import DEGREE_MODES, basic_stats, degree_histogram, distance_stats
from .synthetic import DEFAULTS, MODELS, SyntheticSpec, generate

ENV_PREFIX = "SIGNEDNET_"
FORMATS = ("json", "tsv", "table")
SIG_DIGITS = 12

# option name -> (type, default); flags win over SIGNEDNET_<NAME> which win over defaults
_SHARED = {
    "alpha": (float, 0.15),
    "beta": (float, 1.0),
    "k": (int, None),
    "tol": (float, 1e-8),
    "seed": (int, 0),
    "threads": (int, None),
    "cache": (str, None),
    "format": (str, None),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_digest() -> str:
    """SHA-256 over the package's own source files."""
    h = hashlib.sha256()
    root = Path(__file__).parent
    for path in sorted(root.glob("*.py")):
        h.update(path.name.encode())
        h.update(path.read_bytes())
    return h.hexdigest()[:16]


# -- output ----------------------------------------------------------------------

def _round(x):
    if isinstance(x, dict):
        return {str(k): _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v) for v in x]
    if isinstance(x, np.ndarray):
        return _round(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.{SIG_DIGITS}g}")
    return x


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.{SIG_DIGITS}g}"
    return str(x)


def _flatten(d: dict, prefix: str = "") -> list[tuple[str, object]]:
    out = []
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.extend(_flatten(value, name + "."))
        elif isinstance(value, list) and value and isinstance(value[0], dict):
            for i, item in enumerate(value):
                out.extend(_flatten(item, f"{name}.{i}."))
        else:
            out.append((name, value))
    return out


class Result:
    """A command's payload: a JSON-able dict plus an optional table."""

    def __init__(self, data: dict, columns: list[str] | None = None, rows=None,
                 default_format: str = "json"):
        self.data = data
        self.columns = columns
        self.rows = rows
        self.default_format = default_format

    def table(self):
        if self.columns is not None:
            return self.columns, self.rows
        return ["key", "value"], _flatten(_round(self.data))


def render(result: Result, header: dict, fmt: str) -> str:
    if fmt == "json":
        report = {**header, "result": result.data}
        return json.dumps(_round(report), indent=2, sort_keys=False, ensure_ascii=False) + "\n"
    columns, rows = result.table()
    buf = io.StringIO()
    if fmt == "tsv":
        buf.write("# " + json.dumps(_round(header), sort_keys=False, ensure_ascii=False) + "\n")
        buf.write("\t".join(columns) + "\n")
        for row in rows:
            buf.write("\t".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    for key, value in _flatten(_round(header)):
        buf.write(f"# {key}: {_fmt(value)}\n")
    buf.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    buf.write("  ".join("-" * w for w in widths) + "\n")
    for r in cells:
        buf.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    return buf.getvalue()


# -- commands -----------------------------------------------------------------------

def _load(args):
    return read_edge_list(args.input, on_duplicate=args.on_duplicate, on_self_loop=args.on_self_loop)


def _need_k(args) -> int:
    if args.k is None:
        raise UsageError("--k is required for this command")
    if args.k < 1:
        raise UsageError("--k must be positive")
    return args.k


def cmd_stats(args, cfg):
    return Result(basic_stats(_load(args)).to_dict())


def cmd_distances(args, cfg):
    return Result(distance_stats(_load(args), sample=args.sample, seed=cfg["seed"]).to_dict())


def cmd_degree_histogram(args, cfg):
    hist = degree_histogram(_load(args), args.mode)
    data = {"mode": args.mode, "histogram": [{"degree": d, "count": c} for d, c in hist]}
    return Result(data, ["degree", "count"], hist, default_format="tsv")


def cmd_clustering(args, cfg):
    return Result(clustering_coefficients(_load(args), include_diagonal=args.include_diagonal).to_dict())


def cmd_rank(args, cfg):
    g = _load(args)
    rv = compute_measure(g, args.measure, cfg["alpha"], cfg["beta"], cfg["tol"])
    if args.top < 0 or (args.bottom is not None and args.bottom < 0):
        raise UsageError("--top and --bottom must be non-negative")
    rows = [("top", i + 1, g.labels[v], float(rv.scores[v])) for i, v in enumerate(rv.top(args.top))]
    if args.bottom is not None:
        rows += [("bottom", i + 1, g.labels[v], float(rv.scores[v]))
                 for i, v in enumerate(rv.bottom(args.bottom))]
    data = {
        "measure": rv.measure, "normalization": rv.normalization, "params": rv.params,
        "ranking": [{"list": s, "position": p, "label": lab, "score": sc} for s, p, lab, sc in rows],
    }
    return Result(data, ["list", "position", "label", "score"], rows, default_format="tsv")


def cmd_trolls(args, cfg):
    measures = args.measures.split(",") if args.measures else list(MEASURES)
    for m in measures:
        if m not in MEASURES:
            raise UsageError(f"unknown measure {m!r}; expected one of {MEASURES}")
    betas = parse_sweep(args.beta_sweep) if args.beta_sweep else None
    report = evaluate_troll_prediction(
        _load(args), args.marker, measures, cfg["alpha"], cfg["beta"], args.min_incident,
        betas, cfg["tol"],
    )
    return Result(report)


def cmd_predict(args, cfg):
    g = _load(args)
    split = split_edges(g, args.test_fraction, cfg["seed"])
    cache = DecompositionCache(cfg["cache"]) if cfg["cache"] else None
    if args.sweep_k:
        ks = parse_k_list(args.sweep_k)
        methods = [args.method] if args.method else [m for m in SPECTRAL_METHODS]
        reports = sweep_k(split, methods, ks, tol=cfg["tol"], seed=cfg["seed"], cache=cache)
        rows = [(r.method, r.k, r.accuracy) for r in reports]
        data = {"split": split.metadata(), "reports": [r.to_dict() for r in reports]}
        return Result(data, ["method", "k", "accuracy"], rows)
    method = args.method or "always_positive"
    k = _need_k(args) if method in SPECTRAL_METHODS else None
    pred = make_predictor(split.train, method, k, tol=cfg["tol"], seed=cfg["seed"], cache=cache)
    return Result(evaluate_split(split, pred).to_dict())


def cmd_embed(args, cfg):
    g = _load(args)
    emb = embed(g, args.method, dims=args.dims, k=args.k, tol=cfg["tol"], seed=cfg["seed"])
    columns = ["label"] + [f"x{i + 1}" if args.dims > 2 else "xy"[i] for i in range(args.dims)]
    rows = list(emb.rows())
    data = {"method": emb.method, "k": emb.k, "dims": emb.dims, "weights": emb.weights,
            "coordinates": [dict(zip(columns, r)) for r in rows]}
    return Result(data, columns, rows, default_format="tsv")


def _parse_params(items, model):
    params = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        if key not in DEFAULTS.get(model, {}):
            raise UsageError(f"unknown parameter {key!r} for model {model}")
        default = DEFAULTS[model][key]
        try:
            params[key] = value if isinstance(default, str) else type(default)(value)
        except ValueError:
            raise UsageError(f"invalid value for {key}: {value!r}") from None
    return params


def cmd_gen(args, cfg):
    spec = SyntheticSpec(args.model, args.n, cfg["seed"], _parse_params(args.param, args.model))
    g = generate(spec)
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def cmd_self_check(args, cfg):
    report = run_self_check(graphs=args.graphs, first_seed=cfg["seed"])
    if args.no_timestamp:
        report.pop("seconds", None)
    result = Result(report)
    result.failed = not report["passed"]
    return result


COMMANDS = {
    "stats": cmd_stats,
    "distances": cmd_distances,
    "degree-histogram": cmd_degree_histogram,
    "clustering": cmd_clustering,
    "rank": cmd_rank,
    "trolls": cmd_trolls,
    "predict": cmd_predict,
    "embed": cmd_embed,
    "gen": cmd_gen,
    "self-check": cmd_self_check,
}


# -- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, help="output format")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the run timestamp")
    common.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    common.add_argument("--cache", help="directory for cached decompositions")
    common.add_argument("--alpha", type=float, help="teleportation probability (0.15)")
    common.add_argument("--beta", type=float, help="Negative Rank weight (1.0)")
    common.add_argument("--k", type=int, help="decomposition rank")
    common.add_argument("--tol", type=float, help="solver tolerance (1e-8)")
    common.add_argument("--seed", type=int, help="random seed (0)")
    common.add_argument("--on-duplicate", choices=DUPLICATE_POLICIES, default="keep-last")
    common.add_argument("--on-self-loop", choices=SELF_LOOP_POLICIES, default="drop")

    parser = _Parser(prog="signednet", description="Signed social network analysis.")
    parser.add_argument("--version", action="store_true", help="print version and build digest")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text, needs_input=True):
        p = sub.add_parser(name, parents=[common], help=help_text)
        if needs_input:
            p.add_argument("input", help="edge list (TSV, optionally .gz)")
        return p

    add("stats", "node, edge and degree statistics")
    p = add("distances", "diameter, radius and mean distance")
    p.add_argument("--sample", type=int, help="number of BFS sources (default: all)")
    p = add("degree-histogram", "degree distribution")
    p.add_argument("--mode", choices=DEGREE_MODES, default="total")
    p = add("clustering", "signed and directed clustering coefficients")
    p.add_argument("--include-diagonal", action="store_true")
    p = add("rank", "popularity ranking")
    p.add_argument("--measure", choices=MEASURES, default="negative_rank")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--bottom", type=int, help="also list the N least popular nodes")
    p = add("trolls", "troll-finding benchmark (MAP)")
    p.add_argument("--marker", required=True, help="label of the marker node")
    p.add_argument("--min-incident", type=int, default=20)
    p.add_argument("--beta-sweep", help="start:stop:step for a Negative Rank sweep")
    p.add_argument("--measures", help="comma-separated subset of measures")
    p = add("predict", "link-sign prediction accuracy")
    p.add_argument("--method", choices=METHODS)
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--sweep-k", help="comma-separated k values")
    p = add("embed", "two-dimensional node embedding")
    p.add_argument("--method", choices=EMBED_METHODS, default="laplacian")
    p.add_argument("--dims", type=int, default=2)
    p = add("gen", "write a synthetic signed graph", needs_input=False)
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--param", action="append", metavar="KEY=VALUE")
    p = add("self-check", "compare production code against dense references",
            needs_input=False)
    p.add_argument("--graphs", type=int, default=50)
    return parser


def resolve_config(args, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    cfg = {}
    for name, (kind, default) in _SHARED.items():
        value = getattr(args, name, None)
        if value is None:
            raw = environ.get(ENV_PREFIX + name.upper())
            if raw not in (None, ""):
                try:
                    value = kind(raw)
                except ValueError:
                    raise UsageError(f"invalid {ENV_PREFIX}{name.upper()}={raw!r}") from None
        cfg[name] = default if value is None else value
    if cfg["format"] is not None and cfg["format"] not in FORMATS:
        raise UsageError(f"format must be one of {FORMATS}")
    if cfg["threads"] is not None and cfg["threads"] < 1:
        raise UsageError("--threads must be positive")
    if cfg["tol"] <= 0:
        raise UsageError("--tol must be positive")
    return cfg


def _set_threads(count: int | None) -> None:
    if count is None:
        return
    import numba

    numba.set_num_threads(min(count, numba.config.NUMBA_NUM_THREADS))


def _header(args, cfg) -> dict:
    config = {"command": args.command, **cfg}
    config.pop("format")
    skip = {"command", "input", "output", "no_timestamp", "version", "format", *cfg}
    for key, value in sorted(vars(args).items()):
        if key not in skip:
            config[key] = value
    header = {"tool": "signednet", "version": __version__, "build": build_digest(), "config": config}
    if getattr(args, "input", None) is not None:
        header["input"] = {"path": args.input, "sha256": file_digest(args.input)}
    if not args.no_timestamp:
        header["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return header


def _emit(text: str, output: str | None) -> None:
    if output:
        try:
            Path(output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot write {output}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _show_warning(message, category, filename, lineno, file=None, line=None):
    sys.stderr.write(f"warning: {message}\n")


def run(argv=None) -> int:
    parser = build_parser()
    saved = warnings.showwarning
    warnings.showwarning = _show_warning
    # numba reports an unusable optional threading backend; irrelevant to results
    warnings.filterwarnings("ignore", message="The TBB threading layer")
    try:
        args = parser.parse_args(argv)
        if args.version:
            sys.stdout.write(f"signednet {__version__} (build {build_digest()})\n")
            return 0
        if not args.command:
            raise UsageError("missing subcommand; see --help")
        cfg = resolve_config(args)
        _set_threads(cfg["threads"])
        if getattr(args, "input", None) is not None and not Path(args.input).is_file():
            raise DataError(f"cannot read {args.input}: no such file")
        result = COMMANDS[args.command](args, cfg)
        if isinstance(result, str):
            _emit(result, args.output)
            return 0
        fmt = cfg["format"] or result.default_format
        _emit(render(result, _header(args, cfg), fmt), args.output)
        if getattr(result, "failed", False):
            sys.stderr.write("error: self-check found mismatches\n")
            return 3
        return 0
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except DataError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ConvergenceError, OracleMismatch) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    finally:
        warnings.showwarning = saved


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
