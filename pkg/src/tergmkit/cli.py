"""Command-line entry point.

Subcommands: ingest, simulate, estimate, entropy, test, classify, assess,
recover. Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
failure (diagnostic JSON on standard error, no output file written).

Every JSON report embeds a run manifest: the command, its fully resolved
configuration, the seed, the tool version, SHA-256 digests of input files,
and wall-clock timing. Identical seeds and inputs reproduce every field
but the timing. Randomized commands either take --seed or generate one and
print it. --plot renders PNG figures next to the JSON report.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .degeneracy import degeneracy_bounds, entropy_bruteforce, entropy_edgecount
from .estimation import FitConfig, fit_exact, fit_sampled
from .evaluation import crossval_assess, recovery_experiment
from .graphs import (
    NodeAttributeTable,
    build_sliding_windows,
    load_events,
    load_series,
    save_series,
)
from .inference import (
    GAConfig,
    HypothesisSpec,
    MCGEMConfig,
    likelihood_ratio_test,
    mcgem_classify,
)
from .model import TransitionModel
from .sampling import SamplerConfig, sample_initial, simulate_chain
from .statistics import StatisticSet, load_model_spec
from .util import (
    DataError,
    NumericalError,
    UnsupportedModelError,
    atomic_write_json,
    atomic_write_text,
    json_default,
    sha256_file,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


# ---------------------------------------------------------------------------
# shared helpers


def _resolve_seed(args):
    """Explicit --seed, or a generated one printed so the run is replayable."""
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    seed = int.from_bytes(os.urandom(8), "big") % (2**62)
    print(f"generated seed: {seed}")
    args.seed = seed
    return seed


def _resolve_threads(args):
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise DataError("--threads must be >= 1")
        return args.threads
    env = os.environ.get("TERGM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DataError(f"TERGM_THREADS={env!r} is not an integer") from None
    return max(1, os.cpu_count() or 1)


def _json_arg(value, what):
    """Inline JSON object or a path to a JSON file."""
    if value is None:
        return {}
    text = value.strip()
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise DataError(f"{what}: invalid inline JSON ({e})") from None
    else:
        try:
            with open(value) as fh:
                doc = json.load(fh)
        except OSError as e:
            raise DataError(f"{what}: {e}") from None
        except json.JSONDecodeError as e:
            raise DataError(f"{value}: invalid JSON ({e})") from None
    if not isinstance(doc, dict):
        raise DataError(f"{what} must be a JSON object")
    return doc


def _manifest(args, seed, inputs, t0):
    config = {}
    for key, value in sorted(vars(args).items()):
        if key in ("func", "cmd") or callable(value):
            continue
        config[key] = value
    digests = {}
    for p in inputs:
        if p and os.path.exists(p):
            digests[str(p)] = sha256_file(p)
    return {
        "command": args.cmd,
        "version": __version__,
        "seed": seed,
        "config": config,
        "inputs": digests,
        "timing_seconds": round(time.perf_counter() - t0, 6),
    }


def _emit(args, doc):
    if getattr(args, "out", None):
        atomic_write_json(args.out, doc)
        print(f"wrote {args.out}")
    else:
        print(json.dumps(doc, indent=2, default=json_default))


def _write_csv(path, rows):
    buf = io.StringIO()
    writer = csv.writer(buf)
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())
    print(f"wrote {path}")


def _figure_path(out, suffix):
    stem = out[:-5] if out.endswith(".json") else out
    return f"{stem}_{suffix}.png"


def _require_out_for_plot(args):
    if getattr(args, "plot", False) and not getattr(args, "out", None):
        raise _UsageError("--plot needs --out to derive figure file names")


def _load_labels_file(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise DataError(f"{path}: {e}") from None
    except json.JSONDecodeError as e:
        raise DataError(f"{path}: invalid JSON ({e})") from None
    return NodeAttributeTable.from_dict(doc)


def _parse_theta(text):
    try:
        return np.array([float(x) for x in text.split(",") if x.strip() != ""])
    except ValueError:
        raise DataError(f"--theta {text!r} is not a comma-separated float list") from None


def _resolve_model_args(args):
    """(stats, theta) from --stats/--theta or a --model JSON file."""
    if getattr(args, "model", None):
        stats, theta = load_model_spec(args.model)
        if getattr(args, "theta", None):
            theta = _parse_theta(args.theta)
        return stats, theta
    if not getattr(args, "stats", None):
        raise _UsageError("either --stats or --model is required")
    stats = StatisticSet.from_names(args.stats)
    theta = _parse_theta(args.theta) if getattr(args, "theta", None) else None
    return stats, theta


def _trace_csv_rows(result):
    header = ["iteration"] + [f"theta_{nm}" for nm in result.stat_names]
    extra = [
        k for k in (result.trace[0] if result.trace else {}) if k not in ("iteration", "theta")
    ]
    rows = [header + extra]
    for row in result.trace:
        rows.append([row["iteration"], *row["theta"], *[row.get(k) for k in extra]])
    return rows


def _numerical_failure(detail, diagnostics=None):
    json.dump(
        {"error": "numerical failure", "detail": detail, "diagnostics": diagnostics or []},
        sys.stderr,
        default=json_default,
    )
    sys.stderr.write("\n")
    return EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# subcommands


def cmd_ingest(args):
    t0 = time.perf_counter()
    events = load_events(args.events)
    if args.n is not None:
        n = args.n
    else:
        n = 1 + max(max((ev.sponsor, *ev.cosponsors)) for ev in events)
    attributes = _load_labels_file(args.labels) if args.labels else None
    series = build_sliding_windows(events, args.window, args.step, n, attributes)
    manifest = _manifest(args, None, [args.events, args.labels], t0)
    save_series(series, args.out, extra={"manifest": manifest})
    print(
        f"ingested {len(events)} events into {series.T} snapshots (n={series.n}); "
        f"wrote {args.out}"
    )
    return EXIT_OK


def cmd_simulate(args):
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    stats, theta = _resolve_model_args(args)
    if theta is None:
        raise _UsageError("simulate needs --theta (or a --model file that includes theta)")
    labels = _load_labels_file(args.labels) if args.labels else None
    model = TransitionModel(stats, theta, labels)
    first = sample_initial(
        stats, model.theta, args.n, mode=args.initial, seed=seed,
        sweeps=args.init_sweeps, labels=labels,
    )
    series = simulate_chain(model, first, args.T, SamplerConfig(seed=seed))
    if labels is not None:
        series = series.replace(attributes=labels)
    manifest = _manifest(args, seed, [args.labels, args.model], t0)
    save_series(series, args.out, extra={"manifest": manifest})
    print(f"simulated T={series.T} networks (n={series.n}); wrote {args.out}")
    return EXIT_OK


def cmd_estimate(args):
    t0 = time.perf_counter()
    series = load_series(args.series)
    stats, _ = _resolve_model_args(args)
    theta_init = _parse_theta(args.theta_init) if args.theta_init else None
    overrides = _json_arg(args.config, "--config")
    if args.method == "exact":
        config = FitConfig.from_dict(overrides, convergence_epsilon=1e-8)
        result = fit_exact(stats, series, config=config, theta_init=theta_init)
    else:
        seed = _resolve_seed(args)
        config = FitConfig.from_dict(overrides, seed=seed)
        result = fit_sampled(stats, series, config=config, theta_init=theta_init)
    if result.fatal:
        return _numerical_failure(
            f"{args.method} fit is numerically invalid", result.diagnostics
        )
    doc = result.to_dict()
    doc["manifest"] = _manifest(args, getattr(args, "seed", None), [args.series, args.model], t0)
    _emit(args, doc)
    theta_txt = ", ".join(f"{nm}={v:.4g}" for nm, v in zip(result.stat_names, result.theta_hat))
    print(f"theta_hat: {theta_txt} (converged={result.converged}, {result.iterations} iterations)")
    if args.csv:
        _write_csv(args.csv, _trace_csv_rows(result))
    if args.plot:
        from . import plots

        print(f"wrote {plots.fit_trace(result, _figure_path(args.out, 'trace'))}")
    return EXIT_OK


def _parse_axis(spec):
    name, _, rest = spec.partition("=")
    name = name.strip()
    if not rest:
        raise DataError(f"axis spec {spec!r} must be NAME=value or NAME=lo:hi:count")
    parts = rest.split(":")
    try:
        if len(parts) == 1:
            return name, np.array([float(parts[0])])
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise DataError(f"axis spec {spec!r} has a non-positive count")
            return name, np.linspace(float(parts[0]), float(parts[1]), count)
    except ValueError:
        pass
    raise DataError(f"axis spec {spec!r} must be NAME=value or NAME=lo:hi:count")


def _parse_bernoulli(init):
    parts = init.split(":")
    if parts[0] != "bernoulli":
        raise DataError(f"initial law {init!r} not supported here; use bernoulli:q")
    try:
        return float(parts[1]) if len(parts) > 1 else 0.5
    except ValueError:
        raise DataError(f"initial law {init!r} has a non-numeric rate") from None


def cmd_entropy(args):
    t0 = time.perf_counter()
    if args.mode == "bounds":
        stats, theta = _resolve_model_args(args)
        if theta is None:
            raise _UsageError("entropy --mode bounds needs --theta")
        if args.n is None:
            raise _UsageError("entropy --mode bounds needs --n")
        previous = None
        if args.previous_from:
            previous = load_series(args.previous_from)[-1]
        report = degeneracy_bounds(
            stats, theta, args.n, previous=previous, beta_override=args.beta
        )
        doc = {"mode": "bounds", **report.to_dict()}
        doc["manifest"] = _manifest(args, None, [args.previous_from, args.model], t0)
        _emit(args, doc)
        print(
            f"p_bound={report.p_bound:.6g} (beta={report.beta:.6g}, {report.beta_mode}); "
            f"expected edges in [{report.expected_edges_lo:.4g}, {report.expected_edges_hi:.4g}]; "
            f"entropy >= {report.entropy_lower_bound:.4g} nats"
        )
        return EXIT_OK

    if args.mode == "bruteforce":
        stats, theta = _resolve_model_args(args)
        if theta is None or args.n is None:
            raise _UsageError("entropy --mode bruteforce needs --theta and --n")
        labels = _load_labels_file(args.labels) if args.labels else None
        model = TransitionModel(stats, theta, labels)
        value = entropy_bruteforce(model, args.init, args.n)
        doc = {"mode": "bruteforce", "n": args.n, "initial": args.init, "entropy": value}
        doc["manifest"] = _manifest(args, None, [args.labels, args.model], t0)
        _emit(args, doc)
        print(f"H = {value:.6g} nats")
        return EXIT_OK

    # grid mode: edge-count entropy over a (density, stability) grid
    if args.n is None:
        raise _UsageError("entropy --mode grid needs --n")
    axes = dict(_parse_axis(s) for s in args.theta_grid or [])
    if set(axes) != {"D", "S"}:
        raise DataError(
            "grid mode needs exactly two --theta-grid axes named D and S "
            "(edge-count entropy is defined for the {D, S} model)"
        )
    q = _parse_bernoulli(args.init)
    d_axis, s_axis = axes["D"], axes["S"]
    grid = np.empty((len(d_axis), len(s_axis)))
    for i, td in enumerate(d_axis):
        for j, ts in enumerate(s_axis):
            grid[i, j] = entropy_edgecount(td, ts, args.n, q)
    imax, jmax = np.unravel_index(int(np.argmax(grid)), grid.shape)
    doc = {
        "mode": "grid",
        "n": args.n,
        "q": q,
        "theta_density_axis": [float(x) for x in d_axis],
        "theta_stability_axis": [float(x) for x in s_axis],
        "entropy": [[float(v) for v in row] for row in grid],
        "max_entropy": float(grid[imax, jmax]),
        "max_at": {"D": float(d_axis[imax]), "S": float(s_axis[jmax])},
    }
    doc["manifest"] = _manifest(args, None, [], t0)
    _emit(args, doc)
    print(
        f"max entropy {grid[imax, jmax]:.6g} nats at "
        f"(D={d_axis[imax]:.4g}, S={s_axis[jmax]:.4g})"
    )
    if args.csv:
        rows = [["theta_density", "theta_stability", "entropy"]]
        for i, td in enumerate(d_axis):
            for j, ts in enumerate(s_axis):
                rows.append([float(td), float(ts), float(grid[i, j])])
        _write_csv(args.csv, rows)
    if args.plot:
        from . import plots

        print(f"wrote {plots.entropy_heatmap(d_axis, s_axis, grid, _figure_path(args.out, 'grid'))}")
    return EXIT_OK


def cmd_test(args):
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    series = load_series(args.series)
    spec = HypothesisSpec(
        StatisticSet.from_names(args.null_stats), StatisticSet.from_names(args.alt_stats)
    )
    ga = GAConfig.from_dict(_json_arg(args.ga_config, "--ga-config"), seed=seed)
    fit_overrides = _json_arg(args.fit_config, "--fit-config")
    fit_config = FitConfig.from_dict(fit_overrides, convergence_epsilon=1e-8)
    result = likelihood_ratio_test(
        spec, series, ga=ga, fit_config=fit_config, threads=_resolve_threads(args)
    )
    doc = result.to_dict()
    doc["manifest"] = _manifest(args, seed, [args.series], t0)
    _emit(args, doc)
    print(f"lr = {result.lr_statistic:.6g}, p = {result.p_value:.4g}")
    if args.csv:
        header = ["generation", "sigma", "best_frequency", "mean_frequency", "p_value", "dropped"]
        rows = [header] + [[row[h] for h in header] for row in result.ga_trace]
        _write_csv(args.csv, rows)
    if args.plot:
        from . import plots

        print(f"wrote {plots.ga_progress(result, _figure_path(args.out, 'ga'))}")
    return EXIT_OK


def cmd_classify(args):
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    series = load_series(args.series)
    stats = StatisticSet.from_names(args.stats)
    known = _load_labels_file(args.labels) if args.labels else series.attributes
    if known is None:
        raise DataError("classification needs labels in the series file or via --labels")
    prior = None
    if args.prior:
        prior = [float(x) for x in args.prior.split(",")]
    truth = _load_labels_file(args.truth) if args.truth else None
    config = MCGEMConfig.from_dict(_json_arg(args.config, "--config"), seed=seed)
    result = mcgem_classify(
        stats, series, known=known, prior=prior, config=config, truth=truth
    )
    doc = result.to_dict()
    doc["manifest"] = _manifest(args, seed, [args.series, args.labels, args.truth], t0)
    _emit(args, doc)
    n_pred = len(result.predicted_labels)
    line = f"predicted {n_pred} labels (converged={result.converged})"
    if result.accuracy is not None:
        line += f"; accuracy {result.accuracy:.3f}"
    print(line)
    if args.csv:
        rows = [["node", "label", "observed", "mode_frequency"]]
        for i, value in enumerate(result.predicted.values):
            freq = result.mode_frequencies.get(i, "")
            rows.append([i, value, bool(result.predicted.observed[i]), freq])
        _write_csv(args.csv, rows)
    return EXIT_OK


def cmd_assess(args):
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    series = load_series(args.series)
    stats = StatisticSet.from_names(args.stats)
    config = FitConfig.from_dict(_json_arg(args.fit_config, "--fit-config"),
                                 convergence_epsilon=1e-8)
    assessment = crossval_assess(
        stats,
        series,
        samples_per_t=args.samples,
        config=config,
        drop_prefix=args.drop_prefix,
        seed=seed,
        threads=_resolve_threads(args),
    )
    doc = assessment.to_dict()
    doc["manifest"] = _manifest(args, seed, [args.series], t0)
    _emit(args, doc)
    cov = "n/a" if assessment.coverage is None else f"{assessment.coverage:.3f}"
    print(f"band coverage: {cov} over {len(assessment.cells)} cells")
    if args.csv:
        _write_csv(args.csv, assessment.csv_rows())
    if args.plot:
        from . import plots

        print(f"wrote {plots.assessment_bands(assessment, _figure_path(args.out, 'bands'))}")
    return EXIT_OK


def cmd_recover(args):
    t0 = time.perf_counter()
    seed = _resolve_seed(args)
    exact_config = None
    if args.exact_config:
        exact_config = FitConfig.from_dict(
            _json_arg(args.exact_config, "--exact-config"), convergence_epsilon=1e-8
        )
    sampled_config = None
    if args.sampled_config:
        sampled_config = FitConfig.from_dict(
            _json_arg(args.sampled_config, "--sampled-config"), max_iterations=200
        )
    report = recovery_experiment(
        n=args.n,
        T=args.T,
        seeds=args.seeds,
        stats=StatisticSet.from_names(args.stats),
        exact_config=exact_config,
        sampled_config=sampled_config,
        seed=seed,
        init_sweeps=args.init_sweeps,
        threads=_resolve_threads(args),
    )
    doc = report.to_dict()
    doc["manifest"] = _manifest(args, seed, [], t0)
    _emit(args, doc)
    agg = report.aggregates
    if agg.get("seeds_succeeded"):
        print(
            f"{agg['seeds_succeeded']}/{report.seeds} seeds; "
            f"mean sampled-vs-exact loss {agg['mean_loss_sampled_vs_exact']:.4g}"
        )
    else:
        print("all seeds failed; see diagnostics")
    if args.csv:
        _write_csv(args.csv, report.csv_rows())
    if args.plot:
        from . import plots

        print(f"wrote {plots.recovery_losses(report, _figure_path(args.out, 'losses'))}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser():
    parser = _Parser(
        prog="tergmkit",
        description="Estimation, simulation, testing, and diagnostics for "
        "transition models of directed network series.",
    )
    parser.add_argument("--version", action="version", version=f"tergmkit {__version__}")
    sub = parser.add_subparsers(dest="cmd")

    def common_output(p, plot=True):
        p.add_argument("--out", help="output JSON path (stdout when omitted)")
        p.add_argument("--csv", help="also write a plot-ready CSV here")
        if plot:
            p.add_argument("--plot", action="store_true",
                           help="render PNG figures next to --out")

    p = sub.add_parser("ingest", help="build a snapshot series from an event log")
    p.add_argument("--events", required=True, help="event-log CSV (proposal_id,sponsor,cosponsor)")
    p.add_argument("--window", type=int, default=100)
    p.add_argument("--step", type=int, default=30)
    p.add_argument("--n", type=int, help="node count (default: inferred from the events)")
    p.add_argument("--labels", help="JSON node attribute table to attach")
    p.add_argument("--out", required=True, help="series JSON path")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("simulate", help="simulate a series from a transition model")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--stats", help="comma-separated statistic names")
    p.add_argument("--model", help="model-spec JSON ({statistics, theta})")
    p.add_argument("--theta", help="comma-separated weights")
    p.add_argument("--initial", default="bernoulli:0.5",
                   help="initial network law: bernoulli:q or self-ergm")
    p.add_argument("--init-sweeps", type=int, default=1000, dest="init_sweeps")
    p.add_argument("--labels", help="JSON node attribute table (needed by label statistics)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="series JSON path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="fit a model to a series")
    p.add_argument("--series", required=True)
    p.add_argument("--stats", help="comma-separated statistic names")
    p.add_argument("--model", help="model-spec JSON naming the statistics")
    p.add_argument("--method", choices=("exact", "sampled"), default="exact")
    p.add_argument("--config", help="FitConfig overrides (inline JSON or a file)")
    p.add_argument("--theta-init", dest="theta_init", help="comma-separated starting point")
    p.add_argument("--seed", type=int, help="sampling seed (sampled method)")
    common_output(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("entropy", help="degeneracy bounds and exact second-step entropy")
    p.add_argument("--mode", choices=("bounds", "grid", "bruteforce"), default="bounds")
    p.add_argument("--stats", help="comma-separated statistic names (bounds/bruteforce)")
    p.add_argument("--model", help="model-spec JSON")
    p.add_argument("--theta", help="comma-separated weights (bounds/bruteforce)")
    p.add_argument("--theta-grid", action="append", dest="theta_grid",
                   help="axis spec NAME=lo:hi:count (grid mode; give D and S)")
    p.add_argument("--n", type=int)
    p.add_argument("--init", default="bernoulli:0.5", help="initial law bernoulli:q")
    p.add_argument("--previous-from", dest="previous_from",
                   help="series JSON; its last network tightens the bounds")
    p.add_argument("--beta", type=float, help="explicit per-edge bound override")
    p.add_argument("--labels", help="JSON node attribute table (bruteforce with label statistics)")
    common_output(p)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("test", help="likelihood-ratio test of nested models")
    p.add_argument("--series", required=True)
    p.add_argument("--null-stats", dest="null_stats", required=True)
    p.add_argument("--alt-stats", dest="alt_stats", required=True)
    p.add_argument("--ga-config", dest="ga_config", help="GAConfig overrides (JSON)")
    p.add_argument("--fit-config", dest="fit_config", help="FitConfig overrides (JSON)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    common_output(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("classify", help="impute unknown node labels")
    p.add_argument("--series", required=True)
    p.add_argument("--stats", required=True,
                   help="statistic names; include label statistics (WD,BD,WR,BR)")
    p.add_argument("--labels", help="JSON node attribute table with observed flags")
    p.add_argument("--prior", help="comma-separated label prior weights")
    p.add_argument("--config", help="MCGEMConfig overrides (JSON)")
    p.add_argument("--truth", help="JSON node attribute table with true labels")
    p.add_argument("--seed", type=int)
    common_output(p, plot=False)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("assess", help="leave-one-transition-out band check")
    p.add_argument("--series", required=True)
    p.add_argument("--stats", required=True)
    p.add_argument("--samples", type=int, default=500, help="draws per held-out transition")
    p.add_argument("--drop-prefix", dest="drop_prefix", type=int, default=0,
                   help="discard this many leading snapshots first")
    p.add_argument("--fit-config", dest="fit_config", help="FitConfig overrides (JSON)")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    common_output(p)
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("recover", help="simulate-and-refit recovery study")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--T", type=int, default=11)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--stats", default="D,S,R,T")
    p.add_argument("--init-sweeps", dest="init_sweeps", type=int, default=60)
    p.add_argument("--exact-config", dest="exact_config")
    p.add_argument("--sampled-config", dest="sampled_config")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    common_output(p)
    p.set_defaults(func=cmd_recover)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "cmd", None) is None:
            parser.print_help()
            return EXIT_USAGE
        _require_out_for_plot(args)
        return args.func(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, UnsupportedModelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        return _numerical_failure(str(e))


if __name__ == "__main__":
    sys.exit(main())
