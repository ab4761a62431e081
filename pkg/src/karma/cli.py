"""Command line: ``karma run | search | synth``.

Every option can also come from a ``--config`` file of ``key = value`` lines;
command-line flags override the file.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from karma.charts import channel_figure
from karma.core import (
    ConfigError,
    DataError,
    KarmaError,
    NumericalError,
    ParameterError,
    SchemaError,
    StructuralIndices,
    TimeSeriesCollection,
)
from karma.io import format_json, load_csv, parse_config_file, save_csv
from karma.kalman import PredictorConfig
from karma.pipeline import METHODS, MethodResult, compare, pq_objective
from karma.search import SearchConfig, pso_search
from karma.synth import ScenarioSpec, generate

logger = logging.getLogger("karma")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


@dataclass
class RunConfig:
    data_path: str = ""
    method: str = "both"
    train_len: int | None = None
    horizon: int = 20
    indices: StructuralIndices | str = field(default_factory=StructuralIndices)
    season_period: int | None = None
    refit_period: int = 0
    alpha: float = 1000.0
    adaptation_window: int = 1
    seed: int = 0
    output_dir: str = "out"
    swarm_size: int = 16
    iterations: int = 30
    charts: bool = True

    def methods(self) -> tuple[str, ...]:
        if self.method == "both":
            return METHODS
        if self.method in METHODS:
            return (self.method,)
        raise ConfigError(f"method must be parma, karma or both, got {self.method!r}")

    def resolve_train_len(self, n: int) -> int:
        n0 = self.train_len if self.train_len is not None else int(0.8 * n)
        if not 1 <= n0 < n:
            raise ConfigError(f"train_len must lie in [1, {n}), got {n0}")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        return n0

    def predictor(self) -> PredictorConfig:
        return PredictorConfig(alpha=self.alpha, adaptation_window=self.adaptation_window, refit_period=self.refit_period)


def _orders(text: str, trend: int) -> StructuralIndices | str:
    if text.strip() == "search":
        return "search"
    try:
        na, nb, nc = (int(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"orders must be 'na,nb,nc' or 'search', got {text!r}") from None
    if na + nc < 1:
        raise ConfigError("na + nc must be >= 1")
    return StructuralIndices(trend, na, nb, nc)


def _search(data: TimeSeriesCollection, cfg: RunConfig) -> tuple[StructuralIndices, dict]:
    evaluate = pq_objective(data, cfg.horizon, cfg.season_period, cfg.predictor())
    scfg = SearchConfig(swarm_size=cfg.swarm_size, iterations=cfg.iterations, seed=cfg.seed)
    res = pso_search(evaluate, scfg)
    if not res.success:
        raise NumericalError("structure search found no feasible structure")
    info = {"best": list(res.best), "best_score": res.best_score, "history": res.history, "evaluations": len(res.evaluations)}
    return res.indices, info


def run_pipeline(cfg: RunConfig) -> dict[str, MethodResult]:
    """Load, predict with each method, score, and write predictions, report and charts."""
    methods = cfg.methods()
    data = load_csv(cfg.data_path)
    n0 = cfg.resolve_train_len(data.N)
    search_info = None
    indices = cfg.indices
    if indices == "search":
        indices, search_info = _search(data.head(n0), cfg)
    try:
        results = compare(data, n0, cfg.horizon, indices, methods, cfg.season_period, cfg.predictor())
    except NumericalError as exc:
        raise NumericalError(f"pipeline failed: {exc}") from exc

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    K = cfg.horizon
    times = np.arange(n0, n0 + K)
    has_truth = n0 + K <= data.N
    cols = ["time"]
    table = [times.astype(float)]
    if has_truth:
        for j, name in enumerate(data.channel_names):
            cols.append(f"{name}_true")
            table.append(data.values[n0 : n0 + K, j])
    for method, res in results.items():
        for j, name in enumerate(data.channel_names):
            cols.append(f"{name}_{method}")
            table.append(res.predictions[:, j])
    with open(out / "predictions.csv", "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in np.column_stack(table):
            fh.write(",".join([str(int(row[0]))] + [repr(float(v)) for v in row[1:]]) + "\n")

    report = {
        "data": {"path": str(cfg.data_path), "N": data.N, "channels": list(data.channel_names)},
        "config": {
            "method": cfg.method,
            "train_len": n0,
            "horizon": K,
            "season_period": cfg.season_period,
            "refit_period": cfg.refit_period,
            "alpha": cfg.alpha,
            "adaptation_window": cfg.adaptation_window,
            "seed": cfg.seed,
        },
        "structural_indices": {k: v for k, v in asdict(indices).items() if k != "nx"},
        "methods": {},
    }
    if search_info is not None:
        report["search"] = search_info
    for method, res in results.items():
        entry = res.report.to_dict()
        entry["stages"] = res.stages
        if res.nx is not None:
            entry["nx"] = res.nx
        report["methods"][method] = entry
    report["timestamp"] = {
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "runtimes_s": {m: r.runtime_s for m, r in results.items()},
    }
    (out / "report.json").write_text(format_json(report) + "\n")

    if cfg.charts:
        _charts(out, data, n0, results)
    return results


def _charts(out: Path, data: TimeSeriesCollection, n0: int, results: dict[str, MethodResult]):
    for method, res in results.items():
        rep = res.report
        truth = data.values[n0 : n0 + rep.K] if n0 + rep.K <= data.N else None
        det = res.deterministic_train
        for j, name in enumerate(data.channel_names):
            channel_figure(
                out / f"{method}_{name}.svg",
                name,
                method,
                data.values[:n0, j],
                det[:, j],
                data.values[:n0, j] - det[:, j],
                float(rep.snr_measured[j]),
                None if truth is None else truth[:, j],
                res.predictions[:, j],
                rep.sigma_pred[j],
                float(rep.pq[j]),
            )


def run_search(cfg: RunConfig) -> dict:
    """Structure search on the data; the last ``horizon`` samples score each candidate."""
    data = load_csv(cfg.data_path)
    if data.N <= cfg.horizon:
        raise ConfigError(f"need more than {cfg.horizon} samples to hold out a horizon")
    indices, info = _search(data, cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    info["structural_indices"] = {k: v for k, v in asdict(indices).items() if k != "nx"}
    (out / "search.json").write_text(format_json(info) + "\n")
    return info


def scenario_from_options(opts: dict) -> ScenarioSpec:
    def ints(text):
        return tuple(int(v) for v in str(text).split(",")) if text not in (None, "") else ()

    def floats(text):
        return tuple(float(v) for v in str(text).split(",")) if text not in (None, "") else ()

    try:
        return ScenarioSpec(
            ny=int(opts.get("channels", 4)),
            N=int(opts.get("length", 500)),
            coupling=float(opts.get("coupling", 0.8)),
            lags=ints(opts.get("lags")),
            noise_std=floats(opts.get("noise_std")),
            season_period=int(opts["season_period"]) if opts.get("season_period") not in (None, "") else None,
            season_amplitude=floats(opts.get("season_amplitude")),
            seed=int(opts.get("seed", 0)),
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(f"bad scenario value: {exc}") from exc


RUN_KEYS = {
    "data": str,
    "method": str,
    "train_len": int,
    "horizon": int,
    "orders": str,
    "trend": int,
    "season_period": int,
    "refit_period": int,
    "alpha": float,
    "adaptation_window": int,
    "seed": int,
    "out": str,
    "swarm_size": int,
    "iterations": int,
}
SYNTH_KEYS = ("channels", "length", "coupling", "lags", "noise_std", "season_period", "season_amplitude", "seed", "out")


def _merge(args: argparse.Namespace, keys) -> dict:
    opts: dict = {}
    if args.config:
        opts.update(parse_config_file(args.config))
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            opts[key] = value
    unknown = set(opts) - set(keys)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return opts


def run_config_from_options(opts: dict) -> RunConfig:
    typed = {}
    for key, kind in RUN_KEYS.items():
        if key in opts and opts[key] not in (None, ""):
            try:
                typed[key] = kind(opts[key])
            except ValueError:
                raise ConfigError(f"{key}: cannot parse {opts[key]!r}") from None
    if "data" not in typed:
        raise ConfigError("no data file given (--data)")
    indices = _orders(typed.get("orders", "1,1,1"), typed.get("trend", 1))
    try:
        return RunConfig(
            data_path=typed["data"],
            method=typed.get("method", "both"),
            train_len=typed.get("train_len"),
            horizon=typed.get("horizon", 20),
            indices=indices,
            season_period=typed.get("season_period"),
            refit_period=typed.get("refit_period", 0),
            alpha=typed.get("alpha", 1000.0),
            adaptation_window=typed.get("adaptation_window", 1),
            seed=typed.get("seed", 0),
            output_dir=typed.get("out", "out"),
            swarm_size=typed.get("swarm_size", 16),
            iterations=typed.get("iterations", 30),
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="karma", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--data", help="input CSV (header of channel names)")
        p.add_argument("--horizon", type=int)
        p.add_argument("--orders", help="na,nb,nc or 'search'")
        p.add_argument("--trend", type=int, help="polynomial trend degree p")
        p.add_argument("--season-period", dest="season_period", type=int)
        p.add_argument("--refit-period", dest="refit_period", type=int)
        p.add_argument("--alpha", type=float)
        p.add_argument("--adaptation-window", dest="adaptation_window", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--swarm-size", dest="swarm_size", type=int)
        p.add_argument("--iterations", type=int)

    run = sub.add_parser("run", help="predict with PARMA and/or KARMA and score")
    common(run)
    run.add_argument("--method", choices=("parma", "karma", "both"))
    run.add_argument("--train-len", dest="train_len", type=int)

    search = sub.add_parser("search", help="particle swarm search of structural indices")
    common(search)

    synth = sub.add_parser("synth", help="write a synthetic correlated collection")
    synth.add_argument("--config", help="scenario file of key=value lines")
    synth.add_argument("--channels", type=int)
    synth.add_argument("--length", type=int)
    synth.add_argument("--coupling", type=float)
    synth.add_argument("--lags", help="comma-separated driver delays per channel")
    synth.add_argument("--noise-std", dest="noise_std")
    synth.add_argument("--season-period", dest="season_period", type=int)
    synth.add_argument("--season-amplitude", dest="season_amplitude")
    synth.add_argument("--seed", type=int)
    synth.add_argument("--out", help="output CSV path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            opts = _merge(args, SYNTH_KEYS)
            spec = scenario_from_options(opts)
            path = opts.get("out", "synth.csv")
            save_csv(generate(spec), path)
            print(f"wrote {spec.N} x {spec.ny} samples to {path}")
        elif args.command == "search":
            keys = [k for k in RUN_KEYS if k not in ("method", "train_len")]
            cfg = run_config_from_options(_merge(args, keys) | {"orders": "search"})
            info = run_search(cfg)
            print(f"best indices {info['structural_indices']} with PQ norm {info['best_score']:.4f}")
        else:
            cfg = run_config_from_options(_merge(args, RUN_KEYS))
            results = run_pipeline(cfg)
            for method, res in results.items():
                print(f"{method}: |PQ| = {res.report.pq_norm:.2f}  PQ = {np.round(res.report.pq, 2).tolist()}")
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, SchemaError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except KarmaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
