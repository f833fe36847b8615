"""Command-line interface: ``rssl simulate | bench | compare | report``.

Settings come from built-in defaults, then an optional flat ``key = value``
config file (``--config``), then ``RSSL_SEED`` for the seed, then flags.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable

from rssl import __version__
from rssl.data import Task, load_csv, write_csv
from rssl.errors import DataError, NumericalError
from rssl.evaluation import (
    BenchmarkReport,
    BenchSettings,
    MethodId,
    SCHEMA_VERSION,
    avte,
    comparison_csv,
    comparison_rows,
    format_comparison,
    format_report,
    rho_sweep,
)
from rssl.forest import ForestConfig
from rssl.learners import FitConfig
from rssl.plots import box_plot, line_plot
from rssl.synthetic import ScenarioConfig, generate, scenario_grid, true_beta
from rssl.weighting import Scheme

log = logging.getLogger("rssl")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _auto_or_int(v: str) -> int | str:
    return "auto" if str(v).strip().lower() == "auto" else int(v)


def _opt_int(v: str) -> int | None:
    return None if str(v).strip().lower() in ("", "none", "auto") else int(v)


def _methods(v: str) -> list[str]:
    out = [m.strip() for m in str(v).split(",") if m.strip()]
    for m in out:
        try:
            MethodId(m)
        except ValueError:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(x.value for x in MethodId)}") from None
    return out


def _floats(v: str) -> list[float]:
    return [float(x) for x in str(v).split(",") if x.strip()]


def _weightings(v: str) -> list[str]:
    out = [w.strip() for w in str(v).split(",") if w.strip()]
    for w in out:
        if w not in (Scheme.CORRELATION.value, Scheme.FSTAT.value, Scheme.UNIFORM.value):
            raise UsageError(f"unknown weighting {w!r}")
    return out


# closed schema: dotted config key -> (flag dest, parser, default)
SCHEMA: dict[str, tuple[str, Callable[[str], Any], Any]] = {
    "seed": ("seed", int, 0),
    "task": ("task", str, "regression"),
    "threads": ("threads", int, 1),
    "out": ("out", str, "."),
    "format": ("format", str, "md"),
    "methods": ("methods", _methods, None),
    "data.path": ("data", str, None),
    "data.target": ("target", str, "y"),
    "scenario.n": ("n", int, None),
    "scenario.p": ("p", int, None),
    "scenario.rho": ("rho", float, None),
    "scenario.rhos": ("rhos", _floats, None),
    "scenario.k_true": ("k_true", _opt_int, None),
    "scenario.noise_sd": ("noise_sd", float, 1.0),
    "scenario.test_size": ("test_size", int, 1000),
    "rssl.learners": ("learners", int, 450),
    "rssl.subset_size": ("subset_size", _auto_or_int, "auto"),
    "rssl.weighting": ("weighting", _weightings, None),
    "fit.ridge_jitter": ("ridge_jitter", float, 1e-6),
    "fit.max_iter": ("max_iter", int, 100),
    "fit.tol": ("tol", float, 1e-8),
    "fit.svd_rcond": ("svd_rcond", float, 1e-10),
    "forest.trees": ("trees", int, 450),
    "forest.mtry": ("mtry", _opt_int, None),
    "forest.min_leaf": ("min_leaf", _opt_int, None),
    "forest.max_depth": ("max_depth", int, 30),
    "protocol.replications": ("replications", int, 100),
    "protocol.split": ("split", float, 0.7),
}
_BY_DEST = {dest: (key, parse) for key, (dest, parse, _) in SCHEMA.items()}


def read_config(path: str | Path) -> dict[str, Any]:
    """Parse flat ``key = value`` lines (``#`` starts a comment) against :data:`SCHEMA`."""
    values: dict[str, Any] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        dest, parse, _ = SCHEMA[key]
        try:
            values[dest] = parse(value)
        except (ValueError, UsageError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _flag(parser: argparse.ArgumentParser, name: str, dest: str, help: str, **kw) -> None:
    _, parse = _BY_DEST[dest]
    parser.add_argument(name, dest=dest, type=parse, default=None, help=help, **kw)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    _flag(p, "--seed", "seed", "master seed (falls back to $RSSL_SEED, then 0)")
    _flag(p, "--out", "out", "output directory")
    _flag(p, "--threads", "threads", "worker threads for member fitting (results do not depend on it)")


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    _flag(p, "--task", "task", "regression or classification")
    _flag(p, "--n", "n", "training rows")
    _flag(p, "--p", "p", "features")
    _flag(p, "--rho", "rho", "equicorrelation coefficient in [0, 1)")
    _flag(p, "--k-true", "k_true", "number of non-zero true coefficients (default min(10, p))")
    _flag(p, "--noise-sd", "noise_sd", "regression noise standard deviation")
    _flag(p, "--test-size", "test_size", "rows in each generated test set")


def _model_flags(p: argparse.ArgumentParser) -> None:
    _flag(p, "--learners", "learners", "ensemble members L")
    _flag(p, "--subset-size", "subset_size", "features per member d, or 'auto'")
    _flag(p, "--trees", "trees", "random forest trees")
    _flag(p, "--mtry", "mtry", "features tried per forest split")
    _flag(p, "--replications", "replications", "replicated splits R")
    _flag(p, "--split", "split", "training fraction for real-data splits")
    _flag(p, "--methods", "methods", "comma list of: " + ",".join(m.value for m in MethodId))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rssl", description="Adaptive random subspace learning benchmarks.")
    parser.add_argument("--version", action="version", version=f"rssl {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="write synthetic train/test CSVs")
    _common(sim)
    _scenario_flags(sim)
    sim.add_argument("--grid", action="store_true", help="write all twelve benchmark scenarios")

    bench = sub.add_parser("bench", help="average test error of several methods on one data source")
    _common(bench)
    _scenario_flags(bench)
    _model_flags(bench)
    _flag(bench, "--data", "data", "CSV dataset (instead of a synthetic scenario)")
    _flag(bench, "--target", "target", "target column of --data")
    _flag(bench, "--rhos", "rhos", "comma list of rho values: run a correlation sweep")

    cmp_ = sub.add_parser("compare", help="run the scenario grid for one task")
    _common(cmp_)
    _model_flags(cmp_)
    _flag(cmp_, "--task", "task", "regression or classification")
    _flag(cmp_, "--weighting", "weighting", "comma list of correlation,fstat")
    cmp_.add_argument("--grid", action="store_true", help="accepted for symmetry; compare always runs the grid")

    rep = sub.add_parser("report", help="render tables and an SVG plot from a results JSON")
    _common(rep)
    rep.add_argument("input", help="results.json, compare.json or sweep results")
    _flag(rep, "--format", "format", "md or csv")
    rep.add_argument("--log-scale", action="store_true", help="logarithmic loss axis")
    return parser


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    settings = {dest: default for _, (dest, _, default) in SCHEMA.items()}
    if getattr(args, "config", None):
        settings.update(read_config(args.config))
    env_seed = os.environ.get("RSSL_SEED")
    if env_seed is not None and getattr(args, "seed", None) is None:
        try:
            settings["seed"] = int(env_seed)
        except ValueError:
            raise UsageError(f"RSSL_SEED must be an integer, got {env_seed!r}") from None
    for dest in _BY_DEST:
        v = getattr(args, dest, None)
        if v is not None:
            settings[dest] = v
    try:
        settings["task"] = Task.parse(settings["task"]).value
    except DataError as exc:
        raise UsageError(str(exc)) from None
    return settings


def _scenario(s: dict[str, Any], rho: float | None = None) -> ScenarioConfig:
    missing = [k for k in ("n", "p") if s[k] is None]
    if rho is None and s["rho"] is None:
        missing.append("rho")
    if missing:
        raise UsageError("scenario needs " + ", ".join("--" + m for m in missing))
    return ScenarioConfig(
        s["n"],
        s["p"],
        s["rho"] if rho is None else rho,
        s["task"],
        s["seed"],
        s["k_true"],
        s["noise_sd"],
        s["test_size"],
    )


def _bench_settings(s: dict[str, Any]) -> BenchSettings:
    try:
        return BenchSettings(
            learners=s["learners"],
            subset_size=s["subset_size"],
            fit=FitConfig(s["ridge_jitter"], s["max_iter"], s["tol"], s["svd_rcond"]),
            forest=ForestConfig(s["trees"], s["mtry"], s["min_leaf"], s["max_depth"]),
            replications=s["replications"],
            split=s["split"],
            threads=s["threads"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _dump(path: Path, doc: Any) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _out(s: dict[str, Any]) -> Path:
    out = Path(s["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_scenario(config: ScenarioConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    train, test = generate(config)
    write_csv(train, out / "train.csv")
    write_csv(test, out / "test.csv")
    _dump(out / "scenario.json", {"config": config.to_dict(), "beta": true_beta(config).tolist()})


def cmd_simulate(s: dict[str, Any], args: argparse.Namespace) -> int:
    out = _out(s)
    if args.grid:
        for config in scenario_grid(seed=s["seed"]):
            _write_scenario(config, out / config.name)
        return EXIT_OK
    _write_scenario(_scenario(s), out)
    return EXIT_OK


def _echo(s: dict[str, Any], settings: BenchSettings) -> dict[str, Any]:
    return {"seed": s["seed"], "task": s["task"], **settings.to_dict()}


def cmd_bench(s: dict[str, Any], args: argparse.Namespace) -> int:
    settings = _bench_settings(s)
    methods = s["methods"] or [m.value for m in MethodId]
    out = _out(s)
    invocation = {"command": "bench", "methods": methods}
    if s["data"]:
        data = load_csv(s["data"], s["target"], s["task"])
        report = avte(data, methods, settings, s["seed"])
        report.source = Path(s["data"]).name
        doc = report.to_dict(invocation, _echo(s, settings))
        text = format_report(report)
    elif s["rhos"]:
        sweep = rho_sweep(_scenario(s, rho=0.0), s["rhos"], methods, settings, s["seed"])
        doc = {
            "schema_version": SCHEMA_VERSION,
            "invocation": invocation,
            "config": _echo(s, settings),
            "sweep": [{"rho": rho, **rep.to_dict()} for rho, rep in zip(sweep.rhos, sweep.reports)],
        }
        for entry in doc["sweep"]:
            for k in ("schema_version", "invocation", "config"):
                entry.pop(k)
        (out / "sweep.csv").write_text(sweep.to_csv(), encoding="utf-8")
        text = "".join(format_report(r) for r in sweep.reports)
    else:
        report = avte(_scenario(s), methods, settings, s["seed"])
        doc = report.to_dict(invocation, _echo(s, settings))
        text = format_report(report)
    _dump(out / "results.json", doc)
    (out / "results.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_compare(s: dict[str, Any], args: argparse.Namespace) -> int:
    settings = _bench_settings(s)
    task = Task.parse(s["task"])
    if s["weighting"]:
        schemes = [Scheme(w) for w in s["weighting"] if w != Scheme.UNIFORM.value]
    elif task is Task.REGRESSION:
        schemes = [Scheme.CORRELATION, Scheme.FSTAT]
    else:
        schemes = [Scheme.FSTAT]
    adaptive = {Scheme.CORRELATION: MethodId.ADAPTIVE_CORR, Scheme.FSTAT: MethodId.ADAPTIVE_FSTAT}
    methods = s["methods"] or (
        [MethodId.SINGLE.value, MethodId.UNIFORM.value]
        + [adaptive[sc].value for sc in schemes]
        + [MethodId.FOREST.value]
    )
    reports: list[BenchmarkReport] = []
    for config in scenario_grid(task, seed=s["seed"]):
        log.info("running %s", config.name)
        reports.append(avte(config, methods, settings, s["seed"]))
    rows = comparison_rows(reports, schemes)
    table = format_comparison(rows, task)
    out = _out(s)
    (out / "compare.txt").write_text(table, encoding="utf-8")
    (out / "compare.csv").write_text(comparison_csv(rows), encoding="utf-8")
    _dump(
        out / "compare.json",
        {
            "schema_version": SCHEMA_VERSION,
            "invocation": {"command": "compare", "methods": methods, "weighting": [sc.value for sc in schemes]},
            "config": _echo(s, settings),
            "scenarios": [r.to_dict() for r in reports],
        },
    )
    sys.stdout.write(table)
    return EXIT_OK


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _csv_table(header: list[str], rows: list[list[str]]) -> str:
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_report(s: dict[str, Any], args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read results {args.input}: {exc}") from None
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported schema_version {doc.get('schema_version')!r}")
    fmt = s["format"]
    if fmt not in ("md", "csv"):
        raise UsageError("--format must be md or csv")
    header = ["source", "rho", "method", "mean", "std", "R"]
    rows: list[list[str]] = []

    def add(block: dict, rho: Any) -> None:
        src = block.get("dataset_or_scenario", {}).get("id", "")
        for m in block["methods"]:
            rows.append([src, "" if rho is None else repr(rho), m["id"], repr(m["mean"]), repr(m["std"]), str(len(m["losses"]))])

    if "sweep" in doc:
        for entry in doc["sweep"]:
            add(entry, entry["rho"])
        names = [m["id"] for m in doc["sweep"][0]["methods"]] if doc["sweep"] else []
        series = {n: [next(m["mean"] for m in e["methods"] if m["id"] == n) for e in doc["sweep"]] for n in names}
        svg = line_plot(
            [f"{e['rho']:g}" for e in doc["sweep"]], series, "mean test loss vs correlation", "rho", "mean loss", args.log_scale
        )
    elif "scenarios" in doc:
        for entry in doc["scenarios"]:
            add(entry, entry["dataset_or_scenario"].get("scenario", {}).get("rho"))
        labels = [e["dataset_or_scenario"]["id"].split("-", 1)[1] for e in doc["scenarios"]]
        names = [m["id"] for m in doc["scenarios"][0]["methods"]] if doc["scenarios"] else []
        series = {n: [next(m["mean"] for m in e["methods"] if m["id"] == n) for e in doc["scenarios"]] for n in names}
        svg = line_plot(labels, series, "mean test loss per scenario", "scenario", "mean loss", args.log_scale)
    elif "methods" in doc:
        add(doc, doc.get("dataset_or_scenario", {}).get("scenario", {}).get("rho"))
        groups = {m["id"]: m["losses"] for m in doc["methods"]}
        svg = box_plot(groups, f"test loss over replications: {doc['dataset_or_scenario'].get('id', '')}", "loss", args.log_scale)
    else:
        raise DataError("results JSON has neither methods, sweep nor scenarios")

    text = _md_table(header, rows) if fmt == "md" else _csv_table(header, rows)
    out = _out(s)
    (out / f"report.{fmt}").write_text(text, encoding="utf-8")
    (out / "report.svg").write_text(svg, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "bench": cmd_bench, "compare": cmd_compare, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
        settings = resolve(args)
        return COMMANDS[args.command](settings, args)
    except UsageError as exc:
        print(f"rssl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"rssl: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, FileNotFoundError) as exc:
        print(f"rssl: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
