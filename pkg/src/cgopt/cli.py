"""Command-line experiment driver.

Every run is seeded with ``base seed + run index``. In comparison mode the
baselines get exactly the evaluation count CGO used for the same problem and
seed. Primary outputs (CSV, JSON, SVG) are byte-identical for a fixed
configuration; PNG figures are written next to them unless ``--no-figures``.

Exit codes: 0 success, 2 usage error, 3 ingestion error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import benchmarks, engineering, uav
from .baselines import PsoParams, pso_run, random_search_run
from .core import CgoParams, RunRecord, run
from .errors import CgoptError, ConfigurationError, IngestionError
from .stats import RunSet, build_table, summarize

ALGORITHMS = ("cgo", "pso", "random")

EXIT_OK, EXIT_USAGE, EXIT_INGEST, EXIT_IO = 0, 2, 3, 4


class UsageError(CgoptError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    problems: tuple[str, ...]
    algorithms: tuple[str, ...]
    runs: int
    pop: int
    iters: int
    seed: int
    out: Path
    emit_traces: bool = False
    figures: bool = True
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise UsageError(f"--runs must be >= 1, got {self.runs}")
        if self.pop < 2:
            raise UsageError(f"--pop must be >= 2, got {self.pop}")
        if self.iters < 1:
            raise UsageError(f"--iters must be >= 1, got {self.iters}")
        if self.seed < 0:
            raise UsageError(f"--seed must be >= 0, got {self.seed}")
        if self.jobs < 1:
            raise UsageError(f"--jobs must be >= 1, got {self.jobs}")

    @property
    def seeds(self) -> list[int]:
        return [self.seed + i for i in range(self.runs)]


def _select(requested, available: Sequence[str], what: str) -> tuple[str, ...]:
    if not requested or requested == ["all"]:
        return tuple(available)
    names = [n for item in requested for n in item.split(",") if n]
    unknown = [n for n in names if n not in available]
    if unknown:
        raise UsageError(f"unknown {what} {', '.join(unknown)}; valid names: {', '.join(available)}")
    return tuple(dict.fromkeys(names))


# --- running cells ---------------------------------------------------------


def run_cell(algorithm: str, problem, pop: int, iters: int, seed: int, budget: int | None = None) -> RunRecord:
    """One (algorithm, problem, seed) run. ``budget`` caps baseline evaluations."""
    if algorithm == "cgo":
        return run(problem.space, CgoParams(pop, iters, seed=seed), problem)
    if budget is None:
        budget = pop * (iters + 1)
    if algorithm == "pso":
        params = PsoParams(pop, max(1, math.ceil(budget / pop)), seed=seed, max_evaluations=budget)
        return pso_run(problem.space, params, problem)
    if algorithm == "random":
        return random_search_run(problem.space, budget, seed, problem)
    raise UsageError(f"unknown algorithm {algorithm}")


def _run_one(args):
    return run_cell(*args)


def _map(tasks, jobs):
    if jobs == 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_run_one, tasks, chunksize=1))


def run_grid(problems, config: ExperimentConfig) -> dict:
    """All cells, keyed ``(problem name, algorithm) -> [RunRecord per seed]``."""
    results: dict = {}
    if "cgo" in config.algorithms:
        tasks = [("cgo", p, config.pop, config.iters, s) for p in problems for s in config.seeds]
        records = iter(_map(tasks, config.jobs))
        for p in problems:
            results[(p.name, "cgo")] = [next(records) for _ in config.seeds]
    others = [a for a in config.algorithms if a != "cgo"]
    tasks = []
    for p in problems:
        cgo_runs = results.get((p.name, "cgo"))
        for a in others:
            for i, s in enumerate(config.seeds):
                budget = cgo_runs[i].evaluations if cgo_runs else None
                tasks.append((a, p, config.pop, config.iters, s, budget))
    records = iter(_map(tasks, config.jobs))
    for p in problems:
        for a in others:
            results[(p.name, a)] = [next(records) for _ in config.seeds]
    return {(p.name, a): results[(p.name, a)] for p in problems for a in config.algorithms}


# --- writers ---------------------------------------------------------------


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _fmt(x) -> str:
    return repr(float(x))


def trace_csv(record: RunRecord) -> str:
    lines = ["evaluations,best,violation"]
    for e, b, v in zip(record.evaluation_trace, record.best_trace, record.violation_trace):
        lines.append(f"{int(e)},{_fmt(b)},{_fmt(v)}")
    return "\n".join(lines) + "\n"


def _runsets(results, config):
    return [
        RunSet(algo, prob, [r.final_value for r in recs], config.seeds) for (prob, algo), recs in results.items()
    ]


def _emit_comparison(results, config, report_failures=False):
    table = build_table(_runsets(results, config), report_failures=report_failures)
    out = config.out
    _write(out / "summary.csv", table.to_csv())
    _write(out / "summary.json", table.to_json())
    _write(out / "pvalues.csv", table.pvalues_csv())
    if config.emit_traces:
        for (prob, algo), recs in results.items():
            for rec in recs:
                _write(out / "traces" / prob / f"{algo}_seed{rec.seed}.csv", trace_csv(rec))
    if config.figures:
        from .plotting import convergence_figure

        (out / "figures").mkdir(parents=True, exist_ok=True)
        for prob in dict.fromkeys(p for p, _ in results):
            by_algo = {a: results[(prob, a)] for a in config.algorithms}
            convergence_figure(by_algo, prob, out / "figures" / f"convergence_{prob}.png")
    return table


# --- subcommands -----------------------------------------------------------


def cmd_bench(config: ExperimentConfig, dim: int = 10):
    problems = {p.name: p for p in benchmarks.standard_suite(dim)}
    chosen = [problems[n] for n in config.problems]
    results = run_grid(chosen, config)
    table = _emit_comparison(results, config)
    return table, results


def cmd_engineering(config: ExperimentConfig):
    chosen = [engineering.get(n) for n in config.problems]
    results = run_grid(chosen, config)
    table = _emit_comparison(results, config, report_failures=True)
    lines = ["problem,label,best_known,algorithm,best,relative_gap,failed_runs"]
    for p in chosen:
        for a in config.algorithms:
            vals = [r.final_value for r in results[(p.name, a)]]
            best = min(vals)
            if p.best_known == 0.0:
                gap = best
            else:
                gap = (best - p.best_known) / abs(p.best_known)
            failed = sum(not math.isfinite(v) for v in vals)
            lines.append(f"{p.name},{p.label},{_fmt(p.best_known)},{a},{_fmt(best)},{_fmt(gap)},{failed}")
    _write(config.out / "reference.csv", "\n".join(lines) + "\n")
    return table, results


def resolve_scenario(source: str | None, waypoints: int | None = None) -> uav.Scenario:
    builtin = {s.name: s for s in uav.build_scenarios()}
    if source is None:
        scenario = builtin["dense7"]
    elif source in builtin:
        scenario = builtin[source]
    else:
        scenario = uav.read_scenario(source)
    if waypoints is not None:
        try:
            scenario = scenario.with_waypoints(waypoints)
        except ConfigurationError as exc:
            raise UsageError(str(exc)) from None
    return scenario


def cmd_uav(config: ExperimentConfig, scenario: uav.Scenario):
    problem = uav.UavProblem(scenario)
    results = run_grid([problem], config)
    out = config.out
    rows = ["algorithm,seed,length,obstacle,height,total,collision_free,in_band"]
    summary = {"scenario": scenario.name, "obstacles": len(scenario.obstacles), "algorithms": {}}
    best_paths = {}
    for algo in config.algorithms:
        recs = results[(problem.name, algo)]
        per_run = []
        for rec in recs:
            terms = uav.cost_terms(rec.final_best.position, scenario)
            path = uav.decode(rec.final_best.position, scenario)
            free = uav.is_collision_free(path, scenario)
            in_band = terms["height"] < uav.BIG
            per_run.append((rec, terms, path))
            rows.append(
                f"{algo},{rec.seed},{_fmt(terms['length'])},{_fmt(terms['obstacle'])},{_fmt(terms['height'])},"
                f"{_fmt(terms['total'])},{int(free)},{int(in_band)}"
            )
        rec, terms, path = min(per_run, key=lambda item: (item[1]["total"], item[0].seed))
        best_paths[algo] = path
        totals = summarize([t["total"] for _, t, _ in per_run]) if len(per_run) > 1 else None
        summary["algorithms"][algo] = {
            "best_seed": rec.seed,
            "best": {k: float(v) for k, v in terms.items()},
            "collision_free": bool(uav.is_collision_free(path, scenario)),
            "runs": len(per_run),
            "total_best": totals.best if totals else float(terms["total"]),
            "total_std": totals.std if totals else 0.0,
            "total_mean": totals.mean if totals else float(terms["total"]),
        }
        uav.write_path_csv(path, out / f"best_path_{algo}.csv")
        _write(out / f"view_{algo}.svg", uav.render_svg(scenario, path))
    _write(out / "runs.csv", "\n".join(rows) + "\n")
    _write(out / "summary.json", json.dumps(summary, indent=2) + "\n")
    uav.write_scenario(scenario, out / "scenario.txt")
    if config.emit_traces:
        for algo in config.algorithms:
            for rec in results[(problem.name, algo)]:
                _write(out / "traces" / f"{algo}_seed{rec.seed}.csv", trace_csv(rec))
    if config.figures:
        from .plotting import convergence_figure, uav_figure

        (out / "figures").mkdir(parents=True, exist_ok=True)
        uav_figure(scenario, best_paths, out / "figures" / f"uav_{scenario.name}.png")
        convergence_figure(
            {a: results[(problem.name, a)] for a in config.algorithms},
            f"UAV {scenario.name}",
            out / "figures" / "convergence.png",
        )
    return summary, results


def cmd_scenarios(out: Path) -> list[Path]:
    written = []
    for s in uav.build_scenarios():
        path = out / f"{s.name}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        uav.write_scenario(s, path)
        written.append(path)
    return written


# --- argument parsing ------------------------------------------------------


def _common(p: argparse.ArgumentParser, runs: int, iters: int, algos: str) -> None:
    p.add_argument("--problem", action="append", help="comma-separated names, or 'all' (default)")
    p.add_argument("--algo", action="append", help=f"comma-separated subset of {','.join(ALGORITHMS)} (default: {algos})")
    p.add_argument("--runs", type=int, default=runs)
    p.add_argument("--pop", type=int, default=50)
    p.add_argument("--iters", type=int, default=iters)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--emit-traces", action="store_true", help="write one CSV trace per run")
    p.add_argument("--no-figures", action="store_true", help="skip PNG figures")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgopt", description="Competitive game optimizer experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    bench = sub.add_parser("bench", help="benchmark suite comparison")
    _common(bench, runs=30, iters=1000, algos="cgo,pso,random")
    bench.add_argument("--dim", type=int, default=10)
    eng = sub.add_parser("engineering", help="constrained engineering design problems")
    _common(eng, runs=30, iters=50, algos="cgo,pso,random")
    plan = sub.add_parser("uav", help="UAV path planning")
    _common(plan, runs=1, iters=300, algos="cgo")
    plan.add_argument("--scenario", help="scenario file, or a built-in name (dense7, sparse4)")
    plan.add_argument("--waypoints", type=int, help="override the number of track points")
    scen = sub.add_parser("scenarios", help="write the built-in UAV scenarios as files")
    scen.add_argument("--out", type=Path, default=Path("scenarios"))
    return parser


def _config(args, problems, default_algos) -> ExperimentConfig:
    algos = _select(args.algo or [default_algos], ALGORITHMS, "algorithm")
    return ExperimentConfig(
        problems=problems,
        algorithms=algos,
        runs=args.runs,
        pop=args.pop,
        iters=args.iters,
        seed=args.seed,
        out=args.out,
        emit_traces=args.emit_traces,
        figures=not args.no_figures,
        jobs=args.jobs,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scenarios":
            for path in cmd_scenarios(args.out):
                print(path)
            return EXIT_OK
        if args.command == "bench":
            if args.dim < 2:
                raise UsageError(f"--dim must be >= 2, got {args.dim}")
            names = [p.name for p in benchmarks.standard_suite(args.dim)]
            config = _config(args, _select(args.problem, names, "problem"), "cgo,pso,random")
            args.out.mkdir(parents=True, exist_ok=True)
            table, _ = cmd_bench(config, args.dim)
            sys.stdout.write(table.to_csv())
        elif args.command == "engineering":
            names = [p.name for p in engineering.suite()]
            labels = {p.label: p.name for p in engineering.suite()}
            requested = [labels.get(n, n) for item in (args.problem or []) for n in item.split(",")] or None
            config = _config(args, _select(requested, names, "problem"), "cgo,pso,random")
            args.out.mkdir(parents=True, exist_ok=True)
            table, _ = cmd_engineering(config)
            sys.stdout.write(table.to_csv())
        else:
            scenario = resolve_scenario(args.scenario, args.waypoints)
            config = _config(args, (scenario.name,), "cgo")
            args.out.mkdir(parents=True, exist_ok=True)
            summary, _ = cmd_uav(config, scenario)
            lines = ["algorithm,length,obstacle,height,total,collision_free"]
            for algo, info in summary["algorithms"].items():
                b = info["best"]
                lines.append(
                    f"{algo},{_fmt(b['length'])},{_fmt(b['obstacle'])},{_fmt(b['height'])},{_fmt(b['total'])},"
                    f"{int(info['collision_free'])}"
                )
            sys.stdout.write("\n".join(lines) + "\n")
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cgopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IngestionError as exc:
        print(f"cgopt: ingestion error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except ConfigurationError as exc:
        print(f"cgopt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cgopt: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
