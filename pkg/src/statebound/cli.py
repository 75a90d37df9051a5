"""Command-line front end: topological analysis, longest-simple-path search
through an external solver, compositional bounding over files or generated
families, and the td/rd coincidence harness.

Exit codes: 0 all requested outputs were produced, 2 configuration error,
3 input parse error, 4 cap or solver hard failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import io as sysio
from .compose import BaseCaseKind, BoundConfig, BoundReport, compositional_bound
from .core import StateSpaceTooLargeError, System, build_transition_graph
from .gen import GenerationError, GeneratorSpec, generate, provenance
from .oracle import (
    MAX_BOUND,
    SimplePathSearchTooLargeError,
    check_conjecture,
    compute_topo_report,
    longest_simple_path,
    recurrence_diameter_bruteforce,
    traversal_walk,
)
from .smt import (
    SOLVER_ENV_VAR,
    SolverConfig,
    SolverError,
    encode_explicit,
    encode_factored,
    rd_via_smt,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_HARD = 4


class _CliError(Exception):
    def __init__(self, message: str, code: int) -> None:
        super().__init__(message)
        self.code = code


def _machine_reason(exc: Exception) -> str:
    kind = {
        StateSpaceTooLargeError: "state-space-too-large",
        SimplePathSearchTooLargeError: "simple-path-search-too-large",
        SolverError: "solver-failure",
        sysio.SystemParseError: "parse-error",
        GenerationError: "generator-error",
    }.get(type(exc), "error")
    return json.dumps({"error": kind, "detail": str(exc)})


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("input")
    group.add_argument("--input", metavar="PATH", help="system file (.json or compact text)")
    group.add_argument("--format", choices=("json", "compact"), help="override input format")
    group.add_argument(
        "--gen", choices=("clique", "star", "lotus", "random"), help="generate the input system"
    )
    group.add_argument("--n", type=int, help="size parameter for star/lotus/random families")
    group.add_argument("--m", type=int, help="variable count for the clique family")
    group.add_argument("--seed", type=int, default=0, help="random-family seed")
    group.add_argument("--vars", type=int, default=4, help="random-family variable count")
    group.add_argument("--actions", type=int, default=6, help="random-family action count")
    group.add_argument("--max-pre", type=int, default=2, help="random-family precondition size cap")
    group.add_argument("--max-eff", type=int, default=2, help="random-family effect size cap")


def _load_system(args: argparse.Namespace) -> tuple[System, str]:
    """Returns (system, problem name)."""
    if args.input and args.gen:
        raise _CliError("--input and --gen are mutually exclusive", EXIT_CONFIG)
    if args.input:
        path = Path(args.input)
        fmt = args.format or sysio.detect_format(path.name)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise _CliError(f"cannot read {path}: {exc}", EXIT_CONFIG) from exc
        return sysio.parse_system(text, fmt), path.stem
    if args.gen:
        size = args.m if args.gen == "clique" else args.n
        if args.gen == "random":
            spec = GeneratorSpec(
                family="random",
                seed=args.seed,
                num_vars=args.vars,
                num_actions=args.actions,
                max_pre=args.max_pre,
                max_eff=args.max_eff,
            )
            return generate(spec), f"random_s{args.seed}"
        if size is None:
            raise _CliError(f"--gen {args.gen} needs --n (or --m for clique)", EXIT_CONFIG)
        spec = GeneratorSpec(family=args.gen, n=size)
        return generate(spec), f"{args.gen}_{size}"
    raise _CliError("one of --input or --gen is required", EXIT_CONFIG)


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    if getattr(args, "solver_cmd", None):
        return SolverConfig.from_string(args.solver_cmd, timeout_ms=args.timeout_ms)
    return SolverConfig.from_env(timeout_ms=args.timeout_ms)


def _render_states(system: System, vertices) -> str:
    graph_states = [system.state_of_index(v) for v in vertices]
    return " -> ".join(f"[{system.format_state(s)}]" for s in graph_states)


def _fmt_bound(value: int) -> str:
    """Saturated values mean "at least this much"."""
    return f">={MAX_BOUND}" if value >= MAX_BOUND else str(value)


def cmd_topo(args: argparse.Namespace) -> int:
    system, name = _load_system(args)
    report = compute_topo_report(
        system, problem=name, max_vars=args.max_vars, max_states=args.rd_states
    )
    print(f"d={report.d} rd={report.rd} td={report.td} exp={_fmt_bound(report.exp)}")
    if args.witness:
        graph = build_transition_graph(system, max_vars=args.max_vars)
        _, rd_path = longest_simple_path(graph, max_states=args.rd_states)
        walk = traversal_walk(graph)
        print("rd witness:", _render_states(system, rd_path))
        print("td walk:   ", _render_states(system, walk))
    if args.csv:
        sysio.write_report(report, args.csv)
    return EXIT_OK


def cmd_rd(args: argparse.Namespace) -> int:
    system, name = _load_system(args)
    encode = encode_explicit if args.encoding == "explicit" else encode_factored

    if args.emit_smt:
        out_dir = Path(args.emit_smt)
        out_dir.mkdir(parents=True, exist_ok=True)
        from .oracle import exp_bound

        max_k = args.max_k if args.max_k is not None else min(exp_bound(system), 12)
        if max_k < 1:
            raise _CliError("nothing to emit: state space has a single state", EXIT_CONFIG)
        for k in range(1, max_k + 1):
            if args.encoding == "explicit":
                doc = encode_explicit(system, k, max_vars=args.max_vars)
            else:
                doc = encode_factored(system, k)
            (out_dir / doc.script_name()).write_text(doc.rendering, encoding="utf-8")
        print(f"wrote {max_k} scripts to {out_dir}")
        return EXIT_OK

    if args.bruteforce:
        value = recurrence_diameter_bruteforce(
            system, max_states=args.rd_states, max_vars=args.max_vars
        )
        print(f"rd={value} (bruteforce)")
        return EXIT_OK

    cfg = _solver_config(args)
    result = rd_via_smt(
        system,
        encoding=args.encoding,
        cfg=cfg,
        schedule=args.schedule,
        max_vars=args.max_vars,
    )
    marker = "exact" if result.exact else "lower-bound"
    print(f"rd={result.rd} ({marker}) problem={name} encoding={result.encoding}")
    for k, verdict in result.queries:
        print(f"  k={k} {verdict.status} {verdict.elapsed_ms:.0f}ms")
    return EXIT_OK


def _bound_one(
    path_or_system, args: argparse.Namespace, cfg: BoundConfig, kind: BaseCaseKind
) -> BoundReport:
    if isinstance(path_or_system, tuple):
        system, name = path_or_system
    else:
        path = Path(path_or_system)
        fmt = args.format or sysio.detect_format(path.name)
        system = sysio.parse_system(path.read_text(encoding="utf-8"), fmt)
        name = path.stem
    return compositional_bound(system, kind, cfg, problem=name)


def cmd_bound(args: argparse.Namespace) -> int:
    kind = BaseCaseKind(
        tag=args.base, rd_state_cap=args.rd_state_cap, td_trigger=args.td_trigger
    )
    use_solver = not args.bruteforce
    cfg = BoundConfig(
        solver=_solver_config(args) if use_solver else None,
        schedule=args.schedule,
        max_vars=args.max_vars,
        rd_max_states=args.rd_states,
    )

    problems: list = []
    if args.batch:
        batch_dir = Path(args.batch)
        if not batch_dir.is_dir():
            raise _CliError(f"--batch {batch_dir} is not a directory", EXIT_CONFIG)
        for path in sorted(batch_dir.iterdir()):
            if path.suffix in (".json", ".txt", ".fts"):
                problems.append(path)
        if not problems:
            raise _CliError(f"no .json/.txt/.fts files in {batch_dir}", EXIT_CONFIG)
    else:
        problems.append(_load_system(args))

    reports: list[BoundReport | None] = [None] * len(problems)
    failures: list[tuple[str, Exception]] = []

    def work(index: int) -> None:
        try:
            reports[index] = _bound_one(problems[index], args, cfg, kind)
        except Exception as exc:  # recorded, batch continues
            failures.append((str(problems[index]), exc))

    if args.jobs > 1 and len(problems) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(work, range(len(problems))))
    else:
        for index in range(len(problems)):
            work(index)

    done = [r for r in reports if r is not None]
    for report in done:
        flags = " degraded" if report.degraded else ""
        print(
            f"{report.problem}: total={_fmt_bound(report.total)} base={report.base.tag} "
            f"clusters={report.num_clusters}{flags}"
        )
    for name, exc in failures:
        print(f"{name}: FAILED {exc}", file=sys.stderr)
    if args.csv:
        sysio.write_report(done, args.csv)
    if failures:
        parse_failure = any(isinstance(e, sysio.SystemParseError) for _, e in failures)
        return EXIT_PARSE if parse_failure else EXIT_HARD
    return EXIT_OK


def cmd_conjecture(args: argparse.Namespace) -> int:
    try:
        first, last = args.seeds.split("..", 1)
        seed_range = range(int(first), int(last) + 1)
    except ValueError as exc:
        raise _CliError(f"--seeds must look like A..B: {exc}", EXIT_CONFIG) from exc
    if args.vars > 8:
        raise _CliError("--vars is capped at 8 for the exhaustive check", EXIT_CONFIG)
    counts = {"holds": 0, "vacuous": 0, "counterexample": 0}
    out_dir = Path(args.out) if args.out else Path.cwd()
    for seed in seed_range:
        spec = GeneratorSpec(
            family="random",
            seed=seed,
            num_vars=args.vars,
            num_actions=args.actions,
            max_pre=args.max_pre,
            max_eff=args.max_eff,
        )
        system = generate(spec)
        verdict = check_conjecture(system)
        counts[verdict.status] += 1
        if verdict.is_counterexample:
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / f"conjecture_counterexample_seed{seed}.json"
            path.write_text(
                sysio.serialize_system(
                    system,
                    "json",
                    metadata={**provenance(spec), "td": verdict.td, "rd": verdict.rd},
                ),
                encoding="utf-8",
            )
            print(f"counterexample at seed {seed}: td={verdict.td} rd={verdict.rd} -> {path}")
    print(
        f"holds={counts['holds']} vacuous={counts['vacuous']} "
        f"counterexamples={counts['counterexample']}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statebound",
        description=(
            "State-space topology and compositional plan-length bounds "
            "for factored transition systems."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    topo = sub.add_parser("topo", help="exact topological properties")
    _add_input_flags(topo)
    topo.add_argument("--witness", action="store_true", help="print rd/td witnesses")
    topo.add_argument("--csv", metavar="PATH", help="append a CSV report")
    topo.add_argument("--max-vars", type=int, default=20, help="explicit-state variable cap")
    topo.add_argument("--rd-states", type=int, default=4096, help="simple-path search state cap")
    topo.set_defaults(func=cmd_topo)

    rd = sub.add_parser("rd", help="longest simple path via an SMT solver")
    _add_input_flags(rd)
    rd.add_argument("--encoding", choices=("explicit", "factored"), default="factored")
    rd.add_argument("--schedule", choices=("linear", "binary"), default="linear")
    rd.add_argument("--solver-cmd", help=f"solver command (default ${SOLVER_ENV_VAR} or bundled)")
    rd.add_argument("--timeout-ms", type=int, default=60_000, help="per-query timeout")
    rd.add_argument("--bruteforce", action="store_true", help="bypass the solver")
    rd.add_argument("--emit-smt", metavar="DIR", help="write scripts instead of solving")
    rd.add_argument("--max-k", type=int, help="largest k for --emit-smt (default min(exp, 12))")
    rd.add_argument("--max-vars", type=int, default=20)
    rd.add_argument("--rd-states", type=int, default=4096)
    rd.set_defaults(func=cmd_rd)

    bound = sub.add_parser("bound", help="compositional plan-length bound")
    _add_input_flags(bound)
    bound.add_argument("--batch", metavar="DIR", help="bound every system file in a directory")
    bound.add_argument("--base", choices=("exp", "td", "rd", "b1", "b2"), default="b2")
    bound.add_argument("--rd-state-cap", type=int, default=50, help="b2 state-count cutoff")
    bound.add_argument("--td-trigger", type=int, default=2, help="b1 traversal-diameter cutoff")
    bound.add_argument("--solver-cmd", help=f"solver command (default ${SOLVER_ENV_VAR} or bundled)")
    bound.add_argument("--timeout-ms", type=int, default=60_000)
    bound.add_argument("--schedule", choices=("linear", "binary"), default="linear")
    bound.add_argument("--bruteforce", action="store_true", help="never call a solver")
    bound.add_argument("--csv", metavar="PATH", help="write per-problem CSV rows")
    bound.add_argument("--jobs", type=int, default=1, help="parallel problems")
    bound.add_argument("--max-vars", type=int, default=20)
    bound.add_argument("--rd-states", type=int, default=4096)
    bound.set_defaults(func=cmd_bound)

    conj = sub.add_parser("conjecture", help="td/rd coincidence harness")
    conj.add_argument("--seeds", required=True, metavar="A..B", help="inclusive seed range")
    conj.add_argument("--vars", type=int, default=5)
    conj.add_argument("--actions", type=int, default=8)
    conj.add_argument("--max-pre", type=int, default=2)
    conj.add_argument("--max-eff", type=int, default=2)
    conj.add_argument("--out", metavar="DIR", help="where to dump counterexamples")
    conj.set_defaults(func=cmd_conjecture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except sysio.SystemParseError as exc:
        print(_machine_reason(exc), file=sys.stderr)
        return EXIT_PARSE
    except (GenerationError, ValueError) as exc:
        print(_machine_reason(exc), file=sys.stderr)
        return EXIT_CONFIG
    except (StateSpaceTooLargeError, SimplePathSearchTooLargeError, SolverError) as exc:
        print(_machine_reason(exc), file=sys.stderr)
        return EXIT_HARD


if __name__ == "__main__":
    sys.exit(main())
