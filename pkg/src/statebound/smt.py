"""SMT encodings of "a simple path of length k exists in the state space"
and the iterative search that turns them into the longest-simple-path length.

Two encodings are emitted as solver-agnostic SMT-LIB 2 scripts:

* explicit — an uninterpreted state sort with one constant per valid state,
  an edge predicate tabulated over the whole state space, and a chain of k+1
  pairwise-distinct step constants. Script size grows with the square of the
  state-space size.
* factored — Boolean per-step action and variable constants with frame
  equivalences, so the solver explores the state space lazily. Script size
  grows with k * (actions * variables + k * variables).

Each query spawns one external solver process (configurable command; the
bundled ``statebound-solve`` is the default) and reads back the first output
token. The search over k is monotone, so either a linear scan or doubling
plus binary search yields the exact value.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from functools import cached_property

from .core import DEFAULT_VAR_CAP, Action, FullState, System, build_transition_graph
from .oracle import exp_bound

SOLVER_ENV_VAR = "STATEBOUND_SOLVER"

_MODEL_BOOL_RE = re.compile(
    r"\(\s*define-fun\s+([^\s()]+)\s*\(\s*\)\s*Bool\s+(true|false)\s*\)"
)


class SolverError(RuntimeError):
    """The external solver failed; carries the query log gathered so far."""

    def __init__(self, message: str, queries: tuple = ()) -> None:
        super().__init__(message)
        self.queries = queries


@dataclass(frozen=True)
class SmtDocument:
    """A self-contained SMT-LIB 2 script: set-logic, declarations, assertions
    and exactly one (check-sat)."""

    logic: str
    declarations: tuple[str, ...]
    assertions: tuple[str, ...]
    encoding: str  # "explicit" | "factored"
    k: int
    get_model: bool = False

    @cached_property
    def rendering(self) -> str:
        lines = [f"(set-logic {self.logic})"]
        lines.extend(self.declarations)
        lines.extend(f"(assert {body})" for body in self.assertions)
        lines.append("(check-sat)")
        if self.get_model:
            lines.append("(get-model)")
        return "\n".join(lines) + "\n"

    def script_name(self) -> str:
        tag = 1 if self.encoding == "explicit" else 2
        return f"phi{tag}_k{self.k}.smt2"


def _or_term(parts: list[str]) -> str:
    if not parts:
        return "false"
    if len(parts) == 1:
        return parts[0]
    return "(or " + " ".join(parts) + ")"


def _and_term(parts: list[str]) -> str:
    if not parts:
        return "true"
    if len(parts) == 1:
        return parts[0]
    return "(and " + " ".join(parts) + ")"


def encode_explicit(
    system: System,
    k: int,
    max_vars: int = DEFAULT_VAR_CAP,
    get_model: bool = False,
) -> SmtDocument:
    """Whole-state-space encoding: satisfiable iff a simple path with k edges
    exists. Builds the explicit transition graph, so the script enumerates
    every ordered state pair."""
    if k < 1:
        raise ValueError("k must be at least 1")
    graph = build_transition_graph(system, max_vars=max_vars)
    n = graph.num_states
    decls = ["(declare-sort S 0)"]
    decls.extend(f"(declare-fun s{i} () S)" for i in range(n))
    decls.extend(f"(declare-fun y{i} () S)" for i in range(1, k + 2))
    decls.append("(declare-fun G (S S) Bool)")

    assertions: list[str] = []
    if n >= 2:
        assertions.append("(distinct " + " ".join(f"s{i}" for i in range(n)) + ")")
    edge_set = set()
    for u, succs in enumerate(graph.adj):
        for v in succs:
            edge_set.add((u, v))
            assertions.append(f"(G s{u} s{v})")
    for u in range(n):
        for v in range(n):
            if (u, v) not in edge_set:
                assertions.append(f"(not (G s{u} s{v}))")
    for i in range(1, k + 1):
        assertions.append(f"(G y{i} y{i + 1})")
    for i in range(1, k + 2):
        for j in range(i + 1, k + 2):
            assertions.append(f"(not (= y{i} y{j}))")
    for i in range(1, k + 2):
        assertions.append(_or_term([f"(= y{i} s{u})" for u in range(n)]))
    return SmtDocument(
        logic="QF_UF",
        declarations=tuple(decls),
        assertions=tuple(assertions),
        encoding="explicit",
        k=k,
        get_model=get_model,
    )


def _var_symbol(var_id: int, step: int) -> str:
    return f"v{var_id}_s{step}"


def _action_symbol(action_index: int, step: int) -> str:
    return f"a{action_index}_s{step}"


def encode_factored(system: System, k: int, get_model: bool = False) -> SmtDocument:
    """Factored encoding over per-step Boolean constants: an action constant
    implies its preconditions now, its effects next, and frame equivalences
    for untouched variables; some action fires each step; every pair of steps
    differs in some variable."""
    if k < 1:
        raise ValueError("k must be at least 1")
    domain = system.domain
    actions = system.actions

    decls: list[str] = []
    for var_id in domain:
        decls.extend(
            f"(declare-fun {_var_symbol(var_id, i)} () Bool)" for i in range(1, k + 2)
        )
    for j in range(len(actions)):
        decls.extend(
            f"(declare-fun {_action_symbol(j, i)} () Bool)" for i in range(1, k + 1)
        )

    def literal(var_id: int, value: bool, step: int) -> str:
        name = _var_symbol(var_id, step)
        return name if value else f"(not {name})"

    assertions: list[str] = []
    for i in range(1, k + 1):
        for j, action in enumerate(actions):
            parts = [literal(v, val, i) for v, val in action.pre.items()]
            parts += [literal(v, val, i + 1) for v, val in action.eff.items()]
            parts += [
                f"(= {_var_symbol(v, i)} {_var_symbol(v, i + 1)})"
                for v in domain
                if v not in action.eff
            ]
            assertions.append(f"(=> {_action_symbol(j, i)} {_and_term(parts)})")
    for i in range(1, k + 1):
        assertions.append(_or_term([_action_symbol(j, i) for j in range(len(actions))]))
    for i in range(1, k + 2):
        for j in range(i + 1, k + 2):
            assertions.append(
                _or_term(
                    [
                        f"(xor {_var_symbol(v, i)} {_var_symbol(v, j)})"
                        for v in domain
                    ]
                )
            )
    return SmtDocument(
        logic="QF_UF",
        declarations=tuple(decls),
        assertions=tuple(assertions),
        encoding="factored",
        k=k,
        get_model=get_model,
    )


@dataclass(frozen=True)
class SolverConfig:
    """How to launch the external solver.

    ``command`` may contain a ``{script}`` placeholder; when present the
    script is written to a temporary file and the placeholder substituted,
    otherwise the script is piped to the solver's standard input. One process
    is spawned per query.
    """

    command: tuple[str, ...]
    timeout_ms: int = 60_000

    @classmethod
    def bundled(cls, timeout_ms: int = 60_000) -> "SolverConfig":
        """The packaged fallback solver, launched by file path so the child
        skips the package import."""
        from . import minisolver

        return cls(command=(sys.executable, minisolver.__file__), timeout_ms=timeout_ms)

    @classmethod
    def from_string(cls, text: str, timeout_ms: int = 60_000) -> "SolverConfig":
        parts = tuple(shlex.split(text))
        if not parts:
            raise ValueError("empty solver command")
        return cls(command=parts, timeout_ms=timeout_ms)

    @classmethod
    def from_env(cls, timeout_ms: int = 60_000) -> "SolverConfig":
        """Environment override via STATEBOUND_SOLVER, else the bundled solver."""
        text = os.environ.get(SOLVER_ENV_VAR, "").strip()
        if text:
            return cls.from_string(text, timeout_ms)
        return cls.bundled(timeout_ms)


@dataclass(frozen=True)
class SolverVerdict:
    """One solver answer: sat/unsat/unknown/timeout/solver-error plus the raw
    first token and, when requested and available, the Boolean model."""

    status: str
    elapsed_ms: float
    raw: str = ""
    model: dict[str, bool] | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


def run_solver(doc: SmtDocument, cfg: SolverConfig) -> SolverVerdict:
    """Run one query in a fresh solver process and classify the response."""
    text = doc.rendering
    command = list(cfg.command)
    uses_file = any("{script}" in part for part in command)
    started = time.perf_counter()
    script_path = None
    try:
        if uses_file:
            handle = tempfile.NamedTemporaryFile(
                "w", suffix=".smt2", delete=False, encoding="utf-8"
            )
            with handle:
                handle.write(text)
            script_path = handle.name
            command = [part.replace("{script}", script_path) for part in command]
            stdin_text = None
        else:
            stdin_text = text
        try:
            proc = subprocess.run(
                command,
                input=stdin_text,
                capture_output=True,
                text=True,
                timeout=cfg.timeout_ms / 1000.0,
            )
        except subprocess.TimeoutExpired:
            return SolverVerdict("timeout", _elapsed_ms(started))
        except (FileNotFoundError, PermissionError, OSError) as exc:
            return SolverVerdict("solver-error", _elapsed_ms(started), raw=str(exc))
        token = _first_token(proc.stdout)
        if token in ("sat", "unsat", "unknown"):
            model = None
            if token == "sat" and doc.get_model:
                model = {
                    name: value == "true"
                    for name, value in _MODEL_BOOL_RE.findall(proc.stdout)
                }
            return SolverVerdict(token, _elapsed_ms(started), raw=token, model=model)
        return SolverVerdict("solver-error", _elapsed_ms(started), raw=token or "")
    finally:
        if script_path is not None:
            try:
                os.unlink(script_path)
            except OSError:
                pass


def _elapsed_ms(started: float) -> float:
    return (time.perf_counter() - started) * 1000.0


def _first_token(stdout: str) -> str | None:
    for line in stdout.splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith(";"):
            continue
        return stripped.split()[0]
    return None


@dataclass(frozen=True)
class RdResult:
    """Outcome of the iterative search: the largest satisfiable k. When a
    query timed out, ``exact`` is False and ``rd`` is only a lower bound."""

    rd: int
    exact: bool
    encoding: str
    queries: tuple[tuple[int, SolverVerdict], ...] = ()

    @property
    def total_queries(self) -> int:
        return len(self.queries)

    @property
    def total_time_ms(self) -> float:
        return sum(v.elapsed_ms for _, v in self.queries)


def rd_via_smt(
    system: System,
    encoding: str = "factored",
    cfg: SolverConfig | None = None,
    schedule: str = "linear",
    max_vars: int = DEFAULT_VAR_CAP,
    get_model: bool = False,
) -> RdResult:
    """Compute the longest-simple-path length by repeated solver queries.

    The linear schedule asks k = 1, 2, 3, ... until the first unsat; the
    binary schedule doubles k to bracket the answer and then bisects, which
    is valid because satisfiability is monotone in k.
    """
    if encoding not in ("explicit", "factored"):
        raise ValueError(f"unknown encoding {encoding!r}")
    if schedule not in ("linear", "binary"):
        raise ValueError(f"unknown schedule {schedule!r}")
    if cfg is None:
        cfg = SolverConfig.from_env()

    def encode(k: int) -> SmtDocument:
        if encoding == "explicit":
            return encode_explicit(system, k, max_vars=max_vars, get_model=get_model)
        return encode_factored(system, k, get_model=get_model)

    queries: list[tuple[int, SolverVerdict]] = []
    k_cap = exp_bound(system)  # no simple path can be longer

    def query(k: int) -> str:
        verdict = run_solver(encode(k), cfg)
        queries.append((k, verdict))
        if verdict.status in ("solver-error", "unknown"):
            raise SolverError(
                f"solver failed on {encoding} query k={k}: "
                f"{verdict.status} {verdict.raw!r}",
                queries=tuple(queries),
            )
        return verdict.status

    def result(rd: int, exact: bool) -> RdResult:
        return RdResult(rd=rd, exact=exact, encoding=encoding, queries=tuple(queries))

    def check_consistent(k: int, status: str) -> None:
        # k_cap + 1 distinct states cannot exist, so sat there is a solver bug.
        if status == "sat" and k > k_cap:
            raise SolverError(
                f"solver reported sat beyond the state-count bound (k={k})",
                queries=tuple(queries),
            )

    if schedule == "linear":
        best = 0
        k = 1
        while True:
            status = query(k)
            if status == "unsat":
                return result(best, True)
            if status == "timeout":
                return result(best, False)
            check_consistent(k, status)
            best = k
            k += 1

    # doubling then bisection
    low = 0
    high = None
    k = 1
    while high is None:
        status = query(k)
        if status == "timeout":
            return result(low, False)
        if status == "unsat":
            high = k
        else:
            check_consistent(k, status)
            low = k
            k = min(2 * k, k_cap + 1)
    while high - low > 1:
        mid = (low + high) // 2
        status = query(mid)
        if status == "timeout":
            return result(low, False)
        if status == "unsat":
            high = mid
        else:
            low = mid
    return result(low, True)


def decode_factored_model(
    system: System, k: int, model: dict[str, bool]
) -> tuple[list[FullState], list[list[Action]]]:
    """Turn a factored-encoding model into the traversed states and the
    actions enabled at each step."""
    states = []
    for step in range(1, k + 2):
        states.append(
            FullState.from_items(
                (var_id, model.get(_var_symbol(var_id, step), False))
                for var_id in system.domain
            )
        )
    enabled: list[list[Action]] = []
    for step in range(1, k + 1):
        enabled.append(
            [
                action
                for j, action in enumerate(system.actions)
                if model.get(_action_symbol(j, step), False)
            ]
        )
    return states, enabled
