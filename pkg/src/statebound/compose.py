"""Projection abstraction, variable-dependency clustering, and composition of
per-cluster topology values into a plan-length bound for the whole system.

Clusters are the strongly connected components of the variable dependency
graph in topological order. Each cluster's projected subsystem gets a base
value (state-count bound, traversal diameter, longest simple path, or the
hybrid b1/b2 selectors that only pay for the expensive longest-simple-path
computation when cheap properties say it can help), and the values fold left
to right as bound = bound + (bound + 1) * next.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from .core import (
    DEFAULT_VAR_CAP,
    Action,
    PartialState,
    StateSpaceTooLargeError,
    System,
    Variable,
)
from .oracle import (
    DEFAULT_RD_STATE_CAP,
    MAX_BOUND,
    SimplePathSearchTooLargeError,
    exp_bound,
    recurrence_diameter_bruteforce,
    strongly_connected_components,
    traversal_diameter,
)
from .smt import RdResult, SolverConfig, SolverError, rd_via_smt

BASE_TAGS = ("exp", "td", "rd", "b1", "b2")


@dataclass(frozen=True)
class Projection:
    """A subsystem obtained by restricting every action to a variable subset;
    actions whose restricted effect is empty are dropped."""

    parent: System
    var_ids: tuple[int, ...]
    system: System


def project(system: System, var_ids) -> System:
    """Restrict preconditions and effects to ``var_ids``; variables are
    renumbered densely, keeping their names."""
    ids = tuple(sorted(set(var_ids)))
    if any(not system.domain_mask >> i & 1 for i in ids):
        raise ValueError("projection variables must lie inside the used domain")
    remap = {old: new for new, old in enumerate(ids)}
    variables = tuple(Variable(new, system.variables[old].name) for old, new in remap.items())

    def restrict(state: PartialState) -> PartialState:
        return PartialState.from_items(
            (remap[v], val) for v, val in state.items() if v in remap
        )

    actions = []
    for action in system.actions:
        eff = restrict(action.eff)
        if eff.mask == 0:
            continue  # would only produce self-loops
        actions.append(Action(restrict(action.pre), eff))
    return System(variables, tuple(actions))


def projection(system: System, var_ids) -> Projection:
    ids = tuple(sorted(set(var_ids)))
    return Projection(parent=system, var_ids=ids, system=project(system, ids))


def dependency_graph(system: System) -> dict[int, set[int]]:
    """Edge u -> v iff some action both touches u (precondition or effect)
    and writes v; u's value constrains or co-changes with v."""
    edges: dict[int, set[int]] = {v: set() for v in system.domain}
    for action in system.actions:
        sources = action.pre.domain() + action.eff.domain()
        for v in action.eff.domain():
            for u in sources:
                if u != v:
                    edges[u].add(v)
    return edges


@dataclass(frozen=True)
class ClusterDecomposition:
    """SCC clusters of the dependency graph in a deterministic topological
    order (ancestors first, ties broken by smallest contained variable id)."""

    clusters: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]  # indices into clusters


def decompose(system: System) -> ClusterDecomposition:
    domain = system.domain
    position = {v: i for i, v in enumerate(domain)}
    deps = dependency_graph(system)
    adj = [sorted(position[v] for v in deps[u]) for u in domain]
    sccs = strongly_connected_components(adj)
    comp_of = [0] * len(domain)
    for cid, members in enumerate(sccs):
        for pos in members:
            comp_of[pos] = cid
    cluster_vars = [tuple(sorted(domain[pos] for pos in members)) for members in sccs]
    cluster_edges: set[tuple[int, int]] = set()
    for pos, succs in enumerate(adj):
        for succ in succs:
            if comp_of[pos] != comp_of[succ]:
                cluster_edges.add((comp_of[pos], comp_of[succ]))

    # Kahn's algorithm with a min-heap on the smallest variable id.
    indegree = [0] * len(sccs)
    out: dict[int, list[int]] = {i: [] for i in range(len(sccs))}
    for u, v in sorted(cluster_edges):
        out[u].append(v)
        indegree[v] += 1
    ready = [(cluster_vars[i][0], i) for i in range(len(sccs)) if indegree[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        _, cid = heapq.heappop(ready)
        order.append(cid)
        for succ in out[cid]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                heapq.heappush(ready, (cluster_vars[succ][0], succ))
    renumber = {cid: i for i, cid in enumerate(order)}
    return ClusterDecomposition(
        clusters=tuple(cluster_vars[cid] for cid in order),
        edges=tuple(
            sorted((renumber[u], renumber[v]) for u, v in cluster_edges)
        ),
    )


@dataclass(frozen=True)
class BaseCaseKind:
    """Which topological property to compute on each cluster.

    ``b1`` pays for the longest-simple-path computation only when the
    traversal diameter exceeds ``td_trigger``; ``b2`` additionally restricts
    it to clusters with at most ``rd_state_cap`` + 1 states.
    """

    tag: str
    rd_state_cap: int = 50
    td_trigger: int = 2

    def __post_init__(self) -> None:
        if self.tag not in BASE_TAGS:
            raise ValueError(f"unknown base-case tag {self.tag!r}")
        if self.rd_state_cap < 1:
            raise ValueError("rd_state_cap must be at least 1")
        if self.td_trigger < 0:
            raise ValueError("td_trigger must be non-negative")


@dataclass(frozen=True)
class BoundConfig:
    """Knobs shared by every base-case evaluation."""

    solver: SolverConfig | None = None
    schedule: str = "linear"
    max_vars: int = DEFAULT_VAR_CAP
    rd_max_states: int = DEFAULT_RD_STATE_CAP


@dataclass(frozen=True)
class ClusterBound:
    """Base-case outcome on one projected cluster."""

    var_names: tuple[str, ...]
    value: int
    property_used: str  # "exp" | "td" | "rd"
    time_ms: float
    rd_queries: int = 0
    rd_time_ms: float = 0.0
    td_time_ms: float = 0.0
    degraded: bool = False


@dataclass(frozen=True)
class BoundReport:
    """Composed bound plus per-cluster detail."""

    problem: str
    base: BaseCaseKind
    total: int
    per_cluster: tuple[ClusterBound, ...]
    total_time_ms: float = 0.0

    @property
    def degraded(self) -> bool:
        return any(c.degraded for c in self.per_cluster)

    @property
    def rd_queries(self) -> int:
        return sum(c.rd_queries for c in self.per_cluster)

    @property
    def rd_time_ms(self) -> float:
        return sum(c.rd_time_ms for c in self.per_cluster)

    @property
    def td_time_ms(self) -> float:
        return sum(c.td_time_ms for c in self.per_cluster)

    @property
    def num_clusters(self) -> int:
        return len(self.per_cluster)

    @property
    def max_cluster_vars(self) -> int:
        return max((len(c.var_names) for c in self.per_cluster), default=0)


def _rd_detailed(subsystem: System, cfg: BoundConfig) -> tuple[int | None, int, float, bool]:
    """Longest-simple-path value for one cluster.

    Returns (value or None, solver queries, solver time ms, timed_out).
    SMT first when a solver is configured; brute force as the fallback while
    the explicit caps allow it; None when nothing applies.
    """
    if not subsystem.actions:
        return 0, 0, 0.0, False
    if cfg.solver is not None:
        try:
            result: RdResult = rd_via_smt(
                subsystem,
                encoding="factored",
                cfg=cfg.solver,
                schedule=cfg.schedule,
                max_vars=cfg.max_vars,
            )
        except SolverError:
            result = None
        if result is not None:
            if result.exact:
                return result.rd, result.total_queries, result.total_time_ms, False
            return None, result.total_queries, result.total_time_ms, True
    try:
        value = recurrence_diameter_bruteforce(
            subsystem, max_states=cfg.rd_max_states, max_vars=cfg.max_vars
        )
        return value, 0, 0.0, False
    except (SimplePathSearchTooLargeError, StateSpaceTooLargeError):
        return None, 0, 0.0, True


def _base_case_detailed(
    subsystem: System, kind: BaseCaseKind, cfg: BoundConfig, var_names: tuple[str, ...]
) -> ClusterBound:
    started = time.perf_counter()
    rd_queries = 0
    rd_time = 0.0
    td_time = 0.0
    degraded = False

    def td_value() -> int | None:
        nonlocal td_time, degraded
        t0 = time.perf_counter()
        try:
            return traversal_diameter(subsystem, max_vars=cfg.max_vars)
        except StateSpaceTooLargeError:
            degraded = True
            return None
        finally:
            td_time += (time.perf_counter() - t0) * 1000.0

    def rd_value() -> int | None:
        nonlocal rd_queries, rd_time, degraded
        t0 = time.perf_counter()
        value, queries, solver_ms, timed_out = _rd_detailed(subsystem, cfg)
        rd_time += (time.perf_counter() - t0) * 1000.0
        rd_queries += queries
        if timed_out:
            degraded = True
        return value

    value: int | None = None
    used = kind.tag
    if kind.tag == "exp":
        value = exp_bound(subsystem)
        used = "exp"
    elif kind.tag == "td":
        value = td_value()
        used = "td"
    elif kind.tag == "rd":
        value = rd_value()
        used = "rd"
        if value is None:
            value = td_value()
            used = "td"
    elif kind.tag == "b1":
        td_val = td_value()
        if td_val is not None and td_val > kind.td_trigger:
            value = rd_value()
            used = "rd"
            if value is None:
                value = td_val
                used = "td"
        else:
            value = td_val
            used = "td"
    elif kind.tag == "b2":
        if exp_bound(subsystem) <= kind.rd_state_cap:
            td_val = td_value()
            if td_val is not None and td_val > kind.td_trigger:
                value = rd_value()
                used = "rd"
                if value is None:
                    value = td_val
                    used = "td"
            else:
                value = td_val
                used = "td"
        else:
            value = td_value()
            used = "td"
    if value is None:
        # Last resort: the state-count bound always exists.
        value = exp_bound(subsystem)
        used = "exp"
        degraded = True
    return ClusterBound(
        var_names=var_names,
        value=value,
        property_used=used,
        time_ms=(time.perf_counter() - started) * 1000.0,
        rd_queries=rd_queries,
        rd_time_ms=rd_time,
        td_time_ms=td_time,
        degraded=degraded,
    )


def base_case(subsystem: System, kind: BaseCaseKind, cfg: BoundConfig | None = None) -> int:
    """The configured topological property of one (sub)system."""
    cfg = cfg or BoundConfig()
    names = tuple(subsystem.variables[i].name for i in subsystem.domain)
    return _base_case_detailed(subsystem, kind, cfg, names).value


def compose_values(values) -> int:
    """Fold per-cluster values: B := B + (B + 1) * v, saturating."""
    total = 0
    first = True
    for value in values:
        if first:
            total = value
            first = False
        else:
            total = total + (total + 1) * value
        if total >= MAX_BOUND:
            return MAX_BOUND
    return total


def compositional_bound(
    system: System,
    kind: BaseCaseKind,
    cfg: BoundConfig | None = None,
    problem: str = "",
) -> BoundReport:
    """Decompose, evaluate the base case per cluster, and fold the values in
    topological order into one plan-length upper bound."""
    cfg = cfg or BoundConfig()
    started = time.perf_counter()
    decomposition = decompose(system)
    per_cluster: list[ClusterBound] = []
    for cluster in decomposition.clusters:
        sub = project(system, cluster)
        names = tuple(system.variables[v].name for v in cluster)
        per_cluster.append(_base_case_detailed(sub, kind, cfg, names))
    total = compose_values(c.value for c in per_cluster)
    return BoundReport(
        problem=problem,
        base=kind,
        total=total,
        per_cluster=tuple(per_cluster),
        total_time_ms=(time.perf_counter() - started) * 1000.0,
    )
