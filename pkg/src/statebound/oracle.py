"""Exact state-space topology: state-count bound, diameter, longest simple
path, and traversal diameter, plus the td/rd coincidence checker.

Everything here works on the explicit transition graph and is intended as
ground truth for the factored (SMT) paths, so the algorithms favour being
obviously correct and deterministic over being clever.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import (
    DEFAULT_VAR_CAP,
    Action,
    FullState,
    System,
    TransitionGraph,
    build_transition_graph,
    execute_sequence,
)

# Values are saturated here instead of overflowing; a result equal to
# MAX_BOUND means "at least this large".
MAX_BOUND = 2**63 - 1

# Longest-simple-path search is exponential; refuse beyond this many states.
DEFAULT_RD_STATE_CAP = 4096


class SimplePathSearchTooLargeError(RuntimeError):
    """The graph exceeds the cap for exhaustive longest-simple-path search."""


def _as_graph(obj: System | TransitionGraph, max_vars: int = DEFAULT_VAR_CAP) -> TransitionGraph:
    if isinstance(obj, TransitionGraph):
        return obj
    return build_transition_graph(obj, max_vars=max_vars)


def exp_bound(system: System) -> int:
    """One less than the number of valid states, saturated at MAX_BOUND."""
    m = system.num_domain_vars
    if m >= 63:
        return MAX_BOUND
    return (1 << m) - 1


def diameter(obj: System | TransitionGraph, max_vars: int = DEFAULT_VAR_CAP) -> int:
    """Longest shortest path over all ordered reachable state pairs."""
    graph = _as_graph(obj, max_vars)
    adj = graph.adj
    n = graph.num_states
    best = 0
    for source in range(n):
        distance = [-1] * n
        distance[source] = 0
        queue = deque([source])
        while queue:
            u = queue.popleft()
            du = distance[u]
            if du > best:
                best = du
            for v in adj[u]:
                if distance[v] < 0:
                    distance[v] = du + 1
                    queue.append(v)
    return best


def _unvisited_reach_count(adj: Sequence[Sequence[int]], visited: bytearray, head: int) -> int:
    """Number of unvisited vertices reachable from ``head`` through unvisited
    vertices only (the residual-graph pruning bound)."""
    stack = [v for v in adj[head] if not visited[v]]
    seen = set(stack)
    count = 0
    while stack:
        u = stack.pop()
        count += 1
        for v in adj[u]:
            if not visited[v] and v not in seen:
                seen.add(v)
                stack.append(v)
    return count


def longest_simple_path(
    obj: System | TransitionGraph,
    max_states: int = DEFAULT_RD_STATE_CAP,
    max_vars: int = DEFAULT_VAR_CAP,
) -> tuple[int, list[int]]:
    """Exhaustive longest simple path; returns (edge count, witness vertices).

    Depth-first search from every start vertex, neighbours in ascending id
    order, pruned by current length plus the residual reachable-vertex count.
    """
    graph = _as_graph(obj, max_vars)
    n = graph.num_states
    if n > max_states:
        raise SimplePathSearchTooLargeError(
            f"{n} states exceed the simple-path search cap of {max_states}"
        )
    adj = graph.adj
    best_len = 0
    best_path = [0] if n else []
    visited = bytearray(n)
    path: list[int] = []
    iters: list[Iterable[int]] = []

    def push(v: int) -> None:
        nonlocal best_len, best_path
        visited[v] = 1
        path.append(v)
        length = len(path) - 1
        if length > best_len:
            best_len = length
            best_path = path.copy()
        bound = length + _unvisited_reach_count(adj, visited, v)
        if bound <= best_len:
            iters.append(iter(()))
        else:
            iters.append(iter(adj[v]))

    for start in range(n):
        if best_len >= n - 1:
            break
        push(start)
        while iters:
            if best_len >= n - 1:
                # Nothing can beat a Hamiltonian path; unwind and stop.
                while path:
                    visited[path.pop()] = 0
                iters.clear()
                break
            moved = False
            for v in iters[-1]:
                if not visited[v]:
                    push(v)
                    moved = True
                    break
            if not moved:
                iters.pop()
                visited[path.pop()] = 0
    return best_len, best_path


def recurrence_diameter_bruteforce(
    obj: System | TransitionGraph,
    max_states: int = DEFAULT_RD_STATE_CAP,
    max_vars: int = DEFAULT_VAR_CAP,
) -> int:
    """Length of the longest simple path in the explicit state space."""
    length, _ = longest_simple_path(obj, max_states=max_states, max_vars=max_vars)
    return length


def strongly_connected_components(adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Iterative Tarjan; components are emitted in reverse topological order
    (every component precedes the components that can reach it)."""
    n = len(adj)
    index_of = [-1] * n
    lowlink = [0] * n
    on_stack = bytearray(n)
    stack: list[int] = []
    components: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index_of[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, edge_pos = work.pop()
            if edge_pos == 0:
                index_of[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = 1
            advanced = False
            neighbours = adj[v]
            while edge_pos < len(neighbours):
                w = neighbours[edge_pos]
                edge_pos += 1
                if index_of[w] < 0:
                    work.append((v, edge_pos))
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    if index_of[w] < lowlink[v]:
                        lowlink[v] = index_of[w]
            if advanced:
                continue
            if lowlink[v] == index_of[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    component.append(w)
                    if w == v:
                        break
                component.sort()
                components.append(component)
            if work:
                parent = work[-1][0]
                if lowlink[v] < lowlink[parent]:
                    lowlink[parent] = lowlink[v]
    return components


def _condensation_dp(graph: TransitionGraph) -> tuple[list[list[int]], list[int], list[int], list[int]]:
    """Longest weighted path over the SCC condensation.

    Returns (components, comp id per vertex, best distinct-state count per
    component, successor choice per component; -1 where the path ends).
    """
    components = strongly_connected_components(graph.adj)
    comp_of = [0] * graph.num_states
    for cid, members in enumerate(components):
        for v in members:
            comp_of[v] = cid
    value = [0] * len(components)
    next_comp = [-1] * len(components)
    # Tarjan emits successors first, so values are ready when needed.
    for cid, members in enumerate(components):
        best_succ = -1
        best_val = 0
        succs = sorted(
            {comp_of[v] for u in members for v in graph.adj[u] if comp_of[v] != cid}
        )
        for sid in succs:
            if value[sid] > best_val:
                best_val = value[sid]
                best_succ = sid
        value[cid] = len(members) + best_val
        next_comp[cid] = best_succ
    return components, comp_of, value, next_comp


def traversal_diameter(obj: System | TransitionGraph, max_vars: int = DEFAULT_VAR_CAP) -> int:
    """One less than the most distinct states any single walk can visit."""
    graph = _as_graph(obj, max_vars)
    if graph.num_states == 0:
        return 0
    _, _, value, _ = _condensation_dp(graph)
    return max(value) - 1


def traversal_walk(obj: System | TransitionGraph, max_vars: int = DEFAULT_VAR_CAP) -> list[int]:
    """A concrete walk visiting traversal_diameter + 1 distinct vertices.

    Covers every vertex of each component along the optimal condensation
    path, moving between vertices by BFS inside the current component.
    """
    graph = _as_graph(obj, max_vars)
    components, comp_of, value, next_comp = _condensation_dp(graph)
    start_comp = max(range(len(components)), key=lambda c: (value[c], -c))
    adj = graph.adj

    def bfs_path(source: int, allowed: set[int], goals: set[int]) -> list[int]:
        """Shortest path from source to the first goal found, staying inside
        ``allowed``; deterministic via ascending neighbour order."""
        if source in goals:
            return [source]
        parent = {source: -1}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v in allowed and v not in parent:
                    parent[v] = u
                    if v in goals:
                        out = [v]
                        while out[-1] != source:
                            out.append(parent[out[-1]])
                        out.reverse()
                        return out
                    queue.append(v)
        raise AssertionError("goal unreachable inside a strongly connected component")

    walk: list[int] = []
    cid = start_comp
    current = components[cid][0]
    walk.append(current)
    while True:
        members = set(components[cid])
        uncovered = members - set(walk)
        while uncovered:
            segment = bfs_path(current, members, uncovered)
            walk.extend(segment[1:])
            current = segment[-1]
            uncovered -= set(segment)
        succ = next_comp[cid]
        if succ < 0:
            return walk
        crossing = {u for u in members if any(comp_of[v] == succ for v in adj[u])}
        segment = bfs_path(current, members, crossing)
        walk.extend(segment[1:])
        current = segment[-1]
        bridge = min(v for v in adj[current] if comp_of[v] == succ)
        walk.append(bridge)
        current = bridge
        cid = succ


def distinct_trace(system: System, state: FullState, actions: Sequence[Action]) -> bool:
    """True iff executing the sequence never revisits a state."""
    _, trace = execute_sequence(system, state, actions)
    return len(set(trace)) == len(trace)


@dataclass(frozen=True)
class ConjectureVerdict:
    """Outcome of the td/rd coincidence check on one system."""

    status: str  # "holds" | "vacuous" | "counterexample"
    td: int
    rd: int | None = None
    witness: tuple[int, ...] = ()

    @property
    def is_counterexample(self) -> bool:
        return self.status == "counterexample"


def check_conjecture(
    system: System,
    max_vars: int = DEFAULT_VAR_CAP,
    max_states: int = DEFAULT_RD_STATE_CAP,
) -> ConjectureVerdict:
    """Check that td in {0, 1, 2} forces td == rd; vacuous when td > 2."""
    graph = build_transition_graph(system, max_vars=max_vars)
    td = traversal_diameter(graph)
    if td > 2:
        return ConjectureVerdict(status="vacuous", td=td)
    rd, witness = longest_simple_path(graph, max_states=max_states)
    if rd == td:
        return ConjectureVerdict(status="holds", td=td, rd=rd, witness=tuple(witness))
    return ConjectureVerdict(status="counterexample", td=td, rd=rd, witness=tuple(witness))


@dataclass(frozen=True)
class TopoReport:
    """All four topological properties of one system, with timings in ms."""

    exp: int
    d: int
    rd: int
    td: int
    timings: dict[str, float] = field(default_factory=dict)
    problem: str = ""

    def chain_holds(self) -> bool:
        return self.d <= self.rd <= self.td <= self.exp


def compute_topo_report(
    system: System,
    problem: str = "",
    max_vars: int = DEFAULT_VAR_CAP,
    max_states: int = DEFAULT_RD_STATE_CAP,
) -> TopoReport:
    """Compute exp/d/rd/td on the explicit state space, timing each."""
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    graph = build_transition_graph(system, max_vars=max_vars)
    timings["graph_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    exp = exp_bound(system)
    timings["exp_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    d = diameter(graph)
    timings["d_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    rd = recurrence_diameter_bruteforce(graph, max_states=max_states)
    timings["rd_ms"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    td = traversal_diameter(graph)
    timings["td_ms"] = (time.perf_counter() - t0) * 1000.0

    return TopoReport(exp=exp, d=d, rd=rd, td=td, timings=timings, problem=problem)
