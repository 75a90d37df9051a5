import pytest

from statebound.core import Action, PartialState, System, build_transition_graph
from statebound.gen import gen_clique, gen_lotus, gen_star
from statebound.oracle import (
    MAX_BOUND,
    SimplePathSearchTooLargeError,
    check_conjecture,
    compute_topo_report,
    diameter,
    distinct_trace,
    exp_bound,
    longest_simple_path,
    recurrence_diameter_bruteforce,
    strongly_connected_components,
    traversal_diameter,
    traversal_walk,
)

from conftest import chain_family, make_random


class TestExpBound:
    def test_star_system(self, star3):
        assert exp_bound(star3) == 3

    def test_empty_domain(self):
        assert exp_bound(System.from_names(["a"], ())) == 0

    def test_lotus3_two_variables(self):
        assert exp_bound(gen_lotus(3)) == 3

    def test_saturation(self):
        actions = tuple(
            Action(PartialState(), PartialState(1 << i, 1 << i)) for i in range(70)
        )
        system = System.from_names([f"x{i}" for i in range(70)], actions)
        assert exp_bound(system) == MAX_BOUND


class TestDiameter:
    def test_clique_is_one(self, clique2):
        assert diameter(clique2) == 1

    def test_no_actions_zero(self):
        assert diameter(System.from_names(["a"], ())) == 0

    def test_lotus3_leaf_to_leaf(self):
        assert diameter(gen_lotus(3)) == 2

    def test_star_is_one(self, star3):
        assert diameter(star3) == 1


class TestRecurrenceDiameter:
    def test_clique_hamiltonian(self, clique2):
        assert recurrence_diameter_bruteforce(clique2) == 3

    def test_lotus3(self):
        assert recurrence_diameter_bruteforce(gen_lotus(3)) == 2

    def test_no_actions_zero(self):
        assert recurrence_diameter_bruteforce(System.from_names(["a"], ())) == 0

    def test_witness_is_a_simple_path(self):
        for system in (gen_clique(3), gen_lotus(5), gen_star(4)):
            graph = build_transition_graph(system)
            length, path = longest_simple_path(graph)
            assert len(path) == length + 1
            assert len(set(path)) == len(path)
            for u, v in zip(path, path[1:]):
                assert v in graph.adj[u]

    def test_state_cap(self, clique2):
        graph = build_transition_graph(clique2)
        with pytest.raises(SimplePathSearchTooLargeError):
            longest_simple_path(graph, max_states=3)

    def test_deterministic(self, clique2):
        graph = build_transition_graph(clique2)
        assert longest_simple_path(graph) == longest_simple_path(graph)


class TestTraversalDiameter:
    def test_star_is_one(self, star3):
        assert traversal_diameter(star3) == 1

    def test_lotus3(self):
        assert traversal_diameter(gen_lotus(3)) == 3

    def test_clique_single_scc(self, clique2):
        assert traversal_diameter(clique2) == 3

    def test_walk_replay(self):
        for system in (gen_clique(2), gen_star(3), gen_lotus(5), gen_lotus(8)):
            graph = build_transition_graph(system)
            td = traversal_diameter(graph)
            walk = traversal_walk(graph)
            for u, v in zip(walk, walk[1:]):
                assert v in graph.adj[u]
            assert len(set(walk)) == td + 1

    def test_walk_replay_random(self):
        for seed in range(1, 21):
            system = make_random(chain_family(seed))
            graph = build_transition_graph(system)
            td = traversal_diameter(graph)
            walk = traversal_walk(graph)
            for u, v in zip(walk, walk[1:]):
                assert v in graph.adj[u]
            assert len(set(walk)) == td + 1


class TestSccHelper:
    def test_two_cycles_and_bridge(self):
        # 0 <-> 1 -> 2 <-> 3
        adj = [(1,), (0, 2), (3,), (2,)]
        comps = [tuple(c) for c in strongly_connected_components(adj)]
        assert sorted(comps) == [(0, 1), (2, 3)]
        # reverse topological: the sink component comes first
        assert comps[0] == (2, 3)


class TestDistinctTrace:
    def test_worked_example(self, clique2):
        x = clique2.full_state({"v1": False, "v2": False})
        pis = [
            Action(PartialState(), PartialState(3, 3)),
            Action(PartialState(), PartialState(3, 2)),
            Action(PartialState(), PartialState(3, 1)),
        ]
        assert distinct_trace(clique2, x, pis)

    def test_empty_sequence(self, clique2):
        x = clique2.full_state({"v1": True, "v2": True})
        assert distinct_trace(clique2, x, [])

    def test_stalled_action_repeats(self, star3):
        leaf = star3.full_state({"v1": True, "v2": False})
        assert not distinct_trace(star3, leaf, [star3.actions[0]])


class TestConjecture:
    def test_star_holds(self, star3):
        verdict = check_conjecture(star3)
        assert verdict.status == "holds" and verdict.td == 1 and verdict.rd == 1

    def test_star_family_holds(self):
        for n in range(1, 8):
            assert check_conjecture(gen_star(n)).status == "holds", n

    def test_lotus_vacuous(self):
        verdict = check_conjecture(gen_lotus(3))
        assert verdict.status == "vacuous" and verdict.td == 3

    def test_lotus_family_vacuous_from_three(self):
        for n in range(3, 10):
            assert check_conjecture(gen_lotus(n)).status == "vacuous", n

    def test_no_actions_holds(self):
        verdict = check_conjecture(System.from_names(["a"], ()))
        assert verdict.status == "holds" and verdict.td == 0 and verdict.rd == 0

    def test_seeded_sweep_no_counterexamples(self):
        from statebound.gen import GeneratorSpec, gen_random

        counts = {"holds": 0, "vacuous": 0, "counterexample": 0}
        for seed in range(1, 201):
            system = gen_random(
                GeneratorSpec("random", seed=seed, num_vars=5, num_actions=10)
            )
            counts[check_conjecture(system).status] += 1
        assert counts["counterexample"] == 0, counts
        assert counts["holds"] + counts["vacuous"] == 200


class TestChainInvariant:
    def test_chain_on_random_systems(self):
        for seed in range(1, 41):
            system = make_random(chain_family(seed))
            report = compute_topo_report(system)
            assert report.chain_holds(), (seed, report)

    def test_report_determinism(self):
        system = make_random(chain_family(7))
        a = compute_topo_report(system)
        b = compute_topo_report(system)
        assert (a.exp, a.d, a.rd, a.td) == (b.exp, b.d, b.rd, b.td)
