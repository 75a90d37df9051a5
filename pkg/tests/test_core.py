import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statebound.core import (
    Action,
    DomainMismatchError,
    FullState,
    PartialState,
    StateSpaceTooLargeError,
    System,
    Variable,
    build_transition_graph,
    execute,
    execute_sequence,
    union_precedence,
)


def ps(mask, bits):
    return PartialState(mask, bits)


partial_states = st.builds(
    lambda mask, raw: PartialState(mask, raw & mask),
    st.integers(min_value=0, max_value=255),
    st.integers(min_value=0, max_value=255),
)


class TestPartialState:
    def test_from_items(self):
        s = PartialState.from_items([(0, True), (2, False)])
        assert s.mask == 0b101 and s.bits == 0b001
        assert s.domain() == (0, 2)
        assert dict(s.items()) == {0: True, 2: False}

    def test_from_items_contradiction(self):
        with pytest.raises(ValueError):
            PartialState.from_items([(1, True), (1, False)])

    def test_bits_outside_mask_rejected(self):
        with pytest.raises(ValueError):
            PartialState(0b01, 0b10)

    def test_value_and_contains(self):
        s = ps(0b11, 0b01)
        assert s.value(0) is True and s.value(1) is False
        assert 0 in s and 2 not in s
        with pytest.raises(KeyError):
            s.value(2)


class TestUnionPrecedence:
    def test_left_wins_on_overlap(self):
        # {a=T} overriding {a=F, b=T} keeps a=T
        left = PartialState.from_items([(0, True)])
        right = PartialState.from_items([(0, False), (1, True)])
        merged = union_precedence(left, right)
        assert dict(merged.items()) == {0: True, 1: True}

    def test_identity_cases(self):
        s = ps(0b101, 0b100)
        assert union_precedence(PartialState(), s) == s
        assert union_precedence(s, PartialState()) == s

    @given(partial_states, partial_states)
    @settings(max_examples=200, deadline=None)
    def test_domain_and_precedence_laws(self, s1, s2):
        merged = union_precedence(s1, s2)
        assert merged.mask == s1.mask | s2.mask
        for var, val in s1.items():
            assert merged.value(var) == val
        for var, val in s2.items():
            if var not in s1:
                assert merged.value(var) == val

    @given(partial_states)
    @settings(max_examples=50, deadline=None)
    def test_idempotent(self, s):
        assert union_precedence(s, s) == s


class TestSystem:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            System((Variable(0, "a"), Variable(1, "a")), ())

    def test_non_dense_ids_rejected(self):
        with pytest.raises(ValueError):
            System((Variable(1, "a"),), ())

    def test_actions_deduplicated_and_sorted(self):
        a1 = Action(PartialState(), ps(1, 1))
        a2 = Action(PartialState(), ps(1, 0))
        system = System.from_names(["a"], (a1, a2, a1))
        assert system.actions == (a2, a1)

    def test_unused_declared_variable_excluded_from_domain(self):
        system = System.from_names(["a", "b"], (Action(PartialState(), ps(1, 1)),))
        assert system.domain == (0,)
        assert system.num_domain_vars == 1

    def test_action_outside_declared_rejected(self):
        with pytest.raises(DomainMismatchError):
            System.from_names(["a"], (Action(PartialState(), ps(2, 2)),))

    def test_vertex_index_bijection(self, clique2):
        states = [clique2.state_of_index(i) for i in range(4)]
        assert len(set(states)) == 4
        for i, state in enumerate(states):
            assert clique2.index_of_state(state) == i


class TestExecute:
    def test_unconditional_assignment(self, clique2):
        x = clique2.full_state({"v1": False, "v2": False})
        pi1 = Action(PartialState(), ps(3, 3))
        assert execute(clique2, x, pi1) == clique2.full_state({"v1": True, "v2": True})

    def test_failed_precondition_is_identity(self, clique2):
        x = clique2.full_state({"v1": True, "v2": False})
        act = Action(ps(3, 0), ps(3, 3))  # requires both false
        assert execute(clique2, x, act) == x

    def test_empty_effect_is_noop(self, clique2):
        x = clique2.full_state({"v1": True, "v2": True})
        assert execute(clique2, x, Action(PartialState(), PartialState())) == x

    def test_foreign_action_rejected(self, clique2):
        x = clique2.full_state({"v1": False, "v2": False})
        foreign = Action(PartialState(), ps(0b100, 0b100))
        with pytest.raises(DomainMismatchError):
            execute(clique2, x, foreign)

    def test_partial_state_rejected(self, clique2):
        with pytest.raises(DomainMismatchError):
            execute(clique2, FullState(1, 1), Action(PartialState(), ps(1, 1)))

    def test_frame_property_random(self, clique2):
        # v outside the effect domain keeps its value
        for code in range(4):
            x = clique2.state_of_index(code)
            act = Action(PartialState(), ps(1, 1))
            result = execute(clique2, x, act)
            assert result.value(1) == x.value(1)


class TestExecuteSequence:
    def test_worked_trace(self, clique2):
        x = clique2.full_state({"v1": False, "v2": False})
        pi1 = Action(PartialState(), ps(3, 3))
        pi2 = Action(PartialState(), ps(3, 2))
        pi3 = Action(PartialState(), ps(3, 1))
        final, trace = execute_sequence(clique2, x, [pi1, pi2, pi3])
        codes = [clique2.index_of_state(s) for s in trace]
        assert codes == [0, 3, 2, 1]
        assert final == trace[-1]

    def test_empty_sequence(self, clique2):
        x = clique2.full_state({"v1": True, "v2": False})
        final, trace = execute_sequence(clique2, x, [])
        assert final == x and trace == [x]

    def test_repeated_action_stalls(self, clique2):
        x = clique2.full_state({"v1": False, "v2": False})
        pi1 = Action(PartialState(), ps(3, 3))
        final, trace = execute_sequence(clique2, x, [pi1, pi1])
        assert [clique2.index_of_state(s) for s in trace] == [0, 3, 3]


class TestTransitionGraph:
    def test_clique_is_complete(self, clique2):
        graph = build_transition_graph(clique2)
        assert graph.num_states == 4
        assert graph.num_edges == 12
        for u in range(4):
            assert sorted(graph.adj[u]) == [v for v in range(4) if v != u]

    def test_star_edges_leave_hub_only(self, star3):
        graph = build_transition_graph(star3)
        assert graph.num_states == 4
        assert graph.num_edges == 3
        assert graph.adj[0] == (1, 2, 3)
        assert all(graph.adj[v] == () for v in (1, 2, 3))

    def test_no_actions_no_edges(self):
        system = System.from_names(["a", "b"], ())
        graph = build_transition_graph(system)
        # no used variables at all: a single vacuous state
        assert graph.num_states == 1
        assert graph.num_edges == 0

    def test_cap_enforced(self):
        actions = tuple(
            Action(PartialState(), ps(1 << i, 1 << i)) for i in range(5)
        )
        system = System.from_names([f"x{i}" for i in range(5)], actions)
        with pytest.raises(StateSpaceTooLargeError):
            build_transition_graph(system, max_vars=4)

    def test_edges_sound_and_complete(self):
        # every edge witnessed by an action, every action-induced move present
        from statebound.gen import gen_random, GeneratorSpec

        for seed in range(1, 9):
            system = gen_random(
                GeneratorSpec("random", seed=seed, num_vars=3 + seed % 4, num_actions=5)
            )
            graph = build_transition_graph(system)
            expected = set()
            for code in range(graph.num_states):
                state = system.state_of_index(code)
                for action in system.actions:
                    succ = execute(system, state, action)
                    if succ != state:
                        expected.add((code, system.index_of_state(succ)))
            assert set(graph.edges()) == expected

    def test_states_property(self, star3):
        graph = build_transition_graph(star3)
        assert graph.states[0] == star3.full_state({"v1": False, "v2": False})
        assert len(graph.states) == 4
