"""Shared fixtures: the worked examples used throughout the docs and the
seeded random families the acceptance suite runs on."""

from __future__ import annotations

import pytest

from statebound.core import Action, PartialState, System
from statebound.gen import GeneratorSpec, gen_random
from statebound.smt import SolverConfig


def _ps(mask: int, bits: int) -> PartialState:
    return PartialState(mask, bits)


@pytest.fixture(scope="session")
def clique2() -> System:
    """Two variables, four unconditional assignment actions; the state space
    is a complete digraph on four states."""
    actions = tuple(
        Action(PartialState(), PartialState(3, bits)) for bits in range(4)
    )
    return System.from_names(["v1", "v2"], actions)


@pytest.fixture(scope="session")
def star3() -> System:
    """Three one-way actions out of the all-false hub state."""
    hub = _ps(3, 0)
    actions = tuple(Action(hub, _ps(3, bits)) for bits in (1, 2, 3))
    return System.from_names(["v1", "v2"], actions)


@pytest.fixture(scope="session")
def toggles2() -> System:
    """Two independent single-variable set/clear pairs."""
    actions = (
        Action(PartialState(), _ps(1, 1)),
        Action(PartialState(), _ps(1, 0)),
        Action(PartialState(), _ps(2, 2)),
        Action(PartialState(), _ps(2, 0)),
    )
    return System.from_names(["v1", "v2"], actions)


@pytest.fixture(scope="session")
def solver_cfg() -> SolverConfig:
    """Honours STATEBOUND_SOLVER so a real solver is used when present."""
    return SolverConfig.from_env(timeout_ms=120_000)


def equivalence_family(seed: int) -> GeneratorSpec:
    """Random family for the oracle/SMT equivalence runs: at most 6 variables
    and 10 actions, preconditions up to 3 literals, single-variable effects.
    Six-variable systems draw fewer actions to keep the explicit-encoding
    refutations small."""
    num_vars = 3 + seed % 4
    num_actions = 3 + (seed * 7) % 8 if num_vars < 6 else 3 + seed % 4
    return GeneratorSpec(
        family="random",
        seed=seed,
        num_vars=num_vars,
        num_actions=num_actions,
        max_pre=3,
        max_eff=1,
    )


def chain_family(seed: int) -> GeneratorSpec:
    """Random family for the inequality-chain and composition runs: at most
    8 variables and 10 actions; 7-8 variable systems draw fewer actions so
    the exhaustive longest-simple-path searches stay quick."""
    num_vars = 2 + seed % 7
    num_actions = 2 + (seed * 5) % 9 if num_vars < 7 else 2 + seed % 5
    return GeneratorSpec(
        family="random",
        seed=seed,
        num_vars=num_vars,
        num_actions=num_actions,
        max_pre=2,
        max_eff=2,
    )


def make_random(spec: GeneratorSpec) -> System:
    return gen_random(spec)
