"""Attractors and basins of the asynchronous transition system."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .model import BooleanNetwork, classify_inputs, InputClassification
from .symbolic import StateSet, Universe


class Kind(str, enum.Enum):
    SINGLETON = "singleton"
    SIMPLE_LOOP = "simple-loop"
    COMPLEX_LOOP = "complex-loop"


@dataclass(frozen=True, eq=False)
class Attractor:
    states: StateSet
    kind: Kind
    index: int

    def witness(self) -> tuple:
        return self.states.first()

    def size(self) -> int:
        return self.states.count()


def admissible_space(bn: BooleanNetwork, universe: Universe,
                     inputs: InputClassification | None = None) -> StateSet:
    """States in which every constant input node already holds its constant.

    The set is forward-closed: a constant node can only move towards its
    value.
    """
    if inputs is None:
        inputs = classify_inputs(bn)
    adm = universe.full()
    for i in sorted(inputs.specified):
        adm = adm & StateSet(universe, universe.literal(i, inputs.values[i]))
    return adm


def forward_reach(bn: BooleanNetwork, states: StateSet, within: StateSet) -> StateSet:
    ts = states.universe.transitions(bn)
    reached = frontier = states & within
    while True:
        frontier = (ts.post_moves(frontier) & within) - reached
        if frontier.is_empty():
            return reached
        reached = reached | frontier


def backward_reach(bn: BooleanNetwork, states: StateSet, within: StateSet) -> StateSet:
    ts = states.universe.transitions(bn)
    reached = frontier = states & within
    while True:
        frontier = (ts.pre_moves(frontier) & within) - reached
        if frontier.is_empty():
            return reached
        reached = reached | frontier


def weak_basin(bn: BooleanNetwork, target: StateSet, admissible: StateSet) -> StateSet:
    """Admissible states with at least one path into `target`."""
    if not target <= admissible:
        raise ValueError("target is not inside the admissible space")
    return backward_reach(bn, target, admissible)


def is_forward_closed(bn: BooleanNetwork, states: StateSet, within: StateSet) -> bool:
    ts = states.universe.transitions(bn)
    return (ts.post_moves(states) & within) <= states


def strong_basin(bn: BooleanNetwork, target: StateSet, admissible: StateSet) -> StateSet:
    """Greatest forward-closed subset of the weak basin of `target`.

    For a forward-closed target these are exactly the states from which
    every fair path ends up in `target`.
    """
    if not is_forward_closed(bn, target, admissible):
        raise ValueError("strong basin target must be forward-closed")
    weak = weak_basin(bn, target, admissible)
    escaping = backward_reach(bn, admissible - weak, admissible)
    return weak - escaping


def classify(bn: BooleanNetwork, states: StateSet) -> Kind:
    if states.count() == 1:
        return Kind.SINGLETON
    ts = states.universe.transitions(bn)
    if states <= ts.single_successor():
        return Kind.SIMPLE_LOOP
    return Kind.COMPLEX_LOOP


def compute_attractors(bn: BooleanNetwork, admissible: StateSet) -> list[Attractor]:
    """All attractors inside the (forward-closed) admissible space.

    Starting from the smallest unexplored state, the forward set is shrunk
    until it is strongly connected; that set is an attractor and its weak
    basin is removed from further exploration.  The result is ordered by
    smallest member state.
    """
    universe = admissible.universe
    found = []
    remaining = admissible
    while not remaining.is_empty():
        seed = universe.state(remaining.first())
        while True:
            fwd = forward_reach(bn, seed, admissible)
            back = backward_reach(bn, seed, fwd)
            if fwd <= back:
                break
            seed = universe.state((fwd - back).first())
        found.append(fwd)
        remaining = remaining - weak_basin(bn, fwd, admissible)
    found.sort(key=StateSet.first)
    return [Attractor(a, classify(bn, a), i) for i, a in enumerate(found)]
