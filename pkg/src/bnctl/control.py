"""Target control: instantaneous, temporary and permanent.

Every search starts from a greedy cube cover of a basin of the target
attractor.  The fixed variables of each cube give a candidate control.
ITC takes candidates as they are.  TTC and PTC try subsets of each
candidate in order of increasing size, and each subset is verified
against the controlled dynamics.
"""
from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable

from .dynamics import (Attractor, admissible_space, forward_reach,
                       is_forward_closed, strong_basin, weak_basin)
from .model import BooleanNetwork, Control, classify_inputs, controlled_network
from .symbolic import (Schema, StateSet, apply_control_set, restrict_to_control,
                       schema_cover)

logger = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    ITC = "itc"
    TTC = "ttc"
    PTC = "ptc"


@dataclass(frozen=True)
class Provenance:
    schema: str       # cube the candidate came from
    schema_index: int
    verified: bool    # False for ITC, whose candidates need no check


@dataclass
class ControlResult:
    mode: Mode
    target_index: int
    controls: list[Control]
    threshold: int
    provenance: dict[Control, Provenance]
    schemata: list[Schema] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)
    verifications: int = 0

    @property
    def best_size(self) -> int | None:
        return self.controls[0].size if self.controls else None


def schema_to_control(schema: Schema) -> Control:
    """Fix the support variables of `schema` to their values in it."""
    return Control(schema.zero_set, schema.one_set)


def _check_target(bn, target: Attractor, admissible: StateSet):
    states = target.states
    if states.is_empty() or not states <= admissible:
        raise ValueError("target must be a non-empty admissible set")
    if not is_forward_closed(bn, states, admissible):
        raise ValueError("target is not an attractor: it is not forward-closed")
    seed = states.universe.state(states.first())
    if forward_reach(bn, seed, admissible) != states:
        raise ValueError("target is not an attractor: it is not strongly connected")


def _threshold(bn, threshold):
    if threshold is None:
        return bn.n
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return threshold


def _finish(mode, target, found, zeta, provenance, **extra) -> ControlResult:
    kept = sorted({c for c in found if c.size <= zeta}, key=Control.sort_key)
    return ControlResult(mode, target.index, kept, zeta,
                         {c: provenance[c] for c in kept}, **extra)


def itc(bn: BooleanNetwork, target: Attractor, threshold: int | None = None,
        admissible: StateSet | None = None) -> ControlResult:
    """Controls whose one-shot application lands inside the strong basin."""
    universe = target.states.universe
    inputs = classify_inputs(bn)
    if admissible is None:
        admissible = admissible_space(bn, universe, inputs)
    _check_target(bn, target, admissible)
    zeta = _threshold(bn, threshold)

    sb = strong_basin(bn, target.states, admissible)
    cover = schema_cover(sb)
    found, provenance = [], {}
    for i, schema in enumerate(cover):
        # constant inputs already hold their value in every admissible state
        c = schema_to_control(schema).without(inputs.specified)
        if c.size <= zeta:
            found.append(c)
            provenance.setdefault(c, Provenance(str(schema), i, False))
            zeta = min(zeta, c.size)
    return _finish(Mode.ITC, target, found, zeta, provenance, schemata=cover)


def verify_ttc(bn: BooleanNetwork, c: Control, sb: StateSet, phi: StateSet) -> bool:
    """Is `c` a temporary control towards the attractor with strong basin `sb`?

    `phi` is the set of states right after `c` is applied to the admissible
    space.  It is also the state space of the controlled network.
    """
    if phi <= sb:
        return True
    release = restrict_to_control(sb, c)
    if release.is_empty():
        return False
    basin = strong_basin(controlled_network(bn, c), release, phi)
    return phi <= basin


def verify_ptc(bn: BooleanNetwork, c: Control, target: StateSet, phi: StateSet) -> bool:
    """Is `c` a permanent control towards `target`?

    The target survives fixation exactly when it already agrees with every
    fixed value; it then keeps all of its transitions.
    """
    if isinstance(target, Attractor):
        target = target.states
    if restrict_to_control(target, c) != target:
        return False
    basin = strong_basin(controlled_network(bn, c), target, phi)
    return phi <= basin


def release_region(sb: StateSet, c: Control) -> StateSet:
    """States where a temporary control can be lifted safely."""
    return restrict_to_control(sb, c)


def _subset_search(mode: Mode, bn: BooleanNetwork, target: Attractor,
                   threshold: int | None, admissible: StateSet | None,
                   verify: Callable[[Control, StateSet], bool]) -> ControlResult:
    universe = target.states.universe
    inputs = classify_inputs(bn)
    if admissible is None:
        admissible = admissible_space(bn, universe, inputs)
    _check_target(bn, target, admissible)
    zeta = _threshold(bn, threshold)

    wb = weak_basin(bn, target.states, admissible)
    cover = schema_cover(wb)
    cubes = [universe.from_schema(s) for s in cover]
    skip = [False] * len(cover)
    checked: set[Control] = set()
    found, provenance = [], {}
    verifications = 0

    for i, schema in enumerate(cover):
        if skip[i]:
            continue
        candidate = schema_to_control(schema)
        essential = Control(candidate.zero_set & inputs.nonspecified,
                            candidate.one_set & inputs.nonspecified)
        reducible = candidate.without(inputs.inputs).literals()
        k = 0
        valid = False
        while not valid and k <= min(zeta - essential.size, len(reducible)):
            for subset in itertools.combinations(reducible, k):
                c = Control.from_literals(subset + essential.literals())
                if c in checked:
                    continue
                phi = apply_control_set(c, admissible)
                checked.add(c)
                verifications += 1
                if not verify(c, phi):
                    continue
                valid = True
                found.append(c)
                provenance.setdefault(c, Provenance(str(schema), i, True))
                zeta = min(zeta, c.size)
                for z in range(i + 1, len(cover)):
                    if not skip[z] and cubes[z] <= phi:
                        skip[z] = True
            if not valid:
                k += 1
    logger.debug("%s target %d: %d schemata, %d verifications",
                 mode.value, target.index, len(cover), verifications)
    return _finish(mode, target, found, zeta, provenance, schemata=cover,
                   skipped=[z for z, s in enumerate(skip) if s],
                   verifications=verifications)


def ttc(bn: BooleanNetwork, target: Attractor, threshold: int | None = None,
        admissible: StateSet | None = None) -> ControlResult:
    """Controls that, held long enough and then released, reach the target."""
    universe = target.states.universe
    if admissible is None:
        admissible = admissible_space(bn, universe)
    sb = strong_basin(bn, target.states, admissible)
    return _subset_search(Mode.TTC, bn, target, threshold, admissible,
                          lambda c, phi: verify_ttc(bn, c, sb, phi))


def ptc(bn: BooleanNetwork, target: Attractor, threshold: int | None = None,
        admissible: StateSet | None = None) -> ControlResult:
    """Controls that, held forever, reach the target."""
    return _subset_search(Mode.PTC, bn, target, threshold, admissible,
                          lambda c, phi: verify_ptc(bn, c, target.states, phi))


SOLVERS = {Mode.ITC: itc, Mode.TTC: ttc, Mode.PTC: ptc}


def solve(mode: Mode | str, bn: BooleanNetwork, target: Attractor,
          threshold: int | None = None, admissible: StateSet | None = None) -> ControlResult:
    return SOLVERS[Mode(mode)](bn, target, threshold, admissible)
