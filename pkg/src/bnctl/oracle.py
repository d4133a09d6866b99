"""Explicit-state reference semantics for small networks.

Everything here works on the full transition graph, with states encoded
as integers (node 0 is the most significant bit, so integer order is
lexicographic order).  Attractors are terminal strongly connected
components.  Basins come from graph search.  "Always eventually" is
decided from terminal components, which is what fairness reduces to on
a finite graph.  None of it touches the symbolic engine.
"""
from __future__ import annotations

import itertools
import random
from math import comb
from dataclasses import dataclass, field

import numpy as np

from .model import (And, BooleanNetwork, Const, Control, Not, Or, Var,
                    classify_inputs, controlled_network)

MAX_NODES = 20


def encode(bits) -> int:
    code = 0
    for b in bits:
        code = (code << 1) | int(b)
    return code


def decode(code: int, n: int) -> tuple:
    return tuple((code >> (n - 1 - i)) & 1 for i in range(n))


def _eval_columns(expr, columns, size):
    if isinstance(expr, Var):
        return columns[expr.index]
    if isinstance(expr, Const):
        return np.full(size, bool(expr.value))
    if isinstance(expr, Not):
        return ~_eval_columns(expr.child, columns, size)
    vals = [_eval_columns(c, columns, size) for c in expr.children]
    if isinstance(expr, And):
        return np.logical_and.reduce(vals)
    return np.logical_or.reduce(vals)


@dataclass
class ExplicitGraph:
    """Asynchronous transition graph restricted to `space`.

    ``moves[i, s]`` is the state reached from ``s`` by updating node ``i``;
    it equals ``s`` when the update is a selfloop.
    """

    n: int
    moves: np.ndarray        # (n, 2**n) int64
    space: np.ndarray        # bool mask of member states
    _terminal: list | None = field(default=None, repr=False)

    @property
    def num_states(self) -> int:
        return int(self.space.sum())

    def successors(self, s: int) -> list[int]:
        """Distinct successors of `s`, selfloop included when it exists."""
        return sorted(set(int(t) for t in self.moves[:, s]))

    def has_selfloop(self, s: int) -> bool:
        return bool((self.moves[:, s] == s).any())

    def backward(self, target: np.ndarray, within: np.ndarray | None = None) -> np.ndarray:
        """States of `within` with a path inside `within` into `target`."""
        if within is None:
            within = self.space
        reach = target & within
        while True:
            grown = reach | (reach[self.moves].any(axis=0) & within)
            if (grown == reach).all():
                return reach
            reach = grown

    def forward(self, source: np.ndarray) -> np.ndarray:
        reach = source & self.space
        while True:
            grown = reach.copy()
            grown[self.moves[:, reach].ravel()] = True
            if (grown == reach).all():
                return reach
            reach = grown

    def sccs(self) -> list[list[int]]:
        return tarjan(self)

    def terminal_sccs(self) -> list[list[int]]:
        """Components with no edge leaving them, ordered by smallest state."""
        if self._terminal is None:
            out = []
            for comp in self.sccs():
                members = set(comp)
                if all(int(t) in members for s in comp for t in self.moves[:, s]):
                    out.append(sorted(comp))
            self._terminal = sorted(out)
        return self._terminal

    def mask(self, codes) -> np.ndarray:
        m = np.zeros(self.moves.shape[1], dtype=bool)
        m[list(codes)] = True
        return m


def tarjan(graph: ExplicitGraph) -> list[list[int]]:
    """Strongly connected components of the graph (iterative Tarjan)."""
    moves = graph.moves
    n_states = moves.shape[1]
    succ = [None] * n_states
    index = [-1] * n_states
    low = [0] * n_states
    on_stack = [False] * n_states
    stack: list[int] = []
    out = []
    counter = 0
    for root in np.flatnonzero(graph.space):
        root = int(root)
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
                succ[v] = [int(t) for t in set(moves[:, v].tolist()) if t != v]
            children = succ[v]
            recurse = False
            while pos < len(children):
                w = children[pos]
                pos += 1
                if index[w] < 0:
                    work.append((v, pos))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return out


def admissible_mask(bn: BooleanNetwork) -> np.ndarray:
    n = bn.n
    codes = np.arange(2 ** n, dtype=np.int64)
    mask = np.ones(2 ** n, dtype=bool)
    inputs = classify_inputs(bn)
    for i in inputs.specified:
        mask &= ((codes >> (n - 1 - i)) & 1) == inputs.values[i]
    return mask


def build_graph(bn: BooleanNetwork, space: np.ndarray | None = None) -> ExplicitGraph:
    """Transition graph of `bn` over `space` (default: admissible states)."""
    n = bn.n
    if n > MAX_NODES:
        raise ValueError(f"explicit graph limited to {MAX_NODES} nodes, got {n}")
    size = 2 ** n
    codes = np.arange(size, dtype=np.int64)
    columns = [((codes >> (n - 1 - i)) & 1).astype(bool) for i in range(n)]
    moves = np.empty((n, size), dtype=np.int64)
    for i, f in enumerate(bn.functions):
        flips = _eval_columns(f, columns, size) != columns[i]
        moves[i] = np.where(flips, codes ^ (1 << (n - 1 - i)), codes)
    if space is None:
        space = admissible_mask(bn)
    return ExplicitGraph(n, moves, space)


def apply_control_codes(c: Control, codes: np.ndarray, n: int) -> np.ndarray:
    zero = sum(1 << (n - 1 - i) for i in c.zero_set)
    one = sum(1 << (n - 1 - i) for i in c.one_set)
    return (codes & ~zero) | one


def controlled_space_mask(c: Control, n: int) -> np.ndarray:
    codes = np.arange(2 ** n, dtype=np.int64)
    return apply_control_codes(c, codes, n) == codes


class ExplicitSystem:
    """A network with its admissible graph and graphs under controls."""

    def __init__(self, bn: BooleanNetwork):
        self.bn = bn
        self.n = bn.n
        self.graph = build_graph(bn)
        self._sb: dict = {}

    def attractors(self) -> list[list[int]]:
        return self.graph.terminal_sccs()

    def weak_basin(self, target) -> np.ndarray:
        return self.graph.backward(self._mask(target))

    def strong_basin(self, target) -> np.ndarray:
        """States reaching `target` and no other terminal component."""
        key = tuple(sorted(self._codes(target)))
        if key not in self._sb:
            target_mask = self._mask(target)
            others = np.zeros_like(target_mask)
            for comp in self.attractors():
                if not target_mask[comp].any():
                    others |= self.graph.backward(self.graph.mask(comp))
            self._sb[key] = self.weak_basin(target) & ~others
        return self._sb[key]

    def intermediate(self, c: Control) -> np.ndarray:
        """Mask of ``C(s)`` over all admissible ``s``."""
        codes = np.flatnonzero(self.graph.space)
        m = np.zeros_like(self.graph.space)
        m[apply_control_codes(c, codes, self.n)] = True
        return m

    def controlled_graph(self, c: Control) -> ExplicitGraph:
        return build_graph(controlled_network(self.bn, c), self.intermediate(c))

    def _mask(self, target) -> np.ndarray:
        if isinstance(target, np.ndarray) and target.dtype == bool:
            return target
        return self.graph.mask(target)

    def _codes(self, target):
        if isinstance(target, np.ndarray) and target.dtype == bool:
            return np.flatnonzero(target).tolist()
        return list(target)


def fair_reach(graph: ExplicitGraph, target: np.ndarray) -> np.ndarray:
    """States from which every fair path eventually visits `target`.

    Such a state reaches `target` and cannot reach a terminal component
    that misses `target` without passing through `target` first.
    """
    target = target & graph.space
    traps = np.zeros_like(target)
    for comp in graph.terminal_sccs():
        if not target[comp].any():
            traps[comp] = True
    avoid = graph.backward(traps, graph.space & ~target)
    return graph.backward(target) & ~avoid


def validate_control(system: ExplicitSystem, mode: str, c: Control, target) -> bool:
    """Explicit check that `c` is a target control of kind `mode`."""
    mode = getattr(mode, "value", mode)
    target_mask = system._mask(target)
    phi = system.intermediate(c)
    sb = system.strong_basin(target_mask)
    if mode == "itc":
        return bool((sb[phi]).all())
    graph = system.controlled_graph(c)
    if mode == "ttc":
        release = sb & controlled_space_mask(c, system.n)
        if not release.any():
            return False
        return bool(fair_reach(graph, release)[phi].all())
    if mode == "ptc":
        codes = sorted(np.flatnonzero(target_mask).tolist())
        if codes not in graph.terminal_sccs():
            return False
        return bool(fair_reach(graph, target_mask)[phi].all())
    raise ValueError(f"unknown mode {mode!r}")


def brute_force_min_controls(system: ExplicitSystem, mode: str, target,
                             k_max: int) -> list[Control]:
    """Every valid control of the smallest size up to `k_max`."""
    n = system.n
    if sum(2 ** k * comb(n, k) for k in range(k_max + 1)) > 200_000:
        raise ValueError("brute-force search space too large")
    for k in range(k_max + 1):
        valid = []
        for nodes in itertools.combinations(range(n), k):
            for values in itertools.product((0, 1), repeat=k):
                c = Control.from_literals(zip(nodes, values))
                if validate_control(system, mode, c, target):
                    valid.append(c)
        if valid:
            return sorted(valid, key=Control.sort_key)
    return []


# ---------------------------------------------------------------------------
# random networks


def _minterm(parents, m):
    lits = [Var(p) if (m >> j) & 1 else Not(Var(p)) for j, p in enumerate(parents)]
    return lits[0] if len(lits) == 1 else And(tuple(lits))


def random_network(n: int, rng: random.Random, max_indegree: int = 3) -> BooleanNetwork:
    """Each node gets 1..3 distinct random parents and a random truth table."""
    functions = []
    for _ in range(n):
        d = rng.randint(1, min(max_indegree, n))
        parents = rng.sample(range(n), d)
        table = [rng.randint(0, 1) for _ in range(2 ** d)]
        ones = [m for m, v in enumerate(table) if v]
        if not ones:
            functions.append(Const(0))
        elif len(ones) == len(table):
            functions.append(Const(1))
        elif len(ones) == 1:
            functions.append(_minterm(parents, ones[0]))
        else:
            functions.append(Or(tuple(_minterm(parents, m) for m in ones)))
    return BooleanNetwork(tuple(f"n{i}" for i in range(n)), tuple(functions))


def random_corpus(count: int, seed: int, n_range=(4, 10), max_indegree: int = 3):
    rng = random.Random(seed)
    return [random_network(rng.randint(*n_range), rng, max_indegree) for _ in range(count)]
