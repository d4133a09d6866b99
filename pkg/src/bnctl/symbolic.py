"""Symbolic state sets over a fixed variable order.

State sets are reduced ordered BDDs from :mod:`dd` (the CUDD binding
when it is built, else the pure-Python engine); variable ``v{i}`` is
node ``i`` and the order is declaration order, never reordered.  A
`Universe` owns one BDD manager.  It is not thread-safe, and sets from
different universes cannot be mixed.
"""
from __future__ import annotations

import weakref
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

try:
    import dd.cudd as _bdd
except ImportError:  # pragma: no cover
    import dd.autoref as _bdd

from .model import (And, BooleanNetwork, Const, Control, Not, Or, Var,
                    BoolExpr)

_TRANSITION_CACHE = 64


class Universe:
    """All ``2**n`` states of an ``n``-node network."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("universe needs at least one variable")
        self.n = n
        self.bdd = _bdd.BDD()
        self.bdd.configure(reordering=False)
        self.varnames = [f"v{i}" for i in range(n)]
        self.bdd.declare(*self.varnames)
        self._vars = [self.bdd.var(v) for v in self.varnames]
        self._compiled: dict = {}
        self._transitions: OrderedDict = OrderedDict()

    @classmethod
    def for_network(cls, bn: BooleanNetwork) -> "Universe":
        return cls(bn.n)

    def __repr__(self):
        return f"Universe(n={self.n})"

    def wrap(self, node) -> "StateSet":
        return StateSet(self, node)

    def full(self) -> "StateSet":
        return StateSet(self, self.bdd.true)

    def empty(self) -> "StateSet":
        return StateSet(self, self.bdd.false)

    def literal(self, i: int, value: int):
        return self._vars[i] if value else ~self._vars[i]

    def _cube(self, literals: Iterable[tuple[int, int]]):
        u = self.bdd.true
        for i, v in literals:
            u &= self.literal(i, v)
        return u

    def state(self, bits: Sequence[int]) -> "StateSet":
        if len(bits) != self.n:
            raise ValueError(f"state has {len(bits)} bits, universe has {self.n}")
        return StateSet(self, self._cube(enumerate(bits)))

    def states(self, states: Iterable[Sequence[int]]) -> "StateSet":
        u = self.bdd.false
        for s in states:
            u |= self.state(s).node
        return StateSet(self, u)

    def from_schema(self, schema: "Schema") -> "StateSet":
        if schema.n != self.n:
            raise ValueError("schema and universe sizes differ")
        return StateSet(self, self._cube(schema.literals()))

    def controlled_space(self, c: Control) -> "StateSet":
        """``S|_C``: states that already hold every fixed value of `c`."""
        return StateSet(self, self._cube(c.literals()))

    def compile(self, expr: BoolExpr):
        """BDD of the states in which `expr` is true."""
        u = self._compiled.get(expr)
        if u is not None:
            return u
        if isinstance(expr, Var):
            u = self._vars[expr.index]
        elif isinstance(expr, Const):
            u = self.bdd.true if expr.value else self.bdd.false
        elif isinstance(expr, Not):
            u = ~self.compile(expr.child)
        elif isinstance(expr, And):
            u = self.bdd.true
            for c in expr.children:
                u &= self.compile(c)
        elif isinstance(expr, Or):
            u = self.bdd.false
            for c in expr.children:
                u |= self.compile(c)
        else:
            raise TypeError(f"not an expression: {expr!r}")
        self._compiled[expr] = u
        return u

    def transitions(self, bn: BooleanNetwork) -> "Transitions":
        if bn.n != self.n:
            raise ValueError(f"network has {bn.n} nodes, universe has {self.n}")
        ts = self._transitions.get(bn)
        if ts is None:
            ts = Transitions(self, bn)
            self._transitions[bn] = ts
            if len(self._transitions) > _TRANSITION_CACHE:
                self._transitions.popitem(last=False)
        else:
            self._transitions.move_to_end(bn)
        return ts

    def flip(self, i: int, u):
        """`u` with bit ``i`` of every state inverted."""
        name = self.varnames[i]
        x = self._vars[i]
        lo = self.bdd.let({name: False}, u)
        hi = self.bdd.let({name: True}, u)
        return (x & lo) | (~x & hi)


class StateSet:
    """A canonical set of states; equality is set equality."""

    __slots__ = ("universe", "node")

    def __init__(self, universe: Universe, node):
        self.universe = universe
        self.node = node

    def _other(self, other: "StateSet"):
        if not isinstance(other, StateSet):
            return NotImplemented
        if other.universe is not self.universe:
            raise ValueError("state sets belong to different universes")
        return other.node

    def __or__(self, other):
        return StateSet(self.universe, self.node | self._other(other))

    def __and__(self, other):
        return StateSet(self.universe, self.node & self._other(other))

    def __sub__(self, other):
        return StateSet(self.universe, self.node & ~self._other(other))

    def __invert__(self):
        return StateSet(self.universe, ~self.node)

    union = __or__
    intersect = __and__
    difference = __sub__
    complement = __invert__

    def __eq__(self, other):
        if not isinstance(other, StateSet):
            return NotImplemented
        return self.node == self._other(other)

    def __hash__(self):
        return hash(int(self.node))

    def __le__(self, other):
        return (self.node & ~self._other(other)) == self.universe.bdd.false

    def __ge__(self, other):
        return other <= self

    def issubset(self, other) -> bool:
        return self <= other

    def is_empty(self) -> bool:
        return self.node == self.universe.bdd.false

    def __bool__(self):
        return not self.is_empty()

    def is_full(self) -> bool:
        return self.node == self.universe.bdd.true

    def count(self) -> int:
        return int(self.universe.bdd.count(self.node, nvars=self.universe.n))

    def __contains__(self, state) -> bool:
        u = self.universe
        values = {u.varnames[i]: bool(b) for i, b in enumerate(state)}
        return u.bdd.let(values, self.node) == u.bdd.true

    def __iter__(self) -> Iterator[tuple]:
        return _enumerate(self.universe, self.node, 0, ())

    def to_states(self, limit: int | None = None) -> list[tuple]:
        """Members in lexicographic order of their bit vectors.

        Raises `OverflowError` if there are more than `limit` members.
        """
        if limit is not None and self.count() > limit:
            raise OverflowError(f"set has {self.count()} states, limit is {limit}")
        return list(self)

    def first(self) -> tuple | None:
        """Lexicographically smallest member, or None."""
        return next(iter(self), None)

    def __repr__(self):
        n = self.count()
        if n <= 8:
            body = ", ".join("".join(map(str, s)) for s in self)
            return f"StateSet({{{body}}})"
        return f"StateSet(<{n} states>)"


def _enumerate(universe: Universe, u, level: int, prefix: tuple):
    bdd = universe.bdd
    if u == bdd.false:
        return
    if level == universe.n:
        yield prefix
        return
    name = universe.varnames[level]
    yield from _enumerate(universe, bdd.let({name: False}, u), level + 1, prefix + (0,))
    yield from _enumerate(universe, bdd.let({name: True}, u), level + 1, prefix + (1,))


# ---------------------------------------------------------------------------
# schemata


@dataclass(frozen=True)
class Schema:
    """A cube: nodes fixed to 0, nodes fixed to 1, and free nodes."""

    zero_set: frozenset[int]
    one_set: frozenset[int]
    dont_care: frozenset[int]

    def __post_init__(self):
        for name in ("zero_set", "one_set", "dont_care"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        z, o, d = self.zero_set, self.one_set, self.dont_care
        if z & o or z & d or o & d:
            raise ValueError("schema index sets must be disjoint")
        if z | o | d != frozenset(range(len(z) + len(o) + len(d))):
            raise ValueError("schema index sets must cover 0..n-1")

    @property
    def n(self) -> int:
        return len(self.zero_set) + len(self.one_set) + len(self.dont_care)

    @classmethod
    def parse(cls, pattern: str) -> "Schema":
        """``"10*"`` -> node 0 at 1, node 1 at 0, node 2 free."""
        groups = {"0": set(), "1": set(), "*": set()}
        for i, ch in enumerate(pattern):
            if ch not in groups:
                raise ValueError(f"bad schema character {ch!r}")
            groups[ch].add(i)
        return cls(frozenset(groups["0"]), frozenset(groups["1"]), frozenset(groups["*"]))

    def __str__(self):
        return "".join("0" if i in self.zero_set else "1" if i in self.one_set else "*"
                       for i in range(self.n))

    def literals(self) -> list[tuple[int, int]]:
        return sorted([(i, 0) for i in self.zero_set] + [(i, 1) for i in self.one_set])

    def size(self) -> int:
        return 2 ** len(self.dont_care)

    @property
    def support(self) -> frozenset[int]:
        return self.zero_set | self.one_set

    def to_control(self) -> Control:
        return Control(self.zero_set, self.one_set)


_RANK = {"0": 0, "1": 1, "*": 2}


def largest_cube(states: StateSet) -> Schema:
    """A cube inside `states` with the most free variables.

    Ties are broken towards the pattern that is lexicographically smallest
    under ``0 < 1 < *``, scanning variables in order.
    """
    if states.is_empty():
        raise ValueError("largest cube of an empty set")
    universe = states.universe
    memo: dict = {}
    free, pattern = _padded(_best_cube(universe, states.node, memo), states.node, 0, universe.n)
    memo.clear()
    return Schema.parse(pattern)


def _best_cube(universe: Universe, u, memo: dict):
    """(free count, pattern) over levels u.level..n-1, or None when u is false."""
    bdd = universe.bdd
    if u == bdd.false:
        return None
    if u == bdd.true:
        return (0, "")
    key = int(u)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    level = u.level
    name = universe.varnames[level]
    lo = bdd.let({name: False}, u)
    hi = bdd.let({name: True}, u)
    options = []
    for ch, sub in (("0", lo), ("1", hi), ("*", lo & hi)):
        r = _padded(_best_cube(universe, sub, memo), sub, level + 1, universe.n)
        if r is not None:
            free, tail = r
            options.append((free + (ch == "*"), ch + tail))
    result = max(options, key=lambda o: (o[0], [-_RANK[c] for c in o[1]]))
    # keep u alive so its node id is not reused while memoized
    memo[key] = (u, result)
    return result


def _padded(result, u, level, n):
    """Prefix '*' for the variables skipped between `level` and u's top level."""
    if result is None:
        return None
    top = n if u.var is None else u.level
    gap = top - level
    return (result[0] + gap, "*" * gap + result[1])


def schema_cover(states: StateSet) -> list[Schema]:
    """Greedy partition of `states` into disjoint cubes, largest first."""
    universe = states.universe
    remaining = states
    cover = []
    while not remaining.is_empty():
        cube = largest_cube(remaining)
        cover.append(cube)
        remaining = remaining - universe.from_schema(cube)
    return cover


def from_schema(universe: Universe, schema: Schema) -> StateSet:
    return universe.from_schema(schema)


# ---------------------------------------------------------------------------
# controls on sets


def restrict_to_control(states: StateSet, c: Control) -> StateSet:
    """``states ∩ S|_C``."""
    return states & states.universe.controlled_space(c)


def apply_control_set(c: Control, states: StateSet) -> StateSet:
    """Image of `states` under forcing every node of `c` to its value."""
    universe = states.universe
    if not c.size:
        return states
    names = [universe.varnames[i] for i in sorted(c.nodes)]
    u = universe.bdd.exist(names, states.node)
    return StateSet(universe, u & universe._cube(c.literals()))


# ---------------------------------------------------------------------------
# asynchronous transitions


class Transitions:
    """Asynchronous transition relation of a network, one part per node.

    ``enabled[i]`` holds the states in which node ``i`` disagrees with its
    update function, i.e. where updating ``i`` flips it.  The relation is
    never built monolithically.
    """

    def __init__(self, universe: Universe, bn: BooleanNetwork):
        # the universe caches us; a strong back-reference would make a cycle
        self._universe = weakref.ref(universe)
        self.bn = bn
        bdd = universe.bdd
        # dd Functions have no xor operator
        self.enabled = [~universe._vars[i].equiv(universe.compile(f))
                        for i, f in enumerate(bn.functions)]
        stay = bdd.false
        for e in self.enabled:
            stay |= ~e
        self.selfloops = stay

    @property
    def universe(self) -> Universe:
        return self._universe()

    def post_moves(self, states: StateSet) -> StateSet:
        """Successors through bit flips only (selfloops omitted)."""
        u = self.universe
        out = u.bdd.false
        for i, e in enumerate(self.enabled):
            moving = states.node & e
            if moving != u.bdd.false:
                out |= u.flip(i, moving)
        return StateSet(u, out)

    def pre_moves(self, states: StateSet) -> StateSet:
        """Predecessors through bit flips only (selfloops omitted)."""
        u = self.universe
        out = u.bdd.false
        for i, e in enumerate(self.enabled):
            out |= e & u.flip(i, states.node)
        return StateSet(u, out)

    def post(self, states: StateSet) -> StateSet:
        return self.post_moves(states) | StateSet(self.universe, states.node & self.selfloops)

    def pre(self, states: StateSet) -> StateSet:
        return self.pre_moves(states) | StateSet(self.universe, states.node & self.selfloops)

    def single_successor(self) -> StateSet:
        """States with exactly one enabled flip."""
        bdd = self.universe.bdd
        none, one = bdd.true, bdd.false
        for e in self.enabled:
            none, one = none & ~e, (one & ~e) | (none & e)
        return StateSet(self.universe, one)


def async_post(bn: BooleanNetwork, states: StateSet) -> StateSet:
    """All successors of `states`, selfloops included."""
    return states.universe.transitions(bn).post(states)


def async_pre(bn: BooleanNetwork, states: StateSet) -> StateSet:
    """All predecessors of `states`, selfloops included."""
    return states.universe.transitions(bn).pre(states)
