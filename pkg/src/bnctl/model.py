"""Boolean networks: update-function expressions, model files, and controls.

A network is an ordered list of node names together with one update
expression per node.  Node ``i`` of the network is variable ``x_i``; its
state bit is ``state[i]``.
"""
from __future__ import annotations

import functools
import logging
import re
from types import MappingProxyType
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

logger = logging.getLogger(__name__)

IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")

State = tuple  # tuple of 0/1 ints, one per node


class ModelError(ValueError):
    """A model file or a network definition is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise ValueError(f"constant must be 0 or 1, got {self.value!r}")


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Not:
    child: "BoolExpr"


@dataclass(frozen=True)
class And:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("And needs at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Or needs at least two children")


BoolExpr = Const | Var | Not | And | Or

TRUE = Const(1)
FALSE = Const(0)


def evaluate(expr: BoolExpr, state: Sequence[int]) -> int:
    """Value of `expr` when node ``i`` holds ``state[i]``."""
    if isinstance(expr, Var):
        return 1 if state[expr.index] else 0
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Not):
        return 1 - evaluate(expr.child, state)
    if isinstance(expr, And):
        return int(all(evaluate(c, state) for c in expr.children))
    if isinstance(expr, Or):
        return int(any(evaluate(c, state) for c in expr.children))
    raise TypeError(f"not an expression: {expr!r}")


def variables(expr: BoolExpr) -> frozenset[int]:
    """Indices occurring syntactically in `expr`."""
    out: set[int] = set()
    stack = [expr]
    while stack:
        e = stack.pop()
        if isinstance(e, Var):
            out.add(e.index)
        elif isinstance(e, Not):
            stack.append(e.child)
        elif isinstance(e, (And, Or)):
            stack.extend(e.children)
    return frozenset(out)


def format_expr(expr: BoolExpr, names: Sequence[str]) -> str:
    """Render `expr` in model-file syntax.

    Nested conjunctions and disjunctions are always parenthesized so that
    re-parsing reproduces the same tree.
    """
    if isinstance(expr, Var):
        return names[expr.index]
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Not):
        inner = format_expr(expr.child, names)
        if isinstance(expr.child, (And, Or)):
            inner = f"({inner})"
        return "!" + inner
    op = " & " if isinstance(expr, And) else " | "
    parts = []
    for c in expr.children:
        s = format_expr(c, names)
        parts.append(f"({s})" if isinstance(c, (And, Or)) else s)
    return op.join(parts)


# ---------------------------------------------------------------------------
# networks


@dataclass(frozen=True)
class BooleanNetwork:
    names: tuple[str, ...]
    functions: tuple[BoolExpr, ...]
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "functions", tuple(self.functions))
        if not self.names:
            raise ModelError("network has no nodes")
        if len(self.names) != len(self.functions):
            raise ModelError("one update function per node is required")
        index = {}
        for i, name in enumerate(self.names):
            if not IDENT.fullmatch(name):
                raise ModelError(f"invalid node name {name!r}")
            if name in index:
                raise ModelError(f"duplicate node {name!r}")
            index[name] = i
        for i, f in enumerate(self.functions):
            bad = [j for j in variables(f) if not 0 <= j < len(self.names)]
            if bad:
                raise ModelError(f"function of {self.names[i]} references index {bad[0]}")
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown node {name!r}") from None

    def to_text(self) -> str:
        lines = ["targets, factors"]
        for name, f in zip(self.names, self.functions):
            lines.append(f"{name}, {format_expr(f, self.names)}")
        return "\n".join(lines) + "\n"


def parents(bn: BooleanNetwork, i: int) -> frozenset[int]:
    """Nodes occurring in the update function of node `i` (no minimization)."""
    return variables(bn.functions[i])


# ---------------------------------------------------------------------------
# model files

_TOKEN = re.compile(r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<const>[01])|(?P<op>[&|!()]))")
_HEADER = re.compile(r"\s*targets\s*,\s*factors\s*", re.IGNORECASE)


class _ExprParser:
    def __init__(self, text: str, index: Mapping[str, int], line: int):
        self.tokens = self._tokenize(text, line)
        self.pos = 0
        self.index = index
        self.line = line

    @staticmethod
    def _tokenize(text, line):
        tokens = []
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ModelError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line)
            kind = m.lastgroup
            tokens.append((kind, m.group(kind)))
            pos = m.end()
        return tokens

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> BoolExpr:
        if not self.tokens:
            raise ModelError("empty update function", self.line)
        expr = self.expr()
        if self.pos != len(self.tokens):
            raise ModelError(f"unexpected token {self.peek()[1]!r}", self.line)
        return expr

    def expr(self):
        terms = [self.term()]
        while self.peek() == ("op", "|"):
            self.take()
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Or(tuple(terms))

    def term(self):
        factors = [self.factor()]
        while self.peek() == ("op", "&"):
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else And(tuple(factors))

    def factor(self):
        kind, value = self.take()
        if kind == "op" and value == "!":
            return Not(self.factor())
        if kind == "op" and value == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise ModelError("missing ')'", self.line)
            return inner
        if kind == "const":
            return Const(int(value))
        if kind == "ident":
            if value not in self.index:
                raise ModelError(f"undeclared node {value!r}", self.line)
            return Var(self.index[value])
        raise ModelError("unexpected end of expression" if kind is None
                         else f"unexpected token {value!r}", self.line)


def parse_network(text: str) -> BooleanNetwork:
    """Parse a BoolNet-style ``targets, factors`` model.

    Node order is the order in which targets are declared.  Raises
    `ModelError` carrying the offending line number.
    """
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not header_seen:
            if not _HEADER.fullmatch(line):
                raise ModelError("expected header 'targets, factors'", lineno)
            header_seen = True
            continue
        target, sep, body = line.partition(",")
        target = target.strip()
        if not sep:
            raise ModelError("expected '<target>, <function>'", lineno)
        if not IDENT.fullmatch(target):
            raise ModelError(f"invalid node name {target!r}", lineno)
        rows.append((lineno, target, body))
    if not header_seen:
        raise ModelError("missing header 'targets, factors'")
    if not rows:
        raise ModelError("model declares no nodes")

    index: dict[str, int] = {}
    for lineno, target, _ in rows:
        if target in index:
            raise ModelError(f"duplicate target {target!r}", lineno)
        index[target] = len(index)
    functions = [_ExprParser(body, index, lineno).parse() for lineno, _, body in rows]
    return BooleanNetwork(tuple(index), tuple(functions))


def load_network(path) -> BooleanNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# ---------------------------------------------------------------------------
# input nodes


@dataclass(frozen=True)
class InputClassification:
    inputs: frozenset[int]
    specified: frozenset[int]
    nonspecified: frozenset[int]
    # self-negating nodes (f = !x); excluded from `inputs`
    oscillating: frozenset[int] = frozenset()
    # constant value of each specified input
    values: Mapping[int, int] = field(default_factory=dict, compare=False)


@functools.lru_cache(maxsize=256)
def classify_inputs(bn: BooleanNetwork) -> InputClassification:
    """Split the input nodes into specified (constant) and non-specified
    (identity) ones."""
    specified, nonspecified, oscillating = set(), set(), set()
    values = {}
    for i, f in enumerate(bn.functions):
        if not parents(bn, i) <= {i}:
            continue
        state = [0] * bn.n
        at0 = evaluate(f, state)
        state[i] = 1
        at1 = evaluate(f, state)
        if at0 == at1:
            specified.add(i)
            values[i] = at0
        elif (at0, at1) == (0, 1):
            nonspecified.add(i)
        else:
            oscillating.add(i)
            logger.warning("input node %s negates itself; not treated as an input", bn.names[i])
    return InputClassification(
        inputs=frozenset(specified | nonspecified),
        specified=frozenset(specified),
        nonspecified=frozenset(nonspecified),
        oscillating=frozenset(oscillating),
        values=MappingProxyType(values),
    )


# ---------------------------------------------------------------------------
# controls


@dataclass(frozen=True)
class Control:
    """Nodes held at 0 (`zero_set`) and at 1 (`one_set`)."""

    zero_set: frozenset[int] = frozenset()
    one_set: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "zero_set", frozenset(self.zero_set))
        object.__setattr__(self, "one_set", frozenset(self.one_set))
        both = self.zero_set & self.one_set
        if both:
            raise ValueError(f"nodes {sorted(both)} fixed to both 0 and 1")

    @classmethod
    def from_literals(cls, literals: Iterable[tuple[int, int]]) -> "Control":
        zero, one = set(), set()
        for i, v in literals:
            (one if v else zero).add(i)
        return cls(frozenset(zero), frozenset(one))

    @property
    def size(self) -> int:
        return len(self.zero_set) + len(self.one_set)

    def __len__(self):
        return self.size

    @property
    def nodes(self) -> frozenset[int]:
        return self.zero_set | self.one_set

    def literals(self) -> tuple[tuple[int, int], ...]:
        """``(index, value)`` pairs sorted by index."""
        lits = [(i, 0) for i in self.zero_set] + [(i, 1) for i in self.one_set]
        return tuple(sorted(lits))

    def sort_key(self):
        return (self.size, self.literals())

    def without(self, nodes: Iterable[int]) -> "Control":
        nodes = frozenset(nodes)
        return Control(self.zero_set - nodes, self.one_set - nodes)

    def format(self, names: Sequence[str]) -> str:
        return ", ".join(f"{names[i]}={v}" for i, v in self.literals())


def parse_control(text: str, bn: BooleanNetwork) -> Control:
    """Parse ``"name=0, name=1"`` into a control on `bn`."""
    literals = {}
    for item in re.split(r"[,\s]+", text.strip()):
        if not item:
            continue
        name, eq, value = item.partition("=")
        if not eq or value not in ("0", "1"):
            raise ValueError(f"bad literal {item!r}; expected name=0 or name=1")
        i = bn.index(name)
        if literals.get(i, int(value)) != int(value):
            raise ValueError(f"node {name} fixed to both 0 and 1")
        literals[i] = int(value)
    return Control.from_literals(literals.items())


def apply_control_state(c: Control, state: Sequence[int]) -> State:
    return tuple(0 if i in c.zero_set else 1 if i in c.one_set else s
                 for i, s in enumerate(state))


def controlled_network(bn: BooleanNetwork, c: Control) -> BooleanNetwork:
    """The network with every controlled node's function replaced by its constant."""
    if not c.size:
        return bn
    functions = tuple(FALSE if i in c.zero_set else TRUE if i in c.one_set else f
                      for i, f in enumerate(bn.functions))
    return BooleanNetwork(bn.names, functions)
