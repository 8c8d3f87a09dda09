"""Discrete Bayesian networks: BIF reading and writing, forward sampling, random generation.

Supported BIF subset::

    // comment
    network <name> { }
    variable <name> { type discrete [ k ] { s1, s2, ... }; }
    probability ( X ) { table p1, ..., pk; }
    probability ( X | P1, P2 ) { (a1, a2) p1, ..., pk; ... }
    probability ( X | P1, P2 ) { table ...; }

`property ...;` statements are skipped. Anything else is a `BifParseError` naming the line.
A `table` of a node with parents lists the child state slowest and the last parent fastest.

CPTs are stored as `(q, r)` arrays: one row per parent configuration, configurations in
mixed-radix order over the parents in their declared order (first parent most significant).
"""

from __future__ import annotations

import logging
import math
import os
import re

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import (
    Dict,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

import networkx as nx
import numpy as np

from mecip.commons import public
from mecip.data import CategoricalDataset
from mecip.graph import PartiallyDirectedGraph, find_cycle


logger = logging.getLogger(__name__)

CPT_TOLERANCE = 1e-9
RENORMALIZE_TOLERANCE = 1e-6

# Dirichlet concentration per unit of synthetic "strength"
STRENGTH_TO_ALPHA = 0.5
MAX_BENCHMARK_STRENGTH = 5


class BifParseError(ValueError):
    pass


class BifStructureError(BifParseError):
    pass


@public()
@dataclass(frozen=True, eq=False)
class DiscreteBayesNet:
    names: Tuple[str, ...]
    states: Tuple[Tuple[str, ...], ...]
    parents: Tuple[Tuple[int, ...], ...]
    cpts: Tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        names = tuple(self.names)
        states = tuple(tuple(s) for s in self.states)
        parents = tuple(tuple(int(p) for p in ps) for ps in self.parents)
        n = len(names)
        if not (len(states) == len(parents) == len(self.cpts) == n):
            raise ValueError("Names, states, parents and CPTs must have one entry per node")
        if len(set(names)) != n:
            raise ValueError(f"Node names must be unique, got {list(names)}")
        if any(len(s) < 1 for s in states):
            raise ValueError("Every node needs at least one state")

        cpts = []
        for v, (ps, cpt) in enumerate(zip(parents, self.cpts)):
            if v in ps or len(set(ps)) != len(ps) or any(not 0 <= p < n for p in ps):
                raise BifStructureError(f"Invalid parents {list(ps)} of node {names[v]!r}")
            cpt = np.array(cpt, dtype=np.float64, copy=True)
            shape = (math.prod(len(states[p]) for p in ps), len(states[v]))
            if cpt.shape != shape:
                raise ValueError(f"CPT of {names[v]!r} has shape {cpt.shape}, expected {shape}")
            if np.any(cpt < 0) or np.any(cpt > 1):
                raise ValueError(f"CPT of {names[v]!r} has entries outside [0, 1]")
            if np.any(np.abs(cpt.sum(axis=1) - 1.0) > CPT_TOLERANCE):
                raise ValueError(f"CPT rows of {names[v]!r} do not sum to 1")
            cpt.setflags(write=False)
            cpts.append(cpt)

        object.__setattr__(self, 'names', names)
        object.__setattr__(self, 'states', states)
        object.__setattr__(self, 'parents', parents)
        object.__setattr__(self, 'cpts', tuple(cpts))

        cycle = find_cycle(self.dag)
        if cycle is not None:
            raise BifStructureError(f"Network structure has a cycle {[names[v] for v in cycle]}")

    @cached_property
    def dag(self) -> PartiallyDirectedGraph:
        return PartiallyDirectedGraph.from_parents(self.parents, names=self.names)

    @property
    def n_nodes(self) -> int:
        return len(self.names)

    @property
    def cardinalities(self) -> Tuple[int, ...]:
        return tuple(len(s) for s in self.states)

    def topological_order(self) -> List[int]:
        return list(nx.lexicographical_topological_sort(self.dag.to_networkx()))


@public()
@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a random network, `(n_nodes, max_in_degree, max_states, strength)` plus a seed."""

    n_nodes: int
    max_in_degree: int
    max_states: int
    strength: int
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"Number of nodes must be positive, got {self.n_nodes}")
        if self.max_in_degree < 0:
            raise ValueError(f"Maximum in-degree must be non-negative, got {self.max_in_degree}")
        if self.max_states < 2:
            raise ValueError(f"Maximum number of states must be at least 2, got {self.max_states}")
        if self.strength < 1:
            raise ValueError(f"Strength must be positive, got {self.strength}")

    @property
    def alpha(self) -> float:
        """Dirichlet concentration of CPT rows; 1 is strong dependence, larger is flatter."""
        return STRENGTH_TO_ALPHA * self.strength

    @property
    def label(self) -> str:
        return f"({self.n_nodes}, {self.max_in_degree}, {self.max_states}, {self.strength})"

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> SyntheticSpec:
        """Parses `n,d,s,w` (parentheses and spaces allowed)."""
        parts = [p for p in re.split(r"[\s,()]+", text) if p]
        if len(parts) != 4 or not all(p.isdigit() for p in parts):
            raise ValueError(f"Expected a synthetic tuple 'n,d,s,w', got {text!r}")
        return cls(*map(int, parts), seed=seed)


# BIF reading


_TOKEN_RE = re.compile(r"""
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>//[^\n]*)
  | (?P<punct>[{}()\[\];,|])
  | (?P<word>[^\s{}()\[\];,|]+)
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    text: str
    line: int


def _tokenize(text: str, source: str) -> Iterator[_Token]:
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise BifParseError(f"{source}:{line}: unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind == 'newline':
            line += 1
        elif kind in ('punct', 'word'):
            yield _Token(m.group(), line)
        pos = m.end()


class _BifParser:

    def __init__(self, text: str, source: str):
        self.source = source
        self.tokens = list(_tokenize(text, source))
        self.pos = 0
        self.variables: Dict[str, Tuple[str, ...]] = {}
        self.order: List[str] = []
        self.tables: Dict[str, Tuple[Tuple[str, ...], np.ndarray]] = {}

    def error(self, message: str, token: Optional[_Token] = None) -> BifParseError:
        token = token or self.peek()
        line = token.line if token else (self.tokens[-1].line if self.tokens else 1)
        return BifParseError(f"{self.source}:{line}: {message}")

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> _Token:
        token = self.peek()
        if token is None:
            raise self.error("unexpected end of file")
        self.pos += 1
        return token

    def expect(self, text: str) -> _Token:
        token = self.next()
        if token.text != text:
            raise self.error(f"expected {text!r}, got {token.text!r}", token)
        return token

    def word(self) -> str:
        token = self.next()
        if token.text in "{}()[];,|":
            raise self.error(f"expected a name, got {token.text!r}", token)
        return token.text

    def number(self) -> float:
        token = self.next()
        try:
            return float(token.text)
        except ValueError:
            raise self.error(f"expected a number, got {token.text!r}", token) from None

    def comma_list(self, item, end: str) -> list:
        values = [item()]
        while self.peek() is not None and self.peek().text == ",":
            self.next()
            values.append(item())
        self.expect(end)
        return values

    def skip_statement(self) -> None:
        while self.next().text != ";":
            pass

    def parse(self) -> None:
        while self.peek() is not None:
            token = self.next()
            if token.text == "network":
                self.parse_network()
            elif token.text == "variable":
                self.parse_variable()
            elif token.text == "probability":
                self.parse_probability()
            else:
                raise self.error(f"unsupported block {token.text!r}", token)

    def parse_network(self) -> None:
        self.word()
        self.expect("{")
        while self.peek() is not None and self.peek().text != "}":
            token = self.next()
            if token.text != "property":
                raise self.error(f"unsupported network statement {token.text!r}", token)
            self.skip_statement()
        self.expect("}")

    def parse_variable(self) -> None:
        name_token = self.peek()
        name = self.word()
        if name in self.variables:
            raise self.error(f"variable {name!r} declared twice", name_token)
        self.expect("{")
        states = None
        while self.peek() is not None and self.peek().text != "}":
            token = self.next()
            if token.text == "property":
                self.skip_statement()
            elif token.text == "type":
                kind = self.next()
                if kind.text != "discrete":
                    raise self.error(f"unsupported variable type {kind.text!r}", kind)
                self.expect("[")
                size_token = self.peek()
                size = self.number()
                self.expect("]")
                self.expect("{")
                states = tuple(self.comma_list(self.word, "}"))
                self.expect(";")
                if len(states) != size:
                    raise self.error(f"variable {name!r} declares {int(size)} states, lists {len(states)}", size_token)
                if len(set(states)) != len(states):
                    raise self.error(f"variable {name!r} has duplicated states", size_token)
            else:
                raise self.error(f"unsupported variable statement {token.text!r}", token)
        self.expect("}")
        if states is None:
            raise self.error(f"variable {name!r} has no 'type discrete' declaration", name_token)
        self.variables[name] = states
        self.order.append(name)

    def _lookup(self, name: str, token: _Token) -> Tuple[str, ...]:
        try:
            return self.variables[name]
        except KeyError:
            raise BifStructureError(f"{self.source}:{token.line}: unknown variable {name!r}") from None

    def parse_probability(self) -> None:
        head = self.expect("(")
        child_token = self.peek()
        child = self.word()
        parents: List[str] = []
        if self.peek() is not None and self.peek().text == "|":
            self.next()
            parents = self.comma_list(self.word, ")")
        else:
            self.expect(")")
        if child in self.tables:
            raise self.error(f"probability of {child!r} declared twice", child_token)

        states = self._lookup(child, child_token)
        parent_states = [self._lookup(p, child_token) for p in parents]
        r = len(states)
        q = math.prod(len(s) for s in parent_states)
        cpt = np.full((q, r), np.nan)

        self.expect("{")
        while self.peek() is not None and self.peek().text != "}":
            token = self.peek()
            if token.text == "table":
                self.next()
                values = self.comma_list(self.number, ";")
                if len(values) != q * r:
                    raise self.error(f"table of {child!r} has {len(values)} values, expected {q * r}", token)
                cpt[:, :] = np.asarray(values).reshape(r, q).T
            elif token.text == "(":
                self.next()
                config = self.comma_list(self.word, ")")
                if len(config) != len(parents):
                    raise self.error(f"configuration of {child!r} lists {len(config)} states, expected {len(parents)}", token)
                try:
                    index = [ps.index(s) for ps, s in zip(parent_states, config)]
                except ValueError:
                    raise self.error(f"unknown parent state in {config} of {child!r}", token) from None
                row = np.ravel_multi_index(index, [len(s) for s in parent_states]) if parents else 0
                values = self.comma_list(self.number, ";")
                if len(values) != r:
                    raise self.error(f"row {config} of {child!r} has {len(values)} values, expected {r}", token)
                cpt[row] = values
            elif token.text == "property":
                self.next()
                self.skip_statement()
            else:
                raise self.error(f"unsupported probability statement {token.text!r}", token)
        self.expect("}")

        if np.isnan(cpt).any():
            missing = int(np.isnan(cpt).any(axis=1).sum())
            raise self.error(f"probability of {child!r} misses {missing} parent configurations", head)
        if np.any(cpt < 0):
            raise self.error(f"probability of {child!r} has negative entries", head)
        deviation = np.abs(cpt.sum(axis=1) - 1.0)
        if np.any(deviation > RENORMALIZE_TOLERANCE):
            raise self.error(
                f"rows of {child!r} sum to 1 only within {float(deviation.max()):.3g}", head)
        if np.any(deviation > 0):
            cpt = cpt / cpt.sum(axis=1, keepdims=True)
        self.tables[child] = (tuple(parents), cpt)

    def build(self) -> DiscreteBayesNet:
        missing = [v for v in self.order if v not in self.tables]
        if missing:
            raise BifStructureError(f"{self.source}: no probability block for {missing}")
        index = {name: i for i, name in enumerate(self.order)}
        return DiscreteBayesNet(
            names=tuple(self.order),
            states=tuple(self.variables[v] for v in self.order),
            parents=tuple(tuple(index[p] for p in self.tables[v][0]) for v in self.order),
            cpts=tuple(self.tables[v][1] for v in self.order),
        )


@public()
def parse_bif(text: str, source: str = "<string>") -> DiscreteBayesNet:
    parser = _BifParser(text, source)
    parser.parse()
    return parser.build()


@public()
def read_bif(path: os.PathLike) -> DiscreteBayesNet:
    path = Path(path)
    net = parse_bif(path.read_text(encoding="utf-8"), str(path))
    logger.info("Read %s: %d nodes, %d arcs", path, net.n_nodes, net.dag.n_edges)
    return net


@public()
def format_bif(net: DiscreteBayesNet, comments: str = "", name: str = "unknown") -> str:
    """BIF text of `net`; probabilities use `repr` so the text reads back exactly."""

    out = [comments, f"network {name} {{\n}}\n"]
    for v, states in zip(net.names, net.states):
        out.append(f"variable {v} {{\n  type discrete [ {len(states)} ] {{ {', '.join(states)} }};\n}}\n")

    for v, name_v in enumerate(net.names):
        ps = net.parents[v]
        cpt = net.cpts[v]
        if not ps:
            out.append(f"probability ( {name_v} ) {{\n")
            out.append("  table " + ", ".join(repr(float(p)) for p in cpt[0]) + ";\n}\n")
            continue
        out.append(f"probability ( {name_v} | {', '.join(net.names[p] for p in ps)} ) {{\n")
        shape = [len(net.states[p]) for p in ps]
        for row in range(cpt.shape[0]):
            config = np.unravel_index(row, shape)
            labels = ", ".join(net.states[p][int(i)] for p, i in zip(ps, config))
            out.append(f"  ({labels}) " + ", ".join(repr(float(x)) for x in cpt[row]) + ";\n")
        out.append("}\n")
    return "".join(out)


@public()
def write_bif(net: DiscreteBayesNet, path: os.PathLike, comments: str = "") -> None:
    Path(path).write_text(format_bif(net, comments), encoding="utf-8")
    logger.info("Wrote network with %d nodes into %s", net.n_nodes, path)


# sampling & generation


@public()
def forward_sample(net: DiscreteBayesNet, n: int, seed: int) -> CategoricalDataset:
    """Ancestral sampling with numpy's PCG64 generator seeded by `seed`.

    Each node draws one uniform per row and inverts the cumulative CPT row, nodes
    visited in lexicographic topological order.
    """

    if n < 1:
        raise ValueError(f"Sample size must be positive, got {n}")

    rng = np.random.default_rng(seed)
    rows = np.empty((n, net.n_nodes), dtype=np.int64)
    cards = net.cardinalities
    for v in net.topological_order():
        ps = net.parents[v]
        if ps:
            config = np.ravel_multi_index(tuple(rows[:, p] for p in ps), tuple(cards[p] for p in ps))
        else:
            config = np.zeros(n, dtype=np.int64)
        cumulative = np.cumsum(net.cpts[v], axis=1)
        cumulative[:, -1] = 1.0
        u = rng.random(n)
        drawn = (u[:, None] >= cumulative[config]).sum(axis=1)
        rows[:, v] = np.minimum(drawn, cards[v] - 1)

    return CategoricalDataset(names=net.names, cardinalities=cards, rows=rows, labels=net.states)


@public()
def gen_random_net(spec: SyntheticSpec) -> DiscreteBayesNet:
    """Random network following `spec`.

    Nodes are placed in a random order; each node draws an in-degree uniformly from
    `[0, max_in_degree]` (capped by the number of earlier nodes) and picks its parents
    uniformly among the earlier nodes. Cardinalities are uniform in `[2, max_states]`
    and every CPT row is drawn from a symmetric Dirichlet with concentration `spec.alpha`.
    """

    rng = np.random.default_rng(spec.seed)
    n = spec.n_nodes
    order = rng.permutation(n)
    cards = rng.integers(2, spec.max_states + 1, size=n)

    parents: List[Tuple[int, ...]] = [()] * n
    for position, v in enumerate(order):
        k = min(int(rng.integers(0, spec.max_in_degree + 1)), position)
        chosen = rng.choice(order[:position], size=k, replace=False) if k else []
        parents[int(v)] = tuple(sorted(int(p) for p in chosen))

    cpts = []
    for v in range(n):
        q = math.prod(int(cards[p]) for p in parents[v])
        cpts.append(rng.dirichlet(np.full(int(cards[v]), spec.alpha), size=q))

    logger.debug("Generated network %s seed=%d", spec.label, spec.seed)
    return DiscreteBayesNet(
        names=tuple(f"V{i}" for i in range(n)),
        states=tuple(tuple(f"s{k}" for k in range(int(cards[v]))) for v in range(n)),
        parents=tuple(parents),
        cpts=tuple(cpts),
    )
