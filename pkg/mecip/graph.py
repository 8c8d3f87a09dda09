"""Mixed graphs over integer nodes: DAGs, undirected graphs and CPDAGs.

A single value type, `PartiallyDirectedGraph`, carries both directed (`u -> v`) and
undirected (`u -- v`) edges. Which "mode" a graph is in follows from its edges:
no directed edges make an undirected graph, no undirected edges and no cycle make a DAG.
Intermediate solver graphs may hold both `u -> v` and `v -> u`; every DAG operation
rejects such graphs as cyclic.
"""

from __future__ import annotations

import itertools
import logging

from dataclasses import dataclass, field
from functools import cached_property
from itertools import islice
from typing import (
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import networkx as nx
from networkx.algorithms.connectivity import local_node_connectivity

from mecip.commons import public


logger = logging.getLogger(__name__)

Edge = Tuple[int, int]

DEFAULT_RULE_ORDER = (1, 2, 3, 4)


class CyclicGraphError(ValueError):
    pass


def _pair(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@public()
@dataclass(frozen=True)
class PartiallyDirectedGraph:
    """Graph over nodes `0..n-1`.

    Undirected edges are stored as `(u, v)` with `u < v`. `names` are display labels
    and do not take part in equality.
    """

    n: int
    directed: FrozenSet[Edge] = frozenset()
    undirected: FrozenSet[Edge] = frozenset()
    names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        directed = frozenset((int(u), int(v)) for u, v in self.directed)
        undirected = frozenset(_pair(int(u), int(v)) for u, v in self.undirected)
        for u, v in itertools.chain(directed, undirected):
            if u == v:
                raise ValueError(f"Self loop on node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"Edge ({u}, {v}) out of range for {self.n} nodes")
        both = {_pair(u, v) for u, v in directed} & undirected
        if both:
            raise ValueError(f"Pairs {sorted(both)} are both directed and undirected")
        names = self.names
        if names is not None:
            names = tuple(names)
            if len(names) != self.n:
                raise ValueError(f"Expected {self.n} names, got {len(names)}")
        object.__setattr__(self, 'directed', directed)
        object.__setattr__(self, 'undirected', undirected)
        object.__setattr__(self, 'names', names)

    @classmethod
    def empty(cls, n: int, names: Optional[Sequence[str]] = None) -> PartiallyDirectedGraph:
        return cls(n, names=tuple(names) if names is not None else None)

    @classmethod
    def complete(cls, n: int, names: Optional[Sequence[str]] = None) -> PartiallyDirectedGraph:
        return cls(
            n,
            undirected=frozenset(itertools.combinations(range(n), 2)),
            names=tuple(names) if names is not None else None,
        )

    @classmethod
    def from_parents(cls, parents: Sequence[Iterable[int]], names: Optional[Sequence[str]] = None):
        directed = frozenset((p, v) for v, ps in enumerate(parents) for p in ps)
        return cls(len(parents), directed=directed, names=tuple(names) if names is not None else None)

    # adjacency

    @cached_property
    def _adjacency(self) -> Tuple[FrozenSet[int], ...]:
        adj: List[Set[int]] = [set() for _ in range(self.n)]
        for u, v in itertools.chain(self.directed, self.undirected):
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @cached_property
    def _parents(self) -> Tuple[Tuple[int, ...], ...]:
        parents: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in self.directed:
            parents[v].append(u)
        return tuple(tuple(sorted(p)) for p in parents)

    @cached_property
    def _children(self) -> Tuple[Tuple[int, ...], ...]:
        children: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in self.directed:
            children[u].append(v)
        return tuple(tuple(sorted(c)) for c in children)

    def neighbors(self, v: int) -> FrozenSet[int]:
        """Nodes adjacent to `v` through an edge of any kind."""
        return self._adjacency[v]

    def parents(self, v: int) -> Tuple[int, ...]:
        return self._parents[v]

    def children(self, v: int) -> Tuple[int, ...]:
        return self._children[v]

    def undirected_neighbors(self, v: int) -> FrozenSet[int]:
        return frozenset(
            w for w in self._adjacency[v]
            if _pair(v, w) in self.undirected
        )

    def is_adjacent(self, u: int, v: int) -> bool:
        return v in self._adjacency[u]

    def skeleton(self) -> FrozenSet[Edge]:
        return frozenset(_pair(u, v) for u, v in self.directed) | self.undirected

    @property
    def n_edges(self) -> int:
        return len(self.skeleton())

    @property
    def max_in_degree(self) -> int:
        return max((len(p) for p in self._parents), default=0)

    def label(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)

    # modes

    def is_undirected(self) -> bool:
        return not self.directed

    def is_dag(self) -> bool:
        return not self.undirected and find_cycle(self) is None

    # derived graphs

    def to_networkx(self) -> nx.DiGraph:
        """Directed part of the graph; nodes and edges are inserted in sorted order."""
        g = nx.DiGraph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(sorted(self.directed))
        return g

    def with_edges(
        self,
        directed: Iterable[Edge] = (),
        undirected: Iterable[Edge] = (),
    ) -> PartiallyDirectedGraph:
        return PartiallyDirectedGraph(
            self.n,
            directed=self.directed | frozenset(directed),
            undirected=self.undirected | frozenset(_pair(u, v) for u, v in undirected),
            names=self.names,
        )


def _require_directed(g: PartiallyDirectedGraph) -> None:
    if g.undirected:
        raise ValueError(f"Expected directed edges only, got {len(g.undirected)} undirected edges")


def _require_dag(g: PartiallyDirectedGraph) -> None:
    _require_directed(g)
    cycle = find_cycle(g)
    if cycle is not None:
        raise CyclicGraphError(f"Graph has a directed cycle {[g.label(v) for v in cycle]}")


def _canonical_cycle(cycle: List[int]) -> List[int]:
    i = cycle.index(min(cycle))
    return cycle[i:] + cycle[:i]


@public()
def find_cycle(g: PartiallyDirectedGraph) -> Optional[List[int]]:
    """One elementary directed cycle as a node list, or `None` for an acyclic graph."""
    _require_directed(g)
    try:
        edges = nx.find_cycle(g.to_networkx())
    except nx.NetworkXNoCycle:
        return None
    return [u for u, _ in edges]


@public()
def enumerate_cycles(g: PartiallyDirectedGraph, limit: int) -> List[List[int]]:
    """Up to `limit` elementary cycles (Johnson's algorithm), each rotated to start at its smallest node."""
    _require_directed(g)
    if limit < 1:
        raise ValueError(f"Cycle limit must be positive, got {limit}")
    cycles = [_canonical_cycle(list(c)) for c in islice(nx.simple_cycles(g.to_networkx()), limit)]
    return sorted(cycles, key=lambda c: (len(c), c))


def ancestors(g: PartiallyDirectedGraph, nodes: Iterable[int]) -> FrozenSet[int]:
    """Directed ancestors of `nodes`, the nodes themselves included."""
    dig = g.to_networkx()
    found: Set[int] = set(nodes)
    for v in list(found):
        found |= nx.ancestors(dig, v)
    return frozenset(found)


@public()
def d_separated(g: PartiallyDirectedGraph, x: int, y: int, z: Iterable[int] = ()) -> bool:
    """True when every path between `x` and `y` is blocked by `z` in the DAG `g`.

    Reachability traversal in the style of the "Bayes ball": a trail may pass a collider
    only when the collider or one of its descendants is in `z`, and any other node only
    when it is not in `z`.
    """

    _require_dag(g)
    z = frozenset(z)
    if x == y:
        raise ValueError(f"Endpoints must differ, got {x} twice")
    if x in z or y in z:
        raise ValueError(f"Endpoints ({x}, {y}) must not be in the conditioning set")

    observed_ancestry = ancestors(g, z)
    # direction: True when the trail arrived from a child (moving up), False from a parent
    stack: List[Tuple[int, bool]] = [(x, True)]
    visited: Set[Tuple[int, bool]] = set()
    while stack:
        v, up = stack.pop()
        if (v, up) in visited:
            continue
        visited.add((v, up))
        if v == y:
            return False
        if up and v not in z:
            stack.extend((p, True) for p in g.parents(v))
            stack.extend((c, False) for c in g.children(v))
        elif not up:
            if v not in z:
                stack.extend((c, False) for c in g.children(v))
            if v in observed_ancestry:
                stack.extend((p, True) for p in g.parents(v))
    return True


def moral_graph(g: PartiallyDirectedGraph, nodes: Optional[Iterable[int]] = None) -> nx.Graph:
    """Moral graph of the subgraph induced by `nodes` (all nodes by default)."""
    keep = set(range(g.n)) if nodes is None else set(nodes)
    moral = nx.Graph()
    moral.add_nodes_from(sorted(keep))
    for v in sorted(keep):
        parents = [p for p in g.parents(v) if p in keep]
        moral.add_edges_from((p, v) for p in parents)
        moral.add_edges_from(itertools.combinations(parents, 2))
    return moral


@public()
def min_d_separator(g: PartiallyDirectedGraph, a: int, b: int) -> Optional[FrozenSet[int]]:
    """A smallest set d-separating `a` and `b`, or `None` when no set does.

    The separator is a minimum vertex cut between `a` and `b` in the moral graph of
    their ancestral set. Among all minimum cuts the lexicographically smallest one
    (compared as sorted index tuples) is returned.
    """

    _require_dag(g)
    if a == b:
        raise ValueError(f"Endpoints must differ, got {a} twice")
    if g.is_adjacent(a, b):
        raise ValueError(f"Nodes {g.label(a)} and {g.label(b)} are adjacent and cannot be separated")

    moral = moral_graph(g, ancestors(g, (a, b)))
    if moral.has_edge(a, b):
        return None

    size = local_node_connectivity(moral, a, b)
    chosen: List[int] = []
    for v in sorted(set(moral.nodes) - {a, b}):
        if len(chosen) == size:
            break
        reduced = moral.subgraph(set(moral.nodes) - {v})
        if local_node_connectivity(reduced, a, b) == size - len(chosen) - 1:
            chosen.append(v)
            moral = nx.Graph(reduced)

    logger.debug("Minimum separator of (%s, %s): %s", a, b, chosen)
    return frozenset(chosen)


@public()
def immoralities(g: PartiallyDirectedGraph) -> FrozenSet[Tuple[int, int, int]]:
    """Triples `(u, w, v)` with `u -> v <- w`, `u < w` and `u`, `w` non-adjacent."""
    found = set()
    for v in range(g.n):
        for u, w in itertools.combinations(g.parents(v), 2):
            if not g.is_adjacent(u, w):
                found.add((u, w, v))
    return frozenset(found)


class _MixedEdges:
    """Mutable working copy used while closing a graph under the orientation rules."""

    def __init__(self, g: PartiallyDirectedGraph):
        self.n = g.n
        self.directed: Set[Edge] = set(g.directed)
        self.undirected: Set[Edge] = set(g.undirected)
        self.adjacent: List[Set[int]] = [set(a) for a in g._adjacency]

    def arrow(self, u: int, v: int) -> bool:
        return (u, v) in self.directed

    def line(self, u: int, v: int) -> bool:
        return _pair(u, v) in self.undirected

    def orient(self, u: int, v: int) -> None:
        self.undirected.discard(_pair(u, v))
        self.directed.add((u, v))

    def _rule1(self, a: int, b: int) -> bool:
        # c -> a -- b, c and b non-adjacent
        return any(
            self.arrow(c, a) and c not in self.adjacent[b]
            for c in self.adjacent[a]
        )

    def _rule2(self, a: int, b: int) -> bool:
        # a -> c -> b, a -- b
        return any(self.arrow(a, c) and self.arrow(c, b) for c in self.adjacent[a])

    def _rule3(self, a: int, b: int) -> bool:
        # a -- c -> b, a -- d -> b, c and d non-adjacent
        mids = sorted(c for c in self.adjacent[a] if self.line(a, c) and self.arrow(c, b))
        return any(d not in self.adjacent[c] for c, d in itertools.combinations(mids, 2))

    def _rule4(self, a: int, b: int) -> bool:
        # a -- d, c -> d -> b, a adjacent to c, c and b non-adjacent
        for d in self.adjacent[a]:
            if not (self.line(a, d) and self.arrow(d, b)):
                continue
            for c in self.adjacent[d]:
                if c != a and c != b and self.arrow(c, d) and c in self.adjacent[a] and c not in self.adjacent[b]:
                    return True
        return False

    def close(self, rule_order: Sequence[int]) -> None:
        rules = {1: self._rule1, 2: self._rule2, 3: self._rule3, 4: self._rule4}
        changed = True
        while changed:
            changed = False
            for rule in (rules[i] for i in rule_order):
                for u, v in sorted(self.undirected):
                    for a, b in ((u, v), (v, u)):
                        if self.line(a, b) and rule(a, b):
                            self.orient(a, b)
                            changed = True


@public()
def apply_meek(
    g: PartiallyDirectedGraph,
    rule_order: Sequence[int] = DEFAULT_RULE_ORDER,
) -> PartiallyDirectedGraph:
    """Closes `g` under the four Meek orientation rules."""

    if sorted(rule_order) != [1, 2, 3, 4]:
        raise ValueError(f"Rule order must be a permutation of 1..4, got {rule_order}")
    cycle = find_cycle(PartiallyDirectedGraph(g.n, directed=g.directed))
    if cycle is not None:
        raise CyclicGraphError(f"Directed part has a cycle {[g.label(v) for v in cycle]}")

    work = _MixedEdges(g)
    work.close(rule_order)
    return PartiallyDirectedGraph(g.n, frozenset(work.directed), frozenset(work.undirected), names=g.names)


@public()
def cpdag_of(g: PartiallyDirectedGraph) -> PartiallyDirectedGraph:
    """The CPDAG of the Markov equivalence class of DAG `g`."""

    _require_dag(g)
    compelled = set()
    for u, w, v in immoralities(g):
        compelled.add((u, v))
        compelled.add((w, v))
    pattern = PartiallyDirectedGraph(
        g.n,
        directed=frozenset(compelled),
        undirected=frozenset(_pair(u, v) for u, v in g.directed if (u, v) not in compelled),
        names=g.names,
    )
    return apply_meek(pattern)


@public()
def consistent_extension(g: PartiallyDirectedGraph) -> PartiallyDirectedGraph:
    """A DAG of the class described by CPDAG `g`.

    The lowest undirected edge `u -- v` (`u < v`) is oriented `u -> v` and the
    orientation rules are re-applied until no undirected edge remains.
    """

    current = g
    while current.undirected:
        u, v = min(current.undirected)
        current = apply_meek(PartiallyDirectedGraph(
            current.n,
            directed=current.directed | {(u, v)},
            undirected=current.undirected - {(u, v)},
            names=current.names,
        ))

    if find_cycle(current) is not None or cpdag_of(current) != g:
        raise ValueError("Graph is not a valid CPDAG: it has no consistent DAG extension")
    return current


def format_edge_list(g: PartiallyDirectedGraph, header: str = "") -> str:
    """One `u -> v` or `u -- v` line per edge, preceded by a `# nodes:` line."""
    lines = [header] if header else []
    lines.append("# nodes: " + ",".join(g.label(v) for v in range(g.n)) + "\n")
    for u, v in sorted(g.directed):
        lines.append(f"{g.label(u)} -> {g.label(v)}\n")
    for u, v in sorted(g.undirected):
        lines.append(f"{g.label(u)} -- {g.label(v)}\n")
    return "".join(lines)


def parse_edge_list(text: str, names: Optional[Sequence[str]] = None) -> PartiallyDirectedGraph:
    """Reads the format written by `format_edge_list`.

    Node names come from `names` when given, otherwise from the `# nodes:` line,
    otherwise from the edges in order of first appearance. A `# nodes:` line that
    disagrees with `names` is an error.
    """

    declared: Optional[List[str]] = None
    edges: List[Tuple[str, str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("nodes:"):
                declared = [x.strip() for x in body[len("nodes:"):].split(",") if x.strip()]
            continue
        parts = line.split()
        if len(parts) != 3 or parts[1] not in ("->", "--"):
            raise ValueError(f"line {lineno}: expected 'u -> v' or 'u -- v', got {line!r}")
        edges.append((parts[0], parts[1], parts[2]))

    if names is not None:
        names = list(names)
        if declared is not None and sorted(declared) != sorted(names):
            raise ValueError(f"Edge list declares nodes {declared}, expected {names}")
    elif declared is not None:
        names = declared
    else:
        names = list(dict.fromkeys(x for u, _, v in edges for x in (u, v)))

    index: Dict[str, int] = {name: i for i, name in enumerate(names)}
    directed, undirected = set(), set()
    for u, kind, v in edges:
        if u not in index or v not in index:
            unknown = sorted({u, v} - set(index))
            raise ValueError(f"Unknown nodes {unknown} in edge {u} {kind} {v}")
        (directed if kind == "->" else undirected).add((index[u], index[v]))
    return PartiallyDirectedGraph(len(names), frozenset(directed), frozenset(undirected), names=tuple(names))
