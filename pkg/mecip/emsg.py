"""Initial undirected graph: pairwise tests, extended maximal spanning graph, significance filter."""

from __future__ import annotations

import itertools
import logging

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import (
    Dict,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from mecip.commons import public
from mecip.data import CategoricalDataset, contingency
from mecip.graph import PartiallyDirectedGraph
from mecip.stats import chi_sq_test


logger = logging.getLogger(__name__)


@public()
@dataclass(frozen=True)
class EdgeWeight:
    """Marginal chi-square statistic of the pair `u < v`."""

    u: int
    v: int
    weight: float
    p_value: float

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"Edge weight needs two distinct nodes, got {self.u} twice")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, 'u', u)
            object.__setattr__(self, 'v', v)
        if self.weight < 0:
            raise ValueError(f"Weight of ({self.u}, {self.v}) must be non-negative, got {self.weight}")
        if not 0 <= self.p_value <= 1:
            raise ValueError(f"p-value of ({self.u}, {self.v}) must be in [0, 1], got {self.p_value}")

    @property
    def pair(self) -> Tuple[int, int]:
        return (self.u, self.v)


def _test_pair(ds: CategoricalDataset, pair: Tuple[int, int]) -> EdgeWeight:
    u, v = pair
    result = chi_sq_test(contingency(ds, u, v))
    return EdgeWeight(u, v, result.statistic, result.p_value)


@public()
def pairwise_tests(ds: CategoricalDataset, threads: int = 1) -> List[EdgeWeight]:
    """Marginal chi-square test of every unordered variable pair, in lexicographic pair order."""

    if ds.n_vars < 2:
        raise ValueError(f"Pairwise tests need at least 2 variables, got {ds.n_vars}")
    pairs = list(itertools.combinations(range(ds.n_vars), 2))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            weights = list(pool.map(lambda p: _test_pair(ds, p), pairs))
    else:
        weights = [_test_pair(ds, p) for p in pairs]
    logger.debug("Computed %d pairwise tests", len(weights))
    return weights


def _weights_by_pair(weights: Sequence[EdgeWeight], n: int) -> Dict[Tuple[int, int], EdgeWeight]:
    by_pair: Dict[Tuple[int, int], EdgeWeight] = {}
    for w in weights:
        if w.v >= n:
            raise ValueError(f"Edge ({w.u}, {w.v}) is out of range for {n} nodes")
        if w.pair in by_pair:
            raise ValueError(f"Duplicated weight for pair {w.pair}")
        by_pair[w.pair] = w
    expected = n * (n - 1) // 2
    if len(by_pair) != expected:
        raise ValueError(f"Weights cover {len(by_pair)} pairs, all {expected} pairs of {n} nodes are required")
    return by_pair


@public()
def build_emsg(
    weights: Sequence[EdgeWeight],
    n: Optional[int] = None,
    names: Optional[Sequence[str]] = None,
) -> PartiallyDirectedGraph:
    """Extended maximal spanning graph.

    Starting from the complete graph, edges are visited once in ascending weight order
    (ties by pair). Edge `{A, B}` is dropped when a common neighbour `C` still joined to
    both has `w(A, C) > w(A, B)` and `w(B, C) > w(A, B)`.
    """

    if n is None:
        n = max((w.v for w in weights), default=0) + 1 if weights else (len(names) if names else 0)
    by_pair = _weights_by_pair(weights, n)

    adjacent: List[Set[int]] = [set(range(n)) - {v} for v in range(n)]
    removed = 0
    for w in sorted(weights, key=lambda w: (w.weight, w.u, w.v)):
        a, b = w.pair
        for c in sorted(adjacent[a] & adjacent[b]):
            if by_pair[_key(a, c)].weight > w.weight and by_pair[_key(b, c)].weight > w.weight:
                adjacent[a].discard(b)
                adjacent[b].discard(a)
                removed += 1
                logger.debug("EMSG drops (%d, %d) dominated through %d", a, b, c)
                break

    edges = frozenset((u, v) for u in range(n) for v in adjacent[u] if u < v)
    logger.info("EMSG keeps %d of %d edges", len(edges), len(by_pair))
    return PartiallyDirectedGraph(n, undirected=edges, names=tuple(names) if names is not None else None)


def _key(u: int, v: int) -> Tuple[int, int]:
    return (u, v) if u < v else (v, u)


@public()
def significance_filter(
    g: PartiallyDirectedGraph,
    weights: Sequence[EdgeWeight],
    alpha: float,
) -> PartiallyDirectedGraph:
    """Keeps the edges of undirected `g` whose marginal test rejects independence (`p <= alpha`)."""

    if not 0 < alpha < 1:
        raise ValueError(f"Significance level must be in (0, 1), got {alpha}")
    if g.directed:
        raise ValueError("Significance filter expects an undirected graph")

    p_values = {w.pair: w.p_value for w in weights}
    missing = sorted(e for e in g.undirected if e not in p_values)
    if missing:
        raise ValueError(f"No test result for edges {missing}")

    kept = frozenset(e for e in g.undirected if p_values[e] <= alpha)
    logger.info("Significance filter at alpha=%s keeps %d of %d edges", alpha, len(kept), len(g.undirected))
    return PartiallyDirectedGraph(g.n, undirected=kept, names=g.names)
