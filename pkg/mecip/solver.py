"""Exact score-based structure learning as a parent-set integer program.

Each node picks exactly one candidate parent set. Acyclicity is enforced lazily:
whenever the optimum contains directed cycles, every cycle `C` found becomes a cut

    sum over i in C of (x[i, S] for S disjoint from C) >= 1

i.e. some member of the cycle must take its parents from outside it. The program
is solved exactly by depth-first branch and bound.
"""

from __future__ import annotations

import itertools
import logging
import math

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import (
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

from mecip.commons import public
from mecip.data import CategoricalDataset
from mecip.graph import PartiallyDirectedGraph, enumerate_cycles
from mecip.stats import LocalScoreCache


logger = logging.getLogger(__name__)

DEFAULT_CANDIDATE_BUDGET = 1 << 20
DEFAULT_CYCLES_PER_ROUND = 100
DEFAULT_MAX_ROUNDS = 10_000

# relative slack applied to bounds so float rounding never prunes an optimum
_BOUND_SLACK = 1e-9

ParentSet = Tuple[int, ...]


class ResourceLimitExceeded(RuntimeError):
    pass


class SolverInvariantError(AssertionError):
    pass


@public()
@dataclass(frozen=True)
class ScoreTable:
    """Candidate parent sets with their local scores, per node.

    `candidates[v]` lists `(parents, score)` pairs; the empty set is always present
    and no set repeats.
    """

    n: int
    candidates: Tuple[Tuple[Tuple[ParentSet, float], ...], ...]
    names: Optional[Tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        candidates = tuple(
            tuple((tuple(sorted(ps)), float(score)) for ps, score in node)
            for node in self.candidates
        )
        if len(candidates) != self.n:
            raise ValueError(f"Expected candidates for {self.n} nodes, got {len(candidates)}")
        for v, node in enumerate(candidates):
            sets = [ps for ps, _ in node]
            if () not in sets:
                raise ValueError(f"Node {v} has no empty parent set candidate")
            if len(set(sets)) != len(sets):
                raise ValueError(f"Node {v} has duplicated parent set candidates")
            if any(v in ps or not all(0 <= p < self.n for p in ps) for ps in sets):
                raise ValueError(f"Node {v} has an invalid parent set candidate")
        object.__setattr__(self, 'candidates', candidates)

    def for_node(self, v: int) -> Tuple[Tuple[ParentSet, float], ...]:
        return self.candidates[v]

    @property
    def size(self) -> int:
        return sum(len(c) for c in self.candidates)

    def label(self, v: int) -> str:
        return self.names[v] if self.names is not None else str(v)


@public()
class CutPool:
    """Cycle cuts collected across solver rounds, without duplicates."""

    def __init__(self, cuts: Iterable[Iterable[int]] = ()):
        self._cuts: List[FrozenSet[int]] = []
        for c in cuts:
            self.add(c)

    def add(self, nodes: Iterable[int]) -> bool:
        """Adds a cut, returns false when the same node set is already pooled."""
        cut = frozenset(nodes)
        if len(cut) < 2:
            raise ValueError(f"A cycle cut needs at least 2 nodes, got {sorted(cut)}")
        if cut in self._cuts:
            return False
        self._cuts.append(cut)
        return True

    def __iter__(self) -> Iterator[FrozenSet[int]]:
        return iter(self._cuts)

    def __len__(self) -> int:
        return len(self._cuts)

    def __contains__(self, nodes) -> bool:
        return frozenset(nodes) in self._cuts

    def satisfied_by(self, parent_sets: Sequence[Iterable[int]]) -> bool:
        """True if, for every cut, some member takes all of its parents from outside the cut."""
        return all(
            any(not (set(parent_sets[i]) & cut) for i in cut)
            for cut in self._cuts
        )


@public()
@dataclass(frozen=True)
class Assignment:
    """Index of the chosen candidate of every node, plus the total score."""

    choices: Tuple[int, ...]
    objective: float

    def parent_sets(self, table: ScoreTable) -> List[ParentSet]:
        return [table.candidates[v][c][0] for v, c in enumerate(self.choices)]

    def to_graph(self, table: ScoreTable) -> PartiallyDirectedGraph:
        return PartiallyDirectedGraph.from_parents(self.parent_sets(table), names=table.names)


@public()
@dataclass(frozen=True)
class AcyclicSolution:
    dag: PartiallyDirectedGraph
    objective: float
    assignment: Assignment
    rounds: int
    cuts: Tuple[FrozenSet[int], ...]
    history: Tuple[float, ...] = ()


def _candidate_sets(neighbors: Sequence[int], cap: Optional[int]) -> Iterator[ParentSet]:
    top = len(neighbors) if cap is None else min(cap, len(neighbors))
    for k in range(top + 1):
        yield from itertools.combinations(neighbors, k)


@public()
def build_score_table(
    ds: CategoricalDataset,
    ug: PartiallyDirectedGraph,
    max_set_size: Optional[int] = None,
    budget: int = DEFAULT_CANDIDATE_BUDGET,
    cache: Optional[LocalScoreCache] = None,
    threads: int = 1,
) -> ScoreTable:
    """BIC of every subset of each node's UG neighbourhood, by size then lexicographically.

    Without `max_set_size` a node whose neighbourhood has more than `budget` subsets
    raises `ResourceLimitExceeded`; candidates are never silently truncated.
    """

    if ug.n != ds.n_vars:
        raise ValueError(f"Graph has {ug.n} nodes, dataset has {ds.n_vars} variables")
    if max_set_size is not None and max_set_size < 0:
        raise ValueError(f"Parent set size cap must be non-negative, got {max_set_size}")

    for v in range(ug.n):
        degree = len(ug.neighbors(v))
        if max_set_size is None and 2 ** degree > budget:
            raise ResourceLimitExceeded(
                f"Node {ds.names[v]!r} has {degree} neighbours: 2^{degree} parent sets exceed "
                f"the budget of {budget}; raise the budget or cap the parent set size")

    cache = cache or LocalScoreCache(ds)
    jobs = [
        (v, ps)
        for v in range(ug.n)
        for ps in _candidate_sets(sorted(ug.neighbors(v)), max_set_size)
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = list(pool.map(lambda job: cache.score(*job), jobs))
    else:
        scores = [cache.score(v, ps) for v, ps in jobs]

    candidates: List[List[Tuple[ParentSet, float]]] = [[] for _ in range(ug.n)]
    for (v, ps), score in zip(jobs, scores):
        candidates[v].append((ps, score))

    logger.debug("Score table with %d candidates over %d nodes", len(jobs), ug.n)
    return ScoreTable(ug.n, tuple(tuple(c) for c in candidates), names=ds.names)


def _mask(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


def _undominated(node: Sequence[Tuple[ParentSet, float]]) -> List[Tuple[float, int, int]]:
    """Drops candidates scoring no better than some proper subset, as `(score, index, mask)`."""

    score_of = {_mask(ps): score for ps, score in node}
    best_below = {}
    kept = []
    for i, (ps, score) in sorted(enumerate(node), key=lambda item: len(item[1][0])):
        m = _mask(ps)
        below = -math.inf
        for p in ps:
            sub = m & ~(1 << p)
            if sub in score_of:
                below = max(below, score_of[sub], best_below[sub])
        best_below[m] = below
        if below < score:
            kept.append((score, i, m))
    return kept


def _greedy_order_incumbent(options: List[List[Tuple[float, int, int]]]) -> List[int]:
    """Option per node from a greedy topological order, as indices into `options`.

    Nodes are placed one at a time, each taking its best option whose parents are
    already placed; the node giving up the least against its unconstrained best goes
    next. The result is acyclic, so it satisfies every cycle cut.
    """

    n = len(options)
    best = [opts[0][0] for opts in options]
    choice = [0] * n
    placed = 0
    remaining = set(range(n))
    while remaining:
        pick, pick_k, pick_loss = -1, 0, math.inf
        for v in sorted(remaining):
            k = next(k for k, (_, _, m) in enumerate(options[v]) if not m & ~placed)
            loss = best[v] - options[v][k][0]
            if loss < pick_loss:
                pick, pick_k, pick_loss = v, k, loss
        choice[pick] = pick_k
        placed |= 1 << pick
        remaining.remove(pick)
    return choice


class _BranchAndBound:
    """Depth-first search, branching first on the nodes sharing the most cuts.

    Candidates of a node are tried by descending score (ties by candidate index).
    The bound of a partial assignment is the sum of the remaining per-node maxima
    minus the losses of a greedy packing of unsatisfied cuts whose undecided members
    are pairwise disjoint: such cuts must be satisfied by distinct nodes. The search
    starts from an acyclic incumbent built in a greedy topological order.
    """

    def __init__(self, table: ScoreTable, cuts: Sequence[FrozenSet[int]]):
        self.n = n = table.n
        self.cuts = [_mask(c) for c in cuts]

        # a candidate is dominated by a subset with at least its score: the subset
        # satisfies every cut the superset does
        self.options: List[List[Tuple[float, int, int]]] = []
        for node in table.candidates:
            kept = _undominated(node)
            kept.sort(key=lambda o: (-o[0], o[1]))
            self.options.append(kept)

        in_cuts = [sum(cut >> v & 1 for cut in self.cuts) for v in range(n)]
        self.order = sorted(range(n), key=lambda v: (-in_cuts[v], v))
        position = [0] * n
        for d, v in enumerate(self.order):
            position[v] = d

        best = [opts[0][0] for opts in self.options]
        self.suffix = [0.0] * (n + 1)
        # undecided[d]: bitmask of the nodes branched on at depth d or later
        self.undecided = [0] * (n + 1)
        for d in range(n - 1, -1, -1):
            v = self.order[d]
            self.suffix[d] = self.suffix[d + 1] + best[v]
            self.undecided[d] = self.undecided[d + 1] | 1 << v

        # satisfied[v][k]: bitmask of cuts satisfied when node v takes option k
        self.satisfied = [
            [
                _mask(j for j, cut in enumerate(self.cuts) if cut >> v & 1 and not (m & cut))
                for _, _, m in self.options[v]
            ]
            for v in range(n)
        ]
        # cuts that must be satisfied once depth d is assigned (their last member in branching order)
        last = [max(position[v] for v in range(n) if cut >> v & 1) for cut in self.cuts]
        self.closing = [_mask(j for j, d in enumerate(last) if d == depth) for depth in range(n)]

        # loss[j][d]: least score an undecided member gives up to satisfy cut j at depth d
        self.loss: List[List[float]] = []
        for cut in self.cuts:
            own = [math.inf] * (n + 1)
            for d, v in enumerate(self.order):
                if cut >> v & 1:
                    disjoint = max(score for score, _, m in self.options[v] if not (m & cut))
                    own[d] = best[v] - disjoint
            for d in range(n - 1, -1, -1):
                own[d] = min(own[d], own[d + 1])
            self.loss.append(own)
        # cuts still open at depth d, largest loss first
        self.by_loss = [
            sorted((j for j in range(len(self.cuts)) if 0 < self.loss[j][d] < math.inf),
                   key=lambda j: (-self.loss[j][d], j))
            for d in range(n + 1)
        ]

        self.scale = 1.0 + sum(abs(b) for b in best)
        self.best_choice = _greedy_order_incumbent(self.options)
        self.best_value = math.fsum(self.options[v][k][0] for v, k in enumerate(self.best_choice))
        self.nodes_visited = 0

    def _penalty(self, depth: int, satisfied: int) -> float:
        undecided = self.undecided[depth]
        used = 0
        total = 0.0
        for j in self.by_loss[depth]:
            if satisfied >> j & 1:
                continue
            members = self.cuts[j] & undecided
            if members & used:
                continue
            used |= members
            total += self.loss[j][depth]
        return total

    def run(self) -> Tuple[List[int], float]:
        choice = [0] * self.n
        slack = _BOUND_SLACK * self.scale

        def visit(depth: int, partial: float, satisfied: int) -> None:
            self.nodes_visited += 1
            if depth == self.n:
                value = math.fsum(self.options[v][k][0] for v, k in enumerate(choice))
                if value > self.best_value:
                    self.best_value = value
                    self.best_choice = list(choice)
                return
            v = self.order[depth]
            for k, (score, _, _) in enumerate(self.options[v]):
                optimistic = partial + score + self.suffix[depth + 1]
                # options are sorted by score, later ones cannot do better on the first two terms
                if optimistic < self.best_value - slack:
                    break
                now = satisfied | self.satisfied[v][k]
                if self.closing[depth] & ~now:
                    continue
                if optimistic - self._penalty(depth + 1, now) < self.best_value - slack:
                    continue
                choice[v] = k
                visit(depth + 1, partial + score, now)

        visit(0, 0.0, 0)
        choices = [self.options[v][k][1] for v, k in enumerate(self.best_choice)]
        return choices, self.best_value


@public()
def solve_ip(table: ScoreTable, cuts: Iterable[Iterable[int]] = ()) -> Assignment:
    """Exact maximizer of the total score subject to one parent set per node and all cuts."""

    cuts = [frozenset(c) for c in cuts]
    for v, node in enumerate(table.candidates):
        if not any(ps == () for ps, _ in node):
            raise SolverInvariantError(f"Node {v} has no empty parent set, the program may be infeasible")

    search = _BranchAndBound(table, cuts)
    choices, objective = search.run()
    assignment = Assignment(tuple(choices), objective)
    if not CutPool(cuts).satisfied_by(assignment.parent_sets(table)):
        raise SolverInvariantError("Branch and bound returned an assignment violating a cut")
    logger.debug("Solved program with %d cuts: objective %.6f, %d search nodes",
                 len(cuts), objective, search.nodes_visited)
    return assignment


@public()
def solve_to_acyclic(
    table: ScoreTable,
    cuts: Optional[CutPool] = None,
    cycles_per_round: int = DEFAULT_CYCLES_PER_ROUND,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
) -> AcyclicSolution:
    """Re-solves with new cycle cuts until the optimal parent sets form a DAG."""

    pool = cuts if cuts is not None else CutPool()
    history: List[float] = []
    for round_no in range(1, max_rounds + 1):
        assignment = solve_ip(table, pool)
        history.append(assignment.objective)
        graph = assignment.to_graph(table)
        cycles = enumerate_cycles(graph, cycles_per_round)
        if not cycles:
            logger.debug("Acyclic optimum after %d rounds, %d cuts", round_no, len(pool))
            return AcyclicSolution(
                dag=graph,
                objective=assignment.objective,
                assignment=assignment,
                rounds=round_no,
                cuts=tuple(pool),
                history=tuple(history),
            )
        added = sum(pool.add(c) for c in cycles)
        logger.debug("Round %d: objective %.6f, %d cycles, %d new cuts",
                     round_no, assignment.objective, len(cycles), added)
        if not added:
            raise SolverInvariantError("Optimum violates a pooled cut")

    raise ResourceLimitExceeded(f"No acyclic optimum after {max_rounds} solver rounds")


@public()
def dump_model(table: ScoreTable, cuts: Iterable[Iterable[int]] = ()) -> str:
    """Plain-text listing of the program: one line per candidate, one per cut."""

    lines = [f"# nodes {table.n}, candidates {table.size}\n"]
    for v, node in enumerate(table.candidates):
        for i, (ps, score) in enumerate(node):
            parents = " ".join(table.label(p) for p in ps) or "-"
            lines.append(f"x {table.label(v)} {i} {score!r} : {parents}\n")
    for cut in cuts:
        lines.append("cut " + " ".join(table.label(v) for v in sorted(cut)) + "\n")
    return "".join(lines)
