"""MEC-IP structure learning, the hill-climbing baseline and structural metrics."""

from __future__ import annotations

import collections
import itertools
import logging
import math

from dataclasses import dataclass, field
from typing import (
    Callable,
    Deque,
    Dict,
    FrozenSet,
    List,
    Optional,
    Tuple,
    Union,
)

import networkx as nx
import numpy as np

from mecip.commons import PhaseTimer, public
from mecip.data import CategoricalDataset, contingency
from mecip.emsg import build_emsg, pairwise_tests, significance_filter
from mecip.graph import (
    PartiallyDirectedGraph,
    consistent_extension,
    cpdag_of,
    min_d_separator,
)
from mecip.konfig import Konfig, fromenv, resolve_konfig
from mecip.network import DiscreteBayesNet
from mecip.solver import (
    DEFAULT_CANDIDATE_BUDGET,
    DEFAULT_CYCLES_PER_ROUND,
    DEFAULT_MAX_ROUNDS,
    AcyclicSolution,
    CutPool,
    ScoreTable,
    build_score_table,
    solve_to_acyclic,
)
from mecip.stats import LocalScoreCache, chi_sq_test


logger = logging.getLogger(__name__)

THREADS_ENV = "MECIP_THREADS"

# minimum BIC gain that counts as an improvement
IMPROVEMENT_EPS = 1e-9

TestKey = Tuple[int, int, FrozenSet[int]]


@public()
class LearnConfig(Konfig):
    alpha = 0.05
    max_rounds = 50
    candidate_budget = DEFAULT_CANDIDATE_BUDGET
    max_parents = None
    seed = 0
    threads = fromenv(THREADS_ENV, "1", type=int)
    cycles_per_round = DEFAULT_CYCLES_PER_ROUND
    max_solver_rounds = DEFAULT_MAX_ROUNDS
    tabu_length = 100
    patience = 15

    def __post_init__(self, **kwargs):
        super().__post_init__(**kwargs)
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.max_rounds < 1:
            raise ValueError(f"max_rounds must be at least 1, got {self.max_rounds}")
        if self.candidate_budget < 1:
            raise ValueError(f"candidate_budget must be positive, got {self.candidate_budget}")
        if self.max_parents is not None and self.max_parents < 0:
            raise ValueError(f"max_parents must be non-negative, got {self.max_parents}")
        if self.threads < 1:
            raise ValueError(f"threads must be at least 1, got {self.threads}")
        if self.cycles_per_round < 1 or self.max_solver_rounds < 1:
            raise ValueError("cycles_per_round and max_solver_rounds must be positive")
        if self.tabu_length < 0 or self.patience < 1:
            raise ValueError("tabu_length must be non-negative and patience positive")


class DeskLearnConfig(LearnConfig):
    """Quick sweeps: parent sets capped at 4 parents, fewer refinement rounds."""
    max_parents = 4
    max_rounds = 20


LEARN_PROFILES = {
    'default': LearnConfig,
    'desk': DeskLearnConfig,
}

# process-wide default of the learners, resolved from the `mecip_profile` env on first use
DEFAULT_LEARN_CONFIG: LearnConfig = resolve_konfig(LEARN_PROFILES, default='default')


@public()
def learn_config(profile: Optional[str] = None, **overrides) -> LearnConfig:
    """Config of the named profile (or `mecip_profile` env, or 'default') with `overrides` applied."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return resolve_konfig(LEARN_PROFILES, name=profile, default='default', extra=overrides, lazy=False)


@public()
@dataclass(frozen=True)
class LearnResult:
    cpdag: PartiallyDirectedGraph
    dag: PartiallyDirectedGraph
    bic: float
    rounds: int
    edges_added: Tuple[int, ...]
    elapsed: Dict[str, float]
    algorithm: str
    config: LearnConfig = field(repr=False)
    ug: Optional[PartiallyDirectedGraph] = field(default=None, repr=False)
    solution: Optional[AcyclicSolution] = field(default=None, repr=False)
    table: Optional[ScoreTable] = field(default=None, repr=False)

    @property
    def total_seconds(self) -> float:
        return math.fsum(self.elapsed.values())


@public()
@dataclass(frozen=True)
class StructMetrics:
    """Skeleton comparison; both percentages are fractions of the true edge count."""

    missing_pct: float
    extra_pct: float
    n_true_edges: int
    n_learned_edges: int


def candidate_pairs(cpdag: PartiallyDirectedGraph) -> List[Tuple[int, int]]:
    """Pairs `a < b` not adjacent in the CPDAG but sharing a neighbour."""
    return [
        (a, b)
        for a, b in itertools.combinations(range(cpdag.n), 2)
        if not cpdag.is_adjacent(a, b) and cpdag.neighbors(a) & cpdag.neighbors(b)
    ]


@public()
def triangulation_pass(
    ds: CategoricalDataset,
    cpdag: PartiallyDirectedGraph,
    ug: PartiallyDirectedGraph,
    cfg: LearnConfig,
    tested: Optional[Dict[TestKey, float]] = None,
    extension: Optional[PartiallyDirectedGraph] = None,
) -> Tuple[PartiallyDirectedGraph, int]:
    """Tests open triangles of the CPDAG and joins pairs found dependent in the UG.

    Each candidate pair is tested given its minimum d-separating set in one fixed
    DAG of the class; a rejected independence (`p <= alpha`) adds the pair to the UG.
    `tested` maps `(a, b, separator)` to the p-value of tests already run and is updated.
    """

    tested = tested if tested is not None else {}
    extension = extension if extension is not None else consistent_extension(cpdag)

    added = []
    for a, b in candidate_pairs(cpdag):
        if ug.is_adjacent(a, b):
            continue
        separator = min_d_separator(extension, a, b)
        if separator is None:
            logger.debug("Pair (%s, %s) cannot be separated, skipped", cpdag.label(a), cpdag.label(b))
            continue
        key = (a, b, separator)
        if key in tested:
            continue
        result = chi_sq_test(contingency(ds, a, b, separator))
        tested[key] = result.p_value
        logger.debug("Test %s _|_ %s | %s: chi2=%.3f dof=%d p=%.4g",
                     cpdag.label(a), cpdag.label(b), sorted(cpdag.label(v) for v in separator),
                     result.statistic, result.dof, result.p_value)
        if result.p_value <= cfg.alpha:
            added.append((a, b))

    if added:
        ug = ug.with_edges(undirected=added)
    return ug, len(added)


@public()
def learn_mecip(ds: CategoricalDataset, cfg: Optional[LearnConfig] = None) -> LearnResult:
    """Learns the CPDAG of `ds`: initial UG, exact solve, then triangulation rounds until no edge is added."""

    cfg = cfg if cfg is not None else DEFAULT_LEARN_CONFIG
    if ds.n_vars < 2:
        raise ValueError(f"Structure learning needs at least 2 variables, got {ds.n_vars}")

    timer = PhaseTimer()
    cache = LocalScoreCache(ds)

    with timer.phase("pairwise_tests"):
        weights = pairwise_tests(ds, threads=cfg.threads)
    with timer.phase("emsg"):
        emsg = build_emsg(weights, ds.n_vars, names=ds.names)
        ug = significance_filter(emsg, weights, cfg.alpha)

    def solve(ug: PartiallyDirectedGraph) -> Tuple[ScoreTable, AcyclicSolution]:
        with timer.phase("score_table"):
            table = build_score_table(
                ds, ug,
                max_set_size=cfg.max_parents,
                budget=cfg.candidate_budget,
                cache=cache,
                threads=cfg.threads,
            )
        with timer.phase("solver"):
            solution = solve_to_acyclic(
                table, CutPool(),
                cycles_per_round=cfg.cycles_per_round,
                max_rounds=cfg.max_solver_rounds,
            )
        return table, solution

    table, solution = solve(ug)
    with timer.phase("cpdag"):
        cpdag = cpdag_of(solution.dag)
    logger.info("Initial solve: %d UG edges, BIC %.4f, %d solver rounds",
                len(ug.undirected), solution.objective, solution.rounds)

    tested: Dict[TestKey, float] = {}
    edges_added: List[int] = []
    rounds = 0
    while rounds < cfg.max_rounds:
        rounds += 1
        with timer.phase("triangulation"):
            ug, added = triangulation_pass(ds, cpdag, ug, cfg, tested)
        edges_added.append(added)
        logger.info("Triangulation round %d: %d edges added", rounds, added)
        if added == 0:
            break

        previous = solution.objective
        table, solution = solve(ug)
        with timer.phase("cpdag"):
            cpdag = cpdag_of(solution.dag)
        improved = solution.objective > previous + IMPROVEMENT_EPS
        logger.info("Re-solve: BIC %.4f (%s)", solution.objective, "improved" if improved else "unchanged")

    return LearnResult(
        cpdag=cpdag,
        dag=solution.dag,
        bic=solution.objective,
        rounds=rounds,
        edges_added=tuple(edges_added),
        elapsed=timer.elapsed,
        algorithm="mecip",
        config=cfg,
        ug=ug,
        solution=solution,
        table=table,
    )


class _HillClimber:
    """Greedy single-edge search over DAGs with a tabu list of visited structures."""

    def __init__(self, ds: CategoricalDataset, cfg: LearnConfig):
        self.ds = ds
        self.cfg = cfg
        self.cache = LocalScoreCache(ds)
        self.n = ds.n_vars
        rng = np.random.default_rng(cfg.seed)
        # rank of each node in a seeded permutation, breaks ties between equal moves
        self.rank = [int(r) for r in np.argsort(rng.permutation(self.n))]
        self.parents: List[FrozenSet[int]] = [frozenset() for _ in range(self.n)]
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(range(self.n))

    def local(self, v: int, parents: FrozenSet[int]) -> float:
        return self.cache.score(v, parents)

    def key(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(sorted(self.graph.edges))

    def score(self) -> float:
        return math.fsum(self.local(v, self.parents[v]) for v in range(self.n))

    def moves(self):
        """Yields `(delta, tie_key, kind, u, v)` for every legal move."""
        cap = self.cfg.max_parents
        descendants = {v: nx.descendants(self.graph, v) for v in range(self.n)}
        for u, v in itertools.permutations(range(self.n), 2):
            tie = (self.rank[u], self.rank[v])
            pv = self.parents[v]
            if u in pv:
                yield (self.local(v, pv - {u}) - self.local(v, pv), tie, "delete", u, v)
                pu = self.parents[u]
                if cap is not None and len(pu) >= cap:
                    continue
                self.graph.remove_edge(u, v)
                creates_cycle = nx.has_path(self.graph, u, v)
                self.graph.add_edge(u, v)
                if not creates_cycle:
                    delta = (self.local(v, pv - {u}) - self.local(v, pv)
                             + self.local(u, pu | {v}) - self.local(u, pu))
                    yield (delta, tie, "reverse", u, v)
            elif v not in self.parents[u]:
                if cap is not None and len(pv) >= cap:
                    continue
                if u in descendants[v]:
                    continue
                yield (self.local(v, pv | {u}) - self.local(v, pv), tie, "add", u, v)

    def apply(self, kind: str, u: int, v: int) -> None:
        if kind == "add":
            self.parents[v] = self.parents[v] | {u}
            self.graph.add_edge(u, v)
        elif kind == "delete":
            self.parents[v] = self.parents[v] - {u}
            self.graph.remove_edge(u, v)
        else:
            self.parents[v] = self.parents[v] - {u}
            self.parents[u] = self.parents[u] | {v}
            self.graph.remove_edge(u, v)
            self.graph.add_edge(v, u)

    def undo(self, kind: str, u: int, v: int) -> None:
        if kind == "add":
            self.apply("delete", u, v)
        elif kind == "delete":
            self.apply("add", u, v)
        else:
            self.apply("reverse", v, u)

    def run(self) -> Tuple[List[FrozenSet[int]], float, int]:
        tabu: Deque[Tuple[Tuple[int, int], ...]] = collections.deque(maxlen=self.cfg.tabu_length or None)
        tabu.append(self.key())
        current = self.score()
        best_parents, best_score = list(self.parents), current
        stale = 0
        steps = 0
        while stale < self.cfg.patience:
            ranked = sorted(self.moves(), key=lambda m: (-m[0], m[1], m[2]))
            chosen = None
            for delta, _, kind, u, v in ranked:
                self.apply(kind, u, v)
                if self.cfg.tabu_length and self.key() in tabu:
                    self.undo(kind, u, v)
                    continue
                chosen = (delta, kind, u, v)
                break
            if chosen is None:
                break

            steps += 1
            tabu.append(self.key())
            current += chosen[0]
            if current > best_score + IMPROVEMENT_EPS:
                best_parents, best_score = list(self.parents), current
                stale = 0
            else:
                stale += 1
            logger.debug("HC step %d: %s %d->%d delta %.4f", steps, chosen[1], chosen[2], chosen[3], chosen[0])

        best_score = math.fsum(self.local(v, best_parents[v]) for v in range(self.n))
        return best_parents, best_score, steps


@public()
def learn_hc_tabu(ds: CategoricalDataset, cfg: Optional[LearnConfig] = None) -> LearnResult:
    """Hill climbing over DAGs (add, delete, reverse) with a tabu list; baseline for comparison."""

    cfg = cfg if cfg is not None else DEFAULT_LEARN_CONFIG
    if ds.n_vars < 2:
        raise ValueError(f"Structure learning needs at least 2 variables, got {ds.n_vars}")

    timer = PhaseTimer()
    with timer.phase("search"):
        parents, bic, steps = _HillClimber(ds, cfg).run()
    dag = PartiallyDirectedGraph.from_parents(parents, names=ds.names)
    with timer.phase("cpdag"):
        cpdag = cpdag_of(dag)
    logger.info("Hill climbing: %d steps, %d edges, BIC %.4f", steps, dag.n_edges, bic)

    return LearnResult(
        cpdag=cpdag,
        dag=dag,
        bic=bic,
        rounds=steps,
        edges_added=(),
        elapsed=timer.elapsed,
        algorithm="hc",
        config=cfg,
    )


ALGORITHMS: Dict[str, Callable[[CategoricalDataset, LearnConfig], LearnResult]] = {
    'mecip': learn_mecip,
    'hc': learn_hc_tabu,
}


@public()
def structural_metrics(
    truth: Union[DiscreteBayesNet, PartiallyDirectedGraph],
    learned: PartiallyDirectedGraph,
) -> StructMetrics:
    """Missing and extra edges of `learned` against the skeleton of the true structure.

    Orientation is ignored and both fractions are relative to the true edge count
    (at least 1), so `extra_pct` may exceed 1.
    """

    true_graph = truth.dag if isinstance(truth, DiscreteBayesNet) else truth
    if true_graph.n != learned.n:
        raise ValueError(f"Node count mismatch: truth has {true_graph.n}, learned has {learned.n}")
    if true_graph.names is not None and learned.names is not None and true_graph.names != learned.names:
        raise ValueError(f"Node names differ: {list(true_graph.names)} vs {list(learned.names)}")

    if not true_graph.undirected:
        true_graph = cpdag_of(true_graph)
    true_edges = true_graph.skeleton()
    learned_edges = learned.skeleton()
    denominator = max(1, len(true_edges))
    return StructMetrics(
        missing_pct=len(true_edges - learned_edges) / denominator,
        extra_pct=len(learned_edges - true_edges) / denominator,
        n_true_edges=len(true_edges),
        n_learned_edges=len(learned_edges),
    )
