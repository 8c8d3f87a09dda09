import itertools
import math
import time

import numpy as np

from mecip.graph import PartiallyDirectedGraph, find_cycle
from mecip.network import SyntheticSpec, forward_sample, gen_random_net
from mecip.pipeline import learn_mecip
from mecip.solver import (
    CutPool,
    ResourceLimitExceeded,
    ScoreTable,
    build_score_table,
    dump_model,
    solve_ip,
    solve_to_acyclic,
)

from test import mixins


def two_cycle_table() -> ScoreTable:
    # both nodes prefer the other as parent
    return ScoreTable(2, (
        (((), -10.0), ((1,), -5.0)),
        (((), -10.0), ((0,), -4.0)),
    ), names=("a", "b"))


def brute_force(table: ScoreTable) -> float:
    best = -math.inf
    for choice in itertools.product(*table.candidates):
        g = PartiallyDirectedGraph.from_parents([ps for ps, _ in choice])
        if find_cycle(g) is None:
            best = max(best, math.fsum(score for _, score in choice))
    return best


def best_over_orders(table: ScoreTable) -> float:
    """Optimum over all topological orders: each node takes its best set among earlier nodes."""
    best = -math.inf
    for order in itertools.permutations(range(table.n)):
        placed = set()
        total = []
        for v in order:
            total.append(max(score for ps, score in table.for_node(v) if placed.issuperset(ps)))
            placed.add(v)
        best = max(best, math.fsum(total))
    return best


def random_dense_table(n: int, seed: int) -> ScoreTable:
    # larger sets tend to score better, so the unconstrained optimum is cyclic
    rng = np.random.default_rng(seed)
    candidates = []
    for v in range(n):
        others = [u for u in range(n) if u != v]
        node = []
        for k in range(len(others) + 1):
            for ps in itertools.combinations(others, k):
                node.append((ps, -30.0 + 4.0 * k + float(rng.normal(0.0, 2.0))))
        candidates.append(tuple(node))
    return ScoreTable(n, tuple(candidates))


class ScoreTableTestCase(mixins.BaseTestCase):

    def test_should_require_the_empty_parent_set(self):
        # expect
        with self.assertRaisesRegex(ValueError, "no empty parent set"):
            ScoreTable(2, ((((1,), -1.0),), (((), -1.0),)))

    def test_should_reject_duplicated_and_invalid_candidates(self):
        # expect
        with self.assertRaisesRegex(ValueError, "duplicated"):
            ScoreTable(2, ((((), -1.0), ((1,), -1.0), ((1,), -2.0)), (((), -1.0),)))
        with self.assertRaisesRegex(ValueError, "invalid"):
            ScoreTable(2, ((((), -1.0), ((0,), -1.0)), (((), -1.0),)))

    def test_should_score_every_subset_of_the_neighbourhood(self):
        # given
        ds = mixins.chain_dataset(n=500)
        ug = PartiallyDirectedGraph(3, undirected={(0, 1), (1, 2)})

        # when
        table = build_score_table(ds, ug)

        # then
        self.assertEqual([ps for ps, _ in table.for_node(1)], [(), (0,), (2,), (0, 2)])
        self.assertEqual([ps for ps, _ in table.for_node(0)], [(), (1,)])
        self.assertEqual(table.size, 8)
        self.assertEqual(table.names, ds.names)

    def test_should_cap_parent_set_size(self):
        # given
        ds = mixins.chain_dataset(n=500)

        # when
        table = build_score_table(ds, PartiallyDirectedGraph.complete(3), max_set_size=1)

        # then
        self.assertTrue(all(len(ps) <= 1 for node in table.candidates for ps, _ in node))
        self.assertEqual(table.size, 9)

    def test_should_refuse_neighbourhoods_over_budget(self):
        # given
        ds = mixins.chain_dataset(n=500)

        # expect
        with self.assertRaisesRegex(ResourceLimitExceeded, "'X0'"):
            build_score_table(ds, PartiallyDirectedGraph.complete(3), budget=2)


class CutPoolTestCase(mixins.BaseTestCase):

    def test_should_keep_each_cut_once(self):
        # given
        pool = CutPool()

        # when
        first = pool.add([1, 0])
        again = pool.add([0, 1])

        # then
        self.assertTrue(first)
        self.assertFalse(again)
        self.assertEqual(len(pool), 1)
        self.assertIn([0, 1], pool)

    def test_should_reject_single_node_cuts(self):
        # expect
        with self.assertRaises(ValueError):
            CutPool([[3]])

    def test_should_check_cut_satisfaction(self):
        # given
        pool = CutPool([[0, 1, 2]])

        # expect
        self.assertFalse(pool.satisfied_by([(2,), (0,), (1,)]))
        self.assertTrue(pool.satisfied_by([(2,), (0,), (3,)]))
        self.assertTrue(pool.satisfied_by([(), (0,), (1,)]))


class SolverTestCase(mixins.BaseTestCase):

    def test_unconstrained_optimum_may_be_cyclic(self):
        # when
        assignment = solve_ip(two_cycle_table())

        # then
        self.assertEqual(assignment.choices, (1, 1))
        self.assertAlmostEqual(assignment.objective, -9.0)

    def test_cut_should_force_one_member_outside_the_cycle(self):
        # when
        assignment = solve_ip(two_cycle_table(), cuts=[{0, 1}])

        # then
        self.assertEqual(assignment.parent_sets(two_cycle_table()), [(), (0,)])
        self.assertAlmostEqual(assignment.objective, -14.0)

    def test_should_add_cuts_until_acyclic(self):
        # when
        solution = solve_to_acyclic(two_cycle_table())

        # then
        self.assertEqual(solution.dag.directed, frozenset({(0, 1)}))
        self.assertEqual(solution.rounds, 2)
        self.assertEqual(solution.cuts, (frozenset({0, 1}),))
        self.assertEqual(solution.history, (-9.0, -14.0))
        self.assertEqual(solution.dag.names, ("a", "b"))

    def test_should_stop_after_max_rounds(self):
        # expect
        with self.assertRaises(ResourceLimitExceeded):
            solve_to_acyclic(two_cycle_table(), max_rounds=1)

    def test_longer_cycles_should_be_cut(self):
        # given
        # every node prefers its predecessor on the ring 0 -> 1 -> 2 -> 0
        table = ScoreTable(3, (
            (((), -10.0), ((2,), -6.0)),
            (((), -10.0), ((0,), -5.0)),
            (((), -10.0), ((1,), -7.0)),
        ))

        # when
        solution = solve_to_acyclic(table)

        # then
        self.assertTrue(solution.dag.is_dag())
        self.assertAlmostEqual(solution.objective, -21.0)
        self.assertEqual(solution.dag.directed, frozenset({(2, 0), (0, 1)}))

    def test_should_match_brute_force_on_real_scores(self):
        # given
        ds = mixins.sample_network("asia", n=3000, seed=5)
        sub = [ds.names.index(v) for v in ("smoke", "lung", "bronc", "dysp")]
        small = type(ds).from_codes(ds.rows[:, sub], cardinalities=[ds.cardinalities[v] for v in sub])
        table = build_score_table(small, PartiallyDirectedGraph.complete(4))

        # when
        solution = solve_to_acyclic(table)

        # then
        self.assertTrue(solution.dag.is_dag())
        self.assertAlmostEqual(solution.objective, brute_force(table), places=6)

    def test_should_match_brute_force_on_adversarial_scores(self):
        # given
        # larger parent sets score better, so the unconstrained optimum is full of cycles
        candidates = []
        for v in range(4):
            others = [u for u in range(4) if u != v]
            node = []
            for k in range(4):
                for ps in itertools.combinations(others, k):
                    node.append((ps, -20.0 + 3.0 * k + 0.1 * sum(ps) + 0.01 * v))
            candidates.append(tuple(node))
        table = ScoreTable(4, tuple(candidates))

        # when
        solution = solve_to_acyclic(table)

        # then
        self.assertTrue(solution.dag.is_dag())
        self.assertAlmostEqual(solution.objective, brute_force(table), places=9)

    def test_dump_should_list_candidates_and_cuts(self):
        # when
        text = dump_model(two_cycle_table(), [frozenset({0, 1})])

        # then
        self.assertEqual(text, "\n".join([
            "# nodes 2, candidates 4",
            "x a 0 -10.0 : -",
            "x a 1 -5.0 : b",
            "x b 0 -10.0 : -",
            "x b 1 -4.0 : a",
            "cut a b",
        ]) + "\n")

    def test_should_match_all_orders_on_dense_random_scores(self):
        for seed in range(5):
            # given
            table = random_dense_table(6, seed)

            # when
            solution = solve_to_acyclic(table)

            # then
            self.assertTrue(solution.dag.is_dag())
            self.assertAlmostEqual(solution.objective, best_over_orders(table), places=9)

    def test_overlapping_cuts_should_not_cut_off_the_optimum(self):
        # given
        table = random_dense_table(6, seed=11)
        triangles = [set(c) for c in itertools.combinations(range(6), 3)]
        pairs = [set(c) for c in itertools.combinations(range(6), 2)]

        # when
        assignment = solve_ip(table, cuts=pairs + triangles)

        # then
        # every acyclic choice satisfies all cycle cuts, so the best DAG stays reachable
        self.assertTrue(CutPool(pairs + triangles).satisfied_by(assignment.parent_sets(table)))
        self.assertGreaterEqual(assignment.objective, best_over_orders(table) - 1e-9)
        self.assertLessEqual(assignment.objective, solve_ip(table, cuts=pairs).objective + 1e-9)


class SolverScaleTestCase(mixins.BaseTestCase):

    def test_twenty_node_network_should_be_learned_quickly(self):
        # given
        net = gen_random_net(SyntheticSpec(20, 2, 2, 1, seed=0))
        ds = forward_sample(net, 1000, 0)

        # when
        start = time.perf_counter()
        result = learn_mecip(ds)
        seconds = time.perf_counter() - start

        # then
        self.assertTrue(result.dag.is_dag())
        self.assertLess(seconds, 30.0)
        self.assertLess(result.elapsed["solver"], 20.0)
