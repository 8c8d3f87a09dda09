import collections
import itertools
import math

import networkx as nx
import numpy as np

from mecip.data import CategoricalDataset
from mecip.emsg import build_emsg, pairwise_tests, significance_filter
from mecip.graph import (
    PartiallyDirectedGraph,
    apply_meek,
    consistent_extension,
    cpdag_of,
    d_separated,
    enumerate_cycles,
    find_cycle,
    min_d_separator,
)
from mecip.network import SyntheticSpec, forward_sample, gen_random_net
from mecip.pipeline import learn_hc_tabu
from mecip.solver import build_score_table, solve_to_acyclic
from mecip.stats import LocalScoreCache, chi_sq_pvalue, total_bic

from test import mixins, oracles


def random_binary_dataset(seed: int, n_vars: int = 4, n: int = 500) -> CategoricalDataset:
    net = gen_random_net(SyntheticSpec(n_vars, n_vars - 1, 2, 1, seed=seed))
    return forward_sample(net, n, seed)


class SolverExactnessTestCase(mixins.BaseTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.dags = list(oracles.all_dags(4))

    def test_there_are_543_dags_on_4_nodes(self):
        # expect
        self.assertEqual(len(self.dags), 543)
        self.assertEqual(len(list(oracles.all_dags(3))), 25)

    def test_solver_should_match_exhaustive_search(self):
        for seed in range(50):
            with self.subTest(seed=seed):
                # given
                ds = random_binary_dataset(seed)
                cache = LocalScoreCache(ds)
                weights = pairwise_tests(ds)
                learned_ug = significance_filter(build_emsg(weights, 4), weights, 0.05)

                for ug in (learned_ug, PartiallyDirectedGraph.complete(4)):
                    # when
                    solution = solve_to_acyclic(build_score_table(ds, ug, cache=cache))

                    # then
                    self.assertTrue(solution.dag.is_dag())
                    self.assertEqual(solution.objective, oracles.best_acyclic_score(cache.score, self.dags, ug))

    def test_hill_climbing_should_never_beat_the_exact_solver(self):
        for seed in range(50):
            with self.subTest(seed=seed):
                # given
                ds = random_binary_dataset(seed)
                exact = solve_to_acyclic(build_score_table(ds, PartiallyDirectedGraph.complete(4)))

                # when
                hc = learn_hc_tabu(ds)

                # then
                self.assertLessEqual(hc.bic, exact.objective + 1e-9)


class SeparationOracleTestCase(mixins.BaseTestCase):

    def test_d_separation_should_match_path_enumeration(self):
        rng = np.random.default_rng(0)
        for i in range(200):
            g = oracles.random_dag(int(rng.integers(3, 7)), 0.4, rng)
            for x, y in itertools.combinations(range(g.n), 2):
                rest = [v for v in range(g.n) if v not in (x, y)]
                for k in range(min(3, len(rest)) + 1):
                    for z in itertools.combinations(rest, k):
                        # expect
                        self.assertEqual(
                            d_separated(g, x, y, z),
                            oracles.d_separated_by_paths(g, x, y, z),
                            f"dag {i} {sorted(g.directed)}: {x}, {y} | {z}",
                        )

    def test_equivalent_dags_should_share_every_separation(self):
        # given
        classes = collections.defaultdict(list)
        for g in oracles.all_dags(4):
            classes[cpdag_of(g)].append(g)

        for cpdag, members in classes.items():
            for x, y in itertools.combinations(range(4), 2):
                rest = [v for v in range(4) if v not in (x, y)]
                for k in range(len(rest) + 1):
                    for z in itertools.combinations(rest, k):
                        # when
                        answers = {d_separated(g, x, y, z) for g in members}

                        # then
                        self.assertEqual(len(answers), 1, f"{sorted(cpdag.directed)}: {x}, {y} | {z}")

    def test_minimum_separators_should_be_minimal(self):
        rng = np.random.default_rng(1)
        for i in range(30):
            g = oracles.random_dag(6, 0.35, rng)
            for a, b in itertools.combinations(range(6), 2):
                if g.is_adjacent(a, b):
                    continue

                # when
                separator = min_d_separator(g, a, b)

                # then
                self.assertIsNotNone(separator)
                self.assertTrue(d_separated(g, a, b, separator))
                rest = [v for v in range(6) if v not in (a, b)]
                for k in range(len(separator)):
                    for z in itertools.combinations(rest, k):
                        self.assertFalse(d_separated(g, a, b, z), f"dag {i}: {a}, {b} | {z} beats {set(separator)}")


class CycleOracleTestCase(mixins.BaseTestCase):

    def test_bidirected_triangle_has_five_elementary_cycles(self):
        # given
        g = PartiallyDirectedGraph(3, directed=frozenset(itertools.permutations(range(3), 2)))

        # when
        cycles = enumerate_cycles(g, limit=100)

        # then
        self.assertEqual(len(cycles), 5)
        self.assertEqual(cycles[:3], [[0, 1], [0, 2], [1, 2]])

    def test_cycle_detection_should_match_path_enumeration_on_tournaments(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            # given
            edges = frozenset(
                (u, v) if rng.random() < 0.5 else (v, u)
                for u, v in itertools.combinations(range(5), 2)
            )
            g = PartiallyDirectedGraph(5, directed=edges)
            dig = g.to_networkx()
            expected = any(any(True for _ in nx.all_simple_paths(dig, v, u)) for u, v in edges)

            # expect
            self.assertEqual(find_cycle(g) is not None, expected)


class EquivalenceClassOracleTestCase(mixins.BaseTestCase):

    def test_cpdags_should_partition_dags_by_skeleton_and_immoralities(self):
        # given
        by_key = collections.defaultdict(set)
        by_cpdag = collections.defaultdict(set)

        # when
        for g in oracles.all_dags(4):
            key = oracles.immorality_key(g)
            cpdag = cpdag_of(g)
            by_key[key].add(cpdag)
            by_cpdag[cpdag].add(key)

        # then
        self.assertTrue(all(len(c) == 1 for c in by_key.values()))
        self.assertTrue(all(len(k) == 1 for k in by_cpdag.values()))
        self.assertEqual(len(by_cpdag), 185)

        for cpdag in by_cpdag:
            extension = consistent_extension(cpdag)
            self.assertTrue(extension.is_dag())
            self.assertEqual(cpdag_of(extension), cpdag)

    def test_meek_closure_should_not_depend_on_rule_order(self):
        # given
        orders = list(itertools.permutations((1, 2, 3, 4)))
        rng = np.random.default_rng(3)
        patterns = [oracles.pattern_of(g) for g in oracles.all_dags(4)]
        for _ in range(100):
            g = oracles.random_dag(6, 0.45, rng)
            # one reversible edge of the class oriented as in g
            reversible = sorted(e for e in g.directed if tuple(sorted(e)) in cpdag_of(g).undirected)
            known = [reversible[int(rng.integers(len(reversible)))]] if reversible else []
            patterns.append(oracles.pattern_of(g, known))

        for pattern in patterns:
            # when
            closures = {apply_meek(pattern, rule_order=order) for order in orders}

            # then
            self.assertEqual(len(closures), 1, sorted(pattern.directed))


class SignificanceFilterSimulationTestCase(mixins.BaseTestCase):

    def test_should_keep_dependent_and_drop_independent_pairs(self):
        passed = 0
        for seed in range(100):
            # given
            rng = np.random.default_rng(seed)
            x0 = rng.integers(0, 2, 1000)
            x1 = np.where(rng.random(1000) < 0.8, x0, rng.integers(0, 2, 1000))
            x2 = rng.integers(0, 2, 1000)
            ds = CategoricalDataset.from_codes(np.column_stack([x0, x1, x2]), cardinalities=[2, 2, 2])

            # when
            weights = pairwise_tests(ds)
            ug = significance_filter(build_emsg(weights, 3), weights, alpha=0.05)

            # then
            passed += (0, 1) in ug.undirected and (0, 2) not in ug.undirected

        self.assertGreaterEqual(passed, 85)


class ChiSquareNumericsTestCase(mixins.BaseTestCase):

    def test_should_match_reference_quantiles(self):
        for x, dof in ((3.841459, 1), (5.991465, 2), (7.814728, 3)):
            # expect
            self.assertAlmostEqual(chi_sq_pvalue(x, dof), 0.05, delta=1e-4)

    def test_two_degrees_of_freedom_should_match_closed_form(self):
        for x in (0.5, 1.0, 2.0, 5.0, 10.0):
            # expect
            self.assertAlmostEqual(chi_sq_pvalue(x, 2), math.exp(-x / 2), delta=1e-9)


class ScoreEquivalenceTestCase(mixins.BaseTestCase):

    def test_reversed_chain_should_score_the_same(self):
        # given
        forward = PartiallyDirectedGraph(3, directed={(0, 1), (1, 2)})
        backward = PartiallyDirectedGraph(3, directed={(2, 1), (1, 0)})

        for seed in range(20):
            rng = np.random.default_rng(seed)
            cards = rng.integers(2, 4, size=3)
            ds = CategoricalDataset.from_codes(
                np.column_stack([rng.integers(0, c, 200) for c in cards]),
                cardinalities=cards,
            )

            # expect
            self.assertAlmostEqual(total_bic(ds, forward), total_bic(ds, backward), delta=1e-9)

    def test_equivalent_dags_should_score_the_same(self):
        # given
        classes = collections.defaultdict(list)
        for g in oracles.all_dags(4):
            classes[oracles.immorality_key(g)].append(g)

        for seed in range(5):
            cache = LocalScoreCache(random_binary_dataset(100 + seed, n=300))
            for members in classes.values():
                scores = [total_bic(cache.ds, g, cache) for g in members]

                # expect
                self.assertLessEqual(max(scores) - min(scores), 1e-9)
