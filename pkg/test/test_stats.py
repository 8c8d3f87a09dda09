import math

from unittest import mock

import numpy as np

from mecip import stats
from mecip.data import CategoricalDataset, ContingencyTable, contingency
from mecip.graph import CyclicGraphError, PartiallyDirectedGraph
from mecip.stats import (
    LocalScoreCache,
    bic_local,
    chi_sq_pvalue,
    chi_sq_test,
    total_bic,
)

from test import mixins


def _table(*strata) -> ContingencyTable:
    counts = np.array(strata, dtype=np.int64)
    return ContingencyTable(counts=counts, n_strata=counts.shape[0])


class ChiSqTestCase(mixins.BaseTestCase):

    def test_pvalue_should_match_known_quantiles(self):
        # expect
        self.assertAlmostEqual(chi_sq_pvalue(3.841458820694124, 1), 0.05, places=9)
        self.assertAlmostEqual(chi_sq_pvalue(5.991464547107979, 2), 0.05, places=9)
        self.assertEqual(chi_sq_pvalue(0.0, 3), 1.0)

    def test_pvalue_should_reject_invalid_arguments(self):
        # expect
        with self.assertRaises(ValueError):
            chi_sq_pvalue(-1.0, 1)
        with self.assertRaises(ValueError):
            chi_sq_pvalue(1.0, 0)

    def test_should_detect_perfect_dependence(self):
        # when
        result = chi_sq_test(_table([[10, 0], [0, 10]]))

        # then
        self.assertAlmostEqual(result.statistic, 20.0)
        self.assertEqual(result.dof, 1)
        self.assertLess(result.p_value, 1e-4)

    def test_should_accept_exact_independence(self):
        # when
        result = chi_sq_test(_table([[5, 5], [5, 5]]))

        # then
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.p_value, 1.0)

    def test_should_sum_statistic_and_dof_over_strata(self):
        # when
        result = chi_sq_test(_table([[10, 0], [0, 10]], [[10, 0], [0, 10]]))

        # then
        self.assertAlmostEqual(result.statistic, 40.0)
        self.assertEqual(result.dof, 2)

    def test_empty_rows_and_strata_should_not_add_degrees_of_freedom(self):
        # when
        result = chi_sq_test(_table([[10, 0], [0, 10]], [[0, 0], [0, 0]], [[4, 6], [0, 0]]))

        # then
        self.assertEqual(result.dof, 1)

    def test_degenerate_table_should_be_independent(self):
        # when
        result = chi_sq_test(_table([[7, 3], [0, 0]]))

        # then
        self.assertEqual(result.dof, 0)
        self.assertEqual(result.statistic, 0.0)
        self.assertEqual(result.p_value, 1.0)

    def test_pvalue_should_decrease_as_the_statistic_grows(self):
        # given
        xs = np.linspace(0.05, 60.0, 400)

        for dof in range(1, 9):
            # when
            ps = np.array([chi_sq_pvalue(float(x), dof) for x in xs])

            # then
            self.assertTrue(np.all(np.diff(ps) < 0), dof)
            self.assertTrue(np.all((ps > 0) & (ps < 1)), dof)

    def test_should_not_depend_on_which_variable_is_first(self):
        # given
        rng = np.random.default_rng(5)
        rows = np.column_stack([rng.integers(0, k, 400) for k in (2, 3, 4, 2)])
        rows[:, 1] = np.where(rng.random(400) < 0.3, rows[:, 0], rows[:, 1])
        ds = CategoricalDataset.from_codes(rows, cardinalities=[2, 3, 4, 2])

        for a, b, cond in ((0, 1, ()), (0, 2, (3,)), (1, 2, (0, 3)), (2, 3, (1,))):
            # when
            forward = chi_sq_test(contingency(ds, a, b, cond))
            swapped = chi_sq_test(contingency(ds, b, a, cond))

            # then
            self.assertAlmostEqual(forward.statistic, swapped.statistic, places=9)
            self.assertEqual(forward.dof, swapped.dof)
            self.assertAlmostEqual(forward.p_value, swapped.p_value, places=12)


class BicTestCase(mixins.BaseTestCase):

    def setUp(self):
        super().setUp()
        # X1 is a copy of X0
        self.ds = CategoricalDataset.from_codes([[0, 0], [0, 0], [1, 1], [1, 1]], cardinalities=[2, 2])

    def test_should_score_a_family_without_parents(self):
        # when
        score = bic_local(self.ds, 0)

        # then
        self.assertAlmostEqual(score.value, -5 * math.log(2))
        self.assertEqual(score.parents, ())

    def test_should_score_a_family_with_parents(self):
        # when
        score = bic_local(self.ds, 1, [0])

        # then
        self.assertAlmostEqual(score.value, -2 * math.log(2))

    def test_penalty_should_count_unobserved_parent_states(self):
        # given
        ds = CategoricalDataset.from_codes([[0, 0], [0, 0], [1, 1], [1, 1]], cardinalities=[3, 2])

        # when
        score = bic_local(ds, 1, [0])

        # then
        self.assertAlmostEqual(score.value, -0.5 * math.log(4) * 3)

    def test_should_reject_node_among_parents(self):
        # expect
        with self.assertRaises(ValueError):
            bic_local(self.ds, 0, [0])

    def test_total_bic_should_sum_local_scores(self):
        # given
        dag = PartiallyDirectedGraph(2, directed={(0, 1)})
        cache = LocalScoreCache(self.ds)

        # when
        plain = total_bic(self.ds, dag)
        cached = total_bic(self.ds, dag, cache)

        # then
        self.assertAlmostEqual(plain, -7 * math.log(2))
        self.assertEqual(plain, cached)
        self.assertEqual(len(cache), 2)

    def test_total_bic_should_reject_cycles_and_undirected_edges(self):
        # expect
        with self.assertRaises(CyclicGraphError):
            total_bic(self.ds, PartiallyDirectedGraph(2, directed={(0, 1), (1, 0)}))
        with self.assertRaises(ValueError):
            total_bic(self.ds, PartiallyDirectedGraph(2, undirected={(0, 1)}))

    def test_cache_should_ignore_parent_order(self):
        # given
        ds = CategoricalDataset.from_codes([[0, 1, 0], [1, 0, 1], [1, 1, 0]])
        cache = LocalScoreCache(ds)
        scorer = self.addMock(mock.patch("mecip.stats.bic_local", wraps=stats.bic_local))

        # when
        first = cache.score(2, [1, 0])
        second = cache.score(2, (0, 1))

        # then
        self.assertEqual(first, second)
        self.assertEqual(scorer.call_count, 1)
        self.assertEqual(len(cache), 1)
        self.assertEqual(first, bic_local(ds, 2, [0, 1]).value)
