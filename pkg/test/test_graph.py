import itertools

from mecip.graph import (
    CyclicGraphError,
    PartiallyDirectedGraph,
    apply_meek,
    consistent_extension,
    cpdag_of,
    d_separated,
    enumerate_cycles,
    find_cycle,
    format_edge_list,
    immoralities,
    min_d_separator,
    parse_edge_list,
)

from test import mixins


def dag(n, *edges, names=None) -> PartiallyDirectedGraph:
    return PartiallyDirectedGraph(n, directed=frozenset(edges), names=names)


class PartiallyDirectedGraphTestCase(mixins.BaseTestCase):

    def test_should_normalize_undirected_edges(self):
        # when
        g = PartiallyDirectedGraph(3, directed={(2, 0)}, undirected={(2, 1)})

        # then
        self.assertEqual(g.undirected, frozenset({(1, 2)}))
        self.assertEqual(g.skeleton(), frozenset({(0, 2), (1, 2)}))
        self.assertEqual(g.parents(0), (2,))
        self.assertEqual(g.undirected_neighbors(2), frozenset({1}))
        self.assertEqual(g.neighbors(2), frozenset({0, 1}))

    def test_should_reject_invalid_edges(self):
        # expect
        with self.assertRaises(ValueError):
            PartiallyDirectedGraph(2, directed={(1, 1)})
        with self.assertRaises(ValueError):
            PartiallyDirectedGraph(2, directed={(0, 2)})
        with self.assertRaises(ValueError):
            PartiallyDirectedGraph(2, directed={(0, 1)}, undirected={(1, 0)})

    def test_equality_should_ignore_names(self):
        # expect
        self.assertEqual(dag(2, (0, 1), names=("a", "b")), dag(2, (0, 1)))

    def test_should_tell_dags_from_cyclic_graphs(self):
        # expect
        self.assertTrue(dag(3, (0, 1), (1, 2)).is_dag())
        self.assertFalse(dag(3, (0, 1), (1, 2), (2, 0)).is_dag())
        self.assertFalse(PartiallyDirectedGraph.complete(3).is_dag())
        self.assertTrue(PartiallyDirectedGraph.complete(3).is_undirected())


class CycleTestCase(mixins.BaseTestCase):

    def test_find_cycle_should_return_none_for_dags(self):
        # expect
        self.assertIsNone(find_cycle(dag(3, (0, 1), (0, 2), (1, 2))))

    def test_find_cycle_should_return_cycle_nodes(self):
        # when
        cycle = find_cycle(dag(4, (0, 1), (1, 2), (2, 3), (3, 1)))

        # then
        self.assertEqual(sorted(cycle), [1, 2, 3])

    def test_should_enumerate_cycles_rotated_to_smallest_node(self):
        # given
        g = dag(3, (0, 1), (1, 0), (1, 2), (2, 1), (2, 0))

        # when
        cycles = enumerate_cycles(g, limit=10)

        # then
        self.assertEqual(cycles[:2], [[0, 1], [1, 2]])
        self.assertIn([0, 1, 2], cycles)
        self.assertTrue(all(c[0] == min(c) for c in cycles))

    def test_should_stop_at_the_cycle_limit(self):
        # given
        g = dag(3, (0, 1), (1, 0), (1, 2), (2, 1))

        # expect
        self.assertEqual(len(enumerate_cycles(g, limit=1)), 1)


class SeparationTestCase(mixins.BaseTestCase):

    def test_chain_should_be_separated_by_middle_node(self):
        # given
        g = dag(3, (0, 1), (1, 2))

        # expect
        self.assertFalse(d_separated(g, 0, 2))
        self.assertTrue(d_separated(g, 0, 2, {1}))

    def test_collider_should_open_when_observed(self):
        # given
        g = dag(4, (0, 2), (1, 2), (2, 3))

        # expect
        self.assertTrue(d_separated(g, 0, 1))
        self.assertFalse(d_separated(g, 0, 1, {2}))
        self.assertFalse(d_separated(g, 0, 1, {3}))

    def test_should_reject_endpoints_in_conditioning_set(self):
        # expect
        with self.assertRaises(ValueError):
            d_separated(dag(3, (0, 1), (1, 2)), 0, 2, {0})

    def test_minimum_separator_of_a_diamond(self):
        # given
        g = dag(4, (0, 1), (0, 2), (1, 3), (2, 3))

        # when
        separator = min_d_separator(g, 0, 3)

        # then
        self.assertEqual(separator, frozenset({1, 2}))
        self.assertTrue(d_separated(g, 0, 3, separator))

    def test_minimum_separator_of_a_collider_is_empty(self):
        # expect
        self.assertEqual(min_d_separator(dag(3, (0, 2), (1, 2)), 0, 1), frozenset())

    def test_minimum_separator_should_be_smallest(self):
        # given
        g = dag(6, (0, 1), (1, 2), (0, 3), (3, 2), (2, 4), (3, 5), (5, 4), (1, 5))

        # when
        separator = min_d_separator(g, 0, 4)

        # then
        self.assertTrue(d_separated(g, 0, 4, separator))
        smaller = [
            set(s)
            for k in range(len(separator))
            for s in itertools.combinations(set(range(6)) - {0, 4}, k)
            if d_separated(g, 0, 4, s)
        ]
        self.assertEqual(smaller, [])

    def test_adjacent_nodes_cannot_be_separated(self):
        # expect
        with self.assertRaises(ValueError):
            min_d_separator(dag(2, (0, 1)), 0, 1)


class EquivalenceClassTestCase(mixins.NetworksMixin, mixins.BaseTestCase):

    def test_chain_should_become_fully_undirected(self):
        # when
        cpdag = cpdag_of(dag(3, (0, 1), (1, 2)))

        # then
        self.assertEqual(cpdag.directed, frozenset())
        self.assertEqual(cpdag.undirected, frozenset({(0, 1), (1, 2)}))

    def test_collider_should_stay_oriented(self):
        # when
        cpdag = cpdag_of(dag(4, (0, 2), (1, 2), (2, 3)))

        # then
        self.assertEqual(immoralities(dag(4, (0, 2), (1, 2), (2, 3))), frozenset({(0, 1, 2)}))
        self.assertEqual(cpdag.directed, frozenset({(0, 2), (1, 2), (2, 3)}))
        self.assertEqual(cpdag.undirected, frozenset())

    def test_cpdag_of_asia(self):
        # given
        net = self.network("asia")
        i = {name: k for k, name in enumerate(net.names)}

        # when
        cpdag = cpdag_of(net.dag)

        # then
        self.assertEqual(cpdag.directed, frozenset({
            (i["tub"], i["either"]),
            (i["lung"], i["either"]),
            (i["either"], i["xray"]),
            (i["either"], i["dysp"]),
            (i["bronc"], i["dysp"]),
        }))
        self.assertEqual(cpdag.undirected, frozenset({
            tuple(sorted((i["asia"], i["tub"]))),
            tuple(sorted((i["smoke"], i["lung"]))),
            tuple(sorted((i["smoke"], i["bronc"]))),
        }))

    def test_meek_rule_2_should_avoid_cycles(self):
        # given
        g = PartiallyDirectedGraph(3, directed={(0, 1), (1, 2)}, undirected={(0, 2)})

        # when
        closed = apply_meek(g)

        # then
        self.assertIn((0, 2), closed.directed)

    def test_meek_rule_3(self):
        # given
        g = PartiallyDirectedGraph(4, directed={(1, 3), (2, 3)}, undirected={(0, 1), (0, 2), (0, 3)})

        # when
        closed = apply_meek(g)

        # then
        self.assertEqual(closed.directed, frozenset({(1, 3), (2, 3), (0, 3)}))
        self.assertEqual(closed.undirected, frozenset({(0, 1), (0, 2)}))

    def test_meek_rule_4(self):
        # given
        g = PartiallyDirectedGraph(4, directed={(2, 3), (3, 1)}, undirected={(0, 3), (0, 2), (0, 1)})

        # when
        closed = apply_meek(g)

        # then
        self.assertIn((0, 1), closed.directed)

    def test_meek_should_reject_cyclic_directed_part(self):
        # expect
        with self.assertRaises(CyclicGraphError):
            apply_meek(dag(2, (0, 1), (1, 0)))

    def test_consistent_extension_should_belong_to_the_class(self):
        # given
        cpdag = cpdag_of(self.network("asia").dag)

        # when
        extension = consistent_extension(cpdag)

        # then
        self.assertTrue(extension.is_dag())
        self.assertEqual(extension.skeleton(), cpdag.skeleton())
        self.assertEqual(cpdag_of(extension), cpdag)

    def test_consistent_extension_of_a_chain_follows_lowest_edge(self):
        # when
        extension = consistent_extension(PartiallyDirectedGraph(3, undirected={(0, 1), (1, 2)}))

        # then
        self.assertEqual(extension.directed, frozenset({(0, 1), (1, 2)}))

    def test_unchordal_graph_has_no_extension(self):
        # given
        square = PartiallyDirectedGraph(4, undirected={(0, 1), (1, 2), (2, 3), (0, 3)})

        # expect
        with self.assertRaises(ValueError):
            consistent_extension(square)


class EdgeListTestCase(mixins.BaseTestCase):

    def test_should_write_and_read_edges_with_names(self):
        # given
        g = PartiallyDirectedGraph(3, directed={(0, 2)}, undirected={(1, 2)}, names=("a", "b", "c"))

        # when
        text = format_edge_list(g, header="# seed: 1\n")
        back = parse_edge_list(text)

        # then
        self.assertEqual(text, "# seed: 1\n# nodes: a,b,c\na -> c\nb -- c\n")
        self.assertEqual(back, g)
        self.assertEqual(back.names, ("a", "b", "c"))

    def test_should_map_edges_onto_given_names(self):
        # when
        g = parse_edge_list("c -> a\n", names=["a", "b", "c"])

        # then
        self.assertEqual(g.n, 3)
        self.assertEqual(g.directed, frozenset({(2, 0)}))

    def test_should_reject_unknown_nodes_and_bad_lines(self):
        # expect
        with self.assertRaisesRegex(ValueError, "Unknown nodes"):
            parse_edge_list("a -> z\n", names=["a", "b"])
        with self.assertRaisesRegex(ValueError, "line 1"):
            parse_edge_list("a => b\n")
        with self.assertRaises(ValueError):
            parse_edge_list("# nodes: a,b\n", names=["a", "c"])
