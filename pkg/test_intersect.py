import unittest
from concurrent.futures import ThreadPoolExecutor
from itertools import permutations

from catalog import (
    BatyrevParams,
    BundleParams,
    batyrev_picard3,
    batyrev_s1_cone,
    example_41,
    kleinschmidt_bundle,
    projective_space,
)
from errors import DimensionError
from fan import Cone, build_fan
from intersect import (
    Divisor,
    TorusCycle,
    curve_class_of_wall,
    cycle_of_cone,
    degree,
    fundamental_cycle,
    get_engine,
    intersect_against_subvariety,
    intersect_divisors,
    intersection_number,
    mul_prime_divisor,
    picard_relations,
    principal_divisor,
)


def projective_plane():
    return build_fan([(1, 0), (0, 1), (-1, -1)], [[0, 1], [1, 2], [0, 2]])


def hirzebruch(a: int):
    return build_fan([(1, 0), (0, 1), (-1, a), (0, -1)], [[0, 1], [1, 2], [2, 3], [3, 0]])


class TestPrimeDivisorProducts(unittest.TestCase):
    def test_distinct_rays_span_a_cone(self):
        fan = projective_plane()
        cycle = mul_prime_divisor(fan, 0, cycle_of_cone(fan, [1]))
        self.assertEqual(cycle.codim, 2)
        self.assertEqual(cycle.terms, {Cone((0, 1)): 1})

    def test_self_intersection_of_a_line(self):
        fan = projective_plane()
        cycle = mul_prime_divisor(fan, 0, cycle_of_cone(fan, [0]))
        self.assertEqual(degree(fan, cycle), 1)

    def test_negative_section(self):
        for a in range(4):
            self.assertEqual(intersect_against_subvariety(hirzebruch(a), [1], [1]), -a)

    def test_non_adjacent_rays(self):
        fan = hirzebruch(1)
        cycle = mul_prime_divisor(fan, 3, cycle_of_cone(fan, [1]))
        self.assertTrue(cycle.is_zero())

    def test_point_class_cannot_be_cut(self):
        fan = projective_plane()
        with self.assertRaises(DimensionError):
            mul_prime_divisor(fan, 0, cycle_of_cone(fan, [0, 1]))

    def test_cycle_dimensions_are_checked(self):
        with self.assertRaises(DimensionError):
            TorusCycle(1, {Cone((0, 1)): 1})
        with self.assertRaises(DimensionError):
            degree(projective_plane(), fundamental_cycle(projective_plane()))


class TestIntersectionNumbers(unittest.TestCase):
    def test_hyperplane_cubed(self):
        fan = projective_space(3)
        self.assertEqual(intersection_number(fan, [0, 0, 0]), 1)
        self.assertEqual(intersection_number(fan, ["x0", "x1", "x3"]), 1)

    def test_line_bundle_over_projective_space(self):
        fan = kleinschmidt_bundle(BundleParams(5, 2, (2,)))
        self.assertEqual(intersection_number(fan, ["y1", "y1", "y1", "x1", "x2"]), 4)

    def test_bundle_over_plane(self):
        self.assertEqual(intersection_number(example_41(4, 1), ["y1"] * 4), 3)

    def test_order_independence(self):
        fan = example_41(4, 2)
        rays = ["y1", "y1", "x1", "y2"]
        values = {intersection_number(fan, list(order)) for order in permutations(rays)}
        self.assertEqual(len(values), 1)

    def test_fold_matches_engine(self):
        fan = kleinschmidt_bundle(BundleParams(4, 3, (2, 1)))
        rays = ["y1", "y1", "x2", "y2"]
        cycle = fundamental_cycle(fan)
        for x in reversed(rays):
            cycle = mul_prime_divisor(fan, x, cycle)
        self.assertEqual(degree(fan, cycle), intersection_number(fan, rays))

    def test_wrong_multiset_size(self):
        with self.assertRaises(DimensionError):
            intersection_number(projective_space(3), [0, 0])

    def test_against_subvariety_size(self):
        with self.assertRaises(DimensionError):
            intersect_against_subvariety(projective_space(3), [0, 0], [1, 2])

    def test_surface_in_picard_three_fan(self):
        params = BatyrevParams((1, 1, 2, 1, 1), (2,), (0,))
        fan = batyrev_picard3(params)
        s1 = batyrev_s1_cone(fan, params)
        self.assertEqual(intersect_against_subvariety(fan, ["v1", "v1"], s1), 0)
        self.assertEqual(intersect_against_subvariety(fan, ["z1", "z1"], s1), 2)

    def test_concurrent_queries_match_sequential(self):
        fan = kleinschmidt_bundle(BundleParams(5, 3, (2, 1)))
        queries = [[x] * 5 for x in range(fan.num_rays)]
        sequential = [intersection_number(fan, q) for q in queries]
        fresh = kleinschmidt_bundle(BundleParams(5, 3, (2, 1)))
        with ThreadPoolExecutor(max_workers=4) as executor:
            concurrent = list(executor.map(lambda q: intersection_number(fresh, q), queries))
        self.assertEqual(concurrent, sequential)


class TestDivisors(unittest.TestCase):
    def test_principal_divisors_vanish_on_curves(self):
        fan = example_41(3, 2)
        for m in ([1, 0, 0], [0, -2, 1], [3, 1, -4]):
            div = principal_divisor(fan, m)
            for wall in fan.walls:
                self.assertEqual(intersect_divisors(fan, [div], wall), 0)

    def test_linear_combination(self):
        fan = projective_plane()
        h = Divisor({0: 1})
        self.assertEqual(intersect_divisors(fan, [h + h, h - Divisor({1: 1})]), 0)
        self.assertEqual(intersect_divisors(fan, [h + h, h - Divisor({1: 2})]), -2)
        self.assertEqual(intersect_divisors(fan, [-h, h]), -1)

    def test_picard_relations_of_plane(self):
        fan = projective_plane()
        relations = picard_relations(fan, [0, 1])
        self.assertEqual(relations[0].coefficients, {0: 1, 2: -1})
        self.assertEqual(relations[1].coefficients, {1: 1, 2: -1})

    def test_covector_length(self):
        with self.assertRaises(DimensionError):
            principal_divisor(projective_plane(), [1, 0, 0])


class TestWallCurves(unittest.TestCase):
    def test_line_in_plane(self):
        fan = projective_plane()
        curve = curve_class_of_wall(fan, Cone((0,)))
        self.assertEqual(curve.relation, (1, 1, 1))
        self.assertEqual(curve.cycle.terms, {Cone((0,)): 1})

    def test_negative_section_class(self):
        curve = curve_class_of_wall(hirzebruch(2), Cone((1,)))
        self.assertEqual(curve.relation, (1, -2, 1, 0))

    def test_relation_matches_engine(self):
        fan = kleinschmidt_bundle(BundleParams(3, 2, (1,)))
        for wall in fan.walls:
            curve = curve_class_of_wall(fan, wall)
            computed = tuple(int(intersect_against_subvariety(fan, [x], wall)) for x in range(fan.num_rays))
            self.assertEqual(computed, curve.relation)


class TestEngineSharing(unittest.TestCase):
    def test_engine_is_shared(self):
        fan = projective_space(2)
        self.assertIs(get_engine(fan), get_engine(fan))
        intersection_number(fan, [0, 1])
        self.assertGreater(get_engine(fan).cache_sizes()["monomials"], 0)


if __name__ == "__main__":
    unittest.main()
