import json
import os
import tempfile
import unittest

from catalog import BatyrevParams, BundleParams, batyrev_picard3, example_41, kleinschmidt_bundle, projective_space
from errors import IncompleteFanError, InvalidFanError, NotAWallError, NotUnimodularError
from fan import (
    ZERO_CONE,
    Cone,
    anticanonical_degree_of_wall,
    build_fan,
    check_fano_criteria,
    dump_fan,
    fan_from_dict,
    has_fiber_type_relation,
    is_fano,
    is_projective,
    is_weak_fano,
    load_fan,
    primitive_collections,
    primitive_relation,
    primitive_relations,
    transform_fan,
    validate_complete,
    wall_relation,
)

P2_RAYS = [(1, 0), (0, 1), (-1, -1)]
P2_CONES = [[0, 1], [1, 2], [0, 2]]
P1xP1_RAYS = [(1, 0), (0, 1), (-1, 0), (0, -1)]
SQUARE_CONES = [[0, 1], [1, 2], [2, 3], [3, 0]]


def hirzebruch(a: int):
    return build_fan([(1, 0), (0, 1), (-1, a), (0, -1)], SQUARE_CONES)


class TestBuildFan(unittest.TestCase):
    def test_projective_plane(self):
        fan = build_fan(P2_RAYS, P2_CONES)
        self.assertEqual(fan.rank, 2)
        self.assertEqual(fan.num_rays, 3)
        self.assertEqual(fan.picard_number, 1)
        self.assertEqual(len(fan.walls), 3)

    def test_missing_cone_is_incomplete(self):
        with self.assertRaises(IncompleteFanError):
            build_fan(P2_RAYS, P2_CONES[:2])

    def test_non_primitive_ray(self):
        with self.assertRaises(InvalidFanError):
            build_fan([(2, 0), (0, 1), (-1, -1)], P2_CONES)

    def test_duplicate_ray(self):
        with self.assertRaises(InvalidFanError):
            build_fan([(1, 0), (1, 0), (-1, -1)], P2_CONES)

    def test_non_smooth_cone(self):
        with self.assertRaises(InvalidFanError):
            build_fan([(1, 0), (1, 2), (-1, -1)], P2_CONES, require_complete=False)

    def test_wall_in_three_cones(self):
        with self.assertRaises(InvalidFanError):
            build_fan([(1, 0), (0, 1), (-1, -1), (0, -1)], [[0, 1], [0, 2], [0, 3]], require_complete=False)

    def test_overlapping_cones(self):
        with self.assertRaises(InvalidFanError):
            build_fan([(1, 0), (0, 1), (1, 1)], [[0, 1], [0, 2]], require_complete=False)

    def test_ray_outside_every_cone(self):
        with self.assertRaisesRegex(InvalidFanError, "no maximal cone"):
            build_fan(P2_RAYS + [(1, 1)], P2_CONES)

    def test_wall_incidences(self):
        fan = kleinschmidt_bundle(BundleParams(4, 3, (2, 1)))
        incidences = sum(len(owners) for owners in fan.wall_incidences.values())
        self.assertEqual(incidences, fan.rank * len(fan.maximal_cones))
        self.assertTrue(all(len(owners) == 2 for owners in fan.wall_incidences.values()))

    def test_named_cones(self):
        fan = projective_space(3)
        self.assertEqual(fan.cone(["x2", "x0"]), Cone((0, 2)))
        with self.assertRaises(InvalidFanError):
            fan.cone(["x0", "x1", "x2", "x3"])
        with self.assertRaises(InvalidFanError):
            fan.ray_index("z9")


class TestCompleteness(unittest.TestCase):
    def test_product_of_lines(self):
        self.assertTrue(validate_complete(build_fan(P1xP1_RAYS, SQUARE_CONES)))

    def test_single_orthant(self):
        fan = build_fan([(1, 0), (0, 1)], [[0, 1]], require_complete=False)
        self.assertFalse(validate_complete(fan))

    def test_picard_three_fan(self):
        fan = batyrev_picard3(BatyrevParams((1, 1, 2, 1, 1), (0,), (0,)))
        self.assertTrue(validate_complete(fan))


class TestProjectivity(unittest.TestCase):
    def test_projective_space(self):
        projective, witness = is_projective(projective_space(4))
        self.assertTrue(projective)
        self.assertEqual(len(witness), 5)

    def test_bundle(self):
        self.assertTrue(is_projective(kleinschmidt_bundle(BundleParams(5, 2, (1,))))[0])

    def test_surfaces(self):
        for fan in (hirzebruch(0), hirzebruch(1), hirzebruch(3), build_fan(P2_RAYS, P2_CONES)):
            self.assertTrue(is_projective(fan)[0])


class TestWallRelations(unittest.TestCase):
    def test_projective_plane(self):
        fan = build_fan(P2_RAYS, P2_CONES)
        relation = wall_relation(fan, Cone((0,)))
        self.assertEqual(relation.coefficient_map(), {0: 1})
        self.assertEqual(set(relation.opposite_rays), {1, 2})
        for wall in fan.walls:
            self.assertEqual(anticanonical_degree_of_wall(fan, wall), 3)

    def test_product_of_lines(self):
        fan = build_fan(P1xP1_RAYS, SQUARE_CONES)
        self.assertEqual(wall_relation(fan, Cone((0,))).coefficient_map(), {0: 0})
        for wall in fan.walls:
            self.assertEqual(anticanonical_degree_of_wall(fan, wall), 2)

    def test_hirzebruch_surface(self):
        for a in range(4):
            fan = hirzebruch(a)
            self.assertEqual(wall_relation(fan, Cone((1,))).coefficient_map(), {1: -a})
        self.assertEqual(anticanonical_degree_of_wall(hirzebruch(2), Cone((1,))), 0)

    def test_relations_vanish(self):
        fan = batyrev_picard3(BatyrevParams((1, 2, 2, 1, 1), (1,), (0,)))
        for wall in fan.walls:
            vector = wall_relation(fan, wall).as_vector(fan.num_rays)
            total = [sum(c * ray.vector[j] for c, ray in zip(vector, fan.rays)) for j in range(fan.rank)]
            self.assertEqual(total, [0] * fan.rank)

    def test_not_a_wall(self):
        fan = build_fan(P2_RAYS, P2_CONES)
        with self.assertRaises(NotAWallError):
            wall_relation(fan, Cone((0, 1)))


class TestPrimitiveRelations(unittest.TestCase):
    def test_projective_plane(self):
        fan = build_fan(P2_RAYS, P2_CONES)
        collections = primitive_collections(fan)
        self.assertEqual([c.ray_ids for c in collections], [(0, 1, 2)])
        relation = primitive_relation(fan, collections[0])
        self.assertEqual(relation.sigma_P, ZERO_CONE)
        self.assertEqual(relation.degree, 3)

    def test_product_of_lines(self):
        fan = build_fan(P1xP1_RAYS, SQUARE_CONES)
        self.assertEqual([c.ray_ids for c in primitive_collections(fan)], [(0, 2), (1, 3)])
        self.assertTrue(has_fiber_type_relation(fan))

    def test_line_bundle_over_projective_space(self):
        d, a = 5, 2
        fan = kleinschmidt_bundle(BundleParams(d, 2, (a,)))
        xs = [fan.ray_index(f"x{i}") for i in range(1, d + 1)]
        relation = primitive_relation(fan, xs)
        self.assertEqual(relation.coefficient_map(), {fan.ray_index("y1"): a})
        self.assertEqual(relation.degree, d - a)
        self.assertTrue(relation.is_disjoint())

    def test_picard_three_collections(self):
        params = BatyrevParams((1, 1, 2, 1, 1), (0,), (0,))
        fan = batyrev_picard3(params)
        self.assertEqual(fan.num_rays, 6)
        self.assertEqual(len(primitive_collections(fan)), 5)
        names = {tuple(sorted(fan.rays[i].name for i in r.collection.ray_ids)): r for r in primitive_relations(fan)}
        zt = names[("t1", "z1", "z2")]
        self.assertTrue(zt.has_zero_rhs())
        self.assertEqual(zt.degree, 3)
        self.assertTrue(has_fiber_type_relation(fan))


class TestFano(unittest.TestCase):
    def test_projective_space(self):
        self.assertTrue(is_fano(projective_space(3)))

    def test_bundle(self):
        self.assertTrue(is_fano(kleinschmidt_bundle(BundleParams(5, 2, (1,)))))

    def test_bundle_over_plane_flips_at_three(self):
        self.assertTrue(is_fano(example_41(4, 2)))
        self.assertFalse(is_fano(example_41(4, 3)))

    def test_weak_fano(self):
        self.assertTrue(is_weak_fano(hirzebruch(2)))
        self.assertFalse(is_fano(hirzebruch(2)))
        self.assertFalse(is_weak_fano(hirzebruch(3)))

    def test_criteria_agree(self):
        for fan in (hirzebruch(1), hirzebruch(2), example_41(4, 3), projective_space(2)):
            self.assertEqual(check_fano_criteria(fan), is_fano(fan))


class TestTransforms(unittest.TestCase):
    def test_transform_keeps_structure(self):
        fan = kleinschmidt_bundle(BundleParams(3, 2, (1,)))
        moved = transform_fan(fan, [[1, 2, 0], [0, 1, 0], [3, 1, 1]])
        self.assertEqual(moved.num_rays, fan.num_rays)
        self.assertEqual(len(moved.walls), len(fan.walls))
        self.assertEqual(is_fano(moved), is_fano(fan))

    def test_rejects_non_unimodular(self):
        with self.assertRaises(NotUnimodularError):
            transform_fan(projective_space(2), [[2, 0], [0, 1]])


class TestFanFiles(unittest.TestCase):
    def test_load_exported_fan(self):
        fan = example_41(3, 1)
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "fan.json")
            dump_fan(fan, path)
            loaded = load_fan(path)
        self.assertEqual([r.vector for r in loaded.rays], [r.vector for r in fan.rays])
        self.assertEqual([r.name for r in loaded.rays], [r.name for r in fan.rays])
        self.assertEqual(loaded.maximal_cones, fan.maximal_cones)

    def test_export_is_sorted_json(self):
        text = dump_fan(projective_space(2))
        data = json.loads(text)
        self.assertEqual(list(data), ["maximal_cones", "rank", "rays"])
        self.assertEqual(data["rays"][2], {"name": "x2", "vector": [-1, -1]})

    def test_malformed_description(self):
        with self.assertRaises(InvalidFanError):
            fan_from_dict({"rank": 2, "rays": [{"vector": [1, 0]}], "maximal_cones": []})
        with self.assertRaises(InvalidFanError):
            fan_from_dict({"rank": 3, "rays": [{"name": "a", "vector": [1, 0]}], "maximal_cones": [[0]]})


if __name__ == "__main__":
    unittest.main()
