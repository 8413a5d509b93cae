import unittest

import numpy as np

from catalog import BatyrevParams, BundleParams, Example41Params, build_family, example_41
from checks import FAIL, PASS, BatyrevChecks, BundleChecks, ProjectiveSpaceChecks, PropertyChecks
from checks.picard_three import check_member
from checks.properties import MAX_CATALOG_RANK, catalog_members, check_catalog_member, random_unimodular
from checks.records import compare, crashed
from exact_linalg import determinant
from scan_manager import ScanManager
from verification_manager import PaperVerificationManager


class TestRecords(unittest.TestCase):
    def test_compare(self):
        ok = compare("x.ok", "anchor", 3, 3)
        self.assertTrue(ok.passed)
        self.assertEqual(ok.to_dict()["computed"], "3")
        with self.assertLogs("checks.records", level="ERROR"):
            bad = compare("x.bad", "anchor", [1, 2], [2, 1])
        self.assertEqual(bad.status, FAIL)

    def test_crashed(self):
        with self.assertLogs("checks.records", level="ERROR"):
            record = crashed("x.crash", "anchor", ValueError("boom"))
        self.assertFalse(record.passed)
        self.assertEqual(record.computed, "ValueError")


class TestSuites(unittest.TestCase):
    def assertAllPass(self, records):
        failed = [r for r in records if not r.passed]
        self.assertTrue(records)
        self.assertEqual(failed, [])

    def test_projective_spaces(self):
        self.assertAllPass(ProjectiveSpaceChecks(max_d=3).run())

    def test_ch4_identities(self):
        checks = BundleChecks(max_twist=2)
        self.assertAllPass(checks._ch4_instance(BundleParams(5, 3, (2, 1))))
        self.assertAllPass(checks._ch4_instance(BundleParams(6, 4, (1, 1, 0))))

    def test_picard_three_member(self):
        checks = BatyrevChecks()
        self.assertAllPass(checks.check(BatyrevParams((1, 1, 2, 1, 1), (0,), (0,))))
        self.assertAllPass(checks.check(BatyrevParams((1, 1, 2, 2, 1), (0, 1), (1,))))

    def test_properties_on_one_fan(self):
        checks = PropertyChecks(covectors=3, multisets=5, transforms=2)
        rng = np.random.default_rng(0)
        fan = example_41(3, 2)
        for check in (checks.wall_consistency, checks.principal_vanishing, checks.permutation_invariance,
                      checks.stanley_reisner_vanishing, checks.ch1_equivalence, checks.surface_formula):
            self.assertTrue(check("example41", fan, rng).passed)

    def test_transform_invariance(self):
        checks = PropertyChecks(transforms=2)
        fan = build_family("batyrev", BatyrevParams((1, 1, 1, 1, 1), (1,)))
        self.assertTrue(checks.transform_invariance("batyrev", fan, np.random.default_rng(1)).passed)

    def test_picard_three_negative_surface_settles_ch2(self):
        checks = BatyrevChecks(full_bc=-1)
        records = checks.check(BatyrevParams((1, 1, 2, 1, 1), (0,), (0,)))
        self.assertAllPass(records)
        ch2 = next(r for r in records if r.check_id.endswith(".ch2"))
        self.assertTrue(ch2.details.startswith("-3/2 on"))

    def test_picard_three_full_sweep_bound(self):
        checks = BatyrevChecks(full_bc=1)
        self.assertTrue(checks.full_sweep(BatyrevParams((1, 1, 2, 1, 1), (1,), (0,))))
        self.assertFalse(checks.full_sweep(BatyrevParams((1, 1, 2, 1, 1), (3,), (0,))))

    def test_bad_picard_three_member_is_one_failure(self):
        with self.assertLogs("checks.records", level="ERROR"):
            records = check_member(BatyrevParams((1, 1, 2, 1, 1), (0,)), True)
        self.assertEqual(len(records), 1)
        self.assertFalse(records[0].passed)
        self.assertEqual(records[0].computed, "ParameterError")

    def test_bad_catalog_member_is_one_failure(self):
        with self.assertLogs("checks.records", level="ERROR"):
            records = check_catalog_member(PropertyChecks(), 0, "bad", "example41", Example41Params(2, 1))
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0].check_id, "bad")
        self.assertEqual(records[0].status, FAIL)

    def test_catalog_member_records(self):
        checks = PropertyChecks(covectors=2, multisets=3, transforms=1)
        params = BatyrevParams((1, 1, 1, 1, 1), (1,))
        records = check_catalog_member(checks, 0, "batyrev.one", "batyrev", params)
        self.assertAllPass(records)
        self.assertIn("batyrev.one.transforms", [r.check_id for r in records])

    def test_catalog_members_cover_rank_six(self):
        members = catalog_members()
        self.assertTrue(all(params.d <= MAX_CATALOG_RANK for _, _, params in members))
        bundles = {params.s for _, family, params in members if family == "kleinschmidt"}
        self.assertTrue({4, 5} <= bundles)
        self.assertIn(3, {params.p[2] for _, family, params in members if family == "batyrev"})
        self.assertIn(6, {params.d for _, family, params in members if family == "pn"})

    def test_random_unimodular(self):
        rng = np.random.default_rng(3)
        for d in (1, 2, 4):
            self.assertIn(determinant(random_unimodular(rng, d)), (1, -1))


class _Suite:
    def __init__(self, records=None, error=None):
        self.records = records or []
        self.error = error

    def run(self):
        if self.error:
            raise self.error
        return self.records


class TestManagers(unittest.TestCase):
    def test_verification_manager_orders_and_survives_crashes(self):
        manager = PaperVerificationManager(workers=2)
        manager.suites = {
            "first": _Suite([compare("z.check", "a", 1, 1), compare("a.check", "a", 1, 1)]),
            "second": _Suite(error=RuntimeError("boom")),
        }
        with self.assertLogs("checks.records", level="ERROR"):
            records = manager.run_all()
        self.assertEqual([r.check_id for r in records], ["a.check", "z.check", "second.suite"])
        summary = manager.summary(records)
        self.assertEqual(summary.to_dict(orient="records"), [
            {"anchor": "a", "pass": 2, "fail": 0},
            {"anchor": "second", "pass": 0, "fail": 1},
        ])
        self.assertEqual(list(manager.to_frame(records).columns),
                         ["check_id", "anchor", "status", "expected", "computed", "details"])
        self.assertEqual(records[0].status, PASS)

    def test_picard_three_records_are_independent_of_workers(self):
        sequential = BatyrevChecks(max_bc=1, max_p=1, max_p2=1, workers=1).run()
        parallel = BatyrevChecks(max_bc=1, max_p=1, max_p2=1, workers=2).run()
        self.assertTrue(sequential)
        self.assertEqual(parallel, sequential)

    def test_scan_order_is_independent_of_workers(self):
        bounds = {"max_d": 4}
        sequential = ScanManager("pn", [2, 3], bounds=bounds, workers=1).run()
        parallel = ScanManager("pn", [3, 2], bounds=bounds, workers=2).run()
        self.assertEqual(parallel, sequential)
        self.assertEqual([(r["d"], r["k"]) for r in sequential], [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3)])

    def test_scan_summary(self):
        records = ScanManager("kleinschmidt", [2], bounds={"max_d": 3, "max_twist": 1}).run()
        summary = ScanManager.summary(records)
        self.assertNotIn("positive", set(summary["classification"]))
        self.assertEqual(int(summary["count"].sum()), len(records))


if __name__ == "__main__":
    unittest.main()
