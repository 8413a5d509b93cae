import io
import json
import os
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from unittest import mock

from checks.records import compare
from errors import DimensionError
from toric_chern import EXIT_INVALID, EXIT_OK, EXIT_USAGE, AnalysisRequest, main, parse_arguments


def run(*argv):
    """Run the CLI, returning (exit code, stdout)."""
    out = io.StringIO()
    with redirect_stdout(out), redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, out.getvalue()


class TestAnalyze(unittest.TestCase):
    def test_projective_space(self):
        code, out = run("analyze", "--family", "pn", "--d", "4", "--k", "2")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("ch_2: positive", out)

    def test_line_bundle_json(self):
        code, out = run("analyze", "--family", "kleinschmidt", "--d", "5", "--s", "2", "--a", "1",
                        "--k", "3", "--json")
        self.assertEqual(code, EXIT_OK)
        report = json.loads(out)["reports"][0]
        self.assertEqual(report["classification"], "positive")
        self.assertEqual(report["min_value"], "1/3")
        self.assertEqual(report["witness_cone"], ["x1", "x2"])

    def test_picard_three_values(self):
        code, out = run("analyze", "--family", "batyrev3", "--p", "1,1,2,1,1", "--b", "0", "--c", "0",
                        "--k", "2", "--json", "--values", "--oracles")
        self.assertEqual(code, EXIT_OK)
        payload = json.loads(out)
        report = payload["reports"][0]
        self.assertEqual(report["classification"], "not_nef")
        self.assertIn({"cone": ["z2"], "value": "-3/2"}, report["values"])
        self.assertEqual((report["witness_cone"], report["min_value"]), (["z1"], "-3/2"))
        self.assertEqual(payload["fan"]["picard_number"], 3)
        self.assertTrue(payload["oracles"]["ch1_matches_fano"])

    def test_default_k_covers_every_degree(self):
        code, out = run("analyze", "--family", "pn", "--d", "3", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual([r["k"] for r in json.loads(out)["reports"]], [1, 2, 3])

    def test_output_is_deterministic(self):
        argv = ("analyze", "--family", "example41", "--d", "4", "--a", "2", "--json", "--values")
        self.assertEqual(run(*argv), run(*argv))

    def test_exported_fan_round_trips_through_analyze(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "fan.json")
            code, _ = run("export-fan", "--family", "example41", "--d", "4", "--a", "3", "--output", path)
            self.assertEqual(code, EXIT_OK)
            from_file = run("analyze", "--fan", path, "--json")
        from_family = run("analyze", "--family", "example41", "--d", "4", "--a", "3", "--json")
        self.assertEqual(from_file, from_family)


class TestAnalysisRequest(unittest.TestCase):
    def test_defaults_to_every_degree(self):
        request = AnalysisRequest.from_args(parse_arguments(["analyze", "--family", "pn", "--d", "3"]))
        self.assertEqual(request.ks, (1, 2, 3))
        self.assertEqual(request.fan.rank, 3)
        self.assertFalse(request.as_json)

    def test_rejects_k_above_dimension(self):
        with self.assertRaises(DimensionError):
            AnalysisRequest.from_args(parse_arguments(["analyze", "--family", "pn", "--d", "2", "--k", "3"]))


class TestExitCodes(unittest.TestCase):
    def test_missing_source(self):
        self.assertEqual(run("analyze", "--k", "2"), (EXIT_USAGE, ""))

    def test_two_sources(self):
        self.assertEqual(run("analyze", "--fan", "x.json", "--family", "pn", "--d", "2"), (EXIT_USAGE, ""))

    def test_k_out_of_range(self):
        self.assertEqual(run("analyze", "--family", "pn", "--d", "2", "--k", "1,3"), (EXIT_USAGE, ""))

    def test_invalid_parameters(self):
        self.assertEqual(run("analyze", "--family", "kleinschmidt", "--d", "5", "--s", "3", "--a", "1,2"),
                         (EXIT_USAGE, ""))
        self.assertEqual(run("analyze", "--family", "bott", "--d", "3"), (EXIT_USAGE, ""))
        self.assertEqual(run("analyze", "--family", "pn"), (EXIT_USAGE, ""))

    def test_bad_integer_list(self):
        self.assertEqual(run("analyze", "--family", "pn", "--d", "2", "--k", "two"), (EXIT_USAGE, ""))

    def test_unreadable_file(self):
        self.assertEqual(run("analyze", "--fan", "/nonexistent/fan.json"), (EXIT_INVALID, ""))

    def test_malformed_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "fan.json")
            with open(path, "w") as f:
                f.write("{not json")
            self.assertEqual(run("analyze", "--fan", path), (EXIT_INVALID, ""))

    def test_incomplete_fan(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "fan.json")
            with open(path, "w") as f:
                json.dump({"rank": 2, "rays": [{"name": "a", "vector": [1, 0]}, {"name": "b", "vector": [0, 1]}],
                           "maximal_cones": [[0, 1]]}, f)
            self.assertEqual(run("analyze", "--fan", path), (EXIT_INVALID, ""))

    def test_ray_in_no_cone(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "fan.json")
            rays = [[1, 0], [0, 1], [-1, -1], [1, 1]]
            with open(path, "w") as f:
                json.dump({"rank": 2, "rays": [{"name": f"r{i}", "vector": v} for i, v in enumerate(rays)],
                           "maximal_cones": [[0, 1], [1, 2], [0, 2]]}, f)
            self.assertEqual(run("analyze", "--fan", path), (EXIT_INVALID, ""))


class TestScan(unittest.TestCase):
    def test_json_lines(self):
        code, out = run("scan", "--family", "pn", "--max-d", "3", "--k", "2", "--json")
        self.assertEqual(code, EXIT_OK)
        lines = [json.loads(line) for line in out.splitlines()]
        self.assertEqual([line["d"] for line in lines[:-1]], [2, 3])
        self.assertTrue(all(line["classification"] == "positive" for line in lines[:-1]))
        self.assertEqual(lines[-1], {"summary": [{"classification": "positive", "count": 2, "k": 2}]})

    def test_picard_three_grid_is_never_nef(self):
        code, out = run("scan", "--family", "batyrev3", "--max-p", "1", "--max-p2", "2", "--max-bc", "1", "--json")
        self.assertEqual(code, EXIT_OK)
        lines = [json.loads(line) for line in out.splitlines()]
        self.assertEqual({line["classification"] for line in lines[:-1]}, {"not_nef"})

    def test_csv_and_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "scan.csv")
            code, out = run("scan", "--family", "kleinschmidt", "--max-d", "4", "--max-s", "2",
                            "--max-twist", "1", "--k", "2,4", "--csv", path)
            self.assertEqual(code, EXIT_OK)
            with open(path) as f:
                header = f.readline().strip()
        self.assertEqual(header, "family,params,d,k,classification,min_value,witness")
        self.assertIn("classification", out)


class TestVerifyPaper(unittest.TestCase):
    def test_exit_code_follows_records(self):
        passing = [compare("a.check", "anchor", 1, 1)]
        failing = passing + [compare("b.check", "anchor", 1, 2)]
        with mock.patch("toric_chern.PaperVerificationManager.run_all", return_value=passing):
            code, out = run("verify-paper", "--json")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(json.loads(out)["passed"])
        with mock.patch("toric_chern.PaperVerificationManager.run_all", return_value=failing):
            code, out = run("verify-paper")
        self.assertEqual(code, EXIT_INVALID)
        self.assertIn("1/2 checks passed", out)


if __name__ == "__main__":
    unittest.main()
