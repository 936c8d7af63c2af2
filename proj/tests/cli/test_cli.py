"""End-to-end checks of the ssf-lab executable: exit codes, determinism and
conformance of every emitted artifact to the published schemas."""

import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile
import time
import unittest
from pathlib import Path

import jsonschema
from referencing import Registry, Resource

BINARY = Path(os.environ["SSF_LAB"])
ROOT = Path(os.environ["SSF_ROOT"])
SCHEMAS = ROOT / "schemas"
CONFIGS = ROOT / "configs"


def registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        resources.append((path.name, Resource.from_contents(json.loads(path.read_text()))))
    return Registry().with_resources(resources)


REGISTRY = registry()


def validate(instance, schema_name):
    schema = json.loads((SCHEMAS / schema_name).read_text())
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(instance)


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("SSF_LAB_JOBS", None)
    if env:
        full_env.update(env)
    return subprocess.run([str(BINARY), *args], capture_output=True, text=True, env=full_env, timeout=600)


def write_config(obj):
    f = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False)
    json.dump(obj, f)
    f.close()
    return f.name


SCALAR_LATTICE = {
    "model": {"type": "halfline_laplacian"},
    "perturbation": {"sites": [1], "weights": [[1.0]], "j": [[1.0]]},
    "lambda_grid": {"start": -1.9, "stop": 1.9, "count": 101},
}

ZERO_COUPLING = {
    "model": {"type": "dense", "h0": [[0, 0], [0, 1]]},
    "perturbation": {"g": [[0, 0]], "j": [[1.0]]},
    "lambda_grid": [0.5],
}


class SsfCommand(unittest.TestCase):
    def records(self, config, *extra):
        res = run("ssf", "--config", str(config), *extra)
        self.assertEqual(res.returncode, 0, res.stderr)
        return [json.loads(line) for line in res.stdout.splitlines()], res.stdout

    def test_dense_diagonal_oracle_column(self):
        recs, _ = self.records(CONFIGS / "dense_diagonal.json")
        self.assertEqual(len(recs), 4)
        for r in recs:
            validate(r, "ssf_record.schema.json")
            self.assertIsInstance(r["xi_oracle"], int)
            self.assertEqual(round(r["xi_det"]), r["xi_oracle"])

    def test_lattice_scalar_birman_krein(self):
        recs, _ = self.records(write_config(SCALAR_LATTICE))
        self.assertEqual(len(recs), 101)
        for r in recs:
            validate(r, "ssf_record.schema.json")
            self.assertIsNone(r["xi_oracle"])
        self.assertLess(max(r["bk_defect"] for r in recs), 1e-6)
        # lambda = 0 carries the scalar closed form xi = 1/4.
        mid = recs[50]
        self.assertAlmostEqual(mid["lambda"], 0.0, places=12)
        self.assertAlmostEqual(mid["xi_det"], 0.25, places=9)

    def test_flagged_point_exits_zero(self):
        recs, _ = self.records(CONFIGS / "on_eigenvalue.json")
        self.assertEqual(len(recs), 1)
        validate(recs[0], "ssf_record.schema.json")
        self.assertEqual(recs[0]["flags"], ["BoundaryUndefined"])

    def test_determinism_and_jobs(self):
        cfg = CONFIGS / "lattice_rank2.json"
        _, a = self.records(cfg, "--jobs", "1")
        _, b = self.records(cfg, "--jobs", "4")
        res = run("ssf", "--config", str(cfg), env={"SSF_LAB_JOBS": "3"})
        self.assertEqual(res.returncode, 0)
        self.assertEqual(a, b)
        self.assertEqual(a, res.stdout)

    def test_csv_projection(self):
        out = Path(tempfile.mkdtemp()) / "records.csv"
        res = run("ssf", "--config", str(CONFIGS / "dense_diagonal.json"), "--format", "csv", "--out", str(out))
        self.assertEqual(res.returncode, 0, res.stderr)
        rows = list(csv.reader(io.StringIO(out.read_text())))
        self.assertEqual(rows[0], ["lambda", "xi_det", "xi_mu", "xi_index", "xi_oracle", "bk_defect"])
        self.assertEqual(len(rows), 5)
        for row in rows[1:]:
            self.assertEqual(round(float(row[1])), int(row[4]))

    def test_transformed_model(self):
        recs, _ = self.records(CONFIGS / "dense_affine.json")
        for r in recs:
            validate(r, "ssf_record.schema.json")

    def test_config_errors_exit_2(self):
        self.assertEqual(run("ssf", "--config", "/nonexistent.json").returncode, 2)
        bad = write_config({"model": {"type": "dense", "h0": [[0]]}, "perturbation": {"g": [[1, 1]], "j": [[1]]},
                            "lambda_grid": [0.5]})
        self.assertEqual(run("ssf", "--config", bad).returncode, 2)
        grid = dict(SCALAR_LATTICE, lambda_grid={"start": 1.0, "stop": 0.0, "count": 5})
        self.assertEqual(run("ssf", "--config", write_config(grid)).returncode, 2)
        self.assertEqual(run("ssf").returncode, 2)
        self.assertEqual(run("ssf", "--config", bad, "--format", "xml").returncode, 2)


class MuCommand(unittest.TestCase):
    def test_scalar_closed_form(self):
        res = run("mu", "--config", write_config(SCALAR_LATTICE), "--lambda", "0", "--method", "both")
        self.assertEqual(res.returncode, 0, res.stderr)
        out = json.loads(res.stdout)
        validate(out, "mu_comparison.schema.json")
        self.assertTrue(out["equal"])
        for key in ("flow", "index"):
            self.assertEqual(out[key]["tail"], -1)
            self.assertEqual(len(out[key]["jumps"]), 1)
            self.assertAlmostEqual(out[key]["jumps"][0]["theta"], 1.5 * math.pi, places=9)
            self.assertEqual(out[key]["jumps"][0]["m"], 1)

    def test_single_methods(self):
        for method in ("flow", "index"):
            res = run("mu", "--config", str(CONFIGS / "lattice_rank2.json"), "--lambda", "0.4", "--method", method)
            self.assertEqual(res.returncode, 0, res.stderr)
            out = json.loads(res.stdout)
            validate(out, "mu_function.schema.json")
            self.assertEqual(out["method"], method)

    def test_zero_coupling(self):
        res = run("mu", "--config", write_config(ZERO_COUPLING), "--lambda", "0.5")
        out = json.loads(res.stdout)
        self.assertEqual(out["flow"]["jumps"], [])
        self.assertEqual(out["flow"]["tail"], 0)

    def test_dense_gap_constant(self):
        res = run("mu", "--config", str(CONFIGS / "dense_diagonal.json"), "--lambda", "3.5", "--method", "flow")
        out = json.loads(res.stdout)
        self.assertEqual(out["jumps"], [])

    def test_exceptional_point_exits_1(self):
        res = run("mu", "--config", str(CONFIGS / "on_eigenvalue.json"), "--lambda", "1.0")
        self.assertEqual(res.returncode, 1)
        self.assertEqual(json.loads(res.stderr.splitlines()[-1])["error"], "BoundaryUndefined")


class DetCommand(unittest.TestCase):
    def test_trace_matches_sweep(self):
        cfg = write_config(SCALAR_LATTICE)
        res = run("det", "--config", cfg, "--lambda", "0.3")
        self.assertEqual(res.returncode, 0, res.stderr)
        trace = json.loads(res.stdout)
        validate(trace, "det_trace.schema.json")
        anchor = trace["rows"][0]
        self.assertLess(abs(complex(anchor["re"], anchor["im"]) - 1), 1e-6)
        self.assertAlmostEqual(trace["rows"][-1]["arg"] / math.pi, trace["xi_det"], places=12)

        point = dict(SCALAR_LATTICE, lambda_grid=[0.3])
        rec = json.loads(run("ssf", "--config", write_config(point)).stdout)
        self.assertEqual(rec["xi_det"], trace["xi_det"])

    def test_zero_coupling_has_zero_argument(self):
        trace = json.loads(run("det", "--config", write_config(ZERO_COUPLING), "--lambda", "0.5").stdout)
        self.assertTrue(all(row["arg"] == 0 for row in trace["rows"]))


class CheckCommand(unittest.TestCase):
    def test_index_suite(self):
        res = run("check", "--suite", "index", "--seed", "1")
        self.assertEqual(res.returncode, 0)
        report = json.loads(res.stdout)
        validate(report, "check_report.schema.json")
        self.assertTrue(report["passed"])

    def test_reports_are_stable(self):
        a = json.loads(run("check", "--suite", "e-lemmas", "--seed", "4").stdout)
        b = json.loads(run("check", "--suite", "e-lemmas", "--seed", "4").stdout)
        for r in (a, b):
            r.pop("wall_time_s")
        self.assertEqual(a, b)

    def test_unknown_suite(self):
        self.assertEqual(run("check", "--suite", "bogus", "--seed", "1").returncode, 2)

    def test_all_suites(self):
        start = time.monotonic()
        res = run("check", "--suite", "all", "--seed", "1")
        elapsed = time.monotonic() - start
        self.assertEqual(res.returncode, 0, res.stdout)
        self.assertTrue(json.loads(res.stdout)["passed"])
        self.assertLess(elapsed, 120.0)


def assert_close(test, expected, actual, path="$"):
    if isinstance(expected, dict):
        test.assertEqual(sorted(expected), sorted(actual), path)
        for k in expected:
            assert_close(test, expected[k], actual[k], f"{path}.{k}")
    elif isinstance(expected, list):
        test.assertEqual(len(expected), len(actual), path)
        for i, (e, a) in enumerate(zip(expected, actual)):
            assert_close(test, e, a, f"{path}[{i}]")
    elif isinstance(expected, float) or isinstance(actual, float):
        test.assertTrue(math.isclose(expected, actual, rel_tol=1e-9, abs_tol=1e-12), f"{path}: {expected} vs {actual}")
    else:
        test.assertEqual(expected, actual, path)


class GoldenFixtures(unittest.TestCase):
    """Checked-in outputs for downstream renderers must match the schemas and
    be reproduced by the current build."""

    FIXTURES = ROOT / "fixtures"

    def test_records(self):
        lines = (self.FIXTURES / "lattice_scalar.jsonl").read_text().splitlines()
        for line in lines:
            validate(json.loads(line), "ssf_record.schema.json")
        fresh = run("ssf", "--config", str(CONFIGS / "lattice_scalar.json")).stdout.splitlines()
        assert_close(self, [json.loads(x) for x in lines], [json.loads(x) for x in fresh])

    def test_csv(self):
        golden = list(csv.reader(io.StringIO((self.FIXTURES / "lattice_scalar.csv").read_text())))
        res = run("ssf", "--config", str(CONFIGS / "lattice_scalar.json"), "--format", "csv")
        fresh = list(csv.reader(io.StringIO(res.stdout)))
        self.assertEqual(golden[0], fresh[0])
        as_num = lambda rows: [[float(v) if v else None for v in r] for r in rows[1:]]
        assert_close(self, as_num(golden), as_num(fresh))

    def test_mu_and_det(self):
        mu = json.loads((self.FIXTURES / "mu_lattice_rank2.json").read_text())
        validate(mu, "mu_comparison.schema.json")
        args = ["--config", str(CONFIGS / "lattice_rank2.json"), "--lambda", "0.4"]
        assert_close(self, mu, json.loads(run("mu", *args, "--method", "both").stdout))
        det = json.loads((self.FIXTURES / "det_lattice_rank2.json").read_text())
        validate(det, "det_trace.schema.json")
        assert_close(self, det, json.loads(run("det", *args).stdout))


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])
