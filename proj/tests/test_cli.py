"""End-to-end checks of the ce executable: output formats, exit codes, schemas."""
import csv
import io
import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

CE = sys.argv.pop(1)
SCHEMAS = sys.argv.pop(1)


def run(*args, env=None):
    return subprocess.run([CE, *args], capture_output=True, text=True, env=env)


def schema(name):
    with open(os.path.join(SCHEMAS, name)) as f:
        return json.load(f)


class CliTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.env = dict(os.environ, CE_CACHE_DIR=os.path.join(cls.tmp.name, "cache"))

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def path(self, name):
        return os.path.join(self.tmp.name, name)

    def test_piltz_weights_table(self):
        r = run("weights", "--kind", "piltz", "--v", "3", "--n", "100")
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = list(csv.reader(io.StringIO(r.stdout)))
        self.assertEqual(rows[0], ["n", "w", "prefix_sum"])
        self.assertEqual(len(rows) - 1, 100)
        self.assertEqual(rows[4][:2], ["4", "6"])
        self.assertEqual(rows[100][:2], ["100", "36"])

    def test_weights_json_format(self):
        r = run("--format", "json", "weights", "--kind", "cesaro", "--n", "12")
        self.assertEqual(r.returncode, 0, r.stderr)
        doc = json.loads(r.stdout)
        self.assertEqual(len(doc), 12)
        self.assertEqual(doc[11]["prefix_sum"], 12)

    def test_usage_errors_exit_2(self):
        self.assertEqual(run("arcs", "--n", "1e6", "--eps", "0.7").returncode, 2)
        self.assertEqual(run("weights", "--n", "abc").returncode, 2)
        self.assertEqual(run("weights", "--kind", "piltz", "--v", "12").returncode, 2)
        self.assertEqual(run("nosuch").returncode, 2)
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("verify", "--n-grid", "1e5,1e4", env=self.env).returncode, 2)
        self.assertEqual(run("ergodic", "--observable", "table:1,inf", "--n-max", "100",
                             env=self.env).returncode, 2)

    def test_io_error_exit_3(self):
        self.assertEqual(run("plot", "--csv", self.path("missing.csv")).returncode, 3)

    def test_arc_parameters(self):
        r = run("arcs", "--n", "1e6", "--x", "0.5")
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = list(csv.DictReader(io.StringIO(r.stdout)))
        self.assertEqual(rows[0]["major"], "1")
        self.assertEqual(rows[0]["q"], "2")

    def test_verify_report_matches_schema_and_is_reproducible(self):
        args = ["--seed", "5", "verify", "--suite", "rational,minor", "--kind", "hecke2", "--n-grid", "1e4,3e4"]
        a = run(*args, "--out", self.path("a.json"), env=self.env)
        self.assertEqual(a.returncode, 0, a.stderr)
        self.assertIn("cache miss", a.stderr)
        b = run("--threads", "3", *args, "--out", self.path("b.json"), env=self.env)
        self.assertEqual(b.returncode, 0, b.stderr)
        self.assertIn("cache hit", b.stderr)
        with open(self.path("a.json"), "rb") as fa, open(self.path("b.json"), "rb") as fb:
            raw = fa.read()
            self.assertEqual(raw, fb.read())
        doc = json.loads(raw)
        jsonschema.validate(doc, schema("verification_report.schema.json"))
        self.assertTrue(doc["pass"])
        self.assertEqual(doc["config"]["n_grid"], [10000, 30000])

    def test_verify_piltz_and_cesaro(self):
        for kind in (["--kind", "piltz", "--v", "2"], ["--kind", "cesaro"]):
            r = run("verify", "--suite", "asymptotics", *kind, "--n-grid", "1e4,3e4",
                    "--out", self.path("p.json"), env=self.env)
            self.assertEqual(r.returncode, 0, r.stderr)
            with open(self.path("p.json")) as f:
                jsonschema.validate(json.load(f), schema("verification_report.schema.json"))

    def test_oscillation_report_matches_schema(self):
        for kernel in ("weighted", "cesaro", "omega:4"):
            r = run("--seed", "2", "ergodic", "--oscillation", kernel, "--J", "6", "--support", "64", env=self.env)
            self.assertEqual(r.returncode, 0, r.stderr)
            doc = json.loads(r.stdout)
            jsonschema.validate(doc, schema("oscillation_report.schema.json"))
            self.assertEqual(len(doc["terms"]), 6)

    def test_ergodic_csv(self):
        r = run("ergodic", "--system", "rotation:0.25", "--weights", "cesaro", "--observable", "char:1",
                "--x0", "0", "--n-max", "64")
        self.assertEqual(r.returncode, 0, r.stderr)
        rows = list(csv.DictReader(io.StringIO(r.stdout)))
        self.assertEqual([row["N"] for row in rows], ["2", "4", "8", "16", "32", "64"])
        # A quarter rotation averages to zero over any multiple of 4 steps.
        self.assertLess(abs(float(rows[-1]["average_re"])), 1e-12)

    def test_plot_outputs_svg(self):
        r = run("plot", "--kind", "cesaro", "--n", "100", "--grid", "256", "--out", self.path("t.svg"))
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(self.path("t.svg")) as f:
            self.assertTrue(f.read().startswith("<svg"))
        run("expsum", "--kind", "cesaro", "--n", "100", "--grid", "64", "--out", self.path("e.csv"))
        r = run("plot", "--csv", self.path("e.csv"), "--y-col", "abs_T", "--log-y", "--out", self.path("c.svg"))
        self.assertEqual(r.returncode, 2)  # |T| vanishes at some grid points, so a log axis is rejected
        r = run("plot", "--csv", self.path("e.csv"), "--y-col", "abs_T", "--out", self.path("c.svg"))
        self.assertEqual(r.returncode, 0, r.stderr)


if __name__ == "__main__":
    unittest.main()
