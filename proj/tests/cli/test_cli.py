#!/usr/bin/env python3
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""End-to-end checks of the gwperc executable: exit codes, determinism,
output files. Usage: test_cli.py <path-to-gwperc>"""
import csv
import json
import os
import subprocess
import sys
import tempfile
import unittest

EXE = None
SCHEMA_KEYS = {"artifact", "version", "command", "spec", "seeds", "parameters", "wall_time_s"}


def run(*args):
    return subprocess.run([EXE, *map(str, args)], capture_output=True, text=True, timeout=600)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()
        self.tmp = self.dir.name

    def tearDown(self):
        self.dir.cleanup()

    def path(self, name):
        return os.path.join(self.tmp, name)

    def run_json(self, *args):
        out = self.path("out.json")
        r = run(*args, "--json", out)
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(out) as f:
            doc = json.load(f)
        self.assertTrue(SCHEMA_KEYS <= doc.keys(), doc.keys())
        self.assertEqual(doc["artifact"], "gwperc")
        return r, doc

    def gen_tree(self, name, dist="unif:1:3", seed=42, depth=6):
        p = self.path(name)
        r = run("gen-tree", "--dist", dist, "--seed", seed, "--depth", depth, "--out", p)
        self.assertEqual(r.returncode, 0, r.stderr)
        return p

    def test_usage_errors_exit_2(self):
        self.assertEqual(run().returncode, 2)
        self.assertEqual(run("no-such-command").returncode, 2)
        self.assertEqual(run("survival", "--dist", "det:2", "--depth", 2, "--bogus").returncode, 2)
        self.assertEqual(run("survival", "--depth", 2, "--exact").returncode, 2)
        self.assertEqual(run("verify-all", "--budget", "huge").returncode, 2)
        self.assertEqual(run("gen-tree", "--dist", "det:2").returncode, 2)

    def test_precondition_errors_exit_3(self):
        self.assertEqual(run("survival", "--dist", "bogus", "--depth", 2, "--exact").returncode, 3)
        self.assertEqual(run("survival", "--dist", "det:1", "--depth", 2, "--exact").returncode, 3)
        t = self.gen_tree("t.txt", depth=3)
        self.assertEqual(run("survival", "--tree", t, "--depth", 5, "--exact").returncode, 3)
        self.assertEqual(run("iic", "--tree", t, "--depth", 8, "--reps", 10).returncode, 3)
        self.assertEqual(run("survival", "--tree", self.path("missing.txt"), "--depth", 2, "--exact").returncode, 3)

    def test_survival_exact_binary_tree(self):
        csv_path = self.path("s.csv")
        r, doc = self.run_json("survival", "--dist", "det:2", "--depth", 2, "--exact", "--csv", csv_path)
        self.assertIn("0.75", r.stdout)
        self.assertIn("0.609375", r.stdout)
        self.assertEqual(doc["spec"], "det:2")
        q = [row["q_n"] for row in doc["table"]]
        self.assertEqual(q, [1, 0.75, 0.609375])
        with open(csv_path) as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(float(rows[2]["q_n"]), 0.609375)

    def test_gen_tree_is_byte_identical(self):
        a = self.gen_tree("a.txt")
        b = self.gen_tree("b.txt")
        with open(a, "rb") as fa, open(b, "rb") as fb:
            self.assertEqual(fa.read(), fb.read())
        with open(a) as f:
            self.assertEqual(f.readline().split(), ["gwtree", "v1", "unif:1:3", "42", "6"])

    def test_commands_are_deterministic(self):
        t = self.gen_tree("t.txt")
        for args in (
            ("survival", "--tree", t, "--depth", 16, "--mc", 5000, "--seed", 3),
            ("yaglom", "--tree", t, "--depth", 16, "--accepted", 500, "--seed", 3),
            ("iic", "--tree", t, "--depth", 16, "--reps", 1000, "--lookahead", 8, "--seed", 3,
             "--sensitivity", "none"),
            ("spread", "--tree", t, "--depth", 32, "--reps", 300, "--seed", 3),
            ("annealed", "yaglom", "--dist", "unif:1:3", "--depth", 16, "--accepted", 1000, "--seed", 3),
        ):
            a = run(*args, "--threads", 1)
            b = run(*args, "--threads", 2)
            self.assertEqual(a.returncode, 0, a.stderr)
            strip = lambda s: [l for l in s.splitlines() if "time" not in l]
            self.assertEqual(strip(a.stdout), strip(b.stdout), args)

    def test_every_command_writes_json(self):
        t = self.gen_tree("t.txt")
        self.run_json("moments", "--tree", t, "--depth", 6, "--k", 3)
        _, doc = self.run_json("martingale-decay", "--dist", "unif:1:3", "--k", 2, "--nmax", 8,
                               "--trees", 200, "--seed", 1)
        self.assertIn("slope", doc["results"])
        _, doc = self.run_json("yaglom", "--tree", t, "--depth", 16, "--accepted", 500, "--seed", 1)
        self.assertIn("ks", doc["results"]["summary"])
        _, doc = self.run_json("iic", "--tree", t, "--depth", 16, "--reps", 1000, "--lookahead", 8)
        self.assertGreaterEqual(doc["results"]["min_c_n"], 1)
        self.run_json("annealed", "survival", "--dist", "det:2", "--depth", 100)
        self.run_json("annealed", "iic", "--dist", "det:2", "--depth", 16, "--reps", 1000)
        _, doc = self.run_json("spread", "--tree", t, "--depth", 32, "--reps", 200)
        self.assertEqual(len(doc["table"]), 3)


if __name__ == "__main__":
    EXE = sys.argv.pop(1)
    unittest.main(verbosity=2)
