import io
import json
import os
import subprocess
import sys
import tempfile
import unittest
from contextlib import redirect_stdout
from fractions import Fraction
from pathlib import Path
from unittest import mock

from twistcoh.cli import dumps, main, run, validate

FIXTURES = Path(__file__).parent / "fixtures"
S3 = {"kind": "sphere", "k": 3}


def invoke(job, *flags):
    """Run ``main`` on a job dict; return (exit code, output text)."""
    with tempfile.TemporaryDirectory() as tmp:
        src = Path(tmp) / "job.json"
        dst = Path(tmp) / "out.json"
        src.write_text(job if isinstance(job, str) else json.dumps(job), encoding="utf-8")
        code = main(["--input", str(src), "--output", str(dst), *flags])
        return code, dst.read_text(encoding="utf-8")


class FixtureTests(unittest.TestCase):
    def test_fixtures(self):
        jobs = sorted(FIXTURES.glob("*.job.json"))
        self.assertGreater(len(jobs), 30)
        for path in jobs:
            name = path.name[: -len(".job.json")]
            with self.subTest(name):
                code, text = invoke(path.read_text(encoding="utf-8"))
                self.assertEqual(code, 0)
                self.assertEqual(text, (FIXTURES / f"{name}.out.json").read_text(encoding="utf-8"))


class ContractTests(unittest.TestCase):
    def test_sphere_mv(self):
        doc = run({"command": "sphere-mv", "ring": "K", "k": 2, "nu": 5, "slot": 1})
        self.assertEqual(doc["resolved"], {"free": 0, "torsion": [5]})

    def test_twisted_zero_matches(self):
        base = {"space": S3, "algebra": "laurent_b", "window": [-6, 6]}
        a = dumps(run(dict(base, command="cohomology")))
        b = dumps(run(dict(base, command="twisted")))
        c = dumps(run(dict(base, command="twisted", twist={"fundamental": {"coeff": 0, "mono": "b"}})))
        self.assertEqual(a, b)
        self.assertEqual(a, c)

    def test_recover(self):
        doc = run({"command": "recover-twist", "space": S3, "twist": {"fundamental": {"coeff": 7, "mono": "b"}}})
        self.assertEqual([(c["r"], c["coeff"]) for c in doc["classes"]], [(3, "7")])

    def test_determinism(self):
        job = {"command": "diff", "space": {"kind": "circle"}, "n": 1, "options": {"pairs": 3}}
        outs = {invoke(job, "--seed", "4")[1] for _ in range(2)}
        self.assertEqual(len(outs), 1)

    def test_rational_encoding(self):
        self.assertEqual(json.loads(dumps({"x": Fraction(-6, 4)})), {"x": "-3/2"})
        self.assertEqual(json.loads(dumps({"x": Fraction(4, 2)})), {"x": "2"})

    def test_canonical_keys(self):
        text = dumps({"b": 1, "a": {"d": 2, "c": 3}})
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertLess(text.index('"c"'), text.index('"d"'))


class ValidateTests(unittest.TestCase):
    def test_valid(self):
        self.assertEqual(validate({"command": "cohomology", "space": S3}), [])

    def test_mc(self):
        job = {"command": "twisted", "space": S3, "algebra": "laurent_b_odd",
               "twist": {"terms": [{"simplex": [0, 1, 2], "mono": "e", "coeff": "1"}]}}
        (diag,) = validate(job)
        self.assertEqual(diag["field"], "twist")
        self.assertIn("degree 3", diag["message"])

    def test_cover(self):
        job = {"command": "mv-check", "space": {"kind": "circle"},
               "cover": {"U": {"simplices": [[0, 1]]}, "V": {"simplices": [[1, 2]]}}}
        self.assertEqual([d["field"] for d in validate(job)], ["cover"])

    def test_window(self):
        job = {"command": "cohomology", "space": S3, "algebra": "laurent_b", "window": [0, 4]}
        self.assertEqual([d["field"] for d in validate(job)], ["window"])

    def test_unknown_command(self):
        self.assertEqual(validate({"command": "nope", "space": S3})[0]["field"], "command")

    def test_positional(self):
        code, text = invoke({"command": "cohomology", "space": {"kind": "blob"}}, "validate")
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(text)["diagnostics"][0]["field"], "space")


class ExitCodeTests(unittest.TestCase):
    def error(self, job, *flags):
        code, text = invoke(job, *flags)
        return code, json.loads(text)["error"]

    def test_missing_field(self):
        code, err = self.error({"command": "cohomology"})
        self.assertEqual((code, err["field"]), (1, "space"))

    def test_bad_json(self):
        code, err = self.error("{not json")
        self.assertEqual(code, 1)

    def test_bad_window_flag(self):
        code, err = self.error({"command": "cohomology", "space": S3, "algebra": "laurent_b"}, "--window", "0:3")
        self.assertEqual((code, err["field"]), (1, "window"))

    def test_bad_algebra(self):
        code, err = self.error({"command": "cohomology", "space": S3, "algebra": "zz"})
        self.assertEqual((code, err["field"]), (1, "algebra"))

    def test_non_mc_twist(self):
        job = {"command": "twisted", "space": S3, "algebra": "laurent_b_odd",
               "twist": {"terms": [{"simplex": [0, 1, 2], "mono": "e", "coeff": "1"}]}}
        code, err = self.error(job)
        self.assertEqual((code, err["field"]), (1, "twist"))

    def test_usage_error(self):
        with redirect_stdout(io.StringIO()), mock.patch("sys.stderr", io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                main(["--seed", "x"])
        self.assertEqual(ctx.exception.code, 1)

    def test_missing_input(self):
        code = main(["--input", "/nonexistent/job.json", "--output", os.devnull])
        self.assertEqual(code, 1)

    def test_threads_env(self):
        with mock.patch.dict(os.environ, {"TWC_THREADS": "0"}):
            code, err = self.error({"command": "cohomology", "space": S3})
        self.assertEqual((code, err["field"]), (1, "TWC_THREADS"))

    def test_invariant_violation(self):
        from twistcoh.complexes import InvariantViolation
        with mock.patch("twistcoh.cli.run", side_effect=InvariantViolation("boom")):
            code, err = self.error({"command": "cohomology", "space": S3})
        self.assertEqual(code, 2)


class EntryPointTests(unittest.TestCase):
    def test_stdin_stdout(self):
        job = json.dumps({"command": "sphere-mv", "k": 2, "nu": 3, "slot": 1})
        proc = subprocess.run([sys.executable, "-m", "twistcoh.cli"], input=job, capture_output=True,
                              text=True, check=False)
        self.assertEqual(proc.returncode, 0, proc.stderr)
        self.assertEqual(json.loads(proc.stdout)["resolved"]["torsion"], [3])

    def test_window_flag(self):
        buf = io.StringIO()
        with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
            json.dump({"command": "cohomology", "space": {"kind": "point"}, "algebra": "laurent_b"}, fh)
        try:
            with redirect_stdout(buf):
                code = main(["--input", fh.name, "--window=-4:4"])
        finally:
            os.unlink(fh.name)
        self.assertEqual(code, 0)
        job = {"command": "cohomology", "space": {"kind": "point"}, "algebra": "laurent_b", "window": [-4, 4]}
        self.assertEqual(buf.getvalue(), dumps(run(job)))
        self.assertNotEqual(buf.getvalue(), dumps(run(dict(job, window=[-6, 6]))))
