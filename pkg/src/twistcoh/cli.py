"""``twc``: JSON job runner.

A job is a JSON object with a ``command`` and command-specific fields.
Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional

from .algebra import AlgebraError, GradedAlgebra, preset
from .cochains import Cochain, TensorCochains, WindowError
from .complexes import INTEGERS, RATIONALS, ComplexError, InvariantViolation, cohomology
from .differential import (DifferentialDatum, DifferentialError, diff_group, diff_nk_table, mv_differential,
                           natural_map_isos, verify_sequences)
from .groups import FgAbelianGroup
from .picard import PicardError, UnitGroup, classify, h1_with_units, pic0_point
from .simplicial import (LocalSystem, SimplicialComplex, SimplicialError, build_space, fundamental_cocycle,
                         hemisphere_cover, local_system_complex)
from .sphere_mv import HomotopyDataError, TwistDescriptor, ring_preset, sphere_twisted
from .sseq import SpectralSequenceError, TwistedSpectralSequence, default_window, recover_twist
from .twist import (Obstruction, TwistError, TwistingElement, check_cover, mc_extend, mv_exactness,
                    twist_diagnostics)

COMMANDS = ("cohomology", "twisted", "sseq", "recover-twist", "sphere-mv", "classify", "diff", "mv-check",
            "validate")
MIN_LAURENT_WIDTH = 8


class InputError(ValueError):
    """Schema or semantic problem in a job; ``field`` points at the culprit."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


# --------------------------------------------------------------------------
# canonical JSON

def _encode(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, FgAbelianGroup):
        return x.to_json()
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False, default=_encode) + "\n"


# --------------------------------------------------------------------------
# parsing job fields

def _require(job: dict, key: str, where: str = ""):
    if key not in job:
        raise InputError(where + key, "missing")
    return job[key]


def parse_space(spec, field: str = "space") -> SimplicialComplex:
    if not isinstance(spec, dict):
        raise InputError(field, "expected an object")
    try:
        if "kind" in spec:
            return build_space(str(spec["kind"]), spec.get("k"))
        if "simplices" in spec:
            simplices = [tuple(int(v) for v in s) for s in spec["simplices"]]
            extra = [(int(v),) for v in spec.get("vertices", [])]
            return SimplicialComplex.from_simplices(simplices + extra, name=str(spec.get("name", "")))
    except (SimplicialError, TypeError, ValueError) as exc:
        raise InputError(field, str(exc)) from exc
    raise InputError(field, "needs 'kind' or 'simplices'")


def parse_algebra(name) -> GradedAlgebra:
    try:
        return preset(str(name))
    except (AlgebraError, KeyError, ValueError) as exc:
        raise InputError("algebra", f"unknown preset {name!r}") from exc


def parse_window(job: dict, A: GradedAlgebra, X: SimplicialComplex, required_default=True):
    w = job.get("window")
    if w is None:
        return default_window(A, X) if required_default else None
    if isinstance(w, str):
        w = w.split(":")
    try:
        lo, hi = int(w[0]), int(w[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError("window", "expected [lo, hi] or 'lo:hi'") from exc
    if lo >= hi:
        raise InputError("window", "lo must be below hi")
    if A.ngens and hi - lo < MIN_LAURENT_WIDTH:
        raise InputError("window", f"width {hi - lo} is below {MIN_LAURENT_WIDTH} for algebra {A.name}")
    return (lo, hi)


def parse_twist_cochain(spec, X: SimplicialComplex, A: GradedAlgebra, field: str = "twist") -> Optional[Cochain]:
    """Either {"fundamental": {"coeff": c, "mono": m}} (c·m·σ on the top
    cell) or {"terms": [{"simplex", "mono", "coeff"}, ...]}; with
    "complete": true the terms are a leading cocycle completed by
    Maurer-Cartan extension."""
    if spec is None:
        return None
    if not isinstance(spec, dict):
        raise InputError(field, "expected an object")
    try:
        if "fundamental" in spec:
            f = spec["fundamental"]
            sigma = fundamental_cocycle(X)
            c = Fraction(str(f.get("coeff", 1)))
            mono = A.monomial(A.parse_monomial(str(f.get("mono", "1"))))
            return Cochain.from_values(X, A, X.dim, [c * v for v in sigma], mono)
        if "terms" in spec:
            x = Cochain.from_json(X, A, spec["terms"])
            for s, _ in x.terms:
                if not X.contains(s):
                    raise InputError(field + ".terms", f"simplex {list(s)} is not in the space")
            return x
    except (AlgebraError, SimplicialError, TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(field, str(exc)) from exc
    raise InputError(field, "needs 'fundamental' or 'terms'")


def parse_twist(spec, X: SimplicialComplex, A: GradedAlgebra, field: str = "twist") -> Optional[TwistingElement]:
    x = parse_twist_cochain(spec, X, A, field)
    if x is None or x.is_zero():
        return None
    if spec.get("complete"):
        try:
            out = mc_extend(x)
        except TwistError as exc:
            raise InputError(field, str(exc)) from exc
        if isinstance(out, Obstruction):
            raise InputError(field, f"Maurer-Cartan extension obstructed in cochain degree {out.degree}")
        return out
    problems = twist_diagnostics(x)
    if problems:
        raise InputError(field, problems[0])
    return TwistingElement(x, check=False)


def parse_local_system(spec, X: SimplicialComplex, field: str = "local_system") -> Optional[LocalSystem]:
    if spec is None:
        return None
    try:
        hol = {(int(u), int(v)): Fraction(str(lam)) for u, v, lam in spec.get("holonomy", [])}
        L = LocalSystem.from_dict(hol, int(spec.get("basepoint", X.vertices[0])))
    except (TypeError, ValueError, SimplicialError, ZeroDivisionError) as exc:
        raise InputError(field, str(exc)) from exc
    for (u, v), _ in L.holonomy:
        if not X.contains((u, v)):
            raise InputError(field, f"edge {[u, v]} is not in the space")
    if L.flatness_defects(X):
        raise InputError(field, "local system is not flat")
    return L


def parse_cover(job: dict, X: SimplicialComplex):
    spec = job.get("cover", {"kind": "hemispheres"})
    if spec.get("kind") == "hemispheres":
        try:
            U, V, _ = hemisphere_cover(X)
        except (SimplicialError, ValueError) as exc:
            raise InputError("cover", str(exc)) from exc
        return U, V
    U = parse_space(_require(spec, "U", "cover."), "cover.U")
    V = parse_space(_require(spec, "V", "cover."), "cover.V")
    return U, V


def _options(job: dict) -> dict:
    opts = job.get("options", {})
    if not isinstance(opts, dict):
        raise InputError("options", "expected an object")
    return opts


# --------------------------------------------------------------------------
# commands

def _groups(C, degrees) -> Dict[str, Any]:
    out = {}
    for n in degrees:
        out[str(n)] = cohomology(C, n).to_json()
    return out


def cmd_cohomology(job: dict, twisted: bool = False) -> dict:
    X = parse_space(_require(job, "space"))
    A = parse_algebra(job.get("algebra", "q"))
    L = parse_local_system(job.get("local_system"), X)
    ring = str(_options(job).get("ring", "Q"))
    if ring not in ("Q", "Z"):
        raise InputError("options.ring", "expected 'Q' or 'Z'")
    if L is not None:
        if A.ngens:
            raise InputError("local_system", "local systems are supported with algebra q only")
        C = local_system_complex(X, L)
        return {"groups": _groups(C, range(0, X.dim + 1))}
    window = parse_window(job, A, X)
    tau = parse_twist(job.get("twist"), X, A) if twisted else None
    T = TensorCochains(X, A, window)
    C = T.complex(None if tau is None else tau.cochain, INTEGERS if ring == "Z" else RATIONALS)
    return {"groups": _groups(C, T.valid_degrees())}


def cmd_sseq(job: dict) -> dict:
    X = parse_space(_require(job, "space"))
    A = parse_algebra(job.get("algebra", "q"))
    window = parse_window(job, A, X)
    tau = parse_twist(job.get("twist"), X, A)
    opts = _options(job)
    r_max = int(opts.get("r_max", X.dim + 2))
    S = TwistedSpectralSequence(X, A, tau, None, window)
    pages = [S.ss.page(r).to_json() for r in range(2, r_max + 1)]
    degenerate = next((r for r in range(2, r_max + 1) if S.ss.is_degenerate_at(r)), None)
    units = []
    for r in range(2, X.dim + 2):
        try:
            units.append(S.unit_differential(r).to_json(A))
        except SpectralSequenceError as exc:
            units.append({"r": r, "error": str(exc)})
            break
    return {"pages": pages, "degenerate_at": degenerate, "unit_differentials": units}


def cmd_recover(job: dict) -> dict:
    X = parse_space(_require(job, "space"))
    A = parse_algebra(job.get("algebra", "laurent_b"))
    window = parse_window(job, A, X)
    tau = parse_twist(job.get("twist"), X, A)
    if tau is None:
        return {"classes": []}
    return recover_twist(tau, window).to_json(A)


def cmd_sphere_mv(job: dict) -> dict:
    try:
        ring = ring_preset(str(job.get("ring", "K")))
    except HomotopyDataError as exc:
        raise InputError("ring", str(exc)) from exc
    k = int(_require(job, "k"))
    n = int(job.get("n", 0))
    if "nu_matrices" in job:
        t = TwistDescriptor.from_matrices(k, {int(j): M for j, M in job["nu_matrices"].items()}, n)
    else:
        t = TwistDescriptor.multiplication(ring, k, int(_require(job, "nu")), n)
    slots = job.get("slots", [job.get("slot", 0)])
    reports = {str(m): sphere_twisted(ring, t, int(m)).to_json() for m in slots}
    if "slot" in job and "slots" not in job:
        return reports[str(job["slot"])]
    return {"slots": reports}


def cmd_classify(job: dict) -> dict:
    X = parse_space(_require(job, "space"))
    A = parse_algebra(job.get("algebra", "laurent_b"))
    window = parse_window(job, A, X)
    L = parse_local_system(job.get("local_system"), X)
    tau = parse_twist(job.get("twist"), X, A)
    units = UnitGroup(tuple(int(p) for p in _options(job).get("primes", (2, 3, 5, 7))))
    out = classify(X, A, int(job.get("shift", 0)), L, tau, window).to_json(A, units)
    out["pic0_point"] = pic0_point(A).to_json()
    out["h1_units"] = h1_with_units(X, units.group).to_json()
    return out


def _datum(job: dict, X: SimplicialComplex, n: int) -> DifferentialDatum:
    kind = job.get("datum", "ordinary")
    if kind == "ordinary":
        return DifferentialDatum.ordinary(X, n)
    if kind != "twisted":
        raise InputError("datum", "expected 'ordinary' or 'twisted'")
    A = parse_algebra(job.get("algebra", "laurent_b"))
    window = parse_window(job, A, X)
    tau = parse_twist(job.get("twist"), X, A)
    if tau is None:
        raise InputError("twist", "twisted datum needs a twist")
    try:
        return DifferentialDatum.twisted(X, A, tau, n, window)
    except DifferentialError as exc:
        raise InputError("twist", str(exc)) from exc


def cmd_diff(job: dict, seed: int) -> dict:
    X = parse_space(_require(job, "space"))
    n = int(_require(job, "n"))
    D = _datum(job, X, n)
    opts = _options(job)
    out = {"group": diff_group(D, int(job.get("m", 0))).to_json()}
    if "k" in job:
        k = int(job["k"])
        rows = diff_nk_table(D, n, k)
        out["table"] = [r.to_json() for r in rows]
        isos = natural_map_isos(D, n, k, [r.i for r in rows])
        out["natural_map_iso"] = {str(i): v for i, v in sorted(isos.items())}
    if opts.get("verify", True):
        out["verification"] = verify_sequences(D, pairs=int(opts.get("pairs", 10)), seed=seed).to_json()
    return out


def cmd_mv_check(job: dict) -> dict:
    X = parse_space(_require(job, "space"))
    U, V = parse_cover(job, X)
    problems = check_cover(X, U, V)
    if problems:
        raise InputError("cover", problems[0])
    if "datum" in job:
        D = _datum(job, X, int(_require(job, "n")))
        return mv_differential(D, U, V).to_json()
    A = parse_algebra(job.get("algebra", "q"))
    window = parse_window(job, A, X)
    tau = parse_twist(job.get("twist"), X, A)
    return mv_exactness(X, U, V, tau, A, window).to_json()


def validate(job) -> List[dict]:
    """Schema and semantic diagnostics without running the job."""
    out = []

    def bad(field, message):
        out.append({"field": field, "message": message})

    if not isinstance(job, dict):
        bad("", "job must be a JSON object")
        return out
    command = job.get("command")
    if command not in COMMANDS:
        bad("command", f"expected one of {list(COMMANDS)}")
    if command == "sphere-mv":
        for key in ("k",):
            if key not in job:
                bad(key, "missing")
        return out
    if "space" not in job:
        if command not in (None, "validate"):
            bad("space", "missing")
        return out
    try:
        X = parse_space(job["space"])
    except InputError as exc:
        bad(exc.field, exc.message)
        return out
    try:
        A = parse_algebra(job.get("algebra", "q"))
        parse_window(job, A, X)
        if job.get("twist") is not None:
            x = parse_twist_cochain(job["twist"], X, A)
            if x is not None and not job["twist"].get("complete"):
                for problem in twist_diagnostics(x):
                    bad("twist", problem)
        parse_local_system(job.get("local_system"), X)
        if command == "mv-check":
            U, V = parse_cover(job, X)
            for problem in check_cover(X, U, V):
                bad("cover", problem)
    except InputError as exc:
        bad(exc.field, exc.message)
    except (WindowError, ComplexError) as exc:
        bad("window", str(exc))
    return out


def run(job, seed: int = 0) -> dict:
    if not isinstance(job, dict):
        raise InputError("", "job must be a JSON object")
    command = job.get("command")
    if command == "validate":
        inner = dict(job.get("job", {}))
        return {"diagnostics": validate(inner)}
    if command not in COMMANDS:
        raise InputError("command", f"expected one of {list(COMMANDS)}")
    if command == "cohomology":
        return cmd_cohomology(job)
    if command == "twisted":
        return cmd_cohomology(job, twisted=True)
    if command == "sseq":
        return cmd_sseq(job)
    if command == "recover-twist":
        return cmd_recover(job)
    if command == "sphere-mv":
        return cmd_sphere_mv(job)
    if command == "classify":
        return cmd_classify(job)
    if command == "diff":
        return cmd_diff(job, seed)
    return cmd_mv_check(job)


def _threads() -> int:
    raw = os.environ.get("TWC_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError("TWC_THREADS", f"not an integer: {raw!r}") from exc
    if value < 1:
        raise InputError("TWC_THREADS", "must be at least 1")
    return value


class _Parser(argparse.ArgumentParser):
    """Usage errors are input errors (exit 1); argparse's own status 2 is reserved."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stdout.write(dumps({"error": {"field": "argv", "message": message}}))
        raise SystemExit(1)


def main(argv: Optional[List[str]] = None) -> int:
    parser = _Parser(prog="twc", description="Twisted cohomology calculator (JSON jobs).",
                     epilog="Negative windows need the '=' form: --window=-4:4")
    parser.add_argument("command", nargs="?", choices=COMMANDS, help="overrides the job's command field")
    parser.add_argument("--input", "-i", default="-", help="job file (default: stdin)")
    parser.add_argument("--output", "-o", default="-", help="output file (default: stdout)")
    parser.add_argument("--window", help="degree window lo:hi")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        _threads()
        text = sys.stdin.read() if args.input == "-" else open(args.input, encoding="utf-8").read()
        try:
            job = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("", f"invalid JSON: {exc}") from exc
        if not isinstance(job, dict):
            raise InputError("", "job must be a JSON object")
        if args.command == "validate" and job.get("command") != "validate":
            job = {"command": "validate", "job": job}
        elif args.command:
            job["command"] = args.command
        if args.window:
            target = job["job"] if job.get("command") == "validate" else job
            target["window"] = args.window
        seed = args.seed if args.seed is not None else int(job.get("seed", 0))
        doc = run(job, seed)
        code = 0
    except InputError as exc:
        doc, code = {"error": {"field": exc.field, "message": exc.message}}, 1
    except (WindowError, DifferentialError) as exc:
        doc, code = {"error": {"field": "window", "message": str(exc)}}, 1
    except OSError as exc:
        doc, code = {"error": {"field": "--input", "message": str(exc)}}, 1
    except (InvariantViolation, ComplexError, ArithmeticError) as exc:
        doc, code = {"error": {"field": "", "message": f"invariant violation: {exc}"}}, 2
    except (TwistError, SimplicialError, PicardError, HomotopyDataError, SpectralSequenceError, ValueError) as exc:
        doc, code = {"error": {"field": "", "message": str(exc)}}, 1

    text = dumps(doc)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
