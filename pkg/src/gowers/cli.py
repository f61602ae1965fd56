"""Command-line entry point: ``gowers <command> [options]``.

Results go to stdout (or ``--out``) as JSON with sorted keys; ``--csv``
writes a tabular export where one makes sense.  Exit status is 0 on
success, 1 when a check fails and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import character_decomposition
from .cube import CubeFunction
from .decomposable import DecomposableFunction
from .dual import DualNormOptions, dual_norm, thborne_decompose, thk_decompose
from .errors import (
    DimensionError,
    InvalidInputError,
    InvalidParameterError,
    NumericalConsistencyError,
    RegularityFailure,
    ResourceError,
)
from .group import GroupFunction, GroupSpec, cyclic
from .norms import dual_function, gowers_norm
from .regularity import RegularityOptions, regularize
from .signals import TorusFunctionSpec, gen_indicator, gen_polynomial_phase, gen_random, gen_torus_sequence
from .spectral import a2_norm, u2_dual_norm_spectral, u2_norm_spectral
from .structured import StructuredOptions, structured_decompose, verify_main
from .suite import FAULTS, LEVELS, verify_suite

__all__ = ["main", "build_parser", "dumps"]


class CheckFailed(Exception):
    """A verification ran and reported a failure (exit status 1)."""

    def __init__(self, payload):
        super().__init__("verification failed")
        self.payload = payload


# -- serialisation -----------------------------------------------------------------

def _plain(obj):
    """JSON-ready copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, complex):
        return [_plain(obj.real), _plain(obj.imag)]
    return obj


def dumps(obj) -> str:
    """Deterministic JSON; floats use Python's shortest round-trip repr."""
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _emit(payload, args):
    text = dumps(payload)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    Path(path).write_text(buf.getvalue())


# -- inputs ------------------------------------------------------------------------

def _load_json(path):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path} is not valid JSON: {exc}") from exc


def _group(args, size=None) -> GroupSpec | None:
    if getattr(args, "group", None):
        return GroupSpec.parse(args.group)
    return cyclic(size) if size is not None else None


def _function(args) -> GroupFunction:
    """``--input`` holding ``{"orders", "values"}`` or a bare list of values."""
    if not args.input:
        raise InvalidInputError("--input is required")
    if str(args.input).endswith(".csv"):
        try:
            text = Path(args.input).read_text()
        except OSError as exc:
            raise InvalidInputError(f"cannot read {args.input}: {exc}") from exc
        return GroupFunction.from_csv(text, _group(args))
    data = _load_json(args.input)
    if isinstance(data, dict):
        f = GroupFunction.from_dict(data)
        if getattr(args, "group", None) and GroupSpec.parse(args.group) != f.group:
            raise InvalidInputError("--group does not match the group stored in the input")
        return f
    if isinstance(data, list):
        vals = np.asarray(data, dtype=float)
        return GroupFunction(_group(args, len(vals)), vals)
    raise InvalidInputError("input must be a JSON object or list")


def _cube_function(args) -> CubeFunction:
    """``--input`` holding a CubeFunction or a DecomposableFunction (``terms``)."""
    data = _load_json(args.input)
    if not isinstance(data, dict):
        raise InvalidInputError("input must be a JSON object")
    if "terms" in data:
        return DecomposableFunction.from_dict(data).materialize()
    return CubeFunction.from_dict(data)


def _family(args):
    """``{"orders", "rows"}`` with rows in vertex-code order ``1 .. 2^(d+1) - 1``."""
    data = _load_json(args.input)
    try:
        if isinstance(data, dict):
            group = GroupSpec(tuple(data["orders"]))
            rows = data["rows"]
        else:
            rows = data
            group = _group(args, len(rows[0]))
        fs = [GroupFunction(group, np.asarray(r, dtype=float)) for r in rows]
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise InvalidInputError(f"not a function family: {exc}") from exc
    if args.d is not None and len(fs) != 2 ** (args.d + 1) - 1:
        raise InvalidInputError(f"--d {args.d} needs {2 ** (args.d + 1) - 1} rows, got {len(fs)}")
    return fs


def _ints(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"expected comma-separated integers, got {text!r}") from exc


def _floats(text):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from exc


# -- commands ----------------------------------------------------------------------

def cmd_norm(args):
    f = _function(args)
    return {"d": args.d, "method": args.method, "value": gowers_norm(f, args.d, method=args.method)}


def cmd_dual_fn(args):
    D = dual_function(_function(args), args.d)
    if args.csv:
        _write_csv(args.csv, ["index", "value"], enumerate(D.values.tolist()))
    return {"d": args.d, "function": D.to_dict()}


def cmd_dual_norm(args):
    opts = DualNormOptions(restarts=args.restarts, tol=args.tol_dual, seed=args.seed)
    return dual_norm(_function(args), args.d, opts).to_dict()


def _thk_payload(res, args):
    if args.csv:
        _write_csv(args.csv, ["index", "f", "h"], zip(range(len(res.f.values)), res.f.values.tolist(),
                                                      res.h.values.tolist()))
    return res.to_dict()


def cmd_decompose_thk(args):
    return _thk_payload(thk_decompose(_function(args), args.d, args.k, args.delta, tol=args.tol_dual), args)


def cmd_decompose_borne(args):
    return _thk_payload(thborne_decompose(_function(args), args.d, args.delta, k_max=args.k_max), args)


def cmd_a2(args):
    f = _function(args)
    dec = character_decomposition(f)
    out = {"value": a2_norm(f), "certificate_value": dec.value, "terms": len(dec)}
    if args.certificate:
        out["certificate"] = dec.to_dict()
    return out


def cmd_u2(args):
    f = _function(args)
    return {"value": u2_norm_spectral(f), "direct": gowers_norm(f, 2)}


def cmd_u2_dual(args):
    return {"value": u2_dual_norm_spectral(_function(args))}


def _regularity_options(args):
    return RegularityOptions(budget=args.budget, seed=args.seed, cell_cap=args.cell_cap)


def cmd_regularize(args):
    F = _cube_function(args)
    res = regularize(F, args.delta, _regularity_options(args))
    if args.csv:
        keys = ["round", "cells", "defect", "energy", "accepted", "energy_refined", "increment"]
        _write_csv(args.csv, keys, ([h.get(k, "") for k in keys] for h in res.history))
    out = res.to_dict()
    out["rounds"] = res.rounds
    return out


def cmd_main_decompose(args):
    fs = _family(args)
    opts = StructuredOptions(_regularity_options(args), tol=args.tol_verify)
    try:
        M = structured_decompose(fs, args.delta, opts)
    except NumericalConsistencyError as exc:
        raise CheckFailed({"ok": False, "error": str(exc)}) from exc
    report = verify_main(M, fs, args.delta, tol=args.tol_verify)
    out = {"decomposition": M.to_dict(), "verification": report, "ok": report["ok"]}
    if not report["ok"]:
        raise CheckFailed(out)
    return out


def cmd_gen(args):
    kind = args.kind
    if kind == "indicator":
        group = _group(args, 8)
        subset = [int(z) for z in _ints(args.subset or "")]
        return gen_indicator(group, subset).to_dict()
    if kind == "poly":
        return gen_polynomial_phase(_group(args, 8), _ints(args.coeffs or "0")).to_dict()
    if kind == "torus":
        try:
            alpha = Fraction(args.alpha) if "/" in args.alpha else float(args.alpha)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"cannot parse alpha {args.alpha!r}") from exc
        spec = TorusFunctionSpec(cos=tuple(_floats(args.cos or "0")), sin=tuple(_floats(args.sin or "")))
        h, bound = gen_torus_sequence(spec, alpha, args.n)
        return {"function": h.to_dict(), "l1_bound": bound, "spec": spec.to_dict(),
                "u2_dual": u2_dual_norm_spectral(h)}
    return gen_random(_group(args, 8), args.seed, args.bound, args.smoothness).to_dict()


def cmd_verify_suite(args):
    only = set(args.only.split(",")) if args.only else None
    report = verify_suite(args.level, args.seed, args.threads, args.inject_fault or (), only)
    if not report["ok"]:
        raise CheckFailed(report)
    return report


# -- parser ------------------------------------------------------------------------

def _common(p, d=True, d_default=2):
    p.add_argument("--group", help='group orders, e.g. "8" or "2,2,3"')
    p.add_argument("--input", help="JSON file ({\"orders\", \"values\"} or a list), CSV, or - for stdin")
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    if d:
        p.add_argument("--d", type=int, default=d_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gowers", description="Uniformity norms, dual norms and decompositions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="Gowers norm ||f||_U(d)")
    _common(p)
    p.add_argument("--method", choices=["closed_formula", "inductive"], default="closed_formula")
    p.set_defaults(run=cmd_norm)

    p = sub.add_parser("dual-fn", help="dual function D_d f")
    _common(p)
    p.add_argument("--csv")
    p.set_defaults(run=cmd_dual_fn)

    p = sub.add_parser("dual-norm", help="dual norm ||g||_U(d)^* by ascent")
    _common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--tol-dual", type=float, default=1e-9)
    p.set_defaults(run=cmd_dual_norm)

    p = sub.add_parser("decompose-thk", help="g = D_d f + h with L^p bounds on f and h")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--tol-dual", type=float, default=1e-12)
    p.add_argument("--csv")
    p.set_defaults(run=cmd_decompose_thk)

    p = sub.add_parser("decompose-borne", help="g = D_d f + h with sup(f) <= 1/delta, ||h||_1 <= delta")
    _common(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--k-max", type=int, default=16)
    p.add_argument("--csv")
    p.set_defaults(run=cmd_decompose_borne)

    p = sub.add_parser("a2", help="A(2) norm and its character certificate")
    _common(p, d=False)
    p.add_argument("--certificate", action="store_true", help="include the certificate terms")
    p.set_defaults(run=cmd_a2)

    p = sub.add_parser("u2", help="U(2) norm from the spectrum")
    _common(p, d=False)
    p.set_defaults(run=cmd_u2)

    p = sub.add_parser("u2-dual", help="U(2) dual norm from the spectrum")
    _common(p, d=False)
    p.set_defaults(run=cmd_u2_dual)

    def regularity_flags(p):
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--budget", type=int, default=10_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--cell-cap", type=int)

    p = sub.add_parser("regularize", help="almost uniform partition regular to within delta")
    _common(p, d=False)
    regularity_flags(p)
    p.add_argument("--csv", help="export the round history")
    p.set_defaults(run=cmd_regularize)

    p = sub.add_parser("main-decompose", help="structured decomposition of a cubic convolution")
    _common(p, d_default=None)
    regularity_flags(p)
    p.add_argument("--tol-verify", type=float, default=1e-8)
    p.set_defaults(run=cmd_main_decompose)

    p = sub.add_parser("gen", help="generate a test function")
    p.add_argument("kind", choices=["indicator", "poly", "torus", "random"])
    p.add_argument("--group")
    p.add_argument("--out")
    p.add_argument("--subset", help="indices for indicator")
    p.add_argument("--coeffs", help="polynomial coefficients a_0,a_1,...")
    p.add_argument("--alpha", default="0", help="rotation, e.g. 1/12 or 0.7071")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--cos", help="cosine coefficients a_0,a_1,...")
    p.add_argument("--sin", help="sine coefficients b_0,b_1,...")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=float, default=1.0)
    p.add_argument("--smoothness", type=int)
    p.set_defaults(run=cmd_gen)

    p = sub.add_parser("verify-suite", help="run the randomised invariant suite")
    p.add_argument("--level", choices=LEVELS, default="quick")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--inject-fault", action="append", choices=FAULTS)
    p.add_argument("--only", help="comma-separated entry names")
    p.add_argument("--out")
    p.set_defaults(run=cmd_verify_suite)
    return parser


_INPUT_ERRORS = (InvalidInputError, InvalidParameterError, DimensionError, ResourceError)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        _emit(args.run(args), args)
        return 0
    except CheckFailed as exc:
        _emit(exc.payload, args)
        return 1
    except (RegularityFailure, NumericalConsistencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
