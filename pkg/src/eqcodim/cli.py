"""Command line front end.

Exit codes: 0 success, 1 verification or tolerance failure, 2 input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

import numpy as np

from . import __version__
from .algebra import DecompositionDescriptor, decomposition_descriptor
from .codim import catalog
from .genericity import monte_carlo, predicate_for
from .linalg import ToleranceConfig, ToleranceError
from .serialize import dumps, matrix_from_json, matrix_to_json, rep_from_json
from .split import block_split
from .strata import (
    ambient_real_dim,
    classify,
    closed_form_codim,
    enumerate_strata,
    sample_stratum,
    stratum_dimension,
    top_label,
)

EXIT_OK, EXIT_VERIFY, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _parse_tol(items: Optional[List[str]]) -> ToleranceConfig:
    kw = {}
    for item in items or []:
        for part in item.split(","):
            if "=" not in part:
                raise InputError(f"--tol expects name=value, got {part!r}")
            name, value = part.split("=", 1)
            if name not in ("rank_tol", "cluster_tol", "residual_tol", "defect_tol"):
                raise InputError(f"unknown tolerance {name!r}")
            try:
                kw[name] = float(value)
            except ValueError:
                raise InputError(f"bad value for {name}: {value!r}")
    try:
        return ToleranceConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc))


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}")


def _csv(rows: List[dict], columns: List[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r[c] for c in columns})
    return buf.getvalue()


def _needs_json(args, what: str):
    if args.format != "json":
        raise InputError(f"{what} output is only available as json")


# ---------------------------------------------------------------------------
# Subcommands: each returns (text, exit code)
# ---------------------------------------------------------------------------

def cmd_decompose(args, tol):
    _needs_json(args, "decompose")
    try:
        rep = rep_from_json(_load_json(args.rep))
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(str(exc))
    desc = decomposition_descriptor(rep, tol, seed=args.seed if args.seed is not None else 0)
    return dumps(desc.to_dict()), EXIT_OK


def cmd_codim(args, tol):
    try:
        W = DecompositionDescriptor.from_dict(_load_json(args.descriptor))
    except (ValueError, TypeError, KeyError, AttributeError) as exc:
        raise InputError(f"bad descriptor: {exc}")
    if args.k < 0:
        raise InputError("--k must be >= 0")
    steady, hopf = catalog(W, args.k, args.cutoff)
    if args.format == "csv":
        rows = [{"list": name, "descriptor": json.dumps(e.U.to_dict(), sort_keys=True), "K": e.K,
                 "C": e.C, "interpretation": e.interpretation}
                for name, lst in (("steady", steady), ("hopf", hopf)) for e in lst]
        return _csv(rows, ["list", "descriptor", "K", "C", "interpretation"]), EXIT_OK
    return dumps({"k": args.k, "ambient": W.to_dict(),
                  "steady": [e.to_dict() for e in steady],
                  "hopf": [e.to_dict() for e in hopf]}), EXIT_OK


def cmd_strata(args, tol):
    if args.n < 1:
        raise InputError("--n must be >= 1")
    ambient = ambient_real_dim(args.field, args.n)
    top = top_label(args.field, args.n, args.kind)
    rows, ok = [], True
    for lab in enumerate_strata(args.field, args.n, args.kind):
        sample = sample_stratum(lab, args.seed if args.seed is not None else 0, tol)
        measured, closed = stratum_dimension(lab, sample, tol)
        rows.append({"label": str(lab), "label_json": lab.to_dict(), "closed_form_dim": closed,
                     "measured_dim": measured, "ambient_dim": ambient,
                     "codim": ambient - measured, "top": lab == top})
        if closed is not None and closed != measured:
            ok = False
    top_codim = next(r["codim"] for r in rows if r["top"])
    if top_codim != closed_form_codim(args.field, args.n, args.kind):
        ok = False
    if any(r["codim"] <= top_codim for r in rows if not r["top"]):
        ok = False
    code = EXIT_VERIFY if args.verify and not ok else EXIT_OK
    if args.format == "csv":
        for r in rows:
            r["closed_form_dim"] = "" if r["closed_form_dim"] is None else r["closed_form_dim"]
        cols = ["label", "closed_form_dim", "measured_dim", "ambient_dim", "codim", "top"]
        return _csv(rows, cols), code
    for r in rows:
        r["label"] = r.pop("label_json")
    return dumps({"field": args.field, "n": args.n, "kind": args.kind, "verified": ok,
                  "rows": rows}), code


def _load_matrix(path):
    try:
        return matrix_from_json(_load_json(path))
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc))


def cmd_classify(args, tol):
    _needs_json(args, "classify")
    M = _load_matrix(args.matrix)
    try:
        lab = classify(M, args.field, tol, kind=args.kind)
    except ValueError as exc:
        if isinstance(exc, ToleranceError):
            raise
        raise InputError(str(exc))
    return dumps({"label": None if lab is None else lab.to_dict()}), EXIT_OK


def cmd_split(args, tol):
    _needs_json(args, "split")
    M = _load_matrix(args.matrix)
    if M.shape[0] != M.shape[1]:
        raise InputError("matrix must be square")
    sp = block_split(M, args.set, tol)
    return dumps({"set": args.set, "M": matrix_to_json(sp.M), "B1": matrix_to_json(sp.B1),
                  "B2": matrix_to_json(sp.B2), "residual": sp.residual}), EXIT_OK


def cmd_mc(args, tol):
    if args.seed is None:
        raise InputError("mc needs --seed")
    if args.n < 1 or args.k < 0 or args.trials < 1 or args.degree < 0:
        raise InputError("need n >= 1, k >= 0, trials >= 1, degree >= 0")
    try:
        pred = predicate_for(args.field, args.n, args.kind, args.dim)
    except ValueError as exc:
        raise InputError(str(exc))
    target = args.codim_target
    if target is None:
        if args.dim is not None:
            raise InputError("--codim-target is required together with --dim")
        target = closed_form_codim(args.field, args.n, args.kind)
    frac, reports = monte_carlo(args.field, args.n, pred, args.k, args.trials, args.seed,
                                degree=args.degree)
    expected = "avoid" if args.k < target else "hit"
    ok = frac == 0 if expected == "avoid" else True
    code = EXIT_OK if ok else EXIT_VERIFY
    if args.format == "csv":
        rows = [{"trial": r.trial, "seed": r.seed, "verdict": r.verdict,
                 "distance": "%.12e" % r.events[0][1] if r.events else ""} for r in reports]
        return _csv(rows, ["trial", "seed", "verdict", "distance"]), code
    return dumps({"field": args.field, "n": args.n, "kind": args.kind, "k": args.k,
                  "degree": args.degree, "codim_target": target, "expected": expected,
                  "trials": args.trials, "seed": args.seed, "hit_fraction": frac,
                  "predicate": pred.describe(),
                  "reports": [r.to_dict() for r in reports]}), code


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", action="append", metavar="NAME=VALUE",
                        help="tolerance override, e.g. rank_tol=1e-10 (repeatable)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="eqcodim", parents=[common],
                                description="Codimensions and strata of equivariant linearizations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decompose", parents=[common], help="decompose a representation")
    s.add_argument("rep")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("codim", parents=[common], help="K_U / C_U catalog")
    s.add_argument("descriptor")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--cutoff", type=int, default=None)
    s.set_defaults(func=cmd_codim)

    s = sub.add_parser("strata", parents=[common], help="stratum atlas")
    s.add_argument("--field", choices=("R", "C", "H"), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kind", choices=("nilpotent", "center"), required=True)
    s.add_argument("--verify", action="store_true")
    s.set_defaults(func=cmd_strata)

    s = sub.add_parser("classify", parents=[common], help="stratum of a matrix")
    s.add_argument("matrix")
    s.add_argument("--field", choices=("R", "C", "H"), required=True)
    s.add_argument("--kind", choices=("nilpotent", "center"), default=None)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("split", parents=[common], help="spectral block split")
    s.add_argument("matrix")
    s.add_argument("--set", choices=("zero", "imag"), default="zero")
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("mc", parents=[common], help="Monte Carlo transversality")
    s.add_argument("--field", choices=("R", "C", "H"), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--kind", choices=("nilpotent", "center"), required=True)
    s.add_argument("--codim-target", type=int, default=None)
    s.add_argument("--dim", type=int, default=None,
                   help="spectral dimension d of the condition (default: full)")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--degree", type=int, default=3)
    s.set_defaults(func=cmd_mc)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = _parse_tol(args.tol)
        text, code = args.func(args, tol)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ToleranceError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
