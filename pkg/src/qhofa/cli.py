"""Command-line interface: ``qhofa <command> [options]``.

Exit codes: 0 ok, 1 domain/input error, 2 infeasible request (enumeration cap,
unsupported size).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import convolution, gowers, hierarchy, uniformity
from .errors import CapabilityError, EnumerationTooLarge, QhofaError
from .gates import (
    GATE_NAMES,
    GateSpec,
    build,
    ccz_function,
    diagonal_from_function,
    function_from_json,
    gate_from_json,
    gate_to_json,
    named_gate,
)
from .phase_space import QuditParams, set_enumeration_cap
from .weyl import weyl

EXIT_OK, EXIT_DOMAIN, EXIT_INFEASIBLE = 0, 1, 2


def parse_k(text: str) -> list[int]:
    """``"3"`` -> [3]; ``"1..4"`` -> [1, 2, 3, 4]."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad k {text!r}; use an integer or a range like 1..4") from None
    if not ks or min(ks) < 1:
        raise argparse.ArgumentTypeError(f"k must be >= 1, got {text!r}")
    return ks


def _add_gate_args(p: argparse.ArgumentParser, func: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gate", choices=[g for g in GATE_NAMES if g not in ("diagonal", "custom")])
    src.add_argument("--gate-file", help='JSON {"d", "n", "matrix": [[[re, im], ...], ...]}')
    if func:
        src.add_argument("--func", help='JSON {"d", "n", "values": [[re, im], ...]} (diagonal operator)')
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--point", help="phase point for --gate weyl, comma separated p1,q1,...")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", help="write to this file instead of stdout")
    p.add_argument("--enum-cap", type=float, help="override the enumeration cap (also QHOFA_ENUM_CAP)")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qhofa", description="Quantum higher-order Fourier analysis toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="quantum uniformity measures ||B||_{Q^k}")
    _add_gate_args(p)
    p.add_argument("--k", type=parse_k, default=[2])
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("classify", help="Clifford-hierarchy level")
    _add_gate_args(p)
    p.add_argument("--max-k", type=int, default=3)
    p.add_argument("--method", choices=("analytic", "algebraic", "both"), default="both")
    _add_common(p)

    p = sub.add_parser("gowers", help="classical Gowers norms ||f||_{U^k}")
    p.add_argument("--func", required=True, help='JSON {"d", "n", "values": [[re, im], ...]}')
    p.add_argument("--k", type=parse_k, default=[2])
    _add_common(p)

    p = sub.add_parser("test-hierarchy", help="acceptance probability of the convolution/swap test")
    _add_gate_args(p, func=False)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--samples", type=int, default=0, help="Bernoulli swap-test draws (0 = exact only)")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("convolve", help="Hadamard (or three-input qubit) convolution of states/operators")
    p.add_argument("--a", required=True, help="operator JSON (gate schema)")
    p.add_argument("--b", required=True)
    p.add_argument("--c", help="third input: selects the three-input qubit convolution")
    _add_common(p)

    p = sub.add_parser("reproduce-paper", help="recompute the gate-example table and diff against expected values")
    p.add_argument("--tol", type=float, default=1e-9)
    _add_common(p)
    return ap


def resolve_operator(args):
    if getattr(args, "gate_file", None):
        return args.gate_file, gate_from_json(args.gate_file)
    if getattr(args, "func", None):
        params, values = function_from_json(args.func)
        return args.func, diagonal_from_function(values, params)
    name = args.gate
    n = args.n if args.n is not None else {"cnot": 2, "ccz": 3}.get(name, 1)
    spec_args = {}
    if name == "weyl":
        if not args.point:
            raise QhofaError("--gate weyl needs --point p1,q1,...")
        spec_args["point"] = [int(c) for c in args.point.split(",")]
    return name, build(GateSpec(name, QuditParams(args.d, n), spec_args))


def _cmd_measure(args) -> dict:
    label, B = resolve_operator(args)
    rows = []
    for k in args.k:
        method = "exact" if args.method == "exact" else "monte-carlo"
        est = uniformity.q_measure(B, k, method, args.samples, args.seed, args.threads)
        rows.append(est.as_dict())
    return {"gate": label, "d": B.d, "n": B.n, "results": rows}


def _cmd_classify(args) -> dict:
    label, U = resolve_operator(args)
    res = hierarchy.classify(U, args.max_k, args.method, threads=args.threads)
    return {"gate": label, "d": U.d, "n": U.n, **res}


def _cmd_gowers(args) -> dict:
    params, values = function_from_json(args.func)
    rows = []
    for k in args.k:
        raw = gowers.gowers_raw(values, k)
        rows.append({"k": k, "value": max(raw, 0.0) ** (1.0 / 2**k), "raw_power": raw})
    return {"func": args.func, "d": params.d, "n": params.n, "results": rows}


def _cmd_test_hierarchy(args) -> dict:
    label, U = resolve_operator(args)
    mode = "simulated" if args.samples > 0 else "closed-form"
    res = convolution.testing_probability(U, args.k, mode, args.samples, args.seed, gate=label)
    return res.as_dict()


def _cmd_convolve(args) -> dict:
    a, b = gate_from_json(args.a), gate_from_json(args.b)
    if args.c:
        out = convolution.triple_convolve(a, b, gate_from_json(args.c))
        kind, note = "triple", None
    elif a.d == 2:
        out = convolution.hadamard_convolve(a, b, strict=False)
        kind, note = "hadamard", "d=2: literal basis map, not unitary"
    else:
        out = convolution.hadamard_convolve(a, b)
        kind, note = "hadamard", None
    doc = gate_to_json(out)
    doc.update({"kind": kind, "trace": [float(np.trace(out.matrix).real), float(np.trace(out.matrix).imag)]})
    if note:
        doc["note"] = note
    return doc


def reference_table() -> list[dict]:
    """Recompute every closed-form gate example with exact enumeration."""
    rows = []

    def add(gate, d, n, k, got, expected):
        rows.append({"gate": gate, "d": d, "n": n, "k": k, "value": got, "expected": expected})

    for d, n in [(2, 1), (3, 1)]:
        P = QuditParams(d, n)
        for b in [(1, 0) * n, (0, 1) * n, (1, 1) * n]:
            W = weyl(P, b)
            for k in (1, 2, 3, 4):
                add(f"weyl{b}", d, n, k, uniformity.q_measure_exact(W, k).value, 0.0 if k == 1 else 1.0)
    for d, n in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)]:
        F = named_gate("fourier", d, n)
        q1 = 0.0 if d == 2 else d**-n
        q2 = 2 ** (-n / 4) if d == 2 else d ** (-n / 2)
        for k, e in zip((1, 2, 3, 4), (q1, q2, 1.0, 1.0)):
            add("fourier", d, n, k, uniformity.q_measure_exact(F, k).value, e)
    for d in (2, 3):
        C = named_gate("cnot", d)
        for k, e in zip((1, 2, 3, 4), (1 / d, d**-0.5, 1.0, 1.0)):
            add("cnot", d, 2, k, uniformity.q_measure_exact(C, k).value, e)
    T = named_gate("t")
    for k, e in zip((1, 2, 3, 4), (math.sqrt(2 + math.sqrt(2)) / 2, 0.75**0.25, 0.75**0.125, 1.0)):
        add("t", 2, 1, k, uniformity.q_measure_exact(T, k).value, e)
    C = named_gate("ccz", 2)
    for k, e in zip((1, 2, 3, 4), (0.75, (11 / 32) ** 0.25, (11 / 32) ** 0.125, 1.0)):
        add("ccz", 2, 3, k, uniformity.q_measure_exact(C, k).value, e)
    for d in (3, 5):
        f = uniformity.ccz_formulas(d)
        C = named_gate("ccz", d)
        add("ccz", d, 3, 1, uniformity.q_measure_exact(C, 1).value, float(f["q1"]))
        # d = 5 is out of reach for dense enumeration; CCZ is diagonal, so Q^k is the Gowers norm
        q2 = gowers.gowers_norm(ccz_function(d), 2) if d == 5 else uniformity.q_measure_exact(C, 2).value
        q3 = gowers.gowers_norm(ccz_function(d), 3) if d == 5 else uniformity.q_measure_exact(C, 3).value
        add("ccz", d, 3, 2, q2, float(f["q2_pow4"]) ** 0.25)
        add("ccz", d, 3, 3, q3, float(f["q3_pow8_main"]) ** 0.125)
    return rows


def _cmd_reproduce(args) -> dict:
    rows = reference_table()
    for r in rows:
        r["diff"] = abs(r["value"] - r["expected"])
        r["ok"] = r["diff"] <= args.tol
    return {"rows": rows, "all_ok": all(r["ok"] for r in rows)}


COMMANDS = {
    "measure": _cmd_measure,
    "classify": _cmd_classify,
    "gowers": _cmd_gowers,
    "test-hierarchy": _cmd_test_hierarchy,
    "convolve": _cmd_convolve,
    "reproduce-paper": _cmd_reproduce,
}


def _flatten(doc: dict) -> list[dict]:
    for key in ("results", "rows"):
        if key in doc:
            head = {k: v for k, v in doc.items() if not isinstance(v, (list, dict))}
            return [{**head, **row} for row in doc[key]]
    return [{k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in doc.items()}]


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    rows = _flatten(doc)
    fields = list(dict.fromkeys(k for r in rows for k in r))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.enum_cap is not None:
        set_enumeration_cap(int(args.enum_cap))
    try:
        doc = COMMANDS[args.command](args)
    except (EnumerationTooLarge, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (QhofaError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    finally:
        set_enumeration_cap(None)
    text = render(doc, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "reproduce-paper" and not doc["all_ok"]:
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
