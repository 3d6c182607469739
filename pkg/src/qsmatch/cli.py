"""qsmatch command line: match, qsim, grover, depth-scan, selftest.

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from . import __version__, kernels
from .bitparallel import brute_force_exact, brute_force_kmismatch, shift_add_search, shift_and_search
from .checks import DEFAULT_SEED as SELFTEST_SEED
from .checks import SCAN_EXPONENTS, SCAN_M, selftest
from .circuits import (
    DEFAULT_BUDGET_QUBITS,
    depth_report,
    occurrence_positions_from_trace,
    run_qsadd,
    run_qsand,
)
from .errors import DomainError, QsmatchError, ResourceLimitError
from .grover import DEFAULT_SEED, depth_scan, procedure_a, procedure_b, verify_position
from .qcore.depth import DEFAULT_MODEL, DepthModel
from .qcore.gatelist import dumps as dump_gate_list
from .textio import Alphabet, encode_inputs, read_source

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_RESOURCE = 0, 2, 3, 4
SCHEMA_ID = "qsmatch-report/1"
DEPTH_SCAN_HEADER = ["n", "K", "qsand_full_depth", "proc_a_depth", "proc_b_depth"]


class VerificationFailure(QsmatchError):
    pass


# ----------------------------------------------------------------------------
# helpers


def _alphabet(spec: str) -> Alphabet:
    if spec.startswith("map:"):
        return Alphabet.explicit(spec[4:].encode("utf-8"))
    return Alphabet(spec)


def _inputs(args):
    data = read_source(args.text, args.text_file)
    if args.pattern is None:
        raise DomainError("--pattern is required")
    return encode_inputs(data, args.pattern, _alphabet(args.alphabet))


def _model(args) -> DepthModel:
    return DepthModel.from_file(args.depth_model) if args.depth_model else DEFAULT_MODEL


def _config(args) -> dict:
    keys = ("text", "text_file", "pattern", "k", "K", "seed", "alphabet", "procedure", "depth_model",
            "budget_qubits", "verify", "m", "sigma", "n_min_exp", "n_max_exp")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _report(args, command: str, results: dict, model: DepthModel | None = None) -> dict:
    rep = {"schema": SCHEMA_ID, "version": __version__, "command": command,
           "config": _config(args), "results": results}
    if model is not None:
        rep["cost_model"] = model.to_dict()
    return rep


def _emit(args, report: dict, human_lines: list[str], csv_rows: list[list] | None = None) -> None:
    out = sys.stdout
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - args._t0, 6)}
    if args.format == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    elif args.format == "csv":
        if csv_rows is None:
            raise DomainError(f"{report['command']} has no CSV form")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(csv_rows)
        out.write(buf.getvalue())
    else:
        out.write("\n".join(human_lines) + "\n")


def _occurrences(occ) -> list[dict]:
    return [{"start": o.start, "mismatches": o.mismatches} for o in occ]


# ----------------------------------------------------------------------------
# subcommands


def cmd_match(args) -> int:
    text, pattern, _ = _inputs(args)
    k = args.k or 0
    if k:
        occ = shift_add_search(text, pattern, k)
    else:
        occ = shift_and_search(text, pattern)
    results = {"n": text.n, "m": pattern.m, "sigma": text.sigma, "k": k,
               "count": len(occ), "occurrences": _occurrences(occ)}
    verified = None
    if args.verify:
        oracle = brute_force_kmismatch(text, pattern, k) if k else brute_force_exact(text, pattern)
        verified = oracle == occ
        results["verified"] = verified
    human = [f"{len(occ)} occurrence(s) of a length-{pattern.m} pattern in {text.n} symbols (k={k})"]
    human += [f"  start {o.start}" + (f"  mismatches {o.mismatches}" if k else "") for o in occ]
    if verified is not None:
        human.append(f"verified against brute force: {'yes' if verified else 'NO'}")
    rows = [["start", "mismatches"]] + [[o.start, o.mismatches] for o in occ]
    _emit(args, _report(args, "match", results), human, rows)
    if verified is False:
        raise VerificationFailure("bit-parallel result differs from brute force")
    return EXIT_OK


def cmd_qsim(args) -> int:
    text, pattern, _ = _inputs(args)
    k = args.k or 0
    budget = args.budget_qubits
    model = _model(args)
    if k:
        trace = run_qsadd(text, pattern, k, budget_qubits=budget)
        expected = [o.start for o in brute_force_kmismatch(text, pattern, k)]
        engine = "qsadd"
    else:
        trace = run_qsand(text, pattern, budget_qubits=budget)
        expected = [o.start for o in brute_force_exact(text, pattern)]
        engine = "qsand"
    positions = occurrence_positions_from_trace(trace)
    flags = [int(s in positions) for s in range(text.n - pattern.m + 1)]
    depth = depth_report(trace.circuit, model)
    if args.dump_circuit:
        Path(args.dump_circuit).write_text(dump_gate_list(trace.circuit))
    results = {
        "engine": engine, "n": text.n, "m": pattern.m, "sigma": text.sigma, "k": k,
        "r": trace.r, "positions": positions, "flags": flags,
        "uncompute_clean": all(trace.boundary_clean),
        "iterations": text.n, "qubits": trace.circuit.num_qubits, "depth": depth,
    }
    verified = None
    if args.verify:
        verified = positions == expected and trace.r == int(bool(expected)) and all(trace.boundary_clean)
        results["verified"] = verified
    human = [
        f"{engine}: r = {trace.r}, positions {positions}",
        f"qubits {trace.circuit.num_qubits}, gates {depth['gates']}, depth {depth['total']} layers",
        "depth breakdown: " + ", ".join(f"{t} {v}" for t, v in sorted(depth["breakdown"].items())),
        f"|c> and |b> clean at every iteration boundary: {'yes' if all(trace.boundary_clean) else 'NO'}",
    ]
    if verified is not None:
        human.append(f"verified against brute force: {'yes' if verified else 'NO'}")
    rows = [["start", "flag"]] + [[s, f] for s, f in enumerate(flags)]
    _emit(args, _report(args, "qsim", results, model), human, rows)
    if verified is False:
        raise VerificationFailure("circuit result differs from brute force")
    return EXIT_OK


def cmd_grover(args) -> int:
    text, pattern, _ = _inputs(args)
    model = _model(args)
    k = args.k or None
    if args.procedure == "a":
        rep = procedure_a(text, pattern, seed=args.seed, k=k, model=model)
    else:
        rep = procedure_b(text, pattern, K=args.K, seed=args.seed, k=k, model=model)
    results = {"procedure": args.procedure, "n": text.n, "m": pattern.m, "sigma": text.sigma, **rep.to_dict()}
    verified = None
    if args.verify and rep.found:
        verified = verify_position(text, pattern, rep.position, k)
        results["brute_force_confirms"] = verified
    verdict = f"found at {rep.position}" if rep.found else "pattern not found"
    human = [
        f"procedure {args.procedure.upper()}: {verdict}",
        f"domain {rep.N}, solutions {rep.r}, iterations {rep.iterations}, measurements {rep.attempts}",
        f"success probability {rep.success_probability:.6f} (closed form {rep.closed_form:.6f})",
        f"depth total {rep.depth['total']} layers",
    ]
    _emit(args, _report(args, "grover", results, model), human)
    if verified is False:
        raise VerificationFailure("reported position is not an occurrence")
    return EXIT_OK


def cmd_depth_scan(args) -> int:
    model = _model(args)
    m = args.m if args.m is not None else (len(args.pattern.encode("utf-8")) if args.pattern else SCAN_M)
    ns = [1 << e for e in range(args.n_min_exp, args.n_max_exp + 1)]
    if len(ns) < 2:
        raise DomainError("depth-scan needs at least two n values")
    if (1 << args.n_min_exp) < m:
        raise DomainError("smallest n is shorter than the pattern")
    rows, slopes = depth_scan(ns, m, args.K, model, args.sigma)
    table = [[r.n, r.K, r.qsand_full, r.proc_a, r.proc_b] for r in rows]
    results = {"m": m, "sigma": args.sigma, "rows": [dict(zip(DEPTH_SCAN_HEADER, row)) for row in table],
               "slopes": slopes}
    csv_rows = [DEPTH_SCAN_HEADER] + table + [["#slope", k, f"{v:.6f}"] for k, v in slopes.items()]
    human = [" ".join(f"{h:>16}" for h in DEPTH_SCAN_HEADER)]
    human += [" ".join(f"{v:>16}" for v in row) for row in table]
    human += [f"log-log slope {k}: {v:.4f}" for k, v in slopes.items()]
    _emit(args, _report(args, "depth-scan", results, model), human, csv_rows)
    return EXIT_OK


def cmd_selftest(args) -> int:
    results = selftest(seed=args.seed if args.seed is not None else SELFTEST_SEED, fault=args.inject_fault,
                       quick=args.quick)
    report = _report(args, "selftest", {
        "checks": [{"criterion": r.criterion, "name": r.name, "passed": r.passed, "detail": r.detail}
                   for r in results],
        "passed": all(r.passed for r in results),
    })
    rows = [["criterion", "name", "passed"]] + [[r.criterion, r.name, r.passed] for r in results]
    _emit(args, report, [r.line() for r in results], rows)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise VerificationFailure("self-test failed: " + "; ".join(failed))
    return EXIT_OK


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "human"], default=None,
                        help="output format (default human; csv for depth-scan)")
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--depth-model", help="JSON file overriding depth-model parameters")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")
    common.add_argument("--backend", choices=sorted(kernels.BACKENDS), help="kernel backend")

    inputs = argparse.ArgumentParser(add_help=False)
    src = inputs.add_mutually_exclusive_group(required=True)
    src.add_argument("--text", help="inline text")
    src.add_argument("--text-file", help="read text bytes from a file")
    inputs.add_argument("--pattern", required=True)
    inputs.add_argument("--alphabet", default="observed",
                        help="observed (default), raw (256 byte codes) or map:<symbols>")
    inputs.add_argument("--k", type=int, default=None, help="allowed mismatches (Shift-Add / QSAdd)")
    inputs.add_argument("--verify", action="store_true", help="cross-check against brute force")

    p = argparse.ArgumentParser(prog="qsmatch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"qsmatch {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("match", parents=[common, inputs], help="classical bit-parallel search")
    sp.set_defaults(func=cmd_match)

    sp = sub.add_parser("qsim", parents=[common, inputs], help="run QSAnd/QSAdd on the basis simulator")
    sp.add_argument("--budget-qubits", type=int, default=DEFAULT_BUDGET_QUBITS)
    sp.add_argument("--dump-circuit", help="write the circuit as a gate list")
    sp.set_defaults(func=cmd_qsim)

    sp = sub.add_parser("grover", parents=[common, inputs], help="Procedure A or B")
    sp.add_argument("--procedure", choices=["a", "b"], default="b")
    sp.add_argument("--K", type=int, default=None, help="block size for procedure B")
    sp.set_defaults(func=cmd_grover)

    sp = sub.add_parser("depth-scan", parents=[common], help="analytic depth over an n sweep")
    sp.add_argument("--m", type=int, default=None, help=f"pattern length (default {SCAN_M})")
    sp.add_argument("--pattern", default=None, help="take m from this pattern")
    sp.add_argument("--K", type=int, default=None, help="fixed block size (default ceil(log2 n))")
    sp.add_argument("--sigma", type=int, default=2)
    sp.add_argument("--n-min-exp", type=int, default=SCAN_EXPONENTS.start)
    sp.add_argument("--n-max-exp", type=int, default=SCAN_EXPONENTS.stop - 1)
    sp.set_defaults(func=cmd_depth_scan)

    sp = sub.add_parser("selftest", parents=[common], help="oracle-equivalence suites")
    sp.add_argument("--quick", action="store_true", help="smaller random sweeps (smoke run)")
    sp.add_argument("--inject-fault", choices=["masks"], default=None, help=argparse.SUPPRESS)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    if args.format is None:
        args.format = "csv" if args.command == "depth-scan" else "human"
    if args.command == "grover" and args.seed is None:
        args.seed = DEFAULT_SEED
    try:
        if args.backend:
            kernels.use(args.backend)
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"qsmatch: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except VerificationFailure as exc:
        print(f"qsmatch: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (DomainError, OSError) as exc:
        print(f"qsmatch: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
