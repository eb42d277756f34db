"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .exceptions import QpfrftError
from .numerics import frft_chirp, frft_direct, load_signal, to_pairs
from .qpe import DiagonalUnitary, feasibility_table, qpe_grover, qpe_modulated, qpe_reduced
from .statevector import basis_state, sample
from .transform import run_qpfrft
from .ualpha import apply_direct, decompose_l, gate_count, synthesize, ualpha_layout

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_TOL = {"frft": 1e-9, "ualpha-verify": 1e-10, "qpfrft": 1e-9}


class UsageError(Exception):
    pass


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _output(args) -> str | None:
    return getattr(args, "output", None)


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _tolerance(args, command: str) -> float:
    tol = getattr(args, "tolerance", None)
    return DEFAULT_TOL[command] if tol is None else tol


def cmd_frft(args) -> int:
    f = load_signal(args.input)
    primary, other = (frft_direct, frft_chirp) if args.method == "direct" else (frft_chirp, frft_direct)
    out = primary(f, args.alpha)
    doc = {"alpha": args.alpha, "method": args.method, "values": to_pairs(out.values)}
    status = EXIT_OK
    if args.check:
        ref = other(f, args.alpha).values
        scale = max(1.0, float(np.max(np.abs(ref))))
        err = float(np.max(np.abs(out.values - ref))) / scale
        doc["check_method"] = "chirp" if args.method == "direct" else "direct"
        doc["check_maxerr"] = err
        if err > _tolerance(args, "frft"):
            status = EXIT_FAIL
    _emit(_json(doc), _output(args))
    return status


def cmd_ualpha_verify(args) -> int:
    n = args.n
    layout = ualpha_layout(n)  # memory guard fires here
    if args.exhaustive:
        if n > 6:
            raise UsageError("--exhaustive is limited to n <= 6; use --samples")
        cases = [(l, j) for l in range(1 << (n + 1)) for j in range(1 << n)]
    elif args.samples:
        rng = np.random.default_rng(args.seed)
        cases = [(int(rng.integers(0, 1 << (n + 1))), int(rng.integers(0, 1 << n))) for _ in range(args.samples)]
    else:
        raise UsageError("give --exhaustive or --samples")
    tol = _tolerance(args, "ualpha-verify")
    lines, failures = [], []
    circuits = {}
    for l, j in cases:
        a = decompose_l(l, n)
        if l not in circuits:
            circuits[l] = synthesize(a, layout=layout)
        state = basis_state(layout, {"l": l, "j": j})
        err = float(np.max(np.abs(circuits[l].run(state).amps - apply_direct(state, a).amps)))
        ok = err <= tol
        lines.append(f"l={l} j={j} maxerr={err:.3e} {'ok' if ok else 'FAIL'}")
        if not ok:
            failures.append((l, j))
    tally = synthesize(decompose_l(0, n), layout=layout).counts
    lines.append("tally: " + " ".join(f"{k}={v}" for k, v in sorted(tally.items())))
    lines.append(f"cases={len(cases)} failures={len(failures)} tolerance={tol:g}")
    if failures:
        lines.append("failing: " + " ".join(f"(l={l},j={j})" for l, j in failures))
    _emit("\n".join(lines) + "\n", _output(args))
    return EXIT_FAIL if failures else EXIT_OK


def cmd_qpfrft(args) -> int:
    f = load_signal(args.input)
    n = args.n if args.n is not None else f.size.bit_length() - 1
    run = run_qpfrft(f, args.l, n, use_circuit=not args.direct)
    ref = frft_direct(f, run.alpha).values
    err = float(np.max(np.abs(run.coefficients.values - ref)))
    doc = {
        "alpha": run.alpha,
        "l": args.l,
        "coefficients": to_pairs(run.coefficients.values),
        "oracle_maxerr": err,
    }
    if args.dump:
        Path(args.dump).write_text(run.state.to_json())
    _emit(_json(doc), _output(args))
    return EXIT_OK if err <= _tolerance(args, "qpfrft") else EXIT_FAIL


def _phase(args) -> float:
    if args.phase is not None:
        return args.phase
    if args.b is not None and args.nprime is not None:
        return args.b / (1 << args.nprime)
    raise UsageError("give --phase, or --b together with --nprime")


def _require(args, *names):
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name) is None]
    if missing:
        raise UsageError(f"method {args.method!r} requires {', '.join(missing)}")


def cmd_qpe(args) -> int:
    _require(args, "n")
    phase = _phase(args)
    if args.method == "reduced":
        _require(args, "l", "j")
        u = 1 if args.u is None else args.u
        width = args.m or max(1, u.bit_length())
        result = qpe_reduced(DiagonalUnitary.with_phase(phase, u, width), u, args.l, args.j, args.n,
                             use_circuit=not args.direct)
    elif args.method == "grover":
        _require(args, "nprime")
        u = 1 if args.u is None else args.u
        width = args.m or max(1, u.bit_length())
        iterations = args.iterations if args.iterations in ("auto", "optimal") else int(args.iterations)
        result = qpe_grover(DiagonalUnitary.with_phase(phase, u, width), u, args.n, args.nprime, iterations)
    else:
        _require(args, "l", "u")
        width = args.m or max(1, args.u.bit_length())
        result = qpe_modulated(DiagonalUnitary.with_phase(phase, args.u, width), args.u, args.l, args.n,
                               use_circuit=not args.direct)
    doc = {
        "method": result.method,
        "params": result.params,
        "measured": result.measured,
        "estimate": result.estimate,
        "success_prob": result.success_prob,
        "gate_tally": result.gate_tally,
        "extra": result.extra,
    }
    if args.shots:
        counts = sample(result.state, result.readout, args.shots, args.seed)
        doc["samples"] = {"register": result.readout, "shots": args.shots, "seed": args.seed,
                          "counts": {str(k): v for k, v in counts.items()}}
    _emit(_json(doc), _output(args))
    return EXIT_OK if result.success_prob >= args.threshold else EXIT_FAIL


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def cmd_gatecount(args) -> int:
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    header = ["n", "theta_exact", "phi_exact", "theta_paper_bound", "total_exact"]
    rows = [[gate_count(n).row()[h] for h in header] for n in range(1, args.n_max + 1)]
    _emit(_csv(header, rows), _output(args))
    return EXIT_OK


def cmd_feasibility(args) -> int:
    if args.n_max < 1:
        raise UsageError("--n-max must be >= 1")
    nus = [int(x) for x in args.nu.split(",") if x.strip()]
    if any(nu < 0 for nu in nus):
        raise UsageError("--nu values must be >= 0")
    rows = [[r.n, r.nu, r.lhs, r.rhs, str(r.ok).lower()] for r in feasibility_table(args.n_max, nus)]
    _emit(_csv(["n", "nu", "lhs", "rhs", "ok"], rows), _output(args))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                        help="override the verification tolerance")
    common.add_argument("-o", "--output", default=argparse.SUPPRESS, help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="qpfrft", parents=[common],
                                     description="Quantum pseudo-fractional Fourier transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("frft", parents=[common], help="classical fractional Fourier transform")
    p.add_argument("--input", required=True, help="signal JSON")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--method", choices=["direct", "chirp"], default="direct")
    p.add_argument("--check", action="store_true", help="cross-check against the other method")
    p.set_defaults(func=cmd_frft)

    p = sub.add_parser("ualpha-verify", parents=[common], help="U_alpha circuit vs direct definition")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ualpha_verify)

    p = sub.add_parser("qpfrft", parents=[common], help="run the QPFrFT pipeline on a signal")
    p.add_argument("--input", required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--direct", action="store_true", help="use the matrix-free U_alpha instead of the circuit")
    p.add_argument("--dump", help="write the final statevector JSON here")
    p.set_defaults(func=cmd_qpfrft)

    p = sub.add_parser("qpe", parents=[common], help="U_alpha based phase estimation")
    p.add_argument("--method", choices=["reduced", "grover", "modulated"], required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--j", type=int)
    p.add_argument("--u", type=int, help="eigenindex")
    p.add_argument("--m", type=int, help="eigen register width")
    p.add_argument("--phase", type=float, help="eigenphase in turns")
    p.add_argument("--b", type=int)
    p.add_argument("--nprime", type=int)
    p.add_argument("--iterations", default="auto", help="Grover rounds: an integer, 'auto' or 'optimal'")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--direct", action="store_true")
    p.add_argument("--shots", type=int, help="also sample the readout register")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_qpe)

    p = sub.add_parser("gatecount", parents=[common], help="U_alpha gate-count table (CSV)")
    p.add_argument("--n-max", type=int, required=True)
    p.set_defaults(func=cmd_gatecount)

    p = sub.add_parser("feasibility", parents=[common], help="2^n <= (nu+n)^4 table (CSV)")
    p.add_argument("--n-max", type=int, default=24)
    p.add_argument("--nu", default="0,16", help="comma-separated nu values")
    p.set_defaults(func=cmd_feasibility)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, QpfrftError, ValueError, OSError) as exc:
        print(f"qpfrft {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
