"""Command-line entry point.

Subcommands:

    simulate   run one two-party session and print the estimate + verdict
    verify     run the analytic identity suite over a dimension range
    circuit    emit or validate the singlet-preparation circuit
    report     convert a transcript file to a csv/json summary

Exit codes: 0 success, 1 usage/config error, 2 verification failure,
3 transport error.  The conservative detection verdict is "entangled" iff
mean + 3*stderr < 0.  Report files contain only deterministic fields, so
identical argv and seed reproduce them byte for byte; wall-clock timing
goes to the console instead.

The default tolerance is 1e-10, overridable per run with --tolerance or
globally with the TELEWITNESS_TOLERANCE environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from .circuits import circuit_from_lines, circuit_to_lines, singlet_prep_circuit
from .fileio import parse_state_spec, parse_witness_spec
from .linalg import frobenius_distance
from .sampling import Estimate
from .session import (
    SessionConfig,
    SessionTranscript,
    TransportError,
    read_transcript,
    run_session,
    write_transcript,
)
from .spin import singlet_state
from .verify import run_checks

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_TRANSPORT = 3

TOLERANCE_ENV = "TELEWITNESS_TOLERANCE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None:
        return 1e-10
    try:
        return float(raw)
    except ValueError:
        raise SystemExit(EXIT_USAGE)


def build_parser() -> _Parser:
    parser = _Parser(prog="telewitness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a session and print estimate + verdict")
    sim.add_argument("--d", type=int, required=True, help="local dimension of the teleported share")
    sim.add_argument("--state", required=True, help="werner:P | random:SEED:RANK | file:PATH")
    sim.add_argument("--witness", required=True, help="riccardi:A:B:PAIR | file:PATH")
    sim.add_argument("--shots", type=int, default=10000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--transport", default="inprocess", help="inprocess | tcp:HOST:PORT")
    sim.add_argument("--output", type=Path, help="write a csv/json report here")
    sim.add_argument("--format", choices=("csv", "json"), help="report format (default: from extension)")
    sim.add_argument("--transcript", type=Path, help="write the session transcript here")
    sim.add_argument("--tolerance", type=float, default=None)

    ver = sub.add_parser("verify", help="run the analytic identity suite")
    ver.add_argument("--dmax", type=int, default=4)
    ver.add_argument("--seed", type=int, default=0)

    circ = sub.add_parser("circuit", help="emit or validate the singlet circuit")
    circ.add_argument("--d", type=int, required=True)
    group = circ.add_mutually_exclusive_group(required=True)
    group.add_argument("--emit", nargs="?", const="-", metavar="PATH", help="write the circuit (default stdout)")
    group.add_argument("--validate", metavar="PATH", help="check a circuit file prepares the singlet")
    circ.add_argument("--tolerance", type=float, default=None)

    rep = sub.add_parser("report", help="summarize a transcript file")
    rep.add_argument("transcript", type=Path)
    rep.add_argument("--format", choices=("csv", "json"), default="json")
    rep.add_argument("--output", type=Path, help="write here instead of stdout")
    rep.add_argument("--tolerance", type=float, default=None)
    return parser


def _verdict(estimate: Estimate) -> str:
    return "entangled" if estimate.mean + 3.0 * estimate.stderr < 0.0 else "not-detected"


def _report_metrics(transcript: SessionTranscript, tolerance: float) -> dict:
    from .session import SessionKernel, replay_estimate

    config = transcript.config
    kernel = SessionKernel(config, tolerance)
    est = transcript.estimate if transcript.estimate is not None else replay_estimate(transcript)
    if est is None:
        raise ValueError("transcript has no completed rounds to report on")
    bits = [r.bit for r in transcript.rounds]
    return {
        "d": config.d,
        "state": config.state,
        "witness": config.witness,
        "shots": est.shots,
        "seed": config.seed,
        "mean": est.mean,
        "stderr": est.stderr,
        "p0_empirical": bits.count(0) / len(bits),
        "p0_analytic": kernel.p0,
        "analytic_value": kernel.analytic_value,
        "verdict": _verdict(est),
        "complete": transcript.complete,
    }


def emit_report(metrics: dict, fmt: str, path: Path | None) -> str:
    """Render metrics as json (flat object) or csv (metric,value rows)."""
    if fmt == "json":
        text = json.dumps(metrics, sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        lines = ["metric,value"]
        for key in sorted(metrics):
            lines.append(f"{key},{metrics[key]}")
        text = "\n".join(lines) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        path.write_text(text, encoding="utf-8")
    return text


def _infer_format(args) -> str:
    if args.format:
        return args.format
    if args.output is not None and args.output.suffix == ".csv":
        return "csv"
    return "json"


def _cmd_simulate(args) -> int:
    tolerance = args.tolerance if args.tolerance is not None else _default_tolerance()
    config = SessionConfig(args.d, args.witness, args.state, args.shots, args.seed)
    if args.transport == "inprocess":
        transport, address = "inprocess", None
    elif args.transport.startswith("tcp:"):
        try:
            _, host, port = args.transport.split(":")
            address = (host, int(port))
        except ValueError:
            print(f"bad transport spec {args.transport!r}", file=sys.stderr)
            return EXIT_USAGE
        transport = "tcp"
    else:
        print(f"unknown transport {args.transport!r}", file=sys.stderr)
        return EXIT_USAGE

    start = time.perf_counter()
    try:
        transcript = run_session(config, transport, address)
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    elapsed = time.perf_counter() - start

    if args.transcript is not None:
        write_transcript(args.transcript, transcript)
    metrics = _report_metrics(transcript, tolerance)
    if args.output is not None:
        emit_report(metrics, _infer_format(args), args.output)
    print(
        f"mean={metrics['mean']:+.6g} stderr={metrics['stderr']:.3g} "
        f"shots={metrics['shots']} seed={metrics['seed']}"
    )
    print(f"analytic={metrics['analytic_value']:+.6g} p0={metrics['p0_empirical']:.6g} (expect {metrics['p0_analytic']:.6g})")
    print(f"verdict: {metrics['verdict']}")
    print(f"runtime: {elapsed:.3f} s")
    return EXIT_OK


def _cmd_verify(args) -> int:
    results = run_checks(args.dmax, args.seed)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name:<{width}}  max_err={r.max_error:.3e}  tol={r.tolerance:.1e}  ({r.detail})")
        failures += 0 if r.passed else 1
    print(f"{len(results) - failures}/{len(results)} checks passed (d=2..{args.dmax})")
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def _cmd_circuit(args) -> int:
    tolerance = args.tolerance if args.tolerance is not None else _default_tolerance()
    if args.emit is not None:
        lines = circuit_to_lines(singlet_prep_circuit(args.d))
        text = "\n".join(lines) + "\n"
        if args.emit == "-":
            sys.stdout.write(text)
        else:
            Path(args.emit).write_text(text, encoding="utf-8")
        return EXIT_OK
    try:
        circuit = circuit_from_lines(Path(args.validate).read_text(encoding="utf-8").splitlines())
    except (OSError, ValueError) as exc:
        print(f"cannot load circuit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if circuit.d != args.d:
        print(f"circuit dimension {circuit.d} does not match --d {args.d}", file=sys.stderr)
        return EXIT_VERIFY
    prepared = circuit.unitary()[:, 0]
    err = frobenius_distance(prepared.reshape(-1, 1), singlet_state(args.d).reshape(-1, 1))
    if err > tolerance:
        print(f"circuit does not prepare the singlet: error {err:.3e} > {tolerance:.1e}", file=sys.stderr)
        return EXIT_VERIFY
    print(f"circuit prepares the d={args.d} singlet (error {err:.3e})")
    return EXIT_OK


def _cmd_report(args) -> int:
    tolerance = args.tolerance if args.tolerance is not None else _default_tolerance()
    try:
        transcript = read_transcript(args.transcript)
        metrics = _report_metrics(transcript, tolerance)
    except (OSError, ValueError) as exc:
        print(f"cannot summarize transcript: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = emit_report(metrics, args.format, args.output)
    if args.output is None:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "circuit":
            return _cmd_circuit(args)
        if args.command == "report":
            return _cmd_report(args)
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
