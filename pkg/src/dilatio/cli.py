"""Command-line front door.

Exit codes: 0 pass, 1 input error, 2 verification failure,
3 precondition failure, 4 resource guard.  Reports go to stdout (or
--out where available), diagnostics to stderr.  The environment variable
DILATIO_MAX_DIM overrides the dilation builders' memory guards.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import control, cyclic, semigroup
from .channels import verify_cptp
from .errors import (
    ChannelFormatError,
    HorizonError,
    MemoryGuardError,
    NotCommutingError,
    NotCyclicError,
    RejectedChannelError,
)
from .fixtures import write_fixture_corpus
from .serialize import (
    dump_document,
    file_digest,
    load_bundle,
    load_channel,
    load_state,
    matrix_to_pairs,
    save_bundle,
    state_to_dict,
    write_json_atomic,
)

EXIT_PASS = 0
EXIT_INPUT = 1
EXIT_FAIL = 2
EXIT_PRECONDITION = 3
EXIT_GUARD = 4


def _emit(report: dict, out_path: str | None) -> None:
    if out_path:
        write_json_atomic(out_path, report)
    else:
        sys.stdout.write(dump_document(report))


def _load_checked(path: str, verify: bool):
    ch = load_channel(path)
    if verify and not verify_cptp(ch).accepted:
        raise RejectedChannelError(f"channel file {path} failed CPTP certification")
    return ch


def _guard_limit(args, default: int) -> int:
    if getattr(args, "force", False):
        return sys.maxsize
    env = os.environ.get("DILATIO_MAX_DIM")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ChannelFormatError(f"DILATIO_MAX_DIM must be an integer, got {env!r}") from exc
    return default


def cmd_check(args) -> int:
    ch = load_channel(args.channel)
    report = verify_cptp(ch, args.tol)
    _emit(
        {
            "command": "check",
            "inputs": {"channel": file_digest(args.channel)},
            "pass": report.accepted,
            "tolerance": args.tol,
            "residuals": [report.max_violation],
            "cp": report.cp,
            "tp_or_unital": report.tp_or_unital,
        },
        args.out,
    )
    return EXIT_PASS if report.accepted else EXIT_FAIL


def cmd_dilate(args) -> int:
    ch = _load_checked(args.channel, not args.no_verify)
    inputs = {"channel": file_digest(args.channel)}
    if args.mode == "semigroup":
        bundle = semigroup.build_semigroup_dilation(
            ch, args.steps, max_total_dim=_guard_limit(args, semigroup.DEFAULT_MAX_TOTAL_DIM)
        )
    elif args.mode == "cyclic":
        period = cyclic.detect_cycle(ch, m_max=args.m_max)
        if period is None:
            raise NotCyclicError(f"no cycle period found up to m_max={args.m_max}")
        bundle = cyclic.build_cyclic_dilation(
            ch, period, max_total_dim=_guard_limit(args, semigroup.DEFAULT_MAX_TOTAL_DIM)
        )
    else:
        if not args.second:
            raise ChannelFormatError("control mode requires --second CHANNEL")
        second = _load_checked(args.second, not args.no_verify)
        inputs["second"] = file_digest(args.second)
        bundle = control.build_control_dilation(
            ch, second, args.steps, max_total_dim=_guard_limit(args, control.DEFAULT_MAX_TOTAL_DIM)
        )
    save_bundle(args.out, bundle, inputs)
    print(f"wrote {args.mode} bundle to {args.out}", file=sys.stderr)
    return EXIT_PASS


def cmd_verify(args) -> int:
    bundle = load_bundle(args.bundle)
    inputs = {"bundle": file_digest(args.bundle), "channel": file_digest(args.channel)}
    ch = _load_checked(args.channel, not args.no_verify)
    report_doc = {
        "command": "verify",
        "inputs": inputs,
        "tolerance": args.tol,
    }
    if isinstance(bundle, semigroup.DilationBundle):
        report = semigroup.verify_dilation(bundle, ch, args.tol)
        report_doc["horizon"] = bundle.horizon
    elif isinstance(bundle, cyclic.CyclicDilationBundle):
        report = cyclic.verify_cyclic_dilation(bundle, ch, n_max=args.n_max, tol=args.tol)
        report_doc["period"] = bundle.period
    else:
        if not args.second:
            raise ChannelFormatError("a control bundle requires a second channel file")
        second = _load_checked(args.second, not args.no_verify)
        inputs["second"] = file_digest(args.second)
        report = control.verify_control_dilation(bundle, ch, second, args.tol)
        report_doc["horizon"] = bundle.horizon
    report_doc["pass"] = report.passed
    report_doc["residuals"] = list(report.residuals)
    report_doc["items"] = list(report.labels)
    _emit(report_doc, args.out)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_evolve(args) -> int:
    bundle = load_bundle(args.bundle)
    rho = load_state(args.state)
    if (args.steps is None) == (args.sequence is None):
        raise ChannelFormatError("provide exactly one of --steps or --sequence")
    if args.sequence is not None:
        if not isinstance(bundle, control.ControlDilation):
            raise ChannelFormatError("--sequence applies to control bundles only")
        out = control.evolve_control(bundle, rho, args.sequence)
    elif isinstance(bundle, semigroup.DilationBundle):
        out = semigroup.evolve(bundle, rho, args.steps)
    elif isinstance(bundle, cyclic.CyclicDilationBundle):
        out = cyclic.evolve_cyclic(bundle, rho, args.steps)
    else:
        raise ChannelFormatError("a control bundle requires --sequence")
    sys.stdout.write(dump_document(state_to_dict(out)))
    return EXIT_PASS


def cmd_reachable(args) -> int:
    t = _load_checked(args.channel_a, not args.no_verify)
    s = _load_checked(args.channel_b, not args.no_verify)
    rho = load_state(args.state)
    states = control.reachable_set(t, s, rho, args.steps)
    doc = [
        {"k": k, "dim": int(state.shape[0]), "matrix": matrix_to_pairs(state)}
        for k, state in states
    ]
    sys.stdout.write(dump_document(doc))
    return EXIT_PASS


def cmd_fixtures(args) -> int:
    written = write_fixture_corpus(args.out)
    for path in written:
        print(path, file=sys.stderr)
    return EXIT_PASS


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilatio",
        description="Construct and verify unitary dilations of quantum channel semigroups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="certify a channel file as CPTP")
    p.add_argument("channel")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("dilate", help="build a dilation bundle")
    p.add_argument("channel")
    p.add_argument("--mode", choices=("semigroup", "cyclic", "control"), required=True)
    p.add_argument("--steps", type=int, default=1, help="horizon N (semigroup/control)")
    p.add_argument("--second", default=None, help="second channel file (control mode)")
    p.add_argument("--m-max", type=int, default=16, help="cycle search bound (cyclic mode)")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true", help="override the memory guard")
    p.add_argument("--no-verify", action="store_true")
    p.set_defaults(handler=cmd_dilate)

    p = sub.add_parser("verify", help="verify a bundle against its channel(s)")
    p.add_argument("bundle")
    p.add_argument("channel")
    p.add_argument("second", nargs="?", default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--n-max", type=int, default=50, help="powers to check (cyclic bundles)")
    p.add_argument("--out", default=None)
    p.add_argument("--no-verify", action="store_true")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("evolve", help="evolve a state through a bundle")
    p.add_argument("bundle")
    p.add_argument("state")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--sequence", default=None, help="control word over T/S")
    p.set_defaults(handler=cmd_evolve)

    p = sub.add_parser("reachable", help="reachable states of a commuting pair")
    p.add_argument("channel_a")
    p.add_argument("channel_b")
    p.add_argument("state")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--no-verify", action="store_true")
    p.set_defaults(handler=cmd_reachable)

    p = sub.add_parser("fixtures", help="write the canonical fixture corpus")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=cmd_fixtures)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except HorizonError:
        print("horizon exceeded: rebuild with larger --steps", file=sys.stderr)
        return EXIT_PRECONDITION
    except (NotCyclicError, NotCommutingError, RejectedChannelError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MemoryGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ChannelFormatError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
