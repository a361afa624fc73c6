"""Command-line interface: ``focusst check|run|monitor|export-dot|props``.

Exit codes: 0 success, 1 analysis failure (diagnostics, violated verdicts,
failed laws), 2 I/O error, 64 usage error.
"""
from __future__ import annotations

import argparse
import sys

from .diagram import export_dot
from .errors import CausalityCycle, ConfigurationError, FocusError, SpecError, UnknownReference
from .loader import find_file, load_network, load_source
from .props import format_case, run_laws
from .reference import REFERENCES, load_reference
from .runtime import Simulator, Status, load_trace, monitor

EXIT_OK, EXIT_FAIL, EXIT_IO, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _nat(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must not be negative, got {value}")
    return value


def build_parser():
    p = _Parser(prog="focusst", description="Timed-stream specification toolkit.")
    p.add_argument("--spec-path", action="append", default=[], metavar="DIR",
                   help="extra directory to search for .fst files (repeatable)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="parse and validate .fst files")
    c.add_argument("paths", nargs="+")

    def network_args(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("network", nargs="?", help="network .fst file")
        g.add_argument("--ref", choices=sorted(REFERENCES), help="bundled reference network")

    r = sub.add_parser("run", help="simulate a network and monitor the trace")
    network_args(r)
    r.add_argument("--horizon", type=_positive, default=1000)
    r.add_argument("--seed", type=_nat, default=0)
    r.add_argument("--trace-out", metavar="PATH")
    r.add_argument("--post-update", action="store_true",
                   help="output expressions read the updated locals")

    m = sub.add_parser("monitor", help="re-check a saved trace")
    network_args(m)
    m.add_argument("--trace", required=True)

    d = sub.add_parser("export-dot", help="write the architecture diagram")
    network_args(d)
    d.add_argument("-o", "--output", metavar="PATH")

    pr = sub.add_parser("props", help="randomized operator and controller laws")
    pr.add_argument("--trials", type=_positive, default=1000)
    pr.add_argument("--seed", type=_nat, default=0)
    pr.add_argument("--inject-fault", action="store_true",
                    help="use a broken split to exercise failure reporting")
    return p


def _err(msg):
    print(msg, file=sys.stderr)


def _network(args):
    if args.ref:
        return load_reference(args.ref)[0]
    return load_network(find_file(args.network, extra=args.spec_path), args.spec_path)


def _verdict_table(verdicts):
    width = max([len(v.label) for v in verdicts] + [5])
    lines = [f"{'label':<{width}}  {'status':<18}  {'step':>5}  detail"]
    for v in verdicts:
        step = "-" if v.first_violation_step is None else str(v.first_violation_step)
        lines.append(f"{v.label:<{width}}  {v.status.value:<18}  {step:>5}  {v.detail}".rstrip())
    return "\n".join(lines)


def cmd_check(args):
    status = EXIT_OK
    for name in args.paths:
        try:
            path = find_file(name, extra=args.spec_path)
            unit = load_source(path)
            if unit.networks:
                load_network(path, args.spec_path)
        except OSError as exc:
            _err(f"{name}: {exc.strerror or exc}")
            return EXIT_IO
        except SpecError as exc:
            for d in exc.diagnostics:
                _err(str(d))
            status = EXIT_FAIL
            continue
        for d in unit.diagnostics:
            _err(str(d))
        print(f"{path}: ok ({len(unit.specs)} spec(s), {len(unit.networks)} network(s))")
    return status


def cmd_run(args):
    net = _network(args)
    if args.post_update and not net.post_update:
        from dataclasses import replace
        net = replace(net, post_update=True)
    trace = Simulator(net).run(args.horizon, args.seed)
    if args.trace_out:
        trace.save(args.trace_out, net)
    print(_verdict_table(trace.verdicts))
    for e in trace.warnings[:20]:
        print(f"warning: step {e.step}: {e.component}.{e.label}: {e.kind}: {e.detail}")
    if len(trace.warnings) > 20:
        print(f"warning: {len(trace.warnings) - 20} more")
    return EXIT_FAIL if any(v.status is Status.VIOLATED for v in trace.verdicts) else EXIT_OK


def cmd_monitor(args):
    net = _network(args)
    trace = load_trace(args.trace, net)
    verdicts = monitor(trace, net)
    print(_verdict_table(verdicts))
    return EXIT_FAIL if any(v.status is Status.VIOLATED for v in verdicts) else EXIT_OK


def cmd_export_dot(args):
    text = export_dot(_network(args))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_props(args):
    results = run_laws(args.trials, args.seed, inject_fault=args.inject_fault)
    failed = 0
    for r in results:
        mark = "PASS" if not r.failed else "FAIL"
        print(f"{mark}  {r.name}: {r.passed}/{r.passed + r.failed} passed")
        if r.counterexample is not None:
            print(f"      minimal counterexample: {format_case(r.counterexample)}")
        failed += r.failed
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"check": cmd_check, "run": cmd_run, "monitor": cmd_monitor,
            "export-dot": cmd_export_dot, "props": cmd_props}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        _err(f"{exc.filename or ''}: {exc.strerror or exc}".lstrip(": "))
        return EXIT_IO
    except SpecError as exc:
        for d in exc.diagnostics:
            _err(str(d))
        return EXIT_FAIL
    except (CausalityCycle, ConfigurationError, UnknownReference) as exc:
        _err(f"error: {exc}")
        return EXIT_FAIL
    except FocusError as exc:
        _err(f"error: {exc}")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
