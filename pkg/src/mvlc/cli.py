"""Command line interface.

Exit status: 0 on success, 1 when verification finds mismatches, 2 on usage,
format or validation errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

from . import serialize
from .catalog import UnknownPrimitiveError
from .config import ConfigError, load_config
from .generators import GENERATORS, NAMED_CIRCUITS, GeneratorConfig, build
from .netlist import NetlistError
from .report import TABLES, Table, metrics, reference_tables, render_costs
from .simulate import (AssignmentError, InputSpaceTooLarge, SignatureError, equiv_check, evaluate,
                       interface, verify_exhaustive, verify_sampled)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
MAX_WITNESSES = 10


class UsageError(Exception):
    pass


def _config(args) -> GeneratorConfig:
    config = load_config(args.config) if getattr(args, "config", None) else GeneratorConfig()
    changes = {}
    if getattr(args, "code", None):
        changes["code_map"] = args.code
    if getattr(args, "max_fanout", None) is not None:
        changes["max_fanout"] = args.max_fanout
    return dataclasses.replace(config, **changes) if changes else config


def _circuit(args, config):
    """Netlist from -c FILE or --circuit NAME, and the oracle that goes with a named circuit."""
    if getattr(args, "circuit_file", None):
        return serialize.load(args.circuit_file, config.catalog()), None
    if getattr(args, "circuit", None):
        gen, n, variant, oracle = NAMED_CIRCUITS[args.circuit]
        return build(gen, n, variant, config), oracle
    raise UsageError("give a netlist with -c FILE or a builtin with --circuit NAME")


def cmd_catalog(args, out):
    config = _config(args)
    rows = []
    for s in config.catalog():
        rows.append([s.key, ";".join(f"{p.name}:{p.direction[0]}{p.radix}" for p in s.ports),
                     s.reported_tc, "-".join(map(str, s.tc_range)) if s.tc_range else None,
                     s.supply_rails, s.rails, s.source, s.note])
    table = Table("Primitive catalog", ["key", "ports", "reported_tc", "tc_range", "supply_rails",
                                        "rails", "source", "note"], rows)
    out.write(table.render(args.format))
    return EXIT_OK


def cmd_build(args, out):
    config = _config(args)
    netlist = build(args.generator, args.n, args.variant, config)
    netlist.validate().raise_for_errors()
    if args.output:
        serialize.save(netlist, args.output)
        out.write(f"wrote {netlist.name} ({len(netlist.instances)} instances) to {args.output}\n")
    else:
        out.write(serialize.dumps(netlist))
    return EXIT_OK


def _parse_inputs(text: str) -> dict[str, int]:
    values = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise UsageError(f"expected name=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            values[k.strip()] = int(v)
        except ValueError:
            raise UsageError(f"value of {k.strip()!r} is not an integer: {v!r}") from None
    return values


def cmd_simulate(args, out):
    config = _config(args)
    netlist, _ = _circuit(args, config)
    netlist.validate().raise_for_errors()
    result = evaluate(netlist, _parse_inputs(args.inputs))
    out.write(" ".join(f"{k}={v.value}" for k, v in result.items()) + "\n")
    base, _, ports = interface(netlist)
    if all(p in result for p in ports):
        out.write(f"value={sum(result[p].value * base**i for i, p in enumerate(ports))}\n")
    return EXIT_OK


def _write_report(report, out):
    out.write(report.summary() + "\n")
    for m in report.mismatches[:MAX_WITNESSES]:
        vec = ",".join(f"{k}={v}" for k, v in m.assignment.items())
        out.write(f"  mismatch at {vec}: expected {m.expected}, got {m.actual}\n")
    if len(report.mismatches) > MAX_WITNESSES:
        out.write(f"  ... {len(report.mismatches) - MAX_WITNESSES} more\n")
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_verify(args, out):
    config = _config(args)
    netlist, default_oracle = _circuit(args, config)
    netlist.validate().raise_for_errors()
    oracle = args.oracle or default_oracle
    if oracle is None:
        raise UsageError("--oracle is required for netlist files")
    if args.samples is not None:
        report = verify_sampled(netlist, oracle, args.samples, args.seed)
    else:
        report = verify_exhaustive(netlist, oracle)
    return _write_report(report, out)


def cmd_equiv(args, out):
    config = _config(args)
    a = serialize.load(args.a, config.catalog())
    b = serialize.load(args.b, config.catalog())
    for n in (a, b):
        n.validate().raise_for_errors()
    return _write_report(equiv_check(a, b, args.code), out)


def cmd_report(args, out):
    if args.table:
        out.write(reference_tables(args.table).render(args.format))
        return EXIT_OK
    config = _config(args)
    netlist, _ = _circuit(args, config)
    baseline = None
    if args.baseline:
        baseline = metrics(serialize.load(args.baseline, config.catalog()))
    out.write(render_costs([metrics(netlist)], args.format, baseline))
    return EXIT_OK


def _add_config(p, code=True):
    p.add_argument("--config", help="key=value configuration file")
    if code:
        p.add_argument("--code", choices=["positional", "gray"], help="binary/quaternary code map")
        p.add_argument("--max-fanout", type=int, help="buffer nets above this fan-out")


def _add_circuit(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("-c", "--circuit-file", help="netlist JSON file")
    g.add_argument("--circuit", choices=sorted(NAMED_CIRCUITS), help="builtin circuit")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mvlc", description="Multi-valued logic circuit kit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="primitive library")
    p.add_argument("action", choices=["list"])
    p.add_argument("--format", choices=["md", "csv", "json"], default="md")
    _add_config(p, code=False)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("build", help="generate a circuit")
    p.add_argument("generator", choices=sorted(GENERATORS))
    p.add_argument("--n", type=int, help="operand width in bits or digits")
    p.add_argument("--variant", help="catalog key of the adder block or primitive")
    p.add_argument("-o", "--output", help="write JSON here instead of stdout")
    _add_config(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="evaluate one input vector")
    _add_circuit(p)
    p.add_argument("--inputs", required=True, help="comma separated name=value pairs")
    _add_config(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check a circuit against an arithmetic oracle")
    _add_circuit(p)
    p.add_argument("--oracle", choices=["add", "mul"])
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true", help="enumerate every input (default)")
    mode.add_argument("--samples", type=int, help="random vectors in addition to the corner set")
    p.add_argument("--seed", type=int, default=0)
    _add_config(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("equiv", help="check two netlists for equivalence")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--code", choices=["positional", "gray"], help="relate digits to bit pairs")
    p.add_argument("--config")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("report", help="cost tables")
    p.add_argument("--table", choices=sorted(TABLES))
    _add_circuit(p)
    p.add_argument("--baseline", help="netlist JSON to compute ratios against")
    p.add_argument("--format", choices=["md", "csv", "json"], default="md")
    _add_config(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = make_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, ConfigError, NetlistError, AssignmentError, SignatureError, InputSpaceTooLarge,
            UnknownPrimitiveError, serialize.FormatError, OSError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"mvlc: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
