"""Levelized simulation, exhaustive verification and equivalence checking.

Simulation is vectorized: every net holds a numpy column with one entry per
input vector, and each instance is a table lookup on its input columns.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .levels import CodeMap, LogicLevel, code_map as _code_map
from .netlist import Netlist, topo_order

DEFAULT_CAP = 2**20
CHUNK = 1 << 16


class AssignmentError(ValueError):
    pass


class InputSpaceTooLarge(ValueError):
    pass


class SignatureError(ValueError):
    pass


# -- evaluation ------------------------------------------------------------

def _plan(netlist: Netlist):
    if "plan" in netlist._cache:
        return netlist._cache["plan"]
    order = topo_order(netlist)
    index = {net: i for i, net in enumerate(sorted(netlist.nets))}
    steps = []
    for inst in order:
        spec = netlist.spec(inst)
        ins = [index[inst.bindings[p.name]] for p in spec.inputs]
        strides = [math.prod(p.radix for p in spec.inputs[:k]) for k in range(len(ins))]
        tables = [np.ascontiguousarray(spec.lut[:, k], dtype=np.int32) for k in range(len(spec.outputs))]
        outs = [index[inst.bindings[p.name]] for p in spec.outputs]
        steps.append((ins, strides, tables, outs))
    plan = (index, steps)
    netlist._cache["plan"] = plan
    return plan


def evaluate_batch(netlist: Netlist, columns: Mapping[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Evaluate many input vectors at once; `columns` maps each input port to an int array."""
    index, steps = _plan(netlist)
    names = {p.name for p in netlist.inputs}
    missing = names - set(columns)
    if missing:
        raise AssignmentError(f"no value for inputs {sorted(missing)}")
    extra = set(columns) - names
    if extra:
        raise AssignmentError(f"unknown inputs {sorted(extra)}")
    values: list[np.ndarray | None] = [None] * len(index)
    for p in netlist.inputs:
        col = np.asarray(columns[p.name], dtype=np.int32)
        if col.size and (col.min() < 0 or col.max() >= p.radix):
            raise AssignmentError(f"input {p.name!r} has values outside radix {p.radix}")
        values[index[p.name]] = col
    for ins, strides, tables, outs in steps:
        idx = values[ins[0]]
        for i, s in zip(ins[1:], strides[1:]):
            idx = idx + values[i] * s
        for table, o in zip(tables, outs):
            values[o] = table[idx]
    return {p.name: values[index[p.net]] for p in netlist.outputs}


def evaluate(netlist: Netlist, assignment: Mapping[str, int | LogicLevel]) -> dict[str, LogicLevel]:
    """Evaluate one input vector, returning a LogicLevel per output port."""
    columns = {}
    for p in netlist.inputs:
        if p.name not in assignment:
            raise AssignmentError(f"no value for input {p.name!r}")
        v = assignment[p.name]
        if isinstance(v, LogicLevel) and v.radix != p.radix:
            raise AssignmentError(f"input {p.name!r} is radix {p.radix}, got a radix-{v.radix} level")
        columns[p.name] = np.array([int(v)])
    for name in assignment:
        if name not in columns:
            raise AssignmentError(f"unknown input {name!r}")
    result = evaluate_batch(netlist, columns)
    return {p.name: LogicLevel(p.radix, int(result[p.name][0])) for p in netlist.outputs}


# -- arithmetic interface --------------------------------------------------

_INDEXED = re.compile(r"^(.*?)(\d+)$")


def split_port(name: str) -> tuple[str, int | None]:
    m = _INDEXED.match(name)
    if m and m.group(1):
        return m.group(1), int(m.group(2))
    return name, None


def interface(netlist: Netlist) -> tuple[int, dict[str, list[str]], list[str]]:
    """``(base, operands, result)`` from generator metadata, else inferred from port names."""
    attrs = netlist.attrs
    if "operands" in attrs and "result" in attrs:
        return attrs["base"], {k: list(v) for k, v in attrs["operands"].items()}, list(attrs["result"])
    base = max(p.radix for p in netlist.inputs) if netlist.inputs else 2
    operands: dict[str, list[tuple[int, str]]] = {}
    for p in netlist.inputs:
        prefix, i = split_port(p.name)
        operands.setdefault(prefix, []).append((i or 0, p.name))
    groups: dict[str, list[tuple[int, str]]] = {}
    for p in netlist.outputs:
        prefix, i = split_port(p.name)
        groups.setdefault(prefix, []).append((i if i is not None else -1, p.name))
    result = []
    for prefix in sorted(groups, key=lambda g: -len(groups[g])):
        result += [n for _, n in sorted(groups[prefix])]
    return base, {k: [n for _, n in sorted(v)] for k, v in operands.items()}, result


def _weigh(columns: Mapping[str, np.ndarray], ports: Sequence[str], base: int) -> np.ndarray:
    total = np.zeros(len(next(iter(columns.values()))), dtype=np.int64)
    for i, name in enumerate(ports):
        total += columns[name].astype(np.int64) * base**i
    return total


ORACLES: dict[str, Callable[..., object]] = {
    "add": lambda **ops: sum(ops.values()),
    "mul": lambda a, b: a * b,
}


def resolve_oracle(oracle) -> tuple[str, Callable]:
    if callable(oracle):
        return getattr(oracle, "__name__", "custom"), oracle
    try:
        return oracle, ORACLES[oracle]
    except KeyError:
        raise ValueError(f"unknown oracle {oracle!r}; expected one of {sorted(ORACLES)}") from None


# -- reports ---------------------------------------------------------------

@dataclass
class Mismatch:
    assignment: dict[str, int]
    expected: object
    actual: object


@dataclass
class VerifyReport:
    total_vectors: int
    mismatches: list[Mismatch] = field(default_factory=list)
    exhaustive: bool = True
    seed: int | None = None
    subject: str = ""

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def summary(self) -> str:
        mode = "" if self.exhaustive else f" (sampled, seed {self.seed})"
        return f"{self.total_vectors} vectors, {len(self.mismatches)} mismatches{mode}"


# -- enumeration -----------------------------------------------------------

def input_space(netlist: Netlist) -> tuple[list[str], list[int]]:
    """Input names in canonical order (sorted by name) with their radices."""
    ports = sorted(netlist.inputs, key=lambda p: p.name)
    return [p.name for p in ports], [p.radix for p in ports]


def vectors(names: Sequence[str], radices: Sequence[int], start: int, stop: int) -> dict[str, np.ndarray]:
    """Vectors start..stop-1 of the canonical enumeration; the first name varies fastest."""
    idx = np.arange(start, stop, dtype=np.int64)
    cols, stride = {}, 1
    for name, r in zip(names, radices):
        cols[name] = ((idx // stride) % r).astype(np.int32)
        stride *= r
    return cols


def _chunks(total: int):
    for start in range(0, total, CHUNK):
        yield start, min(total, start + CHUNK)


def _row(cols: Mapping[str, np.ndarray], names: Sequence[str], k: int) -> dict[str, int]:
    return {n: int(cols[n][k]) for n in names}


def _check_oracle(netlist, oracle, cols, names, mismatches):
    base, operands, result = interface(netlist)
    ops = {op: _weigh(cols, ports, base) for op, ports in operands.items()}
    expected = np.asarray(oracle(**ops), dtype=np.int64)
    outs = evaluate_batch(netlist, cols)
    actual = _weigh(outs, result, base)
    for k in np.flatnonzero(expected != actual):
        mismatches.append(Mismatch(_row(cols, names, k), int(expected[k]), int(actual[k])))


def verify_exhaustive(netlist: Netlist, oracle, cap: int = DEFAULT_CAP) -> VerifyReport:
    """Compare the circuit against `oracle` on its whole input space.

    `oracle` is ``"add"``, ``"mul"`` or a callable taking the circuit's operands
    as keyword arguments (numpy int arrays) and returning the expected integer.
    """
    name, fn = resolve_oracle(oracle)
    names, radices = input_space(netlist)
    total = math.prod(radices)
    if total > cap:
        raise InputSpaceTooLarge(f"{netlist.name}: {total} input vectors exceed the cap of {cap}; "
                                 f"use verify_sampled instead")
    report = VerifyReport(total, exhaustive=True, subject=f"{netlist.name} vs {name}")
    for start, stop in _chunks(total):
        _check_oracle(netlist, fn, vectors(names, radices, start, stop), names, report.mismatches)
    return report


def corner_vectors(names: Sequence[str], radices: Sequence[int]) -> dict[str, np.ndarray]:
    rows = [[0] * len(names), [r - 1 for r in radices]]
    for i, r in enumerate(radices):
        row = [0] * len(names)
        row[i] = r - 1
        rows.append(row)
    arr = np.array(rows, dtype=np.int32).reshape(len(rows), len(names))
    return {n: arr[:, i] for i, n in enumerate(names)}


def verify_sampled(netlist: Netlist, oracle, samples: int = 10_000, seed: int = 0) -> VerifyReport:
    """Corner vectors plus `samples` uniformly random vectors from a fixed seed."""
    name, fn = resolve_oracle(oracle)
    names, radices = input_space(netlist)
    rng = np.random.default_rng(seed)
    corners = corner_vectors(names, radices)
    randoms = {n: rng.integers(0, r, size=samples, dtype=np.int32) for n, r in zip(names, radices)}
    cols = {n: np.concatenate([corners[n], randoms[n]]) for n in names}
    total = len(cols[names[0]]) if names else 0
    report = VerifyReport(total, exhaustive=False, seed=seed, subject=f"{netlist.name} vs {name}")
    for start, stop in _chunks(total):
        _check_oracle(netlist, fn, {n: c[start:stop] for n, c in cols.items()}, names,
                      report.mismatches)
    return report


# -- equivalence -----------------------------------------------------------

@dataclass
class _Group:
    kind: str  # "same", "q2b" (a digits, b bits) or "b2q"
    a: list[str]
    b: list[str]


def _grouped(ports) -> dict[str, list]:
    groups: dict[str, list] = {}
    for p in ports:
        prefix, i = split_port(p.name)
        groups.setdefault(prefix, []).append((-1 if i is None else i, p))
    return {k: [p for _, p in sorted(v, key=lambda t: t[0])] for k, v in groups.items()}


def _correspond(a_ports, b_ports, cmap: CodeMap | None, what: str) -> list[_Group]:
    ga, gb = _grouped(a_ports), _grouped(b_ports)
    if set(ga) != set(gb):
        raise SignatureError(f"{what} port groups differ: {sorted(ga)} vs {sorted(gb)}")
    groups = []
    for key in sorted(ga):
        pa, pb = ga[key], gb[key]
        if [(p.name, p.radix) for p in pa] == [(p.name, p.radix) for p in pb]:
            groups.append(_Group("same", [p.name for p in pa], [p.name for p in pb]))
            continue
        if cmap is not None:
            if all(p.radix == 4 for p in pa) and all(p.radix == 2 for p in pb) and len(pb) == 2 * len(pa):
                groups.append(_Group("q2b", [p.name for p in pa], [p.name for p in pb]))
                continue
            if all(p.radix == 2 for p in pa) and all(p.radix == 4 for p in pb) and len(pa) == 2 * len(pb):
                groups.append(_Group("b2q", [p.name for p in pa], [p.name for p in pb]))
                continue
        raise SignatureError(f"{what} group {key!r} is incompatible: "
                             f"{[(p.name, p.radix) for p in pa]} vs {[(p.name, p.radix) for p in pb]}")
    return groups


def _codec_tables(cmap: CodeMap):
    fx = np.array([cmap.forward[q][0] for q in range(4)], dtype=np.int32)
    fy = np.array([cmap.forward[q][1] for q in range(4)], dtype=np.int32)
    inv = np.array([cmap.inverse[(x, y)] for x in (0, 1) for y in (0, 1)], dtype=np.int32)
    return fx, fy, inv


def _digits_to_bits(cols, digits, bits, tables):
    fx, fy, _ = tables
    res = {}
    for i, d in enumerate(digits):
        res[bits[2 * i]] = fy[cols[d]]
        res[bits[2 * i + 1]] = fx[cols[d]]
    return res


def _bits_to_digits(cols, bits, digits, tables):
    _, _, inv = tables
    return {d: inv[cols[bits[2 * i + 1]] * 2 + cols[bits[2 * i]]] for i, d in enumerate(digits)}


def equiv_check(a: Netlist, b: Netlist, code_map=None, cap: int = DEFAULT_CAP) -> VerifyReport:
    """Exhaustively compare two circuits.

    Without a code map the port signatures must match exactly. With one, an
    indexed group of quaternary ports on one side may correspond to twice as
    many binary ports on the other: digit i <-> bits 2i (Y) and 2i+1 (X).
    """
    cmap = _code_map(code_map) if code_map is not None else None
    in_groups = _correspond(a.inputs, b.inputs, cmap, "input")
    out_groups = _correspond(a.outputs, b.outputs, cmap, "output")
    tables = _codec_tables(cmap) if cmap is not None else None
    names, radices = input_space(a)
    total = math.prod(radices)
    if total > cap:
        raise InputSpaceTooLarge(f"{total} input vectors exceed the cap of {cap}")
    report = VerifyReport(total, exhaustive=True, subject=f"{a.name} vs {b.name}")
    out_names = [p.name for p in a.outputs]
    for start, stop in _chunks(total):
        cols = vectors(names, radices, start, stop)
        b_in = {}
        for g in in_groups:
            if g.kind == "same":
                b_in.update({nb: cols[na] for na, nb in zip(g.a, g.b)})
            elif g.kind == "q2b":
                b_in.update(_digits_to_bits(cols, g.a, g.b, tables))
            else:
                b_in.update(_bits_to_digits(cols, g.a, g.b, tables))
        out_a = evaluate_batch(a, cols)
        out_b = evaluate_batch(b, b_in)
        # express b's outputs in a's port names
        seen = {}
        for g in out_groups:
            if g.kind == "same":
                seen.update({na: out_b[nb] for na, nb in zip(g.a, g.b)})
            elif g.kind == "q2b":
                seen.update(_bits_to_digits(out_b, g.b, g.a, tables))
            else:
                seen.update(_digits_to_bits(out_b, g.b, g.a, tables))
        diff = np.zeros(stop - start, dtype=bool)
        for n in out_names:
            diff |= out_a[n] != seen[n]
        for k in np.flatnonzero(diff):
            report.mismatches.append(Mismatch(_row(cols, names, k), _row(out_a, out_names, k),
                                              _row(seen, out_names, k)))
    return report
