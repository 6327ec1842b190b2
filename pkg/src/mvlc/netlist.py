"""Combinational netlists: structure, validation, ordering and fan-out buffering.

A circuit input port drives the net of the same name. A circuit output port
reads the net named by its ``net`` field. Every other net is driven by exactly
one instance output pin.

A net may feed a pin rated for a wider radix than its own (a binary carry into
the ternary-rated port of a Q332 cell), never a narrower one.
"""
from __future__ import annotations

import heapq
import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, NamedTuple

from .catalog import Catalog, PortSpec, UnknownPrimitiveError, builtin_catalog, inp, out

__all__ = [
    "Endpoint", "Instance", "Netlist", "NetlistBuilder", "PortSpec", "ErrorKind", "Issue",
    "ValidationReport", "NetlistError", "CycleError", "MultipleDriverError", "RadixMismatchError",
    "UndrivenOutputError", "UndrivenNetError", "BindingError", "MissingBufferError",
    "validate", "topo_order", "fanout_map", "insert_buffers", "flatten",
]


class Endpoint(NamedTuple):
    owner: str | None  # instance id, or None for a circuit port
    port: str

    def __str__(self):
        return f"{self.owner}.{self.port}" if self.owner is not None else f"<port {self.port}>"


@dataclass(frozen=True)
class Instance:
    id: str
    primitive: str
    bindings: Mapping[str, str]


class ErrorKind(str, Enum):
    CYCLE = "cycle"
    MULTIPLE_DRIVERS = "multiple_drivers"
    RADIX_MISMATCH = "radix_mismatch"
    UNDRIVEN_OUTPUT = "undriven_output"
    UNDRIVEN_NET = "undriven_net"
    BINDING = "binding"


class NetlistError(ValueError):
    kind: ErrorKind | None = None


class CycleError(NetlistError):
    kind = ErrorKind.CYCLE


class MultipleDriverError(NetlistError):
    kind = ErrorKind.MULTIPLE_DRIVERS


class RadixMismatchError(NetlistError):
    kind = ErrorKind.RADIX_MISMATCH


class UndrivenOutputError(NetlistError):
    kind = ErrorKind.UNDRIVEN_OUTPUT


class UndrivenNetError(NetlistError):
    kind = ErrorKind.UNDRIVEN_NET


class BindingError(NetlistError):
    kind = ErrorKind.BINDING


class MissingBufferError(NetlistError):
    pass


_ERRORS = {cls.kind: cls for cls in (CycleError, MultipleDriverError, RadixMismatchError,
                                     UndrivenOutputError, UndrivenNetError, BindingError)}


@dataclass(frozen=True)
class Issue:
    kind: str
    message: str
    ids: tuple[str, ...] = ()


@dataclass
class ValidationReport:
    errors: list[Issue] = field(default_factory=list)
    warnings: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def kinds(self) -> set[str]:
        return {e.kind for e in self.errors}

    def raise_for_errors(self):
        if self.errors:
            first = self.errors[0]
            cls = _ERRORS.get(ErrorKind(first.kind), NetlistError)
            raise cls("; ".join(e.message for e in self.errors))


class Netlist:
    """An immutable combinational circuit over catalog primitives.

    ``attrs`` carries generator metadata: ``reported_tc``, ``base`` (the
    positional radix of the arithmetic interface), ``operands`` (operand
    name to little-endian input ports), ``result`` (little-endian output
    ports) and ``notes``.
    """

    def __init__(self, name: str, inputs: Iterable[PortSpec], outputs: Iterable[PortSpec],
                 instances: Iterable[Instance], nets: Mapping[str, int],
                 catalog: Catalog | None = None, attrs: Mapping | None = None):
        self.name = name
        self.inputs = tuple(inputs)
        self.outputs = tuple(p if p.net is not None else PortSpec(p.name, p.direction, p.radix, p.name)
                             for p in outputs)
        self.instances = tuple(Instance(i.id, i.primitive, dict(i.bindings)) for i in instances)
        self.nets = dict(nets)
        self.catalog = catalog if catalog is not None else builtin_catalog()
        self.attrs = dict(attrs or {})
        self._report: ValidationReport | None = None
        self._cache: dict = {}

    def __repr__(self):
        return (f"Netlist({self.name!r}, {len(self.inputs)} in, {len(self.outputs)} out, "
                f"{len(self.instances)} instances, {len(self.nets)} nets)")

    @property
    def reported_tc(self) -> int | None:
        return self.attrs.get("reported_tc")

    def instance(self, iid: str) -> Instance:
        return self._by_id()[iid]

    def _by_id(self) -> dict[str, Instance]:
        if "by_id" not in self._cache:
            self._cache["by_id"] = {i.id: i for i in self.instances}
        return self._cache["by_id"]

    def spec(self, inst: Instance):
        return self.catalog.resolve(inst.primitive)

    def input_port(self, name: str) -> PortSpec:
        for p in self.inputs:
            if p.name == name:
                return p
        raise KeyError(name)

    def connectivity(self):
        """Return ``(drivers, sinks)``: net id -> list of endpoints."""
        if "conn" in self._cache:
            return self._cache["conn"]
        drivers: dict[str, list[Endpoint]] = defaultdict(list)
        sinks: dict[str, list[Endpoint]] = defaultdict(list)
        for p in self.inputs:
            drivers[p.name].append(Endpoint(None, p.name))
        for p in self.outputs:
            sinks[p.net].append(Endpoint(None, p.name))
        for inst in self.instances:
            try:
                spec = self.spec(inst)
            except UnknownPrimitiveError:
                continue
            for pname, net in inst.bindings.items():
                try:
                    direction = spec.port(pname).direction
                except KeyError:
                    continue
                (drivers if direction == "output" else sinks)[net].append(Endpoint(inst.id, pname))
        self._cache["conn"] = (dict(drivers), dict(sinks))
        return self._cache["conn"]

    def validate(self) -> ValidationReport:
        if self._report is None:
            self._report = validate(self)
        return self._report

    def replace(self, **changes) -> Netlist:
        fields = dict(name=self.name, inputs=self.inputs, outputs=self.outputs,
                      instances=self.instances, nets=self.nets, catalog=self.catalog,
                      attrs=self.attrs)
        fields.update(changes)
        return Netlist(**fields)


# -- validation ------------------------------------------------------------

def validate(netlist: Netlist) -> ValidationReport:
    """Check every structural invariant, collecting all violations."""
    report = ValidationReport()
    err = report.errors
    nets = netlist.nets

    seen_ports = set()
    for p in netlist.inputs + netlist.outputs:
        if p.name in seen_ports:
            err.append(Issue(ErrorKind.BINDING.value, f"duplicate circuit port {p.name!r}", (p.name,)))
        seen_ports.add(p.name)
    for p in netlist.inputs:
        if p.name not in nets:
            err.append(Issue(ErrorKind.BINDING.value, f"input {p.name!r} has no net", (p.name,)))
        elif nets[p.name] != p.radix:
            err.append(Issue(ErrorKind.RADIX_MISMATCH.value,
                             f"input {p.name!r} is radix {p.radix} but its net is radix {nets[p.name]}",
                             (p.name,)))
    for p in netlist.outputs:
        if p.net not in nets:
            err.append(Issue(ErrorKind.UNDRIVEN_OUTPUT.value,
                             f"output {p.name!r} reads unknown net {p.net!r}", (p.name,)))
        elif nets[p.net] > p.radix:
            err.append(Issue(ErrorKind.RADIX_MISMATCH.value,
                             f"output {p.name!r} is radix {p.radix} but net {p.net!r} is radix "
                             f"{nets[p.net]}", (p.name, p.net)))

    ids = set()
    for inst in netlist.instances:
        if inst.id in ids:
            err.append(Issue(ErrorKind.BINDING.value, f"duplicate instance id {inst.id!r}", (inst.id,)))
        ids.add(inst.id)
        try:
            spec = netlist.spec(inst)
        except UnknownPrimitiveError as e:
            err.append(Issue(ErrorKind.BINDING.value, f"{inst.id}: {e.args[0]}", (inst.id,)))
            continue
        names = {p.name for p in spec.ports}
        for pname in sorted(set(inst.bindings) - names):
            err.append(Issue(ErrorKind.BINDING.value,
                             f"{inst.id}: {spec.key} has no port {pname!r}", (inst.id,)))
        for p in spec.ports:
            net = inst.bindings.get(p.name)
            if net is None:
                err.append(Issue(ErrorKind.BINDING.value, f"{inst.id}.{p.name} is unbound", (inst.id,)))
                continue
            if net not in nets:
                err.append(Issue(ErrorKind.BINDING.value,
                                 f"{inst.id}.{p.name} bound to unknown net {net!r}", (inst.id, net)))
                continue
            r = nets[net]
            if (p.direction == "input" and r > p.radix) or (p.direction == "output" and r != p.radix):
                err.append(Issue(ErrorKind.RADIX_MISMATCH.value,
                                 f"{inst.id}.{p.name} is radix {p.radix} but net {net!r} is radix {r}",
                                 (inst.id, net)))

    drivers, sinks = netlist.connectivity()
    for net in sorted(nets):
        d = drivers.get(net, [])
        if len(d) > 1:
            err.append(Issue(ErrorKind.MULTIPLE_DRIVERS.value,
                             f"net {net!r} has {len(d)} drivers: {', '.join(map(str, d))}",
                             (net,) + tuple(e.owner or e.port for e in d)))
        elif not d:
            readers = [e for e in sinks.get(net, [])]
            if any(e.owner is None for e in readers):
                err.append(Issue(ErrorKind.UNDRIVEN_OUTPUT.value, f"output net {net!r} is undriven", (net,)))
            else:
                err.append(Issue(ErrorKind.UNDRIVEN_NET.value, f"net {net!r} has no driver", (net,)))
        if not sinks.get(net):
            report.warnings.append(Issue("unused_net", f"net {net!r} has no sinks", (net,)))

    cycle = _find_cycle(netlist)
    if cycle:
        err.append(Issue(ErrorKind.CYCLE.value, f"combinational cycle through {' -> '.join(cycle)}",
                         tuple(cycle)))
    return report


def _instance_graph(netlist: Netlist) -> dict[str, set[str]]:
    drivers, sinks = netlist.connectivity()
    succ: dict[str, set[str]] = {i.id: set() for i in netlist.instances}
    for net, ds in drivers.items():
        for d in ds:
            if d.owner is None:
                continue
            for s in sinks.get(net, []):
                if s.owner is not None:
                    succ[d.owner].add(s.owner)
    return succ


def _find_cycle(netlist: Netlist) -> list[str] | None:
    succ = _instance_graph(netlist)
    color = dict.fromkeys(succ, 0)
    for root in sorted(succ):
        if color[root]:
            continue
        stack = [(root, iter(sorted(succ[root])))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
            elif color[nxt] == 1:
                return path[path.index(nxt):] + [nxt]
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(sorted(succ[nxt]))))
                path.append(nxt)
    return None


def _require_valid(netlist: Netlist):
    netlist.validate().raise_for_errors()


def topo_order(netlist: Netlist) -> list[Instance]:
    """Instances in dependency order; ties go to the lexicographically smallest id."""
    if "topo" in netlist._cache:
        return netlist._cache["topo"]
    _require_valid(netlist)
    succ = _instance_graph(netlist)
    indeg = dict.fromkeys(succ, 0)
    for targets in succ.values():
        for t in targets:
            indeg[t] += 1
    heap = [i for i, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        iid = heapq.heappop(heap)
        order.append(iid)
        for t in succ[iid]:
            indeg[t] -= 1
            if indeg[t] == 0:
                heapq.heappush(heap, t)
    by_id = netlist._by_id()
    result = [by_id[i] for i in order]
    netlist._cache["topo"] = result
    return result


def fanout_map(netlist: Netlist) -> dict[str, int]:
    """Sink endpoints (instance input pins and circuit outputs) per net."""
    _, sinks = netlist.connectivity()
    return {net: len(sinks.get(net, [])) for net in sorted(netlist.nets)}


# -- buffering -------------------------------------------------------------

DEFAULT_BUFFERS = {2: "buffer_binary", 3: "buffer_ternary", 4: "buffer_quaternary"}


def insert_buffers(netlist: Netlist, max_fanout: int, buffers: Mapping[int, str] | None = None) -> Netlist:
    """Return a copy in which no net drives more than `max_fanout` sinks.

    Overloaded sinks are split into ceil(sinks / max_fanout) groups, each fed by
    an identity buffer; the original net then drives only the buffers. This
    repeats one level at a time until every net is within the limit.
    """
    if max_fanout < 2:
        raise ValueError("max_fanout must be at least 2")
    _require_valid(netlist)
    buffers = dict(DEFAULT_BUFFERS if buffers is None else buffers)
    catalog = netlist.catalog

    nets = dict(netlist.nets)
    bindings = {i.id: dict(i.bindings) for i in netlist.instances}
    prims = {i.id: i.primitive for i in netlist.instances}
    order = [i.id for i in netlist.instances]
    out_nets = {p.name: p.net for p in netlist.outputs}
    _, sinks0 = netlist.connectivity()
    sinks = {n: list(sinks0.get(n, [])) for n in nets}
    counter = 0

    work = sorted(n for n in nets if len(sinks[n]) > max_fanout)
    while work:
        net = work.pop(0)
        group = sinks[net]
        if len(group) <= max_fanout:
            continue
        radix = nets[net]
        key = buffers.get(radix)
        if key is None or key not in catalog:
            raise MissingBufferError(f"no buffer primitive for radix {radix} (needed by net {net!r})")
        spec = catalog.resolve(key)
        in_port, out_port = spec.inputs[0].name, spec.outputs[0].name
        n_groups = math.ceil(len(group) / max_fanout)
        new_sinks = []
        for g in range(n_groups):
            chunk = group[g * max_fanout:(g + 1) * max_fanout]
            bid = f"{net}~buf{counter}"
            counter += 1
            bnet = bid
            nets[bnet] = radix
            order.append(bid)
            prims[bid] = key
            bindings[bid] = {in_port: net, out_port: bnet}
            for e in chunk:
                if e.owner is None:
                    out_nets[e.port] = bnet
                else:
                    bindings[e.owner][e.port] = bnet
            sinks[bnet] = chunk
            new_sinks.append(Endpoint(bid, in_port))
        sinks[net] = new_sinks
        if len(new_sinks) > max_fanout:
            work.insert(0, net)

    if counter == 0:
        return netlist
    outputs = [PortSpec(p.name, p.direction, p.radix, out_nets[p.name]) for p in netlist.outputs]
    instances = [Instance(i, prims[i], bindings[i]) for i in order]
    attrs = dict(netlist.attrs)
    attrs["buffered"] = {"max_fanout": max_fanout, "buffers": counter}
    # a reported count describes the unbuffered design only
    attrs.pop("reported_tc", None)
    return netlist.replace(outputs=outputs, instances=instances, nets=nets, attrs=attrs)


def flatten(netlist: Netlist) -> Netlist:
    """Expand hierarchy to primitives.

    Generators inline sub-circuits at build time (ids carry a dotted block
    prefix), so a stored netlist is already flat and is returned unchanged.
    """
    return netlist


# -- construction ----------------------------------------------------------

class NetlistBuilder:
    """Incremental, single-owner construction of a :class:`Netlist`."""

    def __init__(self, name: str, catalog: Catalog | None = None):
        self.name = name
        self.catalog = catalog if catalog is not None else builtin_catalog()
        self.inputs: list[PortSpec] = []
        self.outputs: list[PortSpec] = []
        self.instances: list[Instance] = []
        self.nets: dict[str, int] = {}
        self._ids: set[str] = set()
        self._auto = defaultdict(int)

    def input(self, name: str, radix: int) -> str:
        if name in self.nets:
            raise ValueError(f"net {name!r} already exists")
        self.inputs.append(inp(name, radix))
        self.nets[name] = radix
        return name

    def output(self, name: str, net: str, radix: int | None = None) -> None:
        if radix is None:
            radix = self.nets[net]
        self.outputs.append(PortSpec(name, "output", radix, net))

    def net(self, name: str, radix: int) -> str:
        if name in self.nets:
            raise ValueError(f"net {name!r} already exists")
        self.nets[name] = radix
        return name

    def fresh_id(self, stem: str) -> str:
        while True:
            n = self._auto[stem]
            self._auto[stem] += 1
            iid = f"{stem}{n}"
            if iid not in self._ids:
                return iid

    def add(self, primitive: str, id: str | None = None, outputs: Mapping[str, str] | None = None,
            **inputs: str) -> dict[str, str]:
        """Instantiate `primitive`, binding its inputs to existing nets.

        Output pins not named in `outputs` get fresh nets ``<id>.<port>``.
        Returns the output port -> net mapping.
        """
        spec = self.catalog.resolve(primitive)
        iid = id if id is not None else self.fresh_id(spec.name + "_")
        if iid in self._ids:
            raise ValueError(f"instance id {iid!r} already used")
        self._ids.add(iid)
        bindings = dict(inputs)
        produced = {}
        for p in spec.outputs:
            net = (outputs or {}).get(p.name) or f"{iid}.{p.name}"
            if net not in self.nets:
                self.nets[net] = p.radix
            bindings[p.name] = net
            produced[p.name] = net
        self.instances.append(Instance(iid, primitive, bindings))
        return produced

    def inline(self, sub: Netlist, prefix: str, **inputs: str) -> dict[str, str]:
        """Copy `sub` into this circuit under `prefix`; return its output port -> net map."""
        rename = {}
        for p in sub.inputs:
            if p.name not in inputs:
                raise ValueError(f"inline {sub.name}: input {p.name!r} not connected")
            rename[p.name] = inputs[p.name]
        for net, radix in sub.nets.items():
            if net not in rename:
                rename[net] = self.net(f"{prefix}.{net}", radix)
        for inst in sub.instances:
            iid = f"{prefix}.{inst.id}"
            if iid in self._ids:
                raise ValueError(f"instance id {iid!r} already used")
            self._ids.add(iid)
            self.instances.append(Instance(iid, inst.primitive,
                                           {k: rename[v] for k, v in inst.bindings.items()}))
        return {p.name: rename[p.net] for p in sub.outputs}

    def build(self, **attrs) -> Netlist:
        return Netlist(self.name, self.inputs, self.outputs, self.instances, self.nets,
                       catalog=self.catalog, attrs=attrs)
