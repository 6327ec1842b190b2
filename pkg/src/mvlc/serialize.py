"""Netlist JSON documents: ``{name, ports[], instances[], nets[], attrs}``."""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .catalog import Catalog, PortSpec
from .netlist import Instance, Netlist, topo_order

FORMAT = "mvlc-netlist/1"

SCHEMA = {
    "type": "object",
    "required": ["name", "ports", "instances", "nets"],
    "properties": {
        "format": {"const": FORMAT},
        "name": {"type": "string"},
        "ports": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "direction", "radix"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "direction": {"enum": ["input", "output"]},
                    "radix": {"enum": [2, 3, 4]},
                    "net": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
        "instances": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "primitive", "bindings"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "primitive": {"type": "string"},
                    "bindings": {"type": "object", "additionalProperties": {"type": "string"}},
                },
                "additionalProperties": False,
            },
        },
        "nets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "radix"],
                "properties": {"id": {"type": "string"}, "radix": {"enum": [2, 3, 4]}},
                "additionalProperties": False,
            },
        },
        "attrs": {"type": "object"},
    },
    "additionalProperties": False,
}


class FormatError(ValueError):
    pass


def to_dict(netlist: Netlist) -> dict:
    ports = []
    for p in netlist.inputs:
        ports.append({"name": p.name, "direction": "input", "radix": p.radix})
    for p in netlist.outputs:
        ports.append({"name": p.name, "direction": "output", "radix": p.radix, "net": p.net})
    return {
        "format": FORMAT,
        "name": netlist.name,
        "ports": ports,
        "instances": [{"id": i.id, "primitive": i.primitive, "bindings": dict(sorted(i.bindings.items()))}
                      for i in netlist.instances],
        "nets": [{"id": n, "radix": r} for n, r in sorted(netlist.nets.items())],
        "attrs": netlist.attrs,
    }


def from_dict(doc: dict, catalog: Catalog | None = None) -> Netlist:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as e:
        path = "/".join(str(x) for x in e.absolute_path)
        raise FormatError(f"invalid netlist document at '{path}': {e.message}") from None
    inputs, outputs = [], []
    for p in doc["ports"]:
        spec = PortSpec(p["name"], p["direction"], p["radix"], p.get("net"))
        (inputs if spec.direction == "input" else outputs).append(spec)
    instances = [Instance(i["id"], i["primitive"], i["bindings"]) for i in doc["instances"]]
    nets = {}
    for n in doc["nets"]:
        if n["id"] in nets:
            raise FormatError(f"net {n['id']!r} declared twice")
        nets[n["id"]] = n["radix"]
    return Netlist(doc["name"], inputs, outputs, instances, nets, catalog=catalog,
                   attrs=doc.get("attrs") or {})


def dumps(netlist: Netlist) -> str:
    return json.dumps(to_dict(netlist), indent=2) + "\n"


def loads(text: str, catalog: Catalog | None = None) -> Netlist:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"not JSON: {e}") from None
    return from_dict(doc, catalog)


def save(netlist: Netlist, path) -> None:
    Path(path).write_text(dumps(netlist), encoding="utf-8")


def load(path, catalog: Catalog | None = None) -> Netlist:
    return loads(Path(path).read_text(encoding="utf-8"), catalog)


def canonical(netlist: Netlist) -> dict:
    """Id-independent form: instances renamed u0.. in topological order, internal nets n0.. in
    order of first definition. Port names are kept. Two netlists are isomorphic under this
    canonicalization iff their canonical forms are equal."""
    order = topo_order(netlist)
    net_names = {p.name: p.name for p in netlist.inputs}
    inst_names = {}
    for k, inst in enumerate(order):
        inst_names[inst.id] = f"u{k}"
        spec = netlist.spec(inst)
        for p in spec.outputs:
            net = inst.bindings[p.name]
            net_names.setdefault(net, f"n{len(net_names) - len(netlist.inputs)}")
    for net in sorted(netlist.nets):
        net_names.setdefault(net, f"n{len(net_names) - len(netlist.inputs)}")
    return {
        "ports": sorted((p.name, p.direction, p.radix, net_names.get(p.net) if p.net else None)
                        for p in netlist.inputs + netlist.outputs),
        "instances": [(inst_names[i.id], i.primitive, tuple(sorted((k, net_names[v])
                       for k, v in i.bindings.items()))) for i in order],
        "nets": sorted((net_names[n], r) for n, r in netlist.nets.items()),
    }


def isomorphic(a: Netlist, b: Netlist) -> bool:
    return canonical(a) == canonical(b)
