"""Register-level dataflow graph.

Node kinds
----------
``input``       stream source, no data inputs
``output``      stream sink, one data input
``const_mult``  multiply by a constant ``coeff`` (real, or complex for twiddles)
``adder``       two data inputs, ports 0 and 1
``mux``         ``ways`` data inputs; select line ``sel`` with value ``m``
                routes port ``m - 1``; an unconnected port reads as zero
``register``    one cycle of delay, one data input

Every node also carries a free-form ``role`` tag (``"filter"``, ``"idft"``,
``"pipeline"``, ...) used for scoped analyses, and optional ``branch`` /
``factor`` annotations.

File schema (JSON)::

    {"nodes":   [{"id", "kind", "role"?, "coeff"?, "sel"?, "ways"?, "branch"?, "factor"?}],
     "edges":   [{"from", "to", "port"}],
     "inputs":  [id, ...],
     "outputs": [id, ...],
     "selects": {"sel_p": max_value, "sel_M": max_value},
     "meta":    {...}}

A complex ``coeff`` is written as ``[re, im]``.
"""

from __future__ import annotations

import graphlib
import json
from dataclasses import dataclass, field
from types import MappingProxyType

from ..errors import StructuralError

KINDS = ("input", "output", "const_mult", "adder", "mux", "register")
COMBINATIONAL = ("const_mult", "adder", "mux")
_ARITY = {"input": 0, "output": 1, "const_mult": 1, "adder": 2, "register": 1}


@dataclass(frozen=True)
class DfgNode:
    id: int
    kind: str
    coeff: complex | float | None = None
    sel: str | None = None
    ways: int | None = None
    role: str | None = None
    branch: int | None = None
    factor: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise StructuralError(f"node {self.id}: unknown kind {self.kind!r}")

    @property
    def arity(self):
        return self.ways if self.kind == "mux" else _ARITY[self.kind]


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    port: int = 0


@dataclass(frozen=True)
class DelayModel:
    """Per-kind combinational delays plus register timing, in model time units."""

    const_mult: float = 2.0
    adder: float = 1.0
    mux: float = 0.5
    register: float = 0.1  # clock-to-out
    t_setup: float = 0.1
    t_hold: float = 0.05
    routing: float = 0.0  # per traversed edge

    def __post_init__(self):
        values = (self.const_mult, self.adder, self.mux, self.register,
                  self.t_setup, self.t_hold, self.routing)
        if min(values) < 0:
            raise ValueError("delays must be non-negative")
        if self.register + self.t_setup <= 0:
            raise ValueError("register clock-to-out plus setup must be positive")

    def delay(self, kind):
        return getattr(self, kind) if kind in COMBINATIONAL else 0.0

    @property
    def max_node_delay(self):
        return max(self.const_mult, self.adder, self.mux)


class DataflowGraph:
    """Immutable netlist. Build one with :class:`GraphBuilder`."""

    def __init__(self, nodes, edges, inputs, outputs, selects=None, meta=None):
        self.nodes = tuple(sorted(nodes, key=lambda n: n.id))
        self.edges = tuple(edges)
        self.inputs = tuple(inputs)
        self.outputs = tuple(outputs)
        self.selects = MappingProxyType(dict(selects or {}))
        self.meta = MappingProxyType(dict(meta or {}))
        self._by_id = {n.id: n for n in self.nodes}
        if len(self._by_id) != len(self.nodes):
            raise StructuralError("duplicate node ids")
        fanin = {n.id: {} for n in self.nodes}
        fanout = {n.id: [] for n in self.nodes}
        for e in self.edges:
            if e.src not in self._by_id or e.dst not in self._by_id:
                raise StructuralError(f"edge {e} references an unknown node")
            if e.port in fanin[e.dst]:
                raise StructuralError(f"node {e.dst} port {e.port} driven twice")
            fanin[e.dst][e.port] = e.src
            fanout[e.src].append(e.dst)
        self._fanin = {k: MappingProxyType(v) for k, v in fanin.items()}
        self._fanout = {k: tuple(v) for k, v in fanout.items()}

    def __len__(self):
        return len(self.nodes)

    def node(self, nid):
        return self._by_id[nid]

    def fanin(self, nid):
        """``{port: driver id}`` for node ``nid``."""
        return self._fanin[nid]

    def drivers(self, nid):
        return [self._fanin[nid][p] for p in sorted(self._fanin[nid])]

    def fanout(self, nid):
        return self._fanout[nid]

    def of_kind(self, kind):
        return [n for n in self.nodes if n.kind == kind]

    def combinational_order(self):
        """Topological order of the graph with register outputs cut.

        Raises :class:`StructuralError` naming the cycle if combinational
        logic loops back on itself.
        """
        ts = graphlib.TopologicalSorter()
        for n in self.nodes:
            ts.add(n.id)
            if n.kind != "register":
                for src in self._fanin[n.id].values():
                    if self._by_id[src].kind != "register":
                        ts.add(n.id, src)
        try:
            return list(ts.static_order())
        except graphlib.CycleError as exc:
            cycle = exc.args[1]
            raise StructuralError(f"combinational cycle through nodes {cycle}", cycle) from None

    def full_order(self):
        """Topological order including register edges; fails on any feedback loop."""
        ts = graphlib.TopologicalSorter()
        for n in self.nodes:
            ts.add(n.id, *self._fanin[n.id].values())
        try:
            return list(ts.static_order())
        except graphlib.CycleError as exc:
            raise StructuralError(f"feedback loop through nodes {exc.args[1]}", exc.args[1]) from None

    def validate(self):
        """Check arity, consumers, reachability and combinational acyclicity."""
        for n in self.nodes:
            ports = self._fanin[n.id]
            if n.kind == "mux":
                if not n.ways or n.sel is None:
                    raise StructuralError(f"mux {n.id} needs ways and a select line")
                if n.sel not in self.selects:
                    raise StructuralError(f"mux {n.id} uses unregistered select {n.sel!r}")
                if any(p >= n.ways for p in ports):
                    raise StructuralError(f"mux {n.id} has a port beyond {n.ways} ways")
            elif set(ports) != set(range(n.arity)):
                raise StructuralError(
                    f"{n.kind} {n.id} expects ports {list(range(n.arity))}, has {sorted(ports)}"
                )
            if n.kind != "output" and not self._fanout[n.id]:
                raise StructuralError(f"{n.kind} {n.id} has no consumer")
        for nid in self.inputs:
            if self.node(nid).kind != "input":
                raise StructuralError(f"declared input {nid} is not an input node")
        for nid in self.outputs:
            if self.node(nid).kind != "output":
                raise StructuralError(f"declared output {nid} is not an output node")
        self.combinational_order()
        seen = set(self.inputs)
        stack = list(self.inputs)
        while stack:
            for nxt in self._fanout[stack.pop()]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        missing = [o for o in self.outputs if o not in seen]
        if missing:
            raise StructuralError(f"outputs {missing} unreachable from the inputs")
        return self

    # -- serialization -------------------------------------------------

    def to_dict(self):
        nodes = []
        for n in self.nodes:
            d = {"id": n.id, "kind": n.kind}
            if n.role is not None:
                d["role"] = n.role
            if n.coeff is not None:
                c = complex(n.coeff)
                d["coeff"] = c.real if isinstance(n.coeff, float) else [c.real, c.imag]
            for key in ("sel", "ways", "branch", "factor"):
                value = getattr(n, key)
                if value is not None:
                    d[key] = value
            nodes.append(d)
        edges = [{"from": e.src, "to": e.dst, "port": e.port}
                 for e in sorted(self.edges, key=lambda e: (e.dst, e.port))]
        return {
            "nodes": nodes,
            "edges": edges,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "selects": dict(self.selects),
            "meta": dict(self.meta),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, data):
        nodes = []
        for d in data["nodes"]:
            coeff = d.get("coeff")
            if isinstance(coeff, list):
                coeff = complex(coeff[0], coeff[1])
            nodes.append(DfgNode(
                id=int(d["id"]), kind=d["kind"], coeff=coeff, sel=d.get("sel"),
                ways=d.get("ways"), role=d.get("role"), branch=d.get("branch"),
                factor=d.get("factor"),
            ))
        edges = [Edge(int(e["from"]), int(e["to"]), int(e.get("port", 0))) for e in data["edges"]]
        return cls(nodes, edges, data["inputs"], data["outputs"],
                   data.get("selects"), data.get("meta")).validate()

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructuralError(f"graph file is not valid JSON: {exc}") from None
        return cls.from_dict(data)


@dataclass
class GraphBuilder:
    """Mutable helper that hands out sequential node ids."""

    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    selects: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, kind, *drivers, **attrs):
        nid = len(self.nodes)
        self.nodes.append(DfgNode(nid, kind, **attrs))
        for port, src in enumerate(drivers):
            if src is not None:
                self.connect(src, nid, port)
        if kind == "input":
            self.inputs.append(nid)
        elif kind == "output":
            self.outputs.append(nid)
        return nid

    def connect(self, src, dst, port=0):
        self.edges.append(Edge(src, dst, port))

    def delay(self, src, depth, **attrs):
        """Chain ``depth`` registers after ``src``; returns the last one."""
        for _ in range(depth):
            src = self.add("register", src, **attrs)
        return src

    def build(self):
        return DataflowGraph(self.nodes, self.edges, self.inputs, self.outputs,
                             self.selects, self.meta).validate()

