"""Pipeline-register insertion with output-latency balancing.

Every node gets a lag ``r(v)``: the number of pipeline registers between the
inputs and that node's output. Walking the graph in topological order, a
node takes the largest lag among its drivers and accumulates combinational
delay from drivers on that same lag; drivers on a smaller lag reach it
through freshly inserted registers and contribute nothing. When the sum
would exceed the stage budget, the node moves one lag further, which places
a register on each of its inputs. Outputs are all pinned to the largest
lag ``D``. Each edge ``u -> v`` then carries ``r(v) - r(u)`` new registers.

Since ``r`` never decreases along an edge, every input-to-output path gains
exactly ``D`` registers and no arithmetic is reordered, so the result is
bit-exact to the original delayed by ``D`` cycles.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InfeasibleBudgetError
from .graph import DataflowGraph, DelayModel, DfgNode, Edge

_EPS = 1e-9


@dataclass(frozen=True)
class RetimingResult:
    graph: DataflowGraph
    latency: int
    registers_added: int
    lags: dict


def insert_pipeline_registers(graph, model=None, stage_budget=None, scope=None):
    """Cut ``graph`` so no register-to-register path exceeds ``stage_budget``.

    Parameters
    ----------
    graph : DataflowGraph
        A feed-forward netlist.
    model : DelayModel, optional
    stage_budget : float
        Target combinational delay per stage. Defaults to the largest node
        delay in ``model``.
    scope : collection of int, optional
        Only these nodes may be cut; other nodes keep their arrival even if
        it exceeds the budget (alignment registers are still inserted).
    """
    model = model or DelayModel()
    if stage_budget is None:
        stage_budget = model.max_node_delay
    floor = model.max_node_delay + model.routing
    if stage_budget < floor - _EPS:
        raise InfeasibleBudgetError(
            f"stage budget {stage_budget:g} is below the largest single-node delay {floor:g}"
        )
    in_scope = (lambda nid: True) if scope is None else set(scope).__contains__

    lag = {}
    arrive = {}  # arrival at the node output, measured from its stage start
    for nid in graph.full_order():
        node = graph.node(nid)
        drivers = graph.drivers(nid)
        if node.kind == "input":
            lag[nid], arrive[nid] = 0, 0.0
        elif node.kind == "register":
            lag[nid], arrive[nid] = lag[drivers[0]], 0.0
        elif node.kind == "output":
            continue
        else:
            own = model.delay(node.kind)
            base = max((lag[d] for d in drivers), default=0)
            incoming = [
                (arrive[d] if lag[d] == base else 0.0) + model.routing for d in drivers
            ]
            t = own + max(incoming, default=0.0)
            if t + model.routing > stage_budget + _EPS and in_scope(nid):
                base += 1
                t = own + (model.routing if drivers else 0.0)
            lag[nid], arrive[nid] = base, t

    latency = max((lag[graph.drivers(o)[0]] for o in graph.outputs), default=0)
    for o in graph.outputs:
        lag[o] = latency

    nodes = list(graph.nodes)
    edges = []
    next_id = max(n.id for n in nodes) + 1
    taps = {}  # source -> {depth: register id}

    def delayed(src, depth):
        nonlocal next_id
        line = taps.setdefault(src, {0: src})
        have = max(d for d in line if d <= depth)
        prev = line[have]
        for d in range(have + 1, depth + 1):
            nodes.append(DfgNode(next_id, "register", role="pipeline"))
            edges.append(Edge(prev, next_id, 0))
            line[d] = prev = next_id
            next_id += 1
        return line[depth]

    for e in sorted(graph.edges, key=lambda e: (e.dst, e.port)):
        extra = lag[e.dst] - lag[e.src] if graph.node(e.dst).kind != "register" else 0
        edges.append(Edge(delayed(e.src, extra) if extra else e.src, e.dst, e.port))

    meta = dict(graph.meta)
    meta["latency"] = int(meta.get("latency", 0)) + latency
    meta["stage_budget"] = stage_budget
    added = len(nodes) - len(graph.nodes)
    result = DataflowGraph(nodes, edges, graph.inputs, graph.outputs, graph.selects, meta)
    return RetimingResult(result.validate(), latency, added, lag)


def filter_scope(graph):
    """Node ids of the prototype-filter section (everything tagged ``filter``)."""
    return {n.id for n in graph.nodes if n.role == "filter"}

