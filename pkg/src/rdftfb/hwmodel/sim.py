"""Cycle-accurate simulation and sequential equivalence checking.

The netlist is compiled into straight-line Python for one clock cycle:
register outputs are read, combinational nodes are evaluated in topological
order, then all registers load their inputs at once. Mux selects are fixed
for a run and resolved at compile time. Stimuli may be batched, in which
case every node value is a numpy vector over the batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import SelectRangeError, StructuralError


def _resolve_selects(graph, sel_M, selects):
    values = {name: sel_M for name in graph.selects}
    values.update(selects or {})
    for name, value in values.items():
        top = graph.selects.get(name)
        if top is None:
            raise SelectRangeError(f"unknown select line {name!r}")
        if not 1 <= value <= top:
            raise SelectRangeError(f"{name}={value} outside 1..{top}")
    return values


def _compile(graph, selects):
    regs = [n.id for n in graph.nodes if n.kind == "register"]
    body = []
    for nid in graph.combinational_order():
        node = graph.node(nid)
        fanin = graph.fanin(nid)
        if node.kind == "input":
            body.append(f"v{nid} = x[t, {graph.inputs.index(nid)}]")
        elif node.kind == "const_mult":
            body.append(f"v{nid} = {node.coeff!r} * v{fanin[0]}")
        elif node.kind == "adder":
            body.append(f"v{nid} = v{fanin[0]} + v{fanin[1]}")
        elif node.kind == "mux":
            src = fanin.get(selects[node.sel] - 1)
            body.append(f"v{nid} = " + (f"v{src}" if src is not None else "0j"))
        elif node.kind == "output":
            body.append(f"y[t, {graph.outputs.index(nid)}] = v{fanin[0]}")
    lines = ["def run(x, y, T):"]
    for r in regs:
        lines.append(f"    v{r} = 0j")
    lines.append("    for t in range(T):")
    lines.extend("        " + s for s in body)
    if regs:
        targets = ", ".join(f"v{r}" for r in regs)
        sources = ", ".join(f"v{graph.fanin(r)[0]}" for r in regs)
        lines.append(f"        {targets}, = {sources},")
    namespace = {}
    exec(compile("\n".join(lines), f"<netlist:{len(graph)} nodes>", "exec"), namespace)
    return namespace["run"]


@lru_cache(maxsize=32)
def _compiled(graph, select_items):
    return _compile(graph, dict(select_items))


def simulate(graph, stimulus, sel_M=1, cycles=None, selects=None):
    """Run ``graph`` on ``stimulus`` from the all-zero reset state.

    Parameters
    ----------
    stimulus : array_like
        Shape ``(T,)`` for a single stream or ``(S, T)`` for a batch of S
        streams. Samples past the end of the stimulus are zero.
    sel_M : int
        Decimation factor applied to every select line.
    cycles : int, optional
        Number of clock cycles; defaults to the stimulus length.
    selects : dict, optional
        Per-line overrides.

    Returns
    -------
    ndarray
        ``(num_outputs, cycles)`` or ``(S, num_outputs, cycles)``, complex.
    """
    x = np.asarray(stimulus, dtype=complex)
    batched = x.ndim == 2
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise ValueError("stimulus must be 1-D or 2-D")
    S, T = x.shape
    cycles = T if cycles is None else int(cycles)
    values = _resolve_selects(graph, sel_M, selects)
    run = _compiled(graph, tuple(sorted(values.items())))

    n_in = max(len(graph.inputs), 1)
    drive = np.zeros((cycles, n_in, S), dtype=complex)
    n = min(T, cycles)
    drive[:n, 0, :] = x[:, :n].T
    y = np.zeros((cycles, len(graph.outputs), S), dtype=complex)
    run(drive, y, cycles)
    out = np.transpose(y, (2, 1, 0))
    return out if batched else out[0]


def register_depth(graph):
    """Most registers on any input-to-output path (feed-forward graphs)."""
    try:
        order = graph.full_order()
    except StructuralError:
        return len(graph.of_kind("register"))
    depth = {}
    for nid in order:
        d = max((depth[s] for s in graph.drivers(nid)), default=0)
        depth[nid] = d + (graph.node(nid).kind == "register")
    return max((depth[o] for o in graph.outputs), default=0)


@dataclass(frozen=True)
class Counterexample:
    stimulus: int
    output: int
    cycle: int
    expected: complex
    got: complex
    latency: int


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    latency: int | None
    counterexample: Counterexample | None = None
    unique: bool = True

    def __str__(self):
        if self.equivalent:
            return f"EQUIVALENT, latency D={self.latency}"
        c = self.counterexample
        return (
            f"NOT EQUIVALENT: stimulus {c.stimulus}, output {c.output}, cycle {c.cycle} "
            f"(best shift D={c.latency}): expected {c.expected!r}, got {c.got!r}"
        )


def check_equivalence(g1, g2, stimuli, sel_M=1, max_latency=None):
    """Find the shift ``D`` with ``g2(t + D) == g1(t)`` and ``g2(t < D) == 0``, bit-exactly.

    Both graphs are run on every stimulus (zero-padded to a common length)
    for ``T + D_max`` cycles, where ``D_max`` defaults to the register depth
    of ``g2``. The smallest matching shift is returned. When none matches,
    the counterexample reports the first mismatch for the shift that agrees
    the longest; its cycle is counted on ``g2``'s clock.
    """
    if len(g1.inputs) != len(g2.inputs) or len(g1.outputs) != len(g2.outputs):
        raise StructuralError("graphs differ in input/output arity")
    streams = [np.asarray(s, dtype=complex).ravel() for s in stimuli]
    if not streams:
        raise ValueError("need at least one stimulus")
    T = max(s.size for s in streams)
    batch = np.zeros((len(streams), T), dtype=complex)
    for i, s in enumerate(streams):
        batch[i, : s.size] = s
    d_max = register_depth(g2) if max_latency is None else int(max_latency)
    cycles = T + d_max
    y1 = simulate(g1, batch, sel_M, cycles)
    y2 = simulate(g2, batch, sel_M, cycles)

    matches = []
    best = None  # (first mismatch cycle, D, (stimulus, output, cycle))
    for D in range(d_max + 1):
        # g1 delayed by D, with the reset zeros in front
        expected = np.zeros_like(y1)
        expected[:, :, D:] = y1[:, :, : cycles - D]
        bad = expected != y2
        if not bad.any():
            matches.append(D)
            continue
        idx = np.argwhere(bad)
        first = idx[np.argmin(idx[:, 2])]
        if best is None or first[2] > best[0]:
            best = (int(first[2]), D, tuple(int(v) for v in first), complex(expected[tuple(first)]))
    if matches:
        return EquivalenceResult(True, matches[0], unique=len(matches) == 1)
    _, D, (s, o, t), want = best
    return EquivalenceResult(False, None, Counterexample(s, o, t, want, complex(y2[s, o, t]), D))
