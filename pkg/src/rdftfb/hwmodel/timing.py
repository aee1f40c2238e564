"""Static timing: longest register-to-register combinational path.

A path launches at an input or a register output, runs through
combinational nodes only, and is captured at a register input or an output.
Its delay is the sum of the node delays (plus per-edge routing, zero by
default). Clock-to-out and setup enter the clock period, not the path.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

from .graph import COMBINATIONAL, DelayModel

_TIE = 1e-9


@dataclass(frozen=True)
class PathEnd:
    capture: int
    launch: int | None
    delay: float
    path: tuple


@dataclass(frozen=True)
class TimingReport:
    tau_cpd: float
    critical_path: tuple
    kinds: tuple
    launch: int | None
    capture: int
    f_clk_max: float
    min_clock_period: float
    strict_clock_period: float
    min_path_delay: float
    hold_slack: float
    model: DelayModel
    endpoints: tuple = ()

    @property
    def f_clk_achievable(self):
        return 1.0 / self.min_clock_period

    @property
    def hold_ok(self):
        return self.hold_slack >= 0

    def clock_period(self, strict=False):
        return self.strict_clock_period if strict else self.min_clock_period

    def to_text(self, strict=False):
        lines = [
            f"tau_cpd            {self.tau_cpd:.6g}",
            f"f_clk_max (1/tau)  {_fmt_freq(self.f_clk_max)}",
            f"T_clk >            {self.clock_period(strict):.6g}"
            + ("  (tau + t_setup + t_hold)" if strict else "  (tau + t_setup + clk-to-out)"),
            f"hold slack         {self.hold_slack:.6g}",
            f"launch             {self.launch}",
            f"capture            {self.capture}",
            "",
            f"{'#':>3}  {'node':>6}  {'kind':<10}  {'delay':>7}  {'cum':>7}",
        ]
        cum = 0.0
        for i, (nid, kind) in enumerate(zip(self.critical_path, self.kinds), start=1):
            d = self.model.delay(kind)
            cum += d
            lines.append(f"{i:>3}  {nid:>6}  {kind:<10}  {d:>7.4g}  {cum:>7.4g}")
        return "\n".join(lines) + "\n"

    def to_csv(self, graph, top=1):
        buf = io.StringIO()
        buf.write("path_rank,node_id,kind,delay,cum_delay\n")
        for rank, end in enumerate(self.endpoints[:top], start=1):
            cum = 0.0
            for nid in end.path:
                kind = graph.node(nid).kind
                d = self.model.delay(kind)
                cum += d
                buf.write(f"{rank},{nid},{kind},{d:.12g},{cum:.12g}\n")
        return buf.getvalue()


def _fmt_freq(f):
    return "inf" if math.isinf(f) else f"{f:.6g}"


def _better(a_delay, a_path, b_delay, b_path):
    """True if (a_delay, a_path) beats the incumbent (b_delay, b_path)."""
    if a_delay > b_delay + _TIE:
        return True
    if a_delay < b_delay - _TIE:
        return False
    return a_path < b_path


def critical_path(graph, model=None, scope=None):
    """Longest combinational path of ``graph`` under ``model``.

    Ties are broken by the lexicographically smallest node-id sequence. With
    ``scope`` (a collection of node ids) only paths made entirely of scoped
    nodes are considered; leaving the scope counts as a capture.
    """
    model = model or DelayModel()
    order = graph.combinational_order()
    in_scope = (lambda nid: True) if scope is None else set(scope).__contains__
    best = {}  # nid -> (delay, path, launch) for combinational nodes
    shortest = {}
    ends = []

    def arrival(src):
        node = graph.node(src)
        if node.kind in COMBINATIONAL and src in best:
            d, p, launch = best[src]
            return d, p, launch, shortest[src]
        return 0.0, (), src, 0.0

    for nid in order:
        node = graph.node(nid)
        if node.kind not in COMBINATIONAL or not in_scope(nid):
            continue
        drivers = graph.drivers(nid)
        own = model.delay(node.kind)
        cand = None
        low = math.inf
        for src in drivers:
            d, p, launch, s = arrival(src)
            d += model.routing + own
            p = p + (nid,)
            low = min(low, s + model.routing + own)
            if cand is None or _better(d, p, cand[0], cand[1]):
                cand = (d, p, launch)
        if cand is None:  # all mux ports tied to zero
            cand = (own, (nid,), None)
            low = own
        best[nid] = cand
        shortest[nid] = low

    for nid in order:
        node = graph.node(nid)
        captured = node.kind in ("register", "output") or (
            node.kind in COMBINATIONAL and not in_scope(nid)
        )
        if not captured:
            continue
        for src in graph.drivers(nid):
            if graph.node(src).kind in COMBINATIONAL and src not in best:
                continue  # driven from outside the scope
            d, p, launch, s = arrival(src)
            extra = model.routing if p else 0.0
            ends.append((PathEnd(nid, launch, d + extra, p), s + extra))

    if not ends:
        raise ValueError("graph has no timing endpoints")
    ends.sort(key=lambda e: (-round(e[0].delay / _TIE), e[0].path, e[0].capture))
    top = ends[0][0]
    min_delay = min(s for _, s in ends)
    tau = top.delay
    return TimingReport(
        tau_cpd=tau,
        critical_path=top.path,
        kinds=tuple(graph.node(n).kind for n in top.path),
        launch=top.launch,
        capture=top.capture,
        f_clk_max=math.inf if tau == 0 else 1.0 / tau,
        min_clock_period=tau + model.t_setup + model.register,
        strict_clock_period=tau + model.t_setup + model.t_hold,
        min_path_delay=min_delay,
        hold_slack=min_delay - (model.t_hold - model.register),
        model=model,
        endpoints=tuple(_distinct_endpoints(e for e, _ in ends)),
    )


def _distinct_endpoints(ends):
    seen = set()
    for e in ends:
        if e.capture not in seen:
            seen.add(e.capture)
            yield e
