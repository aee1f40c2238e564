"""Side-by-side timing of the original, filter-only and fully pipelined designs.

Columns are model quantities (delay units, 1/delay, register counts), not
MHz, watts or slices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graph import DelayModel
from .pipeline import filter_scope, insert_pipeline_registers
from .resources import count_resources
from .timing import critical_path


@dataclass(frozen=True)
class ArchitectureRow:
    name: str
    tau_cpd: float
    f_clk_max: float
    registers: int
    latency: int
    speedup: float


def compare_architectures(graph, model=None, stage_budget=None):
    model = model or DelayModel()
    variants = [
        ("original", graph, 0),
    ]
    filt = insert_pipeline_registers(graph, model, stage_budget, scope=filter_scope(graph))
    variants.append(("filter pipelined", filt.graph, filt.latency))
    full = insert_pipeline_registers(graph, model, stage_budget)
    variants.append(("fully pipelined", full.graph, full.latency))

    rows = []
    base = None
    for name, g, latency in variants:
        t = critical_path(g, model)
        if base is None:
            base = t.f_clk_max
        rows.append(ArchitectureRow(
            name=name,
            tau_cpd=t.tau_cpd,
            f_clk_max=t.f_clk_max,
            registers=count_resources(g).registers,
            latency=latency,
            speedup=t.f_clk_max / base,
        ))
    return rows


def format_rows(rows):
    head = (f"{'architecture':<18}{'tau_cpd':>10}{'fmax=1/tau':>12}{'x orig':>8}"
            f"{'registers':>11}{'latency':>9}\n")
    lines = [head, "-" * (len(head) - 1) + "\n"]
    for r in rows:
        fmax = "inf" if math.isinf(r.f_clk_max) else f"{r.f_clk_max:.4f}"
        lines.append(f"{r.name:<18}{r.tau_cpd:>10.4g}{fmax:>12}{r.speedup:>8.3f}"
                     f"{r.registers:>11}{r.latency:>9}\n")
    lines.append("(model units: delays in abstract time units, fmax in 1/unit; not MHz/W)\n")
    return "".join(lines)
