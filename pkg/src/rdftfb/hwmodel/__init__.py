"""Register-level model of the RDFTFB datapath."""

from .build import build_rdftfb_graph
from .graph import DataflowGraph, DelayModel, DfgNode, Edge, GraphBuilder
from .pipeline import RetimingResult, filter_scope, insert_pipeline_registers
from .report import compare_architectures, format_rows
from .resources import ResourceReport, count_resources, extra_adders
from .sim import EquivalenceResult, check_equivalence, register_depth, simulate
from .timing import TimingReport, critical_path

__all__ = [
    "DataflowGraph",
    "DelayModel",
    "DfgNode",
    "Edge",
    "EquivalenceResult",
    "GraphBuilder",
    "ResourceReport",
    "RetimingResult",
    "TimingReport",
    "build_rdftfb_graph",
    "check_equivalence",
    "compare_architectures",
    "count_resources",
    "critical_path",
    "extra_adders",
    "filter_scope",
    "format_rows",
    "insert_pipeline_registers",
    "register_depth",
    "simulate",
]
