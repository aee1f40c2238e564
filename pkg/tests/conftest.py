import numpy as np
import pytest

from rdftfb.filterdesign import FilterSpec, PrototypeFilter, design_kaiser, kaiser_beta, kaiser_lowpass
from rdftfb.hwmodel import build_rdftfb_graph, insert_pipeline_registers

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def spec_v():
    """N=8, transition 0.1, 0.04 dB ripple, 50 dB stopband."""
    return FilterSpec.for_subbands(8, 0.1, 0.04, 50.0)


@pytest.fixture(scope="session")
def proto_v(spec_v):
    return design_kaiser(spec_v)


@pytest.fixture(scope="session")
def proto_60():
    """Kaiser filter at the unverified length estimate (60 taps)."""
    return PrototypeFilter(kaiser_lowpass(60, 0.125, kaiser_beta(50.0)), 0.125)


@pytest.fixture(scope="session")
def graph_v(proto_v):
    return build_rdftfb_graph(proto_v, 8, 5)


@pytest.fixture(scope="session")
def pipelined_v(graph_v):
    return insert_pipeline_registers(graph_v, stage_budget=2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20161)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
