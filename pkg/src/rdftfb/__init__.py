"""Reconfigurable DFT filter-bank workbench.

Functional channelizer with coefficient-decimation bandwidth retuning, plus
a register-level model of the same datapath for timing, pipelining and
equivalence checking.
"""

from .cdm import CdmConfig, DecimatedFilter, check_aliasing, decimate_coefficients, decimated_response
from .channelizer import (
    Channelizer,
    PolyphaseBank,
    SubbandFrame,
    measure_center_frequency,
    polyphase_decompose,
    reference_subband,
)
from .filterdesign import (
    FilterSpec,
    FrequencyResponse,
    PrototypeFilter,
    design_kaiser,
    frequency_response,
    load_coefficients,
    measure_edges,
)

__version__ = "0.1.0"

__all__ = [
    "CdmConfig",
    "Channelizer",
    "DecimatedFilter",
    "FilterSpec",
    "FrequencyResponse",
    "PolyphaseBank",
    "PrototypeFilter",
    "SubbandFrame",
    "check_aliasing",
    "decimate_coefficients",
    "decimated_response",
    "design_kaiser",
    "frequency_response",
    "load_coefficients",
    "measure_center_frequency",
    "measure_edges",
    "polyphase_decompose",
    "reference_subband",
]
