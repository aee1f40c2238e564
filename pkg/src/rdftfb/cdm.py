"""Coefficient decimation (CDM-II): keep every M-th tap and close the gaps.

Decimating ``h`` by ``M`` gives ``h'[i] = h[i*M]``, whose response is the
prototype response stretched by ``M`` along the frequency axis. The stored
prototype is never rewritten; only the selection changes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, InvalidFactorError
from .filterdesign import DEFAULT_POINTS, frequency_response


@dataclass(frozen=True)
class AliasingCheck:
    passed: bool
    margin: float


def check_aliasing(f_o, M):
    """Strict bound ``M * f_o < 1`` (f_o normalized to Nyquist)."""
    if not 0.0 < f_o < 1.0:
        raise ValueError(f"bandwidth must lie in (0, 1), got {f_o!r}")
    if M < 1:
        raise InvalidFactorError(f"decimation factor must be >= 1, got {M}")
    margin = 1.0 - M * f_o
    return AliasingCheck(margin > 0, margin)


def max_factor(f_o):
    """Largest M that satisfies the aliasing bound for bandwidth ``f_o``."""
    M = 1
    while check_aliasing(f_o, M + 1).passed:
        M += 1
    return M


@dataclass(frozen=True)
class CdmConfig:
    factor: int = 1
    max_factor: int = 1

    def __post_init__(self):
        if self.max_factor < 1:
            raise InvalidFactorError(f"max_factor must be >= 1, got {self.max_factor}")
        if not 1 <= self.factor <= self.max_factor:
            raise InvalidFactorError(
                f"factor {self.factor} outside the supported range 1..{self.max_factor}"
            )


@dataclass(frozen=True)
class DecimatedFilter:
    coeffs: np.ndarray
    source_length: int
    factor: int

    def __len__(self):
        return self.coeffs.size


def require_factor(proto, M):
    """Raise unless ``M`` is a legal factor for ``proto``."""
    if not isinstance(M, (int, np.integer)) or M < 1:
        raise InvalidFactorError(f"decimation factor must be an integer >= 1, got {M!r}")
    f_o = proto.nominal_bandwidth
    if f_o is not None and not check_aliasing(f_o, M).passed:
        raise AliasingError(M, f_o)


def decimate_indices(length, M):
    return np.arange(0, length, M)


def decimate_coefficients(proto, M):
    require_factor(proto, M)
    coeffs = proto.coeffs[::M].copy()
    coeffs.setflags(write=False)
    return DecimatedFilter(coeffs, len(proto), int(M))


def decimated_response(proto, M, num_points=DEFAULT_POINTS, whole=False):
    return frequency_response(decimate_coefficients(proto, M).coeffs, num_points, whole)
