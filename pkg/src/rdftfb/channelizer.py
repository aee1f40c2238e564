"""Sample-accurate reconfigurable DFT filter bank.

Subband ``k`` is the input convolved with the modulated prototype
``g[i] * exp(+j*2*pi*k*i/N)``. The streaming model computes it the way the
hardware does: ``N`` polyphase branches ``E_p(z^N) z^-p`` feeding an
``N``-point inverse-DFT matrix, with coefficient decimation realized as a
strided read of the fixed coefficient memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cdm import CdmConfig, max_factor as aliasing_max_factor, require_factor
from .errors import InvalidSubbandCountError, NonFiniteSampleError
from .filterdesign import DEFAULT_EDGE_DB, DEFAULT_POINTS, frequency_response, measure_edges


def twiddle_matrix(N):
    """``W[k, i] = exp(+j*2*pi*k*i/N)`` with quarter-turn entries made exact."""
    k = np.arange(N)
    phase = np.outer(k, k) % N
    W = np.exp(2j * np.pi * phase / N)
    exact = {0: 1, N / 4: 1j, N / 2: -1, 3 * N / 4: -1j}
    for turn, value in exact.items():
        W[phase == turn] = value
    return W


@dataclass(frozen=True)
class PolyphaseBank:
    branches: np.ndarray  # (N, P) zero-padded, branches[p, q] = h[p + q*N]
    twiddles: np.ndarray  # (N, N)
    num_subbands: int
    source_length: int

    def branch(self, p):
        """Unpadded coefficients of branch ``p``."""
        return self.branches[p, : len(range(p, self.source_length, self.num_subbands))]

    def interleave(self):
        """Rebuild the prototype by re-interleaving the branches."""
        return self.branches.T.reshape(-1)[: self.source_length]


def check_subbands(N):
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidSubbandCountError(f"number of subbands must be an integer >= 2, got {N!r}")


def polyphase_decompose(proto, N):
    check_subbands(N)
    L = len(proto)
    P = math.ceil(L / N)
    padded = np.zeros(P * N)
    padded[:L] = proto.coeffs
    branches = padded.reshape(P, N).T.copy()
    branches.setflags(write=False)
    W = twiddle_matrix(N)
    W.setflags(write=False)
    return PolyphaseBank(branches, W, int(N), L)


def cdm_selection(L, N, M):
    """Memory index for each multiplier slot (branch p, tap q) under factor M.

    Slot ``(p, q)`` reads ``h[(p + q*N) * M]``; slots past the end read the
    sentinel index ``L`` (a zero word).
    """
    P = math.ceil(L / N)
    p = np.arange(N)[:, None]
    q = np.arange(P)[None, :]
    idx = (p + q * N) * M
    return np.where(idx < L, idx, L)


@dataclass(frozen=True)
class SubbandFrame:
    outputs: np.ndarray
    sample_index: int


class Channelizer:
    """Streaming state for one RDFTFB instance.

    Coefficient memory is loaded once; :meth:`set_decimation` only changes
    which words each multiplier slot reads. Not safe for concurrent use.

    Parameters
    ----------
    proto : PrototypeFilter
        The fixed prototype lowpass.
    num_subbands : int
        Number of subbands ``N``.
    max_factor : int, optional
        Largest decimation factor the instance supports. Defaults to the
        largest factor allowed by the aliasing bound (or 1 when the prototype
        bandwidth is unknown).
    """

    def __init__(self, proto, num_subbands, max_factor=None, factor=1):
        self.proto = proto
        self.bank = polyphase_decompose(proto, num_subbands)
        self.N = num_subbands
        self._memory = np.append(proto.coeffs, 0.0)
        self._memory.setflags(write=False)
        self._taps = self.bank.branches.shape[1]
        if max_factor is None:
            f_o = proto.nominal_bandwidth
            max_factor = aliasing_max_factor(f_o) if f_o is not None else 1
        require_factor(proto, max_factor)
        self._max_factor = max_factor
        self.set_decimation(factor)
        self.reset()

    @property
    def factor(self):
        return self.config.factor

    @property
    def delay_line_length(self):
        return self.N * self._taps

    def reset(self):
        self._line = np.zeros(self.delay_line_length, dtype=complex)
        self._count = 0

    def set_decimation(self, M):
        """Switch to CDM factor ``M``; the delay line is left untouched."""
        require_factor(self.proto, M)
        config = CdmConfig(int(M), self._max_factor)
        self._select = cdm_selection(len(self.proto), self.N, config.factor)
        self.config = config

    def active_branches(self):
        """(N, P) coefficients currently seen by the multiplier slots."""
        return self._memory[self._select]

    def process_sample(self, x):
        x = complex(x)
        if not (math.isfinite(x.real) and math.isfinite(x.imag)):
            raise NonFiniteSampleError(f"non-finite input sample {x!r} at index {self._count}")
        line = self._line
        line[1:] = line[:-1]
        line[0] = x
        # line[p + q*N] = x[n - p - q*N]
        taps = line.reshape(self._taps, self.N).T
        branch_out = np.sum(self._memory[self._select] * taps, axis=1)
        frame = SubbandFrame(self.bank.twiddles @ branch_out, self._count)
        self._count += 1
        return frame

    def process(self, samples):
        """Run a whole stream; returns an array of shape ``(len(samples), N)``."""
        samples = np.asarray(samples, dtype=complex)
        out = np.empty((samples.size, self.N), dtype=complex)
        for n, x in enumerate(samples):
            out[n] = self.process_sample(x).outputs
        return out


def modulated_filter(g, k, N):
    i = np.arange(len(g))
    return np.asarray(g, dtype=float) * np.exp(2j * np.pi * k * i / N)


def reference_subband(x, g, k, N):
    """Brute-force ``y_k[n] = sum_i g[i] x[n-i] exp(+j*2*pi*k*i/N)``.

    Direct-form convolution with the modulated prototype, kept independent of
    the polyphase path for testing.
    """
    x = np.asarray(x, dtype=complex)
    return np.convolve(x, modulated_filter(g, k, N))[: x.size]


def active_prototype(proto, M):
    """Effective prototype taps under factor M (every M-th coefficient)."""
    require_factor(proto, M)
    return proto.coeffs[::M]


def subband_response(proto, k, N, M=1, num_points=DEFAULT_POINTS):
    """Whole-circle response of subband ``k`` under CDM factor ``M``."""
    return frequency_response(modulated_filter(active_prototype(proto, M), k, N), num_points, whole=True)


def fold(f):
    """Map a whole-circle frequency to its mirror image in [0, 1]."""
    f = f % 2.0
    return min(f, 2.0 - f)


def subband_band(proto, k, N, M=1, num_points=DEFAULT_POINTS, level_db=DEFAULT_EDGE_DB):
    """``(center, width)`` of subband k from its ``level_db`` edges on the whole circle."""
    low, high = measure_edges(subband_response(proto, k, N, M, num_points), level_db)
    return (0.5 * (low + high)) % 2.0, high - low


def measure_center_frequency(k, M, proto, N, num_points=DEFAULT_POINTS):
    """Centre of subband ``k`` folded into [0, 1].

    The peak region is located from the magnitude maximum and its centre is
    the midpoint of the -6 dB edges, which is immune to passband ripple.
    """
    if not 0 <= k < N:
        raise ValueError(f"subband index {k} outside 0..{N - 1}")
    return fold(subband_band(proto, k, N, M, num_points)[0])
