"""Prototype lowpass design, coefficient I/O and frequency-response tools.

All frequencies are normalized to half the sampling rate, so 1.0 is Nyquist
and a full trip around the unit circle spans [0, 2).
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CoefficientParseError, DesignInfeasibleError, EdgeNotFoundError

MAG_FLOOR_DB = -300.0
DEFAULT_POINTS = 4096
DEFAULT_EDGE_DB = -6.0
MAX_TAPS = 4096

_BANDWIDTH_KEY = "nominal_bandwidth:"


@dataclass(frozen=True)
class FilterSpec:
    """Lowpass requirements for the prototype of an N-subband bank."""

    passband_edge: float
    stopband_edge: float
    passband_ripple_db: float
    stopband_atten_db: float
    num_subbands: int

    def __post_init__(self):
        if not 0.0 < self.passband_edge < self.stopband_edge < 1.0:
            raise DesignInfeasibleError(
                f"need 0 < passband_edge < stopband_edge < 1, got "
                f"{self.passband_edge!r}, {self.stopband_edge!r}"
            )
        if self.passband_ripple_db <= 0 or self.stopband_atten_db <= 0:
            raise DesignInfeasibleError("ripple and attenuation must be positive dB values")
        if self.num_subbands < 2:
            raise DesignInfeasibleError(f"num_subbands must be >= 2, got {self.num_subbands}")
        center = 0.5 * (self.passband_edge + self.stopband_edge)
        if not math.isclose(center, 1.0 / self.num_subbands, rel_tol=0.05):
            warnings.warn(
                f"transition band centred at {center:.4g}, expected about "
                f"1/N = {1.0 / self.num_subbands:.4g}",
                stacklevel=3,
            )

    @classmethod
    def for_subbands(cls, num_subbands, transition, passband_ripple_db, stopband_atten_db):
        """Centre a transition band of width ``transition`` on the 1/N edge."""
        f_o = 1.0 / num_subbands
        return cls(
            passband_edge=f_o - transition / 2,
            stopband_edge=f_o + transition / 2,
            passband_ripple_db=passband_ripple_db,
            stopband_atten_db=stopband_atten_db,
            num_subbands=num_subbands,
        )

    @property
    def transition(self):
        return self.stopband_edge - self.passband_edge

    @property
    def cutoff(self):
        return 0.5 * (self.passband_edge + self.stopband_edge)


def _frozen(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PrototypeFilter:
    """Real FIR lowpass ``h`` with its nominal (-6 dB) bandwidth ``f_o``.

    ``nominal_bandwidth`` may be ``None`` for imported coefficients whose
    band edge could not be measured.
    """

    coeffs: np.ndarray
    nominal_bandwidth: float | None = None
    symmetric: bool = field(init=False)

    def __post_init__(self):
        h = _frozen(self.coeffs)
        if h.ndim != 1 or h.size < 1:
            raise ValueError("prototype needs a 1-D vector of at least one coefficient")
        if not np.all(np.isfinite(h)):
            raise ValueError("prototype coefficients must be finite")
        object.__setattr__(self, "coeffs", h)
        object.__setattr__(self, "symmetric", bool(np.array_equal(h, h[::-1])))

    def __len__(self):
        return self.coeffs.size

    @property
    def group_delay(self):
        return (len(self) - 1) / 2


@dataclass(frozen=True)
class FrequencyResponse:
    """Sampled DTFT. ``whole`` responses cover [0, 2) instead of [0, 1]."""

    grid: np.ndarray
    values: np.ndarray
    whole: bool = False

    def __post_init__(self):
        object.__setattr__(self, "grid", _frozen(self.grid))
        object.__setattr__(self, "values", _frozen(self.values, complex))
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values differ in length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")

    @property
    def magnitude(self):
        return np.abs(self.values)

    @property
    def magnitude_db(self):
        mag = self.magnitude
        out = np.full(mag.shape, MAG_FLOOR_DB)
        nz = mag > 0
        out[nz] = np.maximum(20 * np.log10(mag[nz]), MAG_FLOOR_DB)
        return out

    @property
    def step(self):
        return float(self.grid[1] - self.grid[0])

    def to_csv(self):
        buf = io.StringIO()
        buf.write("freq,real,imag,mag_db\n")
        for f, v, db in zip(self.grid, self.values, self.magnitude_db):
            buf.write(f"{f:.12g},{v.real:.12g},{v.imag:.12g},{db:.12g}\n")
        return buf.getvalue()


def frequency_response(coeffs, num_points=DEFAULT_POINTS, whole=False):
    """Evaluate ``H(f) = sum_n h[n] exp(-j*pi*f*n)`` on a uniform grid.

    The grid is [0, 1] inclusive, or [0, 2) without the endpoint when
    ``whole`` is set. Complex coefficients are accepted (modulated subband
    filters).
    """
    if num_points < 2:
        raise ValueError(f"num_points must be >= 2, got {num_points}")
    h = np.asarray(coeffs)
    if whole:
        grid = np.arange(num_points) * (2.0 / num_points)
    else:
        grid = np.linspace(0.0, 1.0, num_points)
    kernel = np.exp(-1j * np.pi * np.outer(grid, np.arange(h.size)))
    values = kernel @ h
    # the DC point is the plain coefficient sum; avoid reassociation noise
    values[0] = h.sum()
    return FrequencyResponse(grid, values, whole)


def kaiser_beta(atten_db):
    if atten_db > 50:
        return 0.1102 * (atten_db - 8.7)
    if atten_db >= 21:
        return 0.5842 * (atten_db - 21) ** 0.4 + 0.07886 * (atten_db - 21)
    return 0.0


def kaiser_length(atten_db, transition):
    """Kaiser's tap-count estimate for a transition width normalized to Nyquist."""
    order = (atten_db - 7.95) / (2.285 * transition * math.pi)
    return max(1, math.ceil(order) + 1)


def kaiser_lowpass(num_taps, cutoff, beta):
    """Windowed-sinc lowpass with exactly mirror-symmetric taps."""
    n = np.arange(num_taps) - (num_taps - 1) / 2
    h = cutoff * np.sinc(cutoff * n) * np.kaiser(num_taps, beta)
    return (h + h[::-1]) / 2


def _design_atten(spec):
    delta_s = 10 ** (-spec.stopband_atten_db / 20)
    delta_p = 10 ** (spec.passband_ripple_db / 20) - 1
    return -20 * math.log10(min(delta_s, delta_p))


@dataclass(frozen=True)
class SpecCheck:
    stopband_max_db: float
    passband_deviation_db: float
    edge_6db: float
    stopband_ok: bool
    passband_ok: bool

    @property
    def passed(self):
        return self.stopband_ok and self.passband_ok


def check_spec(coeffs, spec, num_points=DEFAULT_POINTS, ripple_slack=0.0):
    """Measure a lowpass against ``spec``.

    Passband deviation is ``max |20 log10 |H||`` over [0, passband_edge];
    the stopband figure is the largest magnitude on [stopband_edge, 1].
    Both edges are evaluated exactly in addition to the grid.
    """
    resp = frequency_response(coeffs, num_points)
    db = resp.magnitude_db
    # the band edges rarely land on the grid; evaluate them exactly
    h = np.asarray(coeffs)
    at_edges = np.exp(-1j * np.pi * np.outer([spec.passband_edge, spec.stopband_edge], np.arange(h.size))) @ h
    pass_edge_db, stop_edge_db = 20 * np.log10(np.maximum(np.abs(at_edges), 10 ** (MAG_FLOOR_DB / 20)))
    stop = max(db[resp.grid >= spec.stopband_edge].max(), stop_edge_db)
    dev = max(np.abs(db[resp.grid <= spec.passband_edge]).max(), abs(pass_edge_db))
    try:
        edge = measure_edges(resp, DEFAULT_EDGE_DB)[1]
    except EdgeNotFoundError:
        edge = float("nan")
    return SpecCheck(
        stopband_max_db=float(stop),
        passband_deviation_db=float(dev),
        edge_6db=float(edge),
        stopband_ok=bool(stop <= -spec.stopband_atten_db),
        passband_ok=bool(dev <= spec.passband_ripple_db * (1 + ripple_slack)),
    )


def design_kaiser(spec, max_taps=MAX_TAPS, num_points=DEFAULT_POINTS):
    """Design the prototype with a Kaiser window and verify it.

    Starts at Kaiser's length estimate and grows the filter one tap at a
    time until the measured response meets ``spec``.
    """
    atten = _design_atten(spec)
    beta = kaiser_beta(atten)
    length = kaiser_length(atten, spec.transition)
    if length > max_taps:
        raise DesignInfeasibleError(
            f"estimated length {length} exceeds the {max_taps}-tap limit"
        )
    for num_taps in range(length, max_taps + 1):
        h = kaiser_lowpass(num_taps, spec.cutoff, beta)
        if check_spec(h, spec, num_points).passed:
            return PrototypeFilter(h, spec.cutoff)
    raise DesignInfeasibleError(f"no Kaiser design within {max_taps} taps meets the spec")


def format_coefficients(coeffs, nominal_bandwidth=None, header=None):
    lines = []
    if header:
        lines.extend(f"# {line}" for line in header.splitlines())
    if nominal_bandwidth is not None:
        lines.append(f"# {_BANDWIDTH_KEY} {nominal_bandwidth!r}")
    lines.extend(repr(float(c)) for c in coeffs)
    return "\n".join(lines) + "\n"


def load_coefficients(text):
    """Parse coefficient-file content into a :class:`PrototypeFilter`.

    One value per line; ``#`` starts a comment line and blank lines are
    skipped. A ``# nominal_bandwidth: <f>`` comment, as written by
    :func:`format_coefficients`, is honoured; otherwise the -6 dB edge is
    measured. Asymmetric input is accepted, check ``.symmetric``.
    """
    values = []
    bandwidth = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith(_BANDWIDTH_KEY):
                try:
                    bandwidth = float(body[len(_BANDWIDTH_KEY):])
                except ValueError:
                    raise CoefficientParseError("bad nominal_bandwidth value", lineno) from None
            continue
        tokens = line.split()
        if len(tokens) != 1:
            raise CoefficientParseError(f"expected one value, found {len(tokens)}", lineno)
        try:
            value = float(tokens[0])
        except ValueError:
            raise CoefficientParseError(f"non-numeric token {tokens[0]!r}", lineno) from None
        if not math.isfinite(value):
            raise CoefficientParseError(f"non-finite value {tokens[0]!r}", lineno)
        values.append(value)
    if not values:
        raise CoefficientParseError("no coefficients found")
    if bandwidth is None and len(values) > 1:
        try:
            resp = frequency_response(values, DEFAULT_POINTS)
            bandwidth = measure_edges(resp, DEFAULT_EDGE_DB)[1]
        except EdgeNotFoundError:
            bandwidth = None
    proto = PrototypeFilter(values, bandwidth)
    if not proto.symmetric:
        warnings.warn("imported coefficients are not symmetric (no linear phase)", stacklevel=2)
    return proto


def read_coefficients(path):
    with open(path) as fh:
        return load_coefficients(fh.read())


def _crossing(grid, db, i_in, i_out, threshold):
    """Linearly interpolate the threshold crossing between two grid points."""
    d_in, d_out = db[i_in], db[i_out]
    if d_in == d_out:
        return grid[i_out]
    t = (d_in - threshold) / (d_in - d_out)
    return grid[i_in] + t * (grid[i_out] - grid[i_in])


def measure_edges(resp, level_db=DEFAULT_EDGE_DB, relative=True):
    """Band edges around the response peak at ``level_db``.

    Walks outward from the magnitude peak and returns ``(low, high)``: the
    first interpolated frequencies on either side where the magnitude drops
    below ``level_db`` (relative to the peak unless ``relative`` is false).
    On a [0, 1] grid a band touching DC reports ``low = 0``. On a whole-circle
    grid the walk wraps, so ``low`` may be negative and ``high`` may exceed 2.
    """
    if level_db >= 0:
        raise ValueError("level_db must be negative")
    db = resp.magnitude_db
    peak = int(np.argmax(db))
    threshold = level_db + (db[peak] if relative else 0.0)
    n = db.size
    if resp.whole:
        period = 2.0
        shift = n // 2 - peak
        db = np.roll(db, shift)
        grid = (np.arange(n) - n // 2) * (period / n) + resp.grid[peak]
        peak = n // 2
    else:
        grid = resp.grid
    below = db < threshold
    above = np.nonzero(below[peak:])[0]
    if above.size == 0:
        raise EdgeNotFoundError(f"magnitude never falls below {threshold:.4g} dB")
    hi = peak + int(above[0])
    high = _crossing(grid, db, hi - 1, hi, threshold)
    left = np.nonzero(below[: peak + 1][::-1])[0]
    if left.size == 0:
        if resp.whole:
            raise EdgeNotFoundError(f"magnitude never falls below {threshold:.4g} dB")
        low = float(grid[0])
    else:
        lo = peak - int(left[0])
        low = _crossing(grid, db, lo + 1, lo, threshold)
    return float(low), float(high)


def stopband_attenuation(resp, stopband_edge, metric="peak"):
    """Attenuation in dB of the region ``[stopband_edge, 1]`` relative to the peak.

    ``metric="peak"`` uses the largest sidelobe; ``"mean"`` uses the mean
    stopband power, which is sensitive to aliased sidelobe energy.
    """
    mag = resp.magnitude
    ref = mag.max()
    region = mag[(resp.grid >= min(stopband_edge, 1.0)) & (resp.grid <= 1.0)]
    if region.size == 0:
        raise ValueError("stopband region is empty on this grid")
    if metric == "peak":
        level = region.max() / ref
    elif metric == "mean":
        level = math.sqrt(np.mean((region / ref) ** 2))
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return -20 * math.log10(max(level, 1e-15))
