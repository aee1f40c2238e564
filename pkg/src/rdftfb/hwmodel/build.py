"""Netlist generator for the reconfigurable DFT filter bank.

Structure per polyphase branch ``p``::

    x ──► shared multipliers h[c]·x   (one per symmetric coefficient pair)
            │
            ├─ coefficient mux (sel_p) : picks h[p·M]·x, the branch's first tap
            └─ per-factor transposed chains, one for each M = 1..M_max:
                 s_q = h[(p+qN)·M]·x + z^-N s_{q+1}
               chain mux (sel_M) : picks z^-N s_1 of the active chain
    branch output = z^-p (coefficient mux + chain mux)

The branch outputs feed an N-point inverse DFT where output ``k`` is a
linear adder chain over the twiddled branches ``1 .. N-1`` with the
untwiddled branch 0 entering last. Twiddles equal to 1 need no multiplier.
Both select lines carry the decimation factor M.
"""

from __future__ import annotations

import math

from ..cdm import require_factor
from ..channelizer import check_subbands, twiddle_matrix
from .graph import GraphBuilder


def _branch_taps(p, N, M, L):
    """Coefficient indices of branch ``p`` under factor ``M``, tap order."""
    taps = []
    q = 0
    while (p + q * N) * M < L:
        taps.append((p + q * N) * M)
        q += 1
    return taps


def build_rdftfb_graph(proto, num_subbands, max_factor=1):
    """Build the unpipelined RDFTFB netlist.

    Multipliers are shared between mirror-image coefficients when the
    prototype is symmetric, giving ``ceil(L/2)`` of them; an asymmetric
    prototype falls back to one multiplier per coefficient.
    """
    N = num_subbands
    check_subbands(N)
    require_factor(proto, max_factor)
    h = proto.coeffs
    L = len(proto)

    b = GraphBuilder(
        selects={"sel_p": max_factor, "sel_M": max_factor},
        meta={
            "taps": L,
            "num_subbands": N,
            "max_factor": max_factor,
            "nominal_bandwidth": proto.nominal_bandwidth,
            "symmetric": proto.symmetric,
            "latency": 0,
        },
    )
    x = b.add("input", role="io")

    if proto.symmetric:
        slots = math.ceil(L / 2)
        slot_of = lambda c: min(c, L - 1 - c)  # noqa: E731
    else:
        slots = L
        slot_of = lambda c: c  # noqa: E731
    mults = [b.add("const_mult", x, coeff=float(h[j]), role="filter") for j in range(slots)]

    def product(c):
        return mults[slot_of(c)]

    def chain(taps, p, m):
        # transposed form: the last tap enters first, earlier taps are added
        # after N cycles of delay each
        s = product(taps[-1])
        for c in reversed(taps[:-1]):
            delayed = b.delay(s, N, role="filter", branch=p, factor=m)
            s = b.add("adder", product(c), delayed, role="filter", branch=p, factor=m)
        return b.delay(s, N, role="filter", branch=p, factor=m)

    branch_out = []
    for p in range(N):
        first, tails = [], []
        for m in range(1, max_factor + 1):
            taps = _branch_taps(p, N, m, L)
            first.append(product(taps[0]) if taps else None)
            tails.append(chain(taps[1:], p, m) if len(taps) > 1 else None)
        coef_mux = b.add("mux", *first, sel="sel_p", ways=max_factor, role="filter", branch=p)
        tail_mux = b.add("mux", *tails, sel="sel_M", ways=max_factor, role="filter", branch=p)
        s0 = b.add("adder", coef_mux, tail_mux, role="filter", branch=p)
        branch_out.append(b.delay(s0, p, role="filter", branch=p))

    W = twiddle_matrix(N)
    for k in range(N):
        terms = []
        for p in [*range(1, N), 0]:
            if (k * p) % N == 0:
                terms.append(branch_out[p])
            else:
                terms.append(b.add("const_mult", branch_out[p], coeff=complex(W[k, p]),
                                   role="idft", branch=p))
        acc = terms[0]
        for t in terms[1:]:
            acc = b.add("adder", acc, t, role="idft", branch=k)
        b.add("output", acc, role="io", branch=k)
    return b.build()
