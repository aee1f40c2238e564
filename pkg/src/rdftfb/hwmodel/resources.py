"""Operator counts for a netlist and the closed-form extra-adder estimate."""

from __future__ import annotations

from dataclasses import dataclass


def extra_adders(L, M, rounding="ceil"):
    """Adders the CDM chains add over a plain filter bank, ``sum_i (L/i - 1)``.

    ``L/i`` is generally fractional; ``rounding`` picks ``"ceil"`` (the size
    of the retained coefficient group) or ``"floor"``.
    """
    if L < 1 or M < 1:
        raise ValueError("L and M must be >= 1")
    if rounding == "ceil":
        return sum(-(-L // i) - 1 for i in range(1, M + 1))
    if rounding == "floor":
        return sum(L // i - 1 for i in range(1, M + 1))
    raise ValueError(f"unknown rounding {rounding!r}")


@dataclass(frozen=True)
class ResourceReport:
    multipliers: int
    filter_multipliers: int
    modulator_multipliers: int
    adders: int
    muxes: int
    registers: int
    extra_adders_vs_dftfb: int | None = None
    extra_adders_floor: int | None = None
    factor_chain_adders: int = 0

    def to_text(self):
        rows = [
            ("multipliers", self.multipliers),
            ("  filter", self.filter_multipliers),
            ("  modulator", self.modulator_multipliers),
            ("adders", self.adders),
            ("  in M>1 chains", self.factor_chain_adders),
            ("muxes", self.muxes),
            ("registers", self.registers),
            ("N_a (ceil)", self.extra_adders_vs_dftfb),
            ("N_a (floor)", self.extra_adders_floor),
        ]
        return "".join(f"{name:<16}{'-' if v is None else v:>8}\n" for name, v in rows)


def count_resources(graph):
    mults = graph.of_kind("const_mult")
    adders = graph.of_kind("adder")
    L = graph.meta.get("taps")
    M = graph.meta.get("max_factor")
    na = na_floor = None
    if L and M:
        na = extra_adders(L, M, "ceil")
        na_floor = extra_adders(L, M, "floor")
    return ResourceReport(
        multipliers=len(mults),
        filter_multipliers=sum(n.role == "filter" for n in mults),
        modulator_multipliers=sum(n.role == "idft" for n in mults),
        adders=len(adders),
        muxes=len(graph.of_kind("mux")),
        registers=len(graph.of_kind("register")),
        extra_adders_vs_dftfb=na,
        extra_adders_floor=na_floor,
        factor_chain_adders=sum((n.factor or 1) > 1 for n in adders),
    )

