"""Command line front end.

Every error is reported as one line ``error[CODE]: message`` on stderr with
a non-zero exit status. Files go to ``-o`` when given, else into the
directory named by ``$RDFTFB_OUT`` when set, else to stdout.
"""

from __future__ import annotations

import argparse
import io
import os
import sys

import numpy as np

from . import __version__
from .cdm import check_aliasing, decimate_coefficients, decimated_response, require_factor
from .channelizer import Channelizer, subband_response
from .errors import CoefficientParseError, RdftfbError
from .filterdesign import (
    DEFAULT_POINTS,
    FilterSpec,
    check_spec,
    design_kaiser,
    format_coefficients,
    load_coefficients,
)
from .hwmodel import (
    DataflowGraph,
    DelayModel,
    build_rdftfb_graph,
    check_equivalence,
    compare_architectures,
    count_resources,
    critical_path,
    filter_scope,
    format_rows,
    insert_pipeline_registers,
    simulate,
)

OUT_ENV = "RDFTFB_OUT"


class CliError(RdftfbError):
    code = "E_USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error[E_USAGE]: {message} (see '{self.prog} -h')", file=sys.stderr)
        sys.exit(2)


def _emit(text, path, default_name):
    if path is None and os.environ.get(OUT_ENV):
        path = os.path.join(os.environ[OUT_ENV], default_name)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _read_text(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


def _read_proto(path):
    return load_coefficients(_read_text(path))


def _read_graph(path):
    return DataflowGraph.from_json(_read_text(path))


def read_samples(text):
    """Parse a ``re,im`` CSV into a complex vector."""
    lines = text.splitlines()
    if not lines or [h.strip() for h in lines[0].split(",")] != ["re", "im"]:
        raise CoefficientParseError("sample file must start with header 're,im'", 1)
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CoefficientParseError("expected two columns", lineno)
        try:
            value = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise CoefficientParseError(f"non-numeric sample {line!r}", lineno) from None
        if not np.isfinite(value):
            raise CoefficientParseError("non-finite sample", lineno)
        out.append(value)
    return np.array(out, dtype=complex)


def format_samples(x):
    buf = io.StringIO()
    buf.write("re,im\n")
    for v in x:
        buf.write(f"{v.real:.17g},{v.imag:.17g}\n")
    return buf.getvalue()


def random_stimuli(count, length, seed):
    """Complex Gaussian streams from numpy's PCG64 generator (portable)."""
    rng = np.random.default_rng(seed)
    return rng.standard_normal((count, length)) + 1j * rng.standard_normal((count, length))


def _delay_model(args):
    return DelayModel(
        const_mult=args.mult_delay, adder=args.add_delay, mux=args.mux_delay,
        register=args.reg_delay, t_setup=args.setup, t_hold=args.hold, routing=args.routing,
    )


# -- subcommands -----------------------------------------------------------

def cmd_design(args):
    spec = FilterSpec.for_subbands(args.n, args.delta, args.ap, args.stopband_atten)
    proto = design_kaiser(spec, max_taps=args.max_taps)
    if args.mmax is not None:
        require_factor(proto, args.mmax)
    check = check_spec(proto.coeffs, spec)
    header = (
        f"Kaiser prototype for N={args.n}, delta={args.delta}, ap={args.ap} dB, "
        f"as={args.stopband_atten} dB\ntaps: {len(proto)}"
    )
    _emit(format_coefficients(proto.coeffs, proto.nominal_bandwidth, header), args.output, "prototype.txt")
    verdict = "PASS" if check.passed else "FAIL"
    print(
        f"taps {len(proto)}\n"
        f"stopband max {check.stopband_max_db:.3f} dB (limit {-args.stopband_atten:g}) "
        f"{'PASS' if check.stopband_ok else 'FAIL'}\n"
        f"passband deviation {check.passband_deviation_db:.4f} dB (limit {args.ap:g}) "
        f"{'PASS' if check.passband_ok else 'FAIL'}\n"
        f"-6 dB edge {check.edge_6db:.5f} (nominal {proto.nominal_bandwidth:.5f})\n"
        f"{verdict}",
        file=sys.stderr,
    )
    return 0 if check.passed else 1


def cmd_decimate(args):
    proto = _read_proto(args.coeffs)
    dec = decimate_coefficients(proto, args.cdm)
    bw = None if proto.nominal_bandwidth is None else proto.nominal_bandwidth * args.cdm
    header = f"CDM factor {args.cdm} of {len(proto)}-tap prototype"
    _emit(format_coefficients(dec.coeffs, bw, header), args.output, f"decimated_m{args.cdm}.txt")
    return 0


def cmd_respond(args):
    proto = _read_proto(args.coeffs)
    if args.subband is None:
        resp = decimated_response(proto, args.cdm, args.points)
        name = f"response_m{args.cdm}.csv"
    else:
        if args.n is None:
            raise CliError("--subband needs --n")
        if not 0 <= args.subband < args.n:
            raise CliError(f"--subband must lie in 0..{args.n - 1}")
        resp = subband_response(proto, args.subband, args.n, args.cdm, args.points)
        name = f"response_k{args.subband}_m{args.cdm}.csv"
    _emit(resp.to_csv(), args.output, name)
    return 0


def cmd_channelize(args):
    proto = _read_proto(args.coeffs)
    x = read_samples(_read_text(args.samples))
    ch = Channelizer(proto, args.n, max_factor=args.mmax, factor=args.cdm)
    y = ch.process(x)
    out_dir = args.out_dir or os.environ.get(OUT_ENV) or "."
    os.makedirs(out_dir, exist_ok=True)
    if args.format == "wide":
        buf = io.StringIO()
        cols = ",".join(f"y{k}_re,y{k}_im" for k in range(args.n))
        buf.write(f"n,{cols}\n")
        for n, row in enumerate(y):
            vals = ",".join(f"{v.real:.17g},{v.imag:.17g}" for v in row)
            buf.write(f"{n},{vals}\n")
        with open(os.path.join(out_dir, "subbands.csv"), "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        for k in range(args.n):
            buf = io.StringIO()
            buf.write("n,re,im\n")
            for n, v in enumerate(y[:, k]):
                buf.write(f"{n},{v.real:.17g},{v.imag:.17g}\n")
            with open(os.path.join(out_dir, f"y_{k}.csv"), "w", newline="") as fh:
                fh.write(buf.getvalue())
    return 0


def cmd_stimulus(args):
    x = random_stimuli(1, args.length, args.seed)[0]
    _emit(format_samples(x), args.output, "samples.csv")
    return 0


def cmd_graph_build(args):
    proto = _read_proto(args.coeffs)
    graph = build_rdftfb_graph(proto, args.n, args.mmax)
    _emit(graph.to_json(), args.output, "graph.json")
    return 0


def cmd_graph_timing(args):
    graph = _read_graph(args.graph)
    report = critical_path(graph, _delay_model(args))
    print(report.to_text(strict=args.strict), end="")
    if args.csv:
        _emit(report.to_csv(graph, args.top), args.csv, "timing.csv")
    return 0


def cmd_graph_pipeline(args):
    graph = _read_graph(args.graph)
    scope = filter_scope(graph) if args.scope == "filter" else None
    result = insert_pipeline_registers(graph, _delay_model(args), args.budget, scope)
    _emit(result.graph.to_json(), args.output, "pipelined.json")
    print(f"latency D={result.latency} registers_added={result.registers_added}", file=sys.stderr)
    return 0


def cmd_graph_simulate(args):
    graph = _read_graph(args.graph)
    x = read_samples(_read_text(args.samples))
    y = simulate(graph, x, args.sel_m, args.cycles)
    buf = io.StringIO()
    buf.write("cycle," + ",".join(f"y{k}_re,y{k}_im" for k in range(y.shape[0])) + "\n")
    for t in range(y.shape[1]):
        buf.write(f"{t}," + ",".join(f"{v.real:.17g},{v.imag:.17g}" for v in y[:, t]) + "\n")
    _emit(buf.getvalue(), args.output, "simulation.csv")
    return 0


def cmd_graph_compare(args):
    g1 = _read_graph(args.graph1)
    g2 = _read_graph(args.graph2)
    length = args.length
    impulse = np.zeros(length, dtype=complex)
    impulse[0] = 1.0
    stimuli = [impulse, *random_stimuli(args.stimuli, length, args.seed)]
    factors = range(1, g1.selects.get("sel_M", 1) + 1) if args.sel_m == "all" else [int(args.sel_m)]
    status = 0
    for M in factors:
        result = check_equivalence(g1, g2, stimuli, sel_M=M)
        print(f"M={M}: {result}")
        status |= 0 if result.equivalent else 1
    return status


def cmd_graph_resources(args):
    print(count_resources(_read_graph(args.graph)).to_text(), end="")
    return 0


def cmd_report(args):
    proto = _read_proto(args.coeffs)
    graph = build_rdftfb_graph(proto, args.n, args.mmax)
    rows = compare_architectures(graph, _delay_model(args), args.budget)
    print(format_rows(rows), end="")
    return 0


def cmd_check_aliasing(args):
    result = check_aliasing(args.bandwidth, args.cdm)
    print(f"{'PASS' if result.passed else 'FAIL'} margin {result.margin:.6g}")
    return 0 if result.passed else 1


# -- parser ----------------------------------------------------------------

def _add_delay_flags(p):
    d = DelayModel()
    p.add_argument("--mult-delay", type=float, default=d.const_mult)
    p.add_argument("--add-delay", type=float, default=d.adder)
    p.add_argument("--mux-delay", type=float, default=d.mux)
    p.add_argument("--reg-delay", type=float, default=d.register, help="register clock-to-out")
    p.add_argument("--setup", type=float, default=d.t_setup)
    p.add_argument("--hold", type=float, default=d.t_hold)
    p.add_argument("--routing", type=float, default=d.routing, help="per-edge routing delay")


def build_parser():
    parser = _Parser(prog="rdftfb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("design", help="design the Kaiser prototype lowpass")
    p.add_argument("--n", type=int, required=True, help="number of subbands")
    p.add_argument("--delta", type=float, required=True, help="transition width (1.0 = Nyquist)")
    p.add_argument("--ap", type=float, required=True, help="passband ripple, dB")
    p.add_argument("--as", dest="stopband_atten", type=float, required=True,
                   help="stopband attenuation, dB")
    p.add_argument("--mmax", type=int, help="also check this CDM factor against the aliasing bound")
    p.add_argument("--max-taps", type=int, default=4096)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("decimate", help="write CDM-decimated coefficients")
    p.add_argument("coeffs")
    p.add_argument("--cdm", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_decimate)

    p = sub.add_parser("respond", help="frequency response CSV")
    p.add_argument("coeffs")
    p.add_argument("--cdm", type=int, default=1)
    p.add_argument("--points", type=int, default=DEFAULT_POINTS)
    p.add_argument("--subband", type=int, help="modulated subband k (whole-circle grid)")
    p.add_argument("--n", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("channelize", help="run the streaming filter bank")
    p.add_argument("samples")
    p.add_argument("coeffs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cdm", type=int, default=1)
    p.add_argument("--mmax", type=int)
    p.add_argument("--format", choices=("split", "wide"), default="split")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_channelize)

    p = sub.add_parser("stimulus", help="seeded complex Gaussian samples")
    p.add_argument("--length", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_stimulus)

    p = sub.add_parser("check-aliasing", help="evaluate M * f_o < 1")
    p.add_argument("--bandwidth", type=float, required=True)
    p.add_argument("--cdm", type=int, required=True)
    p.set_defaults(func=cmd_check_aliasing)

    g = sub.add_parser("graph", help="register-level datapath model")
    gsub = g.add_subparsers(dest="graph_command", required=True, parser_class=_Parser)

    p = gsub.add_parser("build")
    p.add_argument("coeffs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mmax", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph_build)

    p = gsub.add_parser("timing")
    p.add_argument("graph")
    _add_delay_flags(p)
    p.add_argument("--strict", action="store_true", help="period bound tau + t_setup + t_hold")
    p.add_argument("--csv")
    p.add_argument("--top", type=int, default=1, help="number of endpoint paths in the CSV")
    p.set_defaults(func=cmd_graph_timing)

    p = gsub.add_parser("pipeline")
    p.add_argument("graph")
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--scope", choices=("all", "filter"), default="all")
    _add_delay_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph_pipeline)

    p = gsub.add_parser("simulate")
    p.add_argument("graph")
    p.add_argument("samples")
    p.add_argument("--sel-m", type=int, default=1)
    p.add_argument("--cycles", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_graph_simulate)

    p = gsub.add_parser("compare")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p.add_argument("--stimuli", type=int, default=50)
    p.add_argument("--length", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sel-m", default="1", help="factor, or 'all'")
    p.set_defaults(func=cmd_graph_compare)

    p = gsub.add_parser("resources")
    p.add_argument("graph")
    p.set_defaults(func=cmd_graph_resources)

    p = sub.add_parser("report", help="original vs pipelined timing table")
    p.add_argument("coeffs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mmax", type=int, default=1)
    p.add_argument("--budget", type=float, default=2.0)
    _add_delay_flags(p)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RdftfbError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error[E_VALUE]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[E_IO]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
