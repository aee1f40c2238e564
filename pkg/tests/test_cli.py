import csv

import numpy as np
import pytest

from rdftfb.channelizer import reference_subband
from rdftfb.cli import format_samples, main, random_stimuli, read_samples
from rdftfb.errors import CoefficientParseError
from rdftfb.filterdesign import FrequencyResponse, load_coefficients, measure_edges


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_csv_columns(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in rows[0]}


def read_subband(path):
    cols = read_csv_columns(path)
    return cols["re"] + 1j * cols["im"]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("cli")


@pytest.fixture(scope="module")
def coeff_file(workdir):
    path = workdir / "proto.txt"
    assert main(["design", "--n", "8", "--delta", "0.1", "--ap", "0.04", "--as", "50", "-o", str(path)]) == 0
    return path


@pytest.fixture(scope="module")
def graph_files(workdir, coeff_file):
    g = workdir / "graph.json"
    p = workdir / "pipelined.json"
    assert main(["graph", "build", str(coeff_file), "--n", "8", "--mmax", "5", "-o", str(g)]) == 0
    assert main(["graph", "pipeline", str(g), "--budget", "2.0", "-o", str(p)]) == 0
    return g, p


def test_design_pass(capsys, tmp_path):
    code, out, err = run(capsys, "design", "--n", 8, "--delta", 0.1, "--ap", 0.04, "--as", 50, "-o", tmp_path / "h.txt")
    assert code == 0
    assert err.strip().endswith("PASS")
    assert len(load_coefficients((tmp_path / "h.txt").read_text())) == 61


def test_design_to_stdout(capsys, monkeypatch):
    monkeypatch.delenv("RDFTFB_OUT", raising=False)
    code, out, _ = run(capsys, "design", "--n", 8, "--delta", 0.1, "--ap", 0.04, "--as", 50)
    assert code == 0
    assert len(load_coefficients(out)) == 61


def test_missing_flag_is_usage_error(capsys):
    with pytest.raises(SystemExit) as info:
        main(["design", "--n", "8", "--delta", "0.1", "--ap", "0.04"])
    assert info.value.code != 0
    err = capsys.readouterr().err
    assert err.startswith("error[E_USAGE]:")
    assert err.count("\n") == 1


def test_infeasible_design(capsys):
    code, _, err = run(capsys, "design", "--n", 8, "--delta", 0.001, "--ap", 0.01, "--as", 80, "--max-taps", 128)
    assert code != 0
    assert err.startswith("error[E_DESIGN_INFEASIBLE]:")


def test_respond_stopband(capsys, workdir, coeff_file):
    out = workdir / "resp.csv"
    assert run(capsys, "respond", coeff_file, "-o", out)[0] == 0
    cols = read_csv_columns(out)
    assert list(cols) == ["freq", "real", "imag", "mag_db"]
    assert cols["mag_db"][cols["freq"] >= 0.175].max() <= -50.0


def test_respond_subband_zero_is_prototype(capsys, workdir, coeff_file):
    a = workdir / "k0.csv"
    run(capsys, "respond", coeff_file, "--cdm", 1, "--subband", 0, "--n", 8, "-o", a)
    cols = read_csv_columns(a)
    h = load_coefficients(coeff_file.read_text()).coeffs
    direct = np.array([np.sum(h * np.exp(-1j * np.pi * f * np.arange(h.size))) for f in cols["freq"][::256]])
    assert np.allclose(cols["real"][::256] + 1j * cols["imag"][::256], direct, atol=1e-10)


def _width(path):
    cols = read_csv_columns(path)
    resp = FrequencyResponse(cols["freq"], cols["real"] + 1j * cols["imag"], whole=True)
    low, high = measure_edges(resp, -6.0)
    return high - low


def test_respond_subband_width_scales(capsys, workdir, coeff_file):
    one, three = workdir / "k2m1.csv", workdir / "k2m3.csv"
    run(capsys, "respond", coeff_file, "--cdm", 1, "--subband", 2, "--n", 8, "-o", one)
    run(capsys, "respond", coeff_file, "--cdm", 3, "--subband", 2, "--n", 8, "-o", three)
    assert _width(three) / _width(one) == pytest.approx(3.0, rel=0.15)


def test_respond_aliasing(capsys, coeff_file):
    code, _, err = run(capsys, "respond", coeff_file, "--cdm", 8)
    assert code != 0
    assert err.startswith("error[E_ALIASING]:")


def test_decimate(capsys, workdir, coeff_file):
    out = workdir / "dec.txt"
    assert run(capsys, "decimate", coeff_file, "--cdm", 2, "-o", out)[0] == 0
    dec = load_coefficients(out.read_text())
    src = load_coefficients(coeff_file.read_text())
    assert np.array_equal(dec.coeffs, src.coeffs[::2])
    assert dec.nominal_bandwidth == pytest.approx(0.25)


def _write_samples(path, x):
    path.write_text(format_samples(x))
    return path


def test_channelize_zero(capsys, tmp_path, coeff_file):
    samples = _write_samples(tmp_path / "zero.csv", np.zeros(32))
    assert run(capsys, "channelize", samples, coeff_file, "--n", 8, "--out-dir", tmp_path / "out")[0] == 0
    for k in range(8):
        assert not read_subband(tmp_path / "out" / f"y_{k}.csv").any()


def test_channelize_tone(capsys, tmp_path, coeff_file):
    n = np.arange(1024)
    samples = _write_samples(tmp_path / "tone.csv", np.exp(2j * np.pi * 2 * n / 8))
    run(capsys, "channelize", samples, coeff_file, "--n", 8, "--out-dir", tmp_path)
    energy = [np.sum(np.abs(read_subband(tmp_path / f"y_{k}.csv")[64:]) ** 2) for k in range(8)]
    for k in range(8):
        if k != 2:
            assert 10 * np.log10(energy[2] / energy[k]) >= 50.0


@pytest.mark.parametrize("M", [1, 3])
def test_channelize_matches_reference(capsys, tmp_path, coeff_file, M):
    x = random_stimuli(1, 1024, 7)[0]
    samples = _write_samples(tmp_path / "x.csv", x)
    run(capsys, "channelize", samples, coeff_file, "--n", 8, "--cdm", M, "--out-dir", tmp_path)
    h = load_coefficients(coeff_file.read_text()).coeffs[::M]
    for k in range(8):
        got = read_subband(tmp_path / f"y_{k}.csv")
        assert np.max(np.abs(got - reference_subband(x, h, k, 8))) <= 1e-9


def test_channelize_wide_format(capsys, tmp_path, coeff_file):
    samples = _write_samples(tmp_path / "x.csv", random_stimuli(1, 20, 1)[0])
    run(capsys, "channelize", samples, coeff_file, "--n", 8, "--format", "wide", "--out-dir", tmp_path)
    header = (tmp_path / "subbands.csv").read_text().splitlines()[0]
    assert header == "n," + ",".join(f"y{k}_re,y{k}_im" for k in range(8))


def test_graph_timing(capsys, graph_files, tmp_path):
    g, _ = graph_files
    code, out, _ = run(capsys, "graph", "timing", g, "--csv", tmp_path / "t.csv")
    assert code == 0
    assert out.startswith("tau_cpd            9\n")
    kinds = [line.split()[2] for line in out.splitlines()[-8:]]
    assert kinds == ["const_mult"] + ["adder"] * 7
    assert (tmp_path / "t.csv").read_text().startswith("path_rank,node_id,kind,delay,cum_delay\n")


def test_graph_timing_strict(capsys, graph_files):
    _, out, _ = run(capsys, "graph", "timing", graph_files[0], "--strict")
    assert "T_clk >            9.15" in out


def test_graph_pipeline_timing(capsys, graph_files):
    _, out, _ = run(capsys, "graph", "timing", graph_files[1])
    assert out.startswith("tau_cpd            2\n")


def test_graph_compare(capsys, graph_files):
    code, out, _ = run(capsys, "graph", "compare", *graph_files, "--stimuli", 5, "--length", 128)
    assert code == 0
    assert out.strip() == "M=1: EQUIVALENT, latency D=5"


def test_graph_simulate(capsys, graph_files, tmp_path, coeff_file):
    x = random_stimuli(1, 40, 3)[0]
    samples = _write_samples(tmp_path / "x.csv", x)
    out = tmp_path / "sim.csv"
    assert run(capsys, "graph", "simulate", graph_files[0], samples, "--sel-m", 2, "-o", out)[0] == 0
    cols = read_csv_columns(out)
    h = load_coefficients(coeff_file.read_text()).coeffs[::2]
    assert np.allclose(cols["y3_re"] + 1j * cols["y3_im"], reference_subband(x, h, 3, 8), atol=1e-12)


def test_graph_build_aliasing(capsys, coeff_file):
    code, _, err = run(capsys, "graph", "build", coeff_file, "--n", 8, "--mmax", 8)
    assert code == 2
    assert err.startswith("error[E_ALIASING]:")


def test_resources_and_report(capsys, graph_files, coeff_file):
    _, out, _ = run(capsys, "graph", "resources", graph_files[0])
    assert "muxes" in out and "16" in out
    code, out, _ = run(capsys, "report", coeff_file, "--n", 8, "--mmax", 5)
    assert code == 0
    assert "model units" in out
    assert len([line for line in out.splitlines() if "pipelined" in line or "original" in line]) >= 3


def test_check_aliasing(capsys):
    assert run(capsys, "check-aliasing", "--bandwidth", 0.125, "--cdm", 5) == (0, "PASS margin 0.375\n", "")
    code, out, _ = run(capsys, "check-aliasing", "--bandwidth", 0.125, "--cdm", 8)
    assert code != 0 and out.startswith("FAIL")


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "respond", tmp_path / "nope.txt")
    assert code == 2
    assert err.startswith("error[") and err.count("\n") == 1


def test_deterministic_outputs(capsys, tmp_path, coeff_file):
    outputs = []
    for i in range(2):
        d = tmp_path / str(i)
        run(capsys, "stimulus", "--length", 64, "--seed", 11, "-o", d / "x.csv")
        run(capsys, "graph", "build", coeff_file, "--n", 8, "--mmax", 3, "-o", d / "g.json")
        run(capsys, "respond", coeff_file, "--cdm", 2, "-o", d / "r.csv")
        outputs.append([(d / f).read_bytes() for f in ("x.csv", "g.json", "r.csv")])
    assert outputs[0] == outputs[1]


def test_env_output_dir(capsys, tmp_path, monkeypatch, coeff_file):
    monkeypatch.setenv("RDFTFB_OUT", str(tmp_path / "env"))
    code, out, _ = run(capsys, "respond", coeff_file, "--cdm", 2)
    assert code == 0 and out == ""
    assert (tmp_path / "env" / "response_m2.csv").exists()


def test_sample_round_trip():
    x = random_stimuli(1, 10, 0)[0]
    assert np.array_equal(read_samples(format_samples(x)), x)
    with pytest.raises(CoefficientParseError) as info:
        read_samples("re,im\n1,2\n1,x\n")
    assert info.value.line == 3
    with pytest.raises(CoefficientParseError):
        read_samples("a,b\n")


def test_stimulus_generator_is_pcg64():
    rng = np.random.default_rng(4)
    expected = rng.standard_normal((2, 5)) + 1j * rng.standard_normal((2, 5))
    assert np.array_equal(random_stimuli(2, 5, 4), expected)
