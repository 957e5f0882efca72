import math
from pathlib import Path

import numpy as np
import pytest

from nmcoherence import verify
from nmcoherence.cli import main
from nmcoherence.config import PRESETS, RunConfig, parse_lines
from nmcoherence.csvio import fmt, read_csv
from nmcoherence.errors import ConfigError

DATA = Path(__file__).parent / "data"


def definitional_tsallis(rho, alpha, modified):
    lam, vec = np.linalg.eigh(rho)
    lam = np.clip(lam, 0, None)
    power = (vec * lam**alpha) @ vec.conj().T
    total = np.sum(np.clip(np.diag(power).real, 0, None) ** (1 / alpha))
    return (total - 1) / (alpha - 1) if modified else (total**alpha - 1) / (alpha - 1)


def test_simulate_matches_golden_csv(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["simulate", "--preset", "fig1", "--set", "grid.dt=0.01", "-o", str(out)]) == 0
    assert out.read_bytes() == (DATA / "fig1_dt001.csv").read_bytes()


def test_golden_csv_agrees_with_definition():
    table = read_csv(DATA / "fig1_dt001.csv")
    d = math.sqrt(783)
    for i, t in enumerate(table.data[:, 0]):
        h = math.exp(-t / 2) * (math.cos(d * t / 2) + math.sin(d * t / 2) / d)
        f = h**4
        rho = 0.5 * np.array([[1, f], [f, 1]])
        for j, name in enumerate(table.header[1:], start=1):
            kind, alpha = name.split("_")
            ref = definitional_tsallis(rho, float(alpha), kind == "mtsallis")
            assert table.data[i, j] == pytest.approx(ref, abs=1e-10)


def test_csv_provenance_and_format(tmp_path):
    out = tmp_path / "a.csv"
    main(["simulate", "--set", "measures=skew,l1", "--set", "grid.dt=0.1", "--set", "seed=7", "-o", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config_digest=") and lines[1] == "# seed=7"
    assert lines[2] == "t,skew,l1"
    assert len(lines) == 3 + 11
    assert lines[3] == "0,0.5,1"


def test_fmt_caps_digits():
    assert fmt(0.1) == "0.1"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(0.0) == "0"
    assert fmt(1e-20) == "1e-20"


def test_simulate_writes_svg(tmp_path):
    csv, svg = tmp_path / "f5.csv", tmp_path / "f5.svg"
    rc = main(["simulate", "--preset", "fig5", "--set", "grid.dt=0.01", "-o", str(csv), "--svg", str(svg)])
    assert rc == 0
    text = svg.read_text()
    assert "config_digest=" in text and text.count('id="curve-') == 5
    header = read_csv(csv).header
    assert header == ["t", "tsallis_2", "mtsallis_2", "skew", "l1", "relent"]


def test_weak_coupling_curves_are_monotone(tmp_path):
    csv = tmp_path / "f3.csv"
    assert main(["simulate", "--preset", "fig3", "--set", "grid.dt=0.01", "-o", str(csv)]) == 0
    data = read_csv(csv).data
    assert np.all(np.diff(data[:, 1:], axis=0) <= 1e-12)


def test_w_sweep_columns(tmp_path):
    csv = tmp_path / "f4.csv"
    assert main(["simulate", "--preset", "fig4", "--set", "grid.dt=0.01", "--set", "grid.t_max=1", "-o", str(csv)]) == 0
    header = read_csv(csv).header
    assert header[1:3] == ["tsallis_0.2_W5", "mtsallis_0.2_W5"] and len(header) == 9


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nchannel.W=3\ngrid.dt=0.1\nmeasures=l1\n")
    out = tmp_path / "o.csv"
    assert main(["simulate", "-c", str(cfg), "--set", "channel.W=14", "-o", str(out)]) == 0
    ref = tmp_path / "r.csv"
    main(["simulate", "--set", "channel.W=14", "--set", "grid.dt=0.1", "--set", "measures=l1", "-o", str(ref)])
    assert out.read_bytes() == ref.read_bytes()


def test_digest_ignores_output_paths():
    a = RunConfig.from_mapping({"output.csv": "x.csv"})
    b = RunConfig.from_mapping({"output.csv": "y.csv"})
    c = RunConfig.from_mapping({"channel.W": "3"})
    assert a.digest == b.digest != c.digest


def test_presets_resolve():
    for name in PRESETS:
        cfg = RunConfig.from_mapping({}, preset=name)
        assert cfg.measures and cfg.lam == 1.0
    assert [m.name for m in RunConfig.from_mapping({}, preset="fig2").measures] == [
        "tsallis_0.001",
        "tsallis_2",
        "mtsallis_0.001",
        "mtsallis_2",
    ]


@pytest.mark.parametrize(
    "override",
    [
        "channel.family=xx",
        "grid.dt=abc",
        "grid.dt=0.3",
        "measures=tsallis:3",
        "measures=",
        "measures=skew,skew",
        "channel.W=0",
        "bogus.key=1",
        "state.a=0.9",
        "channel.profile=constant",
    ],
)
def test_config_errors_exit_2(override, capsys):
    args = ["simulate", "--set", override]
    if override == "state.a=0.9":
        args += ["--set", "state.b=0.9"]
    assert main(args) == 2
    assert "config error" in capsys.readouterr().err


def test_parse_lines_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_lines(["no equals sign"])


def test_numerical_error_exit_3(capsys):
    rc = main(["simulate", "--set", "channel.family=ad", "--set", "state.a=0.5", "--set", "state.b=0.5", "--set", "grid.dt=0.01"])
    assert rc == 3
    assert "StepTooLarge" in capsys.readouterr().err


def test_missing_command_exit_2():
    assert main([]) == 2


def test_measure_reports(tmp_path, capsys):
    rep, states = tmp_path / "m.txt", tmp_path / "s.csv"
    args = ["measure", "--set", "grid.dt=1e-3", "--set", "search.n_a=11", "--set", "search.n_b=11"]
    assert main(args + ["-o", str(rep), "--states", str(states)]) == 0
    kv = dict(line.split("=", 1) for line in rep.read_text().splitlines() if not line.startswith("#"))
    assert float(kv["measure_value"]) > 0.18
    assert kv["argmax_a"] == "0" and kv["argmax_b_abs"] == "1"
    assert kv["intervals"] == "4"
    table = read_csv(states)
    assert table.header == ["a", "b_abs", "measure_value"]
    assert "seed=0" in table.comments


@pytest.mark.parametrize("extra", [["--set", "channel.W=0.4"], ["--set", "channel.profile=constant", "--set", "channel.gamma0=0.5"]])
def test_measure_markovian_zero(extra, capsys):
    args = ["measure", "--set", "grid.dt=1e-3", "--set", "search.n_a=5", "--set", "search.n_b=5"]
    assert main(args + extra) == 0
    out = capsys.readouterr().out
    assert "measure_value=0\n" in out


def test_measure_ru_with_csv_rates(tmp_path, capsys):
    rate = tmp_path / "g1.csv"
    rate.write_text("t,gamma\n0,0.5\n1,0.5\n1.5,-0.6\n2,0.5\n3,0.5\n")
    states = tmp_path / "s.csv"
    args = [
        "measure",
        "--set", "channel.family=ru",
        "--set", f"channel.gamma1={rate}",
        "--set", "channel.gamma2=0.3",
        "--set", "channel.gamma3=0.1",
        "--set", "grid.dt=1e-3",
        "--set", "grid.t_max=3",
        "--set", "search.n_a=5",
        "--set", "search.n_b=5",
        "--set", "search.refinement=1",
        "--states", str(states),
    ]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert "argmax_r1=" in out
    assert float(out.split("measure_value=")[1].split()[0]) > 0
    assert read_csv(states).header == ["r1", "r2", "measure_value"]


def test_measure_needs_single_measure():
    assert main(["measure", "--set", "measures=skew,l1"]) == 2


def test_verify_signs(capsys, tmp_path):
    out = tmp_path / "v.txt"
    assert main(["verify", "signs", "-o", str(out)]) == 0
    text = capsys.readouterr().out
    assert "PASS signs/g_tilde<0" in text and "PASS signs/G>0" in text
    assert out.read_text().endswith(text)


def test_verify_failure_exit_1(monkeypatch, capsys):
    failing = lambda seed: [verify.Check("signs", "forced", False, 1.0, 0.0, "sample=(1,2,3)")]
    monkeypatch.setitem(verify.SUITE_FUNCS, "signs", failing)
    assert main(["verify", "signs"]) == 1
    assert "failed: signs/forced sample=(1,2,3)" in capsys.readouterr().err


def test_verify_prop1(capsys):
    assert main(["verify", "prop1"]) == 0
    assert "summary: 3 passed, 0 failed" in capsys.readouterr().out


def test_plot_from_csv(tmp_path):
    svg = tmp_path / "g.svg"
    assert main(["plot", str(DATA / "fig1_dt001.csv"), "-o", str(svg), "--title", "W=14"]) == 0
    text = svg.read_text()
    assert text.count('id="curve-') == 8
    assert "config_digest=a450eecbca6b49a1" in text


def test_plot_malformed_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,a\n0,1\n1,\n")
    assert main(["plot", str(bad)]) == 2
    bad.write_text("")
    assert main(["plot", str(bad)]) == 2
    assert main(["plot", str(tmp_path / "missing.csv")]) == 2
