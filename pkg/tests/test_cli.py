import csv

import pytest

from trendprice import cli, config


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def values(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and " " not in line)


def test_spectrum_prints_constants(tmp_path, capsys):
    rc, out, _ = run(capsys, "spectrum", "--out", str(tmp_path))
    assert rc == cli.EXIT_OK
    v = values(out)
    assert float(v["a0"]) == pytest.approx(3.940733135692915, abs=1e-12)
    assert float(v["R0"]) == pytest.approx(9.359088829373068, abs=1e-11)
    assert float(v["R1"]) == pytest.approx(-117.35808337835226, rel=1e-10)
    rows = list(csv.DictReader(open(tmp_path / "crossings.csv")))
    assert len(rows) == int(v["crossings"])
    assert (tmp_path / "spectrum.svg").read_text().startswith("<svg")
    q = list(csv.DictReader(open(tmp_path / "eigenfunction.csv")))
    assert len(q) == 401 and float(q[200]["x"]) == 0.0
    assert float(q[200]["re_q"]) == 0.0  # q0(0) = 0


def test_spectrum_one_crossing_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    run(capsys, "spectrum", "--out", str(a), "--a_max", "5", "--format", "csv")
    run(capsys, "spectrum", "--out", str(b), "--a_max", "5", "--format", "csv")
    text = (a / "crossings.csv").read_bytes()
    assert text == (b / "crossings.csv").read_bytes()
    assert len(text.decode().splitlines()) == 2
    assert not (a / "spectrum.svg").exists()


def test_spectrum_real_instability_line(tmp_path, capsys):
    _, out, _ = run(capsys, "spectrum", "--out", str(tmp_path), "--R", "-2", "--a_max", "5")
    assert "real_unstable=1.57861938200981" in out


def test_waves(tmp_path, capsys):
    rc, out, _ = run(capsys, "waves", "--out", str(tmp_path), "--c", "-2", "--rho", "2", "--phi", "phi3")
    assert rc == 0
    v = values(out)
    assert float(v["max_residual"]) < 1e-10
    ex = list(csv.DictReader(open(tmp_path / "existence.csv")))
    Rs = {float(r["R"]) for r in ex}
    assert -0.7 not in Rs and -2.0 in Rs and -0.8 in Rs


def test_waves_linear_continuum(tmp_path, capsys):
    run(capsys, "waves", "--out", str(tmp_path), "--phi", "linear", "--R_values=-1,-2")
    rows = list(csv.DictReader(open(tmp_path / "existence.csv")))
    assert rows == [{"R": "-1.0000000000000000e+00", "rho": "ALL_RHO"}]


def test_simulate_decay(tmp_path, capsys):
    rc, out, _ = run(capsys, "simulate", "--out", str(tmp_path), "--R", "0", "--t_end", "0.6",
                     "--snapshot_times", "0,0.3")
    assert rc == 0
    assert "classification=DECAY" in out and "decayed" in out.splitlines()
    names = sorted(p.name for p in (tmp_path / "snapshots").iterdir())
    assert names == ["w_t0.000000.csv", "w_t0.000000.svg", "w_t0.300000.csv", "w_t0.300000.svg"]
    rows = list(csv.reader(open(tmp_path / "trace.csv")))
    assert rows[0] == ["t", "p", "p_prime", "flux"] and len(rows) == 6002


def test_simulate_blowup_exit_code(tmp_path, capsys):
    rc, out, _ = run(capsys, "simulate", "--out", str(tmp_path), "--phi", "linear", "--t_end", "3")
    assert rc == cli.EXIT_NUMERICAL
    assert "status=BLOWUP" in out
    assert (tmp_path / "trace.csv").exists()


def test_verify_passes_and_fails(capsys):
    rc, out, _ = run(capsys, "verify")
    assert rc == cli.EXIT_OK, out
    assert out.count("PASS") == len(cli.run_checks.__globals__["CHECKS"])
    rc, out, _ = run(capsys, "verify", "--delta_mass", "1.05")
    assert rc == cli.EXIT_VERIFY
    assert "FAIL discrete equilibrium stationarity" in out


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# spectrum settings\na_max = 8\nformat = csv\n")
    run(capsys, "spectrum", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert len((tmp_path / "o" / "crossings.csv").read_text().splitlines()) == 3
    run(capsys, "spectrum", "--config", str(cfg), "--a_max", "5", "--out", str(tmp_path / "p"))
    assert len((tmp_path / "p" / "crossings.csv").read_text().splitlines()) == 2


def test_unknown_key_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("a_max = 5\nbogus = 1\n")
    rc, _, err = run(capsys, "spectrum", "--config", str(cfg), "--out", str(tmp_path))
    assert rc == cli.EXIT_CONFIG and "bogus" in err
    # a key valid elsewhere is still unknown to this command
    cfg.write_text("dt = 1e-3\n")
    assert run(capsys, "spectrum", "--config", str(cfg), "--out", str(tmp_path))[0] == cli.EXIT_CONFIG


def test_bad_values_are_config_errors(tmp_path, capsys):
    assert run(capsys, "simulate", "--out", str(tmp_path), "--grid.h", "0.03")[0] == cli.EXIT_CONFIG
    assert run(capsys, "simulate", "--out", str(tmp_path), "--phi", "cubic")[0] == cli.EXIT_CONFIG
    assert run(capsys, "waves", "--out", str(tmp_path), "--c", "0")[0] == cli.EXIT_CONFIG
    assert run(capsys, "spectrum", "--config", str(tmp_path / "missing.cfg"))[0] == cli.EXIT_CONFIG


def test_unwritable_output_is_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rc, _, err = run(capsys, "spectrum", "--out", str(blocker / "sub"), "--a_max", "5")
    assert rc == cli.EXIT_IO and "cannot write" in err


def test_parse_text():
    assert config.parse_text("a = 1 # c\n\n b=2") == {"a": "1", "b": "2"}
    with pytest.raises(config.ConfigError):
        config.parse_text("novalue")
    cfg = config.resolve({"R_values": "1, 2;3"}, None, ["R_values"])
    assert cfg["R_values"] == [1.0, 2.0, 3.0]
