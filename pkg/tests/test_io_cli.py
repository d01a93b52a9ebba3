import io
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavityshake.cli import main
from cavityshake.errors import InputError
from cavityshake.io import ScenarioConfig, SweepSpec, config_from_dict, load_config, read_csv, write_csv
from cavityshake.model import ModelParams


def run(args, capsys=None):
    code = main(args)
    out = capsys.readouterr() if capsys else None
    return code, out


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
def test_csv_round_trip_is_exact(vals):
    buf = io.StringIO()
    write_csv(buf, ["x"], [[v] for v in vals], {"k": 1.5}, timestamp=False)
    text = buf.getvalue()
    assert text.startswith("# k: 1.5\nx\n")
    body = text.splitlines()[2:]
    assert [float(x) for x in body] == [float(v) for v in vals]


def test_read_csv(tmp_path):
    f = tmp_path / "a.csv"
    write_csv(f, ["a", "b"], [(1, 2.5), (3, True)], {"note": "x"})
    meta, header, data = read_csv(f)
    assert meta["note"] == "x" and "generated" in meta
    assert header == ["a", "b"] and data.tolist() == [[1, 2.5], [3, 1.0]]


def test_config_unknown_keys_rejected():
    with pytest.raises(InputError, match="unknown key"):
        config_from_dict({"scenario": "custom", "paramz": {}})
    with pytest.raises(InputError, match="params"):
        config_from_dict({"params": {"E_0": 1.0}})
    with pytest.raises(InputError, match="numerics"):
        config_from_dict({"numerics": {"rtol": 1e-9}})
    with pytest.raises(InputError, match="sweep"):
        config_from_dict({"sweep": {"param": "rho", "min": 0, "max": 1, "count": 3}})
    with pytest.raises(InputError):
        config_from_dict({"sweep": {"param": "tau", "min": 0, "max": 1, "count": 1}})
    with pytest.raises(InputError):
        config_from_dict({"scenario": "fig9"})


def test_config_files(tmp_path):
    y = tmp_path / "c.yaml"
    y.write_text("scenario: fig2_transient_sweep\nparams: {lam: 0.02, tau: 0.5}\n"
                 "numerics: {window: [-50, 30]}\nsweep: {param: tau, min: 0.1, max: 1, count: 3, spacing: log}\n")
    c = load_config(y)
    assert c.params == ModelParams(lam=0.02, tau=0.5)
    assert c.numerics.window == (-50.0, 30.0)
    assert np.allclose(c.sweep.values(), [0.1, 0.1 ** 0.5, 1.0])
    j = tmp_path / "c.json"
    j.write_text(json.dumps({"params": {"E0": 1.2}, "workers": 2}))
    c = load_config(j)
    assert c.params.E0 == 1.2 and c.workers == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_config(bad)


def test_sweep_spec():
    assert SweepSpec("lam", 0, 1, 3).values().tolist() == [0, 0.5, 1]
    with pytest.raises(InputError):
        SweepSpec("lam", 0, 1, 3, "log")
    with pytest.raises(InputError):
        ScenarioConfig(workers=0)


def test_shake(capsys):
    code, out = run(["shake", "--lam", "0.05", "--no-timestamp"], capsys)
    assert code == 0
    assert "# param.lam: 0.05" in out.out
    assert "w_shake,0.0008904762574843979" in out.out


def test_fig1_includes_unit_ratio(tmp_path):
    f = tmp_path / "f1.csv"
    code, _ = run(["fig1", "--rho-range", "0.1", "10", "3", "--xi-range", "0.1", "1", "2", "-o", str(f)])
    assert code == 0
    _, header, d = read_csv(f)
    assert header == ["rho", "xi", "w_up"] and d.shape == (6, 3)
    assert np.all(d[np.isclose(d[:, 0], 1.0)][:, 2] == 0)
    # rho <-> 1/rho symmetry survives the export
    assert np.allclose(d[d[:, 0] < 1][:, 2], d[d[:, 0] > 1][:, 2], rtol=0, atol=1e-15)


def test_fig3_trace(tmp_path):
    f = tmp_path / "f3.csv"
    assert run(["fig3", "--tau", "1.0", "-o", str(f)])[0] == 0
    meta, header, d = read_csv(f)
    assert header == ["t", "abs_beta2"]
    assert d[:, 1].max() > d[-1, 1] > 0
    assert float(meta["n_dce"]) == pytest.approx(d[-1, 1], rel=1e-8)
    assert meta["window"] == "[-80.0, 30.0]"


def test_fig2_deterministic_across_workers(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {param: tau, min: 0.2, max: 2, count: 4, spacing: log}\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["fig2", "--config", str(cfg), "--no-timestamp", "-o", str(a)])[0] == 0
    assert run(["fig2", "--config", str(cfg), "--no-timestamp", "--workers", "2", "-o", str(b)])[0] == 0
    assert a.read_bytes() == b.read_bytes()
    _, header, d = read_csv(a)
    assert header == ["tau", "F", "w_up"] and np.all(d[:, 1] > 1)


def test_fig4_columns(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {param: tau, min: 0.5, max: 6, count: 2, spacing: log}\n")
    f = tmp_path / "f4.csv"
    assert run(["fig4", "--config", str(cfg), "-o", str(f)])[0] == 0
    _, header, d = read_csv(f)
    assert header[:4] == ["tau", "eta", "delta_N_inf", "N_dce"]
    assert np.isfinite(d[0]).all() and np.isnan(d[1, 1])


def test_generic_sweep(capsys):
    code, out = run(["sweep", "--param", "lam", "--min", "0", "--max", "0.2", "--count", "3",
                     "--quantity", "w_sudden", "--tau", "0", "--no-timestamp"], capsys)
    assert code == 0
    lines = [l for l in out.out.splitlines() if not l.startswith("#")]
    assert lines[0] == "lam,w_sudden" and lines[1] == "0.0,0.0"
    code, _ = run(["sweep", "--param", "lam"], capsys)
    assert code == 1


def test_oracle_command(tmp_path, capsys):
    tr, di = tmp_path / "t.csv", tmp_path / "d.csv"
    code, out = run(["oracle", "--tau", "1.0", "--trajectory", str(tr), "--distribution", str(di)], capsys)
    assert code == 0
    assert out.out.count(",true,") == 4
    _, h, d = read_csv(tr)
    assert h[0] == "t" and d.shape[1] == 6
    _, h, d = read_csv(di)
    assert h == ["n", "p_n"]


def test_exit_codes(tmp_path, capsys):
    assert run(["fig3", "--E0", "-1"], capsys)[0] == 1
    assert run(["fig3", "--bogus"], capsys)[0] == 1
    bad = tmp_path / "bad.yaml"
    bad.write_text("params: {lamda: 0.1}\n")
    code, out = run(["fig3", "--config", str(bad)], capsys)
    assert code == 1 and "lamda" in out.err
    # window far too short for the switch: numerical failure
    code, out = run(["fig3", "--tau", "1", "--window", "-1", "1"], capsys)
    assert code == 2 and "numerical" in out.err
    assert run(["check", "--only", "x"], capsys)[0] == 1


def test_check_exit_codes(capsys):
    code, out = run(["check", "--only", "8,12"], capsys)
    assert code == 0 and "2/2 criteria passed" in out.out
    code, out = run(["check", "--only", "4"], capsys)
    assert code == 3 and "[FAIL]" in out.out
