import json
import math
import subprocess
import sys
from dataclasses import replace

import pytest

from sl_majorant.bounds import BoundCurve
from sl_majorant.cli import main
from sl_majorant.oracles import FdConfig, fd_ground_eigenvalue
from sl_majorant.potentials import single_well

PI2 = math.pi ** 2


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def lambda_line(out):
    line = next(l for l in out.splitlines() if l.startswith("lambda0 = "))
    return float(line.split("=")[1])


@pytest.mark.parametrize("value, expected", [(0, PI2), (-1, PI2 - 1.0)])
def test_eig_constant(tmp_path, capsys, value, expected):
    p = write(tmp_path, "q.json", {"type": "constant", "value": value})
    assert main(["eig", p]) == 0
    assert lambda_line(capsys.readouterr().out) == pytest.approx(expected, abs=1e-8)
    rec = json.loads((tmp_path / "q.eig.json").read_text())
    assert rec["command"] == "eig"
    assert rec["payload"]["lambda0"] == pytest.approx(expected, abs=1e-8)


def test_eig_well_matches_fd(tmp_path, capsys):
    p = write(tmp_path, "w.json", {"type": "well", "center": 0.5, "width": 0.5, "depth": 8})
    out = tmp_path / "rec.json"
    assert main(["eig", p, "--out", str(out)]) == 0
    fd = fd_ground_eigenvalue(single_well(0.5, 0.5, 8.0), FdConfig(20000))
    assert lambda_line(capsys.readouterr().out) == pytest.approx(fd, abs=1e-5)
    assert out.exists()


def test_eig_seventeen_digits(tmp_path, capsys):
    p = write(tmp_path, "q.json", {"type": "constant", "value": -1})
    main(["eig", p])
    lam = json.loads((tmp_path / "q.eig.json").read_text())["payload"]["lambda0"]
    assert capsys.readouterr().out == f"lambda0 = {lam:.17g}\n"


def test_eig_fd_oracle_for_deep_well(tmp_path, capsys):
    p = write(tmp_path, "deep.json", {"type": "constant", "value": -40})
    assert main(["eig", p]) == 3
    assert "--oracle fd" in capsys.readouterr().err
    assert main(["eig", p, "--oracle", "fd"]) == 0
    assert lambda_line(capsys.readouterr().out) == pytest.approx(PI2 - 40.0, abs=1e-8)


@pytest.mark.parametrize(
    "content",
    ['{"type": "bogus"}', "not json", '{"type": "constant", "value": 1}', '{"type": "constant"}'],
)
def test_eig_malformed(tmp_path, capsys, content):
    p = write(tmp_path, "bad.json", content)
    assert main(["eig", p]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_eig_missing_file(tmp_path):
    assert main(["eig", str(tmp_path / "nope.json")]) == 2


def test_verify_chain_constant(tmp_path, capsys):
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    code = main(["verify-chain", p, "--gamma", "0.45", "--normalize"])
    out = capsys.readouterr().out
    assert code == 0
    assert "defect_lt_epsilon" in out
    report = json.loads((tmp_path / "c.chain.json").read_text())
    assert report["gamma"] == 0.45
    assert "slacks" in report
    assert report["gamma_norm_via_phase"] == pytest.approx(1.0, abs=1e-6)
    assert (tmp_path / "c.chain.record.json").exists()


def test_verify_chain_edge_wells_all_pass(tmp_path, capsys):
    g = 0.45
    depth = (0.1 / 0.1) ** (1 / g)  # two wells of width 0.05 at gamma-norm 0.1
    p = write(tmp_path, "e.json", {"type": "edge_wells", "width": 0.05, "depth": depth})
    assert main(["verify-chain", p, "--gamma", str(g)]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("PASS")
    assert "FAIL" not in out


def test_verify_chain_not_applicable(tmp_path, capsys):
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    assert main(["verify-chain", p, "--gamma", "0.1", "--normalize"]) == 0
    assert "NOT APPLICABLE" in capsys.readouterr().out


@pytest.mark.parametrize("gamma", ["0.7", "0.5", "0"])
def test_verify_chain_gamma_domain(tmp_path, gamma):
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    assert main(["verify-chain", p, "--gamma", gamma]) == 2


def _tampered(monkeypatch, **changes):
    import sl_majorant.cli as cli

    real = cli.build_report

    def fake(*args, **kw):
        r = real(*args, **kw)
        slacks = dict(r.slacks, **changes.pop("slacks", {}))
        return replace(r, slacks=slacks, **changes)

    monkeypatch.setattr(cli, "build_report", fake)


def test_verify_chain_negative_slack_exit(tmp_path, capsys, monkeypatch):
    _tampered(monkeypatch, slacks={"split_bound": -1e-3})
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    assert main(["verify-chain", p, "--gamma", "0.45", "--normalize"]) == 4
    out = capsys.readouterr().out
    assert "FAIL" in out


def test_verify_chain_slack_within_tolerance(tmp_path, monkeypatch):
    _tampered(monkeypatch, slacks={"split_bound": -1e-7})
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    assert main(["verify-chain", p, "--gamma", "0.45", "--normalize"]) == 0


def test_verify_chain_contradiction_exit(tmp_path, capsys, monkeypatch):
    _tampered(monkeypatch, final_bound=0.5)
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    assert main(["verify-chain", p, "--gamma", "0.45", "--normalize"]) == 4
    assert "CONTRADICTION" in capsys.readouterr().out


def test_verify_chain_explicit_epsilon(tmp_path):
    p = write(tmp_path, "c.json", {"type": "constant", "value": -1})
    out = tmp_path / "r.json"
    assert main(["verify-chain", p, "--gamma", "0.45", "--normalize", "--epsilon", "0.2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["epsilon"] == 0.2


def test_upper_bound(tmp_path, capsys):
    out = tmp_path / "ub.json"
    assert main(["upper-bound", "--gamma", "0.3333333", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    eps = float(next(l for l in text.splitlines() if l.startswith("eps_star")).split("=")[1])
    assert eps == pytest.approx(4.9e-10, rel=0.01)
    assert "strict: True" in text
    assert json.loads(out.read_text())["payload"]["flags"] == "eps_star_active"


@pytest.mark.parametrize("gamma", ["0.5", "0.7", "-1"])
def test_upper_bound_domain(tmp_path, gamma):
    assert main(["upper-bound", "--gamma", gamma, "--out", str(tmp_path / "u.json")]) == 2


def test_search(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["search", "--gamma", "0.45", "--budget", "50", "--seeds", "2", "--out", str(out)]) == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("lower"))
    assert float(line.split()[2]) >= PI2 - 1.0
    rec = json.loads(out.read_text())
    assert rec["payload"]["lower"] >= PI2 - 1.0


def test_search_domain(tmp_path):
    assert main(["search", "--gamma", "0", "--out", str(tmp_path / "s.json")]) == 2


def test_sweep_rows_and_files(tmp_path, capsys):
    out = tmp_path / "sw"
    args = ["sweep", "--gamma-min", "0.35", "--gamma-max", "0.6", "--steps", "3",
            "--budget", "5", "--seeds", "1", "--cells", "8", "--out", str(out), "--svg"]
    assert main(args) == 0
    text = (out / "bound_curve.csv").read_text()
    assert text.splitlines()[0] == "gamma,lower,upper,eps_star,flags"
    curve = BoundCurve.from_csv(text)
    assert len(curve.rows) == 3
    for r in curve.rows[:2]:
        assert r.lower <= r.upper <= PI2
        assert r.flags.startswith("STRICT_THIS_PAPER")
    last = curve.rows[2]
    assert last.flags == "EQUALITY_PI2" and last.upper is None and last.lower is None
    assert (out / "bound_curve.dat").read_text().startswith("# gamma lower")
    assert (out / "bound_curve.svg").read_text().startswith("<svg")
    assert (out / "run.json").exists()


@pytest.mark.parametrize("lo, hi, steps", [("0.4", "0.3", "3"), ("0", "0.4", "3"), ("0.3", "0.4", "0")])
def test_sweep_invalid_range(tmp_path, lo, hi, steps):
    args = ["sweep", "--gamma-min", lo, "--gamma-max", hi, "--steps", steps, "--out", str(tmp_path)]
    assert main(args) == 2


def test_sweep_deterministic(tmp_path):
    for name in ("a", "b"):
        main(["sweep", "--gamma-min", "0.4", "--gamma-max", "0.45", "--steps", "2",
              "--budget", "5", "--seeds", "2", "--cells", "8", "--out", str(tmp_path / name)])
    for f in ("bound_curve.csv", "bound_curve.dat"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_entry_point_subprocess(tmp_path):
    p = write(tmp_path, "q.json", {"type": "constant", "value": 0})
    res = subprocess.run([sys.executable, "-m", "sl_majorant.cli", "eig", p], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("lambda0 = 9.8696044")
