import csv
import io
import json
import math

import pytest

from hslab.cli import EXIT_CONFIG, EXIT_FOCAL, EXIT_OK, EXIT_VERIFY, RunConfig, joint_eigen, main
from hslab.errors import InvalidArgumentError

LN2 = repr(math.log(2))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("space,n,ids", [
    ("CHn", 3, ["point", "complex:1", "complex:2", "real", "horosphere"]),
    ("HHn", 2, ["point", "quaternionic:1", "horosphere"]),
    ("CPn", 3, ["point", "complex:1", "complex:2"]),
])
def test_catalog(capsys, space, n, ids):
    code, out, _ = run(capsys, "catalog", "--space", space, "--n", str(n))
    assert code == EXIT_OK
    assert [r["family"] for r in rows(out)] == ids
    code, out, _ = run(capsys, "catalog", "--space", space, "--n", str(n), "--format", "json")
    assert [f["family"] for f in json.loads(out)] == ids


def test_spectrum_real_tube(capsys):
    code, out, _ = run(capsys, "spectrum", "--family", "real", "--r", LN2)
    assert code == EXIT_OK
    (row,) = rows(out)
    assert float(row["alpha"]) == pytest.approx(30 / 17, abs=1e-15)
    assert float(row["lambda_1"]) == pytest.approx(0.6, abs=1e-15)
    assert float(row["lambda_2"]) == pytest.approx(5 / 3, abs=1e-15)
    assert row["hopf_class"] == "Small"
    assert row["rho"] == row["sigma"] == ""


def test_spectrum_pseudo_einstein_rows(capsys):
    _, out, _ = run(capsys, "spectrum", "--family", "horosphere")
    (row,) = rows(out)
    assert (row["alpha"], row["lambda_1"], row["rho"], row["sigma"]) == ("2", "1", "-2", "6")
    _, out, _ = run(capsys, "spectrum", "--family", "point", "--r", LN2)
    (row,) = rows(out)
    assert float(row["rho"]) == pytest.approx(46 / 9, abs=1e-10)
    assert float(row["sigma"]) == pytest.approx(6, abs=1e-10)


def test_spectrum_grid_deterministic_across_threads(capsys, monkeypatch, tmp_path):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("HSLAB_THREADS", threads)
        path = tmp_path / f"s{threads}.csv"
        assert main(["spectrum", "--family", "complex:1", "--r-grid", "0.1:3:40", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    got = rows(outs[0].decode())
    assert len(got) == 40 and float(got[0]["r"]) == 0.1 and float(got[-1]["r"]) == 3.0


def test_spectrum_json(capsys):
    _, out, _ = run(capsys, "spectrum", "--space", "HHn", "--n", "2", "--family", "point", "--r", "0.5",
                    "--format", "json")
    obj = json.loads(out)
    assert obj["rows"][0]["spectral"]["alpha"] == [pytest.approx(2 / math.tanh(1.0))] * 3


@pytest.mark.parametrize("argv", [
    ["spectrum", "--family", "point", "--r", "-1"],
    ["spectrum", "--family", "point"],
    ["spectrum", "--family", "banana", "--r", "1"],
    ["spectrum", "--space", "CPn", "--family", "point", "--r", "2"],
    ["spectrum", "--family", "point", "--r-grid", "0.1:1:0"],
    ["spectrum", "--family", "point", "--r", "1", "--rtol", "0"],
    ["flow", "--family", "point", "--r", "1"],
    ["flow", "--lambda0", "1", "--t", "1"],
])
def test_invalid_config_exits_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_CONFIG
    assert "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["spectrum", "--r-grid", "nonsense"])
    assert exc.value.code == 2


def test_flow_semigroup_against_catalog(capsys):
    code, out, _ = run(capsys, "flow", "--family", "point", "--r", "0.4", "--t", "0.3", "--steps", "3")
    assert code == EXIT_OK
    last = rows(out)[-1]
    assert float(last["closed_form_residual"]) < 1e-8
    alpha = 2 / math.tanh(0.2)
    lam = 1 / math.tanh(0.1)
    vals = sorted(float(v) for k, v in last.items() if k.startswith("lambda_"))
    assert vals == pytest.approx([lam] * 4 + [alpha], rel=1e-8)


def test_flow_horosphere_constant(capsys):
    _, out, _ = run(capsys, "flow", "--family", "horosphere", "--t", "4", "--steps", "4")
    traces = [sum(float(v) for k, v in r.items() if k.startswith("lambda_")) for r in rows(out)]
    assert traces == [6.0] * 5


def test_flow_focal_event(capsys):
    code, out, err = run(capsys, "flow", "--lambda0", repr(5 / 3), "--kappa", "-1", "--t", "1")
    assert code == EXIT_FOCAL
    theta = float(err.split("~")[1])
    assert theta == pytest.approx(math.log(2), abs=1e-6)
    assert all(float(r["t"]) < math.log(2) for r in rows(out))
    code, _, _ = run(capsys, "flow", "--lambda0", repr(5 / 3), "--kappa", "-1", "--t", "1", "--expect-focal")
    assert code == EXIT_OK


def test_flow_and_report_from_json(capsys, tmp_path):
    from hslab.ambient import AmbientSpace
    from hslab.models import FocalKind, ModelFamily, spectrum_at
    from hslab.spectral import to_point
    import numpy as np

    d = spectrum_at(ModelFamily(AmbientSpace.CH(3), FocalKind.COMPLEX_SUB, 1), 0.5)
    p = to_point(d, np.random.default_rng(1))
    path = tmp_path / "point.json"
    path.write_text(json.dumps({"space": {"kind": "CHn", "n": 3}, "A": p.A.tolist()}))
    code, out, _ = run(capsys, "flow", "--input", str(path), "--t", "0.2", "--steps", "2")
    assert code == EXIT_OK
    assert max(float(r["closed_form_residual"]) for r in rows(out)) < 1e-8
    code, out, _ = run(capsys, "report", "--input", str(path), "--format", "json")
    rep = json.loads(out)
    assert rep["family"] == "complex:1" and rep["radius"] == pytest.approx(0.5)
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(d.to_json()))
    code, out, _ = run(capsys, "report", "--input", str(spec))
    assert code == EXIT_OK and "commuting_structure" in out


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "pairing")
    assert code == EXIT_OK
    assert out.splitlines()[-1].startswith("SUMMARY")
    code, out, _ = run(capsys, "verify", "thm1.5", "--n", "3")
    assert code == EXIT_OK and "CH3-complex:2 accept 25/25" in out
    assert run(capsys, "verify", "pseudo-einstein", "--n", "3")[1] == out
    code, _, err = run(capsys, "verify", "unknown")
    assert code == EXIT_CONFIG and "unknown suite" in err


def test_verify_failure_exits_3(capsys, monkeypatch):
    from hslab import verify

    monkeypatch.setitem(verify.SUITES, "broken", lambda: [verify.Check("broken", "x", False, 1.0)])
    code, out, _ = run(capsys, "verify", "broken")
    assert code == EXIT_VERIFY
    assert out.startswith("FAIL broken x")


def test_run_config_invariants():
    with pytest.raises(InvalidArgumentError):
        RunConfig("spectrum", grid=(0.1, 1.0, 0))
    with pytest.raises(InvalidArgumentError):
        RunConfig("spectrum", pe_tol=-1)
    assert RunConfig("spectrum", grid=(0.5, 1.5, 3)).radii() == [0.5, 1.0, 1.5]


def test_joint_eigen():
    import numpy as np

    assert joint_eigen(np.diag([1.0, 2.0]), np.array([[0, 1.0], [1.0, 0]])) is None
    lams, kaps = joint_eigen(np.diag([3.0, 2.0, 1.0]), np.diag([-1.0, -1.0, -4.0]))
    assert sorted(zip(kaps, lams)) == [(-4.0, 1.0), (-1.0, 2.0), (-1.0, 3.0)]
