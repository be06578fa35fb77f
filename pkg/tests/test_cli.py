import filecmp
import json

import numpy as np
import pytest

from ksurf import cli
from ksurf.endsolver import ode_radial_solve

CFG = {
    "k": 0.5,
    "m": 1,
    "Nx": 64,
    "Ny": 385,
    "Y": 6.0,
    "boundary": {"cos": [0.05, 0.02], "sin": []},
    "newton_tol": 1e-11,
}


@pytest.fixture(scope="session")
def artifact(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "cfg.json"
    cfg.write_text(json.dumps(CFG))
    out = root / "art"
    assert cli.main(["solve-end", "--config", str(cfg), "--out", str(out)]) == 0
    return cfg, out


def test_solve_end_writes_a_complete_artifact(artifact):
    _, out = artifact
    csv = (out / "end.csv").read_text().splitlines()
    assert csv[0] == "x,y,u"
    assert len(csv) == 1 + CFG["Nx"] * CFG["Ny"]
    meta = json.loads((out / "report.json").read_text())
    assert meta["kind"] == "end"
    assert meta["k"] == 0.5
    assert len(meta["config_sha256"]) == 64
    assert meta["version"]
    assert meta["report"]["converged"] is True


def test_identical_configs_give_byte_identical_artifacts(artifact, tmp_path):
    cfg, out = artifact
    out2 = tmp_path / "again"
    assert cli.main(["solve-end", "--config", str(cfg), "--out", str(out2)]) == 0
    assert filecmp.cmp(out / "end.csv", out2 / "end.csv", shallow=False)
    assert filecmp.cmp(out / "report.json", out2 / "report.json", shallow=False)


def test_expand_emits_series_with_decimal_strings(artifact, tmp_path):
    _, out = artifact
    assert cli.main(["expand", "--artifact", str(out), "--out", str(tmp_path)]) == 0
    series = json.loads((tmp_path / "series.json").read_text())
    assert series["kind"] == "series"
    assert series["config_sha256"] == json.loads(
        (out / "report.json").read_text()
    )["config_sha256"]
    assert float(series["r"]) == pytest.approx(0.05, rel=1e-3)
    assert float(series["c"][0]) == pytest.approx(0.02, rel=1e-3)
    for term in series["terms"]:
        assert set(term) == {"lambda", "mu", "re", "im"}
        for v in term.values():
            assert isinstance(v, str)
            float(v)
    assert float(series["remainder_exponent"]) > 1.0


def test_expand_rejects_an_artifact_with_no_end(artifact, tmp_path):
    _, out = artifact
    meta = json.loads((out / "report.json").read_text())
    zero = tmp_path / "zero"
    zero.mkdir()
    (zero / "report.json").write_text(json.dumps(meta))
    nx, ny = meta["Nx"], meta["Ny"]
    table = np.zeros((nx * ny, 3))
    np.savetxt(zero / "end.csv", table, delimiter=",", header="x,y,u", comments="")
    assert cli.main(["expand", "--artifact", str(zero), "--out", str(zero)]) == 2


def test_flux_reports_the_centroid_pairing(artifact, tmp_path):
    _, out = artifact
    assert cli.main([
        "flux", "--artifact", str(out), "--a", "1.0", "--b", "0.0",
        "--out", str(tmp_path),
    ]) == 0
    header = (tmp_path / "flux.csv").read_text().splitlines()[0]
    assert header == "y,conormal,dnu,alpha,normal_cumulative"
    rep = json.loads((tmp_path / "flux.json").read_text())
    limit = float(rep["profiles"]["conormal"]["limit"])
    assert limit == pytest.approx(-4.0 * np.pi * 0.02, rel=1e-3)


def test_steiner_of_an_artifact_round_trips(artifact, tmp_path):
    _, out = artifact
    assert cli.main(["steiner", "--artifact", str(out), "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "steiner.json").read_text())
    c = complex(float(rep["end"]["c"][0]), float(rep["end"]["c"][1]))
    zeta = complex(float(rep["end"]["zeta"][0]), float(rep["end"]["zeta"][1]))
    assert zeta == pytest.approx(1.0 / np.conj(c), rel=1e-12)
    assert float(rep["roundtrip_residual"]) < 1e-12


def test_relations_of_a_symmetric_example(tmp_path):
    assert cli.main([
        "relations", "--example", "II", "--n", "4", "--out", str(tmp_path),
    ]) == 0
    rep = json.loads((tmp_path / "relations.json").read_text())
    assert rep["passed"] is True
    assert float(rep["residuals"]["balance"]) < 1e-14
    assert rep["ends"][0]["zeta"] == "infinity"


def test_inadmissible_ramified_example_is_a_numerical_failure(tmp_path):
    code = cli.main([
        "relations", "--example", "III", "--n", "5", "--m0", "5", "--m1", "5",
        "--out", str(tmp_path),
    ])
    assert code == 2


def test_oracle_ode_matches_the_library_call(tmp_path):
    assert cli.main([
        "oracle-ode", "--k", "0.5", "--u0", "0.05", "--Y", "8.0",
        "--out", str(tmp_path),
    ]) == 0
    rep = json.loads((tmp_path / "radial.json").read_text())
    prof = ode_radial_solve(0.5, 0.05, Y=8.0)
    assert float(rep["slope0"]) == pytest.approx(prof.slope0, abs=1e-12)


@pytest.mark.parametrize(
    "cfg_patch",
    [
        {"k": 1.2},
        {"extra": 1},
        {"m": 0},
        {"Nx": "64"},
        {"boundary": {"cos": "bad"}},
    ],
)
def test_invalid_configs_exit_3(tmp_path, cfg_patch):
    cfg = dict(CFG, **cfg_patch)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["solve-end", "--config", str(path), "--out", str(tmp_path)]) == 3


def test_missing_config_exits_3(tmp_path):
    missing = tmp_path / "nope.json"
    assert cli.main(["solve-end", "--config", str(missing), "--out", str(tmp_path)]) == 3


def test_usage_errors_exit_3():
    with pytest.raises(SystemExit) as exc:
        cli.main(["solve-end", "--frobnicate"])
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 3


def test_oracle_ode_validates_parameters(tmp_path):
    assert cli.main(["oracle-ode", "--k", "1.5", "--u0", "0.05",
                     "--out", str(tmp_path)]) == 3
    assert cli.main(["oracle-ode", "--k", "0.5", "--u0", "-1.0",
                     "--out", str(tmp_path)]) == 3


def test_selftest_subset_passes_and_fault_injection_fails(tmp_path):
    assert cli.main(["selftest", "--criteria", "1", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "selftest.json").read_text())
    assert rep["ok"] is True
    assert rep["results"][0]["number"] == 1
    assert cli.main(["selftest", "--criteria", "1", "--fault-inject"]) == 1
    assert cli.main(["selftest", "--criteria", "1,99"]) == 3


def test_selftest_report_lists_every_criterion_line(capsys):
    code = cli.main(["selftest", "--criteria", "1,10,13"])
    assert code == 0
    out = capsys.readouterr().out
    for number in (1, 10, 13):
        assert f"criterion {number:2d} [PASS]" in out
