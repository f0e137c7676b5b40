import subprocess
import sys

import pytest

from paraboloid_incidences.artifacts import import_artifact
from paraboloid_incidences.cli import main
from paraboloid_incidences.errors import ConfigError
from paraboloid_incidences.pipeline import (STAGES, PipelineConfig, parse_config_text,
                                            run_pipeline, validate_stages)

ARTIFACTS = ["P.points", "P.sums", "family.family", "histogram.hist", "selected.family",
             "k2t.witness", "dual.rpoints", "dual.planes", "inverted.rpoints",
             "inverted.spheres", "sheared.rpoints", "sample.cert", "sampled.family",
             "energy_vs_n.csv", "exponents.exp"]


def _kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    cfg = parse_config_text(f"d=4\nB=1\nseed=20240601\nout={out}\n")
    return cfg, run_pipeline(cfg), out


# ---------------------------------------------------------------- pipeline

def test_full_run_metrics(full_run):
    cfg, rep, out = full_run
    s = rep.stages
    assert s["build"]["points"] == 27
    assert s["energy"]["energy"] == 3735
    assert s["family"] == {"size": 200, "incidences": 837}
    assert s["histogram"]["levels"] == (93, 73, 34)
    assert s["select"]["level"] == 2 and s["select"]["size"] == 34
    assert s["k2t"]["t_max"] == 4
    for stage in ("dualize", "invert", "shear"):
        assert s[stage]["incidences"] == 282
    assert s["sparsify"]["accepted"] is True
    for name in ARTIFACTS + ["report.txt", "report.kv"]:
        assert (out / name).exists(), name
    assert set(rep.digests) == set(ARTIFACTS)


def test_full_run_artifacts_load(full_run):
    _, _, out = full_run
    assert len(import_artifact(out / "P.points")) == 27
    assert len(import_artifact(out / "selected.family")) == 34
    assert import_artifact(out / "sample.cert").accepted
    assert import_artifact(out / "exponents.exp").d == 4


def test_rerun_is_byte_identical(full_run, tmp_path):
    cfg, _, out = full_run
    again = PipelineConfig(**{**cfg.__dict__, "out": str(tmp_path)})
    run_pipeline(again)
    for name in ARTIFACTS:
        assert (out / name).read_bytes() == (tmp_path / name).read_bytes(), name


def test_energy_only_run(tmp_path):
    cfg = parse_config_text("d=4\nB=2\nstages=energy\n", {"out": str(tmp_path)})
    rep = run_pipeline(cfg)
    assert list(rep.stages) == ["build", "energy"]
    assert rep.stages["energy"]["energy"] == 128901
    assert not (tmp_path / "family.family").exists()


def test_stage_order_rejected():
    with pytest.raises(ConfigError):
        validate_stages(("select", "histogram", "family"))
    with pytest.raises(ConfigError):
        parse_config_text("d=4\nB=1\nstages=family,histogram,sparsify\n")
    with pytest.raises(ConfigError):
        validate_stages(("energy", "energy"))
    validate_stages(STAGES)


def test_config_errors():
    with pytest.raises(ConfigError):
        parse_config_text("B=1\n")
    with pytest.raises(ConfigError):
        parse_config_text("d=4\n")
    with pytest.raises(ConfigError):
        parse_config_text("d=4\nB=1\ncolour=red\n")
    with pytest.raises(ConfigError):
        parse_config_text("d=4\nB=one\n")
    with pytest.raises(ConfigError):
        parse_config_text("d=4\nB=1\nthreads=0\n")


def test_config_n_and_overrides():
    cfg = parse_config_text("d=4\nn=27\nseed=1\n", {"seed": 9})
    assert (cfg.B, cfg.n, cfg.seed) == (3, 27, 9)


def test_threads_do_not_change_results(tmp_path):
    a = run_pipeline(parse_config_text("d=4\nB=1\nstages=energy,family\n", {"out": str(tmp_path / "a")}))
    b = run_pipeline(parse_config_text("d=4\nB=1\nstages=energy,family\nthreads=3\n",
                                       {"out": str(tmp_path / "b")}))
    assert a.stages == b.stages and a.digests == b.digests


# ---------------------------------------------------------------- CLI

def run_cli(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, _kv(out.out), out.err


def test_cli_build_energy_family(capsys, tmp_path):
    pts = str(tmp_path / "P.points")
    rc, kv, _ = run_cli(capsys, "build", "--d", "4", "--B", "1", "--out", pts)
    assert rc == 0 and kv["points"] == "27"
    for method in ("table", "brute"):
        rc, kv, _ = run_cli(capsys, "energy", "--points", pts, "--method", method)
        assert rc == 0 and kv["energy"] == "3735"
    rc, kv, _ = run_cli(capsys, "energy", "--d", "2", "--B", "1", "--method", "quadrature")
    assert rc == 0 and abs(float(kv["energy"]) - 15) < 1e-6
    fam = str(tmp_path / "f.family")
    rc, kv, _ = run_cli(capsys, "family", "--points", pts, "--out", fam)
    assert rc == 0 and kv == {"size": "200", "incidences": "837", "wrote": fam}
    rc, kv, _ = run_cli(capsys, "histogram", "--family", fam, "--points", pts)
    assert rc == 0 and (kv["N_0"], kv["N_1"], kv["N_2"]) == ("93", "73", "34")
    assert kv["r_level"] == "0.0"


def test_cli_selection_chain(capsys, tmp_path):
    sel = str(tmp_path / "s.family")
    rc, kv, _ = run_cli(capsys, "select", "--d", "4", "--B", "1", "--out", sel)
    assert rc == 0 and kv["level"] == "2" and kv["size"] == "34"
    rc, kv, _ = run_cli(capsys, "k2t", "--d", "4", "--B", "1", "--family", sel)
    assert rc == 0 and kv["t_max"] == "4"
    dual = tmp_path / "dual"
    rc, kv, _ = run_cli(capsys, "dualize", "--d", "4", "--B", "1", "--family", sel, "--out", str(dual))
    assert rc == 0 and kv["incidences_after"] == kv["incidences_before"] == "282"
    for verb in ("invert", "shear"):
        rc, kv, _ = run_cli(capsys, verb, "--rpoints", str(dual / "dual.rpoints"),
                            "--planes", str(dual / "dual.planes"))
        assert rc == 0 and kv["incidences_after"] == "282", verb
    rc, kv, _ = run_cli(capsys, "sparsify", "--d", "4", "--B", "1", "--family", sel, "--seed", "5")
    assert rc == 0 and kv["accepted"] == "True"
    rc, kv, _ = run_cli(capsys, "sparsify", "--d", "4", "--B", "1", "--family", sel,
                        "--t", "100000", "--max-retries", "1")
    assert rc == 3 and kv["accepted"] == "False"


def test_cli_fit(capsys, tmp_path):
    csv = tmp_path / "s.csv"
    csv.write_text("x,y\n1,5\n2,20\n4,80\n")
    rc, kv, _ = run_cli(capsys, "fit", "--csv", str(csv))
    assert rc == 0 and abs(float(kv["slope"]) - 2) < 1e-12


def test_cli_errors(capsys, tmp_path):
    rc, _, err = run_cli(capsys, "energy")
    assert rc == 2 and "error" in err
    bad = tmp_path / "bad.points"
    bad.write_text("4 1 1\n0 0 0 0\n")
    rc, _, err = run_cli(capsys, "energy", "--points", str(bad))
    assert rc == 2 and "bad.points:3:" in err


def test_cli_pipeline_with_config(capsys, tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("d=4\nB=1\nstages=energy,family,histogram,select,k2t\n")
    rc, kv, _ = run_cli(capsys, "pipeline", "--config", str(conf), "--out", str(tmp_path / "o"))
    assert rc == 0
    assert (tmp_path / "o" / "report.kv").exists()
    rc, _, _ = run_cli(capsys, "pipeline", "--d", "4", "--B", "1", "--out", str(tmp_path / "p"))
    assert rc == 0


def test_console_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "paraboloid_incidences.cli", "energy",
                          "--d", "3", "--B", "1"], capture_output=True, text=True, check=True)
    assert "energy=233" in res.stdout
