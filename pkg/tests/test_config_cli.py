import dataclasses
import json
import os

import pytest

from laminar.cli import main
from laminar.config import _SCHEMA, ExperimentConfig, default_config_text, parse_config, parse_family
from laminar.errors import ConfigurationError
from laminar.lamination import FamilyKind

SMALL = """\
[general]
seed = 7

[family]
families = product, shear:0.5

[estimates]
schwarz_samples = 2000
two_leaf_samples = 1000
delta0_samples = 2000
separation_deltas = 0.1, 0.05

[smooth]
delta_list = 0.1, 0.05
targets = re, composite
error_samples = 300

[currents]
quad_order = 64
n_currents = 2
atoms_per_current = 2
n_forms = 3
recon_atoms = 2
recon_forms = 2
mc_samples = 20000
bins = 16
recon_tol = 0.05

[counterexample]
cubic_deltas = 0.1, 0.05
mollifier_radii = 0.05
poly_degrees = 2, 4
"""


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL)
    return str(p)


def test_schema_covers_every_field():
    assert set(_SCHEMA) == {f.name for f in dataclasses.fields(ExperimentConfig)}


def test_default_text_roundtrip():
    assert parse_config(default_config_text()) == ExperimentConfig()


def test_parse_values():
    cfg = parse_config(SMALL)
    assert cfg.seed == 7
    assert cfg.families == ["product", "shear:0.5"]
    assert cfg.delta_list == [0.1, 0.05]
    assert cfg.poly_degrees == [2, 4]


def test_atoms_parse():
    cfg = parse_config("[currents]\natoms = 0.1:0.2:1.5; -0.3:0:2\n")
    assert cfg.atoms == [[0.1, 0.2, 1.5], [-0.3, 0.0, 2.0]]


@pytest.mark.parametrize("text, line, fragment", [
    ("[general]\nseed = 1\n\n[estimates]\nschwarz_samples = 0\n", 5, "schwarz_samples must be positive"),
    ("[smooth]\ndelta_list = 0.05, 0.1\n", 2, "strictly decreasing"),
    ("[general]\nseed = x\n", 2, "bad value for seed"),
    ("[general]\nsed = 1\n", 2, "unknown key"),
    ("[general]\n\n[bogus]\na = 1\n", 3, "unknown section"),
    ("[currents]\natoms = 0.1:0.2\n", 2, "re:im:weight"),
])
def test_errors_name_the_line(text, line, fragment):
    with pytest.raises(ConfigurationError) as exc:
        parse_config(text, "cfg.ini")
    assert f"cfg.ini:{line}" in str(exc.value)
    assert fragment in str(exc.value)


def test_family_descriptors():
    assert parse_family("product").kind is FamilyKind.PRODUCT
    assert parse_family("shear:0.5").a == 0.5
    assert parse_family("exp: 0.2").lam == 0.2
    assert parse_family("cubic") == "cubic"
    with pytest.raises(ConfigurationError):
        parse_family("nonlinear:0.1j")
    with pytest.raises(ConfigurationError):
        parse_family("spiral:1")
    with pytest.raises(ConfigurationError):
        parse_family("shear:abc")


def test_digest_ignores_output_location():
    a, b = ExperimentConfig(), ExperimentConfig(out="elsewhere", jobs=4)
    assert a.digest() == b.digest()
    assert a.digest() != ExperimentConfig(seed=1).digest()


# -- CLI -----------------------------------------------------------------------

def _csv_bytes(d):
    return {f: open(os.path.join(d, f), "rb").read() for f in sorted(os.listdir(d)) if f.endswith(".csv")}


def test_show_config(capsys):
    assert main(["show-config"]) == 0
    assert "[general]" in capsys.readouterr().out


def test_run_all_deterministic(small_config, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["all", "--config", small_config, "--out", a]) == 0
    assert main(["all", "--config", small_config, "--out", b, "--jobs", "2"]) == 0
    ca, cb = _csv_bytes(a), _csv_bytes(b)
    assert ca == cb and len(ca) >= 10
    manifest = json.load(open(os.path.join(a, "manifest.json")))
    assert set(manifest["files"]) == set(os.listdir(a))
    assert set(manifest["suites"]) == {"estimates", "smooth", "currents", "counterexample"}
    assert all(s["pass"] for s in manifest["suites"].values())
    assert manifest == json.load(open(os.path.join(b, "manifest.json")))


def test_csv_headers(small_config, tmp_path):
    out = str(tmp_path / "o")
    main(["all", "--config", small_config, "--out", out])
    head = lambda f: open(os.path.join(out, f)).readline().strip()  # noqa: E731
    conv = [f for f in os.listdir(out) if f.startswith("convergence_") and f != "convergence_plot.csv"]
    assert conv and all(head(f) == "delta,sup_err,leaf_c1_x1,leaf_c1_x2,fit_pred" for f in conv)
    assert head("reconstruction.csv") == "form_id,value_direct,value_reconstructed,residual"
    assert head("obstruction.csv") == "candidate_id,eta,eps,combined,pass"
    assert head("witness.csv") == "epsilon,axis_pairing,leaf_pairing,exponent_fit"


def test_seed_flag_changes_sampled_outputs(small_config, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    main(["currents", "--config", small_config, "--out", a])
    main(["currents", "--config", small_config, "--out", b, "--seed", "8"])
    assert _csv_bytes(a)["reconstruction.csv"] != _csv_bytes(b)["reconstruction.csv"]


def test_manifest_merges_suites(small_config, tmp_path):
    out = str(tmp_path / "m")
    main(["estimates", "--config", small_config, "--out", out])
    main(["counterexample", "--config", small_config, "--out", out])
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert set(manifest["suites"]) == {"estimates", "counterexample"}
    main(["counterexample", "--config", small_config, "--out", out, "--seed", "3"])
    manifest = json.load(open(os.path.join(out, "manifest.json")))
    assert set(manifest["suites"]) == {"counterexample"}


def test_smooth_requires_estimates(small_config, tmp_path, capsys):
    assert main(["smooth", "--config", small_config, "--out", str(tmp_path / "x")]) == 2
    assert "laminar estimates" in capsys.readouterr().err


def test_bad_config_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.ini"
    p.write_text("[estimates]\nschwarz_samples = 0\n")
    assert main(["estimates", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "bad.ini:2" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["estimates", "--config", str(tmp_path / "nope.ini")]) == 2


def test_empty_current(tmp_path):
    p = tmp_path / "empty.ini"
    p.write_text(SMALL.replace("n_currents = 2", "n_currents = 0").replace("recon_atoms = 2", "recon_atoms = 0"))
    out = str(tmp_path / "e")
    assert main(["currents", "--config", str(p), "--out", out]) == 0
    rows = open(os.path.join(out, "disintegration.csv")).read().splitlines()
    assert rows == ["bin,label_re,label_im,mass,count"]
    wedge = open(os.path.join(out, "wedge_defect.csv")).read().splitlines()
    assert all(",dw_control," in r for r in wedge[1:])


def test_failing_gate_exit_code(small_config, tmp_path):
    p = tmp_path / "strict.ini"
    # a control threshold no defect can exceed forces a FAIL (exit 1, not an error)
    p.write_text(SMALL.replace("recon_tol = 0.05", "recon_tol = 0.05\ncontrol_threshold = 1e9"))
    assert main(["currents", "--config", str(p), "--out", str(tmp_path / "f")]) == 1
