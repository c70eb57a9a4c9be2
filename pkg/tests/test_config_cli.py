import json
from pathlib import Path

import pytest

from hhaudit.cli import main
from hhaudit.config import ConfigError, parse_config, parse_params

ROOT = Path(__file__).resolve().parents[1]

BASE = """
[function:exp]
family = exp_affine
params = A=1, lam=1
assert_valid = yes

[grid]
a = 0
b = 1
alpha = 1
m = 1, 0.5
q = 1, 2

[certifier]
grid_points = 11
t_points = 5
random_samples = 200
"""


def test_parse_base():
    cfg = parse_config(BASE)
    assert [f.name for f in cfg.functions] == ["exp"] and cfg.functions[0].assert_valid
    assert list(cfg.grid.m) == [1.0, 0.5] and list(cfg.grid.q) == [1.0, 2.0]
    assert cfg.options.sampler.grid_points == 11 and cfg.options.sampler.seed == 0x5EED
    assert cfg.format == "csv" and not cfg.strict_published


def test_parse_tabulated_and_sections():
    text = BASE + """
[function:tab]
family = tabulated
nodes = 0, 0.5, 1, 1.5, 2
values = 1, 1.2, 1.6, 2.3, 3.2

[quadrature]
rel_tol_1d = 1e-9

[report]
format = json
strict_published = true
lemma1 = no
"""
    cfg = parse_config(text)
    assert cfg.functions[1].spec.approximate_derivative
    assert cfg.options.rel_tol_1d == 1e-9 and not cfg.options.lemma1
    assert cfg.format == "json" and cfg.strict_published


@pytest.mark.parametrize("patch,path", [
    (("[grid]", "[grid]\nbogus = 1"), "grid.bogus"),
    (("[certifier]", "[colours]\nx=1\n[certifier]"), "colours"),
    (("alpha = 1", "alpha = 1.5"), "grid.alpha"),
    (("alpha = 1", "alpha = one"), "grid.alpha"),
    (("q = 1, 2", "q = 0.5"), "grid.q"),
    (("m = 1, 0.5", "m = 0"), "grid.m"),
    (("params = A=1, lam=1", "params = A=1, lam=x"), "function:exp.params.lam"),
    (("params = A=1, lam=1", "params = A"), "function:exp.params"),
    (("params = A=1, lam=1", "params = B=1"), "function:exp"),
    (("family = exp_affine", "family = gamma"), "function:exp"),
    (("family = exp_affine", ""), "function:exp.family"),
    (("assert_valid = yes", "assert_valid = maybe"), "function:exp.assert_valid"),
    (("grid_points = 11", "grid_points = lots"), "certifier.grid_points"),
    (("b = 1", ""), "grid.b"),
])
def test_config_errors_carry_path(patch, path):
    old, new = patch
    with pytest.raises(ConfigError) as info:
        parse_config(BASE.replace(old, new, 1))
    assert info.value.path == path


def test_config_missing_sections():
    with pytest.raises(ConfigError):
        parse_config("[grid]\na=0\nb=1\nalpha=1\nm=1\n")
    with pytest.raises(ConfigError):
        parse_config("[function]\nfamily=exp_affine\n")
    with pytest.raises(ConfigError):
        parse_config(BASE + "[quadrature]\nrel_tol_2d = 1e-14\n")


def test_parse_params():
    assert parse_params("A=1, lam = 2.5,", "p") == {"A": 1.0, "lam": 2.5}


def _write(tmp_path, text):
    p = tmp_path / "c.ini"
    p.write_text(text)
    return str(p)


def test_cli_run_clean(tmp_path, capsys):
    code = main(["run", "--config", _write(tmp_path, BASE), "--out-dir", str(tmp_path / "o")])
    assert code == 0
    assert (tmp_path / "o" / "audit_report.csv").read_text().count("\n") == 5
    assert "cells=4" in capsys.readouterr().out


def test_cli_run_json_and_seed(tmp_path):
    out = tmp_path / "o"
    code = main(["run", "--config", _write(tmp_path, BASE), "--out-dir", str(out),
                 "--format", "json", "--seed", "BEEF", "--threads", "2"])
    assert code == 0
    assert json.loads((out / "audit_report.json").read_text())["summary"]["cells"] == 4


def test_cli_run_counterexample_on_asserted(tmp_path):
    cfg = _write(tmp_path, BASE.replace("alpha = 1", "alpha = 0.5"))
    assert main(["run", "--config", cfg, "--out-dir", str(tmp_path / "o")]) == 1


def test_cli_input_errors(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.ini")]) == 2
    assert main(["run", "--config", _write(tmp_path, "[nope]\n")]) == 2
    assert main(["run", "--config", _write(tmp_path, BASE), "--threads", "0"]) == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--config", "x", "--seed", "zz"])
    assert info.value.code == 2
    assert "error" in capsys.readouterr().err


def test_cli_check_function(capsys):
    assert main(["check-function", "--family", "exp_affine", "--params", "A=1,lam=1",
                 "--alpha", "1", "--m", "0.5", "--upper", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["m"]["status"] == "NoCounterexampleFound"
    assert main(["check-function", "--family", "exp_affine", "--params", "A=1,lam=1",
                 "--alpha", "0.5", "--m", "1", "--upper", "1"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["alpha_m"]["witness"] is not None
    assert main(["check-function", "--family", "exp_affine", "--m", "0", "--upper", "1"]) == 2


def test_cli_moments(capsys):
    assert main(["moments", "--kind", "abs_exp", "--c", "0.5", "--oracle"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["closed_form"] == pytest.approx(0.2414010, abs=1e-7)
    assert doc["relative_delta"] < 1e-10
    assert main(["moments", "--kind", "abs_pow", "--p", "2"]) == 0
    assert json.loads(capsys.readouterr().out)["closed_form"] == pytest.approx(1 / 6)
    assert main(["moments", "--kind", "abs_pow_exp", "--p", "2", "--c", "0.5"]) == 0
    assert "oracle" in json.loads(capsys.readouterr().out)
    assert main(["moments", "--kind", "exp"]) == 2


def test_shipped_config_parses():
    cfg = parse_config((ROOT / "configs" / "soundness.ini").read_text())
    assert len(cfg.functions) == 5


def test_readme_sample_parses():
    text = (ROOT / "README.md").read_text()
    sample = text.split("```ini\n", 1)[1].split("```", 1)[0]
    cfg = parse_config(sample)
    assert cfg.functions[0].name == "exp" and cfg.functions[0].spec.describe() == "A=1.0;lam=1.0;C=0.0"
    assert list(cfg.grid.q) == [1.0, 2.0, 4.0] and cfg.options.lemma1
