import json

import pytest

from polyberezin.cli import main
from polyberezin.fourier_symbols import FourierSymbol


@pytest.fixture
def symbol_file(tmp_path):
    path = tmp_path / "phi.json"
    path.write_text(json.dumps(FourierSymbol.from_dict({(1,): 1, (-2,): 0.5j}).to_json()))
    return str(path)


def test_verify_only(tmp_path, capsys):
    assert main(["verify", "--only", "lacunary-commutator", "--out", str(tmp_path), "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "lacunary-commutator" in out
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["seed"] == 3 and data["exit_code"] == 0
    assert (tmp_path / "lacunary-commutator" / "lacunary_commutator.svg").exists()


def test_verify_failure_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"tolerances": {"lacunary-commutator.limit": 1e-12}}))
    assert main(["verify", "--only", "lacunary-commutator", "--config", str(cfg)]) == 1


def test_berezin_gallery(tmp_path, capsys):
    assert main(["berezin", "--op", "lacunary-commutator", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "limit 0.4999" in out or "limit 0.5000" in out
    for ext in ("csv", "json", "svg"):
        assert (tmp_path / f"profile.{ext}").exists()


def test_berezin_symbol(tmp_path, symbol_file, capsys):
    assert main(["berezin", "--symbol", symbol_file, "--zeta", "0.7", "--radii", "0.9,0.95,0.99,0.995",
                 "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "profile.csv").read_text().splitlines()
    assert len(rows) == 5


def test_recover(symbol_file, capsys):
    assert main(["recover", "--symbol", symbol_file, "--grid", "3"]) == 0
    out = capsys.readouterr().out
    assert "over 3 points" in out
    err = float(out.split("max error")[1].split()[0])
    assert err < 1e-3


def test_diagnose(capsys):
    assert main(["diagnose", "--op", "identity", "--zetas", "1"]) == 0
    assert "inconsistent" in capsys.readouterr().out
    assert main(["diagnose", "--op", "dyadic-projection", "--zetas", "1", "--model", "sqrt-tlog"]) == 0
    assert ": consistent" in capsys.readouterr().out


def test_bad_gallery_id(capsys):
    assert main(["berezin", "--op", "nope"]) == 2
    assert "unknown gallery id" in capsys.readouterr().err
