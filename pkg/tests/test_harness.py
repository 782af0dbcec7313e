import json

import jsonschema
import pytest

from polyberezin.harness.checks import REGISTRY, REQUIRED_TOPICS, UnknownCheck, get_check, select
from polyberezin.harness.config import ENV_VAR, HarnessConfig, load_config
from polyberezin.harness.report import REPORT_SCHEMA, SUITE_SCHEMA, CheckReport, jsonable, suite_json
from polyberezin.harness.runner import run_check, run_suite


def test_registry_covers_every_topic_once():
    topics = [s.topic for s in REGISTRY.values()]
    assert sorted(topics) == sorted(REQUIRED_TOPICS)
    assert len(set(topics)) == len(topics)
    for s in REGISTRY.values():
        assert s.statement and s.tags and s.id == s.id.strip().lower()


def test_select_by_tag_and_id():
    assert [s.id for s in select("lacunary-commutator")] == ["lacunary-commutator"]
    assert {s.id for s in select("membership")} >= {"toeplitz-stability", "zero-symbol-toeplitz", "dyadic-decay"}
    assert select("none-match") == []
    assert len(select()) == len(REGISTRY)


def test_unknown_check():
    with pytest.raises(UnknownCheck):
        get_check("unknown")
    with pytest.raises(UnknownCheck):
        run_check("unknown")


def test_empty_suite_exit_zero():
    reports, code = run_suite("none-match")
    assert reports == [] and code == 0


def test_config_precedence(tmp_path, monkeypatch):
    env = tmp_path / "env.json"
    env.write_text(json.dumps({"seed": 5, "workers": 3, "tolerances": {"limit": 1e-2}}))
    explicit = tmp_path / "cfg.json"
    explicit.write_text(json.dumps({"seed": 7, "tolerances": {"dyadic-decay.dyadic_limit": 0.5}}))
    monkeypatch.setenv(ENV_VAR, str(env))
    cfg = load_config()
    assert (cfg.seed, cfg.workers) == (5, 3)
    cfg = load_config(str(explicit))
    assert (cfg.seed, cfg.workers) == (7, 3)
    assert cfg.tolerance("limit") == 1e-2
    assert cfg.tolerance("dyadic_limit", "dyadic-decay") == 0.5
    assert cfg.tolerance("dyadic_limit", "other") == 1e-2
    cfg = load_config(str(explicit), seed=11, workers=None)
    assert (cfg.seed, cfg.workers) == (11, 3)


def test_config_defaults_and_validation(tmp_path, monkeypatch):
    monkeypatch.delenv(ENV_VAR, raising=False)
    cfg = load_config()
    assert cfg.tolerance("limit") == 1e-3
    assert cfg.tolerance("exact") == 1e-8
    assert cfg.tolerance("algebra") == 1e-12
    assert cfg.radii[0] == 1 - 2 ** -4 and cfg.radii[-1] == 1 - 2 ** -12 and len(cfg.radii) == 9
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"sed": 1}))
    with pytest.raises(ValueError):
        load_config(str(bad))
    with pytest.raises(ValueError):
        HarnessConfig(tolerances={"limt": 1})
    with pytest.raises(ValueError):
        HarnessConfig(workers=0)


def test_report_schema():
    ok = CheckReport("x", "pass", "s", runtime=0.1)
    jsonschema.validate(ok.to_json(), REPORT_SCHEMA)
    bad = CheckReport("x", "fail", "s", runtime=0.1)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(bad.to_json(), REPORT_SCHEMA)
    assert jsonable({"z": 1 + 2j, "inf": float("inf")}) == {"z": {"re": 1.0, "im": 2.0}, "inf": "inf"}


def test_passing_check_report():
    r = run_check("lacunary-commutator")
    assert r.status == "pass", r.failures
    jsonschema.validate(r.to_json(), REPORT_SCHEMA)
    assert abs(r.measured["limit"][0] - 0.5) < 1e-3
    assert r.tolerances == {"limit": 1e-3}


def test_failing_check_embeds_numbers():
    cfg = HarnessConfig(tolerances={"lacunary-commutator.limit": 1e-12})
    r = run_check("lacunary-commutator", cfg)
    assert r.status == "fail"
    f = [x for x in r.failures if "limit" in x][0]
    assert "error" in f and f["error"] > 1e-12
    jsonschema.validate(r.to_json(), REPORT_SCHEMA)


def test_resource_ceiling_is_skipped_not_passed():
    r = run_check("tensor-commutator", HarnessConfig(max_flat=10))
    assert r.status == "skipped" and "ResourceLimitExceeded" in r.message
    _, code = run_suite(only=["tensor-commutator"], config=HarnessConfig(max_flat=10))
    assert code == 0


def test_wall_time_is_skipped():
    r = run_check("symbol-map", HarnessConfig(wall_time=0.0))
    assert r.status == "skipped" and "CheckTimeout" in r.message


def test_deterministic_and_order_independent():
    ids = ["lacunary-commutator", "disk-projection", "poisson-radial-limit"]
    a, _ = run_suite(only=ids)
    b, _ = run_suite(only=ids, config=HarnessConfig(workers=3))
    assert [r.measured for r in a] == [r.measured for r in b]
    c, _ = run_suite(only=ids[::-1])
    assert [r.measured for r in c] == [r.measured for r in a][::-1]


def test_seed_changes_draws():
    a = run_check("poisson-radial-limit", HarnessConfig(seed=1))
    b = run_check("poisson-radial-limit", HarnessConfig(seed=2))
    assert a.measured != b.measured


def test_suite_json_schema():
    reports, code = run_suite(only=["disk-projection"])
    data = suite_json(reports, 1, code, 0.5)
    jsonschema.validate(data, SUITE_SCHEMA)
    assert data["summary"]["pass"] == 1 and data["summary"]["total"] == 1


def test_artifacts_written(tmp_path):
    r = run_check("lacunary-commutator", HarnessConfig(out_dir=str(tmp_path)))
    assert r.artifacts and all((tmp_path / "lacunary-commutator").exists() for _ in r.artifacts)
    assert {p.rsplit(".", 1)[1] for p in r.artifacts} == {"csv", "json", "svg"}
