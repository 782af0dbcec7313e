"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line; the lines are
repeated in the pytest terminal summary.  Run directly with
``python3 tests/test_acceptance.py`` for the lines alone.
"""

import time

import pytest

from polyberezin.harness.checks import REGISTRY, REQUIRED_TOPICS
from polyberezin.harness.config import HarnessConfig
from polyberezin.harness.runner import run_check, run_suite

ACCEPTANCE_LINES: list[str] = []


def criterion(num: int, title: str, ok: bool, detail: str):
    line = f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def cfg():
    return HarnessConfig()


def _run(check_id, cfg):
    r = run_check(check_id, cfg)
    return r, r.measured


def test_01_lacunary_commutator_limit(cfg):
    r, m = _run("lacunary-commutator", cfg)
    err = abs(m["limit"][0] - 0.5) + abs(m["limit"][1])
    ok = r.status == "pass" and err <= 1e-3 and m["max_gap_over_bound"] <= 1.0 and r.runtime < 30
    criterion(1, "lacunary commutator limit 1/2", ok,
              f"limit={m['limit'][0]:.8f} |err|={err:.2e} (tol 1e-3), closed-form gap/bound="
              f"{m['max_gap_over_bound']:.2e} (<=1), {r.runtime:.2f}s (<30s)")


def test_02_tensor_bound(cfg):
    r, m = _run("tensor-commutator", cfg)
    p = REGISTRY["tensor-commutator"].params
    ok = (r.status == "pass" and p["points"] == 100 and p["oracle_points"] == 20
          and m["min_value_n2"] >= 0.25 and m["min_value_n3"] >= 0.125
          and m["max_oracle_gap_n2"] <= 1e-8 and m["max_oracle_gap_n3"] <= 1e-8 and r.runtime < 120)
    criterion(2, "tensor commutator >= 2^-n", ok,
              f"min n=2 {m['min_value_n2']:.4f} (>=0.25), min n=3 {m['min_value_n3']:.4f} (>=0.125), "
              f"oracle gaps {m['max_oracle_gap_n2']:.1e}/{m['max_oracle_gap_n3']:.1e} (<=1e-8), {r.runtime:.1f}s (<120s)")


def test_03_symbol_map_round_trip(cfg):
    r, m = _run("symbol-map", cfg)
    p = REGISTRY["symbol-map"].params
    ok = (r.status == "pass" and p["symbols"] == 10 and p["zetas"] == 8 and p["degree"] <= 3
          and m["max_recovery_error"] <= 1e-3 and r.runtime < 180)
    criterion(3, "symbol map round trip", ok,
              f"max |Sigma(T_phi)(zeta) - phi(zeta)| = {m['max_recovery_error']:.2e} (tol 1e-3) over "
              f"{p['symbols']}x{p['zetas']}, {r.runtime:.1f}s (<180s)")


def test_04_semicommutator_annihilation(cfg):
    r, m = _run("semicommutator-ideal", cfg)
    ok = (r.status == "pass" and m["max_abs_limit"] <= m["max_uncertainty"]
          and m["max_uncertainty"] <= 1e-3)
    criterion(4, "semicommutator Berezin -> 0", ok,
              f"max |limit| = {m['max_abs_limit']:.2e}, max uncertainty = {m['max_uncertainty']:.2e} (cap 1e-3)")


def test_05_hankel_identity(cfg):
    r, m = _run("hankel-decay", cfg)
    ok = r.status == "pass" and m["max_route_gap"] <= 1e-8
    criterion(5, "Hankel identity and decay", ok,
              f"route gap {m['max_route_gap']:.2e} (tol 1e-8), max |limit| {m['max_abs_limit']:.2e} within uncertainty")


def test_06_berezin_poisson_equality(cfg):
    r, m = _run("berezin-toeplitz", cfg)
    p = REGISTRY["berezin-toeplitz"].params
    ok = r.status == "pass" and p["pairs"] == 50 and m["max_gap_over_bound"] <= 1.0
    criterion(6, "Berezin(T_phi) = Poisson extension", ok,
              f"max gap / own error bound = {m['max_gap_over_bound']:.2e} (<=1) over {p['pairs']} pairs")


def test_07_two_route_semicommutator(cfg):
    r, m = _run("semicommutator-ideal", cfg)
    ok = r.status == "pass" and REGISTRY["semicommutator-ideal"].params["route_M"] == 6 \
        and m["max_two_route_gap"] <= 1e-12
    criterion(7, "semicommutator = H*H on exact window", ok,
              f"max entry gap {m['max_two_route_gap']:.2e} (tol 1e-12), n=1..3, M=6")


def test_08_dyadic_decay(cfg):
    r, m = _run("dyadic-decay", cfg)
    lim = abs(complex(*m["limit"]))
    ok = r.status == "pass" and lim <= 1e-2
    criterion(8, "dyadic projection ||P k|| -> 0", ok,
              f"|limit| = {lim:.2e} (tol 1e-2), partial-sum gap {m['max_partial_sum_gap']:.1e}")


def test_09_counterexample_separation(cfg):
    sc, msc = _run("self-commutator", cfg)
    lac, mlac = _run("lacunary-commutator", cfg)
    ok = (sc.status == "pass" and lac.status == "pass" and abs(mlac["limit"][0] - 0.5) <= 1e-3
          and msc["max_abs_limit"] <= msc["max_uncertainty"])
    criterion(9, "Toeplitz self-commutators vanish, lacunary does not", ok,
              f"Toeplitz max |limit| {msc['max_abs_limit']:.1e}, lacunary limit {mlac['limit'][0]:.6f}")


def test_10_full_verify_suite():
    t0 = time.monotonic()
    a, code_a = run_suite(config=HarnessConfig(workers=4))
    elapsed = time.monotonic() - t0
    b, code_b = run_suite(config=HarnessConfig(workers=1))
    same = [(r.id, r.status, r.measured) for r in a] == [(r.id, r.status, r.measured) for r in b]
    topics = sorted(s.topic for s in REGISTRY.values()) == sorted(REQUIRED_TOPICS)
    bad = [r.id for r in a if r.status != "pass"]
    ok = code_a == 0 and code_b == 0 and same and topics and elapsed < 600 and not bad
    criterion(10, "full verify suite", ok,
              f"{len(a)} checks, exit {code_a}, deterministic={same}, coverage={topics}, "
              f"{elapsed:.1f}s (<600s), non-passing={bad}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
