"""Acceptance gate: every headline check at its stated tolerance, one line each."""

from __future__ import annotations

import pytest

from helson_lab.acceptance import results_json, run_acceptance


@pytest.fixture(scope="module")
def acceptance():
    payload, runtimes = run_acceptance(7)
    return payload, runtimes


def _line(num: int, payload: dict, extra: str = "") -> bool:
    check = payload["checks"][str(num)]
    status = "PASS" if check["passed"] else "FAIL"
    print(f"[criterion {num}] {status} {check['name']} {extra}".rstrip())
    return check["passed"]


def test_criterion_1_mela_tv_bound(acceptance):
    payload, runtimes = acceptance
    rows = payload["checks"]["1"]["rows"]
    detail = " ".join(f"tv({r['epsilon']})={r['tv']:.2f}<= {r['slack'] * r['bound']:.2f}" for r in rows)
    ok = _line(1, payload, detail)
    assert ok
    assert runtimes["1"] <= 60.0


def test_criterion_2_drury_pipeline(acceptance):
    payload, runtimes = acceptance
    rows = payload["checks"]["2"]["rows"]
    worst_off = max(r["max_off_basis"] - r["epsilon"] for r in rows)
    ok = _line(2, payload, f"worst off-basis excess {worst_off:.2e}")
    assert ok
    assert runtimes["2"] <= 120.0


def test_criterion_3_riesz_identities(acceptance):
    payload, _ = acceptance
    rows = payload["checks"]["3"]["rows"]
    worst = max(r["fft_err"] for r in rows)
    assert _line(3, payload, f"max fft err {worst:.2e}")


def test_criterion_4_riesz_fourier_oracle(acceptance):
    payload, _ = acceptance
    rows = payload["checks"]["4"]["rows"]
    worst = max(r["max_err"] for r in rows)
    assert _line(4, payload, f"10 specs, max err {worst:.2e}")


def test_criterion_5_projector_telescope(acceptance):
    payload, _ = acceptance
    rows = payload["checks"]["5"]["rows"]
    detail = " ".join(f"{r['l2_err']:.3f}<={r['l2_bound']:.3f}" for r in rows)
    assert _line(5, payload, detail)


def test_criterion_6_a_norm_log_growth(acceptance):
    payload, _ = acceptance
    c = payload["checks"]["6"]
    assert _line(6, payload, f"R^2={c['r_squared']:.3f} b={c['slope_b']:.3f} (b reported)")


def test_criterion_7_gaussian_discrimination(acceptance):
    payload, runtimes = acceptance
    c = payload["checks"]["7"]
    detail = (
        f"G|z|max={max(abs(z) for z in c['gaussian_z']):.2f} "
        f"RP z2={c['random_phase_z'][1]:.0f} "
        f"cov={max(c['worst_spectral_ratio'].values()):.2f}se"
    )
    ok = _line(7, payload, detail)
    assert ok
    assert runtimes["7"] <= 90.0


def test_criterion_8_moment_machinery(acceptance):
    payload, _ = acceptance
    c = payload["checks"]["8"]
    assert _line(
        8, payload, f"norm4={c['norm4']:.4f} beta={c['growth_fit']:.3f} lc={c['logconvex_violations']}"
    )


def test_criterion_9_helson_sanity(acceptance):
    payload, _ = acceptance
    c = payload["checks"]["9"]
    assert _line(
        9,
        payload,
        f"single={c['singleton']:.6f} half={c['two_point_half']:.4f} pair={c['independent_pair']:.4f}",
    )


def test_criterion_10_determinism(acceptance):
    payload, _ = acceptance
    again, _ = run_acceptance(7)
    same = results_json(payload) == results_json(again)
    print(f"[criterion 10] {'PASS' if same else 'FAIL'} determinism byte-identical={same}")
    assert same
