"""Synthesis, spectral estimation, and moment diagnostics for atomic-spectrum sequences."""

from __future__ import annotations

import math

import numpy as np
import pytest

from helson_lab import gauss as G
from helson_lab.errors import OutOfRange
from helson_lab.torus import AtomicCircleMeasure

ALPHA = (math.sqrt(5.0) - 1.0) / 2.0
LAM8 = sorted((k * ALPHA) % 1.0 for k in range(1, 9))
SPEC8 = AtomicCircleMeasure.from_pairs([(l, 1.0 / 8) for l in LAM8])


@pytest.fixture(scope="module")
def xg_200k():
    return G.simulate(G.GaussianModel(spectrum=SPEC8, T_len=200_000, seed=13))


@pytest.fixture(scope="module")
def xr_200k():
    return G.simulate(G.RandomPhaseModel(spectrum=SPEC8, T_len=200_000, seed=13))


@pytest.fixture(scope="module")
def z_iid():
    rng = np.random.default_rng(11)
    n = 400_000
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2.0)


def sigma_hat(g, pairs):
    return sum(w * np.exp(2j * np.pi * g * l) for l, w in pairs)


# -- models and synthesis ---------------------------------------------------

def test_simulate_matches_direct_synthesis():
    lam = [0.123, 0.456, 0.789]
    spec = AtomicCircleMeasure.from_pairs([(l, 0.5) for l in lam])
    for cls in (G.GaussianModel, G.RandomPhaseModel):
        model = cls(spectrum=spec, T_len=200, seed=9)
        xi = model.unit_amplitudes(3)
        ns = np.arange(200)
        direct = sum(
            math.sqrt(0.5) * xi[j] * np.exp(2j * np.pi * ns * lam[j]) for j in range(3)
        )
        assert np.max(np.abs(G.simulate(model) - direct)) < 1e-9


def test_simulate_deterministic_in_seed():
    m = G.GaussianModel(spectrum=SPEC8, T_len=5_000, seed=21)
    assert np.array_equal(G.simulate(m), G.simulate(m))
    other = G.GaussianModel(spectrum=SPEC8, T_len=5_000, seed=22)
    assert not np.allclose(G.simulate(m), G.simulate(other))


def test_single_atom_modulus_constant():
    spec = AtomicCircleMeasure.from_pairs([(0.3, 1.0)])
    xr = G.simulate(G.RandomPhaseModel(spectrum=spec, T_len=3_000, seed=1))
    assert np.max(np.abs(np.abs(xr) - 1.0)) < 1e-12
    xg = G.simulate(G.GaussianModel(spectrum=spec, T_len=3_000, seed=1))
    assert np.ptp(np.abs(xg)) < 1e-12


def test_mean_tends_to_zero():
    for cls in (G.GaussianModel, G.RandomPhaseModel):
        x = G.simulate(cls(spectrum=SPEC8, T_len=100_000, seed=3))
        assert abs(np.mean(x)) <= 3.0 / math.sqrt(100_000)


def test_gaussian_variance_matches_total_mass_many_atoms():
    # atom-average scatter needs many atoms before 5/sqrt(T) is realistic
    lam = np.sort(np.random.default_rng(3).random(2000))
    spec = AtomicCircleMeasure.from_pairs([(float(l), 1.0 / 2000) for l in lam])
    x = G.simulate(G.GaussianModel(spectrum=spec, T_len=10_000, seed=2))
    assert abs(np.mean(np.abs(x) ** 2) - 1.0) <= 5.0 / math.sqrt(10_000)


def test_model_guards():
    with pytest.raises(OutOfRange):
        G.GaussianModel(spectrum=SPEC8, T_len=10 ** 7 + 1, seed=0)
    with pytest.raises(OutOfRange):
        G.GaussianModel(spectrum=SPEC8, T_len=0, seed=0)
    signed = AtomicCircleMeasure.from_pairs([(0.1, 1.0), (0.2, -0.5)])
    with pytest.raises(OutOfRange):
        G.GaussianModel(spectrum=signed, T_len=100, seed=0)
    cplx = AtomicCircleMeasure.from_pairs([(0.1, 1.0 + 0.5j)])
    with pytest.raises(OutOfRange):
        G.RandomPhaseModel(spectrum=cplx, T_len=100, seed=0)
    big = AtomicCircleMeasure.from_pairs(
        [(i / 20001.0, 1.0) for i in range(1, 10_002)]
    )
    with pytest.raises(OutOfRange):
        G.GaussianModel(spectrum=big, T_len=100, seed=0)


# -- spectral estimation ----------------------------------------------------

def test_spectral_single_atom_exact_for_random_phase():
    spec = AtomicCircleMeasure.from_pairs([(0.3, 1.0)])
    x = G.simulate(G.RandomPhaseModel(spectrum=spec, T_len=100_000, seed=5))
    pts = G.estimate_spectral(x, 2)
    assert abs(pts[0].value - 1.0) < 1e-10
    assert abs(pts[1].value - np.exp(2j * np.pi * 0.3)) < 3.0 / math.sqrt(100_000)


def test_spectral_two_close_atoms():
    pairs = [(0.3, 0.5), (0.31, 0.5)]
    spec = AtomicCircleMeasure.from_pairs(pairs)
    x = G.simulate(G.RandomPhaseModel(spectrum=spec, T_len=200_000, seed=8))
    for p in G.estimate_spectral(x, 50):
        assert abs(p.value - sigma_hat(p.g, pairs)) <= 4.0 * p.std_err


def test_spectral_recovery_gaussian_8_atoms(xg_200k):
    pairs = [(l, 1.0 / 8) for l in LAM8]
    for p in G.estimate_spectral(xg_200k, 50):
        assert abs(p.value - sigma_hat(p.g, pairs)) <= 4.0 * p.std_err


def test_spectral_recovery_random_phase_8_atoms(xr_200k):
    pairs = [(l, 1.0 / 8) for l in LAM8]
    for p in G.estimate_spectral(xr_200k, 50):
        assert abs(p.value - sigma_hat(p.g, pairs)) <= 4.0 * p.std_err


def test_spectral_deterministic_and_guarded(xr_200k):
    a = G.estimate_spectral(xr_200k[:10_000], 5)
    b = G.estimate_spectral(xr_200k[:10_000], 5)
    assert all(p.value == q.value and p.std_err == q.std_err for p, q in zip(a, b))
    with pytest.raises(OutOfRange):
        G.estimate_spectral(xr_200k[:100], 11)


# -- threshold family and increments ----------------------------------------

def test_process_full_threshold_reproduces_simulate():
    for cls in (G.GaussianModel, G.RandomPhaseModel):
        model = cls(spectrum=SPEC8, T_len=10_000, seed=4)
        fam = G.spectral_process(model, [LAM8[3] + 1e-9, 1.0])
        assert np.allclose(fam.f_values[-1], G.simulate(model), atol=1e-9)
        assert fam.window_atom_counts == (4,)
        assert abs(fam.window_weights[0] - 0.5) < 1e-12
        recon = fam.f_values[0] + sum(fam.increments)
        assert np.allclose(recon, fam.f_values[-1], atol=1e-9)


NONRES = np.sort(np.random.default_rng(42).random(6))
SPEC_NONRES = AtomicCircleMeasure.from_pairs([(float(l), 1.0 / 6) for l in NONRES])
TH_NONRES = [float(NONRES[2]) + 1e-9, float(NONRES[4]) + 1e-9, 1.0]


def test_increments_uncorrelated_and_not_flagged_dependent():
    # disjoint windows draw disjoint amplitudes in both model classes
    for cls in (G.GaussianModel, G.RandomPhaseModel):
        fam = G.spectral_process(cls(spectrum=SPEC_NONRES, T_len=100_000, seed=5), TH_NONRES)
        rep = G.increment_dependence_test(fam, 0, 1, seed=3)
        assert rep.orthogonality_z <= 4.0
        assert not rep.dependent
        assert rep.null_q99 >= 0.0


def test_flatness_pins_random_phase_at_ceiling():
    # equal-weight 2-atom window: var/mean^2 of |inc|^2 is exactly 1/2 for
    # unit moduli, Gaussian draws scatter it below
    fam_r = G.spectral_process(
        G.RandomPhaseModel(spectrum=SPEC_NONRES, T_len=100_000, seed=5), TH_NONRES
    )
    rep_r = G.increment_dependence_test(fam_r, 0, 1, seed=3)
    assert abs(rep_r.flatness[0] - 0.5) < 1e-3
    fam_g = G.spectral_process(
        G.GaussianModel(spectrum=SPEC_NONRES, T_len=100_000, seed=5), TH_NONRES
    )
    rep_g = G.increment_dependence_test(fam_g, 0, 1, seed=3)
    assert rep_g.flatness[0] < 0.47


def test_process_guards():
    model = G.GaussianModel(spectrum=SPEC8, T_len=1_000, seed=0)
    with pytest.raises(OutOfRange):
        G.spectral_process(model, [])
    with pytest.raises(OutOfRange):
        G.spectral_process(model, [0.5, 0.5])
    with pytest.raises(OutOfRange):
        G.spectral_process(model, [0.2, 1.5])
    fam = G.spectral_process(model, [0.5, 1.0])
    with pytest.raises(OutOfRange):
        G.increment_dependence_test(fam, 0, 0)


# -- moment report ----------------------------------------------------------

def test_norm4_iid_complex_gaussian(z_iid):
    rep = G.moment_report(z_iid, 16)
    assert abs(rep.lp_norms[rep.p_grid.index(4)] - 2.0 ** 0.25) <= 0.01


def test_norm_ladder_tracks_factorials(z_iid):
    rep = G.moment_report(z_iid, 8)
    for p, norm, se in zip(rep.p_grid, rep.lp_norms, rep.lp_std_errs):
        exact = math.factorial(p // 2) ** (1.0 / p)
        assert abs(norm - exact) <= 4.0 * se + 1e-3


def test_growth_fit_near_half(z_iid):
    rep = G.moment_report(z_iid, 16)
    assert 0.42 <= rep.growth_fit <= 0.58


def test_logconvexity_and_monotonicity_clean(z_iid):
    rep = G.moment_report(z_iid, 16)
    assert rep.logconvex_violations == 0
    assert rep.monotone_violations == 0


def test_carleman_partial_is_cumsum_of_reciprocals(z_iid):
    rep = G.moment_report(z_iid[:50_000], 10)
    oracle = np.cumsum([1.0 / n for n in rep.lp_norms])
    assert np.allclose(rep.carleman_partial, oracle, atol=1e-12)


def test_random_phase_single_atom_flat_norms():
    spec = AtomicCircleMeasure.from_pairs([(0.3, 1.0)])
    x = G.simulate(G.RandomPhaseModel(spectrum=spec, T_len=50_000, seed=6))
    rep = G.moment_report(x, 12)
    assert all(abs(n - 1.0) < 1e-9 for n in rep.lp_norms)
    assert abs(rep.growth_fit) < 1e-6
    assert rep.logconvex_violations == 0
    # every reciprocal norm is 1: partial sums count the grid
    assert abs(rep.carleman_partial[-1] - len(rep.p_grid)) < 1e-6


def test_moment_guards_and_stability_warning(z_iid):
    with pytest.raises(OutOfRange):
        G.moment_report(z_iid, 7)
    with pytest.raises(OutOfRange):
        G.moment_report(z_iid, 34)
    with pytest.raises(OutOfRange):
        G.moment_report(z_iid, 0)
    with pytest.warns(UserWarning):
        G.moment_report(z_iid[:100], 16)


# -- quasi-analyticity diagnostic -------------------------------------------

def test_quasianalytic_constant_sequence():
    rep = G.quasianalytic_check([1.0] * 100)
    assert rep.partial_sums[-1] == pytest.approx(100.0)
    assert rep.divergent
    assert rep.tail_slope == pytest.approx(0.0, abs=1e-12)


def test_quasianalytic_factorial_squared_converges():
    Ms = [math.factorial(k) ** 2 for k in range(1, 101)]
    rep = G.quasianalytic_check(Ms)
    # independent oracle through lgamma, never touching big-int powers
    oracle = np.cumsum(
        [math.exp(-2.0 * math.lgamma(k + 1) / k) for k in range(1, 101)]
    )
    assert np.allclose(rep.partial_sums, oracle, atol=1e-9)
    assert not rep.divergent
    assert rep.tail_slope < -1.5
    # terms ~ (e/k)^2: the tail of the sum is already flat
    assert rep.partial_sums[-1] - rep.partial_sums[49] < 0.1


def test_quasianalytic_gaussian_norms_diverge():
    # M_k = ||Z||_{2k}^k = sqrt(k!): terms ~ sqrt(e/k), slope -1/2
    Ms = [math.factorial(k) ** 0.5 for k in range(1, 41)]
    rep = G.quasianalytic_check(Ms)
    assert rep.divergent
    assert -1.0 < rep.tail_slope < -0.3


def test_quasianalytic_guards():
    with pytest.raises(OutOfRange):
        G.quasianalytic_check([])
    with pytest.raises(OutOfRange):
        G.quasianalytic_check([1.0] * 1001)
    with pytest.raises(OutOfRange):
        G.quasianalytic_check([1.0, -1.0])


# -- Gaussianity z-scores ---------------------------------------------------

def test_gaussian_model_consistent(xg_200k):
    rep = G.gaussianity_test(xg_200k, 3, freqs=LAM8)
    assert rep.gaussian_consistent
    assert all(abs(z) <= 3.0 for z in rep.z_scores)
    assert rep.z_scores[0] == pytest.approx(0.0, abs=1e-9)  # k=1 is an identity


def test_random_phase_fails_at_k2(xr_200k):
    rep = G.gaussianity_test(xr_200k, 3, freqs=LAM8)
    assert not rep.gaussian_consistent
    assert abs(rep.z_scores[1]) >= 5.0
    assert rep.z_scores[1] < 0  # empirical |X|^4 sits below the Gaussian ladder
    # flat atom powers collapse the realization term to leakage level
    assert rep.se_realization[1] <= 1e-4


def test_random_phase_single_atom_large_negative_z():
    spec = AtomicCircleMeasure.from_pairs([(0.7, 1.0)])
    x = G.simulate(G.RandomPhaseModel(spectrum=spec, T_len=20_000, seed=2))
    rep = G.gaussianity_test(x, 2, freqs=[0.7])
    assert rep.z_scores[1] <= -5.0


def test_atom_power_detection_matches_given_frequencies():
    lam = [0.123, 0.456, 0.789]
    spec = AtomicCircleMeasure.from_pairs([(l, 1.0 / 3) for l in lam])
    x = G.simulate(G.GaussianModel(spectrum=spec, T_len=50_000, seed=4))
    given = G.gaussianity_test(x, 3, freqs=lam)
    auto = G.gaussianity_test(x, 3)
    assert len(auto.atom_powers) == 3
    assert np.allclose(sorted(auto.atom_powers), sorted(given.atom_powers), atol=1e-3)
    assert max(abs(a - b) for a, b in zip(auto.z_scores, given.z_scores)) < 0.2


def test_conjugation_invariance():
    lam = [0.123, 0.456, 0.789]
    spec = AtomicCircleMeasure.from_pairs([(l, 1.0 / 3) for l in lam])
    x = G.simulate(G.GaussianModel(spectrum=spec, T_len=50_000, seed=4))
    a = G.gaussianity_test(x, 3)
    b = G.gaussianity_test(np.conj(x), 3)
    assert max(abs(p - q) for p, q in zip(a.z_scores, b.z_scores)) < 1e-9
    assert a.gaussian_consistent == b.gaussian_consistent


def test_gaussianity_guards(xg_200k):
    with pytest.raises(OutOfRange):
        G.gaussianity_test(xg_200k[:1000], 0)
    with pytest.raises(OutOfRange):
        G.gaussianity_test(xg_200k[:1000], 7)


def test_reports_serialize():
    spec = AtomicCircleMeasure.from_pairs([(0.3, 1.0)])
    x = G.simulate(G.RandomPhaseModel(spectrum=spec, T_len=5_000, seed=1))
    d = G.gaussianity_test(x, 2, freqs=[0.3]).to_json_dict()
    assert d["k_values"] == [1, 2] and isinstance(d["gaussian_consistent"], bool)
    d = G.moment_report(x, 6).to_json_dict()
    assert d["p_grid"] == [2, 4, 6]
    d = G.quasianalytic_check([1.0, 2.0]).to_json_dict()
    assert "tail_slope" in d and "divergent" in d
    pts = G.estimate_spectral(x, 1)
    assert {"g", "re", "im", "std_err"} == set(pts[0].to_json_dict())
