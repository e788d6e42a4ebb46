"""Riesz-product measures: closed form vs FFT oracle, decay profiles."""

from __future__ import annotations

import numpy as np
import pytest

from helson_lab.errors import NotDissociate, OutOfRange
from helson_lab.riesz import (
    RieszProductSpec,
    convolution_power_profile,
    dense_coefficient_oracle,
    full_support,
    riesz_fourier,
    rigidity_search,
)


def _random_dissociate_spec(rng: np.random.Generator, N: int, alpha: float) -> RieszProductSpec:
    # doubling growth with random factors; sum stays below 8000 for N <= 12
    freqs = []
    total = 0
    n = int(rng.integers(1, 4))
    for _ in range(N):
        freqs.append(n)
        total += n
        n = 2 * total + int(rng.integers(1, max(2, total // 3)))
    while sum(freqs) > 8000:
        freqs.pop()
    return RieszProductSpec(alpha, tuple(freqs))


# ---------------------------------------------------------------------------
# construction / dissociateness
# ---------------------------------------------------------------------------

def test_not_dissociate_rejected():
    with pytest.raises(NotDissociate):
        RieszProductSpec(0.5, (1, 2, 3))  # 1 + 2 - 3 = 0
    with pytest.raises(NotDissociate):
        RieszProductSpec(0.5, (2, 3, 5))  # 2 + 3 - 5 = 0
    with pytest.raises(NotDissociate):
        RieszProductSpec(0.5, (3, 5, 8))


def test_dissociate_accepted():
    RieszProductSpec(1.0, tuple(3 ** j for j in range(1, 9)))
    RieszProductSpec(0.5, (5, 8, 12))  # dissociate despite 12 - 8 < 5


def test_doubling_criterion_large_n():
    freqs = []
    total = 0
    n = 1
    for _ in range(24):
        freqs.append(n)
        total += n
        n = 2 * total + 1
    RieszProductSpec(0.3, tuple(freqs))  # accepted via doubling
    bad = list(freqs)
    bad[-1] = bad[-2] + 1  # still increasing, violates doubling
    with pytest.raises(NotDissociate):
        RieszProductSpec(0.3, tuple(bad))


def test_alpha_domain():
    with pytest.raises(OutOfRange):
        RieszProductSpec(1.5, (3, 9))
    with pytest.raises(OutOfRange):
        RieszProductSpec(0.0, (3, 9))


# ---------------------------------------------------------------------------
# closed-form coefficients
# ---------------------------------------------------------------------------

def test_fourier_examples():
    assert riesz_fourier(RieszProductSpec(0.5, (1,)), 1) == pytest.approx(0.25)
    spec = RieszProductSpec(0.5, (3, 9))
    assert riesz_fourier(spec, 12) == pytest.approx(0.0625)
    assert riesz_fourier(spec, 6) == pytest.approx(0.0625)  # 9 - 3
    assert riesz_fourier(spec, 5) == 0.0
    assert riesz_fourier(spec, 0) == 1.0
    assert riesz_fourier(spec, -12) == pytest.approx(0.0625)


def test_fourier_matches_oracle_examples():
    spec = RieszProductSpec(0.5, (3, 9))
    dense = dense_coefficient_oracle(spec, 1 << 14)
    assert abs(dense[12] - 0.0625) < 1e-10
    assert abs(dense[5]) < 1e-10


@pytest.mark.parametrize("seed", range(3))
def test_fourier_matches_oracle_random(seed):
    rng = np.random.default_rng(300 + seed)
    spec = _random_dissociate_spec(rng, 10, float(rng.uniform(0.2, 1.0)))
    grid = 1 << 14
    dense = dense_coefficient_oracle(spec, grid)
    expected = np.zeros(grid, dtype=complex)
    ms, coeffs = full_support(spec)
    for m, c in zip(ms, coeffs):
        expected[int(m) % grid] += c
    assert np.max(np.abs(dense - expected)) <= 1e-10


def test_density_positive_and_mass_one():
    spec = RieszProductSpec(1.0, (3, 9, 27))
    d = spec.density_on_grid(4 * 27 * 4)
    assert np.min(d) >= -1e-9
    assert np.mean(d) == pytest.approx(1.0, abs=1e-12)
    assert riesz_fourier(spec, 0) == 1.0


def test_parseval_cross_check():
    rng = np.random.default_rng(77)
    spec = _random_dissociate_spec(rng, 9, 0.8)
    ms, coeffs = full_support(spec)
    lhs = float(np.sum(coeffs ** 2))
    # closed form: prod (1 + alpha^2 / 2)
    assert lhs == pytest.approx((1 + spec.alpha ** 2 / 2) ** len(spec.freqs), rel=1e-12)
    grid = 4 * (sum(spec.freqs) + 1)
    d = spec.density_on_grid(grid)
    rhs = float(np.mean(d * d))
    assert lhs == pytest.approx(rhs, abs=1e-8)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def test_profile_examples():
    spec = RieszProductSpec(0.5, tuple(3 ** j for j in range(1, 9)))
    assert convolution_power_profile(spec, 1, 10 ** 4) == (0.25, 3)
    val, arg = convolution_power_profile(spec, 3, 10 ** 4)
    assert val == pytest.approx(0.015625)
    assert arg == 3
    spec_full = RieszProductSpec(1.0, (7, 15, 31))
    assert convolution_power_profile(spec_full, 1, 100)[0] == pytest.approx(0.5)


def test_profile_power_is_bit_exact():
    spec = RieszProductSpec(0.7, (4, 9, 19))
    v1, m1 = convolution_power_profile(spec, 1, 1000)
    v5, m5 = convolution_power_profile(spec, 5, 1000)
    assert v5 == v1 ** 5  # same float powered
    assert m5 == m1


def test_profile_tie_break_smallest_m():
    spec = RieszProductSpec(0.5, (5, 8, 12))
    # level-1 points 5, 8, 12 all in range; smallest wins
    assert convolution_power_profile(spec, 1, 100)[1] == 5
    # range below n_1 still catches the level-2 points 8 - 5 = 3 and 12 - 8 = 4
    val, arg = convolution_power_profile(spec, 1, 4)
    assert arg == 3
    assert val == pytest.approx(0.0625)


def test_rigidity_examples():
    spec = RieszProductSpec(0.5, (3, 9))
    assert rigidity_search(spec, 100) == (3, 0.25)
    assert rigidity_search(RieszProductSpec(1.0, (2,)), 10) == (2, 0.5)
    empty = RieszProductSpec(0.4, ())
    assert rigidity_search(empty, 50)[1] == 0.0


def test_rigidity_bounded_by_half_alpha():
    spec = RieszProductSpec(0.9, (4, 9, 19, 40))
    g, val = rigidity_search(spec, 10 ** 5)
    assert val <= 0.9 / 2 + 1e-15
    assert g == 4
