"""Riesz-product measures over dissociate integer frequencies.

The measure with density prod_j (1 + alpha cos 2 pi n_j t) has Fourier
coefficients in closed form when the n_j are dissociate (every integer has
at most one representation sum eps_j n_j with eps_j in {-1,0,1}): the
coefficient at a representable m is (alpha/2)^(number of nonzero eps),
1 at m = 0, and 0 off the representable set.

Dissociateness is certified exhaustively for N <= 20 by meet-in-the-middle
over the difference coefficients {-2..2}: the 3^N signed sums are pairwise
distinct iff each half's difference set hits 0 only trivially and the two
difference sets meet only at 0.  For N > 20 the doubling criterion
n_{j+1} > 2 sum_{i<=j} n_i is required instead.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from .errors import BudgetExceeded, NotDissociate, OutOfRange

_LEVEL_WORK_CAP = 5_000_000  # states per support-level scan


def _signed_sums(freqs: Tuple[int, ...], coeff_range: np.ndarray) -> np.ndarray:
    """All sums sum_j c_j n_j with c_j ranging over coeff_range."""
    sums = np.zeros(1, dtype=np.int64)
    for n in freqs:
        sums = (sums[:, None] + np.int64(n) * coeff_range[None, :]).ravel()
    return sums


def _doubling_ok(freqs: Tuple[int, ...]) -> bool:
    total = 0
    for n in freqs:
        if n <= 2 * total:
            return False
        total += n
    return True


def _certify_dissociate(freqs: Tuple[int, ...]) -> None:
    N = len(freqs)
    if N == 0:
        return
    if N > 20:
        if not _doubling_ok(freqs):
            raise NotDissociate(
                f"{N} frequencies exceed the exhaustive budget and fail the doubling criterion"
            )
        return
    diff_range = np.arange(-2, 3, dtype=np.int64)
    half = N // 2
    left, right = freqs[:half], freqs[half:]
    d_left = _signed_sums(left, diff_range)
    d_right = _signed_sums(right, diff_range)
    if np.count_nonzero(d_left == 0) != 1 or np.count_nonzero(d_right == 0) != 1:
        raise NotDissociate(f"signed sums of {freqs} collide within a half")
    common = np.intersect1d(d_left, d_right)
    if common.size != 1 or common[0] != 0:
        raise NotDissociate(f"signed sums of {freqs} collide across halves")


@dataclass(frozen=True)
class RieszProductSpec:
    """Coupling alpha in (0,1] and strictly increasing dissociate frequencies."""

    alpha: float
    freqs: Tuple[int, ...]

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise OutOfRange(f"alpha must lie in (0, 1], got {self.alpha}")
        freqs = tuple(int(n) for n in self.freqs)
        prev = 0
        for n in freqs:
            if n <= prev:
                raise OutOfRange("frequencies must be strictly increasing positive integers")
            prev = n
        object.__setattr__(self, "freqs", freqs)
        _certify_dissociate(freqs)

    def density_on_grid(self, grid: int) -> np.ndarray:
        """prod_j (1 + alpha cos 2 pi n_j t) on t = k/grid."""
        t = np.arange(grid) / grid
        d = np.ones(grid)
        for n in self.freqs:
            d *= 1.0 + self.alpha * np.cos(2.0 * np.pi * n * t)
        return d


@lru_cache(maxsize=16)
def _mitm_tables(freqs: Tuple[int, ...]):
    """Sorted half-sum tables: (sums_left, nnz_left, sums_right, nnz_right)."""
    N = len(freqs)
    half = N // 2
    out = []
    for part in (freqs[:half], freqs[half:]):
        sums = np.zeros(1, dtype=np.int64)
        nnz = np.zeros(1, dtype=np.int8)
        for n in part:
            sums = np.concatenate([sums, sums + n, sums - n])
            nnz = np.concatenate([nnz, nnz + 1, nnz + 1])
        order = np.argsort(sums, kind="stable")
        out.append((sums[order], nnz[order]))
    return out[0], out[1]


def riesz_fourier(spec: RieszProductSpec, m: int) -> float:
    """Closed-form coefficient: (alpha/2)^nnz on the representable set, else 0."""
    if len(spec.freqs) > 30:
        raise OutOfRange("meet-in-the-middle lookup supports N <= 30")
    if m == 0:
        return 1.0
    (sl, nl), (sr, nr) = _mitm_tables(spec.freqs)
    # scan left sums, binary-search the complement on the right
    target = np.int64(m) - sl
    pos = np.searchsorted(sr, target)
    ok = pos < sr.size
    hits = np.flatnonzero(ok & (sr[np.minimum(pos, sr.size - 1)] == target))
    if hits.size == 0:
        return 0.0
    i = int(hits[0])  # unique by dissociateness
    nnz = int(nl[i]) + int(nr[pos[i]])
    return (spec.alpha / 2.0) ** nnz


def _support_in_range(spec: RieszProductSpec, m_range: int, positive_only: bool) -> Optional[Tuple[int, int]]:
    """Smallest-level support point with 0 < |m| <= m_range.

    Scans levels L = 1, 2, ... (number of nonzero signs); the first level
    with a point in range carries the maximal coefficient (alpha/2)^L.
    Returns (level, m) with the smallest |m| (positive preferred) or None.
    """
    freqs = spec.freqs
    N = len(freqs)
    work = 0
    for L in range(1, N + 1):
        best: Optional[int] = None
        for combo in itertools.combinations(range(N), L):
            work += 1 << L
            if work > _LEVEL_WORK_CAP:
                raise BudgetExceeded("support-level scan exceeded its work cap")
            vals = np.array([freqs[i] for i in combo], dtype=np.int64)
            for signs in itertools.product((-1, 1), repeat=L):
                m = int(np.dot(signs, vals))
                if positive_only and m <= 0:
                    continue
                if m == 0 or abs(m) > m_range:
                    continue
                if best is None or (abs(m), m < 0) < (abs(best), best < 0):
                    best = m
        if best is not None:
            return L, best
    return None


def convolution_power_profile(spec: RieszProductSpec, k: int, m_range: int) -> Tuple[float, int]:
    """Max over 0 < |m| <= m_range of |sigma_hat(m)|^k and its location.

    Coefficients of the k-fold convolution are sigma_hat(m)^k, so the max
    sits at the smallest-level representable point; ties break to the
    smallest |m|.
    """
    if k < 1:
        raise OutOfRange(f"k must be >= 1, got {k}")
    if m_range > 10 ** 7:
        raise OutOfRange(f"m_range must be <= 1e7, got {m_range}")
    found = _support_in_range(spec, m_range, positive_only=False)
    if found is None:
        return 0.0, 0
    level, m = found
    base = (spec.alpha / 2.0) ** level
    return base ** k, m


def rigidity_search(spec: RieszProductSpec, g_range: int) -> Tuple[int, float]:
    """Maximize |sigma_hat(g)| / sigma_hat(0) over 0 < g <= g_range.

    Finite truncations cap the ratio at alpha/2 (attained at g = n_j), so
    the diagnostic shows how truncation destroys rigidity: the returned
    value never approaches 1.
    """
    if g_range > 10 ** 7:
        raise OutOfRange(f"g_range must be <= 1e7, got {g_range}")
    found = _support_in_range(spec, g_range, positive_only=True)
    if found is None:
        return 1, 0.0
    level, m = found
    return m, (spec.alpha / 2.0) ** level


def full_support(spec: RieszProductSpec) -> Tuple[np.ndarray, np.ndarray]:
    """All representable points and their coefficients, for N <= 12.

    Returns (m sorted ascending, coefficient values), 3^N entries.
    """
    N = len(spec.freqs)
    if N > 12:
        raise OutOfRange("full support enumeration supports N <= 12")
    (sl, nl), (sr, nr) = _mitm_tables(spec.freqs)
    m = (sl[:, None] + sr[None, :]).ravel()
    nnz = (nl[:, None].astype(np.int64) + nr[None, :].astype(np.int64)).ravel()
    order = np.argsort(m, kind="stable")
    return m[order], (spec.alpha / 2.0) ** nnz[order]


def dense_coefficient_oracle(spec: RieszProductSpec, grid: int) -> np.ndarray:
    """Independent route: FFT of the pointwise density on a grid.

    Valid (alias-free) for |m| < grid - sum(freqs); entry at index m % grid.
    """
    d = spec.density_on_grid(grid)
    return np.fft.fft(d) / grid
