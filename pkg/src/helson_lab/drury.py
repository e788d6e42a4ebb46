"""Finite Riesz products on T^n x T and the mixed coefficient maps built
from them.

expand_Q(n, s) expands prod_{j<=n} (1 + s (z_j z + conj(z_j z))) exactly:
every term picks, per factor, one of 1, s z_j z, s conj(z_j) conj(z), so
the support is indexed by sign patterns in {-1,0,1}^n and the coefficient
is s^(number of nonzero signs).  extract_P keeps the part with z-exponent
-1 (the coefficient map of conj(z)); with the e^{+2 pi i m t} orientation
used here, its "basis" support lands on the points -e_j, with value s, and
every other coefficient is an odd power s^{2a+1} at points 1_A - 1_B with
|B| = |A| + 1.

Mixing over a signed measure in s then yields a coefficient map psi that
is 1 on the basis points and at most eps elsewhere, with A-norm at most the
total variation of the mixing measure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np

from .errors import MomentCheckFailed, OutOfRange
from .mela import SignedGridMeasure
from .torus import LatticePoint, SparseTrigPoly

_BASIS_TOL = 1e-8  # LP-grade tolerance on the basis normalization


def _check_params(n: int, s: float) -> None:
    if n < 1 or n > 14:
        raise OutOfRange(f"n must be in 1..14, got {n}")
    if not (0.0 < s <= 0.5):
        raise OutOfRange(f"s must lie in (0, 1/2], got {s}")


def expand_Q(n: int, s: float) -> SparseTrigPoly:
    """Exact sparse expansion of Q_s on T^(n+1); 3^n terms."""
    _check_params(n, s)
    coeffs: Dict[LatticePoint, complex] = {}
    for signs in itertools.product((-1, 0, 1), repeat=n):
        nnz = sum(1 for e in signs if e != 0)
        key = signs + (sum(signs),)
        coeffs[key] = s ** nnz
    return SparseTrigPoly(n + 1, coeffs)


def _support_strata(n: int) -> Iterator[Tuple[int, LatticePoint]]:
    """Yield (|A|, 1_A - 1_B) over disjoint A, B subset {1..n}, |B| = |A| + 1."""
    for a in range(0, (n - 1) // 2 + 1):
        for A in itertools.combinations(range(n), a):
            rest = [j for j in range(n) if j not in A]
            for B in itertools.combinations(rest, a + 1):
                m = [0] * n
                for j in A:
                    m[j] = 1
                for j in B:
                    m[j] = -1
                yield a, tuple(m)


def extract_P(n: int, s: float) -> SparseTrigPoly:
    """The z-bar part of Q_s: coefficient s^{2|A|+1} at each 1_A - 1_B.

    Enumerated directly over the (A, B) strata, so no 3^n expansion is
    materialized.  Powers are computed as s ** (2a+1), bit-identical to the
    expansion route.
    """
    _check_params(n, s)
    coeffs: Dict[LatticePoint, complex] = {}
    for a, m in _support_strata(n):
        coeffs[m] = s ** (2 * a + 1)
    return SparseTrigPoly(n, coeffs)


def support_count(n: int) -> int:
    """Number of support points of extract_P: sum_a C(n,a) C(n-a, a+1)."""
    if n < 1 or n > 30:
        raise OutOfRange(f"n must be in 1..30, got {n}")
    return sum(
        math.comb(n, a) * math.comb(n - a, a + 1) for a in range(0, (n - 1) // 2 + 1)
    )


@dataclass(frozen=True)
class DruryFunction:
    """Coefficient map on Z^n equal to 1 on the basis-image points {-e_j}
    and of modulus <= epsilon on the rest of its support."""

    dim: int
    psi: SparseTrigPoly
    a_norm_bound: float
    epsilon: float

    def __post_init__(self):
        n = self.dim
        for j in range(n):
            e = tuple(-1 if i == j else 0 for i in range(n))
            val = self.psi.coeffs.get(e, 0j)
            if abs(val - 1.0) > _BASIS_TOL:
                raise OutOfRange(f"basis value at {e} is {val}, not 1 within 1e-8")
        off = self.max_off_basis()
        if off > self.epsilon + _BASIS_TOL:
            raise OutOfRange(f"off-basis coefficient {off} exceeds epsilon {self.epsilon}")

    def basis_points(self) -> List[LatticePoint]:
        n = self.dim
        return [tuple(-1 if i == j else 0 for i in range(n)) for j in range(n)]

    def max_off_basis(self) -> float:
        basis = set(self.basis_points())
        off = [abs(c) for m, c in self.psi.coeffs.items() if m not in basis]
        return max(off) if off else 0.0

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "epsilon": self.epsilon,
            "a_norm_bound": self.a_norm_bound,
            "psi": self.psi.to_json_dict(),
        }


def _moments_for_dim(sigma: SignedGridMeasure, n: int) -> List[float]:
    """Odd moments integral s^{2a+1} d(sigma) for a = 0 .. floor((n-1)/2)."""
    return [sigma.moment(2 * a + 1) for a in range(0, (n - 1) // 2 + 1)]


def mix_drury(n: int, sigma: SignedGridMeasure, epsilon: float) -> DruryFunction:
    """Mix extract_P over sigma without expanding any P_s.

    psi(1_A - 1_B) = integral s^{2|A|+1} d(sigma), so only one moment per
    stratum is needed; cost is (support size) x (atom count).  The moments
    that actually occur in dimension n are validated first: the first
    moment must be 1 within 1e-8 and each higher odd moment present must
    have modulus <= epsilon.
    """
    if not (0.0 < epsilon):
        raise OutOfRange(f"epsilon must be positive, got {epsilon}")
    moments = _moments_for_dim(sigma, n)
    if abs(moments[0] - 1.0) > _BASIS_TOL:
        raise MomentCheckFailed(
            f"first moment {moments[0]} is not 1 within 1e-8"
        )
    for a, value in enumerate(moments[1:], start=1):
        if abs(value) > epsilon + _BASIS_TOL:
            raise MomentCheckFailed(
                f"odd moment of order {2 * a + 1} has modulus {abs(value)} > epsilon {epsilon}"
            )
    coeffs: Dict[LatticePoint, complex] = {}
    for a, m in _support_strata(n):
        coeffs[m] = moments[a]
    psi = SparseTrigPoly(n, coeffs)
    return DruryFunction(
        dim=n,
        psi=psi,
        a_norm_bound=sigma.total_variation,
        epsilon=float(epsilon),
    )
