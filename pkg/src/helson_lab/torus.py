"""Foundational types and primitives for trig polynomials and atomic measures.

A SparseTrigPoly is a finitely supported coefficient map on the integer
lattice Z^n, read as p(t) = sum_m c_m e^{2 pi i m.t} on the torus T^n.
An AtomicCircleMeasure is a finite list of weighted atoms on the circle,
with frequencies in [0,1) as fractions of a full turn.  The Fourier
orientation used everywhere is mu_hat(g) = sum_j w_j e^{+2 pi i g lambda_j}.

Frequencies coming from rational input stay exact (fractions.Fraction);
floats are quarantined: they can exhibit near-dependences but never certify
independence.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import BudgetExceeded, DimensionTooLarge, OutOfRange

LatticePoint = Tuple[int, ...]
Frequency = Union[Fraction, float]

COEFF_PRUNE_TOL = 1e-15  # stored-zero cutoff at construction
FLOAT_FREQ_TOL = 1e-12   # distinctness tolerance for float frequencies

# cap on scratch matrix entries for chunked evaluation
_EVAL_CHUNK_ENTRIES = 4_000_000


def freq_value(f: Frequency) -> float:
    """Float value of a frequency (Fraction or float)."""
    return float(f)


def parse_frequency(obj) -> Frequency:
    """Parse a JSON frequency: "p/q" string -> exact Fraction, number -> float."""
    if isinstance(obj, str):
        frac = Fraction(obj)
        return frac % 1
    return float(obj) % 1.0


def frequency_to_json(f: Frequency):
    if isinstance(f, Fraction):
        return f"{f.numerator}/{f.denominator}"
    return float(f)


# ---------------------------------------------------------------------------
# sparse trig polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SparseTrigPoly:
    """Finitely supported Fourier-coefficient map on Z^dim.

    Coefficients of modulus <= 1e-15 are dropped at construction; keys must
    all have length dim.
    """

    dim: int
    coeffs: Dict[LatticePoint, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise OutOfRange(f"dim must be >= 1, got {self.dim}")
        pruned: Dict[LatticePoint, complex] = {}
        for m, c in self.coeffs.items():
            key = tuple(int(x) for x in m)
            if len(key) != self.dim:
                raise OutOfRange(f"lattice point {key} has length {len(key)}, expected {self.dim}")
            c = complex(c)
            if abs(c) > COEFF_PRUNE_TOL:
                pruned[key] = c
        object.__setattr__(self, "coeffs", pruned)

    def terms(self) -> List[Tuple[LatticePoint, complex]]:
        """Coefficients in deterministic (lexicographic) order."""
        return sorted(self.coeffs.items(), key=lambda kv: kv[0])

    def max_abs_coord(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(abs(x) for x in m) for m in self.coeffs)

    def __add__(self, other: "SparseTrigPoly") -> "SparseTrigPoly":
        if other.dim != self.dim:
            raise OutOfRange("dimension mismatch in polynomial sum")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0j) + c
        return SparseTrigPoly(self.dim, out)

    def scale(self, a: complex) -> "SparseTrigPoly":
        return SparseTrigPoly(self.dim, {m: a * c for m, c in self.coeffs.items()})

    def __mul__(self, other: "SparseTrigPoly") -> "SparseTrigPoly":
        """Product of polynomials = convolution of coefficient maps."""
        if other.dim != self.dim:
            raise OutOfRange("dimension mismatch in polynomial product")
        out: Dict[LatticePoint, complex] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                key = tuple(a + b for a, b in zip(m1, m2))
                out[key] = out.get(key, 0j) + c1 * c2
        return SparseTrigPoly(self.dim, out)

    def conjugate(self) -> "SparseTrigPoly":
        """Coefficient map of the complex conjugate function."""
        return SparseTrigPoly(
            self.dim,
            {tuple(-x for x in m): c.conjugate() for m, c in self.coeffs.items()},
        )

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at points in [0,1)^dim; points shape (S, dim) -> (S,) complex."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.shape[1] != self.dim:
            raise OutOfRange("point dimension mismatch")
        if not self.coeffs:
            return np.zeros(points.shape[0], dtype=complex)
        items = self.terms()
        M = np.array([m for m, _ in items], dtype=float)      # (terms, dim)
        c = np.array([v for _, v in items], dtype=complex)    # (terms,)
        out = np.empty(points.shape[0], dtype=complex)
        chunk = max(1, _EVAL_CHUNK_ENTRIES // max(1, len(c)))
        for lo in range(0, points.shape[0], chunk):
            P = points[lo:lo + chunk]
            out[lo:lo + chunk] = np.exp(2j * np.pi * (P @ M.T)) @ c
        return out

    # JSON: {"dim": n, "terms": [{"m": [...], "re": x, "im": y}]}
    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [
                {"m": list(m), "re": c.real, "im": c.imag} for m, c in self.terms()
            ],
        }

    @staticmethod
    def from_json_dict(d: dict) -> "SparseTrigPoly":
        coeffs = {tuple(t["m"]): complex(t["re"], t["im"]) for t in d["terms"]}
        return SparseTrigPoly(int(d["dim"]), coeffs)


# ---------------------------------------------------------------------------
# atomic measures and frequency sets
# ---------------------------------------------------------------------------

def _check_distinct(freqs: Sequence[Frequency], what: str) -> None:
    # exact equality for rationals, 1e-12 circle distance for float pairs
    vals = [freq_value(f) for f in freqs]
    for i in range(len(freqs)):
        for j in range(i + 1, len(freqs)):
            fi, fj = freqs[i], freqs[j]
            if isinstance(fi, Fraction) and isinstance(fj, Fraction):
                if fi == fj:
                    raise OutOfRange(f"duplicate frequency {fi} in {what}")
            else:
                d = abs(vals[i] - vals[j])
                d = min(d, 1.0 - d)
                if d <= FLOAT_FREQ_TOL:
                    raise OutOfRange(f"frequencies {fi} and {fj} coincide in {what}")


@dataclass(frozen=True)
class AtomicCircleMeasure:
    """Finite atomic measure on the circle: list of (frequency, complex weight)."""

    atoms: Tuple[Tuple[Frequency, complex], ...]

    def __post_init__(self):
        norm = []
        for f, w in self.atoms:
            if isinstance(f, Fraction):
                norm.append((f % 1, complex(w)))
            else:
                norm.append((float(f) % 1.0, complex(w)))
        _check_distinct([f for f, _ in norm], "AtomicCircleMeasure")
        object.__setattr__(self, "atoms", tuple(norm))

    @staticmethod
    def from_pairs(pairs: Iterable[Tuple[Frequency, complex]]) -> "AtomicCircleMeasure":
        return AtomicCircleMeasure(tuple(pairs))

    def total_variation(self) -> float:
        return float(sum(abs(w) for _, w in self.atoms))

    def frequencies(self) -> np.ndarray:
        return np.array([freq_value(f) for f, _ in self.atoms], dtype=float)

    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=complex)

    def to_json_dict(self) -> dict:
        atoms = sorted(self.atoms, key=lambda fw: (freq_value(fw[0]), fw[1].real))
        return {
            "atoms": [
                {"freq": frequency_to_json(f), "re": w.real, "im": w.imag}
                for f, w in atoms
            ]
        }

    @staticmethod
    def from_json_dict(d: dict) -> "AtomicCircleMeasure":
        return AtomicCircleMeasure(
            tuple(
                (parse_frequency(a["freq"]), complex(a.get("re", 0.0), a.get("im", 0.0)))
                for a in d["atoms"]
            )
        )


@dataclass(frozen=True)
class FiniteFrequencySet:
    """Finite list of circle frequencies, exact rationals or floats, pairwise distinct."""

    freqs: Tuple[Frequency, ...]

    def __post_init__(self):
        norm: List[Frequency] = []
        for f in self.freqs:
            if isinstance(f, Fraction):
                norm.append(f % 1)
            elif isinstance(f, int):
                norm.append(Fraction(f) % 1)
            else:
                norm.append(float(f) % 1.0)
        _check_distinct(norm, "FiniteFrequencySet")
        object.__setattr__(self, "freqs", tuple(norm))

    def __len__(self) -> int:
        return len(self.freqs)

    def values(self) -> np.ndarray:
        return np.array([freq_value(f) for f in self.freqs], dtype=float)

    def all_rational(self) -> bool:
        return all(isinstance(f, Fraction) for f in self.freqs)

    def to_json_dict(self) -> dict:
        return {"freqs": [frequency_to_json(f) for f in self.freqs]}

    @staticmethod
    def from_json_dict(d: dict) -> "FiniteFrequencySet":
        return FiniteFrequencySet(tuple(parse_frequency(f) for f in d["freqs"]))


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def a_norm_lattice(p: SparseTrigPoly) -> float:
    """Sum of coefficient moduli (the A-norm of p read as a map on Z^n)."""
    return float(sum(abs(c) for c in p.coeffs.values()))


def l1_norm_torus(p: SparseTrigPoly, grid_per_dim: int) -> float:
    """Uniform-grid average of |p| over T^dim.

    Spectrally accurate for trig polynomials once the grid clears the
    support; requires grid_per_dim >= 4 * max|coordinate| and dim <= 4.
    """
    if p.dim > 4:
        raise DimensionTooLarge(f"l1_norm_torus supports dim <= 4, got {p.dim}")
    maxdeg = p.max_abs_coord()
    if grid_per_dim < max(4, 4 * maxdeg):
        raise OutOfRange(
            f"grid_per_dim {grid_per_dim} below anti-aliasing bound {max(4, 4 * maxdeg)}"
        )
    N = int(grid_per_dim)
    dense = np.zeros((N,) * p.dim, dtype=complex)
    for m, c in p.coeffs.items():
        idx = tuple(x % N for x in m)
        dense[idx] += c
    values = np.fft.ifftn(dense) * (N ** p.dim)
    return float(np.mean(np.abs(values)))


def l1_norm_monte_carlo(p: SparseTrigPoly, samples: int, seed: int) -> Tuple[float, float]:
    """Monte Carlo estimate of the L^1 norm with standard error.

    High-dimension fallback for l1_norm_torus; deterministic given seed.
    """
    if samples < 1000:
        raise OutOfRange(f"samples must be >= 1000, got {samples}")
    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = int(samples)
    # chunk draws so scratch matrices stay small for wide supports
    chunk_pts = max(1, _EVAL_CHUNK_ENTRIES // max(1, len(p.coeffs)))
    while remaining > 0:
        take = min(chunk_pts, remaining)
        pts = rng.random((take, p.dim))
        vals = np.abs(p.evaluate(pts))
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
        remaining -= take
    mean = total / samples
    var = max(0.0, total_sq / samples - mean * mean)
    return mean, math.sqrt(var / samples)


def fourier_coeff(mu: AtomicCircleMeasure, g: int) -> complex:
    """mu_hat(g) = sum_j w_j e^{2 pi i g lambda_j}."""
    lam = mu.frequencies()
    w = mu.weights()
    return complex(np.sum(w * np.exp(2j * np.pi * g * lam)))


def dense_fft_oracle(p: SparseTrigPoly, grid_per_dim: int) -> np.ndarray:
    """Independent coefficient recovery: evaluate p pointwise on a dense grid
    and apply the discrete Fourier transform.

    Returns the dense array indexed mod grid; entry at tuple(m % grid) should
    equal the stored coefficient at m within 1e-10.
    """
    if p.dim > 3:
        raise DimensionTooLarge(f"dense_fft_oracle supports dim <= 3, got {p.dim}")
    N = int(grid_per_dim)
    if N <= 2 * p.max_abs_coord():
        raise OutOfRange(f"grid {N} must exceed 2 * max|coordinate| = {2 * p.max_abs_coord()}")
    axes = [np.arange(N) / N for _ in range(p.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    values = p.evaluate(pts).reshape((N,) * p.dim)
    return np.fft.fftn(values) / (N ** p.dim)


def oracle_coefficient(dense: np.ndarray, m: LatticePoint) -> complex:
    """Look up the oracle output at lattice point m (indexed mod grid)."""
    N = dense.shape[0]
    return complex(dense[tuple(x % N for x in m)])


# ---------------------------------------------------------------------------
# independence of frequency sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndependenceVerdict:
    status: str  # "independent" | "dependent" | "inconclusive"
    witness: Optional[Tuple[int, ...]] = None

    @property
    def is_independent(self) -> bool:
        return self.status == "independent"


def _canonical_sign(vec: Tuple[int, ...]) -> Tuple[int, ...]:
    for x in vec:
        if x != 0:
            return vec if x > 0 else tuple(-v for v in vec)
    return vec


def independence_check(K: FiniteFrequencySet, coeff_bound: int) -> IndependenceVerdict:
    """Exhaustively test weak independence over |n_j| <= coeff_bound.

    For exact rationals the test is exact: whenever sum n_j lambda_j is an
    integer, every n_j lambda_j must be one.  Any float frequency degrades
    the verdict to inconclusive; a near-dependence hit (tolerance 1e-9) is
    reported as the witness.
    """
    k = len(K)
    if k == 0:
        return IndependenceVerdict("independent")
    if k > 12:
        raise OutOfRange(f"|K| must be <= 12, got {k}")
    if coeff_bound > 20:
        raise OutOfRange(f"coeff_bound must be <= 20, got {coeff_bound}")
    n_vectors = (2 * coeff_bound + 1) ** k
    if n_vectors > 10 ** 8:
        raise BudgetExceeded(f"{n_vectors} vectors exceed the 1e8 search budget")

    if K.all_rational():
        dens = [f.denominator for f in K.freqs]
        L = math.lcm(*dens)
        a = [f.numerator * (L // f.denominator) for f in K.freqs]
        witnesses: List[Tuple[int, ...]] = []
        # numpy path unless the integers could overflow int64
        if L * coeff_bound * k < 2 ** 62:
            a_arr = np.array(a, dtype=np.int64)
            base = 2 * coeff_bound + 1
            chunk = 1 << 16
            for lo in range(0, n_vectors, chunk):
                idx = np.arange(lo, min(lo + chunk, n_vectors), dtype=np.int64)
                digits = np.empty((len(idx), k), dtype=np.int64)
                rem = idx
                for j in range(k - 1, -1, -1):
                    digits[:, j] = rem % base
                    rem = rem // base
                vecs = digits - coeff_bound
                terms = vecs * a_arr  # n_j * a_j, integer
                total_ok = (terms.sum(axis=1) % L) == 0
                each_ok = np.all(terms % L == 0, axis=1)
                bad = total_ok & ~each_ok
                if np.any(bad):
                    for row in vecs[bad]:
                        witnesses.append(_canonical_sign(tuple(int(x) for x in row)))
        else:
            for vec in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=k):
                terms = [n * aj for n, aj in zip(vec, a)]
                if sum(terms) % L == 0 and any(t % L != 0 for t in terms):
                    witnesses.append(_canonical_sign(vec))
        if witnesses:
            best = min(set(witnesses), key=lambda v: (sum(abs(x) for x in v), tuple(-x for x in v)))
            return IndependenceVerdict("dependent", best)
        return IndependenceVerdict("independent")

    # float path: can never certify independence
    lam = K.values()
    base = 2 * coeff_bound + 1
    hit_witness: Optional[Tuple[int, ...]] = None
    chunk = 1 << 16
    for lo in range(0, n_vectors, chunk):
        idx = np.arange(lo, min(lo + chunk, n_vectors), dtype=np.int64)
        digits = np.empty((len(idx), k), dtype=np.int64)
        rem = idx
        for j in range(k - 1, -1, -1):
            digits[:, j] = rem % base
            rem = rem // base
        vecs = (digits - coeff_bound).astype(float)
        terms = vecs * lam
        total = terms.sum(axis=1)
        total_hit = np.abs(total - np.round(total)) <= 1e-9
        each_int = np.abs(terms - np.round(terms)) <= 1e-9
        bad = total_hit & ~np.all(each_int, axis=1)
        if np.any(bad) and hit_witness is None:
            row = vecs[bad][0]
            hit_witness = _canonical_sign(tuple(int(x) for x in row))
    return IndependenceVerdict("inconclusive", hit_witness)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------

def dump_json(obj: dict, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
