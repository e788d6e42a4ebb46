"""Helson constants, approximate indicators, and the telescoping projector.

approx_indicator builds a degree-D trig polynomial phi with phi = 1 on a
finite set K and |phi| <= eps on sampled forbidden points F, minimizing a
polyhedral surrogate of the A-norm sum |phi_hat(n)|.  Each coefficient is
split into nonnegative parts x = p - q, y = u - w with a ceiling r bounded
by the octagonal support function

    r >= p + q,   r >= u + w,   sqrt(2) r >= p + q + u + w,

so r >= cos(pi/8) |phi_hat(n)| always holds and the true A-norm of the
solution is within sec(pi/8) ~ 1.083 of the LP objective.  The modulus
caps on F use the inscribed regular 8-gon (right-hand side eps cos(pi/8)),
which guarantees |phi| <= eps at every constrained point.

The telescoping series uses eps_k = e^{-kp} exactly; sup differences of
consecutive indicators are bounded by 2 eps_k on the constraint set by
construction and re-checked numerically.

helson_constant is a heuristic upper estimate: multi-start projected
subgradient descent on the ell^1 sphere followed by coordinate polish; it
reports the best witness found, never a certified constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import Infeasible, InfeasibleSeparation, OutOfRange
from .torus import (
    AtomicCircleMeasure,
    FiniteFrequencySet,
    SparseTrigPoly,
    a_norm_lattice,
)

_COS8 = math.cos(math.pi / 8.0)
_POINT_TOL = 1e-6  # constraint residual tolerance at solution points


def _circle_dist(a: float, b: float) -> float:
    d = abs(a - b) % 1.0
    return min(d, 1.0 - d)


# ---------------------------------------------------------------------------
# Helson constant estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HelsonEstimate:
    K: FiniteFrequencySet
    g_range: int
    restarts: int
    alpha_upper: float
    witness_measure: AtomicCircleMeasure
    argmax_g: int

    def to_json_dict(self) -> dict:
        return {
            "K": self.K.to_json_dict(),
            "g_range": self.g_range,
            "restarts": self.restarts,
            "alpha_upper": self.alpha_upper,
            "witness": self.witness_measure.to_json_dict(),
            "argmax_g": self.argmax_g,
        }


class _SupScan:
    """max_{|g| <= g_range} |mu_hat(g)| for weights on fixed frequencies."""

    def __init__(self, lam: np.ndarray, g_range: int):
        self.lam = lam
        self.gs = np.arange(-g_range, g_range + 1)
        self.E = np.exp(2j * np.pi * np.outer(self.gs, lam))

    def value_and_argmax(self, w: np.ndarray) -> Tuple[float, int]:
        mods = np.abs(self.E @ w)
        i = int(np.argmax(mods))
        return float(mods[i]), int(self.gs[i])

    def value(self, w: np.ndarray) -> float:
        return float(np.max(np.abs(self.E @ w)))


def _golden_min(fun, a: float, b: float, iters: int = 36) -> float:
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = fun(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = fun(x2)
    return 0.5 * (a + b)


def _normalize_l1(w: np.ndarray) -> np.ndarray:
    s = np.sum(np.abs(w))
    if s < 1e-12:
        w = np.ones_like(w)
        s = np.sum(np.abs(w))
    return w / s


def _polish(scan: _SupScan, w: np.ndarray, sweeps: int = 4) -> np.ndarray:
    """Coordinate descent: per-atom phase search, then pairwise mass transfer."""
    k = w.size
    for _ in range(sweeps):
        for j in range(k):
            if abs(w[j]) < 1e-14:
                continue
            mag = abs(w[j])

            def phase_obj(phi, j=j, mag=mag):
                trial = w.copy()
                trial[j] = mag * np.exp(1j * phi)
                return scan.value(trial)

            coarse = np.linspace(0.0, 2.0 * np.pi, 33)[:-1]
            best_phi = min(coarse, key=phase_obj)
            span = 2.0 * np.pi / 32
            phi = _golden_min(phase_obj, best_phi - span, best_phi + span)
            if phase_obj(phi) <= scan.value(w):
                w[j] = mag * np.exp(1j * phi)
        for i in range(k):
            for j in range(i + 1, k):

                def mass_obj(t, i=i, j=j):
                    trial = w.copy()
                    trial[i] = (abs(w[i]) + t) * np.exp(1j * np.angle(w[i]))
                    trial[j] = (abs(w[j]) - t) * np.exp(1j * np.angle(w[j]))
                    return scan.value(trial)

                lo, hi = -abs(w[i]), abs(w[j])
                grid = np.linspace(lo, hi, 17)
                t0 = min(grid, key=mass_obj)
                step = (hi - lo) / 16 if hi > lo else 0.0
                t = _golden_min(mass_obj, max(lo, t0 - step), min(hi, t0 + step)) if step else 0.0
                if mass_obj(t) < scan.value(w) - 1e-15:
                    w[i] = (abs(w[i]) + t) * np.exp(1j * np.angle(w[i]))
                    w[j] = (abs(w[j]) - t) * np.exp(1j * np.angle(w[j]))
        w = _normalize_l1(w)
    return w


def helson_constant(
    K: FiniteFrequencySet, g_range: int, restarts: int, seed: int
) -> HelsonEstimate:
    """Heuristic upper estimate of the Helson constant over |g| <= g_range.

    Minimizes sup_g |mu_hat(g)| over complex weights with ||mu|| = 1 by
    multi-start projected subgradient descent (500 iterations each, step
    1/sqrt(iter)) plus coordinate polish; returns the best value found and
    its witness.  Upper-bounds the true constant restricted to this g
    window; not a certificate.
    """
    k = len(K)
    if k == 0 or k > 8:
        raise OutOfRange(f"|K| must be in 1..8, got {k}")
    if g_range > 10 ** 6:
        raise OutOfRange(f"g_range must be <= 1e6, got {g_range}")
    lam = K.values()
    scan = _SupScan(lam, g_range)
    rng = np.random.default_rng(seed)

    best_w: Optional[np.ndarray] = None
    best_val = np.inf
    for r in range(max(1, restarts)):
        if r == 0:
            w = np.ones(k, dtype=complex) / k
        elif r == 1:
            w = np.exp(2j * np.pi * rng.random(k)) / k
        else:
            w = rng.normal(size=k) + 1j * rng.normal(size=k)
        w = _normalize_l1(w.astype(complex))
        for it in range(1, 501):
            val, g_star = scan.value_and_argmax(w)
            z = complex(np.sum(w * np.exp(2j * np.pi * g_star * lam)))
            if abs(z) < 1e-15:
                break
            u = z / abs(z)
            grad = u * np.conj(np.exp(2j * np.pi * g_star * lam))
            w = _normalize_l1(w - (0.25 / math.sqrt(it)) * grad)
        w = _polish(scan, w)
        val = scan.value(w)
        if val < best_val:
            best_val, best_w = val, w.copy()

    best_w = _normalize_l1(best_w)
    alpha, g_arg = scan.value_and_argmax(best_w)
    witness = AtomicCircleMeasure(tuple(zip(K.freqs, best_w.tolist())))
    return HelsonEstimate(
        K=K,
        g_range=int(g_range),
        restarts=int(restarts),
        alpha_upper=float(alpha),
        witness_measure=witness,
        argmax_g=g_arg,
    )


# ---------------------------------------------------------------------------
# approximate indicators by LP
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ApproxIndicator:
    K: FiniteFrequencySet
    F_samples: Tuple[float, ...]
    epsilon: float
    phi: SparseTrigPoly
    a_norm: float
    lp_objective: float

    def __post_init__(self):
        lamK = self.K.values()
        valsK = self.phi.evaluate(lamK[:, None])
        if np.max(np.abs(valsK - 1.0)) > _POINT_TOL:
            raise OutOfRange("indicator misses 1 on K beyond 1e-6")
        if self.F_samples:
            valsF = self.phi.evaluate(np.array(self.F_samples)[:, None])
            if np.max(np.abs(valsF)) > self.epsilon + _POINT_TOL:
                raise OutOfRange("indicator exceeds epsilon on F beyond 1e-6")

    def degree(self) -> int:
        return self.phi.max_abs_coord()

    def audit_densified(self, factor: int = 10) -> float:
        """Max |phi| on a refined grid between consecutive F samples.

        Reported, not asserted: only the sampled points are constrained.
        Gaps wider than 4x the median gap are skipped (they span K
        territory, where |phi| is legitimately large).
        """
        ts = np.sort(np.array(self.F_samples, dtype=float))
        if ts.size < 2:
            return 0.0
        gaps = np.diff(ts)
        cutoff = 4.0 * float(np.median(gaps))
        pts: List[np.ndarray] = []
        for a, b, gap in zip(ts[:-1], ts[1:], gaps):
            if gap <= cutoff:
                pts.append(np.linspace(a, b, factor + 1))
        if not pts:
            return 0.0
        grid = np.concatenate(pts)
        return float(np.max(np.abs(self.phi.evaluate(grid[:, None]))))

    def to_json_dict(self) -> dict:
        return {
            "K": self.K.to_json_dict(),
            "F_samples": list(self.F_samples),
            "epsilon": self.epsilon,
            "a_norm": self.a_norm,
            "lp_objective": self.lp_objective,
            "phi": self.phi.to_json_dict(),
        }


def approx_indicator(
    K: FiniteFrequencySet,
    F_samples: Sequence[float],
    epsilon: float,
    degree: int,
) -> ApproxIndicator:
    """LP construction of a near-indicator of K avoiding F.

    minimize sum_n r_n  s.t.  octagonal ceilings on each coefficient,
    phi(lambda) = 1 for lambda in K (two real equalities), and 8-gon
    modulus caps |phi(t)| <= eps for t in F_samples.
    """
    if degree < 1 or degree > 512:
        raise OutOfRange(f"degree must be in 1..512, got {degree}")
    if len(K) + len(F_samples) > 500:
        raise OutOfRange("|K| + |F_samples| must be <= 500")
    if not (0.0 < epsilon < 1.0):
        raise OutOfRange(f"epsilon must lie in (0, 1), got {epsilon}")
    lamK = K.values()
    ts = np.array([float(t) % 1.0 for t in F_samples], dtype=float)
    min_sep = min(
        (_circle_dist(a, t) for a in lamK for t in ts), default=np.inf
    )
    if min_sep < 1.0 / (2.0 * degree):
        raise InfeasibleSeparation(
            f"min K-F distance {min_sep:.3e} is below the resolution 1/(2 degree)"
        )

    D = int(degree)
    ns = np.arange(-D, D + 1)
    N = ns.size
    nv = 5 * N  # blocks p q u w r
    c = np.zeros(nv)
    c[4 * N:] = 1.0
    # tie-breaker: the optimal face of sum r_n is degenerate, and the
    # split-part penalty selects the vertex with least sum |x| + |y|, which
    # is also the least true A-norm one; it shifts the ceiling objective by
    # at most ~3e-4 relative, well under reporting tolerances
    c[:4 * N] = 1e-4

    rows_ub: List[np.ndarray] = []
    rhs_ub: List[float] = []

    def blank() -> np.ndarray:
        return np.zeros(nv)

    # octagonal ceilings
    for i in range(N):
        row = blank()
        row[i] = 1.0
        row[N + i] = 1.0
        row[4 * N + i] = -1.0
        rows_ub.append(row)
        rhs_ub.append(0.0)
        row = blank()
        row[2 * N + i] = 1.0
        row[3 * N + i] = 1.0
        row[4 * N + i] = -1.0
        rows_ub.append(row)
        rhs_ub.append(0.0)
        row = blank()
        row[i] = 1.0
        row[N + i] = 1.0
        row[2 * N + i] = 1.0
        row[3 * N + i] = 1.0
        row[4 * N + i] = -math.sqrt(2.0)
        rows_ub.append(row)
        rhs_ub.append(0.0)

    # equalities phi(lambda) = 1
    rows_eq: List[np.ndarray] = []
    rhs_eq: List[float] = []
    for lam in lamK:
        cn = np.cos(2.0 * np.pi * ns * lam)
        sn = np.sin(2.0 * np.pi * ns * lam)
        row = blank()
        row[:N] = cn
        row[N:2 * N] = -cn
        row[2 * N:3 * N] = -sn
        row[3 * N:4 * N] = sn
        rows_eq.append(row)
        rhs_eq.append(1.0)
        row = blank()
        row[:N] = sn
        row[N:2 * N] = -sn
        row[2 * N:3 * N] = cn
        row[3 * N:4 * N] = -cn
        rows_eq.append(row)
        rhs_eq.append(0.0)

    # inscribed-octagon modulus caps on F
    for t in ts:
        cn = np.cos(2.0 * np.pi * ns * t)
        sn = np.sin(2.0 * np.pi * ns * t)
        for j in range(8):
            th = j * math.pi / 4.0
            pa = math.cos(th) * cn + math.sin(th) * sn
            ua = math.sin(th) * cn - math.cos(th) * sn
            row = blank()
            row[:N] = pa
            row[N:2 * N] = -pa
            row[2 * N:3 * N] = ua
            row[3 * N:4 * N] = -ua
            rows_ub.append(row)
            rhs_ub.append(epsilon * _COS8)

    from .linprog import lp_solve

    try:
        res = lp_solve(
            c,
            A_eq=np.array(rows_eq),
            b_eq=np.array(rhs_eq),
            A_ub=np.array(rows_ub),
            b_ub=np.array(rhs_ub),
        )
    except Infeasible as exc:
        raise InfeasibleSeparation(
            f"no degree-{degree} polynomial separates K from F at eps={epsilon}"
        ) from exc

    v = res.x
    x = v[:N] - v[N:2 * N]
    y = v[2 * N:3 * N] - v[3 * N:4 * N]
    coeffs: Dict[Tuple[int, ...], complex] = {}
    for i, n in enumerate(ns):
        coeffs[(int(n),)] = complex(x[i], y[i])
    phi = SparseTrigPoly(1, coeffs)
    return ApproxIndicator(
        K=K,
        F_samples=tuple(float(t) for t in ts),
        epsilon=float(epsilon),
        phi=phi,
        a_norm=a_norm_lattice(phi),
        lp_objective=float(np.sum(v[4 * N:])),
    )


def projector_series(
    K: FiniteFrequencySet,
    F_samples: Sequence[float],
    p: float,
    k_terms: int,
    degree: int,
) -> List[ApproxIndicator]:
    """Indicators phi_{eps_k} for eps_k = e^{-kp}, k = 1..k_terms.

    Terms with eps_k below the double-precision floor 1e-14 are dropped.
    Consecutive sup differences on K u F are re-checked against 2 eps_k.
    """
    if p < 2.0 or p > 16.0:
        raise OutOfRange(f"p must lie in [2, 16], got {p}")
    if k_terms < 1 or k_terms > 6:
        raise OutOfRange(f"k_terms must be in 1..6, got {k_terms}")
    eps_list = [math.exp(-k * p) for k in range(1, k_terms + 1)]
    eps_list = [e for e in eps_list if e >= 1e-14]
    series = [approx_indicator(K, F_samples, e, degree) for e in eps_list]
    pts = np.concatenate([K.values(), np.array(F_samples, dtype=float)])
    for k in range(len(series) - 1):
        d = np.max(
            np.abs(
                series[k + 1].phi.evaluate(pts[:, None])
                - series[k].phi.evaluate(pts[:, None])
            )
        )
        if d > 2.0 * eps_list[k] + 1e-6:
            raise OutOfRange(
                f"sup difference {d:.3e} violates the 2 eps_k bound at k={k + 1}"
            )
    return series


# ---------------------------------------------------------------------------
# rotation model and the spectral projector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotationModel:
    """f = sum c_m z^m observed along the rotation by alpha_rot.

    Mode m is an eigenfunction with eigenvalue frequency (m alpha_rot mod 1);
    the spectral measure of f is sum |c_m|^2 at those frequencies.
    """

    alpha_rot: float
    modes: Tuple[Tuple[int, complex], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "modes",
            tuple(sorted((int(m), complex(cm)) for m, cm in self.modes)),
        )

    def eigenvalue(self, m: int) -> float:
        return (m * self.alpha_rot) % 1.0

    def poly(self) -> SparseTrigPoly:
        return SparseTrigPoly(1, {(m,): cm for m, cm in self.modes})

    def spectral_measure(self) -> AtomicCircleMeasure:
        return AtomicCircleMeasure(
            tuple((self.eigenvalue(m), abs(cm) ** 2) for m, cm in self.modes)
        )

    def conjugated(self) -> "RotationModel":
        return RotationModel(
            self.alpha_rot, tuple((-m, cm.conjugate()) for m, cm in self.modes)
        )

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(cm) ** 2 for _, cm in self.modes))


def apply_projector(
    model: RotationModel, K: FiniteFrequencySet, tol_match: float
) -> Tuple[SparseTrigPoly, List[int]]:
    """Exact spectral projector on the rotation model: a Fourier-mode filter.

    Keeps mode m iff its eigenvalue is within tol_match of K (circle
    metric); K is fattened by tol_match so membership is decidable in
    floats.
    """
    lamK = K.values()
    kept = [
        m
        for m, _ in model.modes
        if lamK.size and min(_circle_dist(model.eigenvalue(m), lam) for lam in lamK) <= tol_match
    ]
    coeffs = {(m,): cm for m, cm in model.modes if m in set(kept)}
    return SparseTrigPoly(1, coeffs), kept


def filter_with_indicator(model: RotationModel, phi: SparseTrigPoly) -> SparseTrigPoly:
    """phi(T) f: multiply mode m by phi at its eigenvalue."""
    lams = np.array([model.eigenvalue(m) for m, _ in model.modes], dtype=float)
    vals = phi.evaluate(lams[:, None])
    return SparseTrigPoly(
        1,
        {
            (m,): cm * vals[i]
            for i, (m, cm) in enumerate(model.modes)
        },
    )


def l2_coeff_distance(f: SparseTrigPoly, g: SparseTrigPoly) -> float:
    keys = set(f.coeffs) | set(g.coeffs)
    return math.sqrt(
        sum(abs(f.coeffs.get(k, 0j) - g.coeffs.get(k, 0j)) ** 2 for k in keys)
    )


def _lp_norms_on_grid(poly: SparseTrigPoly, grid: int, ps: Sequence[float]) -> Dict[float, float]:
    if poly.dim != 1:
        raise OutOfRange("grid L^p norms are one-dimensional here")
    dense = np.zeros(grid, dtype=complex)
    for (m,), cm in poly.coeffs.items():
        dense[m % grid] += cm
    vals = np.abs(np.fft.ifft(dense) * grid)
    return {p: float(np.mean(vals ** p) ** (1.0 / p)) for p in ps}


def lp_norm_growth(
    model: RotationModel,
    K: FiniteFrequencySet,
    p_list: Sequence[float],
    grid: int,
    tol_match: float = 1e-9,
) -> dict:
    """Table of ||pi_K f||_p / ||f||_p with the least C fitting ratio <= C p."""
    if grid < 4096:
        raise OutOfRange(f"grid must be >= 4096, got {grid}")
    ps = sorted(float(p) for p in p_list)
    if ps and (ps[0] < 2.0 or ps[-1] > 16.0):
        raise OutOfRange("p_list must lie within [2, 16]")
    f = model.poly()
    pf, kept = apply_projector(model, K, tol_match)
    nf = _lp_norms_on_grid(f, grid, ps)
    npf = _lp_norms_on_grid(pf, grid, ps) if pf.coeffs else {p: 0.0 for p in ps}
    rows = []
    least_c = 0.0
    for p in ps:
        ratio = npf[p] / nf[p] if nf[p] > 0 else 0.0
        least_c = max(least_c, ratio / p)
        rows.append({"p": p, "ratio": ratio, "c_at_p": ratio / p})
    return {"rows": rows, "least_feasible_C": least_c, "kept_modes": kept}


def frequency_set_inverse(K: FiniteFrequencySet) -> FiniteFrequencySet:
    """K^{-1}: negate each frequency on the circle."""
    inv = []
    for f in K.freqs:
        if isinstance(f, Fraction):
            inv.append((-f) % 1)
        else:
            inv.append((-float(f)) % 1.0)
    return FiniteFrequencySet(tuple(inv))
