"""Random series priors on function spaces.

A prior here is the law of u = dilation * sum_k gamma_k xi_k x_k with
deterministic decay weights gamma_k, independent coefficient draws xi_k
from a log-concave law (optionally a scale mixture zeta_k * xi_k), and
orthonormal basis functions x_k.  Truncating the series to a finite index
window gives exchangeable finite-dimensional samples whose coefficients
are reproducible per index: each index draws from its own counter-based
stream, so enlarging the window never changes the coefficients already
present, and projection commutes with sampling exactly.

Enumeration contract
--------------------
Fourier indices are enumerated 0, 1, -1, 2, -2, ...  The truncation
window for level N is the index set {-N, ..., N-1}; listed in enumeration
order it is [0, 1, -1, ..., N-1, -(N-1), -N], which has 2N entries and is
not contiguous in the enumeration (it skips +N and ends with -N).
Sequence bases enumerate 1, 2, 3, ... and window N is {1, ..., N}.
Algebraic Fourier weights apply to the signed index k as (1+k^2)^(-s);
algebraic sequence weights apply to the 1-based enumeration position.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import streams
from .measures1d import Distribution1D, abs_mean, second_moment

__all__ = [
    "FourierCircle",
    "AbstractOrthonormal",
    "AlgebraicFourier",
    "AlgebraicSequence",
    "ExplicitSchedule",
    "IID",
    "Hierarchical",
    "SeriesPrior",
    "FieldSample",
    "coefficient_weights",
    "sample_field",
    "sample_coefficients",
    "project",
    "evaluate_field",
    "field_to_csv",
    "orthonormality_probe",
    "AdmissibilityReport",
    "admissibility_check",
    "admissibility_partial_sums",
    "coefficient_abs_variance",
    "ExpMomentReport",
    "estimate_exp_moment",
    "MarginalConvexityReport",
    "marginal_convexity_test",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FourierCircle:
    """Real trigonometric basis on the circle of circumference 1.

    Index 0 is the constant function 1, index +j is sqrt(2)*cos(2*pi*j*t),
    index -j is sqrt(2)*sin(2*pi*j*t); all have unit L2 norm on [0, 1).
    """

    kind = "fourier_circle"

    def window_indices(self, N: int) -> np.ndarray:
        if N < 1:
            raise ValueError("window level must be at least 1")
        out = [0]
        for j in range(1, N):
            out.extend((j, -j))
        out.append(-N)
        return np.asarray(out, dtype=int)

    @staticmethod
    def slot_uid(k: int) -> int:
        # Stable stream id per signed index, independent of the window.
        if k == 0:
            return 0
        return 2 * k - 1 if k > 0 else -2 * k

    @staticmethod
    def evaluate(k: int, x):
        x = np.asarray(x, dtype=float)
        if k == 0:
            return np.ones_like(x)
        if k > 0:
            return _SQRT2 * np.cos(2.0 * math.pi * k * x)
        return _SQRT2 * np.sin(2.0 * math.pi * (-k) * x)

    domain = (0.0, 1.0)


@dataclass(frozen=True, eq=False)
class AbstractOrthonormal:
    """Orthonormal system given by a callback evaluate(n, x), n = 1, 2, ..."""

    evaluate_fn: Callable
    domain: tuple = (0.0, 1.0)
    kind = "abstract_orthonormal"

    def window_indices(self, N: int) -> np.ndarray:
        if N < 1:
            raise ValueError("window level must be at least 1")
        return np.arange(1, N + 1, dtype=int)

    @staticmethod
    def slot_uid(k: int) -> int:
        return int(k) - 1

    def evaluate(self, k: int, x):
        return self.evaluate_fn(int(k), np.asarray(x, dtype=float))


@dataclass(frozen=True)
class AlgebraicFourier:
    """Weights (1 + k^2)^(-s) on the signed index k."""

    s: float

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("decay exponent must be nonnegative")


@dataclass(frozen=True)
class AlgebraicSequence:
    """Weights p^(-s) on the 1-based enumeration position p."""

    s: float

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("decay exponent must be nonnegative")


@dataclass(frozen=True)
class ExplicitSchedule:
    """Explicit positive nonincreasing weights, positional."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) == 0:
            raise ValueError("schedule must not be empty")
        if any(v <= 0 for v in vals):
            raise ValueError("weights must be positive")
        if any(b > a + 1e-15 for a, b in zip(vals[:-1], vals[1:])):
            raise ValueError("weights must be nonincreasing")


def coefficient_weights(basis, schedule, N: int) -> np.ndarray:
    """Decay weights for window N, in enumeration order."""
    idx = basis.window_indices(N)
    if isinstance(schedule, AlgebraicFourier):
        return (1.0 + idx.astype(float) ** 2) ** (-schedule.s)
    if isinstance(schedule, AlgebraicSequence):
        pos = np.arange(1, len(idx) + 1, dtype=float)
        return pos ** (-schedule.s)
    if isinstance(schedule, ExplicitSchedule):
        if len(schedule.values) < len(idx):
            raise ValueError("explicit schedule shorter than the window")
        return np.asarray(schedule.values[: len(idx)], dtype=float)
    raise TypeError(f"unknown schedule {schedule!r}")


@dataclass(frozen=True)
class IID:
    dist: Distribution1D

    def __post_init__(self):
        if not isinstance(self.dist, Distribution1D):
            raise TypeError("dist must be a Distribution1D")


@dataclass(frozen=True)
class Hierarchical:
    """Coefficient draws zeta*xi with independent scale and mode laws."""

    scale_law: Distribution1D
    mode_law: Distribution1D

    def __post_init__(self):
        for d in (self.scale_law, self.mode_law):
            if not isinstance(d, Distribution1D):
                raise TypeError("laws must be Distribution1D")


@dataclass(frozen=True)
class SeriesPrior:
    basis: object
    schedule: object
    law: object
    dilation: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.dilation <= 1.0:
            raise ValueError("dilation must lie in (0, 1]")
        if not isinstance(self.law, (IID, Hierarchical)):
            raise TypeError("law must be IID or Hierarchical")

    def coefficient_laws(self, N: int):
        """Per-slot marginal laws of the coefficients, or None.

        Available for IID laws because every supported family is closed
        under positive scaling; scale mixtures have no closed form.
        """
        if not isinstance(self.law, IID):
            return None
        w = self.dilation * coefficient_weights(self.basis, self.schedule, N)
        return [self.law.dist.scaled(float(c)) for c in w]


@dataclass(frozen=True, eq=False)
class FieldSample:
    """Truncated series sample: coefficients over the window, in
    enumeration order, together with the signed indices and the basis."""

    basis: object
    truncation: int
    indices: np.ndarray
    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=float)
        idx = np.asarray(self.indices, dtype=int)
        if coeffs.shape != idx.shape:
            raise ValueError("indices and coefficients must align")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "norm_l2", float(np.sqrt(np.sum(coeffs * coeffs))))

    norm_l2: float = 0.0


def _slot_generator(prior, seed, k, component):
    return streams.substream(seed, streams.COEFFS, prior.basis.slot_uid(int(k)), component)


def sample_coefficients(prior: SeriesPrior, N: int, num_samples: int, seed: int) -> np.ndarray:
    """Matrix of coefficient draws, shape (num_samples, window size).

    Row i is the i-th field; column order is the enumeration order of the
    window.  Each index has its own stream, so the first row equals the
    single sample for the same seed at any window level.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    idx = prior.basis.window_indices(N)
    weights = prior.dilation * coefficient_weights(prior.basis, prior.schedule, N)
    out = np.empty((num_samples, len(idx)))
    for pos, k in enumerate(idx):
        if isinstance(prior.law, IID):
            draws = prior.law.dist.sample(_slot_generator(prior, seed, k, 0), num_samples)
        else:
            xi = prior.law.mode_law.sample(_slot_generator(prior, seed, k, 0), num_samples)
            zeta = prior.law.scale_law.sample(_slot_generator(prior, seed, k, 1), num_samples)
            draws = zeta * xi
        out[:, pos] = weights[pos] * draws
    return out


def sample_field(prior: SeriesPrior, N: int, seed: int) -> FieldSample:
    """One truncated draw from the prior; deterministic in (prior, N, seed)."""
    coeffs = sample_coefficients(prior, N, 1, seed)[0]
    return FieldSample(prior.basis, N, prior.basis.window_indices(N), coeffs)


def project(u: FieldSample, M: int) -> FieldSample:
    """Restrict a sample to the window at level M <= truncation.

    Coefficients outside the target window are dropped (their
    contribution is zero); the result is idempotent under further
    projection and never changes surviving coefficients.
    """
    if M > u.truncation:
        raise ValueError("cannot refine by projection: target window exceeds the sample's")
    wanted = u.basis.window_indices(M)
    pos = {int(k): i for i, k in enumerate(u.indices)}
    take = np.asarray([pos[int(k)] for k in wanted], dtype=int)
    return FieldSample(u.basis, M, wanted, u.coefficients[take])


def evaluate_field(u: FieldSample, x) -> np.ndarray:
    """Pointwise values sum_k c_k x_k(x)."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for k, c in zip(u.indices, u.coefficients):
        out = out + c * u.basis.evaluate(int(k), x)
    return out


def field_to_csv(u: FieldSample) -> str:
    buf = io.StringIO()
    buf.write("index,coefficient\n")
    for k, c in zip(u.indices, u.coefficients):
        buf.write(f"{int(k)},{float(c)!r}\n")
    return buf.getvalue()


def orthonormality_probe(basis, N: int, num_grid: int = 4096) -> float:
    """Worst |<x_i, x_j> - delta_ij| over the window, by periodic trapezoid."""
    lo, hi = basis.domain
    x = lo + (hi - lo) * (np.arange(num_grid) + 0.5) / num_grid
    idx = basis.window_indices(N)
    vals = np.stack([basis.evaluate(int(k), x) for k in idx])
    gram = vals @ vals.T * (hi - lo) / num_grid
    return float(np.max(np.abs(gram - np.eye(len(idx)))))


@dataclass(frozen=True)
class AdmissibilityReport:
    gamma_partial_lp: float
    var_partial_lq: float
    gamma_cauchy: bool
    var_cauchy: bool
    conjugate_ok: bool
    passed: bool
    heuristic: bool = True


def admissibility_partial_sums(gamma_sq, var_abs, p: float, q: float) -> AdmissibilityReport:
    """Partial-sum admissibility check on explicit sequences.

    gamma_sq is the sequence of squared decay weights, var_abs the
    sequence Var|xi_k|.  The check is heuristic: a sequence counts as
    summable when the last doubling of the partial sum moved it by less
    than 1e-6 relatively.  q may be inf, in which case the variance side
    reports the supremum and counts as bounded.
    """
    if not (p >= 1 and q >= 1):
        raise ValueError("exponents must satisfy p >= 1 and q >= 1")
    gamma_sq = np.asarray(gamma_sq, dtype=float)
    var_abs = np.asarray(var_abs, dtype=float)

    def cauchy(seq, power):
        full = float(np.sum(seq**power))
        half = float(np.sum(seq[: max(1, len(seq) // 2)] ** power))
        return full, full > 0 and (full - half) < 1e-6 * full

    gamma_sum, gamma_ok = cauchy(gamma_sq, p)
    if math.isinf(q):
        var_sum, var_ok = float(np.max(var_abs)), True
    else:
        var_sum, var_ok = cauchy(var_abs, q)
    conj = abs((1.0 / p) + (0.0 if math.isinf(q) else 1.0 / q) - 1.0) <= 1e-12
    return AdmissibilityReport(gamma_sum, var_sum, gamma_ok, var_ok, conj, gamma_ok and var_ok)


def coefficient_abs_variance(law) -> float:
    """Var|xi| for the coefficient law, by quadrature of the marginals."""
    if isinstance(law, IID):
        return second_moment(law.dist) - abs_mean(law.dist) ** 2
    e2 = second_moment(law.scale_law) * second_moment(law.mode_law)
    e1 = abs_mean(law.scale_law) * abs_mean(law.mode_law)
    return e2 - e1 * e1


def admissibility_check(prior: SeriesPrior, p: float, q: float, K: int) -> AdmissibilityReport:
    """Admissibility of the prior's weight and variance sequences up to K terms."""
    if K < 2:
        raise ValueError("K must be at least 2")
    N = K if not isinstance(prior.basis, FourierCircle) else (K + 1) // 2 + 1
    weights = coefficient_weights(prior.basis, prior.schedule, N)[:K]
    var = coefficient_abs_variance(prior.law)
    return admissibility_partial_sums(weights**2, np.full(K, var), p, q)


@dataclass(frozen=True)
class ExpMomentReport:
    estimate: float
    stderr: float
    doubling_drift: float
    saturated: bool
    flagged: bool


def estimate_exp_moment(
    prior: SeriesPrior, eps: float, N: int, num_samples: int, seed: int, drift_tol: float = 0.02
) -> ExpMomentReport:
    """Monte Carlo estimate of E exp(eps * ||u||) at truncation N.

    doubling_drift compares the estimate against the first half of the
    sample and flags slow stabilization; overflowing weights set the
    saturated flag instead of raising.  A flagged report means the
    exponential moment shows no sign of being finite at this effort, not
    a proof either way.
    """
    if num_samples < 2:
        raise ValueError("num_samples must be at least 2")
    coeffs = sample_coefficients(prior, N, num_samples, seed)
    norms = np.sqrt(np.sum(coeffs * coeffs, axis=1))
    with np.errstate(over="ignore"):
        w = np.exp(eps * norms)
    saturated = bool(np.any(~np.isfinite(w)))
    if saturated:
        return ExpMomentReport(math.inf, math.inf, math.inf, True, True)
    est = float(np.mean(w))
    half = float(np.mean(w[: num_samples // 2]))
    drift = abs(est - half) / est if est > 0 else math.inf
    stderr = float(np.std(w) / math.sqrt(num_samples))
    return ExpMomentReport(est, stderr, drift, False, drift >= drift_tol)


@dataclass(frozen=True)
class MarginalConvexityReport:
    lhs: float
    rhs: float
    lhs_stderr: float
    rhs_stderr: float
    margin: float
    combined_stderr: float
    passed: bool


def _normalize_functionals(functionals):
    norm = []
    for f in functionals:
        if isinstance(f, dict):
            pairs = [(int(k), float(w)) for k, w in f.items()]
        else:
            pairs = []
            for item in f:
                if np.ndim(item) == 0:
                    pairs.append((int(item), 1.0))
                else:
                    k, w = item
                    pairs.append((int(k), float(w)))
        if not 1 <= len(pairs) <= 2:
            raise ValueError("each functional must use one or two coordinates")
        norm.append(pairs)
    if not 1 <= len(norm) <= 2:
        raise ValueError("at most two functionals are supported")
    return norm


def _box_array(box, dim):
    box = np.asarray(box, dtype=float).reshape(dim, 2)
    if np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("boxes must have positive volume")
    return box


def marginal_convexity_test(
    prior: SeriesPrior,
    functionals,
    box_a,
    box_b,
    lam: float,
    N: int,
    num_samples: int,
    seed: int,
) -> MarginalConvexityReport:
    """Monte Carlo check of the convexity inequality on a low-dimensional
    marginal of the prior.

    The marginal is the joint law of up to two linear functionals of the
    coefficients (each touching at most two coordinates).  With boxes A
    and B and their Minkowski combination C = lam*A + (1-lam)*B the check
    passes when P(C) >= P(A)^lam * P(B)^(1-lam) - 3 * combined stderr.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie strictly between 0 and 1")
    funcs = _normalize_functionals(functionals)
    dim = len(funcs)
    A = _box_array(box_a, dim)
    B = _box_array(box_b, dim)
    window = set(int(k) for k in prior.basis.window_indices(N))
    needed = sorted({k for f in funcs for k, _ in f})
    for k in needed:
        if k not in window:
            raise ValueError(f"functional index {k} outside window at level {N}")

    weights = prior.dilation * coefficient_weights(prior.basis, prior.schedule, N)
    index_pos = {int(k): i for i, k in enumerate(prior.basis.window_indices(N))}
    cols = {}
    for k in needed:
        if isinstance(prior.law, IID):
            draws = prior.law.dist.sample(_slot_generator(prior, seed, k, 0), num_samples)
        else:
            xi = prior.law.mode_law.sample(_slot_generator(prior, seed, k, 0), num_samples)
            zeta = prior.law.scale_law.sample(_slot_generator(prior, seed, k, 1), num_samples)
            draws = zeta * xi
        cols[k] = weights[index_pos[k]] * draws

    pts = np.zeros((num_samples, dim))
    for j, f in enumerate(funcs):
        for k, w in f:
            pts[:, j] += w * cols[k]

    C = lam * A + (1.0 - lam) * B

    def box_prob(box):
        inside = np.ones(num_samples, dtype=bool)
        for j in range(dim):
            inside &= (pts[:, j] >= box[j, 0]) & (pts[:, j] <= box[j, 1])
        p = float(np.mean(inside))
        return p, math.sqrt(max(p * (1.0 - p), 0.0) / num_samples)

    p_c, se_c = box_prob(C)
    p_a, se_a = box_prob(A)
    p_b, se_b = box_prob(B)
    rhs = p_a**lam * p_b ** (1.0 - lam)
    if p_a > 0 and p_b > 0:
        se_rhs = rhs * math.sqrt((lam * se_a / p_a) ** 2 + ((1.0 - lam) * se_b / p_b) ** 2)
    else:
        se_rhs = 0.0
    combined = math.sqrt(se_c**2 + se_rhs**2)
    margin = p_c - rhs
    return MarginalConvexityReport(p_c, rhs, se_c, se_rhs, margin, combined, margin >= -3.0 * combined)
