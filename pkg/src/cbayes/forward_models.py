"""Forward maps from coefficient space to finite data vectors.

Two kinds are supported.  LinearModel applies an explicit matrix to the
coefficient vector.  DeconvolutionModel acts diagonally on the basis
(multiplier per index, the Fourier picture of circular convolution with a
fixed kernel) and then collects point values at observation locations.
Multipliers may be an algebraic closed form (1+k^2)^(-s) or an explicit
per-slot list over the window; s = 0 gives flat multipliers, plain point
evaluation with no smoothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import streams
from .series_prior import FourierCircle

__all__ = [
    "LinearModel",
    "DeconvolutionModel",
    "AlgebraicMultipliers",
    "equispaced_points",
    "lipschitz_probe",
    "bound_probe",
]


def equispaced_points(m: int) -> np.ndarray:
    """m equispaced observation points on the unit circle."""
    if m < 1:
        raise ValueError("need at least one observation point")
    return np.arange(m, dtype=float) / m


@dataclass(frozen=True)
class AlgebraicMultipliers:
    """Kernel multipliers (1 + k^2)^(-s) on the signed index."""

    s: float

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("decay exponent must be nonnegative")

    def values(self, indices: np.ndarray) -> np.ndarray:
        return (1.0 + np.asarray(indices, dtype=float) ** 2) ** (-self.s)


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Explicit matrix acting on coefficient vectors (sequence windows)."""

    matrix: np.ndarray
    kind = "linear"

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        object.__setattr__(self, "matrix", A)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def data_dim(self) -> int:
        return self.matrix.shape[0]

    def window_positions(self, M: int) -> np.ndarray:
        if M > self.dim:
            raise ValueError("window level exceeds the model dimension")
        return np.arange(M)

    def apply(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coefficients, got {coeffs.shape}")
        return self.matrix @ coeffs

    def apply_many(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[1] != self.dim:
            raise ValueError(f"expected (n, {self.dim}) coefficients")
        return coeffs @ self.matrix.T

    def truncated(self, M: int) -> "LinearModel":
        return LinearModel(self.matrix[:, self.window_positions(M)])

    def design_matrix(self) -> np.ndarray:
        return self.matrix.copy()

    def operator_bound(self) -> float:
        return float(np.linalg.norm(self.matrix, "fro"))


@dataclass(frozen=True, eq=False)
class DeconvolutionModel:
    """Diagonal kernel action on the window followed by point sampling.

    data_j = sum_k multiplier(k) * c_k * x_k(p_j) over the window at the
    stored truncation.
    """

    multipliers: object
    observation_points: np.ndarray
    truncation: int
    basis: object = field(default_factory=FourierCircle)
    kind = "deconvolution"

    def __post_init__(self):
        pts = np.asarray(self.observation_points, dtype=float)
        object.__setattr__(self, "observation_points", pts)
        idx = self.basis.window_indices(self.truncation)
        if isinstance(self.multipliers, AlgebraicMultipliers):
            mult = self.multipliers.values(idx)
        else:
            mult = np.asarray(self.multipliers, dtype=float)
            if mult.shape != idx.shape:
                raise ValueError("explicit multipliers must cover the window")
        E = np.stack([self.basis.evaluate(int(k), pts) for k in idx], axis=1)
        object.__setattr__(self, "_indices", idx)
        object.__setattr__(self, "_mult", mult)
        object.__setattr__(self, "_design", E * mult[None, :])

    @property
    def dim(self) -> int:
        return len(self._indices)

    @property
    def data_dim(self) -> int:
        return len(self.observation_points)

    def multiplier_values(self) -> np.ndarray:
        return self._mult.copy()

    def window_positions(self, M: int) -> np.ndarray:
        if M > self.truncation:
            raise ValueError("window level exceeds the model truncation")
        wanted = self.basis.window_indices(M)
        pos = {int(k): i for i, k in enumerate(self._indices)}
        return np.asarray([pos[int(k)] for k in wanted], dtype=int)

    def apply(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coefficients, got {coeffs.shape}")
        return self._design @ coeffs

    def apply_many(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.ndim != 2 or coeffs.shape[1] != self.dim:
            raise ValueError(f"expected (n, {self.dim}) coefficients")
        return coeffs @ self._design.T

    def truncated(self, M: int) -> "DeconvolutionModel":
        take = self.window_positions(M)
        return DeconvolutionModel(self._mult[take], self.observation_points, M, self.basis)

    def design_matrix(self) -> np.ndarray:
        """Dense (data_dim, dim) matrix realizing the model on the window."""
        return self._design.copy()

    def operator_bound(self) -> float:
        """Closed-form Lipschitz bound, the Frobenius norm of the design."""
        return float(np.linalg.norm(self._design, "fro"))


def _ball_points(dim: int, num: int, radius: float, gen, on_sphere: bool) -> np.ndarray:
    u = gen.random((num, 2 * ((dim + 1) // 2)))
    r = np.sqrt(-2.0 * np.log1p(-u[:, ::2]))
    z = np.empty((num, 2 * ((dim + 1) // 2)))
    z[:, ::2] = r * np.cos(2.0 * math.pi * u[:, 1::2])
    z[:, 1::2] = r * np.sin(2.0 * math.pi * u[:, 1::2])
    z = z[:, :dim]
    norms = np.maximum(np.sqrt(np.sum(z * z, axis=1)), np.finfo(float).tiny)
    dirs = z / norms[:, None]
    if on_sphere:
        return radius * dirs
    radii = radius * gen.random(num) ** (1.0 / dim)
    return radii[:, None] * dirs


def lipschitz_probe(model, r: float, num_pairs: int, seed: int) -> float:
    """Largest observed ||G(u1) - G(u2)|| / ||u1 - u2|| over random pairs in
    the ball of radius r.  Never exceeds the model's operator_bound()."""
    if num_pairs < 1:
        raise ValueError("num_pairs must be positive")
    gen = streams.substream(seed, streams.PROBES, 0)
    pts = _ball_points(model.dim, 2 * num_pairs, r, gen, on_sphere=False)
    u1, u2 = pts[:num_pairs], pts[num_pairs:]
    du = u1 - u2
    norms = np.sqrt(np.sum(du * du, axis=1))
    keep = norms > 0
    dg = model.apply_many(u1[keep]) - model.apply_many(u2[keep])
    ratios = np.sqrt(np.sum(dg * dg, axis=1)) / norms[keep]
    return float(np.max(ratios))


def bound_probe(model, eps: float, num_samples: int, seed: int, radius: float = 1.0, on_sphere: bool = True) -> float:
    """Largest observed log||G(u)|| - eps*||u|| over random inputs of norm
    radius (or inside the ball when on_sphere is false)."""
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    gen = streams.substream(seed, streams.PROBES, 1)
    pts = _ball_points(model.dim, num_samples, radius, gen, on_sphere=on_sphere)
    g = model.apply_many(pts)
    gn = np.sqrt(np.sum(g * g, axis=1))
    un = np.sqrt(np.sum(pts * pts, axis=1))
    with np.errstate(divide="ignore"):
        vals = np.log(gn) - eps * un
    return float(np.max(vals))
