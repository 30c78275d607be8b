"""Single von Neumann measurement of one observable with a Gaussian pointer.

Units: hbar = 1. The pointer starts in the pure Gaussian

    chi(Q) = (2 pi sigma_Q^2)^(-1/4) exp(-Q^2 / 4 sigma_Q^2)

and the impulsive coupling eps * A * P shifts it by eps * a_n on the
eigenspace of a_n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroProbability
from .operators import (
    SpectralDecomposition,
    as_matrix,
    check_projector,
    check_same_dim,
)

ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True)
class GaussianMeter:
    """Minimum-uncertainty pointer centred at Q = 0, P = 0.

    ``epsilon`` is the coupling strength of the kick applied to this pointer.
    """

    sigma_q: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.sigma_q) and self.sigma_q > 0):
            raise ValueError(f"sigma_q must be positive, got {self.sigma_q}")
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise ValueError(f"epsilon must be non-negative, got {self.epsilon}")

    @property
    def sigma_p(self) -> float:
        return 1.0 / (2.0 * self.sigma_q)

    @property
    def strength(self) -> float:
        """Dimensionless coupling eps / sigma_Q."""
        return self.epsilon / self.sigma_q

    def with_epsilon(self, epsilon: float) -> "GaussianMeter":
        return GaussianMeter(self.sigma_q, epsilon)

    def wavefunction(self, q, center: float = 0.0):
        q = np.asarray(q, dtype=float)
        s2 = self.sigma_q ** 2
        return (2 * np.pi * s2) ** -0.25 * np.exp(-((q - center) ** 2) / (4 * s2))

    def density(self, q, center: float = 0.0):
        q = np.asarray(q, dtype=float)
        s2 = self.sigma_q ** 2
        return np.exp(-((q - center) ** 2) / (2 * s2)) / np.sqrt(2 * np.pi * s2)


def decoherence_factor(meter: GaussianMeter, delta_a):
    """exp(-(eps^2 / 8 sigma_Q^2) delta_a^2).

    This is Tr[rho_M exp(-i eps delta_a P)] for the Gaussian pointer.
    """
    delta_a = np.asarray(delta_a, dtype=float)
    return np.exp(-(meter.epsilon ** 2 / (8 * meter.sigma_q ** 2)) * delta_a ** 2)


def decoherence_matrix(meter: GaussianMeter, eigenvalues) -> np.ndarray:
    """g[n, n'] for every pair of eigenvalues."""
    a = np.asarray(eigenvalues, dtype=float)
    return decoherence_factor(meter, a[:, None] - a[None, :])


def born_probabilities(rho, a: SpectralDecomposition) -> np.ndarray:
    rho = as_matrix(rho)
    check_same_dim(rho, a)
    return np.einsum("ij,nji->n", rho, a.projectors).real


def luders_reduce(rho, a: SpectralDecomposition) -> np.ndarray:
    """Non-selective projective update sum_n P_n rho P_n."""
    rho = as_matrix(rho)
    check_same_dim(rho, a)
    P = a.projectors
    return np.einsum("nij,jk,nkl->il", P, rho, P)


def selective_collapse(rho, p) -> np.ndarray:
    """P rho P / Tr(rho P)."""
    rho, p = as_matrix(rho), as_matrix(p)
    check_same_dim(rho, p)
    check_projector(p)
    prob = np.trace(rho @ p).real
    if prob <= ZERO_PROBABILITY:
        raise ZeroProbability(f"Tr(rho P) = {prob:.3e}")
    return p @ rho @ p / prob


def reduced_state_after(rho, a: SpectralDecomposition, meter: GaussianMeter) -> np.ndarray:
    """System state after the kick, pointer traced out.

    sum_{n n'} g_{n n'} P_n rho P_n'; reduces to :func:`luders_reduce` as
    eps / sigma_Q grows.
    """
    rho = as_matrix(rho)
    check_same_dim(rho, a)
    g = decoherence_matrix(meter, a.eigenvalues)
    P = a.projectors
    return np.einsum("nm,nij,jk,mkl->il", g, P, rho, P)


@dataclass(frozen=True)
class PointerDensity:
    """Gaussian mixture sum_n w_n N(Q; center_n, width^2)."""

    weights: np.ndarray
    centers: np.ndarray
    width: float

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        w = self.width
        z = (q[..., None] - self.centers) / w
        return np.exp(-0.5 * z ** 2) @ self.weights / (np.sqrt(2 * np.pi) * w)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.centers))

    @property
    def variance(self) -> float:
        return float(np.dot(self.weights, self.centers ** 2) + self.width ** 2 - self.mean ** 2)

    def sample_grid(self, n_points: int = 201, span: float = 6.0):
        """(q, p(q)) on a uniform grid covering all components."""
        lo = self.centers.min() - span * self.width
        hi = self.centers.max() + span * self.width
        q = np.linspace(lo, hi, n_points)
        return q, self(q)

    def rows(self):
        return [(float(w), float(c), float(self.width)) for w, c in zip(self.weights, self.centers)]


def pointer_density(rho, a: SpectralDecomposition, meter: GaussianMeter) -> PointerDensity:
    """Born-weighted mixture of pointer Gaussians shifted to eps * a_n."""
    weights = born_probabilities(rho, a)
    return PointerDensity(weights, meter.epsilon * a.eigenvalues, meter.sigma_q)


def pointer_mean(rho, a: SpectralDecomposition) -> float:
    """<Q> / eps = Tr(rho A), the same for every coupling strength."""
    return float(np.dot(a.eigenvalues, born_probabilities(rho, a)))
