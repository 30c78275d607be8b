"""Two successive von Neumann measurements: A with pointer 1, then B with pointer 2.

The two-pointer correlations are governed by the complex table

    W[n, m](eps1) = sum_{n'} g_{n n'}(eps1) Tr[rho P_{a_n'} P_{b_m} P_{a_n}]

which interpolates between the Kirkwood-Dirac distribution (eps1 -> 0) and
Wigner's joint probability (eps1 -> infinity). Neither the table nor the
normalized correlations depend on the second pointer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SpectralDecomposition, as_matrix, check_projector, check_same_dim
from .single import GaussianMeter, born_probabilities, decoherence_matrix, reduced_state_after

MARGINAL_TOL = 1e-10


@dataclass(frozen=True)
class QuasiProbTable:
    """values[n, m] over the distinct eigenvalues a_n of A and b_m of B."""

    values: np.ndarray
    eigenvalues_a: np.ndarray
    eigenvalues_b: np.ndarray
    epsilon1: float
    sigma_q1: float

    @property
    def marginal_a(self) -> np.ndarray:
        return self.values.sum(axis=1)

    @property
    def marginal_b(self) -> np.ndarray:
        return self.values.sum(axis=0)

    def moment(self) -> complex:
        """sum_{nm} a_n b_m W[n, m]."""
        return complex(self.eigenvalues_a @ self.values @ self.eigenvalues_b)

    def rows(self):
        """(a_n, b_m, re, im) in row-major order."""
        out = []
        for n, a in enumerate(self.eigenvalues_a):
            for m, b in enumerate(self.eigenvalues_b):
                w = self.values[n, m]
                out.append((float(a), float(b), float(w.real), float(w.imag)))
        return out


@dataclass(frozen=True)
class CorrelationResult:
    """Two-pointer correlations in units of eps1 * eps2."""

    q1q2: float
    p1q2: float
    epsilon1: float
    epsilon2: float
    sigma_q1: float


def triple_traces(rho, a: SpectralDecomposition, b: SpectralDecomposition) -> np.ndarray:
    """T[n', m, n] = Tr[rho P_{a_n'} P_{b_m} P_{a_n}]."""
    rho = as_matrix(rho)
    check_same_dim(rho, a, b)
    PA, PB = a.projectors, b.projectors
    return np.einsum("ij,pjk,mkl,nli->pmn", rho, PA, PB, PA, optimize=True)


def quasi_probability(rho, a: SpectralDecomposition, b: SpectralDecomposition,
                      meter1: GaussianMeter) -> QuasiProbTable:
    T = triple_traces(rho, a, b)
    g = decoherence_matrix(meter1, a.eigenvalues)
    values = np.einsum("np,pmn->nm", g, T)
    return QuasiProbTable(values, a.eigenvalues, b.eigenvalues, meter1.epsilon, meter1.sigma_q)


def corr_q1q2(table: QuasiProbTable) -> float:
    """<Q1 Q2> / (eps1 eps2) = Re sum a_n b_m W[n, m]."""
    return table.moment().real


def corr_p1q2(table: QuasiProbTable) -> float:
    """<P1 Q2> / (eps1 eps2) = Im sum a_n b_m W[n, m] / (2 sigma_Q1^2)."""
    return table.moment().imag / (2 * table.sigma_q1 ** 2)


def correlations(table: QuasiProbTable, meter2: GaussianMeter | None = None) -> CorrelationResult:
    eps2 = meter2.epsilon if meter2 is not None else float("nan")
    return CorrelationResult(corr_q1q2(table), corr_p1q2(table), table.epsilon1, eps2, table.sigma_q1)


def kirkwood(rho, a: SpectralDecomposition, b: SpectralDecomposition) -> np.ndarray:
    """K[n, m] = Tr[rho P_{b_m} P_{a_n}]."""
    rho = as_matrix(rho)
    check_same_dim(rho, a, b)
    return np.einsum("ij,mjk,nki->nm", rho, b.projectors, a.projectors)


def margenau_hill(rho, a: SpectralDecomposition, b: SpectralDecomposition) -> np.ndarray:
    """Symmetrized (real) part of the Kirkwood-Dirac table; may be negative."""
    rho = as_matrix(rho)
    check_same_dim(rho, a, b)
    PA, PB = a.projectors, b.projectors
    ba = np.einsum("ij,mjk,nki->nm", rho, PB, PA)
    ab = np.einsum("ij,njk,mki->nm", rho, PA, PB)
    return (0.5 * (ba + ab)).real


def wigner_joint(rho, pa, pb) -> float:
    """Tr(rho Pa Pb Pa): probability of Pa then Pb for projective measurements."""
    rho, pa, pb = as_matrix(rho), as_matrix(pa), as_matrix(pb)
    check_same_dim(rho, pa, pb)
    check_projector(pa)
    check_projector(pb)
    return float(np.trace(rho @ pa @ pb @ pa).real)


def wigner_table(rho, a: SpectralDecomposition, b: SpectralDecomposition) -> np.ndarray:
    """Wigner's joint probabilities over all eigenvalue pairs, indexed [n, m]."""
    rho = as_matrix(rho)
    check_same_dim(rho, a, b)
    PA, PB = a.projectors, b.projectors
    return np.einsum("ij,njk,mkl,nli->nm", rho, PA, PB, PA).real


def commutes(a: SpectralDecomposition, b: SpectralDecomposition, tol: float = 1e-10) -> bool:
    PA, PB = a.projectors, b.projectors
    ab = np.einsum("nij,mjk->nmik", PA, PB)
    ba = np.einsum("mij,njk->nmik", PB, PA)
    return bool(np.max(np.abs(ab - ba)) <= tol)


@dataclass(frozen=True)
class MarginalReport:
    deviation_a: float
    deviation_b: float
    tol: float = MARGINAL_TOL

    @property
    def passed(self) -> bool:
        return max(self.deviation_a, self.deviation_b) <= self.tol

    def __bool__(self):
        return self.passed


def marginal_check(table: QuasiProbTable, rho, a: SpectralDecomposition,
                   b: SpectralDecomposition, meter1: GaussianMeter,
                   tol: float = MARGINAL_TOL) -> MarginalReport:
    """Compare both marginals of ``table`` with the Born probabilities they must equal.

    Summing over b gives Tr(rho P_{a_n}); summing over a gives the B
    statistics in the state left behind by the first measurement.
    """
    expected_a = born_probabilities(rho, a)
    expected_b = born_probabilities(reduced_state_after(rho, a, meter1), b)
    dev_a = float(np.max(np.abs(table.marginal_a - expected_a)))
    dev_b = float(np.max(np.abs(table.marginal_b - expected_b)))
    return MarginalReport(dev_a, dev_b, tol)


@dataclass(frozen=True)
class ScanPoint:
    table: QuasiProbTable
    q1q2: float
    p1q2: float
    distance_to_wigner: float
    distance_to_kirkwood: float


def scan_epsilon(rho, a: SpectralDecomposition, b: SpectralDecomposition,
                 sigma_q1: float, epsilons, map_fn=map) -> list[ScanPoint]:
    """Quasi-probability, correlations and distances to both limits per eps1.

    ``map_fn`` lets callers evaluate points in parallel; output order always
    follows ``epsilons``.
    """
    eps = np.asarray(epsilons, dtype=float)
    if eps.ndim != 1 or eps.size == 0:
        raise ValueError("epsilons must be a non-empty list")
    if np.any(eps <= 0) or np.any(np.diff(eps) < 0):
        raise ValueError("epsilons must be positive and sorted ascending")
    K = kirkwood(rho, a, b)
    Wig = wigner_table(rho, a, b)

    def point(e):
        table = quasi_probability(rho, a, b, GaussianMeter(sigma_q1, float(e)))
        return ScanPoint(
            table,
            corr_q1q2(table),
            corr_p1q2(table),
            float(np.max(np.abs(table.values - Wig))),
            float(np.max(np.abs(table.values - K))),
        )

    return list(map_fn(point, eps))
