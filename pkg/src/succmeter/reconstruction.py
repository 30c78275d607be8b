"""State retrieval from successive measurements of projector pairs.

For every pair (nu, mu) the first pointer is coupled to P_{a_nu} and the
second to P_{b_mu}. The position-position and momentum-position pointer
correlations give the real and imaginary parts of W11(nu, mu), the
(sigma=1, pi=1) cell of the projector-pair quasi-probability. The full set of
W11 values fixes the initial state whenever the two bases are nondegenerate
and have no vanishing overlaps:

    <a_n|rho|a_n'> = (1 / G_{n'n}) sum_mu W11(n, mu) <b_mu|a_n'> / <b_mu|a_n>

with G = 1 on the diagonal and exp(-eps1^2 / 8 sigma_Q1^2) elsewhere.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, IllConditioned, InvalidState, ZeroOverlap
from .operators import (
    OrthonormalBasis,
    as_matrix,
    check_same_dim,
    dagger,
    hermiticity_error,
    projector_observable,
    validate_density,
)
from .single import GaussianMeter, decoherence_factor
from .successive import corr_p1q2, corr_q1q2, quasi_probability

OVERLAP_MIN = 1e-8
ILL_CONDITIONED = 1e5


@dataclass(frozen=True)
class W11Record:
    nu: int
    mu: int
    value: complex
    epsilon1: float
    sigma_q1: float


def projector_pair_quasiprob(rho, pa, pb, meter1: GaussianMeter) -> np.ndarray:
    """2x2 table ``W[sigma, pi]`` for the binary observables Pb (sigma) and Pa (pi).

    W[sigma, pi] = sum_{pi'} g_{pi pi'} Tr(rho Pa^{pi'} Pb^{sigma} Pa^{pi}),
    with Pa^1 = Pa and Pa^0 = I - Pa. Indices equal the eigenvalues, so
    ``W[1, 1]`` is the cell read out by the pointer correlations.
    """
    table = quasi_probability(rho, projector_observable(pa), projector_observable(pb), meter1)
    # decomposition index 0 holds eigenvalue 1
    return table.values[::-1, ::-1].T.copy()


def w11_from_correlations(q1q2: float, p1q2: float, epsilon1: float, epsilon2: float,
                          sigma_q1: float) -> complex:
    """Assemble W11 from raw <Q1 Q2> and <P1 Q2> of a projector-pair run."""
    if epsilon1 <= 0 or epsilon2 <= 0:
        raise ValueError("both couplings must be positive to read out W11")
    scale = epsilon1 * epsilon2
    return complex(q1q2 / scale, 2 * sigma_q1 ** 2 * p1q2 / scale)


def pair_correlations(rho, pa, pb, meter1: GaussianMeter, meter2: GaussianMeter):
    """Raw (<Q1 Q2>, <P1 Q2>) for the projector pair, from the analytic model."""
    table = quasi_probability(rho, projector_observable(pa), projector_observable(pb), meter1)
    scale = meter1.epsilon * meter2.epsilon
    return scale * corr_q1q2(table), scale * corr_p1q2(table)


def simulate_records(rho, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                     meter1: GaussianMeter, meter2: GaussianMeter,
                     method: str = "analytic", n_points: int = 1024) -> list[W11Record]:
    """W11 for every (nu, mu), read out from simulated pointer correlations.

    ``method="oracle"`` obtains the correlations from the grid simulation of
    the pointers instead of the closed-form expressions.
    """
    rho = as_matrix(rho)
    check_same_dim(rho, basis_a, basis_b)
    if method == "analytic":
        corr = pair_correlations
    elif method == "oracle":
        from .oracle import pair_correlations_oracle

        def corr(r, pa, pb, m1, m2):
            return pair_correlations_oracle(r, pa, pb, m1, m2, n_points=n_points)
    else:
        raise ValueError(f"unknown method {method!r}")

    PA, PB = basis_a.projectors(), basis_b.projectors()
    records = []
    for nu in range(basis_a.dim):
        for mu in range(basis_b.dim):
            q1q2, p1q2 = corr(rho, PA[nu], PB[mu], meter1, meter2)
            w = w11_from_correlations(q1q2, p1q2, meter1.epsilon, meter2.epsilon, meter1.sigma_q)
            records.append(W11Record(nu, mu, w, meter1.epsilon, meter1.sigma_q))
    return records


def g_matrix(d: int, epsilon1: float, sigma_q1: float) -> np.ndarray:
    """G[n, n'] = 1 on the diagonal, exp(-eps1^2 / 8 sigma_Q1^2) off it."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if sigma_q1 <= 0:
        raise ValueError("sigma_q1 must be positive")
    off = float(decoherence_factor(GaussianMeter(sigma_q1, epsilon1), 1.0))
    G = np.full((d, d), off)
    np.fill_diagonal(G, 1.0)
    return G


def records_to_table(records, d: int) -> np.ndarray:
    """W11 as a (d, d) array indexed [nu, mu]; every pair exactly once."""
    table = np.full((d, d), np.nan, dtype=complex)
    for r in records:
        if not (0 <= r.nu < d and 0 <= r.mu < d):
            raise DimensionMismatch(f"record index ({r.nu}, {r.mu}) outside dimension {d}")
        if not np.isnan(table[r.nu, r.mu]):
            raise ValueError(f"duplicate record for pair ({r.nu}, {r.mu})")
        table[r.nu, r.mu] = r.value
    missing = np.argwhere(np.isnan(table))
    if len(missing):
        pairs = [tuple(int(i) for i in p) for p in missing[:5]]
        raise ValueError(f"records must cover all {d * d} pairs; missing e.g. {pairs}")
    return table


def _check_records_meta(records, epsilon1, sigma_q1):
    for r in records:
        if not (np.isclose(r.epsilon1, epsilon1, rtol=1e-12, atol=0)
                and np.isclose(r.sigma_q1, sigma_q1, rtol=1e-12, atol=0)):
            raise ValueError("records were taken with a different first meter")


def overlap_ratios(basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                   overlap_min: float = OVERLAP_MIN) -> np.ndarray:
    """R[mu, n, n'] = <b_mu|a_n'> / <b_mu|a_n>."""
    ov = basis_a.overlaps(basis_b)  # ov[mu, n] = <b_mu|a_n>
    small = np.argwhere(np.abs(ov) <= overlap_min)
    if len(small):
        pairs = [(int(n), int(mu)) for mu, n in small]
        raise ZeroOverlap(f"|<b_mu|a_n>| <= {overlap_min:g} for (n, mu) in {pairs}")
    return ov[:, None, :] / ov[:, :, None]


def _amplification(G: np.ndarray, threshold: float) -> float:
    amp = 1.0 / G[0, 1]
    if amp > threshold:
        warnings.warn(
            f"off-diagonal elements amplified by 1/G = {amp:.3e}; only the diagonal is reliable",
            IllConditioned,
            stacklevel=3,
        )
    return amp


def reconstruct_raw(records, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                    epsilon1: float, sigma_q1: float, overlap_min: float = OVERLAP_MIN,
                    ill_conditioned: float = ILL_CONDITIONED) -> np.ndarray:
    """The retrieval formula applied as is, without symmetrization."""
    d = basis_a.dim
    if basis_b.dim != d:
        raise DimensionMismatch("bases live in different dimensions")
    _check_records_meta(records, epsilon1, sigma_q1)
    W = records_to_table(records, d)
    R = overlap_ratios(basis_a, basis_b, overlap_min)
    G = g_matrix(d, epsilon1, sigma_q1)
    _amplification(G, ill_conditioned)
    # coefficients in the basis a, then back to the computational frame
    coeff = np.einsum("nm,mnk->nk", W, R) / G.T
    A = basis_a.vectors.T  # columns |a_n>
    return A @ coeff @ A.conj().T


def reconstruct_density(records, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                        epsilon1: float, sigma_q1: float, overlap_min: float = OVERLAP_MIN,
                        ill_conditioned: float = ILL_CONDITIONED,
                        strict: bool = True) -> np.ndarray:
    """Density matrix (computational frame) from a complete set of W11 records.

    The result is Hermitized as (R + R^dag) / 2. With ``strict`` it must also
    pass :func:`validate_density`; records that no state reproduces exactly
    (e.g. perturbed ones) need ``strict=False``. Issues an
    :class:`IllConditioned` warning when 1/G exceeds ``ill_conditioned``.
    """
    raw = reconstruct_raw(records, basis_a, basis_b, epsilon1, sigma_q1,
                          overlap_min, ill_conditioned)
    rho = 0.5 * (raw + dagger(raw))
    if strict:
        rho = validate_density(rho)
    return rho


def reconstruction_report(records, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                          epsilon1: float, sigma_q1: float, rho_true=None,
                          overlap_min: float = OVERLAP_MIN,
                          ill_conditioned: float = ILL_CONDITIONED) -> dict:
    """Reconstructed state plus residual and conditioning diagnostics."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IllConditioned)
        raw = reconstruct_raw(records, basis_a, basis_b, epsilon1, sigma_q1,
                              overlap_min, ill_conditioned)
    rho = 0.5 * (raw + dagger(raw))
    G = g_matrix(basis_a.dim, epsilon1, sigma_q1)
    lam = np.linalg.eigvalsh(rho)
    try:
        validate_density(rho)
        physical, violation = True, None
    except InvalidState as exc:
        physical, violation = False, exc.prop
    report = {
        "rho": rho,
        "residuals": {
            "hermiticity_before_symmetrization": hermiticity_error(raw),
            "trace_deviation": float(abs(np.trace(rho) - 1)),
            "min_eigenvalue": float(lam[0]),
            "physical": physical,
            "violation": violation,
        },
        "conditioning": {
            "g_offdiag": float(G[0, 1]),
            "amplification": float(1 / G[0, 1]),
            "threshold": ill_conditioned,
            "ill_conditioned": bool(caught),
            "min_overlap": float(np.min(np.abs(basis_a.overlaps(basis_b)))),
        },
    }
    if rho_true is not None:
        report["residuals"]["max_abs_error"] = float(np.max(np.abs(rho - as_matrix(rho_true))))
    return report


def operator_transform(o, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                       epsilon1: float, sigma_q1: float,
                       overlap_min: float = OVERLAP_MIN) -> np.ndarray:
    """T[n, mu] = sum_{n'} <b_mu|a_n'>/<b_mu|a_n> * <a_n'|O|a_n> / G_{n'n}."""
    o = as_matrix(o)
    check_same_dim(o, basis_a, basis_b)
    A = basis_a.vectors.T
    o_a = A.conj().T @ o @ A  # o_a[n', n] = <a_n'|O|a_n>
    R = overlap_ratios(basis_a, basis_b, overlap_min)
    G = g_matrix(basis_a.dim, epsilon1, sigma_q1)
    return np.einsum("mnk,kn->nm", R, o_a / G)


def transform_sum(o, records, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis,
                  epsilon1: float, sigma_q1: float, overlap_min: float = OVERLAP_MIN) -> complex:
    """sum_{n mu} W11(n, mu) T[n, mu], before taking the real part."""
    if hermiticity_error(as_matrix(o)) > 1e-10:
        from .errors import NotHermitian
        raise NotHermitian("observable is not Hermitian")
    _check_records_meta(records, epsilon1, sigma_q1)
    W = records_to_table(records, basis_a.dim)
    T = operator_transform(o, basis_a, basis_b, epsilon1, sigma_q1, overlap_min)
    return complex(np.sum(W * T))


def operator_transform_expectation(o, records, basis_a: OrthonormalBasis,
                                   basis_b: OrthonormalBasis, epsilon1: float,
                                   sigma_q1: float, overlap_min: float = OVERLAP_MIN) -> float:
    """Tr(rho O) evaluated directly from the W11 records."""
    return transform_sum(o, records, basis_a, basis_b, epsilon1, sigma_q1, overlap_min).real
