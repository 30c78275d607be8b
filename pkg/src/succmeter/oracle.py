"""Grid simulation of the pointers, used to check the closed-form results.

Each pointer is a wavefunction sampled on a uniform periodic grid. The kick
exp(-i eps a_n P) acts on the a_n eigenspace as a rigid shift, so each branch
carries the Gaussian evaluated at Q - eps a_n. Pointer statistics come from
quadrature over these branches; momentum is applied in Fourier space. Nothing
here uses the analytic decoherence factors.

Mixed system states are split into eigencomponents; branch vectors
v_k[n, m] = P_{b_m} P_{a_n} |psi_k> are kept per component and combined with
the component weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import GridTooSmall
from .operators import (
    SpectralDecomposition,
    as_matrix,
    check_same_dim,
    pauli,
    projector_observable,
    random_density,
)
from .single import GaussianMeter, pointer_density, reduced_state_after
from .successive import corr_p1q2, corr_q1q2, quasi_probability

DEFAULT_POINTS = 1024
EXTENT_FACTOR = 8.0


@dataclass(frozen=True)
class MeterGrid:
    """Uniform periodic grid of ``n_points`` on [-extent, extent)."""

    n_points: int
    extent: float

    def __post_init__(self):
        if self.n_points < 8 or self.n_points & (self.n_points - 1):
            raise ValueError("n_points must be a power of two >= 8")
        if self.extent <= 0:
            raise ValueError("extent must be positive")

    @property
    def spacing(self) -> float:
        return 2 * self.extent / self.n_points

    @property
    def q(self) -> np.ndarray:
        return -self.extent + self.spacing * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @classmethod
    def for_meter(cls, meter: GaussianMeter, eigenvalues, n_points: int = DEFAULT_POINTS):
        amax = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
        return cls(n_points, EXTENT_FACTOR * (meter.sigma_q + meter.epsilon * amax))

    def refined(self) -> "MeterGrid":
        return MeterGrid(2 * self.n_points, self.extent)

    def validate(self, meter: GaussianMeter, eigenvalues) -> None:
        amax = float(np.max(np.abs(eigenvalues))) if len(eigenvalues) else 0.0
        need = EXTENT_FACTOR * (meter.sigma_q + meter.epsilon * amax)
        if self.extent < need * (1 - 1e-12):
            raise GridTooSmall(f"extent {self.extent:g} < required {need:g}")
        if self.spacing > meter.sigma_q:
            raise GridTooSmall(f"spacing {self.spacing:g} does not resolve sigma_q = {meter.sigma_q:g}")

    def momentum(self, psi: np.ndarray) -> np.ndarray:
        """P psi = -i d psi/dQ, spectrally, along the last axis."""
        return np.fft.ifft(self.k * np.fft.fft(psi, axis=-1), axis=-1)

    def integrate(self, f: np.ndarray) -> np.ndarray:
        return trapezoid(f, dx=self.spacing, axis=-1)


@dataclass(frozen=True)
class BranchState:
    """System branches and displaced pointer wavefunctions after the kicks.

    ``vectors[k, n, m]`` is P_{b_m} P_{a_n} |psi_k>; ``psi1[n]`` is pointer 1
    shifted by eps1 a_n. With a single measurement the B axis has length one
    and ``psi2`` is None.
    """

    weights: np.ndarray
    vectors: np.ndarray
    psi1: np.ndarray
    grid1: MeterGrid
    psi2: np.ndarray | None = None
    grid2: MeterGrid | None = None

    @property
    def n_branches(self) -> int:
        """Number of index combinations (n, n', m, m') carried by the state."""
        ka, kb = self.vectors.shape[1:3]
        return (ka * kb) ** 2

    def system_overlaps(self) -> np.ndarray:
        """S[n, n', m, m'] = Tr_s(P_m P_n rho P_n' P_m')."""
        v = self.vectors
        return np.einsum("k,knmi,kpqi->npmq", self.weights, v, v.conj())


def _pure_components(rho, cutoff: float = 1e-15):
    lam, vec = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    keep = lam > cutoff
    return lam[keep], vec[:, keep].T


def _shifted(meter: GaussianMeter, grid: MeterGrid, eigenvalues) -> np.ndarray:
    centers = meter.epsilon * np.asarray(eigenvalues, dtype=float)
    return meter.wavefunction(grid.q[None, :], centers[:, None]).astype(complex)


def evolve_single(rho, a: SpectralDecomposition, meter: GaussianMeter,
                  grid: MeterGrid | None = None, n_points: int = DEFAULT_POINTS) -> BranchState:
    rho = as_matrix(rho)
    check_same_dim(rho, a)
    grid = grid or MeterGrid.for_meter(meter, a.eigenvalues, n_points)
    grid.validate(meter, a.eigenvalues)
    w, psis = _pure_components(rho)
    vecs = np.einsum("nij,kj->kni", a.projectors, psis)[:, :, None, :]
    return BranchState(w, vecs, _shifted(meter, grid, a.eigenvalues), grid)


def evolve_double(rho, a: SpectralDecomposition, b: SpectralDecomposition,
                  meter1: GaussianMeter, meter2: GaussianMeter, grids=None,
                  n_points: int = DEFAULT_POINTS) -> BranchState:
    rho = as_matrix(rho)
    check_same_dim(rho, a, b)
    if grids is None:
        grids = (MeterGrid.for_meter(meter1, a.eigenvalues, n_points),
                 MeterGrid.for_meter(meter2, b.eigenvalues, n_points))
    g1, g2 = grids
    g1.validate(meter1, a.eigenvalues)
    g2.validate(meter2, b.eigenvalues)
    w, psis = _pure_components(rho)
    vecs = np.einsum("mij,njl,kl->knmi", b.projectors, a.projectors, psis)
    return BranchState(w, vecs, _shifted(meter1, g1, a.eigenvalues), g1,
                       _shifted(meter2, g2, b.eigenvalues), g2)


def _meter_matrix(grid: MeterGrid, psi: np.ndarray, op: np.ndarray | None = None) -> np.ndarray:
    """M[n', n] = <psi_n'| op |psi_n> by quadrature; op acts on the right."""
    rhs = psi if op is None else op
    return grid.integrate(psi.conj()[:, None, :] * rhs[None, :, :])


@dataclass(frozen=True)
class OracleStatistics:
    """Raw (un-normalized) pointer statistics from quadrature."""

    q1: float
    density1: np.ndarray
    reduced_state: np.ndarray
    q1q2: float | None = None
    p1q2: float | None = None
    q2: float | None = None
    density2: np.ndarray | None = None
    norm: float = 1.0


def oracle_statistics(state: BranchState) -> OracleStatistics:
    g1, psi1 = state.grid1, state.psi1
    S = state.system_overlaps()
    I1 = _meter_matrix(g1, psi1)
    Q1 = _meter_matrix(g1, psi1, g1.q * psi1)
    P1 = _meter_matrix(g1, psi1, g1.momentum(psi1))
    if state.psi2 is None:
        I2, Q2 = np.ones((1, 1), dtype=complex), None
    else:
        g2, psi2 = state.grid2, state.psi2
        I2 = _meter_matrix(g2, psi2)
        Q2 = _meter_matrix(g2, psi2, g2.q * psi2)

    # S[n, n', m, m'] pairs with M1[n', n] and M2[m', m]
    def expect(M1, M2):
        return complex(np.einsum("npmq,pn,qm->", S, M1, M2))

    v = state.vectors
    rho_red = np.einsum("k,knmi,kpqj,pn,qm->ij", state.weights, v, v.conj(), I1, I2)
    dens1 = np.einsum("npmq,nx,px,qm->x", S, psi1, psi1.conj(), I2).real
    stats = dict(
        q1=expect(Q1, I2).real,
        density1=dens1,
        reduced_state=rho_red,
        norm=expect(I1, I2).real,
    )
    if Q2 is not None:
        psi2 = state.psi2
        stats.update(
            q1q2=expect(Q1, Q2).real,
            p1q2=expect(P1, Q2).real,
            q2=expect(I1, Q2).real,
            density2=np.einsum("npmq,pn,mx,qx->x", S, I1, psi2, psi2.conj()).real,
        )
    return OracleStatistics(**stats)


def pair_correlations_oracle(rho, pa, pb, meter1: GaussianMeter, meter2: GaussianMeter,
                             n_points: int = DEFAULT_POINTS):
    """Raw (<Q1 Q2>, <P1 Q2>) for a projector pair from the grid simulation."""
    st = evolve_double(rho, projector_observable(pa), projector_observable(pb),
                       meter1, meter2, n_points=n_points)
    out = oracle_statistics(st)
    return out.q1q2, out.p1q2


def _sample_indices(grid: MeterGrid, n: int = 32) -> np.ndarray:
    """n grid indices spread over the central half of the grid."""
    lo, hi = grid.n_points // 4, 3 * grid.n_points // 4
    return np.linspace(lo, hi, n).round().astype(int)


def compare_with_analytic(rho, a: SpectralDecomposition, b: SpectralDecomposition,
                          meter1: GaussianMeter, meter2: GaussianMeter,
                          n_points: int = DEFAULT_POINTS, n_samples: int = 32) -> dict:
    """Per-quantity analytic value, oracle value and absolute difference.

    Correlations are compared in units of eps1 * eps2; pointer densities at
    ``n_samples`` grid points; the system state after both kicks against the
    single-measurement reduction applied for A and then for B.
    """
    rho = as_matrix(rho)
    st = evolve_double(rho, a, b, meter1, meter2, n_points=n_points)
    ora = oracle_statistics(st)
    table = quasi_probability(rho, a, b, meter1)
    scale = meter1.epsilon * meter2.epsilon

    rho_a = reduced_state_after(rho, a, meter1)
    rho_ab = reduced_state_after(rho_a, b, meter2)
    i1, i2 = _sample_indices(st.grid1, n_samples), _sample_indices(st.grid2, n_samples)
    dens1 = pointer_density(rho, a, meter1)(st.grid1.q[i1])
    dens2 = pointer_density(rho_a, b, meter2)(st.grid2.q[i2])

    def entry(analytic, oracle):
        analytic, oracle = np.asarray(analytic), np.asarray(oracle)
        return {
            "analytic": analytic.tolist() if analytic.ndim else float(analytic),
            "oracle": oracle.tolist() if oracle.ndim else float(oracle),
            "abs_diff": float(np.max(np.abs(analytic - oracle))),
        }

    report = {
        "norm": entry(1.0, ora.norm),
        "density1": entry(dens1, ora.density1[i1]),
        "density2": entry(dens2, ora.density2[i2]),
        "reduced_state": {
            "abs_diff": float(np.max(np.abs(rho_ab - ora.reduced_state))),
        },
    }
    if scale > 0:
        report["q1q2"] = entry(corr_q1q2(table), ora.q1q2 / scale)
        report["p1q2"] = entry(corr_p1q2(table), ora.p1q2 / scale)
    report["max_abs_diff"] = max(v["abs_diff"] for v in report.values())
    return report


def refinement_change(rho, a, b, meter1, meter2, n_points: int = DEFAULT_POINTS) -> float:
    """Largest change of any oracle output when the grid density is doubled."""
    coarse = evolve_double(rho, a, b, meter1, meter2, n_points=n_points)
    fine = evolve_double(rho, a, b, meter1, meter2,
                         grids=(coarse.grid1.refined(), coarse.grid2.refined()))
    oc, of = oracle_statistics(coarse), oracle_statistics(fine)
    scale = meter1.epsilon * meter2.epsilon or 1.0
    diffs = [
        abs(oc.q1q2 - of.q1q2) / scale,
        abs(oc.p1q2 - of.p1q2) / scale,
        abs(oc.norm - of.norm),
        np.max(np.abs(oc.reduced_state - of.reduced_state)),
        np.max(np.abs(oc.density1 - of.density1[::2])),
        np.max(np.abs(oc.density2 - of.density2[::2])),
    ]
    return float(max(diffs))


def standard_suite():
    """The twelve fixed comparison instances.

    d in {2, 3} x eps1/sigma_Q1 in {0.1, 1, 5} x {pure, mixed} state, with
    A and B from different eigenbases.
    """
    from .operators import fourier_basis, ket_projector, spectral_decompose

    out = []
    for d in (2, 3):
        if d == 2:
            a, b = pauli("x"), pauli("z")
            pure = ket_projector([1, 1j])
        else:
            a = spectral_decompose(np.diag([1.0, 0.0, -1.0]))
            b = fourier_basis(3).observable([1.0, 0.0, -1.0])
            pure = ket_projector([1, 1j, -0.5])
        mixed = random_density(d, seed=100 + d)
        for strength in (0.1, 1.0, 5.0):
            for label, rho in (("pure", pure), ("mixed", mixed)):
                out.append({
                    "name": f"d{d}-eps{strength:g}-{label}",
                    "rho": rho,
                    "a": a,
                    "b": b,
                    "meter1": GaussianMeter(1.0, strength),
                    "meter2": GaussianMeter(0.7, 1.3),
                })
    return out
