"""Dense complex-matrix foundation: observables, density matrices and bases.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Observables are
carried around as :class:`SpectralDecomposition` objects, which keep the
distinct eigenvalues in descending order together with their eigenprojectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidState, NotHermitian

HERMITIAN_TOL = 1e-10
STATE_TOL = 1e-10
DEFAULT_GROUP_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a square, finite complex128 array."""
    arr = np.array(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m))))


def ket_projector(v) -> np.ndarray:
    """|v><v| for a normalized copy of ``v``."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (descending) and their orthogonal eigenprojectors.

    ``projectors`` has shape ``(k, d, d)`` where ``k`` is the number of
    distinct eigenvalues.
    """

    eigenvalues: np.ndarray
    projectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float)
        projs = np.asarray(self.projectors, dtype=complex)
        if projs.ndim != 3 or projs.shape[1] != projs.shape[2]:
            raise DimensionMismatch(f"projectors must have shape (k, d, d), got {projs.shape}")
        if vals.shape != (projs.shape[0],):
            raise DimensionMismatch("one eigenvalue per projector required")
        if np.any(np.diff(vals) >= 0):
            raise ValueError("eigenvalues must be distinct and sorted in descending order")
        vals.setflags(write=False)
        projs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "projectors", projs)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def size(self) -> int:
        return self.projectors.shape[0]

    @property
    def ranks(self) -> np.ndarray:
        return np.rint(np.einsum("kii->k", self.projectors).real).astype(int)

    @property
    def is_nondegenerate(self) -> bool:
        return self.size == self.dim

    @property
    def matrix(self) -> np.ndarray:
        return np.einsum("k,kij->ij", self.eigenvalues, self.projectors)

    def eigenvectors(self) -> np.ndarray:
        """Rows are unit eigenvectors of a nondegenerate observable.

        Phases follow the projector columns, so prefer the basis the
        observable was built from when phases matter.
        """
        if not self.is_nondegenerate:
            raise ValueError("eigenvectors are only defined for nondegenerate observables")
        vecs = []
        for p in self.projectors:
            j = int(np.argmax(np.abs(np.diag(p))))
            col = p[:, j]
            vecs.append(col / np.linalg.norm(col))
        return np.array(vecs)

    def check(self, tol: float = HERMITIAN_TOL) -> dict:
        """Max violations of the projector invariants."""
        P = self.projectors
        eye = np.eye(self.dim)
        prods = np.einsum("aij,bjk->abik", P, P)
        off = prods.copy()
        off[np.arange(self.size), np.arange(self.size)] = 0
        return {
            "idempotence": float(np.max(np.abs(prods[np.arange(self.size), np.arange(self.size)] - P))),
            "hermiticity": float(np.max(np.abs(P - dagger(P)))),
            "orthogonality": float(np.max(np.abs(off))) if self.size > 1 else 0.0,
            "completeness": float(np.max(np.abs(P.sum(axis=0) - eye))),
        }


def spectral_decompose(h, group_tol: float = DEFAULT_GROUP_TOL) -> SpectralDecomposition:
    """Group the spectrum of a Hermitian matrix into distinct eigenvalues.

    Eigenvalues closer than ``group_tol`` times the spectral scale (the larger
    of the range and the largest magnitude) are merged; the merged eigenvalue
    is their mean and the projector is the sum.
    """
    h = as_matrix(h)
    if group_tol <= 0:
        raise ValueError("group_tol must be positive")
    if hermiticity_error(h) > HERMITIAN_TOL:
        raise NotHermitian(f"matrix is not Hermitian (max |H - H^dag| = {hermiticity_error(h):.3e})")
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    w, v = w[order], v[:, order]

    scale = max(w[0] - w[-1], np.max(np.abs(w)))
    tol = group_tol * scale
    groups = [[0]]
    for i in range(1, len(w)):
        if scale == 0 or w[groups[-1][-1]] - w[i] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])

    vals = np.array([w[g].mean() for g in groups])
    projs = np.array([v[:, g] @ v[:, g].conj().T for g in groups])
    return SpectralDecomposition(vals, projs)


def projector_observable(p) -> SpectralDecomposition:
    """The binary observable of a projector: eigenvalue 1 on P, 0 on I - P."""
    p = as_matrix(p)
    check_projector(p)
    return SpectralDecomposition(np.array([1.0, 0.0]), np.array([p, np.eye(len(p)) - p]))


def check_projector(p: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if hermiticity_error(p) > tol:
        raise NotHermitian("projector is not Hermitian")
    if np.max(np.abs(p @ p - p)) > 1e2 * tol:
        raise ValueError("matrix is not idempotent")


def validate_density(m) -> np.ndarray:
    """Return ``m`` as a density matrix or raise :class:`InvalidState`."""
    try:
        rho = np.array(m, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidState("shape", f"not a complex matrix: {exc}") from exc
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
        raise InvalidState("shape", f"density matrix must be square, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidState("finite")
    herm = hermiticity_error(rho)
    if herm > STATE_TOL:
        raise InvalidState("hermiticity", f"max |rho - rho^dag| = {herm:.3e}")
    tr = np.trace(rho)
    if abs(tr - 1) > STATE_TOL:
        raise InvalidState("trace", f"trace = {tr:.12g}")
    lam = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if lam[0] < -STATE_TOL:
        raise InvalidState("negativity", f"smallest eigenvalue {lam[0]:.3e}")
    return rho


def random_density(d: int, seed: int) -> np.ndarray:
    """Random full-rank state G G^dag / Tr(G G^dag) with complex Gaussian G."""
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_hermitian(d: int, seed: int, scale: float = 1.0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(d: int, seed: int) -> np.ndarray:
    """Haar unitary via QR with the phase correction of Mezzadri."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal basis; ``vectors[k]`` is the k-th ket with a fixed phase."""

    vectors: np.ndarray
    name: str = field(default="", compare=False)

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=complex)
        if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
            raise DimensionMismatch(f"need d vectors of length d, got shape {vecs.shape}")
        gram = vecs.conj() @ vecs.T
        if np.max(np.abs(gram - np.eye(len(vecs)))) > HERMITIAN_TOL:
            raise ValueError("basis vectors are not orthonormal")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def projectors(self) -> np.ndarray:
        return np.einsum("ki,kj->kij", self.vectors, self.vectors.conj())

    def observable(self, eigenvalues=None) -> SpectralDecomposition:
        """Nondegenerate observable diagonal in this basis.

        The default eigenvalues ``d-1, ..., 0`` keep index k of the basis at
        index k of the decomposition.
        """
        if eigenvalues is None:
            eigenvalues = np.arange(self.dim - 1, -1, -1, dtype=float)
        vals = np.asarray(eigenvalues, dtype=float)
        if vals.shape != (self.dim,):
            raise DimensionMismatch("one eigenvalue per basis vector required")
        if len(np.unique(vals)) != self.dim:
            raise ValueError("eigenvalues must be distinct for a basis observable")
        order = np.argsort(-vals, kind="stable")
        return SpectralDecomposition(vals[order], self.projectors()[order])

    def overlaps(self, other: "OrthonormalBasis") -> np.ndarray:
        """``out[mu, n] = <other_mu | self_n>``."""
        if other.dim != self.dim:
            raise DimensionMismatch("bases live in different dimensions")
        return other.vectors.conj() @ self.vectors.T


def computational_basis(d: int) -> OrthonormalBasis:
    return OrthonormalBasis(np.eye(d, dtype=complex), name="computational")


def fourier_basis(d: int) -> OrthonormalBasis:
    """Discrete Fourier basis, ``<n|b_mu> = exp(2 pi i n mu / d) / sqrt(d)``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    n = np.arange(d)
    vecs = np.exp(2j * np.pi * np.outer(n, n) / d) / np.sqrt(d)
    return OrthonormalBasis(vecs, name="fourier")


@dataclass(frozen=True)
class ComplementarityReport:
    ok: bool
    degenerate_a: bool
    degenerate_b: bool
    zero_overlaps: list
    shared_eigenvectors: list

    def __bool__(self):
        return self.ok


def check_complementary(a: SpectralDecomposition, b: SpectralDecomposition,
                        overlap_min: float = 1e-8) -> ComplementarityReport:
    """Both nondegenerate with every eigenvector overlap nonzero.

    Offending pairs are listed as ``(n, m)`` index pairs into ``a`` and ``b``.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimensions differ: {a.dim} vs {b.dim}")
    # |<b_m|a_n>|^2 = Tr(P_bm P_an) for rank-1 projectors
    ov2 = np.einsum("nij,mji->nm", a.projectors, b.projectors).real
    ov = np.sqrt(np.clip(ov2, 0, None))
    zero = [(int(n), int(m)) for n, m in zip(*np.nonzero(ov <= overlap_min))]
    shared = [(int(n), int(m)) for n, m in zip(*np.nonzero(np.abs(ov - 1) <= 1e-8))]
    deg_a, deg_b = not a.is_nondegenerate, not b.is_nondegenerate
    ok = not (deg_a or deg_b or zero or shared)
    return ComplementarityReport(ok, deg_a, deg_b, zero, shared)


def pauli(name: str) -> SpectralDecomposition:
    mats = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
    return spectral_decompose(mats[name.lower().removeprefix("pauli-")])


def check_same_dim(*items) -> int:
    dims = set()
    for it in items:
        dims.add(it.dim if hasattr(it, "dim") else np.shape(it)[-1])
    if len(dims) != 1:
        raise DimensionMismatch(f"dimensions differ: {sorted(dims)}")
    return dims.pop()
