"""Dense Hermitian-operator algebra on the 2**N spin-1/2 Hilbert space.

Everything is stored as a dense complex matrix: the desk-scale targets
(N <= 12, d <= 4096) keep full eigendecompositions cheap, so no sparse or
iterative machinery is used anywhere.  hbar = 1 throughout and the Ising
coupling J sets the energy unit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-12
ORTHONORMALITY_TOL = 1e-12
RECONSTRUCTION_RTOL = 1e-10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def hs_inner(a, b):
    """Hilbert-Schmidt inner product Tr(A^dag B) of two equal-shape matrices."""
    return complex(np.vdot(a, b))


def hs_norm(a):
    """Hilbert-Schmidt (Frobenius) norm of a matrix."""
    return float(np.linalg.norm(a))


def _as_complex_matrix(mat):
    arr = np.asarray(mat, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    return arr


def hermiticity_defect(mat):
    """Largest entrywise deviation |A - A^dag|."""
    return float(np.abs(mat - mat.conj().T).max())


@dataclass(frozen=True)
class HermitianOperator:
    """Hermitian operator on the 2**n_sites dimensional spin Hilbert space."""

    n_sites: int
    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _as_complex_matrix(self.mat))
        if self.n_sites < 1:
            raise ValueError("n_sites must be a positive integer")
        if self.mat.shape[0] != 2**self.n_sites:
            raise ValueError(
                f"dimension {self.mat.shape[0]} != 2**{self.n_sites}"
            )
        defect = hermiticity_defect(self.mat)
        if defect > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")

    @property
    def dim(self):
        return self.mat.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace operator."""

    mat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mat", _as_complex_matrix(self.mat))
        defect = hermiticity_defect(self.mat)
        if defect > HERMITICITY_TOL:
            raise ValueError(f"density matrix not Hermitian (defect {defect:.3e})")
        tr = complex(np.trace(self.mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} differs from 1 beyond tolerance")
        evals = np.linalg.eigvalsh(self.mat)
        if evals.min() < EIGENVALUE_FLOOR:
            raise ValueError(f"negative eigenvalue {evals.min():.3e}")
        pur = float(np.sum(evals**2))
        if not 0.0 < pur <= 1.0 + TRACE_TOL:
            raise ValueError(f"purity {pur} outside (0, 1]")

    @property
    def dim(self):
        return self.mat.shape[0]

    @property
    def purity(self):
        """Tr(rho^2)."""
        return float(np.real(hs_inner(self.mat, self.mat)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "eigenvalues", np.asarray(self.eigenvalues, dtype=float)
        )
        object.__setattr__(
            self, "eigenvectors", _as_complex_matrix(self.eigenvectors)
        )
        if np.any(np.diff(self.eigenvalues) < 0):
            raise ValueError("eigenvalues must be ascending")
        u = self.eigenvectors
        gram_defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
        if gram_defect > ORTHONORMALITY_TOL:
            raise ValueError(f"eigenvectors not orthonormal (defect {gram_defect:.3e})")

    @property
    def dim(self):
        return self.eigenvectors.shape[0]


def build_pauli_string(n_sites, factors):
    """Tensor product of single-site Pauli matrices, identity elsewhere.

    ``factors`` is a list of (site, axis) pairs with 1-based site indices and
    axis in {'X', 'Y', 'Z'}.  Site 1 is the leftmost tensor factor.
    """
    if n_sites < 1:
        raise ValueError("n_sites must be positive")
    axes = {}
    for site, axis in factors:
        if not 1 <= site <= n_sites:
            raise ValueError(f"site index {site} outside [1, {n_sites}]")
        if site in axes:
            raise ValueError(f"duplicate site index {site}")
        axis = str(axis).upper()
        if axis not in ("X", "Y", "Z"):
            raise ValueError(f"unknown Pauli axis {axis!r}")
        axes[site] = axis
    out = np.array([[1.0 + 0.0j]])
    for site in range(1, n_sites + 1):
        out = np.kron(out, PAULI[axes.get(site, "I")])
    return HermitianOperator(n_sites=n_sites, mat=out)


def eigh(op: HermitianOperator, validate=True) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    With ``validate`` the reconstruction ||H - U diag(E) U^dag|| is checked
    against RECONSTRUCTION_RTOL * ||H||; eigensolver failures propagate as
    numpy.linalg.LinAlgError.
    """
    evals, evecs = np.linalg.eigh(op.mat)
    dec = SpectralDecomposition(eigenvalues=evals, eigenvectors=evecs)
    if validate:
        rebuilt = (evecs * evals) @ evecs.conj().T
        err = hs_norm(op.mat - rebuilt)
        scale = max(hs_norm(op.mat), 1e-300)
        if err > RECONSTRUCTION_RTOL * scale:
            raise ValueError(f"eigh reconstruction error {err:.3e} too large")
    return dec


def hs_fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Hilbert-Schmidt fidelity (Tr rho sigma)^2 / (Tr rho^2 Tr sigma^2).

    Symmetric in its arguments, in [0, 1], and equal to 1 iff rho == sigma.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    overlap = float(np.real(hs_inner(rho.mat, sigma.mat)))
    value = overlap**2 / (rho.purity * sigma.purity)
    return float(min(max(value, 0.0), 1.0))


def hs_angle(rho0: DensityMatrix, rho: DensityMatrix) -> float:
    """Hilbert-Schmidt angle arccos sqrt(F[rho0, rho]) in [0, pi/2]."""
    return float(math.acos(math.sqrt(hs_fidelity(rho0, rho))))


def commutator_hs_norm(a: HermitianOperator, b: HermitianOperator) -> float:
    """||[A, B]||_HS for Hermitian A, B via 2 Tr(A^2 B^2) - 2 Tr(ABAB)."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch {a.dim} vs {b.dim}")
    ab = a.mat @ b.mat
    # Tr(A^2 B^2) = Tr((AB)(AB)^dag) and Tr(ABAB) = Tr((AB)^2) for Hermitian A, B.
    t1 = float(np.real(hs_inner(ab, ab)))
    t2 = float(np.real(np.sum(ab.T * ab)))
    return math.sqrt(max(2.0 * t1 - 2.0 * t2, 0.0))


def real_if_exactly_real(mat):
    """Float64 copy of a complex matrix whose imaginary part is exactly zero.

    The chain Hamiltonians here are real symmetric, and LAPACK's real-symmetric
    eigensolver is several times faster than the Hermitian one, so hot paths
    shed the complex dtype when nothing is lost.
    """
    arr = np.asarray(mat)
    if np.iscomplexobj(arr) and not np.any(arr.imag):
        return np.ascontiguousarray(arr.real)
    return arr


def degeneracy_tolerance(eigenvalues) -> float:
    """Spectrum-relative tolerance below which eigenvalues count as degenerate.

    The chains studied here have H0 spectra that are exact small integers
    times J (plus B), so genuine degeneracies sit far below this threshold
    while numerical splitting sits far under it.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    span = float(ev.max() - ev.min()) if ev.size else 0.0
    return 1e-9 * span


def degenerate_blocks(eigenvalues, tol=None):
    """Group ascending eigenvalues into blocks of equal values within tol.

    Returns a list of ``slice`` objects covering the index range.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    if tol is None:
        tol = degeneracy_tolerance(ev)
    blocks = []
    start = 0
    for i in range(1, ev.size):
        if ev[i] - ev[i - 1] > tol:
            blocks.append(slice(start, i))
            start = i
    blocks.append(slice(start, ev.size))
    return blocks
