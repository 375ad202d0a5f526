"""Driven spin-1/2 chain models with periodic boundary conditions.

Three drives share the classical Ising part H0 = -J sum_j Z_j Z_{j+1}
(plus +B sum_j Z_j for the mixed-field chain):

* ``tfic``  transverse-field Ising chain,   V = -J sum_j X_j
* ``qxyc``  quantum XY chain,               V = -J sum_j (X_j X_{j+1} - Z_j Z_{j+1})
* ``mfic``  mixed-field Ising chain,        V = -J sum_j X_j

and the driven Hamiltonian is H_lambda = H0 + lambda * V.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import HermitianOperator, build_pauli_string

KINDS = ("tfic", "qxyc", "mfic")


@dataclass(frozen=True)
class SpinChainModel:
    """Model selector: kind in {'tfic', 'qxyc', 'mfic'}, ring size, couplings.

    B is the longitudinal field of the mixed-field chain and is ignored for
    the other two kinds.  The B not-in {0, +-2J} restriction is enforced only
    at the closed-form boundary, where those values make transfer-matrix
    denominators vanish; exact diagonalization itself is fine at any B.
    """

    kind: str
    n_sites: int
    J: float = 1.0
    B: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", str(self.kind).lower())
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n_sites < 2:
            raise ValueError("n_sites must be >= 2")
        if not self.J > 0:
            raise ValueError("coupling J must be positive")
        if self.kind == "mfic":
            if self.B is None:
                raise ValueError("mfic requires a longitudinal field B")
        elif self.B is not None:
            object.__setattr__(self, "B", None)

    @property
    def dim(self):
        return 2**self.n_sites


def classical_energies(model: SpinChainModel) -> np.ndarray:
    """Diagonal of H0 in the computational Z-product basis.

    Basis index bit k (from the most significant bit) is site k+1, matching
    the tensor order of build_pauli_string; spin values are s = +1 for bit 0
    and s = -1 for bit 1.
    """
    n = model.n_sites
    idx = np.arange(model.dim, dtype=np.int64)
    spins = np.empty((model.dim, n), dtype=np.int64)
    for site in range(n):
        bit = (idx >> (n - 1 - site)) & 1
        spins[:, site] = 1 - 2 * bit
    bonds = np.sum(spins * np.roll(spins, -1, axis=1), axis=1)
    energies = -model.J * bonds.astype(float)
    if model.kind == "mfic":
        energies = energies + model.B * np.sum(spins, axis=1)
    return energies


def build_h0(model: SpinChainModel) -> HermitianOperator:
    """Initial Hamiltonian, diagonal in the computational basis (exactly)."""
    return HermitianOperator(
        n_sites=model.n_sites, mat=np.diag(classical_energies(model).astype(complex))
    )


def build_v(model: SpinChainModel) -> HermitianOperator:
    """Driving term; Hermitian and traceless for all three kinds."""
    n = model.n_sites
    total = np.zeros((model.dim, model.dim), dtype=complex)
    if model.kind in ("tfic", "mfic"):
        for j in range(1, n + 1):
            total -= model.J * build_pauli_string(n, [(j, "X")]).mat
    else:
        for j in range(1, n + 1):
            k = j % n + 1
            total -= model.J * build_pauli_string(n, [(j, "X"), (k, "X")]).mat
            total += model.J * build_pauli_string(n, [(j, "Z"), (k, "Z")]).mat
    return HermitianOperator(n_sites=n, mat=total)


def hamiltonian_at(model: SpinChainModel, lam: float) -> HermitianOperator:
    """Interpolating Hamiltonian H0 + lambda * V."""
    h0 = build_h0(model)
    v = build_v(model)
    return HermitianOperator(n_sites=model.n_sites, mat=h0.mat + lam * v.mat)


def translation_operator(n_sites) -> np.ndarray:
    """Cyclic one-site shift |s_1 ... s_N> -> |s_N s_1 ... s_{N-1}>."""
    dim = 2**n_sites
    perm = np.empty(dim, dtype=np.int64)
    for idx in range(dim):
        low = idx & 1
        perm[idx] = (idx >> 1) | (low << (n_sites - 1))
    op = np.zeros((dim, dim), dtype=complex)
    op[perm, np.arange(dim)] = 1.0
    return op
