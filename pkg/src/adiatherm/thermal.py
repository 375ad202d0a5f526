"""Thermal-state machinery: Gibbs and quasi-Gibbs states, escort state,
adiabatic continuation of the initial eigenbasis, thermal-state overlap.

The quasi-Gibbs target keeps the initial Boltzmann weights while its
eigenvectors follow the instantaneous eigenbasis of H_lambda.  Labels are
transported step by step with a greedy maximal-overlap match; level
crossings therefore trigger a ContinuationWarning instead of failing
silently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import match_columns
from .models import SpinChainModel, build_h0, build_v
from .operators import (
    DensityMatrix,
    SpectralDecomposition,
    degeneracy_tolerance,
    degenerate_blocks,
    hs_fidelity,
    hs_norm,
    eigh,
    real_if_exactly_real,
)

# Above this, all excited Boltzmann weights underflow to exact zero, so the
# ground-projector limit is returned explicitly.
_BETA_SPAN_CAP = 700.0

AMBIGUITY_TOL = 1e-6
CONTINUATION_STABILITY_TOL = 1e-8
_MAX_DOUBLINGS = 6


class ContinuationWarning(UserWarning):
    """Ambiguous eigenvector matching during eigenbasis continuation."""


def boltzmann_weights(energies, beta) -> np.ndarray:
    """Normalized Gibbs weights exp(-beta(E - E_min)) / Z, overflow-safe.

    beta may be 0 (uniform weights) but not negative.  For
    beta > 700 / spectral-span the exact ground-multiplet projector weights
    are returned instead of underflowed exponentials.
    """
    if not math.isfinite(beta) or beta < 0:
        raise ValueError(f"inverse temperature must be finite and >= 0, got {beta}")
    e = np.asarray(energies, dtype=float)
    shifted = e - e.min()
    span = float(shifted.max())
    if span > 0 and beta > _BETA_SPAN_CAP / span:
        w = (shifted <= degeneracy_tolerance(e)).astype(float)
    else:
        w = np.exp(-beta * shifted)
    return w / w.sum()


def _hermitize(mat):
    return 0.5 * (mat + mat.conj().T)


def gibbs_state(h0_spec: SpectralDecomposition, beta) -> DensityMatrix:
    """Gibbs state sum_n e^{-beta E_n} |n><n| / Z0 of a diagonalized H0."""
    p = boltzmann_weights(h0_spec.eigenvalues, beta)
    u = h0_spec.eigenvectors
    return DensityMatrix(mat=_hermitize((u * p) @ u.conj().T))


def escort_state(rho: DensityMatrix) -> DensityMatrix:
    """Order-2 escort state rho^2 / Tr(rho^2); maps Gibbs(beta) to Gibbs(2 beta)."""
    sq = rho.mat @ rho.mat
    return DensityMatrix(mat=_hermitize(sq / np.real(np.trace(sq))))


@dataclass(frozen=True)
class LabeledEigenbasis:
    """Instantaneous eigenvectors of H_lambda labeled by their lambda=0 energies."""

    lam: float
    vectors: np.ndarray
    origin_energies: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vectors", np.asarray(self.vectors, dtype=complex))
        object.__setattr__(
            self, "origin_energies", np.asarray(self.origin_energies, dtype=float)
        )
        u = self.vectors
        defect = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
        if defect > 1e-10:
            raise ValueError(f"basis columns not orthonormal (defect {defect:.3e})")

    @property
    def dim(self):
        return self.vectors.shape[0]


class EigenbasisContinuation:
    """Marches the labeled eigenbasis of H_lambda along a lambda path.

    At lambda = 0 every degenerate H0 eigenspace is rotated to diagonalize
    the projected drive P V P (first-order degenerate perturbation theory),
    which fixes the basis the non-degenerate perturbative formulas assume.
    Each advance() matches fresh eigenvectors to the previous labels by
    greedy maximal overlap and fixes phases so successive overlaps are real
    positive.
    """

    def __init__(self, model: SpinChainModel):
        self.model = model
        self._h0 = real_if_exactly_real(build_h0(model).mat)
        self._v = real_if_exactly_real(build_v(model).mat)
        evals, evecs = np.linalg.eigh(self._h0)
        tol = degeneracy_tolerance(evals)
        for block in degenerate_blocks(evals, tol):
            if block.stop - block.start > 1:
                ub = evecs[:, block]
                proj = _hermitize(ub.conj().T @ self._v @ ub)
                _, w = np.linalg.eigh(proj)
                evecs[:, block] = ub @ w
        self.lam = 0.0
        self.vectors = evecs
        self.origin_energies = evals.copy()
        self.ambiguous_steps = []

    def advance(self, lam: float) -> None:
        """Step the labeled basis to the eigenbasis of H at the given lambda."""
        _, fresh = np.linalg.eigh(self._h0 + lam * self._v)
        overlap = fresh.conj().T @ self.vectors
        perm, n_ambiguous = match_columns(np.abs(overlap), AMBIGUITY_TOL)
        if n_ambiguous:
            # every step is recorded; the warning fires once per continuation
            # to keep long sweeps through persistent degeneracies readable
            if not self.ambiguous_steps:
                warnings.warn(
                    f"{n_ambiguous} ambiguous eigenvector match(es) at "
                    f"lambda={lam:.6g}; resolved by the greedy rule "
                    "(further steps recorded on ambiguous_steps)",
                    ContinuationWarning,
                    stacklevel=2,
                )
            self.ambiguous_steps.append((lam, n_ambiguous))
        cols = fresh[:, perm]
        raw = overlap[perm, np.arange(overlap.shape[0])]
        mag = np.abs(raw)
        phase = np.where(mag > 0, raw / np.where(mag > 0, mag, 1.0), 1.0)
        self.vectors = cols * phase[None, :]
        self.lam = lam

    def basis(self) -> LabeledEigenbasis:
        return LabeledEigenbasis(
            lam=self.lam,
            vectors=self.vectors.copy(),
            origin_energies=self.origin_energies.copy(),
        )


def default_continuation_steps(lambda_target) -> int:
    return max(50, int(math.ceil(2000.0 * abs(lambda_target))))


def continued_eigenbasis(
    model: SpinChainModel, lambda_target: float, n_steps: int
) -> LabeledEigenbasis:
    """Transport the H0 eigenbasis to lambda_target in n_steps increments.

    Negative targets are allowed (used by symmetric finite differences of the
    overlap); the path is still a straight march from 0.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    cont = EigenbasisContinuation(model)
    if lambda_target != 0.0:
        for lam in np.linspace(0.0, lambda_target, n_steps + 1)[1:]:
            cont.advance(float(lam))
    return cont.basis()


def quasi_gibbs_mat(basis: LabeledEigenbasis, beta) -> np.ndarray:
    """Raw matrix of the quasi-Gibbs state (no DensityMatrix validation)."""
    p = boltzmann_weights(basis.origin_energies, beta)
    u = basis.vectors
    return _hermitize((u * p) @ u.conj().T)


def quasi_gibbs(basis: LabeledEigenbasis, beta) -> DensityMatrix:
    """Quasi-Gibbs state: initial Boltzmann weights on the transported basis.

    Its purity equals the initial Gibbs purity because the weights never
    change along the continuation.
    """
    return DensityMatrix(mat=quasi_gibbs_mat(basis, beta))


def quasi_gibbs_at(
    model: SpinChainModel, beta, lam, n_steps: int | None = None
) -> DensityMatrix:
    """Quasi-Gibbs state at lambda, with step-doubling when n_steps is None.

    The step count starts at max(50, ceil(2000 |lambda|)) and doubles until
    the state is stable to 1e-8 in Hilbert-Schmidt norm.
    """
    if n_steps is not None:
        return quasi_gibbs(continued_eigenbasis(model, lam, n_steps), beta)
    steps = default_continuation_steps(lam)
    current = quasi_gibbs_mat(continued_eigenbasis(model, lam, steps), beta)
    for _ in range(_MAX_DOUBLINGS):
        steps *= 2
        finer = quasi_gibbs_mat(continued_eigenbasis(model, lam, steps), beta)
        if hs_norm(finer - current) <= CONTINUATION_STABILITY_TOL:
            return DensityMatrix(mat=finer)
        current = finer
    raise RuntimeError(
        f"quasi-Gibbs state did not stabilize to {CONTINUATION_STABILITY_TOL} "
        f"after {_MAX_DOUBLINGS} step doublings (lambda={lam}, beta={beta})"
    )


def thermal_overlap(model: SpinChainModel, beta, lam, n_steps: int | None = None) -> float:
    """Hilbert-Schmidt fidelity between Gibbs(beta) and the quasi-Gibbs target."""
    rho0 = gibbs_state(eigh(build_h0(model)), beta)
    sigma = quasi_gibbs_at(model, beta, lam, n_steps)
    return hs_fidelity(rho0, sigma)
