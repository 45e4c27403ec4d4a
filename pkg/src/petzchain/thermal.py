"""Gibbs states, von Neumann entropies, and conditional mutual information.

All entropies and the CMI are reported in bits (log base 2), so that the
recovery bound 2^{-I/2} and the operator-norm bound use one consistent base.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import DensityMatrix, Partition, partial_trace_matrix
from .linops import SUPPORT_CUTOFF, Spectrum, eigh

LN2 = np.log(2.0)


class NormalizationError(ValueError):
    """Trace deviates from 1 beyond tolerance."""


@dataclass(frozen=True)
class GibbsSpec:
    """Hamiltonian plus inverse temperature beta >= 0 (finite)."""

    hamiltonian: np.ndarray
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")


def gibbs_from_spectrum(spectrum: Spectrum, beta: float,
                        partition: Partition) -> DensityMatrix:
    """exp(-beta (H - E0)) / Z from a precomputed eigendecomposition.

    The ground-energy shift cancels in the quotient exactly and keeps the
    exponentials in range at large beta.
    """
    if not np.isfinite(beta) or beta < 0:
        raise ValueError(f"beta must be finite and >= 0, got {beta}")
    w = spectrum.eigenvalues
    v = spectrum.eigenvectors
    if beta == 0.0:
        d = len(w)
        return DensityMatrix(np.eye(d) / d, partition, check=False)
    boltz = np.exp(-beta * (w - w[0]))
    boltz /= boltz.sum()
    rho = (v * boltz) @ v.conj().T
    rho = (rho + rho.conj().T) / 2.0
    return DensityMatrix(rho, partition, check=False)


def gibbs_state(spec: GibbsSpec, partition: Partition) -> DensityMatrix:
    """Thermal state exp(-beta H)/Z on the given tensor factorization."""
    return gibbs_from_spectrum(eigh(spec.hamiltonian, rtol=1e-8), spec.beta,
                               partition)


def ground_state_projector(h: np.ndarray, partition: Partition,
                           degeneracy_tol: float = 1e-10) -> DensityMatrix:
    """Normalized projector onto the ground space (the beta -> inf limit)."""
    s = eigh(h, rtol=1e-8)
    w = s.eigenvalues
    mask = w <= w[0] + degeneracy_tol * max(1.0, abs(w[0]))
    v = s.eigenvectors[:, mask]
    rho = (v @ v.conj().T) / int(mask.sum())
    return DensityMatrix(rho, partition, check=False)


def entropy_of_eigenvalues(w: np.ndarray,
                           support_cutoff: float = SUPPORT_CUTOFF) -> float:
    w = np.asarray(w, dtype=float)
    scale = w.max() if len(w) else 0.0
    p = w[w > support_cutoff * scale]
    return float(-np.sum(p * np.log2(p)))


def entropy(rho: DensityMatrix | np.ndarray,
            support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Von Neumann entropy in bits, eigenvalues below the cutoff dropped."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    tr = float(np.trace(mat).real)
    if abs(tr - 1.0) > 1e-8:
        raise NormalizationError(f"trace {tr!r} deviates from 1 beyond 1e-8")
    w = np.clip(np.linalg.eigvalsh((mat + mat.conj().T) / 2.0), 0.0, None)
    return entropy_of_eigenvalues(w, support_cutoff)


def cmi(rho: DensityMatrix, partition: Partition | None = None,
        clamp: float = 1e-9) -> float:
    """Conditional mutual information I(A:C|B) = S(AB)+S(BC)-S(ABC)-S(B), bits.

    Tiny negatives within -clamp (numerical noise around strong
    subadditivity's floor) are reported as 0.
    """
    p = partition if partition is not None else rho.partition
    if p.dim != rho.dim:
        raise ValueError(
            f"partition dim {p.dim} does not match state dim {rho.dim}"
        )
    dims = p.local_dims
    mat = rho.matrix

    def s_of(labels: str) -> float:
        keep = p.sites_of(labels)
        return entropy(partial_trace_matrix(mat, dims, keep))

    value = s_of("AB") + s_of("BC") - s_of("ABC") - s_of("B")
    if -clamp <= value < 0.0:
        return 0.0
    return value


def relative_weight_offsupport(rho_b: np.ndarray,
                               support_cutoff: float = SUPPORT_CUTOFF) -> float:
    """Probability weight of rho_b below the support cutoff (diagnostic)."""
    w = np.clip(np.linalg.eigvalsh((rho_b + rho_b.conj().T) / 2.0), 0.0, None)
    scale = w.max() if len(w) else 0.0
    return float(w[w <= support_cutoff * scale].sum())


def geometric_beta_grid(beta_min: float = 1e-2, beta_max: float = 1e2,
                        count: int = 40) -> np.ndarray:
    """Default beta grid; features of the thermal curves span decades."""
    return np.geomspace(beta_min, beta_max, count)


__all__ = [
    "GibbsSpec", "gibbs_state", "gibbs_from_spectrum", "ground_state_projector",
    "entropy", "entropy_of_eigenvalues", "cmi", "geometric_beta_grid",
    "relative_weight_offsupport", "NormalizationError", "LN2",
]
