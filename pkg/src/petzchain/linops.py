"""Dense Hermitian linear algebra: eigendecompositions, matrix functions on the
support, matrix norms, and root fidelity.

All functions operate on plain numpy arrays. Matrices are assumed square and
(where stated) Hermitian; inputs are symmetrized before eigendecomposition and
the pre-symmetrization defect is checked against a relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Relative Hermiticity tolerance applied before any eigendecomposition.
HERMITICITY_RTOL = 1e-12

# Default support cutoff, relative to the largest-magnitude eigenvalue.
# Eigenvalues at or below the cutoff are treated as outside the support for
# negative powers and logarithms.
SUPPORT_CUTOFF = 1e-12


class HermiticityError(ValueError):
    """Input deviates from its conjugate transpose beyond tolerance."""


class PositivityError(ValueError):
    """A supposed density matrix has eigenvalues below -tolerance."""


class SpectralDomainError(ValueError):
    """A scalar function was applied to an eigenvalue outside its domain."""


def hermiticity_defect(m: np.ndarray) -> float:
    """Relative deviation of m from (m + m†)/2, in Frobenius norm."""
    m = np.asarray(m)
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(m - m.conj().T) / (2.0 * scale))


def hermitianize(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> np.ndarray:
    """Symmetrize m, rejecting inputs whose defect exceeds rtol."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    defect = hermiticity_defect(m)
    if defect > rtol:
        raise HermiticityError(
            f"matrix is not Hermitian: relative defect {defect:.3e} > {rtol:.3e}"
        )
    return (m + m.conj().T) / 2.0


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    eigenvalues are ascending; eigenvectors are the corresponding orthonormal
    columns, so V @ diag(w) @ V† reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def eigh(m: np.ndarray, rtol: float = HERMITICITY_RTOL) -> Spectrum:
    """Eigendecompose a Hermitian matrix after symmetrizing it."""
    h = hermitianize(m, rtol=rtol)
    w, v = np.linalg.eigh(h)
    return Spectrum(eigenvalues=w, eigenvectors=v)


def spectral_function(
    s: Spectrum,
    f: Callable[[np.ndarray], np.ndarray],
    support_cutoff: float = SUPPORT_CUTOFF,
) -> np.ndarray:
    """Apply a scalar function through the eigenbasis: V diag(f(w)) V†.

    Eigenvalues with |w| <= support_cutoff * max|w| are mapped to 0 (the
    pseudo-inverse convention for negative powers and logs on rank-deficient
    inputs). f may be complex-valued (rotated Petz powers); the result is then
    a general matrix built by the same recipe.
    """
    w = s.eigenvalues
    v = s.eigenvectors
    scale = np.max(np.abs(w)) if len(w) else 0.0
    on_support = np.abs(w) > support_cutoff * scale
    fw = np.zeros(len(w), dtype=complex)
    if np.any(on_support):
        with np.errstate(all="ignore"):
            vals = np.asarray(f(w[on_support]), dtype=complex)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            offending = w[on_support][bad][0]
            raise SpectralDomainError(
                f"scalar function undefined at retained eigenvalue {offending!r}"
            )
        fw[on_support] = vals
    out = (v * fw) @ v.conj().T
    if np.allclose(fw.imag, 0.0, atol=0.0):
        out = (out + out.conj().T) / 2.0
    return out


def matrix_power_on_support(
    s: Spectrum, power: complex, support_cutoff: float = SUPPORT_CUTOFF
) -> np.ndarray:
    """x^power on the support of s; handles complex powers for rotated maps."""
    return spectral_function(
        s, lambda x: np.exp(power * np.log(x.astype(complex))), support_cutoff
    )


def norm(m: np.ndarray, kind: str) -> float:
    """Matrix norm by kind: 'trace' (nuclear), 'operator' (spectral),
    or 'frobenius'."""
    m = np.asarray(m)
    if kind == "trace":
        return float(np.linalg.norm(m, "nuc"))
    if kind == "operator":
        return float(np.linalg.norm(m, 2))
    if kind == "frobenius":
        return float(np.linalg.norm(m))
    raise ValueError(f"unknown norm kind {kind!r}")


def _check_density(m: np.ndarray, name: str, atol: float = 1e-10) -> np.ndarray:
    h = hermitianize(m, rtol=1e-8)
    w = np.linalg.eigvalsh(h)
    if w[0] < -atol:
        raise PositivityError(
            f"{name} has negative eigenvalue {w[0]:.3e} beyond -{atol:.0e}"
        )
    tr = float(np.trace(h).real)
    if abs(tr - 1.0) > 1e-6:
        raise ValueError(f"{name} has trace {tr!r}, expected 1")
    return h


def root_fidelity(rho: np.ndarray, sigma: np.ndarray, check: bool = True) -> float:
    """Root fidelity F = Tr sqrt(sqrt(rho) sigma sqrt(rho)) = ||sqrt(rho) sqrt(sigma)||_1.

    This is the convention in which the Fuchs-van de Graaf inequalities
    1 - ||rho-sigma||_1/2 <= F <= sqrt(1 - ||rho-sigma||_1^2/4) hold.

    check=False skips the positivity/trace validation (used internally for
    subnormalized recovered states on a truncated support).
    """
    if check:
        rho = _check_density(rho, "rho")
        sigma = _check_density(sigma, "sigma")
    else:
        rho = (np.asarray(rho) + np.asarray(rho).conj().T) / 2.0
        sigma = (np.asarray(sigma) + np.asarray(sigma).conj().T) / 2.0
    w, v = np.linalg.eigh(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    mid = sqrt_rho @ sigma @ sqrt_rho
    mid = (mid + mid.conj().T) / 2.0
    w2 = np.clip(np.linalg.eigvalsh(mid), 0.0, None)
    return float(np.sum(np.sqrt(w2)))
