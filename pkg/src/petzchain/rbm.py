"""Random-band-matrix thermal model: tridiagonal Gaussian Hamiltonians,
second-order perturbative entropies/CMI around the maximally mixed state, and
exact-vs-perturbative convergence tables.

Model: H = offset * I + D * R with R a real symmetric tridiagonal matrix
whose free entries are i.i.d. standard normal. To first order in D the Gibbs
state is I/d + D * rho_1 with rho_1 = -(beta/d)(R - Tr(R)/d * I).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import Partition, partial_trace_matrix
from .thermal import LN2, GibbsSpec, cmi as exact_cmi_of, gibbs_state


@dataclass(frozen=True)
class BandModel:
    """Tripartite dimensions, offset, perturbation strength, temperature, seed."""

    dims: tuple[int, int, int]
    offset: float = 0.0
    strength: float = 1e-3
    beta: float = 1.0
    seed: int = 0

    def __post_init__(self):
        d_a, d_b, d_c = self.dims
        if min(d_a, d_b, d_c) < 1:
            raise ValueError("all factor dimensions must be >= 1")
        if self.strength < 0 or self.beta < 0:
            raise ValueError("strength and beta must be >= 0")

    @property
    def dim(self) -> int:
        return int(math.prod(self.dims))

    @property
    def partition(self) -> Partition:
        return Partition.from_dims(*self.dims)


def sample_band_matrix(d: int, seed: int) -> np.ndarray:
    """Real symmetric tridiagonal matrix with standard-normal free entries.

    The sub-diagonal mirrors the super-diagonal (Hermiticity forces
    R_mn = R_nm); entries with |m - n| >= 2 are exactly zero. Deterministic
    for a fixed seed.
    """
    if d < 2:
        raise ValueError("dimension must be >= 2")
    rng = np.random.default_rng(seed)
    r = np.diag(rng.standard_normal(d))
    off = rng.standard_normal(d - 1)
    r += np.diag(off, 1) + np.diag(off, -1)
    return r


def hamiltonian(model: BandModel) -> np.ndarray:
    r = sample_band_matrix(model.dim, model.seed)
    return model.offset * np.eye(model.dim) + model.strength * r


def first_order_term(r: np.ndarray, model: BandModel) -> np.ndarray:
    """rho_1 = -(beta/d)(R - Tr(R)/d * I); traceless by construction."""
    d = model.dim
    if r.shape != (d, d):
        raise ValueError(f"R shape {r.shape} does not match model dim {d}")
    return -(model.beta / d) * (r - (np.trace(r).real / d) * np.eye(d))


def expansion_valid(r: np.ndarray, model: BandModel) -> bool:
    """The log expansion needs ||D d rho_1||_op = ||beta D (R - tr)||_op < 1."""
    x = model.strength * model.dim * first_order_term(r, model)
    return bool(np.linalg.norm(x, 2) < 1.0)


def perturbative_entropy(rho1_marginal: np.ndarray, dim_x: int,
                         strength: float) -> float:
    """Second-order entropy of I/d_X + D rho_{1,X}, in bits.

    log(d_X) - (D^2 / 2) d_X Tr(rho_{1,X}^2), derived in natural log and
    converted to bits.
    """
    t2 = float(np.trace(rho1_marginal @ rho1_marginal).real)
    return (np.log(dim_x) - 0.5 * strength**2 * dim_x * t2) / LN2


def perturbative_cmi(r: np.ndarray, model: BandModel) -> float:
    """Second-order CMI from the rho_1 marginals, in bits.

    I = (D^2/2)[d_B Tr(rho_1B^2) + d Tr(rho_1^2)
                - d_AB Tr(rho_1AB^2) - d_BC Tr(rho_1BC^2)] / ln 2.
    """
    d_a, d_b, d_c = model.dims
    rho1 = first_order_term(r, model)
    dims = model.dims

    def t2(keep) -> float:
        m = partial_trace_matrix(rho1, dims, keep)
        return float(np.trace(m @ m).real)

    d = model.dim
    val = (
        d_b * t2((1,))
        + d * t2((0, 1, 2))
        - d_a * d_b * t2((0, 1))
        - d_b * d_c * t2((1, 2))
    )
    return 0.5 * model.strength**2 * val / LN2


def paper_formula_cmi(r: np.ndarray, model: BandModel) -> float:
    """The closed-form CMI written directly in R, evaluated literally for
    comparison (its second term reads d_B * d * Tr R^2); in bits."""
    d_a, d_b, d_c = model.dims
    d = model.dim
    dims = model.dims

    def tr2(keep) -> float:
        m = partial_trace_matrix(r, dims, keep)
        return float(np.trace(m @ m).real)

    pref = 0.5 * model.beta**2 * model.strength**2 / d**2
    val = (
        d_b * tr2((1,))
        + d_b * d * float(np.trace(r @ r).real)
        - d_a * d_b * tr2((0, 1))
        - d_b * d_c * tr2((1, 2))
    )
    return pref * val / LN2


def exact_cmi(model: BandModel, r: np.ndarray | None = None) -> float:
    """CMI of the exact Gibbs state of offset*I + D*R (oracle path)."""
    if r is None:
        r = sample_band_matrix(model.dim, model.seed)
    h = model.offset * np.eye(model.dim) + model.strength * r
    rho = gibbs_state(GibbsSpec(h, model.beta), model.partition)
    return exact_cmi_of(rho)


@dataclass(frozen=True)
class ConvergenceRow:
    strength: float
    exact: float
    perturbative: float
    abs_error: float
    valid: bool


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    slope: float


def perturbation_convergence(model: BandModel, d_values) -> ConvergenceTable:
    """Exact-vs-perturbative CMI error per strength, plus the log-log slope.

    A captured second order makes the error O(D^3), so the fitted slope
    should come out >= ~3 (>= 2.5 is the conservative acceptance floor).
    """
    r = sample_band_matrix(model.dim, model.seed)
    rows = []
    for d_val in d_values:
        m = BandModel(model.dims, model.offset, float(d_val), model.beta,
                      model.seed)
        ex = exact_cmi(m, r)
        pe = perturbative_cmi(r, m) if d_val > 0 else 0.0
        rows.append(ConvergenceRow(
            strength=float(d_val),
            exact=ex,
            perturbative=pe,
            abs_error=abs(ex - pe),
            valid=expansion_valid(r, m) if d_val > 0 else True,
        ))
    pos = [(row.strength, row.abs_error) for row in rows
           if row.strength > 0 and row.abs_error > 0]
    if len(pos) >= 2:
        xs = np.log([p[0] for p in pos])
        ys = np.log([p[1] for p in pos])
        slope = float(np.polyfit(xs, ys, 1)[0])
    else:
        slope = float("nan")
    return ConvergenceTable(rows=tuple(rows), slope=slope)


def exact_gibbs(model: BandModel):
    """Exact Gibbs state of the sampled band Hamiltonian (for bound checks)."""
    return gibbs_state(GibbsSpec(hamiltonian(model), model.beta),
                       model.partition)


__all__ = [
    "BandModel", "sample_band_matrix", "hamiltonian", "first_order_term",
    "expansion_valid", "perturbative_entropy", "perturbative_cmi",
    "paper_formula_cmi", "exact_cmi", "exact_gibbs",
    "perturbation_convergence", "ConvergenceRow", "ConvergenceTable",
]
