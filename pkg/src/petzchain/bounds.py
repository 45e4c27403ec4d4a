"""Executable checks of the recovery lemmas: closeness of dynamics and
expectation values between a state and its Petz reconstruction.

The asserted trace-norm bound is eps_safe = 2 sqrt(1 - 2^{-I}), which follows
from F >= 2^{-I/2} via Fuchs-van de Graaf. The alternative expression
sqrt(4 (1 - 2^{-I/2})) is numerically tighter but does not follow from the
fidelity bound, so it is reported alongside for comparison and never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linops
from .hilbert import DensityMatrix, Partition
from .linops import eigh, hermitianize, spectral_function
from .petz import petz_recover
from .thermal import cmi


class ChannelError(ValueError):
    """Kraus set is not trace preserving within tolerance."""


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map given by Kraus operators; sum K† K = identity within 1e-10."""

    kraus_operators: tuple[np.ndarray, ...]

    def __post_init__(self):
        ks = tuple(np.asarray(k) for k in self.kraus_operators)
        if not ks:
            raise ChannelError("need at least one Kraus operator")
        d_in = ks[0].shape[1]
        acc = np.zeros((d_in, d_in), dtype=complex)
        for k in ks:
            if k.shape[1] != d_in:
                raise ChannelError("Kraus operators disagree on input dimension")
            acc += k.conj().T @ k
        if np.linalg.norm(acc - np.eye(d_in)) > 1e-10 * max(1.0, d_in):
            raise ChannelError(
                "sum K† K deviates from identity by "
                f"{np.linalg.norm(acc - np.eye(d_in)):.3e}"
            )
        object.__setattr__(self, "kraus_operators", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus_operators[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus_operators[0].shape[0]


def apply_channel(ch: QuantumChannel, rho: np.ndarray) -> np.ndarray:
    """sum_i K_i rho K_i†."""
    rho = np.asarray(rho)
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise ValueError(
            f"state dim {rho.shape} does not match channel input {ch.dim_in}"
        )
    out = np.zeros((ch.dim_out, ch.dim_out), dtype=complex)
    for k in ch.kraus_operators:
        out += k @ rho @ k.conj().T
    return (out + out.conj().T) / 2.0


def unitary_channel(u: np.ndarray) -> QuantumChannel:
    u = np.asarray(u)
    if np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) > 1e-9 * u.shape[0]:
        raise ChannelError("operator is not unitary within tolerance")
    return QuantumChannel((u,))


def depolarizing_channel(dim: int, strength: float = 1.0) -> QuantumChannel:
    """Mix with the maximally mixed state; strength 1 is fully depolarizing."""
    if not 0.0 <= strength <= 1.0:
        raise ValueError("strength must lie in [0, 1]")
    ks = [np.sqrt(1.0 - strength) * np.eye(dim)]
    # Replacement part via the d^2 matrix units scaled by sqrt(strength/d).
    w = np.sqrt(strength / dim)
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim))
            e[i, j] = w
            ks.append(e)
    return QuantumChannel(tuple(ks))


def evolution_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) through the eigenbasis."""
    return spectral_function(eigh(h, rtol=1e-8), lambda w: np.exp(-1j * w * t),
                             support_cutoff=0.0)


def epsilon_safe(i_bits: float) -> float:
    """Provable trace-norm cap 2 sqrt(1 - 2^{-I}) implied by F >= 2^{-I/2}."""
    return 2.0 * np.sqrt(max(1.0 - 2.0 ** (-i_bits), 0.0))


def epsilon_reported(i_bits: float) -> float:
    """The alternative expression sqrt(4 (1 - 2^{-I/2})); report-only."""
    return np.sqrt(4.0 * max(1.0 - 2.0 ** (-i_bits / 2.0), 0.0))


@dataclass(frozen=True)
class LemmaMargins:
    """Nonnegative margins mean the inequality held."""

    fidelity_margin: float
    trace_margin: float
    cmi: float
    eps_safe: float
    eps_reported: float


def check_lemma1(rho: DensityMatrix, partition: Partition | None,
                 ch: QuantumChannel, lam: float = 0.0) -> LemmaMargins:
    """Data-processed recovery: F(N(rho), N(rho~)) >= 2^{-I/2} and
    ||N(rho) - N(rho~)||_1 <= eps_safe."""
    p = partition if partition is not None else rho.partition
    rec = petz_recover(rho, p, lam=lam)
    i_bits = cmi(rho, p)
    n_rho = apply_channel(ch, rho.matrix)
    n_rec = apply_channel(ch, rec.matrix)
    fid = linops.root_fidelity(n_rho, n_rec, check=False)
    dist = linops.norm(n_rho - n_rec, "trace")
    eps = epsilon_safe(i_bits)
    return LemmaMargins(
        fidelity_margin=fid - 2.0 ** (-i_bits / 2.0),
        trace_margin=eps - dist,
        cmi=i_bits,
        eps_safe=eps,
        eps_reported=epsilon_reported(i_bits),
    )


@dataclass(frozen=True)
class Lemma2Margin:
    margin: float
    lhs: float
    eps_safe: float
    delta_upper: float


def check_lemma2(rho: DensityMatrix, partition: Partition | None,
                 u1: np.ndarray, u2: np.ndarray,
                 lam: float = 0.0) -> Lemma2Margin:
    """||N1(rho) - N2(rho~)||_1 <= eps_safe + delta with delta the diamond
    distance, here capped by 2 ||u1 - u2||_op for unitary channels."""
    c1 = unitary_channel(u1)
    c2 = unitary_channel(u2)
    p = partition if partition is not None else rho.partition
    rec = petz_recover(rho, p, lam=lam)
    i_bits = cmi(rho, p)
    lhs = linops.norm(
        apply_channel(c1, rho.matrix) - apply_channel(c2, rec.matrix), "trace"
    )
    eps = epsilon_safe(i_bits)
    delta_upper = 2.0 * linops.norm(np.asarray(u1) - np.asarray(u2), "operator")
    return Lemma2Margin(
        margin=eps + delta_upper - lhs,
        lhs=lhs,
        eps_safe=eps,
        delta_upper=delta_upper,
    )


@dataclass(frozen=True)
class Lemma3Margin:
    margin: float
    lhs: float
    bound: float
    expectation_gap: float


def check_lemma3(rho: DensityMatrix, partition: Partition | None,
                 obs: np.ndarray, lam: float = 0.0) -> Lemma3Margin:
    """Hölder cap on observables: ||O (rho - rho~)||_1 <= ||O||_op eps_safe."""
    p = partition if partition is not None else rho.partition
    rec = petz_recover(rho, p, lam=lam)
    i_bits = cmi(rho, p)
    obs = hermitianize(obs, rtol=1e-8)
    delta = rho.matrix - rec.matrix
    lhs = linops.norm(obs @ delta, "trace")
    bound = linops.norm(obs, "operator") * epsilon_safe(i_bits)
    gap = abs(float(np.trace(obs @ delta).real))
    return Lemma3Margin(margin=bound - lhs, lhs=lhs, bound=bound,
                        expectation_gap=gap)


@dataclass(frozen=True)
class Lemma4Report:
    """Diagnostic (not asserted): effective-Hamiltonian gap at small beta.

    Gibbs states fix H only up to an additive constant, so both logarithms
    are projected to traceless form before comparison.
    """

    hamiltonian_gap: float
    bound: float
    holds: bool
    beta: float
    trace_distance: float


def check_lemma4(h: np.ndarray, partition: Partition, beta: float,
                 lam: float = 0.0) -> Lemma4Report:
    from .thermal import GibbsSpec, gibbs_state

    if beta <= 0.0:
        raise ValueError("beta must be positive (the bound divides by beta)")
    rho = gibbs_state(GibbsSpec(h, beta), partition)
    rec = petz_recover(rho, partition, lam=lam)

    def traceless_log_over_beta(m: np.ndarray) -> np.ndarray:
        s = eigh(m, rtol=1e-8)
        lg = spectral_function(s, np.log)
        lg = lg - (np.trace(lg).real / lg.shape[0]) * np.eye(lg.shape[0])
        return -lg / beta

    h_eff = traceless_log_over_beta(rho.matrix)
    h_rec = traceless_log_over_beta(rec.matrix)
    gap = linops.norm(h_rec - h_eff, "trace")
    d1 = linops.norm(rho.matrix - rec.matrix, "trace")
    delta = np.sqrt(max(1.0 - d1**2 / 4.0, 0.0))
    bound = delta / beta
    return Lemma4Report(hamiltonian_gap=gap, bound=bound, holds=gap <= bound,
                        beta=beta, trace_distance=d1)


def random_density(dim: int, rng: np.random.Generator,
                   rank: int | None = None) -> np.ndarray:
    """Ginibre-induced random density matrix."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(dim: int, kraus_rank: int,
                   rng: np.random.Generator) -> QuantumChannel:
    """Random CPTP map from a Haar isometry (Stinespring dilation)."""
    u = random_unitary(dim * kraus_rank, rng)
    iso = u[:, :dim]  # columns: input basis embedded in system x environment
    ks = tuple(
        iso.reshape(dim, kraus_rank, dim)[:, e, :] for e in range(kraus_rank)
    )
    return QuantumChannel(ks)
