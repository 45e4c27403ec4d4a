"""Ising-type chain Hamiltonian, its reflection (parity) symmetry, and the
even/odd sector blocks.

H = alpha * sum_{i<L-1} sz_i sz_{i+1} + h_z * sum_i sz_i + j_x * sum_i sx_i,
open boundary. With open boundaries H commutes with the chain-reversal
operator, which splits the Hilbert space into two superselection sectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linops import hermitianize

DEFAULT_MAX_L = 14

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])


class ResourceGuardError(ValueError):
    """Chain length beyond the configured dense-matrix cap."""


class SymmetryError(ValueError):
    """Operator does not commute with the parity operator."""


@dataclass(frozen=True)
class ChainParams:
    """Open-boundary chain couplings: alpha (ZZ), h_z (longitudinal),
    j_x (transverse)."""

    n_sites: int
    alpha: float = 1.0
    h_z: float = -0.5
    j_x: float = 1.05

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("need at least one site")


def _site_z(states: np.ndarray, L: int, i: int) -> np.ndarray:
    # Spin at site i (site 0 = most significant bit): +1 for bit 0, -1 for bit 1.
    return 1.0 - 2.0 * ((states >> (L - 1 - i)) & 1)


def build_hamiltonian_sparse(p: ChainParams) -> sp.csr_matrix:
    """Sparse CSR Hamiltonian; O(L 2^L) nonzeros."""
    L = p.n_sites
    d = 1 << L
    states = np.arange(d)
    diag = np.zeros(d)
    for i in range(L - 1):
        diag += p.alpha * _site_z(states, L, i) * _site_z(states, L, i + 1)
    for i in range(L):
        diag += p.h_z * _site_z(states, L, i)
    h = sp.diags(diag, format="lil")
    for i in range(L):
        flipped = states ^ (1 << (L - 1 - i))
        h += sp.csr_matrix(
            (np.full(d, p.j_x), (states, flipped)), shape=(d, d)
        ).tolil()
    return sp.csr_matrix(h)


def build_hamiltonian(p: ChainParams, max_l: int = DEFAULT_MAX_L) -> np.ndarray:
    """Dense real symmetric 2^L Hamiltonian (traceless by construction)."""
    if p.n_sites > max_l:
        est_gib = (1 << (2 * p.n_sites)) * 8 / 2**30
        raise ResourceGuardError(
            f"L={p.n_sites} exceeds cap {max_l} (dense matrix ~{est_gib:.1f} GiB)"
        )
    return build_hamiltonian_sparse(p).toarray()


def _reverse_bits(s: int, L: int) -> int:
    r = 0
    for _ in range(L):
        r = (r << 1) | (s & 1)
        s >>= 1
    return r


def parity_operator(L: int) -> np.ndarray:
    """Chain-reversal permutation matrix: |s_1..s_L> -> |s_L..s_1>."""
    d = 1 << L
    p = np.zeros((d, d))
    for s in range(d):
        p[_reverse_bits(s, L), s] = 1.0
    return p


def parity_basis(L: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Orthonormal bases of the parity-even and parity-odd sectors.

    Built from computational-basis orbits under reversal: self-reversed
    states span the even sector unchanged; pairs {s, reverse(s)} give
    (|s> +- |reverse(s)>)/sqrt(2). Columns are the basis vectors.
    """
    d = 1 << L
    inv = np.sqrt(0.5)
    even_rows, even_cols, even_vals = [], [], []
    odd_rows, odd_cols, odd_vals = [], [], []
    n_even = n_odd = 0
    for s in range(d):
        r = _reverse_bits(s, L)
        if r < s:
            continue
        if r == s:
            even_rows.append(s)
            even_cols.append(n_even)
            even_vals.append(1.0)
            n_even += 1
        else:
            even_rows += [s, r]
            even_cols += [n_even, n_even]
            even_vals += [inv, inv]
            n_even += 1
            odd_rows += [s, r]
            odd_cols += [n_odd, n_odd]
            odd_vals += [inv, -inv]
            n_odd += 1
    be = sp.csr_matrix((even_vals, (even_rows, even_cols)), shape=(d, n_even))
    bo = sp.csr_matrix((odd_vals, (odd_rows, odd_cols)), shape=(d, n_odd))
    return be, bo


def sector_dims(L: int) -> tuple[int, int]:
    """(even, odd) sector dimensions: (2^L +- 2^ceil(L/2)) / 2."""
    fixed = 1 << ((L + 1) // 2)
    d = 1 << L
    return (d + fixed) // 2, (d - fixed) // 2


def parity_blocks(h: np.ndarray, L: int, rtol: float = 1e-10
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Restrict h to the +1 and -1 eigenspaces of the parity operator."""
    h = hermitianize(h, rtol=1e-8)
    p = parity_operator(L)
    comm = np.linalg.norm(h @ p - p @ h, 2)
    scale = max(np.linalg.norm(h, 2), 1.0)
    if comm > rtol * scale:
        raise SymmetryError(
            f"[h, P] has operator norm {comm:.3e} (tolerance {rtol * scale:.3e})"
        )
    be, bo = parity_basis(L)
    even = be.T.conj() @ h @ be
    odd = bo.T.conj() @ h @ bo
    return np.asarray(even), np.asarray(odd)


def parity_sector_hamiltonian(p: ChainParams, sector: str = "even") -> np.ndarray:
    """Dense sector block of H built through the sparse path.

    Avoids materializing the full 2^L dense matrix, which keeps L=14 feasible.
    """
    h = build_hamiltonian_sparse(p)
    be, bo = parity_basis(p.n_sites)
    b = {"even": be, "odd": bo}[sector]
    return np.asarray((b.T @ h @ b).todense())


def swap_network_unitary(L: int, new_order, local_dim: int = 2) -> np.ndarray:
    """Explicit permutation unitary U with U rho U† = relabeled rho.

    Used only to validate that index relabeling equals SWAP-network
    conjugation; production code never materializes it.
    """
    d = local_dim**L
    u = np.zeros((d, d))
    new_order = list(new_order)
    for col in range(d):
        digits = []
        x = col
        for _ in range(L):
            digits.append(x % local_dim)
            x //= local_dim
        digits = digits[::-1]  # site 0 most significant
        new_digits = [digits[new_order[i]] for i in range(L)]
        row = 0
        for dig in new_digits:
            row = row * local_dim + dig
        u[row, col] = 1.0
    return u
