"""Tensor-product bookkeeping for multipartite states.

Index convention: the global basis index is a mixed-radix number in which site
0 is the most significant digit. All modules share this convention; the
round-trip tests assert it. Blocks A/B/C need not be contiguous: partial
traces and the recovery map handle arbitrary interleaved site sets directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .linops import hermitianize


class PartitionError(ValueError):
    """Invalid block assignment or site permutation."""


def _as_sites(sites) -> tuple[int, ...]:
    return tuple(int(s) for s in sites)


@dataclass(frozen=True)
class Partition:
    """Sites, per-site local dimensions, and a disjoint A/B/C block assignment.

    permutation, when set, is the site relabeling under which the blocks were
    chosen (new position i holds original site permutation[i]); it is metadata
    for provenance, the blocks themselves are always in current labels.
    """

    local_dims: tuple[int, ...]
    a_sites: tuple[int, ...]
    b_sites: tuple[int, ...]
    c_sites: tuple[int, ...]
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "local_dims", tuple(int(d) for d in self.local_dims))
        for name in ("a_sites", "b_sites", "c_sites"):
            object.__setattr__(self, name, _as_sites(getattr(self, name)))
        n = self.n_sites
        if n < 1 or any(d < 1 for d in self.local_dims):
            raise PartitionError("need at least one site with positive dimension")
        blocks = self.a_sites + self.b_sites + self.c_sites
        if sorted(blocks) != list(range(n)):
            raise PartitionError(
                f"blocks {blocks} are not a disjoint cover of sites 0..{n - 1}"
            )
        if self.permutation is not None:
            perm = _as_sites(self.permutation)
            if sorted(perm) != list(range(n)):
                raise PartitionError(f"permutation {perm} is not a bijection")
            object.__setattr__(self, "permutation", perm)

    @property
    def n_sites(self) -> int:
        return len(self.local_dims)

    @property
    def dim(self) -> int:
        return int(math.prod(self.local_dims))

    def block(self, label: str) -> tuple[int, ...]:
        return {"A": self.a_sites, "B": self.b_sites, "C": self.c_sites}[label]

    def sites_of(self, labels: str) -> tuple[int, ...]:
        """Union of the given block labels, sorted by site index."""
        out: list[int] = []
        for lab in labels:
            out.extend(self.block(lab))
        return tuple(sorted(out))

    def block_dim(self, labels: str) -> int:
        return int(math.prod(self.local_dims[s] for s in self.sites_of(labels)))

    def restricted(self, keep) -> "Partition":
        """Partition on the kept sites (relabelled 0..k-1, ascending order)."""
        keep = tuple(sorted(_as_sites(keep)))
        index = {s: i for i, s in enumerate(keep)}
        return Partition(
            local_dims=tuple(self.local_dims[s] for s in keep),
            a_sites=tuple(index[s] for s in self.a_sites if s in index),
            b_sites=tuple(index[s] for s in self.b_sites if s in index),
            c_sites=tuple(index[s] for s in self.c_sites if s in index),
        )

    @classmethod
    def chain(cls, n_sites: int, a_sites, b_sites, c_sites,
              permutation=None) -> "Partition":
        """Spin-1/2 chain partition (all local dimensions 2)."""
        return cls((2,) * n_sites, a_sites, b_sites, c_sites, permutation)

    @classmethod
    def from_dims(cls, d_a: int, d_b: int, d_c: int) -> "Partition":
        """One abstract site per factor, e.g. the band-matrix tripartition."""
        return cls((d_a, d_b, d_c), (0,), (1,), (2,))


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace PSD matrix on an explicit tensor factorization."""

    matrix: np.ndarray
    partition: Partition
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.shape != (self.partition.dim, self.partition.dim):
            raise PartitionError(
                f"matrix shape {m.shape} does not match partition dim "
                f"{self.partition.dim}"
            )
        if self.check:
            m = hermitianize(m, rtol=1e-8)
            tr = float(np.trace(m).real)
            if abs(tr - 1.0) > 1e-10:
                raise ValueError(f"trace {tr!r} deviates from 1 beyond 1e-10")
            wmin = float(np.linalg.eigvalsh(m)[0])
            if wmin < -1e-10:
                raise ValueError(f"negative eigenvalue {wmin:.3e} beyond -1e-10")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.partition.dim


def partial_trace_matrix(mat: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace of an arbitrary square matrix over the sites not in keep.

    The result's factors are the kept sites in ascending site order.
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    keep = sorted(_as_sites(keep))
    if any(s < 0 or s >= n for s in keep) or len(set(keep)) != len(keep):
        raise IndexError(f"keep={keep} references unknown or repeated sites (n={n})")
    mat = np.asarray(mat)
    if len(keep) == n:
        return mat
    t = mat.reshape(dims + dims)
    # Row axis i and column axis n+i share an index iff site i is traced out.
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out_axes = [i for i in keep] + [n + i for i in keep]
    kd = math.prod(dims[s] for s in keep)
    reduced = np.einsum(t, row + col, out_axes)
    return reduced.reshape(kd, kd)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all sites outside keep; the partition restricts accordingly."""
    keep = tuple(sorted(_as_sites(keep)))
    reduced = partial_trace_matrix(rho.matrix, rho.partition.local_dims, keep)
    return DensityMatrix(reduced, rho.partition.restricted(keep), check=False)


def permute_axes_matrix(mat: np.ndarray, dims, new_order) -> np.ndarray:
    """Relabel sites so that new position i carries the old site new_order[i]."""
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    new_order = _as_sites(new_order)
    if sorted(new_order) != list(range(n)):
        raise PartitionError(f"{new_order} is not a bijection on {n} sites")
    mat = np.asarray(mat)
    t = mat.reshape(dims + dims)
    axes = list(new_order) + [n + s for s in new_order]
    d = math.prod(dims)
    return t.transpose(axes).reshape(d, d)


def permute_sites(rho: DensityMatrix, new_order) -> DensityMatrix:
    """Index relabeling of a state (equivalent to SWAP-network conjugation).

    new_order[i] is the original site now sitting at position i. Blocks are
    remapped to the new labels; the spectrum is untouched.
    """
    new_order = _as_sites(new_order)
    p = rho.partition
    mat = permute_axes_matrix(rho.matrix, p.local_dims, new_order)
    pos = {s: i for i, s in enumerate(new_order)}
    newp = Partition(
        local_dims=tuple(p.local_dims[s] for s in new_order),
        a_sites=tuple(sorted(pos[s] for s in p.a_sites)),
        b_sites=tuple(sorted(pos[s] for s in p.b_sites)),
        c_sites=tuple(sorted(pos[s] for s in p.c_sites)),
        permutation=new_order,
    )
    return DensityMatrix(mat, newp, check=False)


def inverse_permutation(new_order) -> tuple[int, ...]:
    new_order = _as_sites(new_order)
    inv = [0] * len(new_order)
    for i, s in enumerate(new_order):
        inv[s] = i
    return tuple(inv)


def embed(op: np.ndarray, dims, support) -> np.ndarray:
    """Tensor op (on the sorted support sites) with identity on the rest.

    Satisfies Tr[embed(X, dims, S) rho] = Tr[X partial_trace(rho, S)].
    """
    dims = tuple(int(d) for d in dims)
    n = len(dims)
    support = sorted(_as_sites(support))
    d_sup = math.prod(dims[s] for s in support)
    op = np.asarray(op)
    if op.shape != (d_sup, d_sup):
        raise ValueError(
            f"operator shape {op.shape} does not match support dimension {d_sup}"
        )
    comp = [s for s in range(n) if s not in support]
    d_comp = math.prod(dims[s] for s in comp)
    big = np.kron(op, np.eye(d_comp, dtype=op.dtype))
    # big is ordered [support..., comp...]; relabel back to ascending sites.
    order = support + comp
    reordered_dims = tuple(dims[s] for s in order)
    back = [order.index(s) for s in range(n)]
    return permute_axes_matrix(big, reordered_dims, back)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of the given factors, left to right."""
    out = np.array([[1.0]])
    for m in mats:
        out = np.kron(out, m)
    return out
