import numpy as np
import pytest

from petzchain.hilbert import (
    DensityMatrix,
    Partition,
    PartitionError,
    embed,
    inverse_permutation,
    kron_all,
    partial_trace,
    partial_trace_matrix,
    permute_sites,
)
from petzchain.petz import PERMUTE_ORDER, PERMUTED_BLOCKS
from petzchain.spinchain import swap_network_unitary

SZ = np.diag([1.0, -1.0])


def random_density(dim, rng):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def brute_force_partial_trace(mat, dims, keep):
    """Independent oracle: explicit double sum over traced basis labels."""
    n = len(dims)
    keep = sorted(keep)
    traced = [s for s in range(n) if s not in keep]
    kd = int(np.prod([dims[s] for s in keep])) if keep else 1
    out = np.zeros((kd, kd), dtype=complex)

    def unrank(idx, sites):
        digits = {}
        for s in reversed(sites):
            digits[s] = idx % dims[s]
            idx //= dims[s]
        return digits

    def rank(digits):
        idx = 0
        for s in range(n):
            idx = idx * dims[s] + digits[s]
        return idx

    td = int(np.prod([dims[s] for s in traced])) if traced else 1
    for i in range(kd):
        for j in range(kd):
            di = unrank(i, keep)
            dj = unrank(j, keep)
            acc = 0.0
            for t in range(td):
                dt = unrank(t, traced)
                acc += mat[rank({**di, **dt}), rank({**dj, **dt})]
            out[i, j] = acc
    return out


class TestPartition:
    def test_rejects_overlapping_blocks(self):
        with pytest.raises(PartitionError):
            Partition.chain(3, (0, 1), (1,), (2,))

    def test_rejects_incomplete_cover(self):
        with pytest.raises(PartitionError):
            Partition.chain(4, (0,), (1,), (2,))

    def test_dims(self):
        p = Partition.from_dims(2, 3, 4)
        assert p.dim == 24
        assert p.block_dim("AB") == 6

    def test_restricted(self):
        p = Partition.chain(4, (0,), (1, 2), (3,))
        r = p.restricted((1, 3))
        assert r.b_sites == (0,)
        assert r.c_sites == (1,)


class TestPartialTrace:
    def test_bell_state_marginal(self):
        bell = np.zeros((4, 4))
        bell[np.ix_([0, 3], [0, 3])] = 0.5
        rho = DensityMatrix(bell, Partition.chain(2, (0,), (1,), ()))
        out = partial_trace(rho, (0,))
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2.0, atol=1e-14)

    def test_product_state_marginal(self):
        rng = np.random.default_rng(0)
        a, b = random_density(2, rng), random_density(4, rng)
        p = Partition((2, 4), (0,), (1,), ())
        rho = DensityMatrix(np.kron(a, b), p)
        np.testing.assert_allclose(partial_trace(rho, (0,)).matrix, a, atol=1e-12)

    def test_keep_all_is_identity(self):
        rng = np.random.default_rng(1)
        p = Partition.chain(3, (0,), (1,), (2,))
        rho = DensityMatrix(random_density(8, rng), p)
        np.testing.assert_array_equal(partial_trace(rho, (0, 1, 2)).matrix,
                                      rho.matrix)

    def test_unknown_site_rejected(self):
        with pytest.raises(IndexError):
            partial_trace_matrix(np.eye(4), (2, 2), (0, 5))

    def test_trace_and_positivity_preserved(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            dims = tuple(rng.integers(2, 4, size=3))
            mat = random_density(int(np.prod(dims)), rng)
            keep = [s for s in range(3) if rng.random() < 0.6] or [0]
            red = partial_trace_matrix(mat, dims, keep)
            assert abs(np.trace(red).real - 1.0) < 1e-10
            assert np.linalg.eigvalsh((red + red.conj().T) / 2)[0] > -1e-12

    def test_composition_equals_single_step(self):
        rng = np.random.default_rng(3)
        dims = (2, 2, 2, 2)
        mat = random_density(16, rng)
        two_step = partial_trace_matrix(
            partial_trace_matrix(mat, dims, (0, 1, 2)), dims[:3], (0, 1)
        )
        one_step = partial_trace_matrix(mat, dims, (0, 1))
        np.testing.assert_allclose(two_step, one_step, atol=1e-15)

    def test_against_brute_force_oracle(self):
        rng = np.random.default_rng(4)
        dims = (2, 3, 2)
        mat = random_density(12, rng)
        for keep in [(0,), (1,), (2,), (0, 2), (1, 2), (0, 1)]:
            np.testing.assert_allclose(
                partial_trace_matrix(mat, dims, keep),
                brute_force_partial_trace(mat, dims, keep),
                atol=1e-13,
            )


class TestEmbed:
    def test_single_site_operator(self):
        np.testing.assert_array_equal(embed(SZ, (2, 2), (0,)),
                                      np.kron(SZ, np.eye(2)))

    def test_identity_embeds_to_identity(self):
        np.testing.assert_array_equal(embed(np.eye(4), (2, 2, 2), (1, 2)),
                                      np.eye(8))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            embed(np.eye(3), (2, 2), (0,))

    def test_duality_with_partial_trace(self):
        # Tr[embed(X, S) rho] == Tr[X Tr_{S^c}(rho)] on random 3-qubit inputs.
        rng = np.random.default_rng(7)
        dims = (2, 2, 2)
        for support in [(0,), (2,), (0, 1), (0, 2), (1, 2)]:
            d_sup = int(np.prod([dims[s] for s in support]))
            x = rng.standard_normal((d_sup, d_sup)) \
                + 1j * rng.standard_normal((d_sup, d_sup))
            rho = random_density(8, rng)
            lhs = np.trace(embed(x, dims, support) @ rho)
            rhs = np.trace(x @ partial_trace_matrix(rho, dims, support))
            assert abs(lhs - rhs) < 1e-12


class TestPermuteSites:
    def test_identity_permutation(self):
        rng = np.random.default_rng(8)
        p = Partition.chain(3, (0,), (1,), (2,))
        rho = DensityMatrix(random_density(8, rng), p)
        np.testing.assert_array_equal(permute_sites(rho, (0, 1, 2)).matrix,
                                      rho.matrix)

    def test_two_qubit_swap(self):
        m = np.zeros((4, 4))
        m[1, 1] = 1.0  # |01><01|
        rho = DensityMatrix(m, Partition.chain(2, (0,), (1,), ()))
        out = permute_sites(rho, (1, 0))
        expected = np.zeros((4, 4))
        expected[2, 2] = 1.0  # |10><10|
        np.testing.assert_array_equal(out.matrix, expected)

    def test_round_trip_exact(self):
        rng = np.random.default_rng(9)
        p = Partition.chain(4, (0, 1), (2,), (3,))
        rho = DensityMatrix(random_density(16, rng), p)
        order = (2, 0, 3, 1)
        back = permute_sites(permute_sites(rho, order),
                             inverse_permutation(order))
        np.testing.assert_array_equal(back.matrix, rho.matrix)

    def test_rejects_non_bijection(self):
        p = Partition.chain(2, (0,), (1,), ())
        rho = DensityMatrix(np.eye(4) / 4.0, p)
        with pytest.raises(PartitionError):
            permute_sites(rho, (0, 0))

    def test_matches_swap_network_conjugation(self):
        rng = np.random.default_rng(10)
        p = Partition.chain(3, (0,), (1,), (2,))
        rho = DensityMatrix(random_density(8, rng), p)
        import itertools

        for order in itertools.permutations(range(3)):
            relabeled = permute_sites(rho, order).matrix
            u = swap_network_unitary(3, order)
            conjugated = u @ rho.matrix @ u.conj().T
            assert np.linalg.norm(relabeled - conjugated) < 1e-12

    def test_spectrum_invariant(self):
        rng = np.random.default_rng(11)
        p = Partition.chain(3, (0,), (1,), (2,))
        rho = DensityMatrix(random_density(8, rng), p)
        out = permute_sites(rho, (2, 0, 1))
        np.testing.assert_allclose(np.linalg.eigvalsh(out.matrix),
                                   np.linalg.eigvalsh(rho.matrix), atol=1e-12)

    def test_paper_eight_site_relabeling(self):
        # Blocks (0,1)/(2..5)/(6,7) after the relabeling [3,4,1,2,5,6,0,7]
        # give the same marginals as blocks (3,4)/(1,2,5,6)/(0,7) before it.
        rng = np.random.default_rng(12)
        p = Partition.chain(8, PERMUTED_BLOCKS["A"], PERMUTED_BLOCKS["B"],
                            PERMUTED_BLOCKS["C"])
        rho = DensityMatrix(random_density(256, rng), p)
        moved = permute_sites(rho, PERMUTE_ORDER)
        assert moved.partition.a_sites == (0, 1)
        assert moved.partition.b_sites == (2, 3, 4, 5)
        assert moved.partition.c_sites == (6, 7)
        for labels in ("A", "B", "C"):
            before = partial_trace(rho, rho.partition.sites_of(labels)).matrix
            after = partial_trace(moved, moved.partition.sites_of(labels)).matrix
            np.testing.assert_allclose(before, after, atol=1e-12)


def test_kron_all():
    a, b = np.eye(2), SZ
    np.testing.assert_array_equal(kron_all(a, b), np.kron(a, b))
