import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from upbkit import linalg as la
from upbkit import states


def permutation_determinant(m: np.ndarray) -> float:
    """Brute-force determinant by signed permutation expansion (oracle only)."""
    n = m.shape[0]
    total = 0.0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        term = sign
        for i in range(n):
            term *= m[i, perm[i]]
        total += term
    return total


class TestLocalVectors:
    def test_values(self):
        assert np.array_equal(states.local_vector("0"), [1, 0])
        assert np.array_equal(states.local_vector("1"), [0, 1])
        assert np.allclose(states.local_vector("phi1"), np.array([1, 1]) / np.sqrt(2))
        assert np.allclose(states.local_vector("phi2"), np.array([1, 1j]) / np.sqrt(2))

    def test_unknown_label(self):
        with pytest.raises(ValueError, match="unknown label"):
            states.local_vector("phi3")


class TestPartyStructure:
    def test_dims(self):
        p = states.PartyStructure((2, 3, 2))
        assert p.dim == 12 and p.n_parties == 3 and not p.all_qubits

    def test_rejects_trivial(self):
        with pytest.raises(ValueError):
            states.PartyStructure((1,))
        with pytest.raises(ValueError):
            states.PartyStructure((0, 2))

    def test_bipartitions_three_parties(self):
        cuts = states.bipartitions(states.qubits(3))
        assert [c.side_a for c in cuts] == [(0,), (0, 1), (0, 2)]

    def test_bipartitions_four_parties(self):
        cuts = states.bipartitions(states.qubits(4))
        assert len(cuts) == 2 ** 3 - 1
        assert all(0 in c.side_a for c in cuts)

    def test_bipartition_validation(self):
        with pytest.raises(ValueError):
            states.Bipartition(())
        cut = states.Bipartition((0, 1, 2))
        with pytest.raises(ValueError, match="proper subset"):
            cut.validate_for(states.qubits(3))


class TestProjectorBasis:
    def test_e000_is_corner_projector(self):
        e = states.basis_projector(("0", "0", "0"))
        expected = np.zeros((8, 8))
        expected[0, 0] = 1.0
        assert np.array_equal(e.matrix, expected)

    def test_single_phi1_is_plus_projector(self):
        e = states.basis_projector(("phi1",))
        assert np.allclose(e.matrix, np.full((2, 2), 0.5))

    def test_all_are_rank_one_projectors(self):
        for e in states.projector_basis(3):
            m = e.matrix
            assert np.max(np.abs(m @ m - m)) < 1e-14
            assert abs(np.trace(m).real - 1.0) < 1e-14
            assert np.max(np.abs(m - m.conj().T)) == 0.0

    def test_count_and_order(self):
        basis = states.projector_basis(2)
        assert len(basis) == 16
        labels = states.basis_labels(2)
        assert labels[0] == ("0", "0") and labels[-1] == ("phi2", "phi2")
        assert labels == sorted(labels, key=lambda mu: tuple(states.LABELS.index(l) for l in mu))

    def test_size_guard(self):
        with pytest.raises(ValueError):
            states.projector_basis(7)
        with pytest.raises(ValueError):
            states.projector_basis(0)

    def test_gram_determinant_single_qubit(self):
        # oracle: explicit signed-permutation expansion of the 4x4 Gram
        gram = states.projector_basis_gram(1)
        det = permutation_determinant(gram)
        assert abs(det - 0.25) < 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_gram_nonsingular(self, n):
        gram = states.projector_basis_gram(n)
        vals, _ = la.hermitian_eig(gram)
        assert vals[0] > 1e-6
        # Gram matches the direct double loop over basis projectors
        basis = states.projector_basis(n)
        direct = np.array(
            [[np.trace(a.matrix @ b.matrix).real for b in basis] for a in basis]
        )
        assert np.max(np.abs(gram - direct)) < 1e-12

    def test_decomposition_round_trip(self):
        rng = np.random.default_rng(5)
        rho = states.random_density_matrix(states.qubits(2), rng)
        coeffs = states.decompose_in_projector_basis(rho)
        recon = np.zeros((4, 4), dtype=complex)
        for c, e in zip(coeffs, states.projector_basis(2)):
            recon += c * e.matrix
        assert np.max(np.abs(recon - rho.matrix)) < 1e-10


class TestProductVectors:
    def test_expand_corners(self):
        e0 = states.local_vector("0")
        e1 = states.local_vector("1")
        v000 = states.ProductVector((e0, e0, e0))
        v111 = states.ProductVector((e1, e1, e1))
        assert np.array_equal(states.expand(v000), np.eye(8)[0])
        assert np.array_equal(states.expand(v111), np.eye(8)[7])

    def test_expand_plus_zero(self):
        v = states.ProductVector((states.local_vector("phi1"), states.local_vector("0")))
        assert np.allclose(states.expand(v), np.array([1, 0, 1, 0]) / np.sqrt(2))

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError, match="not normalized"):
            states.ProductVector((np.array([1.0, 1.0]),))


class TestDensityMatrix:
    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError, match="trace"):
            states.DensityMatrix(np.eye(2), states.PartyStructure((2,)))

    def test_rejects_negative(self):
        m = np.diag([1.5, -0.5])
        with pytest.raises(ValueError, match="positive semidefinite"):
            states.DensityMatrix(m, states.PartyStructure((2,)))

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(ValueError, match="does not match"):
            states.DensityMatrix(np.eye(4) / 4, states.qubits(3))


def ghz_state():
    v = np.zeros(8, dtype=complex)
    v[0] = v[7] = 1 / np.sqrt(2)
    return states.DensityMatrix(np.outer(v, v.conj()), states.qubits(3), validate=False)


class TestPPT:
    def test_maximally_mixed(self):
        rho = states.DensityMatrix(np.eye(8) / 8, states.qubits(3), validate=False)
        for cut in states.bipartitions(rho.parts):
            assert abs(states.min_pt_eigenvalue(rho, cut) - 1 / 8) < 1e-12

    def test_bell_state(self):
        v = np.zeros(4, dtype=complex)
        v[0] = v[3] = 1 / np.sqrt(2)
        rho = states.DensityMatrix(np.outer(v, v.conj()), states.qubits(2), validate=False)
        assert abs(states.min_pt_eigenvalue(rho, states.Bipartition((1,))) - (-0.5)) < 1e-12

    def test_ghz_npt_on_all_cuts(self):
        report = states.is_ppt_all_cuts(ghz_state())
        assert len(report) == 3
        for verdict in report.values():
            assert not verdict.ppt
            assert verdict.min_eigenvalue < -0.49

    def test_complement_symmetry(self):
        rng = np.random.default_rng(17)
        parts = states.qubits(3)
        for _ in range(20):
            rho = states.random_density_matrix(parts, rng)
            first = states.min_pt_eigenvalue(rho, states.Bipartition((0,)))
            second = states.min_pt_eigenvalue(rho, states.Bipartition((1, 2)))
            assert abs(first - second) < 1e-11

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_separable_mixtures_stay_ppt(self, seed):
        rng = np.random.default_rng(seed)
        basis = states.projector_basis(3)
        weights = rng.random(10)
        weights /= weights.sum()
        picks = rng.integers(0, len(basis), size=10)
        mix = sum(w * basis[i].matrix for w, i in zip(weights, picks))
        rho = states.DensityMatrix(mix, states.qubits(3), validate=False)
        for verdict in states.is_ppt_all_cuts(rho).values():
            assert verdict.ppt
