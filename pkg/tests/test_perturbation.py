import numpy as np
import pytest

from upbkit import linalg as la
from upbkit import (
    Bipartition,
    DensityMatrix,
    LocalNoiseSpec,
    MixNoiseSpec,
    NoiseEffect,
    PositivityError,
    ProductVector,
    UPB,
    basis_labels,
    classify_noise,
    decompose_in_projector_basis,
    expand,
    is_ppt_all_cuts,
    kernel_compression,
    kernel_product_basis,
    min_pt_eigenvalue,
    perturb_local,
    perturb_mix,
    predict_first_order,
    qubits,
    random_density_matrix,
    shifts_family,
    ShiftsParams,
    uniform_direction,
    upb_state,
)
from upbkit.perturbation import entangled_pair_noise

CUT0 = Bipartition((0,))
ALL_CUTS = [Bipartition((0,)), Bipartition((0, 1)), Bipartition((0, 2))]


def maximally_mixed():
    return DensityMatrix(np.eye(8) / 8, qubits(3), validate=False)


def complexified_family(params=ShiftsParams(0.4, 0.8, 1.2)):
    """Family members rotated by a complex local unitary on party 0.

    Local unitaries preserve orthogonality and unextendibility, but make the
    kernel product basis genuinely different from the members.
    """
    u = shifts_family(params)
    phi = 0.6
    rot = np.array(
        [[np.cos(phi), 1j * np.sin(phi)], [1j * np.sin(phi), np.cos(phi)]], dtype=complex
    )
    members = tuple(
        ProductVector((rot @ v.locals[0], v.locals[1], v.locals[2])) for v in u.members
    )
    return UPB(u.parts, members)


class TestPerturbLocal:
    def test_zero_coefficients_leave_state_unchanged(self, pi4_state):
        spec = LocalNoiseSpec({mu: 0.0 for mu in basis_labels(3)})
        out = perturb_local(pi4_state, spec)
        assert np.max(np.abs(out.matrix - pi4_state.matrix)) < 1e-15

    def test_uniform_local_noise_stays_ppt(self, pi4_state):
        spec = LocalNoiseSpec({mu: 1e-3 for mu in basis_labels(3)})
        out = perturb_local(pi4_state, spec)
        for verdict in is_ppt_all_cuts(out).values():
            assert verdict.ppt

    def test_single_projector_grows_rank_by_one(self, pi4_state):
        spec = LocalNoiseSpec({("0", "0", "0"): 1e-3})
        out = perturb_local(pi4_state, spec)
        assert abs(np.trace(out.matrix).real - 1.0) < 1e-12
        vals, _ = la.hermitian_eig(out.matrix)
        assert vals[0] >= -1e-12
        # E(0,0,0) projects onto the first member, which lies in the kernel
        assert la.numerical_rank(out.matrix, 1e-9) == 5

    def test_negative_coefficient_can_violate_positivity(self, pi4_state):
        spec = LocalNoiseSpec({("phi1", "phi1", "phi1"): -1e-3})
        with pytest.raises(PositivityError):
            perturb_local(pi4_state, spec)

    def test_coefficient_sanity_bound(self):
        with pytest.raises(ValueError, match="sanity bound"):
            LocalNoiseSpec({("0", "0", "0"): 1.5})

    def test_nonnegative_region_stays_ppt(self, pi4_state):
        # smaller companion of the acceptance-scale sweep
        rng = np.random.default_rng(606)
        labels = basis_labels(3)
        for _ in range(30):
            eps = rng.uniform(0.0, 1e-2, size=64)
            spec = LocalNoiseSpec(dict(zip(labels, eps)))
            assert spec.all_nonnegative
            out = perturb_local(pi4_state, spec)
            for verdict in is_ppt_all_cuts(out).values():
                assert verdict.ppt


class TestPerturbMix:
    def test_small_epsilon_returns_close_to_state(self, pi4_state):
        rho1 = maximally_mixed()
        out = perturb_mix(pi4_state, MixNoiseSpec(rho1, 1e-9))
        assert np.max(np.abs(out.matrix - pi4_state.matrix)) < 1e-9

    def test_white_noise_stays_ppt(self, pi4_state):
        out = perturb_mix(pi4_state, MixNoiseSpec(maximally_mixed(), 0.01))
        for verdict in is_ppt_all_cuts(out).values():
            assert verdict.ppt

    def test_entangled_pair_noise_breaks_ppt_on_matching_cut(self, pi4_state):
        noise = entangled_pair_noise(3, (0, 1))
        out = perturb_mix(pi4_state, MixNoiseSpec(noise, 0.01))
        assert min_pt_eigenvalue(out, CUT0) < 0

    def test_epsilon_guard(self):
        with pytest.raises(ValueError, match="epsilon"):
            MixNoiseSpec(maximally_mixed(), 0.5)
        with pytest.raises(ValueError, match="epsilon"):
            MixNoiseSpec(maximally_mixed(), 0.0)


class TestKernelProductBasis:
    def test_real_family_reproduces_members(self, pi4_upb):
        for cut in ALL_CUTS:
            basis = kernel_product_basis(pi4_upb, cut)
            for member, conj in zip(pi4_upb.members, basis):
                assert np.max(np.abs(expand(member) - expand(conj))) < 1e-15

    def test_conjugation_flips_phases(self):
        phi2 = np.array([1.0, 1.0j]) / np.sqrt(2)
        e0 = np.array([1.0, 0.0], dtype=complex)
        e1 = np.array([0.0, 1.0], dtype=complex)
        u = UPB(
            qubits(2),
            (ProductVector((e0, phi2)), ProductVector((e1, phi2))),
        )
        out = kernel_product_basis(u, Bipartition((1,)))
        expected = np.array([1.0, -1.0j]) / np.sqrt(2)
        for conj in out:
            assert np.max(np.abs(conj.locals[1] - expected)) < 1e-15

    def test_output_is_orthonormal(self):
        u = complexified_family()
        for cut in ALL_CUTS:
            basis = [expand(v) for v in kernel_product_basis(u, cut)]
            gram = np.array([[np.vdot(x, y) for y in basis] for x in basis])
            assert np.max(np.abs(gram - np.eye(4))) < 1e-10

    def test_spans_the_kernel_of_the_partial_transpose(self):
        # the span-equality statement, checked numerically against the eigensolver
        rng = np.random.default_rng(1618)
        for _ in range(15):
            params = ShiftsParams(*rng.uniform(0.02, np.pi / 2 - 0.02, size=3))
            u = shifts_family(params)
            rho = upb_state(u)
            for cut in ALL_CUTS:
                pt = la.partial_transpose(rho.matrix, (2, 2, 2), cut.side_a)
                numerical = la.kernel(pt, 1e-9)
                conjugated = [expand(v) for v in kernel_product_basis(u, cut)]
                assert la.subspace_distance(numerical, conjugated) < 1e-9

    def test_complex_family_kernel_differs_from_member_span(self):
        u = complexified_family()
        members = [expand(v) for v in u.members]
        conjugated = [expand(v) for v in kernel_product_basis(u, CUT0)]
        assert la.subspace_distance(members, conjugated) > 1e-3
        # and the lemma still holds for the complex family
        rho = upb_state(u)
        pt = la.partial_transpose(rho.matrix, (2, 2, 2), CUT0.side_a)
        assert la.subspace_distance(la.kernel(pt, 1e-9), conjugated) < 1e-9


class TestKernelCompression:
    def test_white_noise_gives_scaled_identity(self, pi4_upb):
        comp = kernel_compression(maximally_mixed(), pi4_upb, CUT0)
        assert np.max(np.abs(comp.matrix - np.eye(4) / 8)) < 1e-12
        assert np.max(np.abs(comp.eigenvalues - 0.125)) < 1e-12

    def test_member_projector_is_rank_one(self, pi4_upb):
        e000 = np.zeros((8, 8), dtype=complex)
        e000[0, 0] = 1.0
        noise = DensityMatrix(e000, qubits(3), validate=False)
        comp = kernel_compression(noise, pi4_upb, CUT0)
        # overlaps <psi_i|000> vanish except for the first member, so the
        # compression is a rank-1 projector with top eigenvalue 1
        assert np.max(np.abs(comp.eigenvalues - np.array([0.0, 0.0, 0.0, 1.0]))) < 1e-12

    def test_orthogonal_support_gives_zero(self, pi4_upb, pi4_state):
        comp = kernel_compression(pi4_state, pi4_upb, CUT0)
        assert np.max(np.abs(comp.matrix)) < 1e-14

    def test_hermitian(self, pi4_upb):
        rho1 = random_density_matrix(qubits(3), np.random.default_rng(8))
        comp = kernel_compression(rho1, pi4_upb, CUT0)
        assert np.max(np.abs(comp.matrix - comp.matrix.conj().T)) < 1e-12


class TestFirstOrderPrediction:
    def test_white_noise_scaling(self, pi4_upb):
        comp = kernel_compression(maximally_mixed(), pi4_upb, CUT0)
        pred = predict_first_order(comp, 0.01)
        assert np.max(np.abs(pred - 0.00125)) < 1e-12

    def test_zero_epsilon(self, pi4_upb):
        comp = kernel_compression(maximally_mixed(), pi4_upb, CUT0)
        assert np.array_equal(predict_first_order(comp, 0.0), np.zeros(4))

    def test_epsilon_guard(self, pi4_upb):
        comp = kernel_compression(maximally_mixed(), pi4_upb, CUT0)
        with pytest.raises(ValueError):
            predict_first_order(comp, 0.2)

    def test_matches_exact_spectrum_to_second_order(self, pi4_upb, pi4_state):
        rng = np.random.default_rng(2024)
        for _ in range(5):
            rho1 = random_density_matrix(qubits(3), rng)
            comp = kernel_compression(rho1, pi4_upb, CUT0)
            for eps in (1e-2, 5e-3, 2.5e-3):
                pred = predict_first_order(comp, eps)
                mixed = perturb_mix(pi4_state, MixNoiseSpec(rho1, eps))
                pt = la.partial_transpose(mixed.matrix, (2, 2, 2), CUT0.side_a)
                exact = np.linalg.eigvalsh(pt)[:4]  # independent oracle
                assert np.max(np.abs(pred - exact)) <= 10 * eps * eps

    def test_error_scales_quadratically(self, pi4_upb, pi4_state):
        rho1 = random_density_matrix(qubits(3), np.random.default_rng(99))
        comp = kernel_compression(rho1, pi4_upb, CUT0)

        def max_err(eps):
            pred = predict_first_order(comp, eps)
            mixed = perturb_mix(pi4_state, MixNoiseSpec(rho1, eps))
            pt = la.partial_transpose(mixed.matrix, (2, 2, 2), CUT0.side_a)
            return float(np.max(np.abs(pred - np.linalg.eigvalsh(pt)[:4])))

        for eps in (1e-2, 5e-3, 2.5e-3):
            ratio = max_err(eps) / max_err(eps / 2)
            assert 3.5 <= ratio <= 4.5


class TestClassification:
    def test_white_noise_preserves_ppt(self, pi4_upb):
        cls = classify_noise(maximally_mixed(), pi4_upb, CUT0)
        assert cls.verdict is NoiseEffect.PPT_PRESERVING
        assert abs(cls.lambda_min - 0.125) < 1e-12

    def test_entangled_pair_noise_induces_npt(self, pi4_upb, pi4_state):
        noise = entangled_pair_noise(3, (0, 1))
        cls = classify_noise(noise, pi4_upb, CUT0)
        assert cls.verdict is NoiseEffect.NPT_INDUCING
        assert cls.lambda_min < -1e-3
        # exact spectrum confirms a negative eigenvalue at eps = 1e-3
        mixed = perturb_mix(pi4_state, MixNoiseSpec(noise, 1e-3))
        assert min_pt_eigenvalue(mixed, CUT0) < -1e-9

    def test_orthogonal_support_is_degenerate(self, pi4_upb, pi4_state):
        cls = classify_noise(pi4_state, pi4_upb, CUT0)
        assert cls.verdict is NoiseEffect.DEGENERATE

    def test_ppt_preserving_confirmed_by_exact_spectrum(self, pi4_upb, pi4_state):
        rng = np.random.default_rng(505)
        confirmed = 0
        for _ in range(20):
            rho1 = random_density_matrix(qubits(3), rng)
            cls = classify_noise(rho1, pi4_upb, CUT0)
            if cls.verdict is NoiseEffect.PPT_PRESERVING:
                mixed = perturb_mix(pi4_state, MixNoiseSpec(rho1, 1e-4))
                assert min_pt_eigenvalue(mixed, CUT0) >= -1e-12
                confirmed += 1
        assert confirmed > 0


class TestNegativeCoefficientReach:
    def test_gram_projection_produces_negative_coefficients(self, pi4_upb, pi4_state):
        # decompose a PPT-preserving noise state over the projector basis; the
        # decomposition is unique and generically has negative entries, yet the
        # perturbation it generates is exactly the (positive) state admixture
        rng = np.random.default_rng(42)
        raw = 0.9 * np.eye(8) / 8 + 0.1 * random_density_matrix(qubits(3), rng).matrix
        rho1 = DensityMatrix(raw, qubits(3), validate=False)
        for cut in ALL_CUTS:
            assert classify_noise(rho1, pi4_upb, cut).verdict is NoiseEffect.PPT_PRESERVING

        coeffs = decompose_in_projector_basis(rho1)
        assert np.min(coeffs) < 0

        scale = 1e-3
        spec = LocalNoiseSpec(dict(zip(basis_labels(3), scale * coeffs)))
        assert not spec.all_nonnegative
        out = perturb_local(pi4_state, spec)
        expected = perturb_mix(pi4_state, MixNoiseSpec(rho1, scale))
        assert np.max(np.abs(out.matrix - expected.matrix)) < 1e-12
        for verdict in is_ppt_all_cuts(out).values():
            assert verdict.ppt


class TestUniformDirection:
    def test_sums_to_one(self):
        d = uniform_direction(3)
        assert abs(d.total - 1.0) < 1e-12
        assert d.all_nonnegative
        assert len(d.coefficients) == 64
