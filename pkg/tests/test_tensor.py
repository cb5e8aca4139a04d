"""Core tensor algebra: kets, operators, products, partial traces."""

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import proddecomp as pd


def _random_ket(rng, dim):
    return pd.Ket.normalize(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))


def _half_half_decomposition():
    e = [pd.Ket.basis(2, 0), pd.Ket.basis(2, 1)]
    return pd.ProductDecomposition(
        pd.FactoredDims((2, 2)),
        (pd.ProductTerm(0.5, e[0], e[0]), pd.ProductTerm(0.5, e[1], e[1])),
    )


@st.composite
def unit_vectors(draw, max_dim=5):
    dim = draw(st.integers(1, max_dim))
    parts = st.lists(
        st.floats(-1, 1, allow_nan=False, allow_infinity=False), min_size=dim, max_size=dim
    )
    v = np.asarray(draw(parts)) + 1j * np.asarray(draw(parts))
    assume(np.linalg.norm(v) > 1e-2)
    return v / np.linalg.norm(v)


class TestKet:
    def test_requires_unit_norm(self):
        with pytest.raises(pd.DegenerateInput):
            pd.Ket((1.0, 1.0))

    def test_normalize_rejects_zero(self):
        with pytest.raises(pd.DegenerateInput):
            pd.Ket.normalize(np.zeros(3))

    def test_amplitudes_are_immutable(self):
        k = pd.Ket.basis(3, 0)
        with pytest.raises(ValueError):
            k.amplitudes[0] = 0.0

    def test_overlap_dimension_mismatch(self):
        with pytest.raises(pd.DimensionMismatch):
            pd.Ket.basis(2, 0).overlap(pd.Ket.basis(3, 0))


class TestFactoredDims:
    def test_rejects_bad_lengths(self):
        with pytest.raises(pd.DimensionMismatch):
            pd.FactoredDims(())
        with pytest.raises(pd.DimensionMismatch):
            pd.FactoredDims((2, 2, 2, 2))

    def test_rejects_ambient_above_vector_cap(self):
        with pytest.raises(pd.DimensionMismatch):
            pd.FactoredDims((2000, 2000))

    def test_total(self):
        assert pd.FactoredDims((2, 3, 4)).total == 24


class TestStateOperator:
    def test_rejects_non_hermitian(self):
        m = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        with pytest.raises(pd.DegenerateInput):
            pd.StateOperator(pd.FactoredDims((2, 1)), m)

    def test_rejects_negative_eigenvalue(self):
        m = np.diag([1.0, -0.5]).astype(complex)
        with pytest.raises(pd.DegenerateInput):
            pd.StateOperator(pd.FactoredDims((2, 1)), m)

    def test_rejects_shape_mismatch(self):
        with pytest.raises(pd.DimensionMismatch):
            pd.StateOperator(pd.FactoredDims((2, 2)), np.eye(3, dtype=complex))

    def test_rejects_ambient_above_operator_cap(self):
        # the cap check precedes any matrix work, so a placeholder suffices
        with pytest.raises(pd.DimensionMismatch, match="cap"):
            pd.StateOperator(pd.FactoredDims((4096, 2)), np.eye(2, dtype=complex))


class TestTensorProduct:
    def test_standard_basis(self):
        out = pd.tensor_product(pd.Ket((1, 0)), pd.Ket((0, 1)))
        assert np.array_equal(out.amplitudes, np.array([0, 1, 0, 0], dtype=complex))

    def test_linearity_in_first_slot(self):
        s = 1 / np.sqrt(2)
        out = pd.tensor_product(pd.Ket((s, s)), pd.Ket((1, 0)))
        assert np.allclose(out.amplitudes, [s, 0, s, 0], atol=1e-15)

    def test_scalar_phase_carries_through(self):
        out = pd.tensor_product(pd.Ket((1j, 0)), pd.Ket((1, 0)))
        assert np.allclose(out.amplitudes, [1j, 0, 0, 0], atol=1e-15)

    def test_bilinear(self):
        rng = np.random.default_rng(0)
        x = _random_ket(rng, 3)
        y = _random_ket(rng, 4)
        z = _random_ket(rng, 4)
        alpha, beta = 0.3 + 0.1j, -0.7 + 0.2j
        comb = alpha * y.amplitudes + beta * z.amplitudes
        norm = np.linalg.norm(comb)
        lhs = norm * pd.tensor_product(x, pd.Ket.normalize(comb)).amplitudes
        rhs = alpha * pd.tensor_product(x, y).amplitudes + beta * pd.tensor_product(x, z).amplitudes
        assert np.allclose(lhs, rhs, atol=1e-12)

    @settings(deadline=None)
    @given(unit_vectors(), unit_vectors())
    def test_norm_multiplicative(self, x, y):
        out = pd.tensor_product(pd.Ket(x), pd.Ket(y))
        assert abs(np.linalg.norm(out.amplitudes) - 1.0) < 1e-12

    def test_product_ket_reshapes_to_rank_one(self):
        rng = np.random.default_rng(5)
        x = _random_ket(rng, 3)
        y = _random_ket(rng, 4)
        m = pd.bipartite_matrix(pd.tensor_product(x, y), pd.FactoredDims((3, 4)))
        s = np.linalg.svd(m, compute_uv=False)
        assert abs(s[0] - 1.0) < 1e-12
        assert s[1] < 1e-14


class TestBuildRho:
    def test_half_half_eigenvalues(self):
        rho = pd.build_rho(_half_half_decomposition())
        evals = np.sort(np.linalg.eigvalsh(rho.matrix))[::-1]
        assert np.allclose(evals, [0.5, 0.5, 0.0, 0.0], atol=1e-12)

    def test_single_term_is_rank_one_projector(self):
        rng = np.random.default_rng(1)
        a = _random_ket(rng, 3)
        b = _random_ket(rng, 2)
        dec = pd.ProductDecomposition(pd.FactoredDims((3, 2)), (pd.ProductTerm(1.0, a, b),))
        rho = pd.build_rho(dec)
        ab = pd.tensor_product(a, b)
        assert np.allclose(rho.matrix, ab.projector(), atol=1e-14)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_trace_equals_weight_sum(self, seed):
        dec = pd.generate_instance(3, 4, 3, seed=seed)
        rho = pd.build_rho(dec)
        assert abs(rho.trace - dec.weight_sum) < 1e-12

    def test_rejects_nonpositive_weight(self):
        a = pd.Ket.basis(2, 0)
        with pytest.raises(pd.DegenerateInput):
            pd.ProductTerm(0.0, a, a)
        with pytest.raises(pd.DegenerateInput):
            pd.ProductTerm(-0.3, a, a)

    def test_rejects_dimension_mismatch(self):
        a = pd.Ket.basis(2, 0)
        b = pd.Ket.basis(3, 0)
        with pytest.raises(pd.DimensionMismatch):
            pd.ProductDecomposition(pd.FactoredDims((2, 2)), (pd.ProductTerm(1.0, a, b),))


class TestPartialTrace:
    def test_product_state_reduction(self):
        rng = np.random.default_rng(2)
        a = _random_ket(rng, 3)
        b = _random_ket(rng, 4)
        ab = pd.tensor_product(a, b)
        rho = pd.StateOperator(pd.FactoredDims((3, 4)), ab.projector())
        reduced = pd.partial_trace(rho, (0,))
        assert np.allclose(reduced.matrix, a.projector(), atol=1e-14)
        reduced_b = pd.partial_trace(rho, (1,))
        assert np.allclose(reduced_b.matrix, b.projector(), atol=1e-14)

    def test_purified_projector_reduces_to_rho(self):
        dec = pd.generate_instance(3, 4, 3, seed=9)
        tri = pd.purify(dec, 3)
        psi, norm = pd.build_tri_vector(tri)
        proj = pd.StateOperator(tri.dims, norm**2 * psi.projector())
        reduced = pd.partial_trace(proj, (0, 1))
        rho = pd.build_rho(dec)
        assert pd.frobenius(reduced.matrix - rho.matrix) < 1e-12

    @pytest.mark.parametrize("keep", [(0,), (1,), (2,), (0, 1), (1, 2), (0, 2)])
    def test_trace_preserved(self, keep):
        dec = pd.generate_tri_instance(2, 2, 3, 2, seed=4)
        psi, _ = pd.build_tri_vector(dec)
        rho = pd.StateOperator(dec.dims, psi.projector())
        reduced = pd.partial_trace(rho, keep)
        assert abs(reduced.trace - rho.trace) < 1e-12

    def test_rejects_invalid_subsets(self):
        rho = pd.StateOperator(pd.FactoredDims((2, 2)), np.eye(4, dtype=complex) / 4)
        with pytest.raises(pd.DimensionMismatch):
            pd.partial_trace(rho, ())
        with pytest.raises(pd.DimensionMismatch):
            pd.partial_trace(rho, (0, 1))
        with pytest.raises(pd.DimensionMismatch):
            pd.partial_trace(rho, (2,))


class TestBuildTriVector:
    def test_single_term_is_tensor_chain(self):
        rng = np.random.default_rng(3)
        a, b, c = (_random_ket(rng, d) for d in (2, 3, 2))
        tri = pd.TriDecomposition(pd.FactoredDims((2, 3, 2)), (pd.TriTerm(1.0, a, b, c),))
        ket, norm = pd.build_tri_vector(tri)
        chain = pd.tensor_product(pd.tensor_product(a, b), c)
        assert abs(norm - 1.0) < 1e-12
        assert np.allclose(ket.amplitudes, chain.amplitudes, atol=1e-14)

    def test_orthonormal_pair_sum_has_unit_norm(self):
        e = [pd.Ket.basis(2, 0), pd.Ket.basis(2, 1)]
        s = 1 / np.sqrt(2)
        tri = pd.TriDecomposition(
            pd.FactoredDims((2, 2, 2)),
            (pd.TriTerm(s, e[0], e[0], e[0]), pd.TriTerm(s, e[1], e[1], e[1])),
        )
        _, norm = pd.build_tri_vector(tri)
        assert abs(norm - 1.0) < 1e-12

    def test_cancelling_terms_raise(self):
        rng = np.random.default_rng(4)
        a, b, c = (_random_ket(rng, 2) for _ in range(3))
        tri = pd.TriDecomposition(
            pd.FactoredDims((2, 2, 2)),
            (pd.TriTerm(1.0, a, b, c), pd.TriTerm(-1.0, a, b, c)),
        )
        with pytest.raises(pd.DegenerateInput):
            pd.build_tri_vector(tri)
