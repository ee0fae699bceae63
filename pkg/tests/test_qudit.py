
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symsector.errors import ConfigError, SizeCapError
from symsector.oracles import shift_matrix, site_permutation_matrix
from symsector.qudit import (DensityOperator, PureState, QuditGeometry, apply_site_permutation,
                             apply_translation, basis_state, check_size, decode_index,
                             digits_array, encode_index, hermitian_spectrum, partial_trace,
                             reduced_density_matrices, rotate_indices, rotate_string)

from conftest import random_state


@pytest.mark.parametrize("digits,d,expected", [
    ([0, 0, 0, 0], 2, 0),
    ([1, 0, 1, 0], 2, 10),
    ([0, 0, 0, 1], 2, 1),
    ([1, 0, 0, 0], 2, 8),
    ([2, 1], 3, 7),
    ([3, 3, 3], 4, 63),
])
def test_encode_examples(digits, d, expected):
    assert encode_index(digits, d) == expected
    assert decode_index(expected, len(digits), d) == tuple(digits)


@given(st.integers(2, 5), st.integers(1, 6), st.data())
def test_encode_decode_roundtrip(d, n, data):
    index = data.draw(st.integers(0, d**n - 1))
    digits = decode_index(index, n, d)
    assert encode_index(digits, d, n) == index
    assert digits_array([index], n, d)[0].tolist() == list(digits)


@pytest.mark.parametrize("bad", [[2, 0], [-1, 0], [0.5, 0]])
def test_encode_rejects_bad_digits(bad):
    with pytest.raises(ConfigError):
        encode_index(bad, 2)


def test_decode_rejects_out_of_range():
    with pytest.raises(ConfigError):
        decode_index(16, 4, 2)


def test_rotate_string_examples():
    assert rotate_string((1, 0, 0, 0)) == (0, 1, 0, 0)
    assert rotate_string((1, 2, 3)) == (3, 1, 2)
    assert rotate_string((1, 2, 3), 3) == (1, 2, 3)
    assert rotate_string((1, 2, 3), 2) == (2, 3, 1)


@given(st.integers(2, 4), st.integers(2, 6), st.integers(0, 12))
@settings(max_examples=50)
def test_rotate_indices_matches_strings(d, n, k):
    idx = np.arange(d**n)
    got = rotate_indices(idx, n, d, k)
    expected = [encode_index(rotate_string(decode_index(int(i), n, d), k), d) for i in idx]
    assert got.tolist() == expected


@pytest.mark.parametrize("n,d,n_A", [(1, 2, 1), (3, 1, 1), (4, 2, 0), (4, 2, 4)])
def test_geometry_validation(n, d, n_A):
    with pytest.raises(ConfigError):
        QuditGeometry(n, d, n_A)


def test_geometry_dims():
    g = QuditGeometry(5, 3, 2)
    assert (g.n_B, g.dim, g.dim_A, g.dim_B) == (3, 243, 9, 27)


def test_size_cap(monkeypatch):
    monkeypatch.setenv("SYMSECTOR_SIZE_CAP", "100")
    assert check_size(6, 2) == 64
    with pytest.raises(SizeCapError):
        check_size(7, 2)


def test_pure_state_requires_normalisation():
    g = QuditGeometry(2, 2, 1)
    with pytest.raises(ConfigError):
        PureState(g, np.ones(4))
    with pytest.raises(ConfigError):
        PureState(g, np.ones(3) / np.sqrt(3))


def test_translation_moves_last_site_to_front():
    g = QuditGeometry(4, 2, 2)
    out = apply_translation(basis_state(g, [1, 1, 0, 0]))
    assert out.amplitudes[encode_index([0, 1, 1, 0], 2)] == 1


@pytest.mark.parametrize("n,d", [(3, 2), (4, 2), (3, 3)])
def test_translation_matches_oracle(n, d, rng):
    g = QuditGeometry(n, d, 1)
    psi = random_state(rng, d**n)
    got = apply_translation(PureState(g, psi)).amplitudes
    np.testing.assert_allclose(got, shift_matrix(n, d) @ psi, atol=1e-14)
    np.testing.assert_allclose(apply_translation(PureState(g, psi), n).amplitudes, psi, atol=1e-14)


def test_cyclic_permutation_is_translation(rng):
    g = QuditGeometry(4, 3, 2)
    state = PureState(g, random_state(rng, g.dim))
    np.testing.assert_allclose(apply_site_permutation(state, [2, 3, 4, 1]).amplitudes,
                               apply_translation(state).amplitudes, atol=1e-14)


@given(st.permutations(range(1, 5)), st.permutations(range(1, 5)))
@settings(max_examples=30)
def test_permutation_composition(sigma, tau):
    g = QuditGeometry(4, 2, 2)
    psi = np.random.default_rng(7).standard_normal(16).astype(complex)
    state = PureState(g, psi / np.linalg.norm(psi))
    composed = [sigma[tau[i] - 1] for i in range(4)]
    two_step = apply_site_permutation(apply_site_permutation(state, tau), sigma)
    np.testing.assert_allclose(two_step.amplitudes,
                               apply_site_permutation(state, composed).amplitudes, atol=1e-14)
    oracle = site_permutation_matrix(4, 2, [p - 1 for p in composed])
    np.testing.assert_allclose(oracle @ state.amplitudes, two_step.amplitudes, atol=1e-14)


def test_partial_trace_product_and_bell():
    g = QuditGeometry(2, 2, 1)
    rho = partial_trace(basis_state(g, [0, 1]))
    np.testing.assert_allclose(rho.matrix, [[1, 0], [0, 0]])
    bell = PureState(g, np.array([1, 0, 0, 1]) / np.sqrt(2))
    np.testing.assert_allclose(partial_trace(bell).matrix, np.eye(2) / 2, atol=1e-15)
    assert partial_trace(bell).purity() == pytest.approx(0.5)


@pytest.mark.parametrize("n,d,n_A", [(4, 2, 1), (4, 2, 3), (5, 2, 2), (3, 3, 1)])
def test_schmidt_spectra_agree(n, d, n_A, rng):
    g = QuditGeometry(n, d, n_A)
    state = PureState(g, random_state(rng, g.dim))
    a = hermitian_spectrum(partial_trace(state, "A"))
    b = hermitian_spectrum(partial_trace(state, "B"))
    m = min(len(a), len(b))
    np.testing.assert_allclose(a[:m], b[:m], atol=1e-12)
    assert a.sum() == pytest.approx(1.0)


def test_partial_trace_against_einsum(rng):
    g = QuditGeometry(5, 2, 2)
    psi = random_state(rng, g.dim)
    full = np.outer(psi, psi.conj()).reshape(4, 8, 4, 8)
    expected = np.einsum("ajbj->ab", full)
    np.testing.assert_allclose(partial_trace(PureState(g, psi)).matrix, expected, atol=1e-14)
    batch = reduced_density_matrices(np.stack([psi, psi]), g)
    np.testing.assert_allclose(batch[1], expected, atol=1e-14)


def test_spectrum_descending_and_clamped():
    eigs = hermitian_spectrum(np.diag([0.2, 0.8, -1e-17]))
    assert eigs.tolist() == [0.8, 0.2, 0.0]


@pytest.mark.parametrize("matrix", [
    [[0.5, 0.1], [0.2, 0.5]],
    [[0.6, 0.0], [0.0, 0.6]],
    [[1.2, 0.0], [0.0, -0.2]],
])
def test_density_operator_validation(matrix):
    with pytest.raises(ConfigError):
        DensityOperator(np.array(matrix))
