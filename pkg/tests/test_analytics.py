import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symsector import oracles
from symsector.analytics import (averaged_reduced_matrix, concentration_params,
                                 concentration_probability, cross_type_max, effective_dimension,
                                 eta0, fannes_audenaert_bound, gamma_sum, is_prime, m_theta,
                                 momentum_diagonal, offdiagonal_bound, omega_complement,
                                 omega_reduced, page_lower_bound, page_mean_entropy,
                                 permutation_omega, prop1_interval, prop2_interval, prop4_bound,
                                 purity_upper_bound, sbar_momentum, sector_mean_purity)
from symsector.errors import ConfigError, RegimeError, SectorNonexistentError
from symsector.experiment import ExperimentConfig, compute_chunk
from symsector.sectors import SectorSpec, sector_basis, sector_dimension

ANCHOR = SectorSpec.make("mom", 5, 2, 2, 0)


def test_anchor_omega():
    omega = omega_reduced(ANCHOR)
    np.testing.assert_allclose(np.diag(omega.matrix).real, [0.3, 0.2, 0.2, 0.3], atol=1e-15)
    assert omega.matrix[1, 2].real == pytest.approx(0.1, abs=1e-15)
    assert omega.purity == pytest.approx(0.28, abs=1e-14)
    assert omega.purity <= purity_upper_bound(5, 2, 2, 0) == pytest.approx(0.29125)
    assert abs(omega.matrix[1, 2]) <= offdiagonal_bound(sector_dimension(ANCHOR)) == 0.125


@pytest.mark.parametrize("kind,n,d,n_A,k", [
    ("mom", 5, 2, 2, 0), ("mom", 5, 2, 2, 3), ("mom", 6, 2, 3, 2), ("mom", 4, 3, 1, 1),
    ("sym", 6, 2, 2, 0), ("sym", 3, 3, 1, 0), ("antisym", 3, 4, 2, 0), ("full", 4, 2, 1, 0),
])
def test_omega_matches_brute_force(kind, n, d, n_A, k):
    spec = SectorSpec.make(kind, n, d, n_A, k)
    expected = oracles.brute_force_omega(kind, n, d, n_A, k)
    np.testing.assert_allclose(omega_reduced(spec).matrix, expected, atol=1e-12)
    # the complement side is the same construction with the cut mirrored
    mirrored = oracles.brute_force_omega(kind, n, d, n - n_A, k)
    if kind != "mom":
        np.testing.assert_allclose(omega_complement(spec).matrix, mirrored, atol=1e-12)


@pytest.mark.parametrize("n,d,sign", [(4, 2, 1), (6, 2, 1), (8, 2, 1), (3, 4, 1), (3, 4, -1),
                                        (2, 2, -1), (2, 3, -1)])
def test_permutation_omega_closed_form(n, d, sign):
    kind = "sym" if sign > 0 else "antisym"
    for n_A in range(1, n):
        got = omega_reduced(SectorSpec.make(kind, n, d, n_A)).matrix
        assert np.abs(got - permutation_omega(n_A, d, sign)).max() < 1e-10


def test_full_sector_is_flat():
    spec = SectorSpec.make("full", 6, 2, 2)
    np.testing.assert_allclose(omega_reduced(spec).matrix, np.eye(4) / 4, atol=1e-15)
    assert effective_dimension(spec) == pytest.approx(16)
    assert prop1_interval(spec, 0.1).center == pytest.approx(2 * math.log(2))


def test_symmetric_effective_dimension():
    spec = SectorSpec.make("sym", 10, 2, 5)
    assert effective_dimension(spec) == pytest.approx(6)
    assert prop1_interval(spec, 0.1).center == pytest.approx(math.log(6))


def test_averaged_matrix_is_state():
    basis = sector_basis(SectorSpec.make("mom", 7, 2, 3, 2))
    m = averaged_reduced_matrix(basis, 3, "A")
    assert np.trace(m).real == pytest.approx(1.0)
    np.testing.assert_allclose(m, m.conj().T, atol=1e-15)
    assert np.linalg.eigvalsh(m).min() > -1e-12


@pytest.mark.parametrize("n,k", [(5, 0), (5, 1), (5, 4), (7, 0), (7, 3), (3, 1)])
def test_m_theta_is_forced_by_unit_trace(n, k):
    # Summing the diagonal formula over all d**n_A strings must give 1.
    d = 2
    for n_A in range(1, n):
        total = sum(momentum_diagonal(n, d, n_A, k, [(x >> (n_A - 1 - i)) & 1 for i in range(n_A)])
                    for x in range(d**n_A))
        assert total == pytest.approx(1.0, abs=1e-14)
    assert m_theta(n, k) == (n - 1 if k == 0 else -1)


@pytest.mark.parametrize("a_A,expected", [((0, 0), 0.3), ((0, 1), 0.2), ((1, 0), 0.2), ((1, 1), 0.3)])
def test_diagonal_examples(a_A, expected):
    assert momentum_diagonal(5, 2, 2, 0, a_A) == pytest.approx(expected)


@pytest.mark.parametrize("n", [3, 5, 7])
def test_momentum_structure(n):
    for n_A in range(1, n):
        for k in range(n):
            spec = SectorSpec.make("mom", n, 2, n_A, k)
            omega = omega_reduced(spec).matrix
            assert cross_type_max(omega, n_A, 2) < 1e-12
            off = omega - np.diag(np.diag(omega))
            assert np.abs(off).max(initial=0) <= 1 / sector_dimension(spec) + 1e-12
            assert omega_reduced(spec).purity <= purity_upper_bound(n, 2, n_A, k) + 1e-12


def test_prime_only_formulas():
    for fn in (lambda: momentum_diagonal(6, 2, 2, 0, (0, 0)), lambda: purity_upper_bound(4, 2, 2, 0),
               lambda: sbar_momentum(9, 2, 2, 0), lambda: prop4_bound(10, 2, 5, 0, 0.1)):
        with pytest.raises(RegimeError):
            fn()
    assert [is_prime(x) for x in (1, 2, 3, 4, 5, 9, 11)] == [False, True, True, False, True, False, True]


@pytest.mark.parametrize("n_A,d,gamma", [(1, 2, 0), (1, 5, 0), (2, 2, 2), (3, 2, 12), (2, 3, 6)])
def test_gamma_sum(n_A, d, gamma):
    assert gamma_sum(n_A, d) == gamma


def test_sbar_anchor():
    sbar = sbar_momentum(5, 2, 2, 0)
    assert sbar.exact == pytest.approx(-math.log(0.29125))
    assert sbar.exact <= omega_reduced(ANCHOR).entropy
    assert sbar.asymptotic == pytest.approx(2 * math.log(2) - 25 / 16)


@pytest.mark.parametrize("x,expected", [(0.0, 0.0), (0.1, 0.2302585), (0.5, 1 / math.e), (3.0, 1 / math.e)])
def test_eta0(x, expected):
    assert eta0(x) == pytest.approx(expected, rel=1e-6)


def test_eta0_non_decreasing():
    values = [eta0(x) for x in np.linspace(0, 1, 1000)]
    assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))
    with pytest.raises(ConfigError):
        eta0(-0.1)


def test_fannes_audenaert():
    assert fannes_audenaert_bound(0.0, 4) == 0.0
    assert fannes_audenaert_bound(2.0, 2) == pytest.approx(1.7542, abs=5e-5)


@given(st.floats(0, 2), st.floats(0, 2))
def test_fannes_audenaert_monotone(a, b):
    lo, hi = sorted((a, b))
    assert fannes_audenaert_bound(lo, 8) <= fannes_audenaert_bound(hi, 8)


def test_concentration_probability():
    assert concentration_probability(1024, 1.0) == pytest.approx(0.1596, abs=1e-4)
    assert concentration_probability(2048, 0.3) == pytest.approx(concentration_probability(1024, 0.3) ** 2)
    assert concentration_probability(10, 1e-6) == pytest.approx(1.0)


def test_prop2_examples():
    flat = prop2_interval(10, 2, 5, 0.1, +1)
    assert flat.eps_prime == pytest.approx(1.1) and not flat.informative
    assert flat.center == pytest.approx(math.log(6))
    far = prop2_interval(100, 2, 5, 0.1, +1)
    assert far.eps_prime == pytest.approx(0.1 + math.sqrt(6 / 96))
    assert prop2_interval(50, 100, 5, 0.1, -1).center == pytest.approx(math.log(math.comb(100, 5)))
    with pytest.raises(SectorNonexistentError):
        prop2_interval(5, 2, 2, 0.1, -1)


def test_prop1_uses_sector_r_bound():
    spec = SectorSpec.make("sym", 8, 2, 3)
    params = concentration_params(spec, 0.2)
    assert params.R_bound == 4
    assert params.eps_prime >= params.eps
    mom = concentration_params(SectorSpec.make("mom", 7, 2, 2, 1), 0.5)
    assert mom.R_bound == 4
    assert mom.eps_prime == pytest.approx(
        0.5 + math.sqrt(omega_reduced(SectorSpec.make("mom", 7, 2, 2, 1)).rank / mom.D_eff))


def test_prop4():
    bound = prop4_bound(5, 2, 2, 0, 0.1)
    assert bound.lower_bound <= 2 * math.log(2)
    assert bound.sbar == pytest.approx(-math.log(0.29125))
    looser = [prop4_bound(7, 2, 2, 1, eps).lower_bound for eps in (0.05, 0.1, 0.2, 0.3)]
    assert all(b < a for a, b in zip(looser, looser[1:]))


def test_page_values():
    assert page_lower_bound(10, 2, 5) == pytest.approx(5 * math.log(2) - 0.5)
    assert page_lower_bound(10, 2, 0) == pytest.approx(-(2.0**-11))
    with pytest.raises(RegimeError):
        page_lower_bound(10, 2, 6)
    assert page_mean_entropy(32, 32) == pytest.approx(2.96631, abs=1e-5)
    assert page_mean_entropy(2, 2) == pytest.approx(1 / 3 + 1 / 4 - 1 / 4)


def test_sector_mean_purity_full():
    # Haar average of tr rho_A^2 for dA x dB: (dA + dB) / (dA dB + 1)
    assert sector_mean_purity(SectorSpec.make("full", 10, 2, 5)) == pytest.approx(64 / 1025)


@pytest.mark.parametrize("n", [6, 8, 10])
def test_sampled_full_sector_mean_exceeds_page_bound(n):
    config = ExperimentConfig(sector="full", n=n, d=2, n_A=n // 2, samples=2000, seed=11)
    spec = config.spec()
    text = compute_chunk(sector_basis(spec), spec.geometry, 2.0, 11, 0, 2000)
    e1 = np.array([float(row.split(",")[1]) for row in text.splitlines()])
    assert e1.mean() >= page_lower_bound(n, 2, n // 2)
