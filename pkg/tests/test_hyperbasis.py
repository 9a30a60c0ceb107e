import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from hhladder import (
    BasisError,
    BasisSet,
    Explicit,
    FullToKmax,
    HHIndex,
    MainOnly,
    TermLabel,
    UnsupportedTermError,
    enumerate_basis,
    gram_matrix,
    hh_evaluate,
    lambda2_check,
    reduced_measure,
)
from hhladder.hyperbasis import FiniteDifferenceGrid, normalization
from hhladder.quadrature import QuadratureSpec
from hhladder.special import gauss_legendre


def pairs(basis):
    return [(i.K, i.ell) for i in basis]


def test_full_to_kmax_4(helium):
    # K <= 4, ell <= K/2, K/2 - ell even
    assert pairs(enumerate_basis(helium, FullToKmax(4))) == [(0, 0), (2, 1), (4, 0), (4, 2)]


def test_full_to_kmax_by_brute_force(helium):
    for Kmax in (0, 6, 12):
        want = sorted((K, l) for K in range(Kmax + 1) for l in range(Kmax + 1)
                      if K % 2 == 0 and 2 * l <= K and (K // 2 - l) % 2 == 0)
        assert pairs(enumerate_basis(helium, FullToKmax(Kmax))) == want


def test_main_only(helium):
    assert pairs(enumerate_basis(helium, MainOnly(12))) == [(0, 0), (4, 0), (8, 0), (12, 0)]


def test_full_to_kmax_0(helium):
    assert pairs(enumerate_basis(helium, FullToKmax(0))) == [(0, 0)]


def test_basis_size_at_kmax_40(helium):
    assert len(enumerate_basis(helium, FullToKmax(40))) == 121


def test_one_electron_basis_is_single_index():
    b = enumerate_basis(TermLabel.hydrogenic(1.0, 2), FullToKmax(10))
    assert pairs(b) == [(2, 2)]


def test_explicit_is_sorted_and_validated(helium):
    b = enumerate_basis(helium, Explicit([(4, 0), (0, 0)]))
    assert pairs(b) == [(0, 0), (4, 0)]
    for bad in ([(4, 1)], [(3, 0)], [(4, 3)], [(0, 0), (0, 0)], []):
        with pytest.raises(BasisError):
            enumerate_basis(helium, Explicit(bad))


@pytest.mark.parametrize("Kmax", [3, -2, 2.0])
def test_bad_kmax(helium, Kmax):
    with pytest.raises(BasisError):
        enumerate_basis(helium, FullToKmax(Kmax))


@pytest.mark.parametrize("kwargs", [
    dict(L=1, M=0, S=0, Sz=0, parity=-1, Ne=2, Z=2.0),
    dict(L=0, M=0, S=1, Sz=0, parity=1, Ne=2, Z=2.0),
    dict(L=0, M=0, S=0, Sz=0, parity=1, Ne=3, Z=3.0),
    dict(L=1, M=2, S=0.5, Sz=0.5, parity=-1, Ne=1, Z=1.0),
    dict(L=0, M=0, S=0, Sz=0, parity=0, Ne=2, Z=2.0),
    dict(L=1, M=0, S=0.5, Sz=0.5, parity=1, Ne=1, Z=1.0),
])
def test_unsupported_terms_rejected(kwargs):
    with pytest.raises(UnsupportedTermError):
        TermLabel(**kwargs)


def test_enumeration_is_deterministic(helium):
    assert enumerate_basis(helium, FullToKmax(16)) == enumerate_basis(helium, FullToKmax(16))


def closed_form_normalization(K, ell):
    """Jacobi-weight norm after eta -> t = cos(2 eta)."""
    m = (K - 2 * ell) // 2
    a = ell + 0.5
    log_jac = ((2 * a + 1) * math.log(2) + 2 * gammaln(m + a + 1)
               - math.log(2 * m + 2 * a + 1) - gammaln(m + 1) - gammaln(m + 2 * a + 1))
    eta_norm = math.exp(log_jac) / (2 * 4 ** (ell + 1))
    return 1.0 / math.sqrt(eta_norm * 2.0 / (2 * ell + 1))


def test_normalization_matches_closed_form(helium):
    for idx in enumerate_basis(helium, FullToKmax(40)):
        assert normalization(idx.K, idx.ell) == pytest.approx(closed_form_normalization(idx.K, idx.ell), rel=1e-12)


def test_k0_harmonic_is_constant():
    eta = np.linspace(0, np.pi / 2, 7)
    x = np.linspace(-1, 1, 7)
    vals = hh_evaluate(HHIndex(0, 0), eta[:, None], x[None, :])
    np.testing.assert_allclose(vals, normalization(0, 0), rtol=1e-15)
    # unit norm under cos^2 sin^2 on [0, pi/2] x [-1, 1], whose volume is pi/8
    assert normalization(0, 0) == pytest.approx(math.sqrt(8 / math.pi), rel=1e-14)


def test_k4_l0_at_quarter_pi():
    assert float(hh_evaluate(HHIndex(4, 0), np.pi / 4, 0.0)) == pytest.approx(
        normalization(4, 0) * -0.625, rel=1e-14)


@given(K2=st.integers(0, 15), data=st.data(), eta=st.floats(0, np.pi / 2), x=st.floats(-1, 1))
@settings(max_examples=200, deadline=None)
def test_exchange_symmetry(K2, data, eta, x):
    K = 2 * K2
    ell = data.draw(st.sampled_from([l for l in range(K // 2 + 1) if (K // 2 - l) % 2 == 0]))
    idx = HHIndex(K, ell)
    a = float(hh_evaluate(idx, eta, x))
    b = float(hh_evaluate(idx, np.pi / 2 - eta, x))
    assert a == pytest.approx(b, rel=1e-9, abs=1e-9)


def test_domain_checks():
    with pytest.raises(ValueError):
        hh_evaluate(HHIndex(0, 0), 2.0, 0.0)
    with pytest.raises(ValueError):
        hh_evaluate(HHIndex(0, 0), 0.5, 1.5)


def test_reduced_measure_values():
    assert float(reduced_measure(0.0, 0.3)) == 0.0
    assert float(reduced_measure(np.pi / 4, -0.7)) == pytest.approx(0.25, rel=1e-15)
    e, we = gauss_legendre(40, 0, np.pi / 2)
    x, wx = gauss_legendre(4)
    total = np.sum(np.outer(we, wx) * reduced_measure(e[:, None], x[None, :]))
    assert total == pytest.approx(np.pi / 8, rel=1e-14)


def test_gram_single():
    b = enumerate_basis(TermLabel.helium_like(2.0), FullToKmax(0))
    np.testing.assert_allclose(gram_matrix(b), [[1.0]], atol=1e-12)


def test_gram_identity_kmax_8(helium):
    b = enumerate_basis(helium, FullToKmax(8))
    assert np.max(np.abs(gram_matrix(b) - np.eye(len(b)))) <= 1e-10


def test_gram_permutation(helium):
    b = enumerate_basis(helium, FullToKmax(8))
    perm = np.random.default_rng(3).permutation(len(b))
    shuffled = BasisSet(helium, tuple(b.indices[i] for i in perm), b.policy)
    G = gram_matrix(b)
    np.testing.assert_array_equal(gram_matrix(shuffled), G[np.ix_(perm, perm)])


def test_gram_rejects_tiny_quadrature():
    from hhladder.errors import QuadratureError
    with pytest.raises(QuadratureError):
        QuadratureSpec(eta_nodes=1)


def test_lambda2_constant_is_exact():
    assert lambda2_check(HHIndex(0, 0)) == 0.0


@pytest.mark.parametrize("idx", [HHIndex(4, 0), HHIndex(4, 2)])
def test_lambda2_k4(idx):
    grid = FiniteDifferenceGrid(step=1e-3)
    assert lambda2_check(idx, grid) <= 1e-4


def test_lambda2_all_k_to_12(helium):
    for idx in enumerate_basis(helium, FullToKmax(12)):
        assert lambda2_check(idx) <= 1e-4, idx


def test_lambda2_detects_wrong_eigenvalue():
    # the K = 4 harmonic is not an eigenfunction with K = 6's eigenvalue
    from hhladder.hyperbasis import apply_lambda2, eta_factor
    eta = FiniteDifferenceGrid().nodes()
    idx = HHIndex(4, 0)
    resid = apply_lambda2(idx, eta, 1e-3) - 6 * 10 * eta_factor(idx, eta)
    assert np.max(np.abs(resid)) > 1.0


def test_lambda2_grid_must_avoid_endpoints():
    with pytest.raises(ValueError):
        lambda2_check(HHIndex(4, 0), FiniteDifferenceGrid(step=1e-3, lo=0.0))
    with pytest.raises(ValueError):
        lambda2_check(HHIndex(4, 0), FiniteDifferenceGrid(step=1e-3, hi=np.pi / 2))


@pytest.mark.parametrize("K,ell", [(0, 0), (4, 0), (4, 2), (8, 2), (10, 1), (12, 6)])
def test_polynomial_degrees(K, ell):
    """Y / (sin cos)^l is a polynomial of degree m in cos(2 eta) and l in x."""
    m = (K - 2 * ell) // 2
    t = np.cos(np.pi * (np.arange(20) + 0.5) / 20)
    x = np.cos(np.pi * (np.arange(20) + 0.5) / 20)
    eta = 0.5 * np.arccos(t)
    sc = (np.sin(eta) * np.cos(eta)) ** ell
    vals = hh_evaluate(HHIndex(K, ell), eta[:, None], x[None, :]) / sc[:, None]
    V = np.polynomial.legendre.legvander2d(np.repeat(t, 20), np.tile(x, 20), [m + 3, ell + 3])
    coef, *_ = np.linalg.lstsq(V, vals.ravel(), rcond=None)
    coef = coef.reshape(m + 4, ell + 4)
    scale = np.max(np.abs(coef))
    assert np.all(np.abs(coef[m + 1:, :]) <= 1e-9 * scale)
    assert np.all(np.abs(coef[:, ell + 1:]) <= 1e-9 * scale)
    assert abs(coef[m, ell]) > 1e-6 * scale
