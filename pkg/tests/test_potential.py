import math

import numpy as np
import pytest
from scipy.special import eval_legendre

from hhladder import (
    BasisSet,
    Explicit,
    FullToKmax,
    HHLadderError,
    PotentialMatrix,
    QuadratureError,
    QuadratureSpec,
    TermLabel,
    assemble_W,
    enumerate_basis,
    hh_evaluate,
    legendre_triple,
)
from hhladder.hyperbasis import eta_factor
from hhladder.special import gauss_legendre


@pytest.mark.parametrize("Z,ell", [(1.0, 0), (2.0, 1), (3.0, 2)])
def test_one_electron_is_minus_z_identity(Z, ell):
    b = enumerate_basis(TermLabel.hydrogenic(Z, ell), FullToKmax(0))
    np.testing.assert_array_equal(assemble_W(b).W, [[-Z]])


def test_helium_w00_closed_form(he_W):
    # Y_00 is constant: nuclear part (16/(3 pi)) (-2 Z), repulsion (16/(3 pi)) / sqrt(2)
    W = he_W(0).W
    exact = 16 / (3 * math.pi) * (-2 * 2.0 + 1 / math.sqrt(2))
    assert W.shape == (1, 1)
    assert W[0, 0] < 0
    assert W[0, 0] == pytest.approx(exact, rel=1e-13)


def tensor_oracle(basis, Z, nodes=200):
    """Brute 2-D Gauss-Legendre over (eta, x) with the full potential."""
    e1, w1 = gauss_legendre(nodes // 2, 0, np.pi / 4)
    e2, w2 = gauss_legendre(nodes // 2, np.pi / 4, np.pi / 2)
    eta, we = np.concatenate([e1, e2]), np.concatenate([w1, w2])
    x, wx = gauss_legendre(nodes)
    E, X = np.meshgrid(eta, x, indexing="ij")
    pot = -Z / np.sin(E) - Z / np.cos(E) + 1 / np.sqrt(1 - np.sin(2 * E) * X)
    weight = np.outer(we, wx) * np.cos(E) ** 2 * np.sin(E) ** 2 * pot
    Y = [hh_evaluate(i, E, X) for i in basis]
    return np.array([[np.sum(weight * a * b) for b in Y] for a in Y])


def test_w00_tensor_oracle(he_W):
    oracle = tensor_oracle(he_W(0).basis, 2.0)
    assert he_W(0).W[0, 0] == pytest.approx(oracle[0, 0], abs=5e-5)


def test_small_basis_tensor_oracle(he_W):
    W = he_W(4)
    # the r12 -> 0 cusp limits the brute oracle to ~1e-5 at 400 x 400 nodes
    np.testing.assert_allclose(W.W, tensor_oracle(W.basis, 2.0, nodes=400), atol=5e-5)


def test_pure_repulsion():
    b = enumerate_basis(TermLabel.helium_like(0.0), FullToKmax(8))
    W = assemble_W(b).W
    # only the diagonal is sign-definite; W itself is positive definite
    assert np.all(np.diag(W) > 0)
    assert np.linalg.eigvalsh(W).min() > 0
    assert W[0, 0] == pytest.approx(16 / (3 * math.pi) / math.sqrt(2), rel=1e-13)


@pytest.mark.parametrize("args,want", [((0, 0, 0), 2.0), ((1, 1, 0), 2 / 3), ((2, 1, 0), 0.0),
                                       ((1, 1, 2), 4 / 15), ((3, 4, 2), 0.0), ((5, 0, 5), 2 / 11)])
def test_legendre_triple_examples(args, want):
    assert legendre_triple(*args) == pytest.approx(want, rel=1e-15, abs=0)


def test_legendre_triple_against_quadrature():
    x, w = gauss_legendre(40)
    for l1 in range(9):
        for q in range(13):
            for l2 in range(9):
                ref = float(np.sum(w * eval_legendre(l1, x) * eval_legendre(q, x) * eval_legendre(l2, x)))
                assert legendre_triple(l1, q, l2) == pytest.approx(ref, abs=1e-13)


def test_legendre_triple_rejects_negative():
    with pytest.raises(ValueError):
        legendre_triple(-1, 0, 1)


def test_exact_symmetry(he_W):
    W = he_W(20).W
    np.testing.assert_array_equal(W, W.T)
    assert not W.flags.writeable


def test_attractive_diagonal(he_W):
    assert np.all(np.diag(he_W(20).W) < 0)


def test_selection_rules(he_W):
    W = he_W(20)
    ell = W.basis.ell
    for i, li in enumerate(ell):
        for j, lj in enumerate(ell):
            allowed = any(legendre_triple(int(li), q, int(lj)) for q in range(abs(li - lj), li + lj + 1))
            if li != lj and not allowed:
                assert W.W[i, j] == 0.0


def test_nuclear_part_diagonal_in_ell(he_W):
    b = he_W(12).basis
    with_nuc = assemble_W(b)
    repulsion = assemble_W(BasisSet(TermLabel.helium_like(0.0), b.indices, b.policy))
    nuclear = with_nuc.W - repulsion.W
    ell = b.ell
    off = ell[:, None] != ell[None, :]
    assert np.max(np.abs(nuclear[off])) <= 1e-13


def test_quadrature_convergence(he_W):
    b = he_W(20).basis
    coarse = he_W(20).W
    fine = assemble_W(b, QuadratureSpec(eta_nodes=128), check_convergence=False).W
    assert np.max(np.abs(coarse - fine)) <= 1e-10


def test_too_few_nodes_flagged(helium):
    b = enumerate_basis(helium, FullToKmax(20))
    with pytest.raises(QuadratureError):
        assemble_W(b, QuadratureSpec(eta_nodes=4))


def test_unsplit_quadrature_converges_slowly(helium):
    b = enumerate_basis(helium, FullToKmax(4))
    with pytest.raises(QuadratureError):
        assemble_W(b, QuadratureSpec(eta_nodes=64, split_at_diagonal=False))


def test_qmax_truncation_changes_result(he_W):
    W = he_W(8)
    trunc = assemble_W(W.basis, QuadratureSpec(qmax_override=0)).W
    assert np.max(np.abs(trunc - W.W)) > 1e-3
    more = assemble_W(W.basis, QuadratureSpec(qmax_override=40)).W
    np.testing.assert_allclose(more, W.W, rtol=0, atol=1e-15)


def flipped_W(basis, Z, nodes=64):
    """Same matrix with the radius ordering swapped, eta -> pi/2 - eta, and x integrated by quadrature."""
    e1, w1 = gauss_legendre(nodes, 0, np.pi / 4)
    e2, w2 = gauss_legendre(nodes, np.pi / 4, np.pi / 2)
    eta, we = np.concatenate([e1, e2]), np.concatenate([w1, w2])
    flip = np.pi / 2 - eta
    x, wx = gauss_legendre(64)
    s, c = np.sin(flip), np.cos(flip)
    meas = we * s * s * c * c
    U = np.array([eta_factor(i, flip) for i in basis])
    Px = np.array([eval_legendre(i.ell, x) for i in basis])
    lmax = int(basis.ell.max())
    W = np.zeros((len(basis), len(basis)))
    for i in range(len(basis)):
        for j in range(len(basis)):
            ang0 = np.sum(wx * Px[i] * Px[j])
            val = ang0 * np.sum(meas * U[i] * U[j] * (-Z / c - Z / s))
            for q in range(2 * lmax + 1):
                ang = np.sum(wx * Px[i] * Px[j] * eval_legendre(q, x))
                rl, rg = np.minimum(s, c), np.maximum(s, c)
                val += ang * np.sum(meas * U[i] * U[j] * rl**q / rg ** (q + 1))
            W[i, j] = val
    return W


def test_radius_ordering_convention_invariance(he_W):
    W = he_W(8)
    np.testing.assert_allclose(flipped_W(W.basis, 2.0), W.W, rtol=0, atol=1e-12)


def test_permutation_equivariance(he_W):
    W = he_W(8)
    b = W.basis
    perm = np.random.default_rng(11).permutation(len(b))
    shuffled = BasisSet(b.term, tuple(b.indices[i] for i in perm), b.policy)
    np.testing.assert_array_equal(assemble_W(shuffled).W, W.W[np.ix_(perm, perm)])


def test_potential_matrix_validation(he_W):
    b = he_W(4).basis
    with pytest.raises(ValueError):
        PotentialMatrix(b, np.arange(16.0).reshape(4, 4))
    with pytest.raises(ValueError):
        PotentialMatrix(b, np.eye(3))


def test_inconsistent_attraction_detected(monkeypatch):
    import hhladder.potential as pot
    b = enumerate_basis(TermLabel.helium_like(2.0), Explicit([(0, 0)]))
    monkeypatch.setattr(pot, "_two_electron_W", lambda basis, quad: np.array([[1.0]]))
    with pytest.raises(HHLadderError):
        assemble_W(b)
