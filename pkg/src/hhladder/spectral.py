"""Energy ladders, hyperradial wavefunctions and the variational cross-check.

Rung n (n >= 0) is described by the symmetric matrix

    A(n)_ij = Gamma(K_i + K_j + 2n + 3Ne) / sqrt(Gamma(2K_i + 2n + 3Ne) Gamma(2K_j + 2n + 3Ne))
              * 2 W_ij / (K_i + K_j + 3Ne - 1 + 2n)

whose lowest eigenvalue lambda < 0 gives E = -lambda^2 / 2 and the trial state
Psi_n(r) = sum_i C_i N_i r^(K_i + n) exp(lambda r) Y_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize
from numpy.typing import ArrayLike, NDArray

from hhladder import special
from hhladder.errors import NoBoundStateError, OracleError
from hhladder.hyperbasis import BasisSet, Policy, TermLabel, enumerate_basis
from hhladder.ladder import build_alpha
from hhladder.potential import PotentialMatrix, QuadratureSpec, assemble_W, _symmetrize


@dataclass(frozen=True, eq=False)
class SpectralMatrix:
    n: int
    A: NDArray[np.float64]
    basis: BasisSet


def gamma_ratio_matrix(K: NDArray[np.int64], n: int, Ne: int) -> NDArray[np.float64]:
    """Overlaps of unit-norm r^(K+n) exp(lambda r) functions; independent of lambda."""
    shift = 2 * n + 3 * Ne
    size = len(K)
    R = np.empty((size, size))
    for i in range(size):
        for j in range(i, size):
            Ki, Kj = int(K[i]), int(K[j])
            R[i, j] = math.exp(special.log_gamma_ratio(Ki + Kj + shift, 2 * Ki + shift, 2 * Kj + shift))
    return _symmetrize(R)


def build_spectral_matrix(n: int, W: PotentialMatrix, Ne: int | None = None) -> SpectralMatrix:
    if n < 0:
        raise ValueError(f"rung must be non-negative, got {n}")
    Ne = W.Ne if Ne is None else Ne
    A = gamma_ratio_matrix(W.basis.K, n, Ne) * build_alpha(n + 1, W, Ne)
    return SpectralMatrix(n, _symmetrize(A), W.basis)


def _sign_fixed(v: NDArray[np.float64]) -> NDArray[np.float64]:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def lowest_eigenvalue(A: ArrayLike, rung: int = 0) -> tuple[float, NDArray[np.float64]]:
    """Algebraically smallest eigenpair of a symmetric matrix.

    Raises ``NoBoundStateError`` when that eigenvalue is not negative. Within a
    degenerate lowest eigenspace the returned vector is arbitrary.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.all(np.isfinite(A)):
        raise ValueError("need a finite square matrix")
    vals, vecs = np.linalg.eigh(A)
    lam = float(vals[0])
    if lam >= 0:
        raise NoBoundStateError(rung, lam)
    return lam, _sign_fixed(vecs[:, 0])


@dataclass(frozen=True, eq=False)
class BoundState:
    n: int
    lam: float
    energy: float
    C: NDArray[np.float64]

    @classmethod
    def from_eigenpair(cls, n: int, lam: float, C: NDArray[np.float64]) -> "BoundState":
        return cls(n, lam, -0.5 * lam * lam, C)


@dataclass
class SpectrumResult:
    term: TermLabel
    basis: BasisSet
    W: PotentialMatrix
    states: list[BoundState] = field(default_factory=list)
    failure: Optional[NoBoundStateError] = None

    @property
    def energies(self) -> list[float]:
        return [s.energy for s in self.states]

    def raise_for_failure(self) -> None:
        if self.failure is not None:
            raise self.failure


def energy_ladder(term: TermLabel, policy: Policy, n_max: int, quad: QuadratureSpec | None = None,
                  W: PotentialMatrix | None = None) -> SpectrumResult:
    """Lowest eigenvalue of A(n) for n = 0..n_max, sharing one W.

    The ladder stops at the first rung without a bound state; that failure is
    kept on the result rather than raised.
    """
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    if W is None:
        W = assemble_W(enumerate_basis(term, policy), quad)
    result = SpectrumResult(term, W.basis, W)
    for n in range(n_max + 1):
        A = build_spectral_matrix(n, W).A
        try:
            lam, C = lowest_eigenvalue(A, rung=n)
        except NoBoundStateError as exc:
            result.failure = exc
            break
        result.states.append(BoundState.from_eigenpair(n, lam, C))
    return result


def ground_matrix_energies(W: PotentialMatrix, count: int) -> list[float]:
    """Diagnostic only: -mu^2/2 for the lowest ``count`` negative eigenvalues of A(0)."""
    vals = np.linalg.eigvalsh(build_spectral_matrix(0, W).A)
    return [-0.5 * v * v for v in vals[:count] if v < 0]


@dataclass(frozen=True, eq=False)
class RadialWavefunction:
    """Channel functions psi_i(r) = C_i N_i r^(K_i + n) exp(lambda r), N_i making each unit-norm."""

    state: BoundState
    basis: BasisSet
    Ne: int

    @property
    def powers(self) -> NDArray[np.int64]:
        return self.basis.K + self.state.n

    @property
    def log_norms(self) -> NDArray[np.float64]:
        p = 2 * self.powers + 3 * self.Ne
        two_k = 2.0 * abs(self.state.lam)
        return np.array([0.5 * (pi * math.log(two_k) - special.log_gamma(pi)) for pi in p])

    def channels(self, r: ArrayLike) -> NDArray[np.float64]:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            logr = np.log(r)
            expo = self.log_norms[:, None] + self.powers[:, None] * logr[None, :] + self.state.lam * r[None, :]
            out = self.state.C[:, None] * np.exp(expo)
        # r^0 at r = 0 is 1, not exp(0 * -inf)
        zero = r == 0
        if zero.any():
            out[:, zero] = np.where(self.powers[:, None] == 0,
                                    self.state.C[:, None] * np.exp(self.log_norms)[:, None], 0.0)
        return out

    __call__ = channels


def radial_wavefunction(state: BoundState, basis: BasisSet, Ne: int | None = None) -> RadialWavefunction:
    if state.lam >= 0:
        raise ValueError("bound states need lambda < 0")
    return RadialWavefunction(state, basis, basis.term.Ne if Ne is None else Ne)


def radial_overlap(a: RadialWavefunction, b: RadialWavefunction) -> float:
    """<a|b> with measure r^(3Ne-1) dr, orthonormal harmonics; closed form in Gamma."""
    if a.basis.indices != b.basis.indices:
        raise ValueError("states must share one basis")
    rate = abs(a.state.lam + b.state.lam)
    total = 0.0
    for i, (pa, pb) in enumerate(zip(a.powers, b.powers)):
        p = int(pa + pb) + 3 * a.Ne
        log_int = special.log_gamma(p) - p * math.log(rate)
        total += a.state.C[i] * b.state.C[i] * math.exp(a.log_norms[i] + b.log_norms[i] + log_int)
    return total


def overlap_matrix(states: Sequence[RadialWavefunction]) -> NDArray[np.float64]:
    m = len(states)
    S = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            S[i, j] = S[j, i] = radial_overlap(states[i], states[j])
    return S


@dataclass(frozen=True, eq=False)
class OrthonormalStates:
    """Gram-Schmidt combinations phi_k = sum_a T[k, a] psi_a of the input states."""

    states: tuple[RadialWavefunction, ...]
    T: NDArray[np.float64]
    overlap_before: NDArray[np.float64]

    def gram(self) -> NDArray[np.float64]:
        return self.T @ self.overlap_before @ self.T.T

    def channels(self, k: int, r: ArrayLike) -> NDArray[np.float64]:
        return sum(self.T[k, a] * s.channels(r) for a, s in enumerate(self.states))


def orthogonalize_states(states: Sequence[RadialWavefunction]) -> OrthonormalStates:
    states = tuple(states)
    if not states:
        raise ValueError("nothing to orthogonalize")
    S = overlap_matrix(states)
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise ValueError("states are linearly dependent") from exc
    if np.min(np.abs(np.diag(L))) < 1e-10:
        raise ValueError("states are linearly dependent")
    T = scipy.linalg.solve_triangular(L, np.eye(len(states)), lower=True)
    return OrthonormalStates(states, T, S)


def _raw_pencil(alpha: NDArray[np.float64], K: NDArray[np.int64], Ne: int, lam: float):
    """Hyperradial matrices of alpha_1 and of the identity between r^K exp(lam r) functions."""
    two_k = 2.0 * abs(lam)
    size = len(K)
    A = np.empty((size, size))
    for i in range(size):
        for j in range(size):
            p = int(K[i] + K[j]) + 3 * Ne
            A[i, j] = math.exp(special.log_gamma(p) - p * math.log(two_k)) * alpha[i, j]
    p = 2 * K + 3 * Ne
    B = np.diag([math.exp(special.log_gamma(int(q)) - int(q) * math.log(two_k)) for q in p])
    return A, B


def variational_oracle(term: TermLabel, policy: Policy, quad: QuadratureSpec | None = None,
                       W: PotentialMatrix | None = None) -> tuple[float, NDArray[np.float64]]:
    """Self-consistent lambda of the generalized problem (A(lam) - mu B(lam)) C = 0.

    Solves the unnormalized pencil at trial slopes and root-finds mu(lam) = lam
    on (-10 Z, 0). Returns C in the unit-norm channel basis so it compares
    directly with ``lowest_eigenvalue``.
    """
    if W is None:
        W = assemble_W(enumerate_basis(term, policy), quad)
    K = W.basis.K
    alpha = build_alpha(1, W)

    def mu(lam: float) -> tuple[float, NDArray[np.float64], NDArray[np.float64]]:
        A, B = _raw_pencil(alpha, K, W.Ne, lam)
        vals, vecs = scipy.linalg.eigh(A, B, subset_by_index=[0, 0])
        return float(vals[0]), vecs[:, 0], B

    # the upper end stays away from 0: the unnormalized pencil overflows as lambda -> 0
    lo, hi = -10.0 * float(term.Z), -1e-3
    if not lo < hi:
        raise OracleError("no search interval: nuclear charge must be positive")
    g = lambda lam: mu(lam)[0] - lam  # noqa: E731
    try:
        g_lo, g_hi = g(lo), g(hi)
    except (OverflowError, ValueError, np.linalg.LinAlgError) as exc:
        raise OracleError(f"generalized pencil is not representable for this basis: {exc}") from exc
    if g_lo * g_hi > 0:
        raise OracleError(f"no fixed point of mu(lambda) = lambda in ({lo}, 0)")
    lam = scipy.optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    _, vec, B = mu(lam)
    return float(lam), _sign_fixed(np.sqrt(np.diag(B)) * vec)
