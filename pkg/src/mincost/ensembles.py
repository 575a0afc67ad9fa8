"""State ensembles: generic pure/mixed, symmetric families, coherent alphabets.

A symmetric family is stored in the eigenbasis of its symmetry unitary: basis
vector ``k`` carries the phase ``exp(2 pi i f_k / N)`` under ``U`` and the
fiducial state has Fourier coefficient ``b_k`` on it.  The states themselves
are ``|psi_i> = sum_k b_k exp(2 pi i i f_k / N) |gamma_k>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log

import numpy as np

from .errors import (
    CutoffTooSmall,
    DimensionExceedsN,
    DimensionMismatch,
    InvalidEnsemble,
    InvalidMixture,
    MincostError,
    NotNormalized,
)
from .linalg import SUPPORT_CUTOFF

PRIOR_TOL = 1e-12
STATE_TOL = 1e-9
STRUCT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Density operators ``states[i]`` (shape ``(N, d, d)``) with priors ``priors[i]``."""

    states: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.states, dtype=complex)
        eta = np.asarray(self.priors, dtype=float)
        if rho.ndim != 3 or rho.shape[1] != rho.shape[2]:
            raise InvalidEnsemble(f"states must have shape (N, d, d), got {rho.shape}")
        if eta.shape != (rho.shape[0],):
            raise DimensionMismatch(f"{eta.shape[0] if eta.ndim else 0} priors for {rho.shape[0]} states")
        if np.any(eta < 0) or abs(eta.sum() - 1.0) > PRIOR_TOL:
            raise InvalidEnsemble(f"priors must be nonnegative and sum to 1 (sum={eta.sum()!r})")
        herm = np.max(np.abs(rho - rho.conj().swapaxes(-1, -2)))
        if herm > STATE_TOL:
            raise InvalidEnsemble(f"state not Hermitian (deviation {herm:.2e})")
        tr = np.trace(rho, axis1=1, axis2=2)
        if np.max(np.abs(tr - 1.0)) > STATE_TOL:
            raise InvalidEnsemble(f"state traces {tr.real} differ from 1")
        lo = np.linalg.eigvalsh((rho + rho.conj().swapaxes(-1, -2)) / 2).min()
        if lo < -STATE_TOL:
            raise InvalidEnsemble(f"state has negative eigenvalue {lo:.3e}")
        object.__setattr__(self, "states", rho)
        object.__setattr__(self, "priors", eta)

    @property
    def n_states(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    @classmethod
    def from_pure(cls, vectors, priors=None) -> "Ensemble":
        v = np.asarray(vectors, dtype=complex)
        if v.ndim != 2:
            raise InvalidEnsemble(f"pure states must have shape (N, d), got {v.shape}")
        if priors is None:
            priors = np.full(v.shape[0], 1.0 / v.shape[0])
        return cls(np.einsum("ia,ib->iab", v, v.conj()), priors)

    def average_state(self) -> np.ndarray:
        return np.einsum("i,iab->ab", self.priors, self.states)


@dataclass(frozen=True, eq=False)
class GramSpectrum:
    """Gram matrix and its eigenvalues.

    When the Gram matrix is circulant ``eigenvalues[k]`` is the eigenvalue of
    Fourier mode ``k`` (``lambda_k = N |b_k|^2``); otherwise the eigenvalues are
    sorted in descending order.
    """

    gram: np.ndarray
    eigenvalues: np.ndarray
    circulant: bool

    @property
    def n_states(self) -> int:
        return self.gram.shape[0]

    @property
    def dim_span(self) -> int:
        lam = self.eigenvalues
        return int(np.sum(lam > SUPPORT_CUTOFF * max(lam.max(), 0.0))) if lam.size else 0


@dataclass(frozen=True, eq=False)
class MixtureSpec:
    coefficients: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.coefficients, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidMixture(f"mixture coefficients must be square, got shape {a.shape}")
        if np.max(np.abs(a.sum(axis=1) - 1.0)) > PRIOR_TOL:
            raise InvalidMixture("each row of mixture coefficients must sum to 1")
        if np.any(a < -PRIOR_TOL):
            raise InvalidMixture("mixture coefficients must be nonnegative")
        object.__setattr__(self, "coefficients", a)

    @property
    def n(self) -> int:
        return self.coefficients.shape[0]


@dataclass(frozen=True, eq=False)
class SymmetricFamily:
    n_states: int
    fourier_coeffs: np.ndarray
    frequencies: np.ndarray
    symmetry_unitary: np.ndarray
    fiducial: np.ndarray

    @property
    def dim_span(self) -> int:
        w = np.abs(self.fourier_coeffs) ** 2
        return int(np.sum(w > SUPPORT_CUTOFF * w.max()))

    @property
    def dim(self) -> int:
        return self.fiducial.shape[0]

    @property
    def states(self) -> np.ndarray:
        """State vectors as rows, shape ``(N, dim)``."""
        i = np.arange(self.n_states)[:, None]
        phases = np.exp(2j * np.pi * i * self.frequencies[None, :] / self.n_states)
        return phases * self.fourier_coeffs[None, :]

    def ensemble(self) -> Ensemble:
        return Ensemble.from_pure(self.states)

    def spectrum(self) -> GramSpectrum:
        """Closed-form spectrum ``lambda_k = N |b_k|^2`` in Fourier order."""
        n = self.n_states
        lam = np.zeros(n)
        np.add.at(lam, self.frequencies % n, n * np.abs(self.fourier_coeffs) ** 2)
        v = self.states
        return GramSpectrum(v.conj() @ v.T, lam, True)


def symmetric_from_coeffs(b, n_states: int, frequencies=None) -> SymmetricFamily:
    """Symmetric family with fiducial coefficients ``b`` in the eigenbasis of ``U``."""
    b = np.asarray(b, dtype=complex).reshape(-1)
    if b.size > n_states:
        raise DimensionExceedsN(f"{b.size} Fourier coefficients for {n_states} states")
    norm = float(np.sum(np.abs(b) ** 2))
    if abs(norm - 1.0) > PRIOR_TOL:
        raise NotNormalized(f"sum |b_k|^2 = {norm!r}")
    if frequencies is None:
        frequencies = np.arange(b.size)
    frequencies = np.asarray(frequencies, dtype=int)
    if frequencies.shape != b.shape or len(set((frequencies % n_states).tolist())) != b.size:
        raise DimensionMismatch("frequencies must be distinct modulo N, one per coefficient")
    u = np.diag(np.exp(2j * np.pi * frequencies / n_states))
    return SymmetricFamily(n_states, b, frequencies, u, b.copy())


def _fock_log_amplitudes(r: float, cutoff: int) -> np.ndarray:
    n = np.arange(cutoff)
    if r == 0.0:
        out = np.full(cutoff, -np.inf)
        out[0] = 0.0
        return out
    return -r * r / 2 + n * log(r) - np.array([lgamma(k + 1) for k in n]) / 2


def _check_cutoff(alpha: complex, cutoff: int) -> np.ndarray:
    r = abs(alpha)
    weights = np.exp(2 * _fock_log_amplitudes(r, cutoff))
    deficit = 1.0 - weights.sum()
    if deficit > PRIOR_TOL:
        raise CutoffTooSmall(f"Fock cutoff {cutoff} leaves norm deficit {deficit:.3e} for |alpha|={r}")
    return weights


def coherent_fock_states(alpha: complex, n_states: int, fock_cutoff: int = 40) -> np.ndarray:
    """Coherent states ``|alpha w^j>`` (``w = exp(2 pi i/N)``) in a truncated Fock basis."""
    _check_cutoff(alpha, fock_cutoff)
    n = np.arange(fock_cutoff)
    mag = np.exp(_fock_log_amplitudes(abs(alpha), fock_cutoff))
    base = mag * np.exp(1j * n * np.angle(alpha))
    j = np.arange(n_states)[:, None]
    return base[None, :] * np.exp(2j * np.pi * j * n[None, :] / n_states)


def coherent_symmetric_family(alpha: complex, n_states: int, fock_cutoff: int = 40) -> SymmetricFamily:
    """Phase-symmetric coherent alphabet expressed on its span.

    The symmetry unitary is the phase rotation ``exp(2 pi i n/N)``; its
    eigenspaces are the Fock sectors ``n = k (mod N)``, so ``|b_k|^2`` is the
    photon-number weight of sector ``k``.  Empty sectors are dropped.
    """
    weights = _check_cutoff(alpha, fock_cutoff)
    sector = np.zeros(n_states)
    np.add.at(sector, np.arange(fock_cutoff) % n_states, weights)
    sector /= sector.sum()
    keep = sector > SUPPORT_CUTOFF * sector.max()
    freqs = np.flatnonzero(keep)
    return symmetric_from_coeffs(np.sqrt(sector[keep]), n_states, freqs)


def circulant_first_row(m: np.ndarray, tol: float = STRUCT_TOL):
    """First row of ``m`` if it is circulant within ``tol``, else ``None``."""
    n = m.shape[0]
    if m.ndim != 2 or m.shape[1] != n:
        return None
    row = m[0]
    for i in range(1, n):
        if np.max(np.abs(m[i] - np.roll(row, i))) > tol:
            return None
    return row


def gram(states) -> GramSpectrum:
    """Gram matrix ``G[i][j] = <psi_i|psi_j>`` of pure state vectors (rows)."""
    v = np.asarray(states, dtype=complex)
    if v.ndim != 2:
        raise DimensionMismatch(f"expected (N, d) state vectors, got shape {v.shape}")
    g = v.conj() @ v.T
    w = np.linalg.eigvalsh((g + g.conj().T) / 2)
    row = circulant_first_row(g)
    if row is None:
        return GramSpectrum(g, w[::-1].copy(), False)
    dft = np.fft.fft(row)
    if np.max(np.abs(dft.imag)) > 1e-8 * max(1.0, v.shape[0]):
        raise MincostError("circulant Gram matrix has complex DFT eigenvalues")
    lam = dft.real
    if np.max(np.abs(np.sort(lam) - w)) > 1e-8 * max(1.0, v.shape[0]):
        raise MincostError("DFT and Hermitian eigenvalues of the Gram matrix disagree")
    return GramSpectrum(g, lam, True)


def mix_symmetric(family: SymmetricFamily, spec: MixtureSpec) -> Ensemble:
    """Mixed states ``rho_i = sum_j a[i][j] |psi_j><psi_j|`` with uniform priors."""
    if not isinstance(spec, MixtureSpec):
        spec = MixtureSpec(spec)
    if spec.n != family.n_states:
        raise InvalidMixture(f"mixture of size {spec.n} for a family of {family.n_states} states")
    v = family.states
    proj = np.einsum("ja,jb->jab", v, v.conj())
    rho = np.einsum("ij,jab->iab", spec.coefficients, proj)
    return Ensemble(rho, np.full(spec.n, 1.0 / spec.n))
