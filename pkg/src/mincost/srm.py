"""Square-root measurement: general construction and the symmetric closed form."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CirculantCost
from .ensembles import GramSpectrum, SymmetricFamily
from .errors import DegenerateInput, DimensionMismatch, MincostError
from .linalg import SUPPORT_CUTOFF, inv_sqrt_on_support, support_projector
from .povm import Povm


@dataclass(frozen=True, eq=False)
class SrmResult:
    povm: Povm
    srm_states: np.ndarray  # rows |phi_j>
    outcome_matrix: np.ndarray  # B[i][j] = |<psi_i|phi_j>|^2


def _outcome_matrix(states: np.ndarray, srm_states: np.ndarray) -> np.ndarray:
    return np.abs(states.conj() @ srm_states.T) ** 2


def srm_general(states, support_cutoff: float = SUPPORT_CUTOFF) -> SrmResult:
    """SRM of arbitrary pure states ``Pi_j = Phi^{-1/2}|psi_j><psi_j|Phi^{-1/2}``.

    The pseudo-inverse square root is taken on the span of the states.  When
    the states do not span the whole space, the projector onto the orthogonal
    complement is added to the first outcome so the POVM is complete on the
    ambient space; no state has support there, so no probability changes.
    """
    v = np.asarray(states, dtype=complex)
    if v.ndim != 2 or v.shape[0] < 1:
        raise DimensionMismatch(f"expected (N, d) state vectors, got shape {v.shape}")
    if not np.any(np.abs(v) > 0):
        raise DegenerateInput("all states are the zero vector")
    phi = v.T @ v.conj()
    root = inv_sqrt_on_support(phi, support_cutoff)
    srm_states = v @ root.T
    elements = np.einsum("ja,jb->jab", srm_states, srm_states.conj())
    complement = np.eye(v.shape[1]) - support_projector(phi, support_cutoff)
    elements[0] += complement
    return SrmResult(Povm(elements), srm_states, _outcome_matrix(v, srm_states))


def srm_symmetric(family: SymmetricFamily) -> SrmResult:
    """Closed form ``|phi_j> = N^{-1/2} sum_k e^{i arg b_k} w^{j f_k} |gamma_k>`` over the support."""
    n = family.n_states
    b = family.fourier_coeffs
    w = np.abs(b) ** 2
    keep = w > SUPPORT_CUTOFF * w.max()
    phase = np.where(keep, b / np.where(keep, np.abs(b), 1.0), 0.0)
    j = np.arange(n)[:, None]
    srm_states = phase[None, :] * np.exp(2j * np.pi * j * family.frequencies[None, :] / n) / np.sqrt(n)
    elements = np.einsum("ja,jb->jab", srm_states, srm_states.conj())
    elements[0] += np.diag((~keep).astype(float))
    return SrmResult(Povm(elements), srm_states, _outcome_matrix(family.states, srm_states))


def _amplitude_sums(spectrum: GramSpectrum) -> np.ndarray:
    """``|sum_l sqrt(lambda_l) exp(2 pi i k l / N)|^2`` for each offset ``k``."""
    if not spectrum.circulant:
        raise MincostError("closed-form SRM costs need a circulant (symmetric-family) spectrum")
    lam = np.asarray(spectrum.eigenvalues, dtype=float)
    n = lam.size
    cut = SUPPORT_CUTOFF * lam.max()
    roots = np.where(lam > cut, np.sqrt(np.clip(lam, 0.0, None)), 0.0)
    return np.abs(n * np.fft.ifft(roots)) ** 2


def srm_offset_probabilities(spectrum: GramSpectrum) -> np.ndarray:
    """``B[i][i+k]`` of the SRM as a function of the offset ``k``."""
    n = spectrum.n_states
    return _amplitude_sums(spectrum) / n**2


def srm_cost_circulant(spectrum: GramSpectrum, circ: CirculantCost) -> float:
    if circ.n != spectrum.n_states:
        raise DimensionMismatch(f"cost of size {circ.n} for {spectrum.n_states} states")
    return float(np.dot(circ.coeffs, srm_offset_probabilities(spectrum)))


def min_error_symmetric(spectrum: GramSpectrum) -> float:
    lam = np.asarray(spectrum.eigenvalues, dtype=float)
    n = lam.size
    cut = SUPPORT_CUTOFF * lam.max()
    s = np.sum(np.sqrt(lam[lam > cut]))
    return float(1.0 - s * s / n**2)
