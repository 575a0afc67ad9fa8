"""Cost-matrix algebra.

A cost matrix is a real ``(N, M)`` array; ``cost[i][j]`` is paid when outcome
``j`` is declared for state ``i``.  Circulant matrices are described by their
first row ``c_k = cost[i][(i + k) % N]`` and have eigenvalues
``cbar_n = sum_k c_k exp(2 pi i k n / N)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .ensembles import Ensemble, MixtureSpec, STRUCT_TOL, circulant_first_row
from .errors import DimensionMismatch, InvalidMixture, InvalidPovm, MincostError, NotSquare
from .povm import as_povm

PROB_TOL = 1e-9


def as_cost(cost) -> np.ndarray:
    c = np.asarray(cost, dtype=float)
    if c.ndim != 2:
        raise DimensionMismatch(f"cost matrix must be 2-d, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise MincostError("cost matrix has non-finite entries")
    return c


@dataclass(frozen=True, eq=False)
class CirculantCost:
    coeffs: np.ndarray
    dft_eigenvalues: np.ndarray
    symmetric: bool

    @property
    def n(self) -> int:
        return self.coeffs.size

    def matrix(self) -> np.ndarray:
        n = self.n
        i, j = np.indices((n, n))
        return self.coeffs[(j - i) % n]

    def is_nonpositive(self, tol: float = 0.0) -> bool:
        return bool(np.all(self.coeffs <= tol))

    def is_nsd(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.coeffs)))) if self.n else 1.0
        return bool(np.all(np.real(self.dft_eigenvalues) <= tol * scale))


@dataclass(frozen=True, eq=False)
class RowDecomposition:
    row_offsets: np.ndarray
    remainder: np.ndarray
    shift_cost: float


def circulant_eigenvalues(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    return c.size * np.fft.ifft(c)


def circulant_cost(coeffs, tol: float = STRUCT_TOL) -> CirculantCost:
    c = np.asarray(coeffs, dtype=float).reshape(-1)
    n = c.size
    symmetric = bool(np.all(np.abs(c - c[(-np.arange(n)) % n]) <= tol))
    eig = circulant_eigenvalues(c)
    if symmetric:
        eig = eig.real
    return CirculantCost(c, eig, symmetric)


def symmetric_circulant(half, n: int) -> CirculantCost:
    """Symmetric circulant cost of size ``n`` from ``(c_0, ..., c_{n//2})``."""
    half = np.asarray(half, dtype=float)
    if half.size != n // 2 + 1:
        raise DimensionMismatch(f"need {n // 2 + 1} coefficients for N={n}, got {half.size}")
    k = np.arange(n)
    return circulant_cost(half[np.minimum(k, n - k)])


def outcome_probabilities(ensemble: Ensemble, povm) -> np.ndarray:
    """``B[i][j] = Tr(Pi_j rho_i)``."""
    e = as_povm(povm).elements
    if e.shape[1] != ensemble.dim:
        raise DimensionMismatch(f"POVM dimension {e.shape[1]} vs state dimension {ensemble.dim}")
    return np.einsum("iab,jba->ij", ensemble.states, e).real


def average_cost(ensemble: Ensemble, cost, povm, tol: float = PROB_TOL) -> float:
    c = as_cost(cost)
    p = as_povm(povm).validate(tol)
    if c.shape != (ensemble.n_states, p.n_outcomes):
        raise DimensionMismatch(
            f"cost shape {c.shape} vs {ensemble.n_states} states and {p.n_outcomes} outcomes"
        )
    b = outcome_probabilities(ensemble, p)
    if b.min() < -tol or b.max() > 1 + tol:
        raise InvalidPovm(f"outcome probabilities outside [0, 1]: [{b.min()!r}, {b.max()!r}]")
    return float(np.einsum("i,ij,ij->", ensemble.priors, c, b))


def min_error_cost(n: int) -> np.ndarray:
    return 1.0 - np.eye(n)


def constant_row_decompose(cost, priors, mode: str = "subtract_row_min") -> RowDecomposition:
    c = as_cost(cost)
    eta = np.asarray(priors, dtype=float)
    if eta.shape != (c.shape[0],):
        raise DimensionMismatch(f"{eta.size} priors for {c.shape[0]} cost rows")
    if mode == "subtract_row_min":
        offsets = c.min(axis=1)
    elif mode == "subtract_row_max":
        offsets = c.max(axis=1)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return RowDecomposition(offsets, c - offsets[:, None], float(eta @ offsets))


def constant_row_matrix(offsets, n_outcomes: int) -> np.ndarray:
    return np.repeat(np.asarray(offsets, dtype=float)[:, None], n_outcomes, axis=1)


def circulant_structure(cost, tol: float = STRUCT_TOL) -> Optional[CirculantCost]:
    c = as_cost(cost)
    if c.shape[0] != c.shape[1]:
        raise NotSquare(f"cost matrix of shape {c.shape} is not square")
    row = circulant_first_row(c, tol)
    return None if row is None else circulant_cost(row, tol)


def n4_negativity_check(c0: float, c1: float, c2: float) -> bool:
    """Nonpositive N=4 symmetric circulant cost ``(c0, c1, c2, c1)`` with no positive eigenvalue."""
    closed_form = c0 <= 0 and c1 <= 0 and c2 <= 0 and c2 >= c0 and c1 >= (c0 + c2) / 2
    eig = circulant_eigenvalues([c0, c1, c2, c1]).real
    scale = max(abs(c0), abs(c1), abs(c2), 1e-300)
    via_dft = c0 <= 0 and c1 <= 0 and c2 <= 0 and bool(np.all(eig <= 1e-12 * scale))
    if closed_form != via_dft:
        # only reachable through rounding right at a boundary
        return via_dft
    return closed_form


def mixed_error_to_pure_cost(spec, priors) -> np.ndarray:
    """Cost ``C[m][i] = 1 - N eta_i a[i][m]`` over the pure states, to be used with priors 1/N."""
    if not isinstance(spec, MixtureSpec):
        spec = MixtureSpec(spec)
    eta = np.asarray(priors, dtype=float)
    n = spec.n
    if eta.shape != (n,) or np.any(eta < 0) or abs(eta.sum() - 1) > 1e-12:
        raise InvalidMixture("priors must be a probability vector matching the mixture size")
    return 1.0 - n * (eta[:, None] * spec.coefficients).T
