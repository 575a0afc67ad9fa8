"""Optimality certificate for minimum-cost measurements.

With risk operators ``W_j = sum_i eta_i C[i][j] rho_i`` and
``Gamma = sum_j W_j Pi_j`` a POVM is optimal iff

1. ``sum_j Pi_j W_j = sum_j W_j Pi_j``
2. ``Gamma`` is Hermitian
3. ``Pi_j (W_j - Gamma) = (W_j - Gamma) Pi_j = 0`` for every ``j``
4. ``W_j - Gamma >= 0`` for every ``j``

Conditions 1-3 together are equivalent to ``Pi_i (W_i - W_j) Pi_j = 0`` for
all pairs, which :func:`pairwise_condition` measures.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .costs import as_cost
from .ensembles import Ensemble
from .errors import DimensionMismatch
from .povm import as_povm

DEFAULT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class HelstromReport:
    risk_operators: np.ndarray
    lagrange_operator: np.ndarray
    cond1_residual: float
    cond2_residual: float
    cond3_residual: float
    cond4_min_eigs: np.ndarray
    pairwise_residual: float
    certified_optimal: bool
    tol: float = field(default=DEFAULT_TOL)

    @property
    def conditions_residual(self) -> float:
        """Largest residual among the three equality conditions."""
        return max(self.cond1_residual, self.cond2_residual, self.cond3_residual)

    @property
    def cond4_violation(self) -> float:
        return max(0.0, -float(np.min(self.cond4_min_eigs)))

    def summary(self) -> dict:
        return {
            "cond1_residual": self.cond1_residual,
            "cond2_residual": self.cond2_residual,
            "cond3_residual": self.cond3_residual,
            "cond4_min_eigs": [float(x) for x in self.cond4_min_eigs],
            "pairwise_residual": self.pairwise_residual,
            "certified_optimal": self.certified_optimal,
        }


def risk_operators(ensemble: Ensemble, cost) -> np.ndarray:
    c = as_cost(cost)
    if c.shape[0] != ensemble.n_states:
        raise DimensionMismatch(f"cost has {c.shape[0]} rows for {ensemble.n_states} states")
    return np.einsum("i,ij,iab->jab", ensemble.priors, c, ensemble.states)


def _checked(ensemble, cost, povm):
    p = as_povm(povm).validate()
    w = risk_operators(ensemble, cost)
    if w.shape[0] != p.n_outcomes or p.dim != ensemble.dim:
        raise DimensionMismatch(
            f"{w.shape[0]} cost columns / dim {ensemble.dim} vs POVM with "
            f"{p.n_outcomes} outcomes / dim {p.dim}"
        )
    return w, p.elements


def _fro(a) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def _pairwise(w: np.ndarray, pi: np.ndarray) -> float:
    x = pi @ w  # Pi_i W_i
    y = w @ pi  # W_j Pi_j
    worst = 0.0
    for i in range(pi.shape[0]):
        term = x[i][None] @ pi - pi[i][None] @ y
        worst = max(worst, float(_fro(term).max()))
    return worst


def pairwise_condition(ensemble: Ensemble, cost, povm) -> float:
    w, pi = _checked(ensemble, cost, povm)
    return _pairwise(w, pi)


def check_optimality(ensemble: Ensemble, cost, povm, tol: float = DEFAULT_TOL) -> HelstromReport:
    w, pi = _checked(ensemble, cost, povm)
    gamma = np.einsum("jab,jbc->ac", w, pi)
    gamma_left = np.einsum("jab,jbc->ac", pi, w)
    cond1 = float(_fro(gamma_left - gamma))
    cond2 = float(_fro(gamma - gamma.conj().T))
    diff = w - gamma[None]
    cond3 = float(max(_fro(pi @ diff).max(), _fro(diff @ pi).max()))
    gamma_h = (gamma + gamma.conj().T) / 2
    d4 = w - gamma_h[None]
    d4 = (d4 + d4.conj().swapaxes(-1, -2)) / 2
    min_eigs = np.linalg.eigvalsh(d4)[:, 0]
    pairwise = _pairwise(w, pi)
    scaled = tol * max(1.0, float(_fro(w).max()))
    certified = (
        max(cond1, cond2, cond3, pairwise) <= scaled and float(min_eigs.min()) >= -scaled
    )
    return HelstromReport(w, gamma, cond1, cond2, cond3, min_eigs, pairwise, bool(certified), tol)
