"""Numerical minimum-cost solver used as ground truth.

The minimisation of ``sum_j Tr(Pi_j W_j)`` is rewritten as maximising
``sum_j Tr(Pi_j G_j)`` with PSD gain operators ``G_j`` and solved with the
fixed-point iteration

    Pi_j <- S^{-1/2} G_j Pi_j G_j S^{-1/2},    S = sum_j G_j Pi_j G_j

run for several perturbed starting points at once.  The iteration is carried
out on factors ``Pi_j = A_j A_j^dag``: the new ``A_j`` are the blocks of the
polar factor of ``[G_1 A_1, ..., G_M A_M]``, which avoids forming ``S`` and
squaring its condition number.  The problem is first restricted to the support
of the average state.

Every iterate also yields a dual-feasible operator ``Y = Herm(Gamma) + t I``
with ``t`` the smallest eigenvalue of any ``W_j - Herm(Gamma)``; ``Tr Y`` is a
lower bound on the minimum cost, so ``cost - Tr Y`` bounds the distance to the
true optimum and is what the stopping rule uses.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .costs import as_cost, average_cost, outcome_probabilities
from .ensembles import Ensemble
from .errors import DimensionMismatch, NoConvergence
from .helstrom import HelstromReport, check_optimality
from .linalg import batched_inv_sqrt, support_basis
from .povm import Povm, tensor_povm


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 0
    restarts: int = 5
    max_iters: int = 50_000
    cost_tol: float = 1e-8
    residual_tol: float = 1e-6
    stall_tol: float = 1e-14
    noise: float = 1e-3
    check_every: int = 10

    def with_(self, **kw) -> "OracleConfig":
        return replace(self, **kw)


@dataclass(frozen=True, eq=False)
class OracleResult:
    povm: Povm
    min_cost: float
    iterations: int
    final_step_delta: float
    helstrom_residual: float
    lower_bound: Optional[float] = None
    report: Optional[HelstromReport] = None

    @property
    def certified(self) -> bool:
        return self.report is not None and self.report.certified_optimal


def _pad_cost(c: np.ndarray, n_outcomes: Optional[int]) -> np.ndarray:
    m = c.shape[1]
    if n_outcomes is None or n_outcomes == m:
        return c
    if n_outcomes < m:
        raise DimensionMismatch(f"{n_outcomes} outcomes for a cost matrix with {m} columns")
    # extra outcomes cost as much as the worst declaration, so they never help
    pad = np.repeat(c.max(axis=1, keepdims=True), n_outcomes - m, axis=1)
    return np.hstack([c, pad])


def _helstrom_residual(report: HelstromReport) -> float:
    return max(report.conditions_residual, report.pairwise_residual, report.cond4_violation)


def _finish(ensemble, c, elements, iterations, delta, lower, config) -> OracleResult:
    elements = (elements + elements.conj().swapaxes(-1, -2)) / 2
    povm = Povm(elements)
    cost_value = average_cost(ensemble, c, povm)
    report = check_optimality(ensemble, c, povm, tol=config.residual_tol)
    return OracleResult(
        povm, cost_value, iterations, delta, _helstrom_residual(report), lower, report
    )


def _polar_blocks(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """One step on the factors: blocks of the polar factor of ``[G_j A_j]_j``."""
    r, m, d, _ = a.shape
    wide = (g[None] @ a).transpose(0, 2, 1, 3).reshape(r, d, m * d)
    u, _, vh = np.linalg.svd(wide, full_matrices=False)
    return (u @ vh).reshape(r, d, m, d).transpose(0, 2, 1, 3)


def minimize_cost(
    ensemble: Ensemble,
    cost,
    n_outcomes: Optional[int] = None,
    config: Optional[OracleConfig] = None,
) -> OracleResult:
    config = config or OracleConfig()
    c = _pad_cost(as_cost(cost), n_outcomes)
    if c.shape[0] != ensemble.n_states:
        raise DimensionMismatch(f"cost has {c.shape[0]} rows for {ensemble.n_states} states")
    n_out, full = c.shape[1], ensemble.dim
    eta = ensemble.priors

    reduced = c - c.min(axis=1, keepdims=True)
    top = reduced.max()
    if top <= 0:
        # constant-row cost: every measurement is optimal
        elements = np.zeros((n_out, full, full), dtype=complex)
        elements[0] = np.eye(full)
        return _finish(ensemble, c, elements, 0, 0.0, None, config)

    # outside the support every state vanishes, so any completion there is optimal
    basis = support_basis(ensemble.average_state())
    d = basis.shape[1]
    rho = basis.conj().T @ ensemble.states @ basis
    w_full = np.einsum("i,ij,iab->jab", eta, c, ensemble.states)
    w = np.einsum("i,ij,iab->jab", eta, c, rho)
    g = np.einsum("i,ij,iab->jab", eta, (top - reduced) / top, rho)

    rng = np.random.default_rng(config.seed)
    r = max(1, config.restarts)
    x = rng.standard_normal((r, n_out, d, d)) + 1j * rng.standard_normal((r, n_out, d, d))
    p = np.eye(d) / n_out + config.noise * (x @ x.conj().swapaxes(-1, -2)) / (2 * d)
    root, _ = batched_inv_sqrt(p.sum(axis=1))
    p = root[:, None] @ p @ root[:, None]
    s, u = np.linalg.eigh(p)
    a = u * np.sqrt(np.clip(s, 0.0, None))[..., None, :]

    # no measurement beats declaring each state's cheapest column
    best_cost, lower = np.inf, float(eta @ c.min(axis=1))
    prev = float(np.einsum("jab,rjba->r", w, p).real.min())
    delta = np.inf
    it = 0
    converged = False
    for it in range(1, config.max_iters + 1):
        a = _polar_blocks(g, a)
        if it % config.check_every and it != config.max_iters:
            continue
        p = a @ a.conj().swapaxes(-1, -2)
        costs = np.einsum("jab,rjba->r", w, p).real
        gamma = np.einsum("jab,rjbc->rac", w, p)
        gamma = basis @ ((gamma + gamma.conj().swapaxes(-1, -2)) / 2) @ basis.conj().T
        slack = np.linalg.eigvalsh(w_full[None] - gamma[:, None]).min(axis=(1, 2))
        duals = np.trace(gamma, axis1=1, axis2=2).real + slack * full
        gain = float(duals.max()) - lower
        lower = max(lower, float(duals.max()))
        best = int(np.argmin(costs))
        best_cost = float(costs[best])
        delta = abs(prev - best_cost)
        prev = best_cost
        if best_cost - lower <= config.cost_tol:
            converged = True
            break
        # the certificate can keep tightening after the cost has settled
        if delta < config.stall_tol and gain < config.stall_tol:
            break

    if not converged:
        raise NoConvergence(it, best_cost, best_cost - lower)
    elements = basis @ p[best] @ basis.conj().T
    elements += (np.eye(full) - basis @ basis.conj().T) / n_out
    return _finish(ensemble, c, elements, it, float(delta), lower, config)


def _global_cost_tensor(local_cost: np.ndarray, f, length: int) -> np.ndarray:
    """``F[k1(0..L-1), k2(0..L-1)] = f(sum_i C[k1(i)][k2(i)])`` as a 2L-dimensional array."""
    n = local_cost.shape[0]
    total = np.zeros((n,) * (2 * length))
    for i in range(length):
        shape = [1] * (2 * length)
        shape[i], shape[length + i] = n, n
        total = total + local_cost.reshape(shape)
    return np.asarray(f(total), dtype=float)


def _product_cost(local_ensembles, f_tensor, probs) -> float:
    length = len(local_ensembles)
    out = f_tensor
    # contract factor by factor: sum_{a, a'} eta_a B[a][a'] F[..a.., ..a'..]
    for i, (ens, b) in enumerate(zip(local_ensembles, probs)):
        weight = ens.priors[:, None] * b
        out = np.tensordot(weight, out, axes=([0, 1], [0, length - i]))
    return float(out)


def _induced_cost(local_ensembles, f_tensor, probs, target: int) -> np.ndarray:
    length = len(local_ensembles)
    n = f_tensor.shape[0]
    out = np.moveaxis(f_tensor, [target, length + target], [0, 1])
    others = [i for i in range(length) if i != target]
    # remaining axes after the move: others' k1 then others' k2, in order
    for pos, i in enumerate(others):
        ens, b = local_ensembles[i], probs[i]
        weight = ens.priors[:, None] * b
        k1_axis = 2
        k2_axis = 2 + (len(others) - pos)
        out = np.tensordot(out, weight, axes=([k1_axis, k2_axis], [0, 1]))
    return out.reshape(n, n)


def minimize_over_product_povms(
    local_ensembles,
    global_cost,
    config: Optional[OracleConfig] = None,
    max_sweeps: int = 50,
) -> OracleResult:
    """Best tensor-product measurement found by block-coordinate descent.

    ``global_cost`` must expose ``local_cost`` (an ``N x N`` matrix) and be
    callable on arrays of summed local costs (e.g. a
    :class:`~mincost.sequences.GlobalCostFunction`).  Each factor starts from
    its own minimum-cost measurement for the local cost; factors are then
    re-optimised one at a time against the cost induced by the others until
    the global cost stops decreasing.
    """
    config = config or OracleConfig()
    local_ensembles = list(local_ensembles)
    local_cost = as_cost(global_cost.local_cost)
    length = len(local_ensembles)
    f_tensor = _global_cost_tensor(local_cost, global_cost, length)

    factors = [minimize_cost(e, local_cost, config=config).povm for e in local_ensembles]
    probs = [outcome_probabilities(e, p) for e, p in zip(local_ensembles, factors)]
    current = _product_cost(local_ensembles, f_tensor, probs)
    delta, sweeps = 0.0, 0
    if length > 1:
        for sweeps in range(1, max_sweeps + 1):
            before = current
            for i in range(length):
                induced = _induced_cost(local_ensembles, f_tensor, probs, i)
                res = minimize_cost(local_ensembles[i], induced, config=config)
                trial = probs[:i] + [outcome_probabilities(local_ensembles[i], res.povm)] + probs[i + 1:]
                value = _product_cost(local_ensembles, f_tensor, trial)
                if value < current:
                    factors[i], probs, current = res.povm, trial, value
            delta = before - current
            if delta <= config.cost_tol:
                break

    povm = tensor_povm(factors)
    from .sequences import product_ensemble  # local import: sequences depends on this module

    glob = product_ensemble(local_ensembles)
    c = f_tensor.reshape(glob.n_states, glob.n_states)
    report = check_optimality(glob, c, povm, tol=config.residual_tol)
    return OracleResult(
        povm, average_cost(glob, c, povm), sweeps, float(delta), _helstrom_residual(report), None, report
    )
