"""Tensor-product ensembles whose global cost is a function of summed local costs.

Global sequences are indexed big-endian: sequence ``(k(0), ..., k(L-1))`` has
index ``sum_i k(i) N^(L-1-i)``, the order produced by ``itertools.product``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .costs import as_cost
from .ensembles import Ensemble
from .errors import DimensionMismatch, NotMonotoneRange, TableOutOfRange
from .oracle import OracleConfig, minimize_cost
from .povm import Povm, as_povm, tensor_povm

SUM_TOL = 1e-9
ELIMINATION_TOL = 1e-12


def product_ensemble(local_ensembles: Sequence[Ensemble]) -> Ensemble:
    states = np.ones((1, 1, 1), dtype=complex)
    priors = np.ones(1)
    for e in local_ensembles:
        n, d = states.shape[0], states.shape[1]
        m, k = e.states.shape[0], e.states.shape[1]
        states = np.einsum("iab,jcd->ijacbd", states, e.states).reshape(n * m, d * k, d * k)
        priors = np.outer(priors, e.priors).reshape(-1)
    return Ensemble(states, priors / priors.sum())


def sequence_labels(n: int, length: int) -> np.ndarray:
    return np.array(list(itertools.product(range(n), repeat=length)), dtype=int).reshape(-1, length)


@dataclass(frozen=True, eq=False)
class SequenceEnsemble:
    local_ensemble: Ensemble
    length: int
    global_ensemble: Ensemble

    @classmethod
    def build(cls, local: Ensemble, length: int) -> "SequenceEnsemble":
        if length < 1:
            raise ValueError("sequence length must be at least 1")
        return cls(local, length, product_ensemble([local] * length))

    @property
    def global_states(self) -> np.ndarray:
        return self.global_ensemble.states

    @property
    def global_priors(self) -> np.ndarray:
        return self.global_ensemble.priors

    @property
    def labels(self) -> np.ndarray:
        return sequence_labels(self.local_ensemble.n_states, self.length)


@dataclass(frozen=True, eq=False)
class GlobalCostFunction:
    """``f`` applied to the sum of local costs.

    kinds: ``linear`` (``a x + b``), ``step`` (1 once the sum reaches
    ``threshold``, else 0), ``table`` (``values[x]`` for integer sums) and
    ``function`` (any vectorised callable, tags supplied by the caller).
    """

    kind: str
    local_cost: np.ndarray
    a: float = 1.0
    b: float = 0.0
    threshold: float = 0.0
    values: tuple = ()
    func: Optional[Callable] = field(default=None, repr=False)
    convex: bool = False
    concave: bool = False

    @classmethod
    def linear(cls, local_cost, a: float = 1.0, b: float = 0.0):
        return cls("linear", as_cost(local_cost), a=a, b=b, convex=True, concave=True)

    @classmethod
    def step(cls, local_cost, threshold: float):
        return cls("step", as_cost(local_cost), threshold=threshold)

    @classmethod
    def table(cls, local_cost, values, convex: bool = False, concave: bool = False):
        return cls("table", as_cost(local_cost), values=tuple(float(v) for v in values),
                   convex=convex, concave=concave)

    @classmethod
    def function(cls, local_cost, func, convex: bool = False, concave: bool = False):
        return cls("function", as_cost(local_cost), func=func, convex=convex, concave=concave)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "linear":
            return self.a * x + self.b
        if self.kind == "step":
            return (x >= self.threshold - SUM_TOL).astype(float)
        if self.kind == "table":
            idx = np.rint(x)
            if np.any(np.abs(x - idx) > SUM_TOL) or np.any(idx < 0) or np.any(idx >= len(self.values)):
                raise TableOutOfRange(f"sums outside table of length {len(self.values)}")
            return np.asarray(self.values)[idx.astype(int)]
        if self.kind == "function":
            return np.asarray(self.func(x), dtype=float)
        raise ValueError(f"unknown global cost kind {self.kind!r}")

    def describe(self) -> dict:
        out = {"kind": self.kind, "local_cost": self.local_cost.tolist()}
        if self.kind == "linear":
            out.update(a=self.a, b=self.b)
        elif self.kind == "step":
            out.update(threshold=self.threshold)
        elif self.kind == "table":
            out.update(values=list(self.values))
        return out


def summed_local_costs(local_cost, length: int) -> np.ndarray:
    """``S[k1][k2] = sum_i C[k1(i)][k2(i)]`` over big-endian sequence indices."""
    c = as_cost(local_cost)
    n = c.shape[0]
    if c.shape[1] != n:
        raise DimensionMismatch("local cost must be square")
    labels = sequence_labels(n, length)
    return c[labels[:, None, :], labels[None, :, :]].sum(axis=-1)


def build_global_cost(seq: SequenceEnsemble, f: GlobalCostFunction) -> np.ndarray:
    if f.local_cost.shape != (seq.local_ensemble.n_states,) * 2:
        raise DimensionMismatch(
            f"local cost {f.local_cost.shape} for {seq.local_ensemble.n_states} local states"
        )
    return np.asarray(f(summed_local_costs(f.local_cost, seq.length)), dtype=float)


def linear_case_minimum(
    seq: SequenceEnsemble, local_cost, a: float, b: float, config: Optional[OracleConfig] = None
) -> tuple[float, Povm]:
    """Minimum of ``a * sum_i C + b`` and the tensor product of local optima achieving it.

    The local problem is solved for ``a * C`` so a negative slope is handled
    correctly; for ``a >= 0`` the value is ``a * sum_i Cmin_i + b``.
    """
    c = as_cost(local_cost)
    local = minimize_cost(seq.local_ensemble, a * c, config=config)
    value = seq.length * local.min_cost + b
    return value, tensor_povm([local.povm] * seq.length)


def _attainable_sums(local_cost, length: int) -> np.ndarray:
    sums = np.unique(np.round(summed_local_costs(local_cost, length), 12))
    return sums


def _validate_tags(f: GlobalCostFunction, sums: np.ndarray) -> None:
    if sums.size < 3 or f.kind == "linear":
        return
    y = np.asarray(f(sums), dtype=float)
    slopes = np.diff(y) / np.diff(sums)
    steps = np.diff(slopes)
    scale = max(1.0, float(np.max(np.abs(y))))
    if f.convex and np.any(steps < -1e-9 * scale):
        raise NotMonotoneRange("function tagged convex is not convex on the attainable sums")
    if f.concave and np.any(steps > 1e-9 * scale):
        raise NotMonotoneRange("function tagged concave is not concave on the attainable sums")


def convexity_bounds(
    seq: SequenceEnsemble, f: GlobalCostFunction, config: Optional[OracleConfig] = None
) -> tuple[Optional[float], Optional[float]]:
    """Bounds on the global minimum from local problems with cost ``f(L C) / L``.

    Jensen's inequality gives ``f(sum_i x_i) <= (1/L) sum_i f(L x_i)`` for
    convex ``f`` (reversed for concave), so the global cost matrix is bounded
    element-wise by a sum of identical local cost matrices whose minimum is
    attained by local measurements.  Returns ``(lower, upper)``; a side is
    ``None`` when the matching tag is absent.
    """
    if not (f.convex or f.concave):
        return None, None
    sums = _attainable_sums(f.local_cost, seq.length)
    _validate_tags(f, sums)
    length = seq.length
    local = np.asarray(f(length * f.local_cost), dtype=float) / length
    value = length * minimize_cost(seq.local_ensemble, local, config=config).min_cost
    return (value if f.concave else None), (value if f.convex else None)


def zero_plus_alphabet() -> Ensemble:
    """Equiprobable qubit states ``|0>`` and ``|+>``."""
    return Ensemble.from_pure([[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)]])


def pbr_vectors() -> np.ndarray:
    """Entangled basis, row ``j`` never occurring for the product state that differs from label ``j`` in both places.

    Rows are ordered like the product states ``|00>, |0+>, |+0>, |++>``.
    """
    zero, one = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    plus, minus = (zero + one) / np.sqrt(2), (zero - one) / np.sqrt(2)
    k = np.kron
    phi_pp = (k(zero, one) + k(one, zero)) / np.sqrt(2)
    phi_p0 = (k(zero, minus) + k(one, plus)) / np.sqrt(2)
    phi_0p = (k(plus, one) + k(minus, zero)) / np.sqrt(2)
    phi_00 = (k(plus, minus) + k(minus, plus)) / np.sqrt(2)
    return np.array([phi_00, phi_0p, phi_p0, phi_pp], dtype=complex)


def pbr_basis() -> Povm:
    return Povm.from_vectors(pbr_vectors())


def elimination_check(povm, states, tol: float = ELIMINATION_TOL) -> np.ndarray:
    """``out[j][k]`` is True when outcome ``j`` has probability ``<= tol`` on state ``k``."""
    e = as_povm(povm).elements
    rho = np.asarray(states, dtype=complex)
    if rho.ndim == 2:
        rho = np.einsum("ka,kb->kab", rho, rho.conj())
    if rho.shape[1:] != e.shape[1:]:
        raise DimensionMismatch(f"POVM dimension {e.shape[1]} vs states {rho.shape[1:]}")
    probs = np.einsum("jab,kba->jk", e, rho).real
    return probs <= tol


def reduce_to_subsystems(local_ensembles: Sequence[Ensemble], povm, subsystems) -> Povm:
    """Measurement on the subsystems ``A`` reproducing a global POVM's cost.

    ``Pi_A[k(A)] = sum_{k(Abar)} Tr_Abar(Pi_k (1_A x rho_Abar))`` where
    ``rho_Abar`` is the prior-averaged state of the remaining subsystems.
    Global outcomes are big-endian sequences over the local alphabet.
    """
    locals_ = list(local_ensembles)
    length = len(locals_)
    keep = sorted(set(subsystems))
    rest = [i for i in range(length) if i not in keep]
    dims = [e.dim for e in locals_]
    n = locals_[0].n_states
    e = as_povm(povm).elements
    if e.shape[0] != n**length or e.shape[1] != int(np.prod(dims)):
        raise DimensionMismatch("POVM does not match the sequence of local systems")

    ops = e.reshape([n] * length + dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    out_idx = letters[:length]
    row = letters[length:2 * length]
    col = letters[2 * length:3 * length]
    operands = [ops]
    subs = [out_idx + row + col]
    for i in rest:
        operands.append(locals_[i].average_state())
        subs.append(col[i] + row[i])
    result = "".join(out_idx[i] for i in keep) + "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    reduced = np.einsum(",".join(subs) + "->" + result, *operands)
    dim_a = int(np.prod([dims[i] for i in keep]))
    return Povm(reduced.reshape(n ** len(keep), dim_a, dim_a))
