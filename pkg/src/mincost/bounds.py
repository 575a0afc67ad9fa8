"""Analytic lower/upper bounds on the minimum cost over a symmetric family.

Pipeline for a cost matrix ``C`` and uniform priors:

1. subtract each row's minimum (measurement-independent ``shift_cost``);
2. subtract the largest remaining entry ``M`` so the remainder ``C''`` is <= 0;
3. lower envelope: for each circulant offset orbit ``{k, N-k}`` the smallest
   entry of ``C''`` (largest symmetric circulant matrix below ``C''``);
4. upper envelope: the largest entry per orbit (smallest one above ``C''``);
5. where an envelope is negative semidefinite the SRM is optimal for it, so
   ``shift_cost + M + SRM cost`` is a bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import floor, log10
from typing import Optional

import numpy as np

from .costs import CirculantCost, as_cost, circulant_cost
from .ensembles import SymmetricFamily
from .errors import DimensionMismatch, EnvelopeNotNSD, UnsupportedPriors
from .oracle import OracleConfig, minimize_cost
from .srm import srm_cost_circulant


@dataclass(frozen=True, eq=False)
class BoundReport:
    shift_cost: float
    global_offset: float
    reduced_cost: np.ndarray  # C' after step 1
    shifted_cost: np.ndarray  # C'' after step 2
    lower_envelope: CirculantCost
    upper_envelope: CirculantCost
    lower_envelope_cost: Optional[float]
    upper_envelope_cost: Optional[float]
    lower_bound: Optional[float]
    upper_bound: Optional[float]
    envelope_valid: tuple
    lower_method: str = "srm"
    upper_method: str = "srm"

    def to_dict(self) -> dict:
        return {
            "shift_cost": self.shift_cost,
            "global_offset": self.global_offset,
            "reduced_cost": self.reduced_cost.tolist(),
            "shifted_cost": self.shifted_cost.tolist(),
            "lower_envelope": self.lower_envelope.coeffs.tolist(),
            "upper_envelope": self.upper_envelope.coeffs.tolist(),
            "lower_envelope_eigenvalues": np.real(self.lower_envelope.dft_eigenvalues).tolist(),
            "upper_envelope_eigenvalues": np.real(self.upper_envelope.dft_eigenvalues).tolist(),
            "lower_envelope_cost": self.lower_envelope_cost,
            "upper_envelope_cost": self.upper_envelope_cost,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "lower_increment": None if self.lower_bound is None else self.lower_bound - self.shift_cost,
            "upper_increment": None if self.upper_bound is None else self.upper_bound - self.shift_cost,
            "envelope_valid": list(self.envelope_valid),
            "lower_method": self.lower_method,
            "upper_method": self.upper_method,
        }


def round_sig(x, digits: int):
    """Round to ``digits`` significant figures (element-wise)."""
    def one(v: float) -> float:
        if v == 0 or not np.isfinite(v):
            return float(v)
        return round(float(v), digits - 1 - int(floor(log10(abs(v)))))

    if np.ndim(x) == 0:
        return one(float(x))
    return np.vectorize(one, otypes=[float])(x)


def orbit_envelopes(shifted: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-orbit min and max of ``shifted[i][(i+k) % N]`` over offsets ``k`` and ``N-k``."""
    n = shifted.shape[0]
    i = np.arange(n)
    by_offset = np.array([shifted[i, (i + k) % n] for k in range(n)])
    lo = np.empty(n)
    hi = np.empty(n)
    for k in range(n):
        orbit = np.concatenate([by_offset[k], by_offset[(n - k) % n]])
        lo[k], hi[k] = orbit.min(), orbit.max()
    return lo, hi


def _valid(env: CirculantCost) -> bool:
    return env.symmetric and env.is_nonpositive() and env.is_nsd()


def bound_min_cost(
    family: SymmetricFamily,
    cost,
    priors=None,
    round_digits: Optional[int] = None,
    strict: bool = True,
    oracle_fallback: Optional[OracleConfig] = None,
) -> BoundReport:
    """Bound the minimum cost of ``cost`` over the equiprobable states of ``family``.

    ``round_digits`` reproduces hand calculations done at fixed precision:
    ``C'`` and ``M`` are rounded to that many significant figures and ``C''``
    to the last retained decimal of ``M``.  With ``strict`` an envelope that is
    not negative semidefinite raises :class:`EnvelopeNotNSD` (the partial report
    is attached); otherwise that side is left ``None`` or, with
    ``oracle_fallback``, filled with the numerical minimum.
    """
    c = as_cost(cost)
    n = family.n_states
    if c.shape != (n, n):
        raise DimensionMismatch(f"cost shape {c.shape} for {n} states")
    if priors is not None:
        eta = np.asarray(priors, dtype=float)
        if eta.shape != (n,) or np.max(np.abs(eta - 1.0 / n)) > 1e-12:
            raise UnsupportedPriors("bounds are only available for uniform priors")

    offsets = c.min(axis=1)
    shift_cost = float(offsets.mean())
    reduced = c - offsets[:, None]
    if round_digits is not None:
        reduced = round_sig(reduced, round_digits)
    top = float(reduced.max())
    if round_digits is not None:
        top = round_sig(top, round_digits)
    shifted = reduced - top
    if round_digits is not None and top != 0:
        decimals = round_digits - 1 - int(floor(log10(abs(top))))
        shifted = np.round(shifted, decimals)

    lo, hi = orbit_envelopes(shifted)
    lower_env, upper_env = circulant_cost(lo), circulant_cost(hi)
    valid = (_valid(lower_env), _valid(upper_env))
    spectrum = family.spectrum()

    costs, bounds, methods = [None, None], [None, None], ["srm", "srm"]
    for side, env in enumerate((lower_env, upper_env)):
        if valid[side]:
            costs[side] = srm_cost_circulant(spectrum, env)
            bounds[side] = shift_cost + top + costs[side]

    report = BoundReport(
        shift_cost, top, reduced, shifted, lower_env, upper_env,
        costs[0], costs[1], bounds[0], bounds[1], valid,
    )
    if all(valid):
        return report
    if oracle_fallback is not None:
        exact = minimize_cost(family.ensemble(), c, config=oracle_fallback).min_cost
        for side in (0, 1):
            if not valid[side]:
                bounds[side], methods[side] = exact, "oracle"
        return BoundReport(
            shift_cost, top, reduced, shifted, lower_env, upper_env,
            costs[0], costs[1], bounds[0], bounds[1], valid, methods[0], methods[1],
        )
    if strict:
        side = 0 if not valid[0] else 1
        env = (lower_env, upper_env)[side]
        raise EnvelopeNotNSD(("lower", "upper")[side], np.real(env.dft_eigenvalues), report)
    return report
