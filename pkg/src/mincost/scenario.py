"""Scenario files: parse, build the problem, run the analysis, check expectations.

A scenario is a JSON object validated against ``scenario.schema.json``.
Complex numbers are written ``[re, im]``; plain numbers are real.  Results are
a flat mapping of named quantities; ``expected`` maps result names to one or
more checks of the form ``{"value", "tol"}``, ``{"min"}``/``{"max"}`` or
``{"value": true}``.
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict
from functools import lru_cache
from importlib import resources
from typing import Any, Optional

import jsonschema
import numpy as np

from .bounds import bound_min_cost
from .costs import (
    as_cost,
    average_cost,
    circulant_cost,
    circulant_structure,
    min_error_cost,
    symmetric_circulant,
)
from .ensembles import (
    Ensemble,
    MixtureSpec,
    SymmetricFamily,
    coherent_symmetric_family,
    gram,
    mix_symmetric,
    symmetric_from_coeffs,
)
from .errors import DimensionMismatch, MincostError, ScenarioParseError
from .helstrom import check_optimality
from .oracle import OracleConfig, minimize_cost, minimize_over_product_povms
from .povm import Povm, tensor_povm
from .sequences import (
    GlobalCostFunction,
    SequenceEnsemble,
    build_global_cost,
    convexity_bounds,
    elimination_check,
    linear_case_minimum,
    pbr_basis,
    zero_plus_alphabet,
)
from .srm import min_error_symmetric, srm_general, srm_symmetric

SEED_ENV = "MINCOST_SEED"


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(resources.files("mincost").joinpath("scenario.schema.json").read_text())


def bundled_names() -> list[str]:
    folder = resources.files("mincost").joinpath("scenarios")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def bundled_text(name: str) -> str:
    stem = name[:-5] if name.endswith(".json") else name
    path = resources.files("mincost").joinpath("scenarios", stem + ".json")
    if not path.is_file():
        raise ScenarioParseError(f"no bundled scenario named {name!r}")
    return path.read_text()


def parse_scenario(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"invalid JSON: {exc}") from exc
    validate_scenario(data)
    return data


def validate_scenario(data: Any) -> None:
    try:
        jsonschema.validate(data, schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioParseError(f"schema violation at {where}: {exc.message}") from exc


def load_scenario(path_or_name: str) -> dict:
    if os.path.exists(path_or_name):
        with open(path_or_name, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    return parse_scenario(bundled_text(path_or_name))


# --- JSON helpers -----------------------------------------------------------

def to_complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(x[0], x[1])
    return complex(x)


def _matrix(rows) -> np.ndarray:
    return np.array([[to_complex(v) for v in row] for row in rows])


def jsonable(x):
    """Plain JSON value; complex numbers become ``[re, im]``."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    return x


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


# --- building ---------------------------------------------------------------

class Problem:
    """Ensemble plus the pure vectors / symmetric family it was built from, when known."""

    def __init__(self, ensemble: Ensemble, vectors=None, family: Optional[SymmetricFamily] = None):
        self.ensemble = ensemble
        self.vectors = vectors
        self.family = family


def _family(spec: dict) -> SymmetricFamily:
    if spec["type"] == "coherent":
        return coherent_symmetric_family(to_complex(spec["alpha"]), spec["n"], spec.get("fock_cutoff", 40))
    coeffs = np.array([to_complex(v) for v in spec["coeffs"]])
    return symmetric_from_coeffs(coeffs, spec["n"], spec.get("frequencies"))


def build_problem(spec: dict) -> Problem:
    kind = spec["type"]
    if kind in ("coherent", "symmetric"):
        fam = _family(spec)
        return Problem(fam.ensemble(), fam.states, fam)
    if kind == "pure":
        v = _matrix(spec["states"])
        return Problem(Ensemble.from_pure(v, spec.get("priors")), v)
    if kind == "mixed":
        rho = np.array([_matrix(m) for m in spec["states"]])
        priors = spec.get("priors")
        if priors is None:
            priors = np.full(len(rho), 1.0 / len(rho))
        return Problem(Ensemble(rho, priors))
    if kind == "mixed_symmetric":
        fam = _family(spec["family"])
        ens = mix_symmetric(fam, MixtureSpec(np.array(spec["mixture"], dtype=float)))
        return Problem(ens, None, fam)
    if kind == "zero_plus":
        ens = zero_plus_alphabet()
        return Problem(ens, np.array([[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)]], dtype=complex))
    raise ScenarioParseError(f"unknown ensemble type {kind!r}")


def build_cost(spec: Optional[dict], n: int) -> np.ndarray:
    if spec is None or spec["type"] == "min_error":
        return min_error_cost(n)
    if spec["type"] == "matrix":
        c = as_cost(spec["matrix"])
    elif spec["type"] == "circulant":
        c = circulant_cost(spec["coeffs"]).matrix()
    else:
        c = symmetric_circulant(spec["half"], n).matrix()
    if c.shape[0] != n:
        raise DimensionMismatch(f"cost has {c.shape[0]} rows for {n} states")
    return c


def build_function(spec: dict, local_cost: np.ndarray) -> GlobalCostFunction:
    if spec["type"] == "linear":
        return GlobalCostFunction.linear(local_cost, spec.get("a", 1.0), spec.get("b", 0.0))
    if spec["type"] == "step":
        return GlobalCostFunction.step(local_cost, spec["threshold"])
    return GlobalCostFunction.table(
        local_cost, spec["values"], spec.get("convex", False), spec.get("concave", False)
    )


def oracle_config(data: dict, **overrides) -> OracleConfig:
    """Defaults, then ``$MINCOST_SEED``, then the file's ``oracle_config``, then ``overrides``."""
    cfg = OracleConfig()
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            cfg = cfg.with_(seed=int(env))
        except ValueError as exc:
            raise ScenarioParseError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    cfg = cfg.with_(**data.get("oracle_config", {}))
    return cfg.with_(**{k: v for k, v in overrides.items() if v is not None})


# --- analyses ---------------------------------------------------------------

def _srm(problem: Problem):
    if problem.family is not None:
        return srm_symmetric(problem.family)
    if problem.vectors is not None:
        return srm_general(problem.vectors)
    return None


def _oracle_fields(prefix: str, res, out: dict) -> None:
    out[prefix + "_iterations"] = res.iterations
    out[prefix + "_lower_bound"] = res.lower_bound
    out[prefix + "_helstrom_residual"] = res.helstrom_residual
    out[prefix + "_certified"] = res.certified


def _run_min_error(data, problem, cfg) -> dict:
    ens = problem.ensemble
    n = ens.n_states
    out: dict = {}
    if problem.vectors is not None:
        out["gram_eigenvalues"] = gram(problem.vectors).eigenvalues
    if problem.family is not None and data["ensemble"]["type"] != "mixed_symmetric":
        out["min_error_closed_form"] = min_error_symmetric(problem.family.spectrum())
    cost = min_error_cost(n)
    srm = _srm(problem)
    res = minimize_cost(ens, cost, config=cfg)
    out["oracle_min_error"] = res.min_cost
    _oracle_fields("oracle", res, out)
    if srm is not None:
        out["srm_error"] = average_cost(ens, cost, srm.povm)
        out["srm_certified"] = check_optimality(ens, cost, srm.povm, tol=cfg.residual_tol).certified_optimal
        out["srm_oracle_gap"] = out["srm_error"] - res.min_cost
    return out


def _run_min_cost(data, problem, cfg) -> dict:
    ens = problem.ensemble
    cost = build_cost(data.get("cost"), ens.n_states)
    out: dict = {}
    circ = circulant_structure(cost)
    out["circulant"] = circ is not None
    if circ is not None:
        out["circulant_eigenvalues"] = np.real(circ.dft_eigenvalues)
        out["symmetric_nsd"] = bool(circ.symmetric and circ.is_nsd())
    res = minimize_cost(ens, cost, data.get("options", {}).get("n_outcomes"), config=cfg)
    out["min_cost"] = res.min_cost
    _oracle_fields("oracle", res, out)
    srm = _srm(problem)
    if srm is not None and cost.shape[1] == ens.n_states:
        out["srm_cost"] = average_cost(ens, cost, srm.povm)
        out["srm_certified"] = check_optimality(ens, cost, srm.povm, tol=cfg.residual_tol).certified_optimal
        out["srm_oracle_gap"] = out["srm_cost"] - res.min_cost
    return out


def _run_oracle(data, problem, cfg) -> dict:
    ens = problem.ensemble
    cost = build_cost(data.get("cost"), ens.n_states)
    opts = data.get("options", {})
    res = minimize_cost(ens, cost, opts.get("n_outcomes"), config=cfg)
    out = {"min_cost": res.min_cost, "final_step_delta": res.final_step_delta}
    _oracle_fields("oracle", res, out)
    if opts.get("include_povm"):
        out["povm"] = res.povm.elements
    return out


def _run_bound(data, problem, cfg) -> dict:
    if problem.family is None or data["ensemble"]["type"] == "mixed_symmetric":
        raise MincostError("bound scenarios need a pure symmetric family")
    cost = build_cost(data.get("cost"), problem.ensemble.n_states)
    opts = data.get("options", {})
    report = bound_min_cost(problem.family, cost, round_digits=opts.get("round_digits"))
    out = report.to_dict()
    if opts.get("oracle", False):
        res = minimize_cost(problem.ensemble, cost, config=cfg)
        out["oracle_min_cost"] = res.min_cost
        out["oracle_certified"] = res.certified
        out["oracle_inside_bounds"] = bool(report.lower_bound <= res.min_cost <= report.upper_bound)
    return out


def _sequence_setup(data, problem):
    if "sequence" not in data:
        raise ScenarioParseError(f"{data['kind']} scenario needs a 'sequence' block")
    local = problem.ensemble
    local_cost = build_cost(data.get("cost"), local.n_states)
    f = build_function(data["sequence"]["function"], local_cost)
    seq = SequenceEnsemble.build(local, data["sequence"]["length"])
    return seq, f, build_global_cost(seq, f)


def _product_srm(problem, length) -> Optional[Povm]:
    srm = _srm(problem)
    return None if srm is None else tensor_povm([srm.povm] * length)


def _run_sequence(data, problem, cfg) -> dict:
    seq, f, c = _sequence_setup(data, problem)
    opts = data.get("options", {})
    glob = seq.global_ensemble
    out: dict = {"global_dim": glob.dim, "global_states": glob.n_states}

    prod = minimize_over_product_povms([seq.local_ensemble] * seq.length, f, config=cfg)
    out["product_min_cost"] = prod.min_cost

    p_srm = _product_srm(problem, seq.length)
    if p_srm is not None:
        rep = check_optimality(glob, c, p_srm, tol=cfg.residual_tol)
        out["product_srm_cost"] = average_cost(glob, c, p_srm)
        out["product_srm_cond123_residual"] = rep.conditions_residual
        out["product_srm_pairwise_residual"] = rep.pairwise_residual
        out["product_srm_cond4_min_eig"] = float(np.min(rep.cond4_min_eigs))
        out["product_srm_cond4_violated"] = rep.cond4_violation > cfg.residual_tol

    if f.kind == "linear":
        value, _ = linear_case_minimum(seq, f.local_cost, f.a, f.b, config=cfg)
        out["linear_case_value"] = value
    if opts.get("convexity", False):
        lower, upper = convexity_bounds(seq, f, config=cfg)
        out["convexity_lower"] = lower
        out["convexity_upper"] = upper

    if opts.get("global_oracle", False):
        res = minimize_cost(glob, c, config=cfg)
        out["global_oracle_min_cost"] = res.min_cost
        _oracle_fields("global_oracle", res, out)
        out["product_gap"] = prod.min_cost - res.min_cost
        if "linear_case_value" in out:
            out["linear_gap"] = out["linear_case_value"] - res.min_cost

    if opts.get("pbr", False):
        if data["ensemble"]["type"] != "zero_plus" or seq.length != 2:
            raise MincostError("the PBR basis applies to two copies of the {|0>,|+>} alphabet")
        basis = pbr_basis()
        out["pbr_cost"] = average_cost(glob, c, basis)
        elim = elimination_check(basis, glob.states)
        out["pbr_elimination"] = elim
        n = glob.n_states
        out["pbr_eliminates_one_each"] = bool(
            np.all(elim.sum(axis=1) == 1) and all(elim[j, n - 1 - j] for j in range(n))
        )
    return out


def _scenario_povm(data, problem, glob: Ensemble, cost, cfg, length) -> Povm:
    spec = data.get("povm", "srm")
    if isinstance(spec, dict):
        return Povm(np.array([_matrix(m) for m in spec["elements"]]))
    if spec == "pbr":
        return pbr_basis()
    if spec == "oracle":
        return minimize_cost(glob, cost, config=cfg).povm
    povm = _product_srm(problem, length)
    if povm is None:
        raise MincostError("the SRM needs pure states")
    return povm


def _run_helstrom(data, problem, cfg) -> dict:
    if "sequence" in data:
        seq, _, cost = _sequence_setup(data, problem)
        glob, length = seq.global_ensemble, seq.length
    else:
        glob, length = problem.ensemble, 1
        cost = build_cost(data.get("cost"), glob.n_states)
    povm = _scenario_povm(data, problem, glob, cost, cfg, length)
    rep = check_optimality(glob, cost, povm, tol=cfg.residual_tol)
    out = {"cost": average_cost(glob, cost, povm)}
    out.update(rep.summary())
    out["conditions_residual"] = rep.conditions_residual
    out["cond4_violated"] = rep.cond4_violation > cfg.residual_tol
    return out


RUNNERS = {
    "min_error": _run_min_error,
    "min_cost": _run_min_cost,
    "oracle": _run_oracle,
    "bound": _run_bound,
    "sequence": _run_sequence,
    "helstrom_check": _run_helstrom,
}


# --- expectations -----------------------------------------------------------

def _check_one(key: str, exp: dict, actual) -> dict:
    row = {"key": key, "actual": actual}
    row.update(exp)
    if actual is None:
        row["passed"] = False
        return row
    ok = True
    if "value" in exp:
        want = exp["value"]
        if isinstance(want, bool):
            ok = bool(actual) is want
        else:
            a = np.asarray(actual, dtype=float)
            w = np.asarray(want, dtype=float)
            ok = a.shape == w.shape and bool(np.all(np.abs(a - w) <= exp.get("tol", 0.0)))
    if "min" in exp:
        ok = ok and float(np.min(actual)) >= exp["min"]
    if "max" in exp:
        ok = ok and float(np.max(actual)) <= exp["max"]
    row["passed"] = bool(ok)
    return row


def check_expectations(expected: dict, results: dict) -> list[dict]:
    rows = []
    for key in sorted(expected):
        specs = expected[key]
        for exp in specs if isinstance(specs, list) else [specs]:
            rows.append(_check_one(key, exp, results.get(key)))
    return rows


def run_scenario(data: dict, **overrides) -> dict:
    """Run a parsed scenario and return its report (a JSON-ready dict).

    ``overrides`` are :class:`OracleConfig` fields; ``None`` values are ignored.
    """
    validate_scenario(data)
    cfg = oracle_config(data, **overrides)
    problem = build_problem(data["ensemble"])
    results = RUNNERS[data["kind"]](data, problem, cfg)
    checks = check_expectations(data.get("expected", {}), results)
    report = {
        "name": data["name"],
        "kind": data["kind"],
        "oracle_config": asdict(cfg),
        "results": results,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    if "description" in data:
        report["description"] = data["description"]
    return jsonable(report)
