"""Acceptance criteria, one test per criterion.

Each test appends a ``criterion N: PASS/FAIL`` line that the terminal summary
prints; run this file directly to see only these lines.
"""
import subprocess
import sys
import time

import numpy as np
import pytest

import conftest
from helpers import (
    P_MIN_ZERO_PLUS,
    QDS_COST,
    random_ensemble,
    random_family,
    random_nsd_half,
    random_povm,
    random_psd_circulant_mixture,
)
from mincost import (
    Ensemble,
    GlobalCostFunction,
    MixtureSpec,
    OracleConfig,
    SequenceEnsemble,
    average_cost,
    bound_min_cost,
    build_global_cost,
    check_optimality,
    coherent_symmetric_family,
    elimination_check,
    linear_case_minimum,
    min_error_cost,
    min_error_symmetric,
    minimize_cost,
    minimize_over_product_povms,
    mix_symmetric,
    mixed_error_to_pure_cost,
    pairwise_condition,
    pbr_basis,
    srm_cost_circulant,
    srm_general,
    srm_symmetric,
    symmetric_circulant,
    tensor_povm,
    zero_plus_alphabet,
)
from mincost.costs import constant_row_matrix


def record(label, ok, detail=""):
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  ({detail})"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_1():
    start = time.perf_counter()
    fam = coherent_symmetric_family(2.0, 4)
    closed = min_error_symmetric(fam.spectrum())
    oracle = minimize_cost(fam.ensemble(), min_error_cost(4)).min_cost
    elapsed = time.perf_counter() - start
    ok = abs(closed - 0.000168) <= 5e-7 and abs(oracle - closed) <= 1e-6 and elapsed < 1.0
    assert record(1, ok, f"closed {closed:.7e}, oracle {oracle:.7e}, {elapsed:.3f} s")


def test_criterion_2():
    a2 = 4.0
    pre = 2 * np.exp(-a2)
    expect = pre * np.array([np.cos(a2) + np.cosh(a2), np.sin(a2) + np.sinh(a2),
                             np.cosh(a2) - np.cos(a2), np.sinh(a2) - np.sin(a2)])
    lam = coherent_symmetric_family(2.0, 4).spectrum().eigenvalues
    err = float(np.max(np.abs(lam - expect)))
    assert record(2, err <= 1e-10, f"max deviation {err:.1e}")


def test_criterion_3():
    start = time.perf_counter()
    fam = coherent_symmetric_family(2.0, 4)
    rounded = bound_min_cost(fam, QDS_COST, round_digits=3)
    exact = bound_min_cost(fam, QDS_COST)
    oracle = minimize_cost(fam.ensemble(), QDS_COST).min_cost
    elapsed = time.perf_counter() - start
    checks = {
        "shift": abs(rounded.shift_cost - 1.38e-4) <= 5e-7 and abs(exact.shift_cost - 1.38e-4) <= 5e-7,
        "M": rounded.global_offset == pytest.approx(1.55e-3, abs=1e-15),
        "C_l": np.allclose(rounded.lower_envelope.coeffs[:3], [-1.55e-3, -0.92e-3, -0.51e-3], atol=1e-15),
        "C_u": np.allclose(rounded.upper_envelope.coeffs[:3], [-1.55e-3, -0.21e-3, 0.0], atol=1e-15),
        "env_costs": abs(rounded.lower_envelope_cost + 1.54989e-3) <= 1e-8
        and abs(rounded.upper_envelope_cost + 1.54978e-3) <= 1e-8,
        "increments": all(
            abs(r.lower_bound - r.shift_cost - 1.1e-7) <= 5e-9 and abs(r.upper_bound - r.shift_cost - 2.2e-7) <= 5e-9
            for r in (rounded, exact)
        ),
        "oracle_inside": exact.lower_bound <= oracle <= exact.upper_bound,
        "runtime": elapsed < 5.0,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (f"bounds [{exact.lower_bound:.6e}, {exact.upper_bound:.6e}], oracle {oracle:.6e}, "
              f"{elapsed:.2f} s" + (f", failed {failed}" if failed else ""))
    assert record(3, not failed, detail)


def test_criterion_4():
    rng = np.random.default_rng(404)
    worst_gap, uncertified, count = 0.0, 0, 0
    for _ in range(100):
        fam = random_family(rng, 4, int(rng.integers(1, 5)))
        circ = symmetric_circulant(random_nsd_half(rng), 4)
        assert circ.is_nonpositive() and circ.is_nsd()
        oracle = minimize_cost(fam.ensemble(), circ.matrix()).min_cost
        worst_gap = max(worst_gap, abs(oracle - srm_cost_circulant(fam.spectrum(), circ)))
        if not check_optimality(fam.ensemble(), circ.matrix(), srm_symmetric(fam).povm).certified_optimal:
            uncertified += 1
        count += 1
    ok = worst_gap <= 1e-6 and uncertified == 0
    assert record(4, ok, f"{count} instances, worst gap {worst_gap:.1e}, uncertified {uncertified}")


def _criterion_5_triples(rng):
    # optimal cases with exact residuals, then generic POVMs
    for _ in range(40):
        n = int(rng.integers(2, 5))
        fam = random_family(rng, n, int(rng.integers(1, n + 1)))
        cost = symmetric_circulant(rng.normal(size=n // 2 + 1), n).matrix()
        yield fam.ensemble(), cost, srm_symmetric(fam).povm
    for _ in range(10):
        d = int(rng.integers(2, 5))
        v = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))[0]
        ens = Ensemble.from_pure(v.T, rng.dirichlet(np.ones(d)))
        yield ens, rng.random((d, d)), srm_general(v.T).povm
    for _ in range(60):
        n, d = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        ens = random_ensemble(rng, n, d, pure=bool(rng.integers(2)))
        yield ens, rng.random((n, n)), random_povm(rng, n, d)


def test_criterion_5():
    rng = np.random.default_rng(505)
    count, mismatches, zero_side = 0, 0, 0
    for ens, cost, povm in _criterion_5_triples(rng):
        rep = check_optimality(ens, cost, povm)
        first = rep.conditions_residual <= 1e-8
        second = pairwise_condition(ens, cost, povm) <= 1e-6
        mismatches += first != second
        zero_side += first
        count += 1
    ok = count >= 100 and mismatches == 0
    assert record(5, ok, f"{count} triples, {zero_side} with vanishing residuals, {mismatches} disagreements")


def _small_problem(rng):
    n, d = int(rng.integers(2, 4)), int(rng.integers(1, 4))
    return random_ensemble(rng, n, d, pure=bool(rng.integers(2))), n, d


def test_criterion_6():
    rng = np.random.default_rng(606)
    cfg = OracleConfig(cost_tol=1e-9)
    shift_err = super_viol = mono_viol = 0.0
    for _ in range(200):
        ens, n, d = _small_problem(rng)
        c = rng.normal(size=(n, n))
        rows = rng.normal(size=n)
        povm = random_povm(rng, n, d)
        moved = average_cost(ens, c + constant_row_matrix(rows, n), povm) - average_cost(ens, c, povm)
        shift_err = max(shift_err, abs(moved - float(ens.priors @ rows)))
    for _ in range(200):
        ens, n, _ = _small_problem(rng)
        c1, c2 = rng.normal(size=(n, n)), rng.normal(size=(n, n))
        total = minimize_cost(ens, c1 + c2, config=cfg).min_cost
        parts = minimize_cost(ens, c1, config=cfg).min_cost + minimize_cost(ens, c2, config=cfg).min_cost
        super_viol = max(super_viol, parts - total)
    for _ in range(200):
        ens, n, _ = _small_problem(rng)
        low = rng.normal(size=(n, n))
        high = low + rng.random((n, n)) * (rng.random((n, n)) < 0.6)
        mono_viol = max(mono_viol, minimize_cost(ens, low, config=cfg).min_cost
                        - minimize_cost(ens, high, config=cfg).min_cost)
    ok = shift_err <= 1e-12 and super_viol <= 1e-6 and mono_viol <= 1e-6
    detail = (f"200 each; shift error {shift_err:.1e}, superadditivity excess {max(super_viol, 0):.1e}, "
              f"monotonicity excess {max(mono_viol, 0):.1e}")
    assert record(6, ok, detail)


def test_criterion_7():
    rng = np.random.default_rng(707)
    worst, count = 0.0, 0
    for _ in range(100):
        n = int(rng.choice([3, 4]))
        fam = random_family(rng, n, int(rng.integers(1, n + 1)))
        a = rng.dirichlet(np.ones(n), size=n)
        eta = rng.dirichlet(np.ones(n))
        povm = random_povm(rng, n, fam.dim)
        mixed = Ensemble(mix_symmetric(fam, MixtureSpec(a)).states, eta)
        p_err = average_cost(mixed, min_error_cost(n), povm)
        pure = average_cost(fam.ensemble(), mixed_error_to_pure_cost(MixtureSpec(a), eta), povm)
        worst = max(worst, abs(p_err - pure))
        count += 1
    identity_ok = all(
        np.array_equal(mixed_error_to_pure_cost(MixtureSpec(np.eye(n)), np.full(n, 1 / n)), min_error_cost(n))
        for n in (3, 4)
    )
    ok = worst <= 1e-12 and identity_ok
    assert record(7, ok, f"{count} mixtures, worst difference {worst:.1e}, identity map exact {identity_ok}")


def test_criterion_8():
    rng = np.random.default_rng(808)
    uncertified, worst_cov = 0, 0.0
    for _ in range(50):
        n = int(rng.choice([3, 4, 5]))
        fam = random_family(rng, n, int(rng.integers(1, n + 1)))
        mixed = mix_symmetric(fam, MixtureSpec(random_psd_circulant_mixture(rng, n)))
        u = fam.symmetry_unitary
        rho = mixed.states
        for i in range(n):
            worst_cov = max(worst_cov, float(np.max(np.abs(u @ rho[i] @ u.conj().T - rho[(i + 1) % n]))))
        if not check_optimality(mixed, min_error_cost(n), srm_symmetric(fam).povm).certified_optimal:
            uncertified += 1
    ok = uncertified == 0 and worst_cov <= 1e-10
    assert record(8, ok, f"50 mixtures, uncertified {uncertified}, covariance error {worst_cov:.1e}")


def test_criterion_9():
    rng = np.random.default_rng(909)
    worst_oracle, worst_formula, count = 0.0, 0.0, 0
    for _ in range(12):
        n, d = int(rng.integers(2, 4)), int(rng.integers(2, 5))
        local = random_ensemble(rng, n, d, pure=bool(rng.integers(2)))
        c = rng.random((n, n))
        a, b = float(rng.uniform(0.2, 2.0)), float(rng.normal())
        seq = SequenceEnsemble.build(local, 2)
        value, povm = linear_case_minimum(seq, c, a, b)
        glob_c = build_global_cost(seq, GlobalCostFunction.linear(c, a, b))
        glob = minimize_cost(seq.global_ensemble, glob_c).min_cost
        local_min = minimize_cost(local, c).min_cost
        worst_oracle = max(worst_oracle, abs(average_cost(seq.global_ensemble, glob_c, povm) - glob))
        worst_formula = max(worst_formula, abs(value - (a * 2 * local_min + b)))
        count += 1
    ok = worst_oracle <= 1e-6 and worst_formula <= 1e-6
    assert record(9, ok, f"{count} instances, product vs global {worst_oracle:.1e}, formula {worst_formula:.1e}")


@pytest.fixture(scope="module")
def pbr_setup():
    local = zero_plus_alphabet()
    seq = SequenceEnsemble.build(local, 2)
    f = GlobalCostFunction.step(min_error_cost(2), 2)
    product = minimize_over_product_povms([local, local], f).min_cost
    return local, seq, f, product


def test_criterion_10(pbr_setup):
    local, seq, f, product = pbr_setup
    c = build_global_cost(seq, f)
    pbr = average_cost(seq.global_ensemble, c, pbr_basis())
    glob = minimize_cost(seq.global_ensemble, c, config=OracleConfig(cost_tol=1e-10)).min_cost
    elim = elimination_check(pbr_basis(), seq.global_states)
    srm = srm_general([[1, 0], [1 / np.sqrt(2), 1 / np.sqrt(2)]]).povm
    rep = check_optimality(seq.global_ensemble, c, tensor_povm([srm, srm]))
    checks = {
        "product=p_min^2": abs(product - P_MIN_ZERO_PLUS**2) <= 1e-4,
        "pbr": abs(pbr) <= 1e-12,
        "global": glob <= 1e-9,
        "elimination": bool(np.all(elim.sum(axis=1) == 1)),
        "cond123": rep.conditions_residual <= 1e-8,
        "cond4_fails": not rep.certified_optimal and rep.cond4_violation > rep.tol,
    }
    failed = [k for k, v in checks.items() if not v]
    detail = (f"product {product:.10f}, pbr {pbr:.1e}, global {glob:.1e}, "
              f"cond4 min eig {np.min(rep.cond4_min_eigs):.4f}" + (f", failed {failed}" if failed else ""))
    assert record("10 (all but the literal 0.021)", not failed, detail)


@pytest.mark.xfail(strict=True, reason="p_min^2 = 0.0214466 lies 4.5e-4 from the two-figure 0.021")
def test_criterion_10_literal(pbr_setup):
    product = pbr_setup[3]
    ok = abs(product - 0.021) <= 1e-4
    record("10 (literal 0.021 within 1e-4)", ok, f"product {product:.10f}, |diff| {abs(product - 0.021):.2e}")
    assert ok


def test_criterion_11():
    rng = np.random.default_rng(1111)
    worst, count = 0.0, 0
    for n, length in [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3)]:
        for _ in range(3):
            fam = random_family(rng, n, int(rng.integers(1, n + 1)))
            seq = SequenceEnsemble.build(fam.ensemble(), length)
            local_c = symmetric_circulant(rng.random(n // 2 + 1), n).matrix()
            sums = np.unique(np.round(build_global_cost(seq, GlobalCostFunction.linear(local_c)), 12))
            funcs = [GlobalCostFunction.step(local_c, float(rng.uniform(sums.min(), sums.max())))]
            # tables index the number of wrong letters
            funcs.append(GlobalCostFunction.table(min_error_cost(n), rng.random(length + 1)))
            povm = tensor_povm([srm_symmetric(fam).povm] * length)
            for f in funcs:
                worst = max(worst, pairwise_condition(seq.global_ensemble, build_global_cost(seq, f), povm))
                count += 1
    assert record(11, worst <= 1e-9, f"{count} instances over L in (2, 3), worst pairwise residual {worst:.1e}")


def test_criterion_12():
    local = zero_plus_alphabet()
    seq = SequenceEnsemble.build(local, 2)
    f = GlobalCostFunction.step(min_error_cost(2), 1)
    product = minimize_over_product_povms([local, local], f).min_cost
    glob = minimize_cost(seq.global_ensemble, build_global_cost(seq, f)).min_cost
    expect = 1 - (1 - P_MIN_ZERO_PLUS) ** 2
    ok = abs(product - glob) <= 1e-6 and abs(product - expect) <= 1e-6
    assert record(12, ok, f"product {product:.10f}, global {glob:.10f}")


if __name__ == "__main__":
    # fresh interpreter, so pytest sees plugins before this module imported them
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q", "-p", "no:cacheprovider"]))
