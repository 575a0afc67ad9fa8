import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from helpers import QDS_COST, random_family, random_nsd_half
from mincost import (
    OracleConfig,
    bound_min_cost,
    coherent_symmetric_family,
    minimize_cost,
    srm_cost_circulant,
    symmetric_circulant,
)
from mincost.bounds import orbit_envelopes, round_sig
from mincost.errors import DimensionMismatch, EnvelopeNotNSD, UnsupportedPriors


@pytest.fixture(scope="module")
def fam():
    return coherent_symmetric_family(2.0, 4)


def test_qds_pipeline_three_figures(fam):
    rep = bound_min_cost(fam, QDS_COST, round_digits=3)
    assert rep.shift_cost == pytest.approx(1.38e-4, abs=5e-7)
    assert rep.global_offset == pytest.approx(1.55e-3, abs=1e-15)
    assert np.allclose(rep.lower_envelope.coeffs, [-1.55e-3, -0.92e-3, -0.51e-3, -0.92e-3], atol=1e-15)
    assert np.allclose(rep.upper_envelope.coeffs, [-1.55e-3, -0.21e-3, 0.0, -0.21e-3], atol=1e-15)
    assert rep.lower_envelope_cost == pytest.approx(-1.54989e-3, abs=1e-8)
    assert rep.upper_envelope_cost == pytest.approx(-1.54978e-3, abs=1e-8)
    assert rep.lower_bound - rep.shift_cost == pytest.approx(1.1e-7, abs=5e-9)
    assert rep.upper_bound - rep.shift_cost == pytest.approx(2.2e-7, abs=5e-9)
    assert rep.envelope_valid == (True, True)


def test_qds_pipeline_exact(fam):
    rep = bound_min_cost(fam, QDS_COST)
    assert rep.shift_cost == pytest.approx(1.3815e-4, abs=1e-15)
    assert rep.global_offset == pytest.approx(1.5493e-3, abs=1e-15)
    # agrees with the rounded envelopes to three significant figures
    assert np.allclose(rep.lower_envelope.coeffs, [-1.55e-3, -0.92e-3, -0.51e-3, -0.92e-3], atol=5e-6)
    assert np.allclose(rep.upper_envelope.coeffs, [-1.55e-3, -0.21e-3, 0.0, -0.21e-3], atol=5e-6)
    assert rep.lower_bound - rep.shift_cost == pytest.approx(1.1e-7, abs=5e-9)
    assert rep.upper_bound - rep.shift_cost == pytest.approx(2.2e-7, abs=5e-9)
    oracle = minimize_cost(fam.ensemble(), QDS_COST).min_cost
    assert rep.lower_bound <= oracle <= rep.upper_bound


def test_envelope_ordering(fam):
    rep = bound_min_cost(fam, QDS_COST)
    assert np.all(rep.lower_envelope.matrix() <= rep.shifted_cost)
    assert np.all(rep.shifted_cost <= rep.upper_envelope.matrix())
    assert np.all(rep.shifted_cost <= 0) and rep.shifted_cost.max() == 0


def test_value_identity(fam):
    rep = bound_min_cost(fam, QDS_COST)
    spec = fam.spectrum()
    assert rep.lower_bound == rep.shift_cost + rep.global_offset + srm_cost_circulant(spec, rep.lower_envelope)
    assert rep.upper_bound == rep.shift_cost + rep.global_offset + srm_cost_circulant(spec, rep.upper_envelope)


def test_circulant_nsd_bounds_coincide(fam):
    c = symmetric_circulant([-1.0, -0.5, -0.25], 4).matrix()
    rep = bound_min_cost(fam, c)
    srm = srm_cost_circulant(fam.spectrum(), symmetric_circulant([-1.0, -0.5, -0.25], 4))
    assert rep.lower_bound == pytest.approx(rep.upper_bound, abs=1e-15)
    assert rep.lower_bound == pytest.approx(srm, abs=1e-15)


def test_constant_matrix(fam):
    rep = bound_min_cost(fam, np.full((4, 4), 5.0))
    assert rep.lower_bound == 5.0 and rep.upper_bound == 5.0


def test_envelope_not_nsd(fam):
    # remainder concentrated on one offset orbit gives a positive eigenvalue
    c = symmetric_circulant([0.0, 0.0, 1.0], 4).matrix()
    with pytest.raises(EnvelopeNotNSD) as info:
        bound_min_cost(fam, c)
    err = info.value
    assert err.side in ("lower", "upper")
    assert np.max(err.eigenvalues) > 0
    assert err.report is not None
    partial = bound_min_cost(fam, c, strict=False)
    assert None in (partial.lower_bound, partial.upper_bound)
    rescued = bound_min_cost(fam, c, oracle_fallback=OracleConfig())
    assert "oracle" in (rescued.lower_method, rescued.upper_method)
    assert rescued.lower_bound <= rescued.upper_bound + 1e-8


def test_bounds_reject(fam):
    with pytest.raises(UnsupportedPriors):
        bound_min_cost(fam, QDS_COST, priors=[0.4, 0.2, 0.2, 0.2])
    bound_min_cost(fam, QDS_COST, priors=[0.25] * 4)
    with pytest.raises(DimensionMismatch):
        bound_min_cost(fam, np.zeros((3, 3)))


def test_round_sig():
    assert round_sig(1.5493e-3, 3) == 1.55e-3
    assert round_sig(0.0, 3) == 0.0
    assert np.allclose(round_sig(np.array([6.876e-4, 1.0966e-3]), 3), [6.88e-4, 1.10e-3])


def test_orbit_envelopes_symmetric():
    m = -np.arange(16, dtype=float).reshape(4, 4)
    lo, hi = orbit_envelopes(m)
    assert lo[1] == lo[3] and hi[1] == hi[3]
    assert np.all(lo <= hi)


@settings(max_examples=40)
@given(st.integers(0, 2**32 - 1))
def test_sandwich(seed):
    rng = np.random.default_rng(seed)
    fam = random_family(rng, 4)
    # circulant NSD part plus small noise keeps both envelopes NSD
    base = symmetric_circulant(random_nsd_half(rng), 4).matrix()
    c = base + 0.01 * abs(base[0, 0]) * rng.random((4, 4))
    rep = bound_min_cost(fam, c, strict=False)
    assume(all(rep.envelope_valid))
    assert rep.lower_bound <= rep.upper_bound
    oracle = minimize_cost(fam.ensemble(), c).min_cost
    assert rep.lower_bound - 1e-7 <= oracle <= rep.upper_bound + 1e-7
