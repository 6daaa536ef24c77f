"""Budget arithmetic: composition, conversion, calibration, mechanism table."""

import math

import numpy as np
import pytest

from contmech.accounting import (
    DpBudget,
    MechanismSpec,
    PrivacyParams,
    ZcdpBudget,
    calibrate_rho,
    compose,
    mechanism_budget,
    zcdp_to_dp,
)


def test_compose_adds_fieldwise():
    out = compose([ZcdpBudget(0.5, 0.0), ZcdpBudget(0.25, 0.0)])
    assert (out.rho, out.delta_event) == (0.75, 0.0)
    out = compose([ZcdpBudget(0.0, 0.0)])
    assert (out.rho, out.delta_event) == (0.0, 0.0)
    out = compose([ZcdpBudget(0.1, 1e-6), ZcdpBudget(0.2, 2e-6)])
    assert math.isclose(out.rho, 0.3)
    assert math.isclose(out.delta_event, 3e-6)


def test_compose_associative_commutative():
    budgets = [ZcdpBudget(0.1, 1e-8), ZcdpBudget(0.7, 1e-6), ZcdpBudget(0.2, 0.0)]
    forward = compose(budgets)
    backward = compose(budgets[::-1])
    nested = compose([compose(budgets[:2]), budgets[2]])
    assert math.isclose(forward.rho, backward.rho)
    assert math.isclose(forward.rho, nested.rho)
    assert math.isclose(forward.delta_event, backward.delta_event)


def test_compose_saturates_delta():
    out = compose([ZcdpBudget(0.1, 0.7), ZcdpBudget(0.1, 0.7)])
    assert out.saturated
    assert out.delta_event < 1.0


def test_compose_empty_rejected():
    with pytest.raises(ValueError):
        compose([])


def test_zcdp_to_dp_examples():
    assert zcdp_to_dp(ZcdpBudget(0.0), 0.3).epsilon == 0.0
    # rho=0.5, delta'=1e-6: 0.5 + 2*sqrt(0.5*ln(1e6))
    expected = 0.5 + 2.0 * math.sqrt(0.5 * math.log(1e6))
    got = zcdp_to_dp(ZcdpBudget(0.5), 1e-6)
    assert math.isclose(got.epsilon, expected, rel_tol=1e-12)
    assert math.isclose(got.epsilon, 5.7565, rel_tol=1e-4)
    # rho=1, delta'=1/e: ln(1/delta')=1 so epsilon = 1 + 2
    assert math.isclose(zcdp_to_dp(ZcdpBudget(1.0), math.exp(-1)).epsilon, 3.0)


def test_zcdp_to_dp_adds_event_mass():
    got = zcdp_to_dp(ZcdpBudget(0.5, 1e-4), 1e-6)
    assert math.isclose(got.delta, 1e-4 + 1e-6)


def test_zcdp_to_dp_monotone():
    rhos = np.linspace(0.01, 5, 40)
    eps = [zcdp_to_dp(ZcdpBudget(float(r)), 1e-6).epsilon for r in rhos]
    assert all(a < b for a, b in zip(eps, eps[1:]))
    slacks = np.logspace(-12, -1, 40)
    eps = [zcdp_to_dp(ZcdpBudget(0.5), float(d)).epsilon for d in slacks]
    assert all(a > b for a, b in zip(eps, eps[1:]))


def test_calibrate_rho_examples():
    assert math.isclose(calibrate_rho(DpBudget(3.0, 0.5), math.exp(-1)), 1.0)
    eps = 0.5 + 2.0 * math.sqrt(0.5 * math.log(1e6))  # = 5.75653...
    rho = calibrate_rho(DpBudget(eps, 1e-5), 1e-6)
    assert math.isclose(rho, 0.5, rel_tol=1e-9)


def test_calibrate_rho_small_epsilon_asymptote():
    eps, dp = 1e-4, 1e-6
    rho = calibrate_rho(DpBudget(eps, 1e-5), dp)
    asymptote = eps * eps / (4.0 * math.log(1.0 / dp))
    assert math.isclose(rho, asymptote, rel_tol=1e-3)


def test_calibrate_roundtrip_grid():
    for rho in np.logspace(-4, 1, 12):
        for dp in np.logspace(-12, -1, 12):
            eps = zcdp_to_dp(ZcdpBudget(float(rho)), float(dp)).epsilon
            back = calibrate_rho(DpBudget(eps, max(float(dp), 1e-12)), float(dp))
            assert math.isclose(back, rho, rel_tol=1e-9)


def test_calibrate_rho_rejects_bad_inputs():
    with pytest.raises(ValueError):
        calibrate_rho(DpBudget(0.0, 0.1), 0.05)
    with pytest.raises(ValueError):
        calibrate_rho(DpBudget(1.0, 0.01), 0.05)  # delta_prime > delta


def test_mechanism_budget_table():
    p1 = PrivacyParams(tau=1.0, delta=0.01, delta_prime=0.01)
    assert mechanism_budget(MechanismSpec("bin-mech"), p1) == ZcdpBudget(0.5, 0.0)
    assert mechanism_budget(MechanismSpec("known-base", delta0=4), p1) == ZcdpBudget(2.0, 0.0)
    assert mechanism_budget(MechanismSpec("sparse-gumb", k=1), p1) == ZcdpBudget(3.0, 0.0)
    assert mechanism_budget(MechanismSpec("known-gauss", delta0=3), p1) == ZcdpBudget(1.5, 0.0)
    assert mechanism_budget(MechanismSpec("known-gumbel", k=2), p1) == ZcdpBudget(2.0, 0.0)
    got = mechanism_budget(MechanismSpec("unk-gauss", delta0=2), p1)
    assert got.rho == 1.0 and math.isclose(got.delta_event, 0.02)
    got = mechanism_budget(MechanismSpec("unk-base", delta0=3), p1)
    assert got.rho == 1.5 and math.isclose(got.delta_event, 0.03)
    got = mechanism_budget(MechanismSpec("meta-uu", k=2), p1)
    assert got.rho == 2.0 and math.isclose(got.delta_event, 0.04)
    got = mechanism_budget(MechanismSpec("unk-gumbel", k=1, k_bar=5), p1)
    assert got.rho == 1.0 and math.isclose(got.delta_event, 0.05)


def test_mechanism_budget_rejects():
    p1 = PrivacyParams(tau=1.0, delta=0.01, delta_prime=0.01)
    with pytest.raises(ValueError):
        mechanism_budget(MechanismSpec("no-such"), p1)
    with pytest.raises(ValueError):
        mechanism_budget(MechanismSpec("known-base"), p1)  # delta0 missing


def test_privacy_params_validation():
    with pytest.raises(ValueError):
        PrivacyParams(tau=0.0)
    PrivacyParams(tau=0.0, noiseless=True)
    with pytest.raises(ValueError):
        PrivacyParams(tau=1.0, delta=0.0)
