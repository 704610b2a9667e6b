"""Loss channels, rate integration and the usable-atom-number bound."""
import numpy as np
import pytest

from mottsqueeze.errors import DomainError, RegimeError
from mottsqueeze.lattice import PhysicalSetup, RampSchedule, hubbard_params
from mottsqueeze.losses import (SCENARIO_A, SCENARIO_B, XI2_PREFACTOR,
                                LossScenario, _integrate_rates,
                                evolve_losses, loss_coefficients, loss_table,
                                n_max_crossing)


@pytest.fixture(scope="module")
def setup():
    return PhysicalSetup()


@pytest.fixture(scope="module")
def table(setup):
    # coarse table over a short shallow interval: enough for unit checks
    return loss_table(setup, 2.0, 6.0, n_points=8, n_max=12, tol=1e-9)


def test_scenarios_well_formed():
    assert SCENARIO_A.any_two_body and not SCENARIO_A.any_three_body
    assert SCENARIO_B.any_three_body and not SCENARIO_B.any_two_body
    with pytest.raises(DomainError):
        LossScenario("bad", K_a2=-1.0)


def test_coefficient_scaling(setup):
    p = hubbard_params(setup, 5.0)
    c1 = loss_coefficients(p, SCENARIO_A, 1000)
    c2 = loss_coefficients(p, SCENARIO_A, 2000)
    # two-body coefficients carry 1/M, the interspecies one an extra 1/2
    assert c1["gamma_b2"] == pytest.approx(2 * c2["gamma_b2"], rel=1e-12)
    assert c1["gamma_ab2"] == pytest.approx(
        SCENARIO_A.K_ab2 * p.I2 / 2000.0, rel=1e-12)
    assert c1["gamma_a2"] == 0.0
    c3 = loss_coefficients(p, SCENARIO_B, 1000)
    assert c3["gamma_a3"] == pytest.approx(
        SCENARIO_B.K_a3 * p.I3 / 1000.0**2, rel=1e-12)


def test_two_body_closed_form():
    # dN/dt = -g N^2 integrates to 1/N = 1/N0 + g t
    g = 2.5e-4
    rate = lambda t, na, nb: -g * na * na
    zero = lambda t, na, nb: 0.0
    times = np.linspace(0.0, 50.0, 11)
    tt, na, nb = _integrate_rates(rate, zero, 1000.0, 300.0, 50.0, times=times)
    want = 1.0 / (1.0 / 1000.0 + g * tt)
    assert na == pytest.approx(want, rel=1e-8)
    assert nb == pytest.approx(np.full_like(tt, 300.0), rel=1e-12)


def test_exponential_closed_form():
    # linear losses stay exactly exponential
    rate = lambda t, na, nb: -3.0 * na
    times = np.linspace(0.0, 1.0, 6)
    tt, na, _ = _integrate_rates(rate, lambda t, na, nb: 0.0, 10.0, 10.0,
                                 1.0, times=times)
    assert na == pytest.approx(10.0 * np.exp(-3.0 * tt), rel=1e-8)


def test_evolution_monotone_and_bounded(setup, table):
    r = RampSchedule(2.0, 6.0, 0.05)
    out = evolve_losses(setup, SCENARIO_A, 1000, r, table=table,
                        times=np.linspace(0.0, 0.05, 21))
    ntot = out["n_a"] + out["n_b"]
    assert np.all(np.diff(ntot) <= 1e-9)
    assert 0.0 < out["lost_fraction"][-1] < 1.0
    assert np.all(out["n_a"] > 0) and np.all(out["n_b"] > 0)


def test_symmetric_scenario_keeps_balance(setup, table):
    # equal intraspecies three-body constants: the populations stay equal
    sym = LossScenario("sym", K_a3=1e-41, K_b3=1e-41)
    r = RampSchedule(2.0, 6.0, 0.05)
    out = evolve_losses(setup, sym, 1000, r, table=table,
                        times=np.linspace(0.0, 0.05, 11))
    assert out["n_a"] == pytest.approx(out["n_b"], rel=1e-9)


def test_losses_grow_with_atom_number(setup, table):
    # at fixed ramp time the relative three-body loss grows with density N/M
    r = RampSchedule(2.0, 6.0, 0.05)
    lost = [evolve_losses(setup, SCENARIO_B, n, r, table=table,
                          times=np.array([0.0, 0.05]))["lost_fraction"][-1]
            for n in (1000, 1000)]
    assert lost[0] == pytest.approx(lost[1], rel=1e-12)


def test_deep_lattice_suppression(setup):
    # pair correlations collapse across the transition, so the instantaneous
    # loss rate at the critical depth is negligible next to the shallow one
    t2 = loss_table(setup, 2.0, 13.0, n_points=12)
    assert t2.g2_ab(13.0) < 0.02 * t2.g2_ab(2.0)
    assert t2.g3_a(13.0) < 1e-3 * t2.g3_a(2.0)


def test_no_crossing_raises(setup):
    lossless = LossScenario("none")
    with pytest.raises(RegimeError):
        n_max_crossing(setup, lossless, np.array([10.0, 100.0, 1000.0]),
                       v_c=13.0566, t_best_constant=50.0)


def test_crossing_on_synthetic_grid(setup, table):
    # xi2_best prefactor is the asymptotic constant
    assert XI2_PREFACTOR == pytest.approx(3 ** (2 / 3) / 2, rel=1e-15)
    out = n_max_crossing(setup, SCENARIO_A, np.array([10.0, 100.0, 1000.0]),
                         v_c=6.0, table=table, t_best_constant=500.0)
    assert out["N_max"] > 0
    assert np.all(np.diff(out["lost_fraction"]) > 0)
    assert np.all(np.diff(out["xi2_best"]) < 0)
