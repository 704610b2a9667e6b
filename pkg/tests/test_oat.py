"""One-axis-twisting models and the squeezing-rate curve."""
import numpy as np
import pytest

from mottsqueeze.errors import DomainError
from mottsqueeze.lattice import PhysicalSetup, RampSchedule, hubbard_params
from mottsqueeze.oat import (ChiCurve, T_of_t, chi_at_depth, chi_curve,
                             dynamic_oat_trajectory, mott_residual_estimate,
                             oat_scan, oat_xi2, scaling_exponent,
                             static_oat_trajectory, t_best)


def test_zero_twist_is_coherent():
    xi2, spin = oat_xi2(125, 0.0)
    assert xi2 == pytest.approx(1.0, abs=1e-8)
    assert spin == pytest.approx(62.5, rel=1e-12)


def test_mean_spin_closed_form():
    n, T = 30, 0.11
    _, spin = oat_xi2(n, T)
    assert spin == pytest.approx(n / 2.0 * np.cos(T) ** (n - 1), rel=1e-12)


def test_exact_scan_matches_asymptotics():
    # asymptotic optimum: xi2 = 3^(2/3) / (2 N^(2/3)) at T = 3^(1/6) N^(-2/3)
    n = 125
    scan = oat_scan(n, np.linspace(0.2, 1.3, 60) * 3 ** (1 / 6) * n ** (-2 / 3))
    assert scan["xi2_best"] == pytest.approx(3 ** (2 / 3) / (2 * n ** (2 / 3)), rel=0.15)
    assert scan["T_best"] == pytest.approx(3 ** (1 / 6) * n ** (-2 / 3), rel=0.15)
    # frozen values from a fine independent scan
    assert scan["xi2_best"] == pytest.approx(0.041418, rel=1e-3)
    assert scan["T_best"] == pytest.approx(0.047168, rel=1e-3)


def test_chi_inverse_n_scaling():
    # the one-atom-transfer curvature scales exactly as 1/N at fixed filling
    setup = PhysicalSetup()
    params = hubbard_params(setup, 8.0)
    chi1, _ = chi_at_depth(setup, params, 100)
    chi2, _ = chi_at_depth(setup, params, 200)
    assert chi1 > 0
    assert chi1 / chi2 == pytest.approx(2.0, rel=1e-6)


def test_chi_curve_pinned_past_transition():
    setup = PhysicalSetup()
    v = np.linspace(12.0, 14.0, 5)
    c = chi_curve(setup, 100, v, v_c=13.0)
    assert np.all(c.chi[v > 13.0] == 0.0)
    assert np.all(c.chi[v < 13.0] > 0.0)


def test_twist_angle_integral():
    # constant chi: T(t) = chi t for any ramp
    v = np.linspace(2.0, 13.0, 50)
    c = ChiCurve(n_atoms=100, v_grid=v, chi=np.full(50, 7.0))
    r = RampSchedule(2.0, 13.0, 0.04)
    t = np.linspace(0.0, 0.04, 9)
    assert T_of_t(c, r, t) == pytest.approx(7.0 * t, rel=1e-12)
    assert c.chi_avg == pytest.approx(7.0, rel=1e-12)


def test_t_best_formula():
    v = np.linspace(2.0, 13.0, 50)
    c = ChiCurve(n_atoms=1000, v_grid=v, chi=np.full(50, 7.0))
    assert t_best(c) == pytest.approx(3 ** (1 / 6) * 1000 ** (-2 / 3) / 7.0, rel=1e-12)
    with pytest.raises(DomainError):
        t_best(ChiCurve(n_atoms=10, v_grid=v, chi=np.zeros(50)))


def test_static_dynamic_agree_for_constant_chi():
    v = np.linspace(2.0, 13.0, 50)
    c = ChiCurve(n_atoms=200, v_grid=v, chi=np.full(50, 5.0))
    r = RampSchedule(2.0, 13.0, 0.01)
    times = np.linspace(0.0, 0.01, 7)
    dyn = dynamic_oat_trajectory(c, r, times)
    sta = static_oat_trajectory(200, 5.0, times)
    assert dyn["xi2"] == pytest.approx(sta["xi2"], rel=1e-10)


def test_scaling_exponent_recovers_power_law():
    n = np.array([125.0, 1e3, 1e4, 1e5])
    t = 0.37 * n ** (1.0 / 3.0)
    alpha, pref = scaling_exponent(n, t)
    assert alpha == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert pref == pytest.approx(0.37, rel=1e-12)


def test_mott_residual_small():
    out = mott_residual_estimate(0.005, 0.3, 10000)
    assert out["negligible"]
