"""Two-branch Bogoliubov spectra and ramp-driven mode excitation."""
import math

import numpy as np
import pytest

from mottsqueeze.bogoliubov import (DEFAULT_FILLINGS, _integrate_mode,
                                    _log_ratio, adiabatic_time, drive_rate,
                                    excitation_fraction, free_gap,
                                    mode_groups, ramp_table,
                                    sound_velocities, spectrum)
from mottsqueeze.errors import RegimeError
from mottsqueeze.lattice import (HubbardParams, PhysicalSetup, RampSchedule,
                                 hubbard_params)


@pytest.fixture(scope="module")
def setup():
    return PhysicalSetup()


@pytest.fixture(scope="module")
def params(setup):
    return hubbard_params(setup, 8.0)


@pytest.fixture(scope="module")
def table(setup):
    # short depth interval keeps the fixture fast; modes are integrated on it
    return ramp_table(setup, 4.0, 8.0, n_points=25)


def test_free_gap_properties(params):
    q = np.array([0.3, 0.0, 0.0])
    assert free_gap(params, np.zeros(3)) == 0.0
    assert free_gap(params, q) == pytest.approx(2 * params.J * (1 - np.cos(0.3)))
    assert free_gap(params, -q) == free_gap(params, q)
    # band edge in all three directions
    assert free_gap(params, np.full(3, np.pi)) == pytest.approx(12 * params.J)


def test_spectrum_decoupled(setup, params):
    # U_ab = 0: the branches are the two independent single-species spectra
    p0 = HubbardParams(v0=params.v0, J=params.J, U_aa=0.3, U_bb=0.1,
                       U_ab=0.0, I2=params.I2, I3=params.I3)
    q = np.array([0.4, 0.2, 0.0])
    wp, wm = spectrum(setup, p0, 0.5, 0.5, q)
    de = free_gap(p0, q)
    er, hbar = setup.recoil_energy, setup.hbar
    wa = math.sqrt(de * (de + 2 * 0.3 * 0.5)) * er / hbar
    wb = math.sqrt(de * (de + 2 * 0.1 * 0.5)) * er / hbar
    assert wp == pytest.approx(max(wa, wb), rel=1e-12)
    assert wm == pytest.approx(min(wa, wb), rel=1e-12)


def test_spectrum_symmetric_case(setup, params):
    # equal intraspecies couplings: splitting is exactly 2 U_ab n
    q = np.array([0.7, 0.0, 0.0])
    wp, wm = spectrum(setup, params, 0.5, 0.5, q)
    de = free_gap(params, q)
    s = params.U_aa * 0.5 + params.U_bb * 0.5
    sab = params.U_ab * 0.5
    er, hbar = setup.recoil_energy, setup.hbar
    assert wp == pytest.approx(math.sqrt(de * (de + s + 2 * sab)) * er / hbar, rel=1e-12)
    assert wm == pytest.approx(math.sqrt(de * (de + s - 2 * sab)) * er / hbar, rel=1e-12)
    assert wp > wm > 0


def test_spectrum_unstable_branch_raises(setup, params):
    # interspecies repulsion beyond the miscibility bound makes S_minus < 0
    bad = HubbardParams(v0=8.0, J=params.J, U_aa=0.2, U_bb=0.2, U_ab=0.3,
                        I2=params.I2, I3=params.I3)
    with pytest.raises(RegimeError):
        spectrum(setup, bad, 0.5, 0.5, np.array([0.3, 0.0, 0.0]))


def test_sound_velocity_small_q_limit(setup, params):
    cp, cm = sound_velocities(setup, params, *DEFAULT_FILLINGS)
    qs = 1e-5
    wp, wm = spectrum(setup, params, 0.5, 0.5, np.array([qs, 0.0, 0.0]))
    q_si = qs / setup.lattice_period
    # 1 - cos q roundoff caps the attainable agreement near 1e-7
    assert wp / q_si == pytest.approx(cp, rel=1e-6)
    assert wm / q_si == pytest.approx(cm, rel=1e-6)
    assert cp > cm > 0


def test_log_ratio_consistent_with_spectrum(setup, table):
    # exp(-log ratio) * dE must reproduce the spectrum at a table depth
    v0 = 6.0
    cos_sum = 1.0 - np.cos(2 * np.pi / 5)
    lr_p, lr_m = _log_ratio(table, 0.5, 0.5, cos_sum, v0)
    p = hubbard_params(setup, v0)
    de = 2.0 * p.J * cos_sum
    er, hbar = setup.recoil_energy, setup.hbar
    th = np.arccos(1.0 - cos_sum)
    wp, wm = spectrum(setup, p, 0.5, 0.5, np.array([th, 0.0, 0.0]))
    assert de / np.exp(lr_p) * er / hbar == pytest.approx(wp, rel=1e-6)
    assert de / np.exp(lr_m) * er / hbar == pytest.approx(wm, rel=1e-6)


def test_drive_rate_scales_with_ramp_rate(setup, table):
    q = np.array([2 * np.pi / 5, 0.0, 0.0])
    r1 = RampSchedule(4.0, 8.0, 0.05)
    r2 = RampSchedule(4.0, 8.0, 0.025)
    o1 = drive_rate(r1, setup, DEFAULT_FILLINGS, q, 0.02, table=table)
    o2 = drive_rate(r2, setup, DEFAULT_FILLINGS, q, 0.01, table=table)
    # same depth, doubled ramp rate: both branch drives double exactly
    assert o2[0] == pytest.approx(2 * o1[0], rel=1e-12)
    assert o2[1] == pytest.approx(2 * o1[1], rel=1e-12)


def test_mode_groups_count(setup):
    L, cos_sums, weights = mode_groups(125)
    assert L == 5
    assert int(np.sum(weights)) == L**3 - 1    # every mode except q = 0
    assert np.all(cos_sums > 0)
    assert np.all(np.diff(cos_sums) > 0)


def test_sudden_quench_oracle(setup, table):
    # tau -> 0: |B|^2 -> sinh^2(theta_f - theta_i) with theta = log-ratio / 2
    cos_sum = 1.0 - np.cos(2 * np.pi / 3)
    th_i = 0.5 * _log_ratio(table, 0.5, 0.5, cos_sum, 4.0)[1]
    th_f = 0.5 * _log_ratio(table, 0.5, 0.5, cos_sum, 8.0)[1]
    want = math.sinh(th_f - th_i) ** 2
    r = RampSchedule(4.0, 8.0, 1e-9)
    b2, drift = _integrate_mode(setup, r, table, 0.5, 0.5, cos_sum, "-")
    assert b2 == pytest.approx(want, rel=1e-4)


def test_mode_invariant_preserved(setup, table):
    cos_sum = 1.0 - np.cos(2 * np.pi / 3)
    r = RampSchedule(4.0, 8.0, 0.02)
    b2, drift = _integrate_mode(setup, r, table, 0.5, 0.5, cos_sum, "-")
    assert drift < 1e-8
    assert b2 >= 0


def test_excitations_decrease_with_ramp_time(setup, table):
    # slower ramps excite less, by orders of magnitude over a decade in tau
    fracs = []
    for tau in (1e-4, 1e-3, 1e-2):
        out = excitation_fraction(setup, 27, RampSchedule(4.0, 8.0, tau),
                                  table=table)
        fracs.append(out["total_fraction"])
        assert out["max_drift"] < 1e-8
    assert fracs[0] > fracs[1] > fracs[2]
    assert fracs[0] / fracs[2] > 10


def test_adiabatic_time_scaling(setup):
    # the asymptotic estimate is linear in the system size L
    t = ramp_table(PhysicalSetup(), 2.0, 13.0, n_points=40)
    small = adiabatic_time(PhysicalSetup(), 1000, RampSchedule(2.0, 13.0, 0.1),
                           table=t)
    big = adiabatic_time(PhysicalSetup(), 8000, RampSchedule(2.0, 13.0, 0.1),
                         table=t)
    ratio = (big["t_adiab_minus_asymptotic"] / small["t_adiab_minus_asymptotic"])
    assert ratio == pytest.approx(2.0, rel=1e-10)
    # the softer branch is the slower one to follow
    assert small["t_adiab_minus"] > small["t_adiab_plus"]
