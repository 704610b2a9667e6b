"""Two-component lattice Bogoliubov spectrum, ramp drive rate and adiabaticity.

The quadratic-fluctuation Hamiltonian on top of the phase-mixed superfluid is
diagonalized by a generalized Bogoliubov transformation with two branches,

    (hbar w_{q,+-} / dE_q)^2 = 1 + u_a + u_b +- sqrt((u_a - u_b)^2 + 4 u_ab^2),

with u_s = U_s n_s / dE_q, u_ab = U_ab sqrt(n_a n_b) / dE_q and the free-band
gap dE_q = 2 J sum_g (1 - cos q_g l).  The cross term is implemented squared;
the unsquared variant found in print is dimensionally inconsistent and fails
the decoupled U_ab = 0 limit.

During a depth ramp each (q, branch) pair behaves as a two-mode problem
driven at rate Omega = (1/2) d/dt log(dE/hbar w); integrating the mode
equations from the quasi-particle vacuum gives the excitation fraction, and
the stationarity of dE/hbar w gives closed-form adiabatic times.

Quasi-momenta are dimensionless throughout: q means q*l, with l the lattice
period, so the Brillouin zone is (-pi, pi]^3 and the finite-size grid is
q_m = 2 pi m / L, m in {0..L-1}^3, L = round(N^(1/3)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import AccuracyError, DomainError, RegimeError
from .lattice import HubbardParams, PhysicalSetup, RampSchedule, hubbard_params

DEFAULT_FILLINGS = (0.5, 0.5)
DEFAULT_TABLE_POINTS = 120
INVARIANT_WARN = 1e-8     # re-integrate threshold for |A|^2 - |B|^2 - 1
INVARIANT_FAIL = 1e-6


def free_gap(params: HubbardParams, q) -> np.ndarray:
    """Free-band dispersion gap dE_q = 2J sum_g (1 - cos q_g) in E_R.

    q has shape (..., 3) with components in units of 1/l (i.e. already
    multiplied by the lattice period).
    """
    q = np.asarray(q, dtype=float)
    return 2.0 * params.J * np.sum(1.0 - np.cos(q), axis=-1)


def _branch_terms(params, n_a, n_b):
    # interaction energies U_s n_s in E_R; the branch splitting only enters
    # through these three combinations
    sa = params.U_aa * n_a
    sb = params.U_bb * n_b
    sab = params.U_ab * math.sqrt(n_a * n_b)
    disc = math.sqrt((sa - sb) ** 2 + 4.0 * sab * sab)
    return sa + sb + disc, sa + sb - disc


def spectrum(setup: PhysicalSetup, params: HubbardParams, n_a: float,
             n_b: float, q):
    """Both Bogoliubov branch frequencies (w_plus, w_minus) in s^-1.

    Multiplying the quoted dispersion by dE_q^2 gives
    (hbar w_pm)^2 = dE (dE + S_pm) with S_pm = U_a n_a + U_b n_b +- disc,
    which avoids dividing by dE at small q.
    """
    if n_a < 0 or n_b < 0:
        raise DomainError("fillings must be non-negative")
    de = free_gap(params, q)
    if np.any(de <= 0):
        raise DomainError("spectrum requires q != 0 (dE_q > 0)")
    s_plus, s_minus = _branch_terms(params, n_a, n_b)
    hw2_plus = de * (de + s_plus)
    hw2_minus = de * (de + s_minus)
    if np.any(hw2_minus < 0):
        raise RegimeError(
            "negative branch unstable: (hbar w_-)^2 < 0 (demixing regime, "
            f"U_ab^2 > U_a U_b at small q); min value {np.min(hw2_minus):.3e} E_R^2")
    if np.any(hw2_plus < 0):
        raise RegimeError("positive branch unstable: (hbar w_+)^2 < 0")
    scale = setup.recoil_energy / setup.hbar
    return np.sqrt(hw2_plus) * scale, np.sqrt(hw2_minus) * scale


def sound_velocities(setup: PhysicalSetup, params: HubbardParams,
                     n_a: float, n_b: float):
    """Long-wavelength sound speeds (c_plus, c_minus) in m/s.

    c_pm^2 = (l/hbar)^2 J S_pm E_R^2, the q->0 limit of
    (l/hbar)^2 J ((hbar w / dE)^2 - 1) dE.
    """
    s_plus, s_minus = _branch_terms(params, n_a, n_b)
    if s_minus < 0:
        raise RegimeError("negative branch unstable at q -> 0")
    pref = (setup.lattice_period * setup.recoil_energy / setup.hbar) ** 2 * params.J
    return math.sqrt(pref * s_plus), math.sqrt(pref * s_minus)


@dataclass(frozen=True)
class RampTable:
    """Cubic-spline fit of the Hubbard parameters over a depth interval.

    Mode integrations need J(V0) and U(V0) as smooth functions; computing
    Wannier integrals inside an ODE right-hand side would dominate the cost.
    """

    v_grid: np.ndarray
    J: CubicSpline
    U_aa: CubicSpline
    U_bb: CubicSpline
    U_ab: CubicSpline

    @property
    def dv(self) -> float:
        return float(self.v_grid[1] - self.v_grid[0])

    def params_at(self, v0: float) -> HubbardParams:
        return HubbardParams(v0=float(v0), J=float(self.J(v0)),
                             U_aa=float(self.U_aa(v0)), U_bb=float(self.U_bb(v0)),
                             U_ab=float(self.U_ab(v0)), I2=0.0, I3=0.0)


def ramp_table(setup: PhysicalSetup, v_min: float, v_max: float,
               n_points: int = DEFAULT_TABLE_POINTS) -> RampTable:
    if not v_max > v_min:
        raise DomainError("need v_max > v_min")
    v = np.linspace(v_min, v_max, n_points)
    plist = [hubbard_params(setup, vi) for vi in v]
    return RampTable(
        v_grid=v,
        J=CubicSpline(v, [p.J for p in plist]),
        U_aa=CubicSpline(v, [p.U_aa for p in plist]),
        U_bb=CubicSpline(v, [p.U_bb for p in plist]),
        U_ab=CubicSpline(v, [p.U_ab for p in plist]),
    )


def _log_ratio(table, n_a, n_b, cos_sum, v0):
    """log(dE / hbar w) for both branches at depth v0; vectorized in v0.

    cos_sum = sum_g (1 - cos q_g), so dE = 2 J cos_sum.
    (dE / hbar w)^2 = dE / (dE + S_pm); the log halves the exponent.
    """
    v0 = np.asarray(v0, dtype=float)
    j = table.J(v0)
    de = 2.0 * j * cos_sum
    sa = table.U_aa(v0) * n_a
    sb = table.U_bb(v0) * n_b
    sab = table.U_ab(v0) * math.sqrt(n_a * n_b)
    disc = np.sqrt((sa - sb) ** 2 + 4.0 * sab * sab)
    s_plus = sa + sb + disc
    s_minus = sa + sb - disc
    if np.any(de + s_minus <= 0) or np.any(de <= 0):
        raise RegimeError("unstable or gapless point in ramp table")
    return 0.5 * np.log(de / (de + s_plus)), 0.5 * np.log(de / (de + s_minus))


def drive_rate(schedule: RampSchedule, setup: PhysicalSetup, fillings, q,
               t: float, table: RampTable | None = None):
    """Drive rates (Omega_plus, Omega_minus) in s^-1 at ramp time t.

    Omega = (1/2) d/dt log(dE/hbar w), evaluated as a central finite
    difference in depth (one table cell wide) times the ramp rate.  The sign
    is retained.
    """
    n_a, n_b = fillings
    if table is None:
        table = ramp_table(setup, schedule.v_init, schedule.v_c)
    v0 = float(schedule.v_at(t))
    h = table.dv
    lo = max(v0 - h, schedule.v_init)
    hi = min(v0 + h, schedule.v_c)
    cos_sum = float(np.sum(1.0 - np.cos(np.asarray(q, dtype=float))))
    lp_lo, lm_lo = _log_ratio(table, n_a, n_b, cos_sum, lo)
    lp_hi, lm_hi = _log_ratio(table, n_a, n_b, cos_sum, hi)
    dvdt = schedule.ramp_rate
    return (float(lp_hi - lp_lo) / (hi - lo) * dvdt,
            float(lm_hi - lm_lo) / (hi - lo) * dvdt)


def mode_groups(n_atoms: int):
    """Distinct nonzero cos-sums on the finite-size grid with multiplicities.

    Returns (L, cos_sums, weights): the q-grid q_m = 2 pi m / L over
    m in {0..L-1}^3 collapses onto far fewer distinct values of
    sum_g (1 - cos(2 pi m_g / L)), and every mode in a group has an
    identical spectrum and drive.
    """
    L = int(round(n_atoms ** (1.0 / 3.0)))
    if L < 2:
        raise DomainError(f"N={n_atoms} too small for a q-grid (L={L})")
    one_d = 1.0 - np.cos(2.0 * np.pi * np.arange(L) / L)
    s = (one_d[:, None, None] + one_d[None, :, None] + one_d[None, None, :]).ravel()
    s = np.round(s, 12)
    vals, counts = np.unique(s, return_counts=True)
    keep = vals > 0
    return L, vals[keep], counts[keep]


def _mode_ode(t, y, omega_of_t, domega_of_t):
    # y = (Re A, Im A, Re B, Im B); dA/dt = -i w A - Om B, dB/dt = -Om A + i w B
    w = omega_of_t(t)
    om = domega_of_t(t)
    ar, ai, br, bi = y
    return [w * ai - om * br, -w * ar - om * bi,
            -om * ar - w * bi, -om * ai + w * br]


def _integrate_mode(setup, schedule, table, n_a, n_b, cos_sum, branch,
                    rtol=1e-8):
    """Integrate one (q-group, branch) mode over the ramp.

    Returns (|B|^2, invariant drift).  The log-ratio log(dE/hbar w) is
    splined over the table's depth grid so that Omega comes from an exact
    spline derivative rather than nested finite differences.
    """
    idx = 0 if branch == "+" else 1
    vg = table.v_grid
    lr = CubicSpline(vg, _log_ratio(table, n_a, n_b, cos_sum, vg)[idx])
    dlr = lr.derivative()
    dvdt = schedule.ramp_rate
    er_over_hbar = setup.recoil_energy / setup.hbar

    def omega_of_t(t):
        v0 = schedule.v_init + dvdt * t
        de = 2.0 * float(table.J(v0)) * cos_sum
        return de / math.exp(float(lr(v0))) * er_over_hbar

    def drive_of_t(t):
        v0 = schedule.v_init + dvdt * t
        return 0.5 * float(dlr(v0)) * dvdt

    y0 = [1.0, 0.0, 0.0, 0.0]
    for attempt_rtol in (rtol, rtol / 100.0):
        sol = solve_ivp(_mode_ode, (0.0, schedule.tau), y0,
                        args=(omega_of_t, drive_of_t),
                        method="DOP853", rtol=attempt_rtol,
                        atol=attempt_rtol * 1e-2)
        if not sol.success:
            raise AccuracyError(f"mode integration failed: {sol.message}")
        ar, ai, br, bi = sol.y[:, -1]
        b2 = br * br + bi * bi
        drift = abs((ar * ar + ai * ai) - b2 - 1.0)
        if drift <= INVARIANT_WARN:
            return b2, drift
    if drift > INVARIANT_FAIL:
        raise AccuracyError(
            f"symplectic invariant drift {drift:.2e} exceeds {INVARIANT_FAIL}")
    return b2, drift


def excitation_fraction(setup: PhysicalSetup, n_atoms: int,
                        schedule: RampSchedule, fillings=DEFAULT_FILLINGS, *,
                        table: RampTable | None = None, rtol: float = 1e-8,
                        jobs: int = 1):
    """Quasi-particle excitations created by the ramp from the vacuum.

    Integrates every distinct (q, branch) mode and returns
    {"total_fraction", "cos_sums", "weights", "n_ex_plus", "n_ex_minus",
    "L", "max_drift"}.  The total is (1/N) sum_{q != 0} sum_pm |B|^2,
    reduced with compensated summation so the result does not depend on
    worker scheduling.
    """
    n_a, n_b = fillings
    if table is None:
        table = ramp_table(setup, schedule.v_init, schedule.v_c)
    L, cos_sums, weights = mode_groups(n_atoms)
    tasks = [(setup, schedule, table, n_a, n_b, float(s), br, rtol)
             for s in cos_sums for br in ("+", "-")]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_mode_task, tasks, chunksize=8))
    else:
        results = [_mode_task(t) for t in tasks]
    n_plus = np.array([r[0] for r in results[0::2]])
    n_minus = np.array([r[0] for r in results[1::2]])
    max_drift = max(r[1] for r in results)
    total = math.fsum(w * (xp + xm) for w, xp, xm
                      in zip(weights.tolist(), n_plus.tolist(), n_minus.tolist()))
    return {
        "total_fraction": total / float(n_atoms),
        "cos_sums": cos_sums, "weights": weights,
        "n_ex_plus": n_plus, "n_ex_minus": n_minus,
        "L": L, "max_drift": max_drift,
    }


def _mode_task(args):
    return _integrate_mode(*args)


def adiabatic_time(setup: PhysicalSetup, n_atoms: int,
                   schedule: RampSchedule, fillings=DEFAULT_FILLINGS, *,
                   table: RampTable | None = None):
    """Closed-form adiabatic times for the smallest nonzero quasi-momentum.

    t_adiab,pm = (V_c - V_init) hbar / (4 dE_q) |d/dV0 (dE_q / hbar w_pm)|
    at q = (2 pi / L, 0, 0), maximized over the ramp depth interval; also
    returns the large-N asymptotic obtained from the sound velocities,
    t_pm ~ (L / 2 pi) (V_c - V_init) l / (4 J) |d/dV0 (J E_R / c_pm)|.
    Times in seconds.
    """
    n_a, n_b = fillings
    if table is None:
        table = ramp_table(setup, schedule.v_init, schedule.v_c)
    L = int(round(n_atoms ** (1.0 / 3.0)))
    if L < 2:
        raise DomainError(f"N={n_atoms} too small for a q-grid (L={L})")
    cos_sum = 1.0 - math.cos(2.0 * math.pi / L)
    vg = table.v_grid
    dv = schedule.v_c - schedule.v_init

    out = {"L": L, "effective_n": L ** 3}
    log_plus, log_minus = _log_ratio(table, n_a, n_b, cos_sum, vg)
    for tag, logr in (("plus", log_plus), ("minus", log_minus)):
        ratio = CubicSpline(vg, np.exp(logr))       # dE / hbar w
        dratio = np.abs(ratio.derivative()(vg))
        de_si = 2.0 * table.J(vg) * cos_sum * setup.recoil_energy
        t_of_v = dv * setup.hbar / (4.0 * de_si) * dratio
        k = int(np.argmax(t_of_v))
        out[f"t_adiab_{tag}"] = float(t_of_v[k])
        out[f"v0_argmax_{tag}"] = float(vg[k])

    # asymptotic form: J E_R / c_pm has units of hbar / length, so the
    # combination below is a time
    pref = (setup.lattice_period * setup.recoil_energy / setup.hbar) ** 2
    jv = np.asarray(table.J(vg))
    sa = np.asarray(table.U_aa(vg)) * n_a
    sb = np.asarray(table.U_bb(vg)) * n_b
    sab = np.asarray(table.U_ab(vg)) * math.sqrt(n_a * n_b)
    disc = np.sqrt((sa - sb) ** 2 + 4.0 * sab * sab)
    for tag, s_branch in (("plus", sa + sb + disc), ("minus", sa + sb - disc)):
        if np.any(s_branch <= 0):
            raise RegimeError(f"{tag} branch gapless over the ramp")
        c = np.sqrt(pref * jv * s_branch)           # m/s
        spline = CubicSpline(vg, jv * setup.recoil_energy / c)
        t_of_v = (L / (2.0 * math.pi) * dv * setup.lattice_period
                  / (4.0 * jv * setup.recoil_energy)
                  * np.abs(spline.derivative()(vg)))
        out[f"t_adiab_{tag}_asymptotic"] = float(np.max(t_of_v))
    return out
