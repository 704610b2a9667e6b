"""One-axis-twisting reduction of the ramp dynamics.

The squeezing rate chi(V0) is the discrete curvature of the ground-state
energy with respect to transferring one atom between the components,
evaluated from three constrained Gutzwiller solves per depth.  Integrating
chi along the ramp gives the twisting angle T(t); the state is then the
binomial superposition with synthetic phases T (Na - N/2)^2, evaluated
exactly by the spin-moment machinery.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import DomainError
from .gutzwiller import minimize
from .lattice import PhysicalSetup, RampSchedule, hubbard_params
from .spins import binomial_amplitudes, fock_window, spin_moments, xi_squared


@dataclass
class ChiCurve:
    """Squeezing rate chi(V0) in 1/s on a depth grid, for N atoms."""

    n_atoms: int
    v_grid: np.ndarray
    chi: np.ndarray          # s^-1

    @property
    def chi_avg(self) -> float:
        """Ramp average (V_c - V_init)^-1 int chi dV0."""
        span = self.v_grid[-1] - self.v_grid[0]
        return float(np.trapezoid(self.chi, self.v_grid) / span)


def chi_at_depth(setup: PhysicalSetup, params, n_atoms: int, *,
                 n_max: int = 12, tol: float = 1e-10,
                 c0_row=None) -> tuple[float, list]:
    """chi(V0) from the one-atom-transfer curvature of E0.

    E0(Na) = N e(Na/N, 1 - Na/N); chi = [E0(Na+1) + E0(Na-1) - 2 E0(Na)]
    * E_R / (2 hbar) at the balanced partition.  Returns (chi, states) with
    the three converged amplitude tables for warm-starting the next depth.
    """
    half = n_atoms // 2
    states = []
    energies = []
    for k, na in enumerate((half - 1, half, half + 1)):
        x = na / n_atoms
        st = minimize(params, x, 1.0 - x, n_max=n_max, tol=tol,
                      z=setup.z, c0=None if c0_row is None else c0_row[k])
        states.append(st.c)
        energies.append(n_atoms * st.energy)
    curv = energies[0] + energies[2] - 2.0 * energies[1]
    chi = curv * setup.recoil_energy / (2.0 * setup.hbar)
    return chi, states


def chi_curve(setup: PhysicalSetup, n_atoms: int, v_grid, *,
              v_c: float | None = None, n_max: int = 12,
              tol: float = 1e-10) -> ChiCurve:
    """Tabulate chi(V0), warm-starting each depth from the previous one.

    Beyond v_c (if given) chi is pinned to zero: past the transition the
    one-atom-transfer curvature is not a squeezing rate any more, and the
    frozen phases correspond to chi = 0.
    """
    v_grid = np.asarray(v_grid, dtype=float)
    if np.any(np.diff(v_grid) <= 0):
        raise DomainError("depth grid must be strictly increasing")
    chi = np.zeros(len(v_grid))
    row = None
    for i, v in enumerate(v_grid):
        if v_c is not None and v >= v_c:
            break
        params = hubbard_params(setup, v)
        chi[i], row = chi_at_depth(setup, params, n_atoms,
                                   n_max=n_max, tol=tol, c0_row=row)
    return ChiCurve(n_atoms=n_atoms, v_grid=v_grid, chi=chi)


def t_best(chi: ChiCurve, n_atoms: int | None = None) -> float:
    """Best squeezing time 3^(1/6) N^(-2/3) / <chi> in seconds."""
    n = chi.n_atoms if n_atoms is None else n_atoms
    avg = chi.chi_avg
    if avg <= 0:
        raise DomainError("ramp-averaged chi must be positive (phase-mixed regime)")
    return 3.0 ** (1.0 / 6.0) * n ** (-2.0 / 3.0) / avg


def T_of_t(chi: ChiCurve, schedule: RampSchedule, t) -> np.ndarray:
    """Twisting angle T(t) = int_0^t chi(V0(t')) dt' for the linear ramp."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    acc = cumulative_trapezoid(chi.chi, chi.v_grid, initial=0.0)
    v_t = schedule.v_at(np.clip(t, 0.0, schedule.tau))
    T = np.interp(v_t, chi.v_grid, acc) * (schedule.tau
                                           / (schedule.v_c - schedule.v_init))
    return T if T.size > 1 else float(T[0])


def oat_xi2(n_atoms: int, T: float) -> tuple[float, float]:
    """Exact OAT squeezing at twisting angle T; returns (xi2, mean spin).

    The mean-spin length follows the closed form (N/2) cos^(N-1) T; the
    variance is evaluated exactly on the binomial window.
    """
    na = fock_window(n_atoms)
    m = na - n_atoms / 2.0
    d = binomial_amplitudes(n_atoms, na) * np.exp(1j * T * m * m)
    xi2 = xi_squared(d, na, n_atoms)
    mean_spin = (n_atoms / 2.0) * np.cos(T) ** (n_atoms - 1)
    return xi2, mean_spin


def oat_scan(n_atoms: int, T_grid) -> dict:
    """Scan oat_xi2 over T and refine the minimum parabolically."""
    T_grid = np.asarray(T_grid, dtype=float)
    xi2 = np.array([oat_xi2(n_atoms, T)[0] for T in T_grid])
    k = int(np.argmin(xi2))
    T_opt, log_xi = _vertex(T_grid, np.log(xi2), k)
    return {"T_grid": T_grid, "xi2": xi2, "T_best": T_opt,
            "xi2_best": float(np.exp(log_xi))}


def dynamic_oat_trajectory(chi: ChiCurve, schedule: RampSchedule,
                           times) -> dict:
    """xi2(t) of the OAT model with the ramp-integrated twisting angle."""
    times = np.asarray(times, dtype=float)
    T = np.atleast_1d(T_of_t(chi, schedule, times))
    xi2 = np.empty(len(times))
    mean_spin = np.empty(len(times))
    for k in range(len(times)):
        xi2[k], mean_spin[k] = oat_xi2(chi.n_atoms, T[k])
    return {"times": times, "T": T, "xi2": xi2, "mean_spin": mean_spin}


def static_oat_trajectory(n_atoms: int, chi0: float, times) -> dict:
    """xi2(t) for the time-independent twisting Hamiltonian chi(0) Sz^2."""
    if chi0 <= 0:
        raise DomainError("chi0 must be positive")
    times = np.asarray(times, dtype=float)
    T = chi0 * times
    xi2 = np.empty(len(times))
    mean_spin = np.empty(len(times))
    for k in range(len(times)):
        xi2[k], mean_spin[k] = oat_xi2(n_atoms, T[k])
    return {"times": times, "T": T, "xi2": xi2, "mean_spin": mean_spin}


def scaling_exponent(n_list, t_best_list) -> tuple[float, float]:
    """Least-squares fit t_best ~ N^alpha; returns (alpha, prefactor)."""
    n = np.asarray(n_list, dtype=float)
    t = np.asarray(t_best_list, dtype=float)
    if np.any(t <= 0) or len(n) < 2:
        raise DomainError("need at least two positive best times")
    alpha, logc = np.polyfit(np.log(n), np.log(t), 1)
    return float(alpha), float(np.exp(logc))


def mott_residual_estimate(J: float, U: float, n_atoms: int) -> dict:
    """Scaling estimate of the residual twisting accumulated in the Mott
    phase, compared with the N^(-2/3) angle scale of the optimum.

    In the Mott phase the superexchange scale 4J^2/U drives residual phase
    evolution; over the time window set by the gap (~hbar/U) and by the
    remaining ramp (~ t_best fraction) the accumulated angle is suppressed
    by (J/U)^2 relative to the superfluid contribution.
    """
    if U <= 0 or J < 0:
        raise DomainError("need U > 0 and J >= 0")
    ratio = (J / U) ** 2
    threshold = n_atoms ** (-2.0 / 3.0)
    return {
        "chi_resid_over_chi": 4.0 * ratio,
        "threshold": threshold,
        "negligible": bool(4.0 * ratio < threshold),
    }


def _vertex(x, y, k):
    if k == 0 or k == len(x) - 1:
        return float(x[k]), float(y[k])
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom <= 0:
        return float(x[k]), float(y1)
    delta = 0.5 * (y0 - y2) / denom
    h = 0.5 * (x[k + 1] - x[k - 1])
    return float(x[k] + delta * h), float(y1 - 0.25 * (y0 - y2) * delta)
