"""Units, 1D band structure, Wannier functions and Bose-Hubbard parameters.

All internal energies are expressed in units of the recoil energy E_R of the
lattice; times are in seconds.  Conversions are centralized here.

The lattice potential is V0 * sin^2(k x) per axis with k = 2 pi / lambda, so
the 3D problem separates into identical 1D problems and every 3D Wannier
integral is the cube of its 1D counterpart.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AccuracyError, DomainError

# CODATA values; overridable through PhysicalSetup fields.
HBAR = 1.054571817e-34          # J s
BOHR_RADIUS = 5.29177210903e-11  # m
ATOMIC_MASS_UNIT = 1.66053906660e-27  # kg
RB87_MASS = 86.909 * ATOMIC_MASS_UNIT  # kg

DEFAULT_WAVELENGTH = 830e-9     # m, common 87Rb lattice; flagged in output metadata
DEFAULT_V_INIT = 2.0            # E_R, minimum depth for a meaningful tight-binding fit
MIN_DEPTH = 2.0


@dataclass(frozen=True)
class PhysicalSetup:
    """Atom species, lattice geometry and scattering lengths.

    Scattering lengths are given in units of the Bohr radius.
    """

    a_aa: float = 100.4
    a_bb: float = 100.4
    a_ab: float = 95.0
    mass: float = RB87_MASS          # kg
    wavelength: float = DEFAULT_WAVELENGTH  # m
    z: int = 6                       # coordination number, 3D cubic lattice
    hbar: float = HBAR
    bohr_radius: float = BOHR_RADIUS

    def __post_init__(self):
        if self.mass <= 0 or self.wavelength <= 0:
            raise DomainError("mass and wavelength must be positive")
        if self.a_diff_m <= 0:
            raise DomainError(
                "phase-mixed regime requires a_aa + a_bb - 2 a_ab > 0; got "
                f"a_aa={self.a_aa}, a_bb={self.a_bb}, a_ab={self.a_ab}"
            )

    @property
    def lattice_period(self) -> float:
        """Site spacing l = lambda / 2 in meters."""
        return self.wavelength / 2.0

    @property
    def recoil_energy(self) -> float:
        """E_R = 2 pi^2 hbar^2 / (m lambda^2) in Joules."""
        return 2.0 * np.pi**2 * self.hbar**2 / (self.mass * self.wavelength**2)

    @property
    def a_diff_m(self) -> float:
        """(a_aa + a_bb - 2 a_ab) in meters; positive in the phase-mixed regime."""
        return (self.a_aa + self.a_bb - 2.0 * self.a_ab) * self.bohr_radius

    @property
    def t_unit(self) -> float:
        """Squeezing time unit: 1/t_unit = (a_aa + a_bb - 2 a_ab) E_R / (hbar lambda)."""
        return self.hbar * self.wavelength / (self.a_diff_m * self.recoil_energy)

    def g_si(self, a_bohr: float) -> float:
        """Contact coupling g = 4 pi hbar^2 a / m in J m^3."""
        return 4.0 * np.pi * self.hbar**2 * a_bohr * self.bohr_radius / self.mass


@dataclass(frozen=True)
class HubbardParams:
    """Bose-Hubbard parameters at one lattice depth (energies in E_R)."""

    v0: float
    J: float
    U_aa: float
    U_bb: float
    U_ab: float
    I2: float   # (integral w1d^4 dx)^3, m^-3
    I3: float   # (integral w1d^6 dx)^3, m^-6
    w4_1d: float = 0.0   # integral w1d^4 dx, m^-1
    w6_1d: float = 0.0   # integral w1d^6 dx, m^-2


@dataclass(frozen=True)
class RampSchedule:
    """Linear lattice ramp V0(t) = v_init + (v_c - v_init) t / tau."""

    v_init: float
    v_c: float
    tau: float   # seconds

    def __post_init__(self):
        if not self.v_c > self.v_init:
            raise DomainError(f"require v_c > v_init, got {self.v_c} <= {self.v_init}")
        if self.v_init < MIN_DEPTH:
            raise DomainError(f"v_init={self.v_init} below minimum depth {MIN_DEPTH} E_R")
        if self.tau <= 0:
            raise DomainError("ramp duration must be positive")

    def v_at(self, t: float) -> float:
        if np.any(np.asarray(t) < 0) or np.any(np.asarray(t) > self.tau):
            raise DomainError(f"t={t} outside ramp interval [0, {self.tau}]")
        # endpoint-exact linear interpolation
        return self.v_init + (self.v_c - self.v_init) * np.asarray(t) / self.tau

    @property
    def ramp_rate(self) -> float:
        """dV0/dt in E_R per second."""
        return (self.v_c - self.v_init) / self.tau


def ramp_at(schedule: RampSchedule, t: float) -> float:
    """Depth V0(t) in E_R for 0 <= t <= tau."""
    return schedule.v_at(t)


def _bloch(v0, qtil, cutoff):
    """Lowest-band eigenvalues/vectors of the 1D lattice Hamiltonian.

    Plane-wave basis exp(i k (qtil + 2 m) x), m = -(cutoff-1)/2 .. (cutoff-1)/2,
    energies in E_R.  qtil is the quasimomentum in units of k (BZ edge at 1).
    Returns (eps, vecs) with vecs[:, j] the coefficient vector at qtil[j].
    """
    qtil = np.atleast_1d(np.asarray(qtil, dtype=float))
    half = (cutoff - 1) // 2
    m = np.arange(-half, half + 1)
    off = -v0 / 4.0 * np.ones(cutoff - 1)
    eps = np.empty(qtil.size)
    vecs = np.empty((cutoff, qtil.size))
    for j, q in enumerate(qtil):
        diag = (q + 2.0 * m) ** 2 + v0 / 2.0
        w, v = scipy.linalg.eigh_tridiagonal(diag, off, select="i", select_range=(0, 0))
        eps[j] = w[0]
        vecs[:, j] = v[:, 0]
    return m, eps, vecs


def band_structure(v0: float, cutoff: int = 21, n_q: int = 64,
                   check_convergence: bool = False, conv_tol: float = 1e-10):
    """Lowest-band dispersion eps(q) over one Brillouin zone.

    Returns (qtil, eps) with qtil in units of k on a symmetric grid including
    both band edges, and eps in E_R.
    """
    if v0 < 0:
        raise DomainError("v0 must be non-negative")
    if cutoff % 2 == 0 or cutoff < 11:
        raise DomainError("cutoff must be odd and >= 11")
    qtil = np.linspace(-1.0, 1.0, n_q + 1)
    _, eps, _ = _bloch(v0, qtil, cutoff)
    if check_convergence:
        _, eps2, _ = _bloch(v0, qtil, cutoff + 4)
        if np.max(np.abs(eps - eps2)) > conv_tol:
            raise AccuracyError(
                f"band not converged at cutoff={cutoff}: "
                f"max change {np.max(np.abs(eps - eps2)):.3e} E_R on cutoff+4"
            )
    return qtil, eps


def wannier_function(v0: float, cutoff: int = 21, n_q: int = 64, pts_per_site: int = 128):
    """Real, site-centered lowest-band Wannier function on a ring of n_q sites.

    Bloch functions are summed with phases chosen so each is real and positive
    at the site center x = 0, which makes w(x) real.  Returns (x, w) with x in
    units of the lattice period l and w normalized so integral w^2 dx = 1
    (x dimensionless; multiply integrals by appropriate powers of l for SI).
    """
    qtil = -1.0 + 2.0 * np.arange(n_q) / n_q  # [-1, 1), uniform BZ grid
    m, _, vecs = _bloch(v0, qtil, cutoff)
    # phase fixing: u_q(0) = sum_m c_m real positive
    s = vecs.sum(axis=0)
    vecs = vecs * np.sign(s)[None, :]
    x = (np.arange(n_q * pts_per_site) / pts_per_site) - n_q / 2.0  # units of l
    # u_q(x) = sum_m c_m exp(2 pi i m x / l); q x term uses q = pi qtil / l
    phase_m = np.exp(2j * np.pi * np.outer(m, x))
    u = vecs.T @ phase_m              # (n_q, nx)
    bloch = np.exp(1j * np.pi * np.outer(qtil, x)) * u
    w = bloch.sum(axis=0) / n_q
    if np.max(np.abs(w.imag)) > 1e-9:
        raise AccuracyError("Wannier function has a non-negligible imaginary part")
    return x, w.real


def _wannier_integrals(v0, cutoff, n_q, pts_per_site):
    """1D integrals of w^2, w^4, w^6 in units of l^(1-m)."""
    x, w = wannier_function(v0, cutoff=cutoff, n_q=n_q, pts_per_site=pts_per_site)
    dx = x[1] - x[0]
    norm = np.sum(w**2) * dx
    w4 = np.sum(w**4) * dx
    w6 = np.sum(w**6) * dx
    return norm, w4, w6


def hubbard_params(setup: PhysicalSetup, v0: float, cutoff: int = 21, n_q: int = 64,
                   pts_per_site: int = 128, min_depth: float = MIN_DEPTH) -> HubbardParams:
    """Hopping J, on-site couplings U and Wannier moment integrals at depth v0.

    J is the lowest-band bandwidth / 4; U_ij = g_ij (integral w1d^4)^3.
    """
    if v0 < min_depth:
        raise DomainError(f"v0={v0} below the minimum depth {min_depth} E_R")
    _, eps, _ = _bloch(v0, [0.0, 1.0], cutoff)
    J = (eps[1] - eps[0]) / 4.0
    norm, w4, w6 = _wannier_integrals(v0, cutoff, n_q, pts_per_site)
    if abs(norm - 1.0) > 1e-8:
        raise AccuracyError(f"Wannier normalization off by {abs(norm - 1.0):.2e}")
    l = setup.lattice_period
    w4_si = w4 / l                      # m^-1
    w6_si = w6 / l**2                   # m^-2
    I2 = w4_si**3
    I3 = w6_si**3
    er = setup.recoil_energy
    return HubbardParams(
        v0=float(v0),
        J=float(J),
        U_aa=setup.g_si(setup.a_aa) * I2 / er,
        U_bb=setup.g_si(setup.a_bb) * I2 / er,
        U_ab=setup.g_si(setup.a_ab) * I2 / er,
        I2=I2,
        I3=I3,
        w4_1d=w4_si,
        w6_1d=w6_si,
    )
