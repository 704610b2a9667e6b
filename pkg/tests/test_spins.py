"""Collective-spin moments over binomial Fock windows.

The heavy oracle here is a brute-force Dicke-space calculation: the full
(N+1)-dimensional S = N/2 multiplet with explicit ladder matrices and
matrix-exponential rotations, no shared code with the production path.
"""
import numpy as np
import pytest
import scipy.linalg

from mottsqueeze.errors import DomainError
from mottsqueeze.spins import (binomial_amplitudes, fock_window,
                               spin_moments, surface_window, xi_squared,
                               _parabolic_min)


def dicke_oracle(d, na, n_atoms):
    """Mean spin length and minimal transverse variance, computed by brute
    force in the full symmetric multiplet."""
    dim = n_atoms + 1
    psi = np.zeros(dim, dtype=complex)
    psi[na] = d
    psi = psi / np.linalg.norm(psi)
    m = np.arange(dim) - n_atoms / 2.0
    sz = np.diag(m.astype(complex))
    s = n_atoms / 2.0
    sp = np.zeros((dim, dim), dtype=complex)
    for k in range(dim - 1):
        sp[k + 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sx = (sp + sp.conj().T) / 2.0
    sy = (sp - sp.conj().T) / 2.0j
    ops = [sx, sy, sz]
    mean = np.array([np.vdot(psi, o @ psi).real for o in ops])
    length = np.linalg.norm(mean)
    # orthonormal frame with e3 along the mean spin
    e3 = mean / length
    trial = np.eye(3)[np.argmin(np.abs(e3))]
    e1 = np.cross(e3, trial)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    o1 = sum(c * o for c, o in zip(e1, ops))
    o2 = sum(c * o for c, o in zip(e2, ops))
    cov = np.empty((2, 2))
    for i, a in enumerate((o1, o2)):
        for j, b in enumerate((o1, o2)):
            sym = (a @ b + b @ a) / 2.0
            cov[i, j] = (np.vdot(psi, sym @ psi).real
                         - np.vdot(psi, a @ psi).real * np.vdot(psi, b @ psi).real)
    var_min = scipy.linalg.eigvalsh(cov)[0]
    return length, var_min


def test_window_basics():
    w = fock_window(125)
    assert w[0] >= 0 and w[-1] <= 125
    assert np.all(np.diff(w) == 1)
    assert 62 in w
    assert len(surface_window(125)) < len(fock_window(125))
    with pytest.raises(DomainError):
        fock_window(1)


def test_binomial_weight_complete():
    na = np.arange(0, 41)
    d = binomial_amplitudes(40, na)
    assert np.sum(d**2) == pytest.approx(1.0, abs=1e-12)


def test_coherent_state_unsqueezed():
    # pi/2 pulse product state: xi^2 = 1, full spin length
    for n in (24, 125):
        na = np.arange(0, n + 1)
        d = binomial_amplitudes(n, na).astype(complex)
        assert xi_squared(d, na, n) == pytest.approx(1.0, abs=1e-8)
        mom = spin_moments(d, na, n)
        assert mom["mean_spin"] == pytest.approx(n / 2.0, rel=1e-10)


@pytest.mark.parametrize("n_atoms", [8, 16, 24])
def test_against_dicke_oracle_oat(n_atoms):
    # one-axis-twisting phases at several twist strengths
    na = np.arange(0, n_atoms + 1)
    m = na - n_atoms / 2.0
    d0 = binomial_amplitudes(n_atoms, na)
    for t in (0.0, 0.05, 0.3, 1.0):
        d = d0 * np.exp(-1j * t * m**2)
        mom = spin_moments(d, na, n_atoms)
        length, var_min = dicke_oracle(d, na, n_atoms)
        assert mom["mean_spin"] == pytest.approx(length, abs=1e-10)
        assert mom["var_min"] == pytest.approx(var_min, abs=1e-10)


def test_against_dicke_oracle_random_phases(rng_seed=7):
    # arbitrary diagonal phase profile, not of twisting form
    n_atoms = 20
    rng = np.random.default_rng(rng_seed)
    na = np.arange(0, n_atoms + 1)
    d = binomial_amplitudes(n_atoms, na) * np.exp(1j * rng.uniform(0, 2, na.size))
    mom = spin_moments(d, na, n_atoms)
    length, var_min = dicke_oracle(d, na, n_atoms)
    assert mom["mean_spin"] == pytest.approx(length, abs=1e-10)
    assert mom["var_min"] == pytest.approx(var_min, abs=1e-10)


def test_truncated_window_accuracy():
    # the default window reproduces the full-basis result
    n_atoms = 400
    na_full = np.arange(0, n_atoms + 1)
    na_win = fock_window(n_atoms)
    m_full = na_full - n_atoms / 2.0
    m_win = na_win - n_atoms / 2.0
    t = 0.02
    d_full = binomial_amplitudes(n_atoms, na_full) * np.exp(-1j * t * m_full**2)
    d_win = binomial_amplitudes(n_atoms, na_win) * np.exp(-1j * t * m_win**2)
    x_full = xi_squared(d_full, na_full, n_atoms)
    x_win = xi_squared(d_win, na_win, n_atoms)
    assert x_win == pytest.approx(x_full, rel=1e-10)


def test_global_phase_invariance():
    n_atoms = 16
    na = np.arange(0, n_atoms + 1)
    m = na - n_atoms / 2.0
    d = binomial_amplitudes(n_atoms, na) * np.exp(-1j * 0.2 * m**2)
    a = spin_moments(d, na, n_atoms)
    b = spin_moments(d * np.exp(1j * 1.37), na, n_atoms)
    assert a["var_min"] == pytest.approx(b["var_min"], abs=1e-12)
    assert a["mean_spin"] == pytest.approx(b["mean_spin"], abs=1e-12)


def test_noncontiguous_window_rejected():
    with pytest.raises(DomainError):
        spin_moments(np.ones(3, dtype=complex), np.array([1, 3, 5]), 8)


def test_parabolic_min_exact():
    x = np.linspace(0.0, 2.0, 21)
    y = 3.0 + 5.0 * (x - 0.777) ** 2
    k = int(np.argmin(y))
    xm, ym = _parabolic_min(x, y, k)
    assert xm == pytest.approx(0.777, abs=1e-12)
    assert ym == pytest.approx(3.0, abs=1e-12)
    # edge minimum falls back to the grid point
    assert _parabolic_min(x, x.copy(), 0) == (0.0, 0.0)
