"""Two-component on-site Gutzwiller mean field at fixed mean occupations.

The variational state is a single-site amplitude table c[n_a, n_b] shared by
all M sites.  The energy per site is

    e = -z J (phi_a^2 + phi_b^2) + U_aa/2 <n_a(n_a-1)> + U_bb/2 <n_b(n_b-1)>
        + U_ab <n_a n_b>,            phi_s = <c| s |c>,

minimized by projected imaginary-time descent: after every descent step the
amplitudes are tilted by exp((lam_a n_a + lam_b n_b)/2) with (lam_a, lam_b)
solved by Newton so that <n_a> and <n_b> stay at their targets, then
renormalized.  Amplitudes stay real throughout (gauge fixed at J = 0 by
keeping them non-negative).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import AccuracyError, ConvergenceError, DomainError, RegimeError
from .lattice import HubbardParams, PhysicalSetup, hubbard_params

DEFAULT_N_MAX = 6
SF_THRESHOLD = 1e-8   # |phi|^2 below this counts as Mott


@dataclass
class GutzwillerState:
    """Converged on-site amplitude table and derived quantities."""

    c: np.ndarray          # (n_max+1, n_max+1), real, normalized
    n_target_a: float
    n_target_b: float
    energy: float          # per site, E_R
    phi_a: float
    phi_b: float
    mu_a: float
    mu_b: float
    grad_norm: float
    n_iter: int

    @property
    def n_max(self) -> int:
        return self.c.shape[0] - 1


def _lower(c):
    """Apply the annihilation operator along an axis: (a c)[n] = sqrt(n+1) c[n+1]."""
    out = np.zeros_like(c)
    n = np.arange(1, c.shape[0])
    out[:-1] = np.sqrt(n)[:, None] * c[1:]
    return out


def _raise(c):
    out = np.zeros_like(c)
    n = np.arange(1, c.shape[0])
    out[1:] = np.sqrt(n)[:, None] * c[:-1]
    return out


class _Site:
    """Precomputed grids and operator actions for one truncation n_max."""

    def __init__(self, n_max, params: HubbardParams):
        self.n_max = n_max
        n = np.arange(n_max + 1, dtype=float)
        self.na = n[:, None] * np.ones(n_max + 1)[None, :]
        self.nb = n[None, :] * np.ones(n_max + 1)[:, None]
        self.diag = (
            params.U_aa / 2.0 * self.na * (self.na - 1.0)
            + params.U_bb / 2.0 * self.nb * (self.nb - 1.0)
            + params.U_ab * self.na * self.nb
        )
        self.J = params.J
        dim = n_max + 1
        a = np.diag(np.sqrt(n[1:]), 1)
        x = a + a.T
        eye = np.eye(dim)
        self._xa = np.kron(x, eye)
        self._xb = np.kron(eye, x)

    def dense_h(self, zJ, phi_a, phi_b, mu_a, mu_b):
        h = np.diag((self.diag - mu_a * self.na - mu_b * self.nb).ravel())
        h -= zJ * (phi_a * self._xa + phi_b * self._xb)
        return h

    def phi(self, c):
        return float(np.sum(c * _lower(c))), float(np.sum(c * _lower(c.T).T))

    def apply_h(self, c, zJ, phi_a, phi_b):
        hc = self.diag * c
        if zJ != 0.0 and (phi_a != 0.0 or phi_b != 0.0):
            hc -= zJ * phi_a * (_lower(c) + _raise(c))
            hc -= zJ * phi_b * (_lower(c.T).T + _raise(c.T).T)
        return hc

    def energy(self, c, zJ):
        pa, pb = self.phi(c)
        return float(np.sum(self.diag * c * c)) - zJ * (pa * pa + pb * pb), pa, pb

    def means(self, c):
        p = c * c
        return float(np.sum(self.na * p)), float(np.sum(self.nb * p))


def _tilt_project(c, site, na_t, nb_t, tol=1e-13, max_newton=80):
    """Tilt c by exp((lam_a n_a + lam_b n_b)/2) so the normalized means hit
    the targets, then renormalize.  Newton iteration on (lam_a, lam_b)."""
    lam = np.zeros(2)
    p0 = c * c
    p0 = p0 / p0.sum()
    logp = np.log(p0 + 1e-300)
    na, nb = site.na, site.nb
    w = p0
    for _ in range(max_newton):
        ex = logp + lam[0] * na + lam[1] * nb
        w = np.exp(ex - ex.max())
        s = w.sum()
        ma = float(np.sum(na * w)) / s
        mb = float(np.sum(nb * w)) / s
        ra, rb = ma - na_t, mb - nb_t
        if abs(ra) + abs(rb) < tol:
            break
        vaa = float(np.sum(na * na * w)) / s - ma * ma
        vbb = float(np.sum(nb * nb * w)) / s - mb * mb
        vab = float(np.sum(na * nb * w)) / s - ma * mb
        det = vaa * vbb - vab * vab
        if det < 1e-30 or vaa < 1e-15 or vbb < 1e-15:
            # distribution (nearly) pinned to one Fock state; nothing to adjust
            if abs(ra) + abs(rb) < 1e-9:
                break
            # fall back to damped diagonal steps
            step = np.array([ra / max(vaa, 1e-12), rb / max(vbb, 1e-12)])
        else:
            step = np.array([(vbb * ra - vab * rb) / det,
                             (vaa * rb - vab * ra) / det])
        lam -= np.clip(step, -60.0, 60.0)
        if np.max(np.abs(lam)) > 2000.0:
            raise ValueError("tilt projection diverged: target means unreachable "
                             "from the current support")
    else:
        if abs(ma - na_t) + abs(mb - nb_t) > 1e-9 * (1.0 + na_t + nb_t):
            raise ValueError(
                f"tilt projection failed: means ({ma}, {mb}) vs targets "
                f"({na_t}, {nb_t})")
    cp = np.where(c >= 0.0, 1.0, -1.0) * np.sqrt(w / w.sum())
    return cp


def _coherent_start(n_max, na_t, nb_t):
    """Product of Poisson-amplitude states with the target means."""
    n = np.arange(n_max + 1)
    from scipy.special import gammaln
    la = np.exp(0.5 * (n * np.log(max(na_t, 1e-6)) - gammaln(n + 1)))
    lb = np.exp(0.5 * (n * np.log(max(nb_t, 1e-6)) - gammaln(n + 1)))
    c = la[:, None] * lb[None, :]
    return c / np.linalg.norm(c)


def _stationarity(c, hc, site):
    """Norm of the gradient projected orthogonally to span{c, n_a c, n_b c},
    plus the fitted chemical potentials."""
    basis = np.stack([c.ravel(), (site.na * c).ravel(), (site.nb * c).ravel()])
    g = hc.ravel()
    gram = basis @ basis.T
    rhs = basis @ g
    try:
        coef = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(basis.T, g, rcond=None)
    r = g - basis.T @ coef
    return float(np.linalg.norm(r)), float(coef[1]), float(coef[2]), r.reshape(c.shape)


def minimize(params: HubbardParams, n_target_a: float, n_target_b: float, *,
             n_max: int = DEFAULT_N_MAX, tol: float = 1e-10, max_iter: int = 200000,
             seed: int = 0, n_starts: int = 2, z: int = 6,
             c0: np.ndarray | None = None, tail_check: bool = True) -> GutzwillerState:
    """Constrained Gutzwiller ground state at fixed mean occupations.

    `c0` warm-starts the descent (multi-starts are skipped in that case, which
    keeps energy-surface rows deterministic and fast).
    """
    if n_target_a < 0 or n_target_b < 0:
        raise DomainError("target occupations must be non-negative")
    if n_target_a + n_target_b > n_max / 2.0:
        raise DomainError(
            f"n_a+n_b={n_target_a + n_target_b} exceeds truncation headroom n_max/2={n_max / 2}"
        )
    site = _Site(n_max, params)
    zJ = float(z) * params.J
    starts = []
    if c0 is not None:
        starts.append(np.array(c0, dtype=float))
    else:
        starts.append(_coherent_start(n_max, n_target_a, n_target_b))
        rng = np.random.default_rng(seed)
        for _ in range(n_starts - 1):
            pert = starts[0] * (1.0 + 0.2 * rng.standard_normal(starts[0].shape))
            starts.append(np.abs(pert))
    best = None
    for cs in starts:
        res = _descend(cs, site, zJ, n_target_a, n_target_b, tol, max_iter)
        if best is None or res.energy < best.energy - 1e-14:
            best = res
    ma, mb = site.means(best.c)
    if abs(ma - n_target_a) + abs(mb - n_target_b) > 1e-7:
        raise ConvergenceError(
            f"constraint violated at convergence: <n_a>={ma}, <n_b>={mb} "
            f"vs targets ({n_target_a}, {n_target_b})"
        )
    if tail_check:
        tail = float(np.sum(np.where(site.na + site.nb >= n_max, best.c**2, 0.0)))
        if tail > 1e-8:
            raise AccuracyError(
                f"truncation tail {tail:.2e} on n_a+n_b={n_max}; increase n_max"
            )
    return best


def _descend(c, site, zJ, na_t, nb_t, tol, max_iter):
    """Phase 1: monotone projected imaginary-time descent down to a loose
    residual.  Phase 2: self-consistent diagonalization polished on the
    residual (energy differences drown in rounding noise well before 1e-10)."""
    c = _tilt_project(np.abs(c) + 1e-300, site, na_t, nb_t)
    e, pa, pb = site.energy(c, zJ)
    dt = 0.2 / max(float(np.max(np.abs(site.diag))) + 4.0 * zJ, 1e-3)
    grad_norm = np.inf
    mu_a = mu_b = 0.0
    it = 0
    switch = max(1e-6, tol)
    check_every = 10
    # flat directions (e.g. U = 0) let plain descent crawl for 1e5+ steps;
    # hand over to the diagonalization-accelerated polish phase early
    phase1_cap = min(max_iter, 800)
    while it < phase1_cap:
        it += 1
        hc = site.apply_h(c, zJ, pa, pb)
        if it % check_every == 0 or it == 1:
            grad_norm, mu_a, mu_b, _ = _stationarity(c, hc, site)
            if grad_norm < switch:
                break
        try:
            c_new = _tilt_project(c - dt * hc, site, na_t, nb_t)
        except ValueError:
            dt *= 0.5
            if dt < 1e-11:
                break
            continue
        e_new, pa_n, pb_n = site.energy(c_new, zJ)
        if e_new > e + 1e-12 * abs(e) + 1e-15:
            dt *= 0.5
            if dt < 1e-11:
                break  # stalled at rounding level; hand over to phase 2
            continue
        c, e, pa, pb = c_new, e_new, pa_n, pb_n
        dt = min(dt * 1.02, 5.0)
    hc = site.apply_h(c, zJ, pa, pb)
    grad_norm, mu_a, mu_b, _ = _stationarity(c, hc, site)
    # each polish iteration is a dense diagonalization; cap it independently
    # of max_iter so a critically slowed solve fails fast instead of crawling
    c, e, pa, pb, grad_norm, mu_a, mu_b, polish_iters = _polish(
        c, site, zJ, na_t, nb_t, e, pa, pb, grad_norm, mu_a, mu_b, tol,
        min(max_iter - it, 2000))
    it += polish_iters
    if grad_norm >= tol:
        raise ConvergenceError(
            f"Gutzwiller solve: gradient norm {grad_norm:.3e} > tol {tol:.1e} "
            f"after {it} iterations", residual=grad_norm)
    return GutzwillerState(
        c=c, n_target_a=na_t, n_target_b=nb_t, energy=e,
        phi_a=pa, phi_b=pb, mu_a=mu_a, mu_b=mu_b,
        grad_norm=grad_norm, n_iter=it,
    )


def _polish(c, site, zJ, na_t, nb_t, e, pa, pb, r, mu_a, mu_b, tol, budget):
    """Residual-driven endgame: alternate self-consistent diagonalization
    proposals with small residual-accepted descent steps."""
    it = 0
    dt = 0.05 / max(float(np.max(np.abs(site.diag))) + 4.0 * zJ, 1e-3)
    stall = 0
    while r >= tol and it < budget and stall < 200:
        it += 1
        accepted = False
        # energy guard for jump proposals: residual decrease alone can land
        # on a higher stationary point (e.g. the phi = 0 saddle on the
        # superfluid side); only in the endgame is an O(r^2) slack safe
        slack = 1e-12 * abs(e) + 1e-15 + (100.0 * r * r if r < 1e-6 else 0.0)
        g = _diag_step(c, site, zJ, pa, pb, mu_a, mu_b)
        if g is not None:
            # line search over mixing weights; over-relaxation (beta > 1)
            # counters the critical slowing of plain self-consistency near
            # the transition
            best = None
            prev_rt = np.inf
            for beta in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0):
                cm = (1.0 - beta) * c + beta * g
                try:
                    cm = _tilt_project(cm, site, na_t, nb_t)
                except (FloatingPointError, ValueError):
                    break
                if not np.all(np.isfinite(cm)):
                    break
                e_t, pa_t, pb_t = site.energy(cm, zJ)
                hc_t = site.apply_h(cm, zJ, pa_t, pb_t)
                r_t, mua_t, mub_t, _ = _stationarity(cm, hc_t, site)
                if e_t <= e + slack and (best is None or r_t < best[0]):
                    best = (r_t, e_t, pa_t, pb_t, mua_t, mub_t, cm)
                # the residual is roughly unimodal in beta; stop once it turns up
                if r_t > prev_rt and best is not None and best[0] < r:
                    break
                prev_rt = r_t
            if best is not None and best[0] < r:
                r, e, pa, pb, mu_a, mu_b, c = best
                accepted = True
                stall = 0
        if not accepted:
            # step along the projected residual: raw H c steps develop a
            # non-tangential component that the tilt only partly undoes,
            # raising the energy at first order near convergence
            hc = site.apply_h(c, zJ, pa, pb)
            _, _, _, res = _stationarity(c, hc, site)
            try:
                c_t = _tilt_project(c - dt * res, site, na_t, nb_t)
            except ValueError:
                c_t = None
            if c_t is not None:
                e_t, pa_t, pb_t = site.energy(c_t, zJ)
                hc_t = site.apply_h(c_t, zJ, pa_t, pb_t)
                r_t, mua_t, mub_t, _ = _stationarity(c_t, hc_t, site)
                if r_t < r:
                    c, e, pa, pb = c_t, e_t, pa_t, pb_t
                    r, mu_a, mu_b = r_t, mua_t, mub_t
                    dt = min(dt * 1.25, 5.0)
                    stall = 0
                    accepted = True
        if not accepted:
            # boundary-support minimizer: prune near-zero amplitudes, whose
            # tilt-vs-descent tug otherwise decays only geometrically
            for cut in (1e-13, 1e-10, 1e-7, 1e-5, 3e-4, 3e-3):
                cp = np.where(np.abs(c) < cut, 0.0, c)
                if np.all(cp == c) or not np.any(cp):
                    continue
                try:
                    cp = _tilt_project(cp, site, na_t, nb_t)
                except ValueError:
                    continue
                e_p, pa_p, pb_p = site.energy(cp, zJ)
                hc_p = site.apply_h(cp, zJ, pa_p, pb_p)
                r_p, mua_p, mub_p, _ = _stationarity(cp, hc_p, site)
                if r_p < 0.5 * r and e_p <= e + slack:
                    c, e, pa, pb = cp, e_p, pa_p, pb_p
                    r, mu_a, mu_b = r_p, mua_p, mub_p
                    stall = 0
                    accepted = True
                    break
        if not accepted:
            dt *= 0.5
            stall += 1
    return c, e, pa, pb, r, mu_a, mu_b, it


def _diag_step(c, site, zJ, phi_a, phi_b, mu_a, mu_b):
    """Ground vector of the mean-field Hamiltonian at the current phases and
    fitted chemical potentials; the caller mixes and tilt-projects it."""
    try:
        h = site.dense_h(zJ, phi_a, phi_b, mu_a, mu_b)
        _, v = scipy.linalg.eigh(h, subset_by_index=(0, 0))
        g = v[:, 0].reshape(c.shape)
    except Exception:
        return None
    # gauge: non-negative overall sign (ground vector is single-signed for
    # phi >= 0 since the off-diagonal couplings are then non-positive)
    if g.sum() < 0:
        g = -g
    return g


def observables(state: GutzwillerState) -> dict:
    """Normalized on-site correlation functions and number variances.

    Correlations with a vanishing mean occupation in the denominator are
    returned as None.
    """
    c = state.c
    p = c * c
    n = np.arange(c.shape[0], dtype=float)
    na = n[:, None] * np.ones_like(n)[None, :]
    nb = na.T
    ma = float(np.sum(na * p))
    mb = float(np.sum(nb * p))
    out = {
        "phi_a": state.phi_a, "phi_b": state.phi_b,
        "var_na": float(np.sum(na**2 * p)) - ma**2,
        "var_nb": float(np.sum(nb**2 * p)) - mb**2,
        "mean_na": ma, "mean_nb": mb,
    }
    def ratio(num, den):
        return None if den <= 0.0 else max(num, 0.0) / den
    out["g2_aa"] = ratio(float(np.sum(na * (na - 1) * p)), ma**2)
    out["g2_bb"] = ratio(float(np.sum(nb * (nb - 1) * p)), mb**2)
    out["g2_ab"] = ratio(float(np.sum(na * nb * p)), ma * mb)
    out["g3_a"] = ratio(float(np.sum(na * (na - 1) * (na - 2) * p)), ma**3)
    out["g3_b"] = ratio(float(np.sum(nb * (nb - 1) * (nb - 2) * p)), mb**3)
    return out


def find_vc(setup: PhysicalSetup, n_target_a: float, n_target_b: float,
            tol: float = 1e-3, v_lo: float = 2.0, v_hi: float = 40.0,
            n_max: int = 12, solver_tol: float = 1e-9) -> float:
    """Critical depth where both order parameters drop below the superfluid
    threshold, located by bisection on V0."""
    if tol <= 0:
        raise DomainError("tol must be positive")

    def is_mott(v0):
        p = hubbard_params(setup, v0)
        # the landscape is quartically flat right at the transition and the
        # residual can stall well above the nominal tolerance; a loose solve
        # still classifies the phase (phi^2 is either ~0 or >> 1e-8)
        st = None
        for attempt_tol in (solver_tol, 1e-5, 3e-4):
            try:
                st = minimize(p, n_target_a, n_target_b, n_max=n_max,
                              tol=attempt_tol, z=setup.z)
                break
            except ConvergenceError:
                continue
        if st is None:
            raise ConvergenceError(
                f"phase classification failed at V0={v0}: solver stalled "
                "above tol 3e-4")
        return (st.phi_a**2 < SF_THRESHOLD) and (st.phi_b**2 < SF_THRESHOLD)

    lo, hi = v_lo, v_hi
    if is_mott(lo) or not is_mott(hi):
        raise RegimeError(
            f"no superfluid-to-Mott sign change in the scanned range [{v_lo}, {v_hi}] E_R"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_mott(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class EnergySurface:
    """Ground-state energies E0(Na, V0) = N e over a Fock window and depth grid,
    with per-cell on-site correlations of the constrained Gutzwiller state."""

    n_atoms: int
    na_values: np.ndarray       # (nNa,)
    v_grid: np.ndarray          # (nV,)
    e0: np.ndarray              # (nNa, nV), total energy in E_R
    g2_aa: np.ndarray
    g2_ab: np.ndarray
    g3_a: np.ndarray
    g3_b: np.ndarray
    var_ntot: np.ndarray        # var(n_a+n_b) per cell
    meta: dict | None = None

    def central_index(self) -> int:
        return int(np.argmin(np.abs(self.na_values - self.n_atoms / 2.0)))


def _surface_row(args):
    (setup_kw, params_list, n_atoms, na, n_max, tol, z) = args
    x = na / n_atoms
    row_e = np.empty(len(params_list))
    row_obs = np.empty((5, len(params_list)))
    c_prev = None
    for k, params in enumerate(params_list):
        st = minimize(params, x, 1.0 - x, n_max=n_max, tol=tol, z=z, c0=c_prev)
        c_prev = st.c
        row_e[k] = n_atoms * st.energy
        obs = observables(st)
        row_obs[0, k] = obs["g2_aa"] if obs["g2_aa"] is not None else np.nan
        row_obs[1, k] = obs["g2_ab"] if obs["g2_ab"] is not None else np.nan
        row_obs[2, k] = obs["g3_a"] if obs["g3_a"] is not None else np.nan
        row_obs[3, k] = obs["g3_b"] if obs["g3_b"] is not None else np.nan
        p = st.c**2
        n = np.arange(st.c.shape[0], dtype=float)
        ntot = n[:, None] + n[None, :]
        row_obs[4, k] = float(np.sum(ntot**2 * p) - np.sum(ntot * p) ** 2)
    return row_e, row_obs


def energy_surface(setup: PhysicalSetup, n_atoms: int, na_values, v_grid, *,
                   n_max: int = DEFAULT_N_MAX, tol: float = 1e-10,
                   jobs: int = 1, params_list=None) -> EnergySurface:
    """Tabulate E0(Na, V0) by constrained minimization at fillings
    (Na/N, 1 - Na/N), warm-starting each solve from the previous depth.

    Rows (fixed Na) are independent; with jobs > 1 they are evaluated in a
    process pool.  The assembled table does not depend on the schedule.
    """
    na_values = np.asarray(na_values, dtype=int)
    v_grid = np.asarray(v_grid, dtype=float)
    if np.any(na_values < 0) or np.any(na_values > n_atoms):
        raise DomainError("Fock window must lie inside [0, N]")
    if np.any(np.diff(v_grid) <= 0):
        raise DomainError("depth grid must be strictly increasing")
    if params_list is None:
        params_list = [hubbard_params(setup, v) for v in v_grid]
    tasks = [(None, params_list, n_atoms, int(na), n_max, tol, setup.z)
             for na in na_values]
    results = [None] * len(tasks)
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for i, res in enumerate(ex.map(_surface_row_safe, tasks)):
                results[i] = _reraise(res, na_values[i])
    else:
        for i, t in enumerate(tasks):
            results[i] = _reraise(_surface_row_safe(t), na_values[i])
    e0 = np.stack([r[0] for r in results])
    obs = np.stack([r[1] for r in results])
    return EnergySurface(
        n_atoms=n_atoms, na_values=na_values, v_grid=v_grid, e0=e0,
        g2_aa=obs[:, 0, :], g2_ab=obs[:, 1, :], g3_a=obs[:, 2, :],
        g3_b=obs[:, 3, :], var_ntot=obs[:, 4, :],
    )


def _surface_row_safe(args):
    try:
        return _surface_row(args)
    except Exception as exc:  # re-raised with cell context by the caller
        return ("error", repr(exc))


def _reraise(res, na):
    if isinstance(res, tuple) and isinstance(res[0], str) and res[0] == "error":
        raise ConvergenceError(f"energy-surface row Na={na} failed: {res[1]}")
    return res


def surface_cache_key(setup: PhysicalSetup, n_atoms, na_values, v_grid, n_max, tol) -> str:
    payload = {
        "a_aa": setup.a_aa, "a_bb": setup.a_bb, "a_ab": setup.a_ab,
        "mass": setup.mass, "wavelength": setup.wavelength, "z": setup.z,
        "n": int(n_atoms), "na": list(map(int, na_values)),
        "v": [float(v) for v in v_grid], "n_max": int(n_max), "tol": float(tol),
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def save_surface(surface: EnergySurface, path):
    np.savez_compressed(
        path, n_atoms=surface.n_atoms, na_values=surface.na_values,
        v_grid=surface.v_grid, e0=surface.e0, g2_aa=surface.g2_aa,
        g2_ab=surface.g2_ab, g3_a=surface.g3_a, g3_b=surface.g3_b,
        var_ntot=surface.var_ntot,
    )


def load_surface(path) -> EnergySurface:
    z = np.load(path)
    return EnergySurface(
        n_atoms=int(z["n_atoms"]), na_values=z["na_values"], v_grid=z["v_grid"],
        e0=z["e0"], g2_aa=z["g2_aa"], g2_ab=z["g2_ab"], g3_a=z["g3_a"],
        g3_b=z["g3_b"], var_ntot=z["var_ntot"],
    )


def cached_energy_surface(setup, n_atoms, na_values, v_grid, *, cache_dir=None,
                          n_max: int = DEFAULT_N_MAX, tol: float = 1e-10, jobs: int = 1):
    """energy_surface with an optional on-disk cache keyed by a content hash."""
    if cache_dir is None:
        return energy_surface(setup, n_atoms, na_values, v_grid,
                              n_max=n_max, tol=tol, jobs=jobs)
    key = surface_cache_key(setup, n_atoms, na_values, v_grid, n_max, tol)
    path = Path(cache_dir) / f"surface_{key}.npz"
    if path.exists():
        return load_surface(path)
    surf = energy_surface(setup, n_atoms, na_values, v_grid,
                          n_max=n_max, tol=tol, jobs=jobs)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_surface(surf, path)
    return surf
