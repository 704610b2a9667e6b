"""Orchestration: assemble module outputs into figure data files.

Every CSV/JSON written here embeds the config hash, the echo of defaulted
parameters and the package version in comment lines / metadata fields, and
all numeric formatting is explicit, so reruns with an identical effective
configuration are byte-identical regardless of worker count.
"""
from __future__ import annotations

import json
import os

import numpy as np

from . import __version__, bogoliubov, losses, oat, spins
from .config import ScenarioConfig
from .errors import ConfigError, RegimeError
from .gutzwiller import cached_energy_surface, find_vc
from .lattice import RampSchedule, hubbard_params


def _fmt(x) -> str:
    """Shortest round-trip decimal form; deterministic across runs."""
    return format(float(x), ".17g")


def write_csv(path, header, columns, meta):
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}: {v}\n")
        fh.write(",".join(header) + "\n")
        for row in zip(*cols):
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_json(path, payload, meta):
    data = dict(meta)
    data.update(payload)
    with open(path, "w", newline="") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def _meta(cfg: ScenarioConfig) -> dict:
    return {
        "config-hash": cfg.hash(),
        "version": __version__,
        "defaulted": " ".join(cfg.defaulted) if cfg.defaulted else "(none)",
    }


def _scaled(n, grid_scale):
    return max(4, int(round(n * grid_scale)))


def resolve_v_c(cfg: ScenarioConfig, setup=None) -> float:
    """Configured critical depth, or located by bisection when absent."""
    if cfg.run["v_c"] > 0:
        return float(cfg.run["v_c"])
    return find_vc(setup or cfg.setup, 0.5, 0.5)


def build_surface(cfg: ScenarioConfig, *, v_max=None, cache_dir=None,
                  jobs=1, grid_scale=1.0):
    run = cfg.run
    n = run["n_atoms"]
    if run["window_half_width"] > 0:
        half = run["window_half_width"]
        center = n // 2
        na = np.arange(max(0, center - half), min(n, center + half) + 1)
    else:
        na = spins.surface_window(n)
    v = np.linspace(run["v_init"], v_max if v_max is not None else run["v_end"],
                    _scaled(run["depth_points"], grid_scale))
    return cached_energy_surface(cfg.setup, n, na, v, n_max=run["n_max"],
                                 tol=run["solver_tol"], cache_dir=cache_dir,
                                 jobs=jobs)


def build_chi(cfg: ScenarioConfig, v_c, *, n_atoms=None, grid_scale=1.0):
    vg = np.linspace(cfg.run["v_init"], v_c,
                     _scaled(cfg.run["chi_points"], grid_scale))
    return oat.chi_curve(cfg.setup, n_atoms or cfg.run["n_atoms"], vg, v_c=v_c)


def run_figure2(cfg: ScenarioConfig, out_dir, *, jobs=1, cache_dir=None,
                grid_scale=1.0, make_figures=None) -> dict:
    """Squeezing-generation data: correlations along the ramp, xi^2(t) for
    the full model and both one-axis-twisting reductions, the accumulated
    twist, and the best-time scaling fit."""
    os.makedirs(out_dir, exist_ok=True)
    meta = _meta(cfg)
    setup, run = cfg.setup, cfg.run
    n = run["n_atoms"]

    v_c = resolve_v_c(cfg)
    meta["v_c"] = _fmt(v_c)
    meta["v_c_source"] = "config" if run["v_c"] > 0 else "bisection"

    surface = build_surface(cfg, cache_dir=cache_dir, jobs=jobs,
                            grid_scale=grid_scale)
    chi = build_chi(cfg, v_c, grid_scale=grid_scale)
    t_best = oat.t_best(chi)

    # ramp: reach v_c at t_best, then keep the slope to the final depth
    tau_total = t_best * (run["v_end"] - run["v_init"]) / (v_c - run["v_init"])
    ramp = RampSchedule(run["v_init"], run["v_end"], tau_total)
    times = np.linspace(0.0, tau_total, _scaled(run["time_points"], grid_scale))

    traj = spins.squeeze_trajectory(surface, ramp, setup, times)

    # panel a: on-site correlations of the central Fock state along the ramp
    ci = surface.central_index()
    write_csv(os.path.join(out_dir, "figure2a_correlations.csv"),
              ["v0", "g2_aa", "g2_ab"],
              [surface.v_grid, surface.g2_aa[ci], surface.g2_ab[ci]], meta)

    # panel b: squeezing for full / dynamic-OAT / static-OAT
    sched_c = RampSchedule(run["v_init"], v_c, t_best)
    t_dyn = times[times <= t_best]
    dyn = oat.dynamic_oat_trajectory(chi, sched_c, t_dyn)
    chi0 = float(chi.chi[0])
    stat = oat.static_oat_trajectory(n, chi0, times)
    xi2_dyn = np.full(len(times), np.nan)
    xi2_dyn[: len(t_dyn)] = dyn["xi2"]
    write_csv(os.path.join(out_dir, "figure2b_squeezing.csv"),
              ["t", "xi2_full", "xi2_dynamic_oat", "xi2_static_oat",
               "mean_spin"],
              [times, traj["xi2"], xi2_dyn, stat["xi2"], traj["mean_spin"]],
              meta)

    # panel c: accumulated adimensional twist along the ramp
    T_dyn = np.array([oat.T_of_t(chi, sched_c, t) for t in t_dyn])
    write_csv(os.path.join(out_dir, "figure2c_twist.csv"),
              ["t", "T"], [t_dyn, T_dyn], meta)

    # panel d: best-time scaling over the atom-number sweep
    sweep = cfg.sweep_atoms
    tbs = []
    for n_k in sweep:
        chi_k = build_chi(cfg, v_c, n_atoms=n_k, grid_scale=grid_scale)
        tbs.append(oat.t_best(chi_k))
    alpha, _ = oat.scaling_exponent(sweep, tbs)
    write_csv(os.path.join(out_dir, "figure2d_scaling.csv"),
              ["n_atoms", "t_best"], [np.array(sweep, float), np.array(tbs)],
              meta)

    summary = {
        "v_c": v_c, "t_best": t_best, "tau_total": tau_total,
        "xi2_best": traj["xi2_best"], "t_best_observed": traj["t_best"],
        "alpha_fit": alpha, "n_atoms": n,
    }
    write_json(os.path.join(out_dir, "figure2_summary.json"), summary, meta)

    if make_figures if make_figures is not None else cfg.output["figures"]:
        from . import plotting
        plotting.plot_figure2(out_dir, surface, times, traj, xi2_dyn,
                              stat["xi2"], t_dyn, T_dyn, sweep, tbs, alpha)
    summary["out_dir"] = out_dir
    return summary


def run_figure3(cfg: ScenarioConfig, out_dir, *, jobs=1, cache_dir=None,
                grid_scale=1.0, make_figures=None) -> dict:
    """Lost fraction vs best squeezing over the atom-number grid."""
    if cfg.scenario is None:
        raise ConfigError("figure3 needs a [scenario] section with loss "
                          "constants (or preset = a / b)")
    os.makedirs(out_dir, exist_ok=True)
    meta = _meta(cfg)
    n_grid = np.asarray(cfg.loss_atoms, dtype=float)
    res = losses.n_max_crossing(cfg.setup, cfg.scenario, n_grid,
                                v_init=cfg.run["v_init"])
    meta["scenario"] = cfg.scenario.label
    write_csv(os.path.join(out_dir, "figure3_losses.csv"),
              ["n_atoms", "lost_fraction", "xi2_best"],
              [res["n_grid"], res["lost_fraction"], res["xi2_best"]], meta)
    summary = {"N_max": res["N_max"], "scenario": cfg.scenario.label,
               "lambda_m": cfg.setup.wavelength, "V_init": cfg.run["v_init"],
               "v_c": res["v_c"]}
    write_json(os.path.join(out_dir, "figure3_summary.json"), summary, meta)
    if make_figures if make_figures is not None else cfg.output["figures"]:
        from . import plotting
        plotting.plot_figure3(out_dir, res)
    summary["out_dir"] = out_dir
    return summary


def run_adiabatic(cfg: ScenarioConfig, out_dir, *, jobs=1, grid_scale=1.0,
                  tau_sweep=None, make_figures=None) -> dict:
    """Adiabatic-time analysis at the configured atom number."""
    os.makedirs(out_dir, exist_ok=True)
    meta = _meta(cfg)
    setup, run = cfg.setup, cfg.run
    n = run["n_atoms"]
    v_c = resolve_v_c(cfg)
    chi = build_chi(cfg, v_c, grid_scale=grid_scale)
    t_best = oat.t_best(chi)
    schedule = RampSchedule(run["v_init"], v_c, t_best)
    table = bogoliubov.ramp_table(setup, run["v_init"], v_c)
    res = bogoliubov.adiabatic_time(setup, n, schedule, table=table)
    summary = {
        "t_best": t_best, "v_c": v_c, "n_atoms": n,
        "t_adiab_plus": res["t_adiab_plus"],
        "t_adiab_minus": res["t_adiab_minus"],
        "t_adiab_plus_asymptotic": res["t_adiab_plus_asymptotic"],
        "t_adiab_minus_asymptotic": res["t_adiab_minus_asymptotic"],
        "ratio": res["t_adiab_minus"] / t_best,
        "ratio_asymptotic": res["t_adiab_minus_asymptotic"] / t_best,
    }
    write_json(os.path.join(out_dir, "adiabatic_summary.json"), summary, meta)
    if tau_sweep:
        fracs = []
        for tau in tau_sweep:
            sch = RampSchedule(run["v_init"], v_c, float(tau))
            out = bogoliubov.excitation_fraction(setup, n, sch, table=table,
                                                 jobs=jobs)
            fracs.append(out["total_fraction"])
        write_csv(os.path.join(out_dir, "adiabatic_sweep.csv"),
                  ["tau", "excitation_fraction"],
                  [np.asarray(tau_sweep, float), np.asarray(fracs)], meta)
        summary["tau_sweep"] = list(map(float, tau_sweep))
        summary["excitation_fraction"] = fracs
    summary["out_dir"] = out_dir
    return summary
