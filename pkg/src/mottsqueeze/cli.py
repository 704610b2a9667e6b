"""Command-line interface: one verb per artifact.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
4 physical-regime error (instability, no crossing).
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bogoliubov, oat, pipeline, spins
from .config import default_config, load_config
from .errors import (AccuracyError, ConfigError, ConvergenceError,
                     DomainError, MottsqueezeError, RegimeError)
from .gutzwiller import find_vc
from .lattice import RampSchedule, hubbard_params


def _parser():
    p = argparse.ArgumentParser(prog="mottsqueeze",
                                description="squeezing across the "
                                "superfluid-to-Mott transition")
    p.add_argument("--config", metavar="PATH", help="INI configuration file")
    p.add_argument("--out", metavar="DIR", default="out",
                   help="output directory (default: out)")
    p.add_argument("--jobs", type=int, default=1, metavar="K",
                   help="worker processes; results are identical for any K")
    p.add_argument("--cache", metavar="DIR", default=None,
                   help="energy-surface cache directory")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for multi-start perturbations")
    p.add_argument("--grid-scale", type=float, default=1.0, metavar="FACTOR",
                   help="global grid refinement factor")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("params", help="Bose-Hubbard parameters at a depth")
    sp.add_argument("v0", type=float, nargs="+")

    sub.add_parser("vc", help="critical lattice depth at balanced filling")

    sub.add_parser("squeeze", help="full squeezing trajectory along the ramp")

    sub.add_parser("oat-scaling", help="best-time scaling over the atom sweep")

    sp = sub.add_parser("adiabatic", help="adiabatic times and optional sweep")
    sp.add_argument("--tau-sweep", type=float, nargs="*", default=None,
                    metavar="TAU", help="ramp durations for an excitation sweep")

    sub.add_parser("losses", help="loss curves and the usable atom number")

    sub.add_parser("figure2", help="all squeezing-generation panels")

    sub.add_parser("figure3", help="lost fraction vs best squeezing")
    return p


def _load(args):
    if args.config:
        return load_config(args.config)
    return default_config()


def cmd_params(cfg, args):
    rows = [hubbard_params(cfg.setup, v) for v in args.v0]
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "params.csv")
    pipeline.write_csv(path, ["v0", "J", "U_aa", "U_bb", "U_ab", "I2", "I3"],
                       [np.array([r.v0 for r in rows]),
                        np.array([r.J for r in rows]),
                        np.array([r.U_aa for r in rows]),
                        np.array([r.U_bb for r in rows]),
                        np.array([r.U_ab for r in rows]),
                        np.array([r.I2 for r in rows]),
                        np.array([r.I3 for r in rows])],
                       pipeline._meta(cfg))
    for r in rows:
        print(f"V0={r.v0} E_R: J={r.J:.6g} U_aa={r.U_aa:.6g} "
              f"U_ab={r.U_ab:.6g} (E_R)")
    print(path)
    return 0


def cmd_vc(cfg, args):
    v_c = find_vc(cfg.setup, 0.5, 0.5)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "vc.json")
    pipeline.write_json(path, {"v_c": v_c}, pipeline._meta(cfg))
    print(f"v_c = {v_c:.4f} E_R")
    print(path)
    return 0


def cmd_squeeze(cfg, args):
    os.makedirs(args.out, exist_ok=True)
    v_c = pipeline.resolve_v_c(cfg)
    surface = pipeline.build_surface(cfg, cache_dir=args.cache, jobs=args.jobs,
                                     grid_scale=args.grid_scale)
    chi = pipeline.build_chi(cfg, v_c, grid_scale=args.grid_scale)
    t_best = oat.t_best(chi)
    run = cfg.run
    tau = t_best * (run["v_end"] - run["v_init"]) / (v_c - run["v_init"])
    ramp = RampSchedule(run["v_init"], run["v_end"], tau)
    times = np.linspace(0.0, tau, pipeline._scaled(run["time_points"],
                                                   args.grid_scale))
    traj = spins.squeeze_trajectory(surface, ramp, cfg.setup, times)
    meta = pipeline._meta(cfg)
    pipeline.write_csv(os.path.join(args.out, "squeeze.csv"),
                       ["t", "xi2", "mean_spin"],
                       [times, traj["xi2"], traj["mean_spin"]], meta)
    pipeline.write_json(os.path.join(args.out, "squeeze_summary.json"),
                        {"xi2_best": traj["xi2_best"],
                         "t_best": traj["t_best"], "v_c": v_c,
                         "tau_total": tau}, meta)
    if cfg.output["figures"]:
        from . import plotting
        plotting.plot_squeeze(args.out, times, traj["xi2"], traj["mean_spin"])
    print(f"xi2_best = {traj['xi2_best']:.5g} at t = {traj['t_best']:.5g} s")
    return 0


def cmd_oat_scaling(cfg, args):
    os.makedirs(args.out, exist_ok=True)
    v_c = pipeline.resolve_v_c(cfg)
    tbs = []
    for n_k in cfg.sweep_atoms:
        chi_k = pipeline.build_chi(cfg, v_c, n_atoms=n_k,
                                   grid_scale=args.grid_scale)
        tbs.append(oat.t_best(chi_k))
    alpha, pref = oat.scaling_exponent(cfg.sweep_atoms, tbs)
    meta = pipeline._meta(cfg)
    pipeline.write_csv(os.path.join(args.out, "oat_scaling.csv"),
                       ["n_atoms", "t_best"],
                       [np.array(cfg.sweep_atoms, float), np.array(tbs)], meta)
    pipeline.write_json(os.path.join(args.out, "oat_scaling.json"),
                        {"alpha_fit": alpha, "prefactor": pref, "v_c": v_c},
                        meta)
    print(f"alpha = {alpha:.4f}")
    return 0


def cmd_adiabatic(cfg, args):
    res = pipeline.run_adiabatic(cfg, args.out, jobs=args.jobs,
                                 grid_scale=args.grid_scale,
                                 tau_sweep=args.tau_sweep)
    print(f"t_adiab_minus/t_best = {res['ratio']:.4f} "
          f"(asymptotic {res['ratio_asymptotic']:.4f})")
    return 0


def cmd_losses(cfg, args):
    res = pipeline.run_figure3(cfg, args.out, jobs=args.jobs,
                               cache_dir=args.cache,
                               grid_scale=args.grid_scale)
    print(f"N_max = {res['N_max']:.4g}")
    return 0


def cmd_figure2(cfg, args):
    res = pipeline.run_figure2(cfg, args.out, jobs=args.jobs,
                               cache_dir=args.cache,
                               grid_scale=args.grid_scale)
    print(f"alpha = {res['alpha_fit']:.4f}, xi2_best = {res['xi2_best']:.5g}")
    return 0


def cmd_figure3(cfg, args):
    return cmd_losses(cfg, args)


_COMMANDS = {
    "params": cmd_params, "vc": cmd_vc, "squeeze": cmd_squeeze,
    "oat-scaling": cmd_oat_scaling, "adiabatic": cmd_adiabatic,
    "losses": cmd_losses, "figure2": cmd_figure2, "figure3": cmd_figure3,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args)
        return _COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, AccuracyError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except (RegimeError, DomainError) as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return 4
    except MottsqueezeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
