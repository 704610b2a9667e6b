"""Figure rendering next to the CSV data files.

Uses the Agg backend only; every figure is saved as PNG in the output
directory and nothing is shown interactively.
"""
from __future__ import annotations

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def plot_figure2(out_dir, surface, times, traj, xi2_dyn, xi2_stat,
                 t_dyn, T_dyn, sweep, tbs, alpha):
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))

    ax = axes[0, 0]
    ci = surface.central_index()
    ax.plot(surface.v_grid, surface.g2_aa[ci], label=r"$g^{(2)}_{aa}$")
    ax.plot(surface.v_grid, surface.g2_ab[ci], label=r"$g^{(2)}_{ab}$")
    ax.set_xlabel(r"$V_0/E_R$")
    ax.set_ylabel("on-site correlations")
    ax.legend()

    ax = axes[0, 1]
    ax.semilogy(times, traj["xi2"], label="full")
    ax.semilogy(times, xi2_dyn, "--", label="dynamic OAT")
    ax.semilogy(times, xi2_stat, ":", label="static OAT")
    ax.set_xlabel("t (s)")
    ax.set_ylabel(r"$\xi^2$")
    ax.legend()

    ax = axes[1, 0]
    ax.plot(t_dyn, T_dyn)
    ax.set_xlabel("t (s)")
    ax.set_ylabel("accumulated twist T")

    ax = axes[1, 1]
    ax.loglog(sweep, tbs, "o-", label=rf"fit $\alpha$={alpha:.3f}")
    ax.set_xlabel("N")
    ax.set_ylabel(r"$t_{best}$ (s)")
    ax.legend()

    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "figure2.png"), dpi=150)
    plt.close(fig)


def plot_figure3(out_dir, res):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.loglog(res["n_grid"], res["lost_fraction"], "o-", label="lost fraction")
    ax.loglog(res["n_grid"], res["xi2_best"], "s-", label=r"$\xi^2_{best}$")
    ax.axvline(res["N_max"], color="k", ls="--",
               label=rf"$N_{{max}}$ = {res['N_max']:.3g}")
    ax.set_xlabel("N")
    ax.legend()
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "figure3.png"), dpi=150)
    plt.close(fig)


def plot_squeeze(out_dir, times, xi2, mean_spin):
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogy(times, xi2)
    ax.set_xlabel("t (s)")
    ax.set_ylabel(r"$\xi^2$")
    ax2 = ax.twinx()
    ax2.plot(times, mean_spin, color="tab:orange", alpha=0.6)
    ax2.set_ylabel(r"$|\langle S\rangle|$", color="tab:orange")
    fig.tight_layout()
    fig.savefig(os.path.join(out_dir, "squeeze.png"), dpi=150)
    plt.close(fig)
