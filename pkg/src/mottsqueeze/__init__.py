"""Spin squeezing generated and frozen across the superfluid-to-Mott
transition of a two-component lattice Bose gas."""

__version__ = "0.1.0"
