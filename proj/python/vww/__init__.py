"""Spectral wave solver for distributional potentials q = nu'."""

from ._core import (
    Basis,
    Error,
    Nu,
    build_basis,
    default_ladder,
    estimate,
    existence,
    mollify_potential,
    solve,
)

__all__ = [
    "Basis",
    "Error",
    "Nu",
    "build_basis",
    "default_ladder",
    "estimate",
    "existence",
    "mollify_potential",
    "solve",
]
