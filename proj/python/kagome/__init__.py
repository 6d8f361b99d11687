"""Breathing-Kagome atomic metasurface engine."""

from ._core import (
    ConfigError,
    Lattice,
    LatticeSpec,
    Polarization,
    __version__,
    analyze,
    bands,
    build_flake,
    hamiltonian,
    run,
    scenario,
    scenario_names,
    tb_corner_modes,
    wilson_polarization,
)

__all__ = [
    "ConfigError",
    "Lattice",
    "LatticeSpec",
    "Polarization",
    "analyze",
    "bands",
    "build_flake",
    "hamiltonian",
    "run",
    "scenario",
    "scenario_names",
    "tb_corner_modes",
    "wilson_polarization",
]
