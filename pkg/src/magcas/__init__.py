"""magcas: magnonic Casimir energies of magnetic thin films on the lattice.

Computes the zero-point energy difference between discrete thickness
modes and their continuum limit for antiferromagnetic and ferrimagnetic
films, with material presets, parameter sweeps and a CLI.
"""

from . import errors
from ._kernels import BACKEND
from .casimir import (
    CasimirQuad,
    CasimirResult,
    MagnetizationResult,
    casimir_coefficient,
    casimir_energy,
    casimir_magnetization,
    continuum_asymptote,
    kz_continuum_integral,
    kz_discrete_sum,
)
from .dispersion import (
    SIGMAS,
    AfmParams,
    FerriParams,
    afm_energy,
    ferri_energy,
    form_factor,
    mode_profile,
    reg,
)
from .materials import (
    MaterialPreset,
    load_params,
    override_params,
    preset,
    preset_names,
    register_preset,
    save_params,
)
from .quadrature import Panel, QuadratureSpec, QuadResult, gauss_nodes, integrate_1d, integrate_2d
from .sweep import SweepPlan, SweepRow, figure_bundle, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "errors",
    "Panel",
    "QuadratureSpec",
    "QuadResult",
    "gauss_nodes",
    "integrate_1d",
    "integrate_2d",
    "SIGMAS",
    "AfmParams",
    "FerriParams",
    "reg",
    "afm_energy",
    "mode_profile",
    "form_factor",
    "ferri_energy",
    "MaterialPreset",
    "preset",
    "preset_names",
    "register_preset",
    "load_params",
    "save_params",
    "override_params",
    "CasimirQuad",
    "CasimirResult",
    "MagnetizationResult",
    "kz_discrete_sum",
    "kz_continuum_integral",
    "casimir_energy",
    "casimir_coefficient",
    "casimir_magnetization",
    "continuum_asymptote",
    "SweepPlan",
    "SweepRow",
    "run_sweep",
    "figure_bundle",
]
