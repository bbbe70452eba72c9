"""Entropic non-Gaussianity of nonlinear optomechanical dynamics.

Two independent engines quantify delta = S(rho_G) - S(rho) for an
initially Gaussian two-mode state evolving under the cubic coupling
-g(tau) Na (b + b'): a closed-form pipeline (decoupling coefficients ->
moments -> covariance matrix -> symplectic entropies) and a brute-force
truncated-Fock-space integrator that also handles open (Lindblad)
dynamics.  A sweep CLI drives both and writes CSV/JSON data files.
"""

from ._version import __version__
from .coupling import CouplingProfile, TrapParameters, trap_parameters_to_coupling
from .coefficients import (EvolutionCoefficients, QuadratureConfig,
                           coeffs_constant, coeffs_for_profile,
                           coeffs_modulated, coeffs_numeric, coeffs_resonant)
from .covariance import (CoherentMech, CovarianceMatrix, InitialState, Moments,
                         ThermalMech, covariance_coherent_direct,
                         covariance_from_moments, covariance_large_mu,
                         moments_coherent, moments_for_initial, moments_thermal)
from .entropy import (DeltaResult, SymplecticPair, araki_lieb_witness,
                      binary_entropy, delta, delta_large_mu, delta_small_mu,
                      entropy_expansion, gaussian_entropy, initial_entropy,
                      symplectic_eigenvalues, symplectic_eigenvalues_invariant)
from .fock import (FockState, NoiseConfig, StepperConfig, Truncation,
                   delta_numeric, evolve_closed, evolve_closed_exact,
                   evolve_lindblad, make_initial, moments_numeric,
                   reduced_entropies, state_fidelity, suggest_truncation,
                   truncation_check, von_neumann_entropy)
from .sweep import (FIGURE_PRESETS, RunConfig, compare_engines, figure_config,
                    load_config, parse_config, reproduce_figure, run_sweep)
from . import errors

__all__ = [
    "__version__", "errors",
    "CouplingProfile", "TrapParameters", "trap_parameters_to_coupling",
    "EvolutionCoefficients", "QuadratureConfig", "coeffs_constant",
    "coeffs_modulated", "coeffs_resonant", "coeffs_numeric", "coeffs_for_profile",
    "CoherentMech", "ThermalMech", "InitialState", "Moments", "CovarianceMatrix",
    "moments_coherent", "moments_thermal", "moments_for_initial",
    "covariance_from_moments", "covariance_coherent_direct", "covariance_large_mu",
    "SymplecticPair", "DeltaResult", "symplectic_eigenvalues",
    "symplectic_eigenvalues_invariant", "binary_entropy", "gaussian_entropy",
    "initial_entropy", "delta", "delta_small_mu", "delta_large_mu",
    "entropy_expansion", "araki_lieb_witness",
    "Truncation", "FockState", "NoiseConfig", "StepperConfig", "make_initial",
    "evolve_closed", "evolve_closed_exact", "evolve_lindblad", "moments_numeric",
    "von_neumann_entropy", "delta_numeric", "reduced_entropies",
    "truncation_check", "state_fidelity", "suggest_truncation",
    "RunConfig", "parse_config", "load_config", "run_sweep", "compare_engines",
    "figure_config", "reproduce_figure", "FIGURE_PRESETS",
]
