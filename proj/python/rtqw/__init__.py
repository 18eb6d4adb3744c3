"""Quantum walks on Z^d whose coins are random in time."""

from ._core import (
    AssumptionError,
    Coin,
    ConfigError,
    ConvergenceError,
    FiniteCoinEnsemble,
    JumpFunction,
    MarkovCoinProcess,
    __version__,
    assumption_holds,
    averaged_diffusion,
    averaged_distribution,
    averaged_distribution_markov,
    diffusion_matrix,
    evolve_distribution,
    ld_rate,
    mc_char_function,
    md_rate,
    run_command,
)

__all__ = [
    "AssumptionError",
    "Coin",
    "ConfigError",
    "ConvergenceError",
    "FiniteCoinEnsemble",
    "JumpFunction",
    "MarkovCoinProcess",
    "__version__",
    "assumption_holds",
    "averaged_diffusion",
    "averaged_distribution",
    "averaged_distribution_markov",
    "diffusion_matrix",
    "evolve_distribution",
    "ld_rate",
    "mc_char_function",
    "md_rate",
    "run_command",
]
