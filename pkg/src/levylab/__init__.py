"""Monte Carlo laboratory for random walks in a one-dimensional Lévy random medium."""

from .constants import (F_const, QuadratureConfig, d_const, f_alpha, gamma_exponent,
                        gaussian_abs_moment, moment_asymptote)
from .ensemble import (EnsembleResult, annealed_ensemble, annealed_sweep, quenched_ensemble,
                       quenched_sweep)
from .limits import (CompositionSpec, SceneryApproximation, compose_marginal_sample,
                     compose_marginals, ks_marginal)
from .medium import (Deterministic, GapLaw, MediumWindow, Pareto, ShiftedExponential, gap_tail,
                     rescaled_medium, target)
from .stable import StableLaw, levy_marginal, sample_stable, two_sided_marginal
from .stats import (ExponentFit, KSResult, empirical_abs_moment, fit_exponent, ks_two_sample,
                    stretched_exp_rate, studentize, tail_probability)
from .walks import (DriftedZeta, GasTrajectory, IncrementLaw, LazySymmetric, SimpleSymmetric,
                    SymmetricZeta, WalkPath, flight, interpolate, position_at, sample_walk,
                    simulate_gas)

__all__ = [
    "annealed_ensemble", "annealed_sweep", "compose_marginal_sample", "compose_marginals",
    "CompositionSpec", "d_const", "Deterministic", "DriftedZeta", "empirical_abs_moment",
    "EnsembleResult", "ExponentFit", "f_alpha", "F_const", "fit_exponent", "flight",
    "gamma_exponent", "gap_tail", "GapLaw", "GasTrajectory", "gaussian_abs_moment",
    "IncrementLaw", "interpolate", "ks_marginal", "ks_two_sample", "KSResult", "LazySymmetric",
    "levy_marginal", "MediumWindow", "moment_asymptote", "Pareto", "position_at",
    "QuadratureConfig", "quenched_ensemble", "quenched_sweep", "rescaled_medium",
    "sample_stable", "sample_walk", "SceneryApproximation", "ShiftedExponential",
    "SimpleSymmetric", "simulate_gas", "StableLaw", "stretched_exp_rate", "studentize",
    "SymmetricZeta", "tail_probability", "target", "two_sided_marginal", "WalkPath"
]

__version__ = "0.1.0"
