"""Equilibrium solvers for voluntary disclosure with truth-or-noise signals."""

from .beliefs import JointBeliefs, ModelParams, gamma, joint_posterior
from .distributions import (
    Beta,
    PiecewiseLinear,
    TruncatedNormal,
    Uniform,
    ValueDistribution,
    from_spec,
)
from .equilibrium import (
    DynamicCosts,
    EquilibriumResult,
    SolverError,
    ThresholdFunction,
    solve_benchmark,
    solve_dynamic,
    solve_early,
    solve_frequent,
    solve_late,
    solve_late_curve,
)
from .extensions import NoiseModel, detect_nonmonotonicity, find_tau_hat
from .pricing import (
    benchmark_price,
    expected_nondisclosure_price,
    nondisclosure_price,
    price_curve,
)

__all__ = [
    "Beta",
    "DynamicCosts",
    "EquilibriumResult",
    "JointBeliefs",
    "ModelParams",
    "NoiseModel",
    "PiecewiseLinear",
    "SolverError",
    "ThresholdFunction",
    "TruncatedNormal",
    "Uniform",
    "ValueDistribution",
    "benchmark_price",
    "detect_nonmonotonicity",
    "expected_nondisclosure_price",
    "find_tau_hat",
    "from_spec",
    "gamma",
    "joint_posterior",
    "nondisclosure_price",
    "price_curve",
    "solve_benchmark",
    "solve_dynamic",
    "solve_early",
    "solve_frequent",
    "solve_late",
    "solve_late_curve",
]

__version__ = "0.1.0"
