"""Quantum-like model of interfering causes, with a classical probability oracle."""

from __future__ import annotations

from .models import (
    ProbabilityReport,
    ThreeCauseParams,
    TwoCauseParams,
    build,
    evaluate_report,
    printed_three_cause,
    printed_two_cause,
    solve_independence_a1,
    sweep_r,
    witness_report,
)

__all__ = [
    "ProbabilityReport",
    "ThreeCauseParams",
    "TwoCauseParams",
    "build",
    "evaluate_report",
    "printed_three_cause",
    "printed_two_cause",
    "solve_independence_a1",
    "sweep_r",
    "witness_report",
]
__version__ = "0.1.0"
