"""Lotka-Volterra competition models for institutional enrollment."""

from lvniche.model import (
    CompetitionModel,
    DimensionError,
    ModelError,
    PopulationState,
    growth_rates,
    jacobian,
    validate_model,
)

__all__ = [
    "CompetitionModel",
    "DimensionError",
    "ModelError",
    "PopulationState",
    "growth_rates",
    "jacobian",
    "validate_model",
]
