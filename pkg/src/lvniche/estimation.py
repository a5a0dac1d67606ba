"""Competition coefficients from niche data and capacities from an observed equilibrium."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from lvniche.model import DimensionError, ModelError


class AlphaPair(NamedTuple):
    """Two competition coefficients; which direction each one is depends on the estimator."""

    forward: float
    backward: float


def alpha_from_income_fraction(p: float) -> AlphaPair:
    """Coefficients for an external pool (index 1) against a local institution (index 2).

    ``p`` is the share of families wealthy enough to send their children
    away.  External competitors can recruit that share of the local
    institution's potential students, while the local institution can
    absorb all of the external pool's local candidates.

    Returns ``(alpha_12, alpha_21) = (p, 1)``.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"income fraction must lie in [0, 1], got {p!r}")
    return AlphaPair(float(p), 1.0)


def alpha_from_population_ratio(pop_small: float, pop_large: float) -> AlphaPair:
    """Coefficients between two institutions with catchments of different size.

    ``forward`` is the pressure of the small-catchment institution on the
    large one, ``pop_small / pop_large``; ``backward`` is its complement,
    the pressure of the large-catchment institution on the small one.
    """
    if pop_small <= 0 or pop_large <= 0:
        raise ValueError(f"population counts must be positive, got {pop_small!r} and {pop_large!r}")
    if pop_small > pop_large:
        raise ValueError(f"pop_small ({pop_small!r}) exceeds pop_large ({pop_large!r}); coefficient would exceed 1")
    forward = pop_small / pop_large
    return AlphaPair(forward, 1.0 - forward)


def capacities_from_equilibrium(alpha, N_star) -> np.ndarray:
    """Carrying capacities that make ``N_star`` a fixed point: ``K = alpha @ N_star``."""
    A = np.asarray(alpha, dtype=float)
    N = np.asarray(N_star, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or N.shape != (A.shape[0],):
        raise DimensionError(f"alpha shape {A.shape} incompatible with N_star shape {N.shape}")
    if not np.all(np.diag(A) == 1.0):
        raise ModelError("alpha diagonal must be 1")
    if np.any(A < 0):
        raise ModelError("alpha entries must be nonnegative")
    if np.any(N <= 0):
        raise ValueError(f"equilibrium populations must all be positive, got {N.tolist()}")
    return A @ N
