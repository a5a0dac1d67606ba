"""Parameterization and vector field of the n-species competitive Lotka-Volterra system.

    dN_i/dt = r_i N_i (1 - sum_j alpha[i][j] N_j / K_i)

Orientation matters: ``alpha[i][j]`` is the per-capita pressure that species
``j`` exerts on species ``i`` (row = the species being squeezed).  The
diagonal is stored explicitly and must equal 1.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np


class ModelError(ValueError):
    """A CompetitionModel violates one of its invariants."""


class DimensionError(ValueError):
    """Vector or matrix sizes do not agree with the model."""


def _frozen(values, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise DimensionError(f"expected a {ndim}-d array, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CompetitionModel:
    species_names: tuple[str, ...]
    r: np.ndarray
    K: np.ndarray
    alpha: np.ndarray

    def __init__(
        self,
        species_names: Sequence[str],
        r: Sequence[float],
        K: Sequence[float],
        alpha: Sequence[Sequence[float]],
    ) -> None:
        object.__setattr__(self, "species_names", tuple(species_names))
        object.__setattr__(self, "r", _frozen(r, 1))
        object.__setattr__(self, "K", _frozen(K, 1))
        object.__setattr__(self, "alpha", _frozen(alpha, 2))

    @property
    def n(self) -> int:
        return len(self.species_names)

    def replace(self, **changes) -> CompetitionModel:
        fields = {
            "species_names": self.species_names,
            "r": self.r,
            "K": self.K,
            "alpha": self.alpha,
        }
        fields.update(changes)
        return CompetitionModel(**fields)

    def permuted(self, order: Sequence[int]) -> CompetitionModel:
        """Relabel species so that new index ``k`` is old index ``order[k]``."""
        p = np.asarray(order)
        return CompetitionModel(
            [self.species_names[i] for i in p],
            self.r[p],
            self.K[p],
            self.alpha[np.ix_(p, p)],
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompetitionModel):
            return NotImplemented
        return (
            self.species_names == other.species_names
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.K, other.K)
            and np.array_equal(self.alpha, other.alpha)
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class PopulationState:
    """Populations (students) at model time ``t``.

    Entries may be negative only for infeasible equilibria reported by the
    analysis module; simulations never produce them.
    """

    N: np.ndarray
    t: float = 0.0

    def __init__(self, N: Sequence[float], t: float = 0.0) -> None:
        object.__setattr__(self, "N", _frozen(N, 1))
        object.__setattr__(self, "t", float(t))

    def __len__(self) -> int:
        return len(self.N)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PopulationState):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.N, other.N)

    __hash__ = None  # type: ignore[assignment]


def validate_model(model: CompetitionModel) -> CompetitionModel:
    """Return ``model`` unchanged, or raise ModelError naming the first broken invariant."""
    n = model.n
    if n == 0:
        raise ModelError("model has no species")
    if any(not isinstance(s, str) or not s for s in model.species_names):
        raise ModelError("species names must be nonempty strings")
    if len(set(model.species_names)) != n:
        raise ModelError(f"duplicate species names in {list(model.species_names)}")
    if model.r.shape != (n,) or model.K.shape != (n,):
        raise ModelError(
            f"dimension mismatch: {n} species but r has {model.r.size} and K has {model.K.size} entries"
        )
    if model.alpha.shape != (n, n):
        raise ModelError(f"dimension mismatch: alpha has shape {model.alpha.shape}, expected {(n, n)}")
    for name, arr in (("r", model.r), ("K", model.K), ("alpha", model.alpha)):
        if not np.all(np.isfinite(arr)):
            raise ModelError(f"{name} contains non-finite values")
    for i in range(n):
        if model.alpha[i, i] != 1.0:
            raise ModelError(f"diagonal entry alpha[{i}][{i}] = {model.alpha[i, i]!r} != 1")
    neg = np.argwhere(model.alpha < 0)
    if neg.size:
        i, j = neg[0]
        raise ModelError(f"negative competition coefficient alpha[{i}][{j}] = {model.alpha[i, j]!r}")
    for i in range(n):
        if model.r[i] <= 0:
            raise ModelError(f"nonpositive growth rate r[{i}] = {model.r[i]!r}")
    for i in range(n):
        if model.K[i] <= 0:
            raise ModelError(f"nonpositive capacity K[{i}] = {model.K[i]!r}")
    return model


def _populations(model: CompetitionModel, state) -> np.ndarray:
    N = state.N if isinstance(state, PopulationState) else np.asarray(state, dtype=float)
    if N.shape != (model.n,):
        raise DimensionError(f"state has shape {N.shape}, model has {model.n} species")
    return N


def growth_rates(model: CompetitionModel, state: PopulationState | Sequence[float]) -> np.ndarray:
    """Time derivative of every population (students per unit time)."""
    N = _populations(model, state)
    return model.r * N * (1.0 - model.alpha @ N / model.K)


def jacobian(model: CompetitionModel, state: PopulationState | Sequence[float]) -> np.ndarray:
    """Partial derivatives d f_i / d N_j of :func:`growth_rates`."""
    N = _populations(model, state)
    scale = model.r / model.K
    J = -(scale * N)[:, None] * model.alpha
    # diagonal: r_i (1 - (2 N_i + sum_{j != i} alpha_ij N_j) / K_i); alpha_ii = 1
    J[np.diag_indices_from(J)] = model.r - scale * (model.alpha @ N + N)
    return J
