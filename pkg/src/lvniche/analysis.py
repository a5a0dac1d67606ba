"""Equilibria, stability, regime classification, sensitivities and parameter sweeps."""

from __future__ import annotations

import enum
import itertools
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from lvniche.dynamics import (
    SimulationProtocol,
    Trajectory,
    detect_settled,
    extinct,
    simulate,
    survives,
)
from lvniche.eigen import eigenvalues
from lvniche.model import CompetitionModel, ModelError, PopulationState, jacobian, validate_model

MARGINAL_TOL = 1e-9
MAX_ENUMERATED = 8


class EquilibriumError(ValueError):
    """No usable interior equilibrium (singular or infeasible system)."""


class TwoSpeciesRegime(enum.Enum):
    SPECIES_1_EXCLUDES = "species 1 excludes species 2"
    SPECIES_2_EXCLUDES = "species 2 excludes species 1"
    UNSTABLE_COEXISTENCE = "unstable coexistence (founder control)"
    STABLE_COEXISTENCE = "stable coexistence"


@dataclass(frozen=True)
class EquilibriumReport:
    """One fixed point restricted to ``support`` (0-based indices of survivors).

    ``marginal`` means the leading eigenvalue has a real part within 1e-9 of
    zero; such points are never reported stable.  A ``singular`` entry has no
    unique solution on its support, its state is NaN and it is neither
    feasible nor stable.
    """

    support: tuple[int, ...]
    state: PopulationState
    eigenvalues: np.ndarray
    feasible: bool
    stable: bool
    marginal: bool = False
    singular: bool = False


@dataclass(frozen=True)
class SensitivityReport:
    """Derivatives of the interior equilibrium.

    ``dN_dK[i, j]`` is dN_i*/dK_j and ``dN_dalpha[i, j, k]`` is
    dN_i*/d alpha[j][k].
    """

    dN_dK: np.ndarray
    dN_dalpha: np.ndarray
    base_equilibrium: PopulationState


# ---------------------------------------------------------------- parameters

_PATH_RE = re.compile(r"^\s*(K|r|alpha)\s*\[\s*(\d+)\s*\](?:\s*\[\s*(\d+)\s*\])?\s*$")


@dataclass(frozen=True)
class ParamPath:
    """A single model parameter, 0-based: ``K[i]``, ``r[i]`` or ``alpha[i][j]``.

    :meth:`parse` reads the 1-based notation used for
    subscripts like alpha_21, so ``ParamPath.parse("alpha[2][1]") == ParamPath("alpha", 1, 0)``.
    """

    name: str
    i: int
    j: int | None = None

    @classmethod
    def parse(cls, text: str) -> ParamPath:
        m = _PATH_RE.match(text)
        if not m:
            raise ValueError(f"invalid parameter path {text!r}; expected K[i], r[i] or alpha[i][j]")
        name, i, j = m.group(1), int(m.group(2)), m.group(3)
        if name == "alpha" and j is None:
            raise ValueError(f"{text!r}: alpha needs two indices")
        if name != "alpha" and j is not None:
            raise ValueError(f"{text!r}: {name} takes a single index")
        if i < 1 or (j is not None and int(j) < 1):
            raise ValueError(f"{text!r}: indices are 1-based")
        return cls(name, i - 1, None if j is None else int(j) - 1)

    def __str__(self) -> str:
        if self.j is None:
            return f"{self.name}[{self.i + 1}]"
        return f"{self.name}[{self.i + 1}][{self.j + 1}]"

    def check(self, model: CompetitionModel) -> None:
        n = model.n
        if not 0 <= self.i < n or (self.j is not None and not 0 <= self.j < n):
            raise ValueError(f"parameter {self} out of range for {n} species")
        if self.name == "alpha" and self.i == self.j:
            raise ValueError(f"parameter {self} is a diagonal entry, fixed at 1")

    def get(self, model: CompetitionModel) -> float:
        self.check(model)
        if self.name == "alpha":
            return float(model.alpha[self.i, self.j])
        return float(getattr(model, self.name)[self.i])

    def set(self, model: CompetitionModel, value: float) -> CompetitionModel:
        self.check(model)
        if self.name == "alpha":
            alpha = model.alpha.copy()
            alpha[self.i, self.j] = value
            return model.replace(alpha=alpha)
        arr = getattr(model, self.name).copy()
        arr[self.i] = value
        return model.replace(**{self.name: arr})


def _as_path(param: ParamPath | str) -> ParamPath:
    return param if isinstance(param, ParamPath) else ParamPath.parse(param)


# ---------------------------------------------------------------- equilibria


def _solve_support(model: CompetitionModel, support: Sequence[int]) -> np.ndarray | None:
    N = np.zeros(model.n)
    if not support:
        return N
    s = list(support)
    A = model.alpha[np.ix_(s, s)]
    try:
        sol = np.linalg.solve(A, model.K[s])
    except np.linalg.LinAlgError:
        return None
    if np.linalg.cond(A) > 1e12:
        return None
    N[s] = sol
    return N


def _interior(model: CompetitionModel) -> np.ndarray:
    validate_model(model)
    N = _solve_support(model, range(model.n))
    if N is None:
        raise EquilibriumError("competition matrix is singular; no unique interior equilibrium")
    if np.any(N <= 0):
        raise EquilibriumError(f"interior equilibrium {N.tolist()} is infeasible (nonpositive component)")
    return N


def interior_equilibrium(model: CompetitionModel) -> PopulationState | None:
    """Solve ``alpha @ N = K``; None when the system is singular or the solution is not all-positive.

    Use :func:`interior_equilibrium_or_raise` to learn which.
    """
    try:
        return PopulationState(_interior(model))
    except EquilibriumError:
        return None


def interior_equilibrium_or_raise(model: CompetitionModel) -> PopulationState:
    return PopulationState(_interior(model))


def _report(model: CompetitionModel, support: tuple[int, ...]) -> EquilibriumReport:
    N = _solve_support(model, support)
    if N is None:
        nan = np.full(model.n, np.nan)
        return EquilibriumReport(
            support, PopulationState(nan), np.full(model.n, np.nan, dtype=complex),
            feasible=False, stable=False, singular=True,
        )
    feasible = bool(np.all(N[list(support)] > 0)) if support else True
    ev = eigenvalues(jacobian(model, N))
    lead = float(np.max(ev.real))
    marginal = abs(lead) <= MARGINAL_TOL
    stable = feasible and lead < -MARGINAL_TOL
    return EquilibriumReport(support, PopulationState(N), ev, feasible, stable, marginal)


def enumerate_equilibria(model: CompetitionModel) -> list[EquilibriumReport]:
    """One report per support subset, ordered by support size then lexicographically."""
    validate_model(model)
    n = model.n
    if n > MAX_ENUMERATED:
        raise ValueError(f"enumeration is limited to {MAX_ENUMERATED} species, got {n}")
    supports = [c for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    return [_report(model, s) for s in supports]


def classify_two_species(model: CompetitionModel) -> TwoSpeciesRegime:
    validate_model(model)
    if model.n != 2:
        raise ValueError(f"two-species classifier needs n = 2, got {model.n}")
    K1, K2 = model.K
    a12, a21 = model.alpha[0, 1], model.alpha[1, 0]
    if K1 == a12 * K2:
        raise ValueError(f"degenerate model: K1 = alpha12*K2 = {K1!r}")
    if K2 == a21 * K1:
        raise ValueError(f"degenerate model: K2 = alpha21*K1 = {K2!r}")
    one_invadable = K1 > a12 * K2  # species 1 can grow when rare against species 2 at K2
    two_invadable = K2 > a21 * K1
    if one_invadable and two_invadable:
        return TwoSpeciesRegime.STABLE_COEXISTENCE
    if not one_invadable and not two_invadable:
        return TwoSpeciesRegime.UNSTABLE_COEXISTENCE
    if one_invadable:
        return TwoSpeciesRegime.SPECIES_1_EXCLUDES
    return TwoSpeciesRegime.SPECIES_2_EXCLUDES


def invasion_growth_rate(model: CompetitionModel, resident: EquilibriumReport, invader: int) -> float:
    """Per-capita growth of a vanishingly rare ``invader`` at the resident equilibrium."""
    if invader in resident.support:
        raise ValueError(f"species {invader} is part of the resident community {resident.support}")
    N = resident.state.N
    return float(model.r[invader] * (1.0 - model.alpha[invader] @ N / model.K[invader]))


# ---------------------------------------------------------------- sensitivity


def sensitivity_matrix(model: CompetitionModel) -> SensitivityReport:
    N = _interior(model)
    inv = np.linalg.inv(model.alpha)
    # d/d alpha[j][k] of (A N = K): A dN = -E_jk N  =>  dN_i = -inv[i, j] N_k
    dN_dalpha = -inv[:, :, None] * N[None, None, :]
    return SensitivityReport(inv, dN_dalpha, PopulationState(N))


def perturbed_equilibrium(
    model: CompetitionModel, param: ParamPath | str, relative_change: float
) -> PopulationState:
    """Exact interior equilibrium after scaling one parameter by ``1 + relative_change``."""
    path = _as_path(param)
    if path.name == "r":
        raise ValueError("growth rates do not move equilibria; choose K[i] or alpha[i][j]")
    new = path.set(model, path.get(model) * (1.0 + relative_change))
    try:
        validate_model(new)
    except ModelError as exc:
        raise EquilibriumError(f"perturbed model is invalid: {exc}") from exc
    return PopulationState(_interior(new))


def linearized_percent_for_target(
    model: CompetitionModel, param: ParamPath | str, species: int, delta_N: float
) -> float:
    """First-order estimate of the percent change needed for ``delta_N`` more students."""
    path = _as_path(param)
    rep = sensitivity_matrix(model)
    if path.name == "K":
        d = rep.dN_dK[species, path.i]
    elif path.name == "alpha":
        d = rep.dN_dalpha[species, path.i, path.j]
    else:
        raise ValueError("growth rates do not move equilibria")
    slope = d * path.get(model)  # dN / d(relative change)
    if slope == 0:
        raise EquilibriumError(f"{species} does not respond to {path} to first order")
    return 100.0 * delta_N / slope


def percent_change_for_target(
    model: CompetitionModel,
    param: ParamPath | str,
    species: int,
    delta_N: float,
    *,
    max_relative_change: float = 100.0,
) -> float:
    """Smallest-magnitude signed percent change of ``param`` that lifts
    ``N*[species]`` to at least its base value plus ``delta_N``.

    Solved by re-solving the equilibrium exactly along the parameter, not by
    linearization.  Raises EquilibriumError when no change within the
    admissible range (parameter stays positive, or nonnegative for alpha,
    and the equilibrium stays feasible) reaches the target.
    """
    path = _as_path(param)
    if path.name == "r":
        raise ValueError("growth rates do not move equilibria; choose K[i] or alpha[i][j]")
    base = _interior(model)[species]
    if delta_N <= 0:
        return 0.0
    target = base + delta_N
    value = path.get(model)
    if value == 0:
        raise EquilibriumError(f"{path} is zero; relative changes cannot move it")

    def gap(x: float) -> float:
        new = path.set(model, value * (1.0 + x))
        return float(_interior(new)[species] - target)

    lower = -1.0 if path.name == "alpha" else -1.0 + 1e-12
    best: float | None = None
    for sign in (1.0, -1.0):
        prev = 0.0
        x = sign * 1e-4
        while True:
            if sign < 0 and x < lower:
                x = lower
            try:
                g = gap(x)
            except EquilibriumError:
                break
            if g >= 0:
                root = brentq(gap, min(prev, x), max(prev, x), xtol=1e-15, rtol=1e-14)
                # step to the admissible side of the root
                if gap(root) < 0:
                    root = np.nextafter(root, x)
                if best is None or abs(root) < abs(best):
                    best = root
                break
            if x == lower or abs(x) >= max_relative_change:
                break
            prev, x = x, 2.0 * x
    if best is None:
        raise EquilibriumError(
            f"target N*[{species}] >= {target:.6g} is unreachable by changing {path} alone"
        )
    return 100.0 * float(best)


# ---------------------------------------------------------------- sweeps


@dataclass(frozen=True)
class SweepRow:
    value: float
    final: PopulationState
    settled: bool
    extinct: tuple[bool, ...]
    survives: tuple[bool, ...]


def sweep(
    model: CompetitionModel,
    param: ParamPath | str,
    values: Iterable[float],
    initial: PopulationState,
    protocol: SimulationProtocol,
    *,
    settle_tol: float = 1e-6,
    settle_window: int = 10,
) -> list[SweepRow]:
    """Simulate once per parameter value; rows follow the order of ``values``."""
    path = _as_path(param)
    path.check(model)
    rows = []
    for v in values:
        m = validate_model(path.set(model, float(v)))
        traj = simulate(m, initial, protocol)
        rows.append(_row(float(v), traj, settle_tol, settle_window))
    return rows


def _row(value: float, traj: Trajectory, tol: float, window: int) -> SweepRow:
    final = traj.final
    settled = len(traj) >= window and detect_settled(traj, tol, window) is not None
    return SweepRow(
        value,
        final,
        settled,
        tuple(bool(b) for b in extinct(final)),
        tuple(bool(b) for b in survives(final)),
    )


def survival_threshold(model: CompetitionModel, resident: EquilibriumReport, invader: int) -> float:
    """Capacity of ``invader`` at which its invasion growth rate crosses zero."""
    if invader in resident.support:
        raise ValueError(f"species {invader} is part of the resident community {resident.support}")
    return float(model.alpha[invader] @ resident.state.N)
