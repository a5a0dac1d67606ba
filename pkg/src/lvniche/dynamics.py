"""Fixed-step integration of the competition system."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from lvniche.model import CompetitionModel, PopulationState, _populations, growth_rates, validate_model

logger = logging.getLogger(__name__)

METHODS = ("euler", "rk4")

# reporting predicates, in students; they never alter a state
EXTINCT_BELOW = 1e-3
SURVIVES_AT = 1.0


@dataclass(frozen=True)
class SimulationProtocol:
    method: str = "euler"
    step: float = 0.01
    steps: int = 1500
    record_every: int = 1

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step!r}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be an integer >= 1, got {self.steps!r}")
        if int(self.record_every) != self.record_every or not 1 <= self.record_every <= self.steps:
            raise ValueError(f"record_every must be an integer in [1, steps], got {self.record_every!r}")


@dataclass(frozen=True)
class Trajectory:
    """Recorded samples of one run.

    ``clamps`` lists ``(step_index, species_index)`` for every update that
    overshot below zero and was clamped.
    """

    t: np.ndarray
    N: np.ndarray
    clamps: tuple[tuple[int, int], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, k: int) -> PopulationState:
        return PopulationState(self.N[k], self.t[k])

    @property
    def initial(self) -> PopulationState:
        return self[0]

    @property
    def final(self) -> PopulationState:
        return self[-1]


def _euler_raw(model: CompetitionModel, N: np.ndarray, h: float) -> np.ndarray:
    return N + h * growth_rates(model, N)


def _rk4_raw(model: CompetitionModel, N: np.ndarray, h: float) -> np.ndarray:
    k1 = growth_rates(model, N)
    k2 = growth_rates(model, N + 0.5 * h * k1)
    k3 = growth_rates(model, N + 0.5 * h * k2)
    k4 = growth_rates(model, N + h * k3)
    return N + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_RAW = {"euler": _euler_raw, "rk4": _rk4_raw}


def _check_h(h: float) -> None:
    if not h > 0:
        raise ValueError(f"step must be > 0, got {h!r}")


def step_euler(model: CompetitionModel, state: PopulationState, h: float) -> PopulationState:
    """One explicit Euler step, negative overshoot clamped to zero."""
    _check_h(h)
    N = _populations(model, state)
    return PopulationState(np.maximum(_euler_raw(model, N, h), 0.0), state.t + h)


def step_rk4(model: CompetitionModel, state: PopulationState, h: float) -> PopulationState:
    """One classical Runge-Kutta step, clamped like :func:`step_euler`."""
    _check_h(h)
    N = _populations(model, state)
    return PopulationState(np.maximum(_rk4_raw(model, N, h), 0.0), state.t + h)


def simulate(model: CompetitionModel, initial: PopulationState, protocol: SimulationProtocol) -> Trajectory:
    """Apply the protocol's stepper ``protocol.steps`` times from ``initial``.

    Every ``record_every``-th state is kept, as well as the initial and the
    final state.  Times are ``k * step`` (not accumulated sums) so the last
    sample sits exactly at ``steps * step`` relative to the initial time.
    """
    validate_model(model)
    N = _populations(model, initial).copy()
    if np.any(N < 0):
        raise ValueError(f"initial populations must be nonnegative, got {N.tolist()}")
    advance = _RAW[protocol.method]
    h = protocol.step
    every = protocol.record_every

    idx = list(range(0, protocol.steps + 1, every))
    if idx[-1] != protocol.steps:
        idx.append(protocol.steps)
    out = np.empty((len(idx), model.n))
    out[0] = N
    row = 1
    clamps: list[tuple[int, int]] = []
    for k in range(1, protocol.steps + 1):
        N = advance(model, N, h)
        if np.any(N < 0):
            for i in np.flatnonzero(N < 0):
                clamps.append((k, int(i)))
            N = np.maximum(N, 0.0)
        if row < len(idx) and idx[row] == k:
            out[row] = N
            row += 1
    if clamps:
        logger.info("clamped %d negative overshoots to zero", len(clamps))
    t = initial.t + h * np.asarray(idx, dtype=float)
    t.setflags(write=False)
    out.setflags(write=False)
    return Trajectory(t, out, tuple(clamps))


def detect_settled(trajectory: Trajectory, tol: float = 1e-6, window: int = 10) -> PopulationState | None:
    """Final state if the last ``window`` samples agree to ``tol``, else None.

    The change of each component is its spread (max - min) over the window,
    divided by its final magnitude floored at the extinction threshold so
    that species decaying to zero do not blow up the ratio.
    """
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    if window > len(trajectory):
        raise ValueError(f"window of {window} samples exceeds the {len(trajectory)} recorded")
    tail = trajectory.N[-window:]
    spread = tail.max(axis=0) - tail.min(axis=0)
    scale = np.maximum(np.abs(tail[-1]), EXTINCT_BELOW)
    if np.max(spread / scale) <= tol:
        return trajectory.final
    return None


def extinct(state: PopulationState) -> np.ndarray:
    return state.N < EXTINCT_BELOW


def survives(state: PopulationState) -> np.ndarray:
    return state.N >= SURVIVES_AT
