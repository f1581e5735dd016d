"""Time evolution of walk states via the amplitude recurrence.

One step applies the coin at every site and then shifts spin-up amplitude
one site right and spin-down amplitude one site left:

    a(j, t+1) = [a(j-1, t) + b(j-1, t)] / sqrt(2)
    b(j, t+1) = [a(j+1, t) - b(j+1, t)] / sqrt(2)

except where the previous-step site is the NOT defect ``r``, whose
contribution degenerates to a pure swap:

    a(r+1, t+1) = b(r, t)
    b(r-1, t+1) = a(r, t)

The update is double buffered: the t-arrays are read in full before the
t+1 arrays are written, because each output site reads both neighbors.
Amplitude that would cross the window edge raises
:class:`WindowOverflowError` instead of being clipped; clipping would
silently destroy norm conservation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import SQRT1_2, CoinKind, CoinSpec, LatticeWindow, WalkState

__all__ = [
    "WindowOverflowError",
    "EvolutionPlan",
    "reachable_window",
    "prepared",
    "step",
    "evolve",
]

Observer = Callable[[int, WalkState], None]


class WindowOverflowError(RuntimeError):
    """Amplitude reached the window edge; the evolution plan was mis-sized."""


@dataclass(frozen=True)
class EvolutionPlan:
    """How far to run a walk and how often to hand snapshots to observers."""

    coin: CoinSpec
    steps: int
    record_every: int = 1

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")

    def record_times(self) -> np.ndarray:
        """Times at which observers fire: 0, every stride, and the last step."""
        times = list(range(0, self.steps + 1, self.record_every))
        if times[-1] != self.steps:
            times.append(self.steps)
        return np.asarray(times, dtype=np.int64)


def reachable_window(
    support: tuple[int, int],
    coin: CoinSpec,
    steps: int,
) -> LatticeWindow:
    """Smallest window containing every site reachable within ``steps``.

    The light cone grows one site per step on each side.  A NOT defect is a
    perfect chiral mirror, so amplitude starting strictly on one side of it
    never crosses: the window is clipped at the defect site accordingly.
    """
    lo, hi = support
    if lo > hi:
        raise ValueError(f"invalid support [{lo}, {hi}]")
    j_min = lo - steps
    j_max = hi + steps
    if coin.kind is CoinKind.HADAMARD_WITH_NOT_DEFECT:
        r = coin.defect_site
        assert r is not None
        if r <= lo:
            j_min = max(j_min, r)
        if r >= hi:
            j_max = min(j_max, r)
    return LatticeWindow(j_min, j_max)


def prepared(state: WalkState, plan: EvolutionPlan) -> WalkState:
    """State re-embedded into a window sized for the whole plan.

    Returns ``state`` unchanged when its window already covers the
    reachable sites.  A zero state needs no room and is returned as is.
    """
    support = state.support()
    if support is None:
        return state
    needed = reachable_window(support, plan.coin, plan.steps)
    if state.window.contains(needed):
        return state
    merged = LatticeWindow(
        min(needed.j_min, state.window.j_min),
        max(needed.j_max, state.window.j_max),
    )
    return state.embedded(merged)


def step(state: WalkState, coin: CoinSpec) -> WalkState:
    """Advance one time step; returns a new state at ``t + 1``."""
    up, down = state.up, state.down

    # Coin layer: Hadamard everywhere, then overwrite the defect site with
    # the swapped amplitudes (the NOT gate touches exactly one site).
    coined_up = (up + down) * SQRT1_2
    coined_down = (up - down) * SQRT1_2
    if coin.kind is CoinKind.HADAMARD_WITH_NOT_DEFECT:
        r = coin.defect_site
        if state.window.contains(r):
            i = r - state.window.j_min
            coined_up[i] = down[i]
            coined_down[i] = up[i]

    if coined_up[-1] != 0.0 or coined_down[0] != 0.0:
        raise WindowOverflowError(
            f"amplitude would leave window [{state.window.j_min}, "
            f"{state.window.j_max}] at t={state.t + 1}; size the window for "
            "the full run (see reachable_window)"
        )

    new_up = np.empty_like(up)
    new_up[0] = 0.0
    new_up[1:] = coined_up[:-1]
    new_down = np.empty_like(down)
    new_down[-1] = 0.0
    new_down[:-1] = coined_down[1:]
    return WalkState(state.window, new_up, new_down, state.t + 1)


def evolve(
    state: WalkState,
    plan: EvolutionPlan,
    observer: Observer | None = None,
) -> WalkState:
    """Apply :func:`step` ``plan.steps`` times.

    The observer receives ``(t, state)`` at t=0, at every
    ``plan.record_every`` steps, and at the final step.  The state passed
    to the observer is a live view and must not be mutated.  The window
    must already be sized for the full run (see :func:`prepared`);
    otherwise the walk fails fast instead of dying mid-run.
    """
    support = state.support()
    if support is not None:
        needed = reachable_window(support, plan.coin, plan.steps)
        if not state.window.contains(needed):
            raise WindowOverflowError(
                f"window [{state.window.j_min}, {state.window.j_max}] cannot hold "
                f"the light cone [{needed.j_min}, {needed.j_max}] of a "
                f"{plan.steps}-step run"
            )
    if observer is not None:
        observer(state.t, state)
    base_t = state.t
    for k in range(1, plan.steps + 1):
        state = step(state, plan.coin)
        if observer is not None and (k % plan.record_every == 0 or k == plan.steps):
            assert state.t == base_t + k
            observer(state.t, state)
    return state
