"""Qubit-grid sweeps: many walks from one envelope, averaged observables.

All walks in a sweep share the evolution operator; only the initial coin
state differs.  Evolution is linear, so every walk is a fixed combination
of just two basis walks (spin-up start and spin-down start over the same
envelope):

    a_i(j,t) = c_i * a_up(j,t) + s_i * a_down(j,t)      c_i = cos(alpha_i/2)
    b_i(j,t) = c_i * b_up(j,t) + s_i * b_down(j,t)      s_i = e^{i beta_i} sin(alpha_i/2)

Every per-qubit observable used here (norm, position moments, reduced
coin entries) is a quadratic form in the amplitudes, so it reduces to a
handful of lattice sums over the basis walks combined with per-qubit
coefficients.  The default "linear" method exploits this and costs two
walks regardless of grid size; the "direct" method really runs one walk
per qubit and exists as the independent cross-check and for workloads
where per-qubit states are needed.  Both reduce in a fixed order, so
results are bitwise reproducible and independent of the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (
    InitialStateSpec,
    LatticeWindow,
    QubitParams,
    WalkState,
    build_initial_state,
)
from .evolution import EvolutionPlan, evolve, prepared, step
from .observables import (
    PositionDistribution,
    dispersion,
    distribution,
    entanglement_entropy,
    entropy_bits_vec,
    reduced_coin,
)

__all__ = [
    "QubitGrid",
    "WalkRecord",
    "EnsembleResult",
    "make_qubit_grid",
    "run_walk",
    "run_ensemble",
    "fit_dispersion_slope",
    "moving_average",
]

# Fixed block size for the direct method's reduction tree; independent of
# the worker count so that sums associate identically however work is split.
_BLOCK = 64


@dataclass(frozen=True)
class QubitGrid:
    """Bloch-angle grid ``(i*alpha_step, k*beta_step)`` within range.

    Includes every multiple of the step that does not exceed pi
    (resp. 2*pi), endpoint included when it lands exactly.  Ordering is
    alpha-major and fixed; averaging and reduction follow it.
    """

    alpha_step: float
    beta_step: float
    qubits: tuple[QubitParams, ...]

    def __len__(self) -> int:
        return len(self.qubits)


def make_qubit_grid(alpha_step: float, beta_step: float) -> QubitGrid:
    """Grid of initial qubits; step 0.1 on both angles yields 2016 points."""
    if not (math.isfinite(alpha_step) and alpha_step > 0.0):
        raise ValueError(f"alpha_step must be positive, got {alpha_step}")
    if not (math.isfinite(beta_step) and beta_step > 0.0):
        raise ValueError(f"beta_step must be positive, got {beta_step}")
    alphas = _step_multiples(alpha_step, math.pi)
    betas = _step_multiples(beta_step, 2.0 * math.pi)
    qubits = tuple(QubitParams(a, b) for a in alphas for b in betas)
    return QubitGrid(alpha_step, beta_step, qubits)


def _step_multiples(step: float, bound: float) -> list[float]:
    # i*step (not cumulative addition) so grid points are reproducible
    values = []
    i = 0
    while i * step <= bound:
        values.append(i * step)
        i += 1
    return values


@dataclass
class WalkRecord:
    """Per-step observables of one walk plus its final state."""

    qubit: QubitParams
    times: np.ndarray
    sigma: np.ndarray
    entropy: np.ndarray
    norm: np.ndarray
    final_state: WalkState

    def final_distribution(self) -> PositionDistribution:
        return distribution(self.final_state)


def run_walk(qubit: QubitParams, init: InitialStateSpec, plan: EvolutionPlan) -> WalkRecord:
    """Evolve one walk, recording dispersion, entropy and norm over time."""
    state = prepared(build_initial_state(qubit, init), plan)
    times: list[int] = []
    sigmas: list[float] = []
    entropies: list[float] = []
    norms: list[float] = []

    def record(t: int, s: WalkState) -> None:
        dist = distribution(s)
        times.append(t)
        sigmas.append(dispersion(dist))
        entropies.append(entanglement_entropy(reduced_coin(s)).entropy)
        norms.append(dist.total())

    final = evolve(state, plan, observer=record)
    return WalkRecord(
        qubit=qubit,
        times=np.asarray(times, dtype=np.int64),
        sigma=np.asarray(sigmas),
        entropy=np.asarray(entropies),
        norm=np.asarray(norms),
        final_state=final,
    )


@dataclass
class EnsembleResult:
    """Grid-averaged observables.

    ``mean_dispersion`` and ``mean_entropy`` are arithmetic means of the
    per-qubit series (the dispersion of each walk is averaged, not the
    dispersion of the averaged distribution).  ``mean_distribution`` is
    the averaged spin-resolved probability field at the final step.
    ``slope`` is the least-squares slope of ``mean_dispersion`` over
    ``fit_window``.
    """

    times: np.ndarray
    mean_dispersion: np.ndarray
    mean_entropy: np.ndarray
    mean_distribution: PositionDistribution
    slope: float
    qubit_count: int
    fit_window: tuple[int, int]
    norm_deficit: float


def run_ensemble(
    grid: QubitGrid,
    init: InitialStateSpec,
    plan: EvolutionPlan,
    *,
    fit_window: tuple[int, int] | None = None,
    method: str = "linear",
    workers: int | None = None,
) -> EnsembleResult:
    """Run every qubit of ``grid`` and average the observables.

    ``method="linear"`` (default) evolves two basis walks and combines
    them per qubit; ``method="direct"`` evolves each qubit separately,
    optionally across ``workers`` processes.  Output is deterministic and
    independent of ``workers`` for both methods.
    """
    if len(grid) == 0:
        raise ValueError("qubit grid is empty")
    if fit_window is None:
        fit_window = (max(0, plan.steps - 2000), plan.steps)
    if method == "linear":
        times, mean_sigma, mean_entropy, mean_dist = _run_linear(grid, init, plan)
    elif method == "direct":
        times, mean_sigma, mean_entropy, mean_dist = _run_direct(grid, init, plan, workers)
    else:
        raise ValueError(f"unknown ensemble method {method!r}")
    slope = fit_dispersion_slope(times, mean_sigma, fit_window)
    return EnsembleResult(
        times=times,
        mean_dispersion=mean_sigma,
        mean_entropy=mean_entropy,
        mean_distribution=mean_dist,
        slope=slope,
        qubit_count=len(grid),
        fit_window=fit_window,
        norm_deficit=init.norm_deficit(),
    )


def _basis_pair(init: InitialStateSpec, plan: EvolutionPlan) -> tuple[WalkState, WalkState]:
    lo, hi = init.support()
    window = _shared_window((lo, hi), plan)
    f = init.envelope()
    up_start = WalkState.zero(window)
    up_start.up[window.index(lo) : window.index(lo) + f.size] = f
    down_start = WalkState.zero(window)
    down_start.down[window.index(lo) : window.index(lo) + f.size] = f
    return up_start, down_start


def _shared_window(support: tuple[int, int], plan: EvolutionPlan) -> LatticeWindow:
    # Window big enough for both basis walks over the whole run; the
    # defect clipping from reachable_window applies to both identically.
    from .evolution import reachable_window

    return reachable_window(support, plan.coin, plan.steps)


def _qubit_coefficients(grid: QubitGrid) -> tuple[np.ndarray, np.ndarray]:
    alphas = np.array([q.alpha for q in grid.qubits])
    betas = np.array([q.beta for q in grid.qubits])
    c = np.cos(0.5 * alphas)
    s = np.exp(1j * betas) * np.sin(0.5 * alphas)
    return c, s


def _run_linear(grid: QubitGrid, init: InitialStateSpec, plan: EvolutionPlan):
    c, s = _qubit_coefficients(grid)
    w_uu = c * c                 # weight of the up-basis walk
    w_dd = (s * s.conj()).real   # weight of the down-basis walk
    w_ud = c * s.conj()          # cross weight (complex)
    cs = c * s

    up_walk, down_walk = _basis_pair(init, plan)
    sites = up_walk.window.sites().astype(np.float64)
    sites_sq = sites * sites

    times = plan.record_times()
    mean_sigma = np.empty(times.size)
    mean_entropy = np.empty(times.size)
    slot = 0

    def record(t: int, pair: tuple[WalkState, WalkState]) -> None:
        nonlocal slot
        su, sd = pair
        au, bu, ad, bd = su.up, su.down, sd.up, sd.down
        k_uu = au.real**2 + au.imag**2 + bu.real**2 + bu.imag**2
        k_dd = ad.real**2 + ad.imag**2 + bd.real**2 + bd.imag**2
        k_ud = au * ad.conj() + bu * bd.conj()

        def form(kern_uu, kern_dd, kern_ud) -> np.ndarray:
            return (
                w_uu * kern_uu
                + w_dd * kern_dd
                + 2.0 * (w_ud * kern_ud).real
            )

        norm = form(np.sum(k_uu), np.sum(k_dd), np.sum(k_ud))
        m1 = form(np.dot(k_uu, sites), np.dot(k_dd, sites), np.dot(k_ud, sites)) / norm
        m2 = form(np.dot(k_uu, sites_sq), np.dot(k_dd, sites_sq), np.dot(k_ud, sites_sq)) / norm
        mean_sigma[slot] = float(np.mean(np.sqrt(np.maximum(m2 - m1 * m1, 0.0))))

        # reduced coin entries per qubit
        a_uu = float(np.vdot(au, au).real)
        a_dd = float(np.vdot(ad, ad).real)
        a_ud = complex(np.vdot(ad, au))  # sum a_up conj(a_down)
        up_weight = w_uu * a_uu + w_dd * a_dd + 2.0 * (w_ud * a_ud).real

        t_uu = complex(np.vdot(bu, au))  # sum a_up conj(b_up)
        t_ud = complex(np.vdot(bd, au))  # sum a_up conj(b_down)
        t_du = complex(np.vdot(bu, ad))  # sum a_down conj(b_up)
        t_dd = complex(np.vdot(bd, ad))  # sum a_down conj(b_down)
        coherence = w_uu * t_uu + w_ud * t_ud + cs * t_du + w_dd * t_dd
        coherence_sq = coherence.real**2 + coherence.imag**2
        mean_entropy[slot] = float(np.mean(entropy_bits_vec(up_weight, coherence_sq, norm)))
        slot += 1

    record(0, (up_walk, down_walk))
    for k in range(1, plan.steps + 1):
        up_walk = step(up_walk, plan.coin)
        down_walk = step(down_walk, plan.coin)
        if k % plan.record_every == 0 or k == plan.steps:
            record(k, (up_walk, down_walk))
    assert slot == times.size

    mean_dist = _combined_distribution(grid, up_walk, down_walk, w_uu, w_dd, w_ud)
    return times, mean_sigma, mean_entropy, mean_dist


def _combined_distribution(
    grid: QubitGrid,
    up_walk: WalkState,
    down_walk: WalkState,
    w_uu: np.ndarray,
    w_dd: np.ndarray,
    w_ud: np.ndarray,
) -> PositionDistribution:
    au, bu, ad, bd = up_walk.up, up_walk.down, down_walk.up, down_walk.down
    m_uu = float(np.mean(w_uu))
    m_dd = float(np.mean(w_dd))
    m_ud = complex(np.mean(w_ud))
    p_up = (
        m_uu * (au.real**2 + au.imag**2)
        + m_dd * (ad.real**2 + ad.imag**2)
        + 2.0 * (m_ud * (au * ad.conj())).real
    )
    p_down = (
        m_uu * (bu.real**2 + bu.imag**2)
        + m_dd * (bd.real**2 + bd.imag**2)
        + 2.0 * (m_ud * (bu * bd.conj())).real
    )
    return PositionDistribution(up_walk.window, p_up, p_down, p_up + p_down)


def _run_direct(
    grid: QubitGrid,
    init: InitialStateSpec,
    plan: EvolutionPlan,
    workers: int | None,
):
    blocks = [grid.qubits[i : i + _BLOCK] for i in range(0, len(grid), _BLOCK)]
    args = [(block, init, plan) for block in blocks]
    if workers is None:
        workers = os.cpu_count() or 1
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_direct_block, args))
    else:
        partials = [_direct_block(a) for a in args]

    times = partials[0][0]
    sum_sigma = np.zeros_like(partials[0][1])
    sum_entropy = np.zeros_like(sum_sigma)
    window = partials[0][3]
    sum_up = np.zeros(window.size)
    sum_down = np.zeros(window.size)
    # block order is the qubit order; summation stays associatively fixed
    for _, sig, ent, _, p_up, p_down in partials:
        sum_sigma += sig
        sum_entropy += ent
        sum_up += p_up
        sum_down += p_down
    n = float(len(grid))
    p_up = sum_up / n
    p_down = sum_down / n
    mean_dist = PositionDistribution(window, p_up, p_down, p_up + p_down)
    return times, sum_sigma / n, sum_entropy / n, mean_dist


def _direct_block(args):
    block, init, plan = args
    times = None
    sum_sigma = None
    sum_entropy = None
    window = _shared_window(init.support(), plan)
    sum_up = np.zeros(window.size)
    sum_down = np.zeros(window.size)
    for qubit in block:
        try:
            record = run_walk(qubit, init, plan)
        except Exception as exc:  # identify the offending qubit before aborting
            raise RuntimeError(
                f"walk failed for qubit (alpha={qubit.alpha}, beta={qubit.beta}): {exc}"
            ) from exc
        if times is None:
            times = record.times
            sum_sigma = np.zeros_like(record.sigma)
            sum_entropy = np.zeros_like(record.entropy)
        sum_sigma += record.sigma
        sum_entropy += record.entropy
        dist = record.final_distribution()
        lo = window.index(record.final_state.window.j_min)
        sum_up[lo : lo + dist.p_up.size] += dist.p_up
        sum_down[lo : lo + dist.p_down.size] += dist.p_down
    return times, sum_sigma, sum_entropy, window, sum_up, sum_down


def fit_dispersion_slope(
    times: np.ndarray,
    values: np.ndarray,
    fit_window: tuple[int, int],
) -> float:
    """Ordinary least-squares slope of ``values`` vs ``times`` in a window.

    ``fit_window`` is inclusive on both ends and must lie within the
    recorded time range and select at least two distinct times.
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if times.shape != values.shape:
        raise ValueError("times and values must have matching shapes")
    start, end = fit_window
    if start > end:
        raise ValueError(f"degenerate fit window [{start}, {end}]")
    if times.size == 0 or start < times.min() or end > times.max():
        raise ValueError(
            f"fit window [{start}, {end}] outside recorded range "
            f"[{times.min() if times.size else 'nan'}, {times.max() if times.size else 'nan'}]"
        )
    mask = (times >= start) & (times <= end)
    t = times[mask]
    y = values[mask]
    if t.size < 2 or t.min() == t.max():
        raise ValueError(f"fit window [{start}, {end}] selects fewer than two distinct times")
    t_centered = t - t.mean()
    return float(np.dot(t_centered, y) / np.dot(t_centered, t_centered))


def moving_average(values: np.ndarray, width: int) -> np.ndarray:
    """Simple moving average, ``len(values) - width + 1`` points."""
    if width < 1 or width > len(values):
        raise ValueError(f"window width {width} invalid for {len(values)} samples")
    kernel = np.full(width, 1.0 / width)
    return np.convolve(np.asarray(values, dtype=np.float64), kernel, mode="valid")
