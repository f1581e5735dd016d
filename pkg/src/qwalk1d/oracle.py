"""Dense-matrix reference walk for small lattices.

Builds the one-step operator as an explicit ``2M x 2M`` unitary acting on
``|spin> (x) |site>`` (spin-major: up block first) and evolves by repeated
matrix-vector products.  This is the correctness oracle for the recurrence
engine; it is deliberately simple and capped at 256 sites.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import CoinKind, CoinSpec, LatticeWindow, WalkState, coin_matrix

__all__ = [
    "Boundary",
    "DenseWalkOperator",
    "build_dense_operator",
    "dense_evolve",
    "state_to_vector",
    "vector_to_state",
]

MAX_SITES = 256


class Boundary(enum.Enum):
    RING = "ring"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class DenseWalkOperator:
    """One-step walk operator on ``sites`` lattice points (indices 0..M-1)."""

    sites: int
    coin: CoinSpec
    boundary: Boundary
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return 2 * self.sites


def build_dense_operator(
    sites: int,
    coin: CoinSpec,
    boundary: Boundary = Boundary.RING,
) -> DenseWalkOperator:
    """Shift-after-coin operator; ring wraps shifts, bounded drops them.

    With the ring boundary the operator is exactly unitary.  The bounded
    variant loses amplitude at the edges and is only valid while the light
    cone stays inside; it exists to cross-check windowed evolutions.
    The defect site of a defect coin is a lattice index in ``0..sites-1``.
    """
    if sites < 3:
        raise ValueError(f"need at least 3 sites, got {sites}")
    if sites > MAX_SITES:
        raise ValueError(f"dense oracle capped at {MAX_SITES} sites, got {sites}")
    if coin.kind is CoinKind.HADAMARD_WITH_NOT_DEFECT:
        if not 0 <= coin.defect_site < sites:
            raise ValueError(
                f"defect site {coin.defect_site} outside lattice 0..{sites - 1}"
            )
    m = sites
    u = np.zeros((2 * m, 2 * m), dtype=np.complex128)
    for j in range(m):
        c = coin_matrix(coin, j)
        for spin_in in (0, 1):
            col = spin_in * m + j
            up_dest = (j + 1) % m
            if boundary is Boundary.RING or j + 1 < m:
                u[up_dest, col] += c[0, spin_in]
            down_dest = (j - 1) % m
            if boundary is Boundary.RING or j - 1 >= 0:
                u[m + down_dest, col] += c[1, spin_in]
    return DenseWalkOperator(sites=m, coin=coin, boundary=boundary, matrix=u)


def dense_evolve(op: DenseWalkOperator, vector: np.ndarray, steps: int) -> np.ndarray:
    """Apply the operator ``steps`` times (``steps=0`` returns a copy)."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    v = np.asarray(vector, dtype=np.complex128)
    if v.shape != (op.dimension,):
        raise ValueError(f"vector must have shape ({op.dimension},), got {v.shape}")
    v = v.copy()
    for _ in range(steps):
        v = op.matrix @ v
    return v


def state_to_vector(state: WalkState, sites: int, offset: int) -> np.ndarray:
    """Flatten a windowed state onto oracle indices ``j + offset``."""
    lo = state.window.j_min + offset
    hi = state.window.j_max + offset
    if lo < 0 or hi >= sites:
        raise ValueError(
            f"window [{state.window.j_min}, {state.window.j_max}] with offset "
            f"{offset} does not fit a {sites}-site lattice"
        )
    vec = np.zeros(2 * sites, dtype=np.complex128)
    vec[lo : hi + 1] = state.up
    vec[sites + lo : sites + hi + 1] = state.down
    return vec


def vector_to_state(vector: np.ndarray, sites: int, offset: int, t: int = 0) -> WalkState:
    """Inverse of :func:`state_to_vector` over the full lattice window."""
    v = np.asarray(vector, dtype=np.complex128)
    if v.shape != (2 * sites,):
        raise ValueError(f"vector must have shape ({2 * sites},), got {v.shape}")
    window = LatticeWindow(-offset, sites - 1 - offset)
    return WalkState(window, v[:sites].copy(), v[sites:].copy(), t)
