"""Domain types for one-dimensional discrete-time quantum walks.

A walk state lives on a bounded integer window of the lattice and carries
two complex amplitude fields, one per spin component.  The coin acting on
the spin is a Hadamard everywhere, optionally replaced by a NOT gate
(spin flip) at a single defect site.  Initial states place a qubit
``cos(alpha/2)|up> + e^{i beta} sin(alpha/2)|down>`` over either a delta
distribution at the origin or a truncated Gaussian envelope.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SQRT1_2",
    "HADAMARD_MATRIX",
    "NOT_MATRIX",
    "QubitParams",
    "LatticeWindow",
    "CoinKind",
    "CoinSpec",
    "InitialShape",
    "InitialStateSpec",
    "WalkState",
    "coin_matrix",
    "gaussian_envelope",
    "build_initial_state",
]

SQRT1_2 = 1.0 / math.sqrt(2.0)

HADAMARD_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) * SQRT1_2
NOT_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


@dataclass(frozen=True)
class QubitParams:
    """Bloch angles of the initial coin state.

    The qubit is ``cos(alpha/2)|up> + e^{i beta} sin(alpha/2)|down>`` with
    ``alpha`` in [0, pi] and ``beta`` in [0, 2*pi].  Out-of-range angles are
    rejected rather than folded, so sweep generators can never silently
    alias two distinct grid points.
    """

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("Bloch angles must be finite")
        if not 0.0 <= self.alpha <= math.pi:
            raise ValueError(f"alpha must lie in [0, pi], got {self.alpha}")
        if not 0.0 <= self.beta <= 2.0 * math.pi:
            raise ValueError(f"beta must lie in [0, 2*pi], got {self.beta}")

    @property
    def up_amplitude(self) -> float:
        """cos(alpha/2), the spin-up coefficient (always real)."""
        return math.cos(0.5 * self.alpha)

    @property
    def down_amplitude(self) -> complex:
        """e^{i beta} sin(alpha/2), the spin-down coefficient."""
        return complex(math.cos(self.beta), math.sin(self.beta)) * math.sin(0.5 * self.alpha)


@dataclass(frozen=True, order=True)
class LatticeWindow:
    """Contiguous range of lattice sites ``j_min..j_max`` (both inclusive)."""

    j_min: int
    j_max: int

    def __post_init__(self) -> None:
        if self.j_min > self.j_max:
            raise ValueError(f"empty window: j_min={self.j_min} > j_max={self.j_max}")

    @property
    def size(self) -> int:
        return self.j_max - self.j_min + 1

    def sites(self) -> np.ndarray:
        """All site coordinates as an int64 array."""
        return np.arange(self.j_min, self.j_max + 1, dtype=np.int64)

    def index(self, j: int) -> int:
        """Array index of site ``j``; raises if outside the window."""
        if not self.contains(j):
            raise ValueError(f"site {j} outside window [{self.j_min}, {self.j_max}]")
        return j - self.j_min

    def contains(self, other: "LatticeWindow | int") -> bool:
        if isinstance(other, LatticeWindow):
            return self.j_min <= other.j_min and other.j_max <= self.j_max
        return self.j_min <= other <= self.j_max


class CoinKind(enum.Enum):
    UNIFORM_HADAMARD = "hadamard"
    HADAMARD_WITH_NOT_DEFECT = "defect"


@dataclass(frozen=True)
class CoinSpec:
    """Coin field: Hadamard at every site, or Hadamard plus a NOT defect.

    At the defect site the coin is exactly the spin-flip matrix
    ``[[0, 1], [1, 0]]``, which reverses the walker instead of splitting it.
    """

    kind: CoinKind
    defect_site: int | None = None

    def __post_init__(self) -> None:
        if self.kind is CoinKind.UNIFORM_HADAMARD and self.defect_site is not None:
            raise ValueError("uniform Hadamard coin takes no defect site")
        if self.kind is CoinKind.HADAMARD_WITH_NOT_DEFECT:
            if self.defect_site is None:
                raise ValueError("defect coin requires a defect site")
            if not isinstance(self.defect_site, (int, np.integer)):
                raise ValueError("defect site must be an integer lattice site")

    @classmethod
    def hadamard(cls) -> "CoinSpec":
        return cls(CoinKind.UNIFORM_HADAMARD)

    @classmethod
    def not_defect(cls, site: int) -> "CoinSpec":
        return cls(CoinKind.HADAMARD_WITH_NOT_DEFECT, int(site))


def coin_matrix(spec: CoinSpec, j: int) -> np.ndarray:
    """2x2 unitary the coin applies at site ``j`` (a fresh array)."""
    if spec.kind is CoinKind.HADAMARD_WITH_NOT_DEFECT and j == spec.defect_site:
        return NOT_MATRIX.copy()
    return HADAMARD_MATRIX.copy()


class InitialShape(enum.Enum):
    LOCAL = "local"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class InitialStateSpec:
    """Position envelope of the initial state.

    ``LOCAL`` puts all weight on site 0.  ``GAUSSIAN`` samples
    ``f(j) = exp(-j^2 / (4 sigma0^2)) / (2 pi sigma0^2)^(1/4)`` on integer
    sites with ``|j| <= truncation_radius`` and zero outside.  With
    ``renormalize=False`` (the default) the envelope keeps the continuum
    normalization constant; the squared-norm deficit from truncating is
    reported by :meth:`norm_deficit` instead of being corrected.
    """

    shape: InitialShape
    sigma0: float | None = None
    truncation_radius: int | None = None
    renormalize: bool = False

    def __post_init__(self) -> None:
        if self.shape is InitialShape.LOCAL:
            if self.sigma0 is not None or self.truncation_radius is not None:
                raise ValueError("local shape takes neither sigma0 nor truncation radius")
            return
        if self.sigma0 is None or not math.isfinite(self.sigma0) or self.sigma0 <= 0.0:
            raise ValueError(f"Gaussian shape requires sigma0 > 0, got {self.sigma0}")
        if self.truncation_radius is None or self.truncation_radius < 1:
            raise ValueError(
                f"Gaussian shape requires truncation_radius >= 1, got {self.truncation_radius}"
            )

    @classmethod
    def local(cls) -> "InitialStateSpec":
        return cls(InitialShape.LOCAL)

    @classmethod
    def gaussian(
        cls,
        sigma0: float,
        truncation_radius: int = 100,
        renormalize: bool = False,
    ) -> "InitialStateSpec":
        return cls(InitialShape.GAUSSIAN, float(sigma0), int(truncation_radius), renormalize)

    def support(self) -> tuple[int, int]:
        """Smallest site range carrying nonzero envelope weight."""
        if self.shape is InitialShape.LOCAL:
            return (0, 0)
        assert self.truncation_radius is not None
        return (-self.truncation_radius, self.truncation_radius)

    def envelope(self) -> np.ndarray:
        """Envelope values ``f(j)`` over :meth:`support`, left to right."""
        if self.shape is InitialShape.LOCAL:
            return np.ones(1)
        f = gaussian_envelope(self.sigma0, self.truncation_radius)
        if self.renormalize:
            f = f / math.sqrt(float(np.sum(f * f)))
        return f

    def norm_deficit(self) -> float:
        """``1 - sum_j f(j)^2``, the squared-norm error left by truncation."""
        f = self.envelope()
        return 1.0 - float(np.sum(f * f))


def gaussian_envelope(sigma0: float, truncation_radius: int) -> np.ndarray:
    """Truncated Gaussian ``f(j)`` for ``j = -radius..radius``.

    Uses the continuum normalization ``(2 pi sigma0^2)^(-1/4)``, so the
    discrete squared sum is close to but not exactly 1.
    """
    j = np.arange(-truncation_radius, truncation_radius + 1, dtype=np.float64)
    return np.exp(-(j * j) / (4.0 * sigma0 * sigma0)) / (2.0 * math.pi * sigma0 * sigma0) ** 0.25


@dataclass
class WalkState:
    """Walk amplitudes over a window at a given time step.

    ``up[i]`` and ``down[i]`` hold the spin-up and spin-down amplitudes of
    site ``window.j_min + i``.  Outside the reachable light cone both
    fields are exactly zero, which the step operation preserves bit for bit.
    """

    window: LatticeWindow
    up: np.ndarray = field(repr=False)
    down: np.ndarray = field(repr=False)
    t: int = 0

    def __post_init__(self) -> None:
        self.up = np.ascontiguousarray(self.up, dtype=np.complex128)
        self.down = np.ascontiguousarray(self.down, dtype=np.complex128)
        if self.up.shape != (self.window.size,) or self.down.shape != (self.window.size,):
            raise ValueError(
                f"amplitude arrays must have shape ({self.window.size},), "
                f"got {self.up.shape} and {self.down.shape}"
            )
        if self.t < 0:
            raise ValueError("time step must be non-negative")

    @classmethod
    def zero(cls, window: LatticeWindow, t: int = 0) -> "WalkState":
        n = window.size
        return cls(window, np.zeros(n, dtype=np.complex128), np.zeros(n, dtype=np.complex128), t)

    def sites(self) -> np.ndarray:
        return self.window.sites()

    def norm_squared(self) -> float:
        """Total probability ``sum_j |a|^2 + |b|^2``."""
        return float(
            np.sum(self.up.real**2 + self.up.imag**2)
            + np.sum(self.down.real**2 + self.down.imag**2)
        )

    def support(self) -> tuple[int, int] | None:
        """Site range of nonzero amplitude, or None for the zero state."""
        occupied = np.flatnonzero((self.up != 0) | (self.down != 0))
        if occupied.size == 0:
            return None
        return (
            int(self.window.j_min + occupied[0]),
            int(self.window.j_min + occupied[-1]),
        )

    def copy(self) -> "WalkState":
        return WalkState(self.window, self.up.copy(), self.down.copy(), self.t)

    def embedded(self, window: LatticeWindow) -> "WalkState":
        """Same amplitudes inside a larger window (zero padding)."""
        if not window.contains(self.window):
            raise ValueError(
                f"target window [{window.j_min}, {window.j_max}] does not contain "
                f"[{self.window.j_min}, {self.window.j_max}]"
            )
        out = WalkState.zero(window, self.t)
        lo = window.index(self.window.j_min)
        out.up[lo : lo + self.window.size] = self.up
        out.down[lo : lo + self.window.size] = self.down
        return out

    def assert_finite(self) -> None:
        if not (np.all(np.isfinite(self.up)) and np.all(np.isfinite(self.down))):
            raise ValueError("state contains non-finite amplitudes")


def build_initial_state(
    qubit: QubitParams,
    init: InitialStateSpec,
    window: LatticeWindow | None = None,
) -> WalkState:
    """Product state of ``qubit`` over the envelope of ``init`` at t=0.

    Spin-up amplitudes are ``f(j) cos(alpha/2)`` and spin-down amplitudes
    ``f(j) e^{i beta} sin(alpha/2)``.  When ``window`` is omitted the state
    occupies the minimal support window; pass a pre-sized window (or embed
    later) before evolving.
    """
    lo, hi = init.support()
    if window is None:
        window = LatticeWindow(lo, hi)
    elif not window.contains(LatticeWindow(lo, hi)):
        raise ValueError(
            f"window [{window.j_min}, {window.j_max}] does not cover "
            f"initial support [{lo}, {hi}]"
        )
    f = init.envelope()
    state = WalkState.zero(window)
    start = window.index(lo)
    state.up[start : start + f.size] = f * qubit.up_amplitude
    state.down[start : start + f.size] = f * qubit.down_amplitude
    return state
