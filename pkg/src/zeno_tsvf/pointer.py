"""Von Neumann pointer coupled to the channel projector.

At each coupling slice the photon-pointer state splits into the part with
the photon in the channel, whose pointer is displaced by ``g``, and the rest.
Branches that accumulated the same number of displacements carry identical
pointer states and are merged, so ``K`` couplings leave at most ``K + 1``
branches.  The pointer wavefunction is a Gaussian whose density has width
``sigma``; interference between branches is kept exactly through
Gaussian-overlap factors, with no small-coupling expansion anywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import AbstractSet, Dict, List, Optional, Tuple

import numpy as np

from . import kernels
from .errors import CapacityError, ImpossiblePostSelectionError, InvalidParameterError
from .schedule import Schedule, SliceLocator, validate_monitor_slices
from .tsvf import POSTSELECT_EPS, PostSelection

BRANCH_CAP = 20
GRID_POINTS = 4001
GRID_SPAN = 8.0


@dataclass(frozen=True)
class PointerModel:
    g: float
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.g):
            raise InvalidParameterError(f"coupling g must be finite, got {self.g!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidParameterError(f"pointer width must be > 0, got {self.sigma!r}")


@dataclass(frozen=True)
class Branch:
    shift: int  # number of displacements by g
    state: np.ndarray  # live amplitudes (A, B, C)
    leaks: np.ndarray  # per-event sink amplitudes, as in forward_evolve


class PointerDistribution:
    """Pointer density ``p(x) = sum_kl c_kl G_k(x) G_l(x)``.

    ``positions[k]`` is the displacement of branch ``k`` and ``coherence`` the
    Hermitian matrix of photon-branch overlaps, normalised so that the
    density integrates to one.  Each ``(k, l)`` pair is a Gaussian component
    of width ``sigma`` centred at the midpoint, with complex cross-weight
    ``c_kl * exp(-(x_k - x_l)^2 / (8 sigma^2))``.
    """

    def __init__(self, positions: np.ndarray, sigma: float, coherence: np.ndarray):
        positions = np.asarray(positions, dtype=float)
        coherence = np.asarray(coherence, dtype=np.complex128)
        d = positions[:, None] - positions[None, :]
        weights = coherence * np.exp(-d * d / (8.0 * sigma * sigma))
        norm = float(np.sum(weights.real))
        if not norm > 0.0:
            raise ImpossiblePostSelectionError("pointer distribution has zero weight")
        self.positions = positions
        self.sigma = float(sigma)
        self.coherence = coherence / norm
        self._means = 0.5 * (positions[:, None] + positions[None, :])
        self._weights = weights / norm

    @classmethod
    def gaussian(cls, mean: float = 0.0, sigma: float = 1.0) -> "PointerDistribution":
        return cls(np.array([mean]), sigma, np.ones((1, 1)))

    @classmethod
    def incoherent(cls, positions, probabilities, sigma: float = 1.0) -> "PointerDistribution":
        return cls(np.asarray(positions), sigma, np.diag(np.asarray(probabilities, dtype=float)))

    def components(self) -> List[Tuple[float, float, complex]]:
        """(mean, sigma, complex weight) for every ordered branch pair."""
        K = len(self.positions)
        return [(float(self._means[k, l]), self.sigma, complex(self._weights[k, l]))
                for k in range(K) for l in range(K)]

    def grid(self, points: int = GRID_POINTS, span: float = GRID_SPAN) -> np.ndarray:
        lo = float(self.positions.min()) - span * self.sigma
        hi = float(self.positions.max()) + span * self.sigma
        return np.linspace(lo, hi, points)

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        # Hermitian pairs combine into real weights
        w = self._weights.real.ravel()
        mu = self._means.ravel()
        keep = w != 0.0
        w, mu = w[keep], mu[keep]
        z = (x[..., None] - mu) / self.sigma
        g = np.exp(-0.5 * z * z) / (math.sqrt(2.0 * math.pi) * self.sigma)
        return g @ w

    def exact_mean(self) -> float:
        """Closed-form mean of the mixture (no quadrature)."""
        return float(np.sum(self._weights.real * self._means))

    def integral(self, x: Optional[np.ndarray] = None) -> float:
        x = self.grid() if x is None else x
        return float(np.trapezoid(self.density(x), x))


def pointer_mean(dist: PointerDistribution) -> float:
    """``integral x p(x) dx`` by the trapezoid rule on the default grid."""
    x = dist.grid()
    return float(np.trapezoid(x * dist.density(x), x))


def _checked_couplings(schedule: Schedule, couple_at: AbstractSet[SliceLocator]) -> List[int]:
    couple_at = frozenset(couple_at)
    if len(couple_at) > BRANCH_CAP:
        raise CapacityError(f"{len(couple_at)} coupling slices exceed the cap of {BRANCH_CAP}")
    kept = validate_monitor_slices(schedule, couple_at) if couple_at else frozenset()
    if kept != couple_at:
        bad = sorted(s.after_event_index for s in couple_at - kept)
        raise InvalidParameterError(f"coupling slices must follow an InnerBS event: {bad}")
    return sorted(s.after_event_index for s in couple_at)


def evolve_branches(schedule: Schedule, couple_at: AbstractSet[SliceLocator]) -> List[Branch]:
    """Exact photon-pointer branch evolution through the whole schedule."""
    compiled = schedule.compiled
    E = len(schedule)
    branches: Dict[int, Tuple[np.ndarray, np.ndarray]] = {
        0: (np.array([1.0, 0.0, 0.0], dtype=np.complex128),
            np.zeros((E, 2), dtype=np.complex128))}
    start = 0
    for k in _checked_couplings(schedule, couple_at):
        stop = k + 1
        split: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
        for shift, (state, leaks) in sorted(branches.items()):
            kernels.run(compiled, state, start, stop, leaks)
            inside = np.array([0.0, 0.0, state[2]], dtype=np.complex128)
            state[2] = 0.0
            for key, st, lk in ((shift, state, leaks),
                                (shift + 1, inside, np.zeros((E, 2), dtype=np.complex128))):
                if key in split:
                    split[key][0][:] += st
                    split[key][1][:] += lk
                else:
                    split[key] = (st, lk)
        branches = split
        start = stop
    out = []
    for shift, (state, leaks) in sorted(branches.items()):
        kernels.run(compiled, state, start, E, leaks)
        out.append(Branch(shift, state, leaks))
    return out


def couple_pointer(schedule: Schedule, couple_at: AbstractSet[SliceLocator],
                   model: PointerModel, post=None) -> PointerDistribution:
    """Pointer density after coupling at ``couple_at``.

    Without ``post`` this is the unconditional pointer reading; with ``post``
    it is conditioned on the given detector clicking.
    """
    branches = evolve_branches(schedule, couple_at)
    positions = np.array([b.shift * model.g for b in branches])
    if post is None:
        vecs = np.stack([np.concatenate([b.leaks.ravel(), b.state]) for b in branches])
    else:
        post = PostSelection.coerce(post)
        k = schedule.sink_event(post.target)
        col = 1 if post.target.kind == "D2" else 0
        vecs = np.array([[b.leaks[k, col]] for b in branches])
    coherence = vecs.conj() @ vecs.T
    if post is not None:
        d = positions[:, None] - positions[None, :]
        weight = float(np.sum((coherence * np.exp(-d * d / (8.0 * model.sigma ** 2))).real))
        if weight <= POSTSELECT_EPS ** 2:
            raise ImpossiblePostSelectionError(
                f"post-selection on {post.target} has probability {weight:.3g}")
    return PointerDistribution(positions, model.sigma, coherence)
