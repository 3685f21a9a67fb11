"""Eavesdropper readout of a weak channel-presence pointer.

Eve couples a pointer to the channel projector at one slice and sees only
her pointer.  The bit is inferred from the two pointer densities (bit 0 and
bit 1); mutual information and total-variation distance are computed by
trapezoid quadrature on a shared grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import InvalidParameterError, PrecisionError
from .pointer import GRID_POINTS, GRID_SPAN, PointerModel, couple_pointer
from .schedule import INNER_BS, LogicBit, Schedule, SliceLocator

NORMALIZATION_TOL = 1e-4


@dataclass(frozen=True)
class EveResult:
    mutual_information: float  # bits
    tv_distance: float
    x: np.ndarray
    p0: np.ndarray
    p1: np.ndarray

    def to_dict(self) -> dict:
        return {"mutual_information_bits": self.mutual_information,
                "tv_distance": self.tv_distance}


def _inner_coords(schedule: Schedule, where) -> Tuple[int, int]:
    if isinstance(where, SliceLocator):
        e = schedule.events[where.after_event_index]
        if e.kind != INNER_BS:
            raise InvalidParameterError(f"slice after {e.label} is not in the channel region")
        return e.m, e.n
    m, n = where
    return int(m), int(n)


def eve_information(schedule_pair: Tuple[Schedule, Schedule],
                    couple_at: Union[SliceLocator, Tuple[int, int]],
                    model: PointerModel, prior: float = 0.5,
                    post=None, points: int = GRID_POINTS) -> EveResult:
    """Information Eve's pointer carries about the bit.

    ``couple_at`` is either a locator in the bit-0 schedule or inner
    coordinates ``(m, n)``; it is mapped to the slice after ``InnerBS(m, n)``
    in each schedule since event indices differ between the two bits.
    ``post`` conditions both densities on a detector click (exploration
    only; Eve has no access to the detectors).
    """
    s0, s1 = schedule_pair
    if (s0.params.M, s0.params.N) != (s1.params.M, s1.params.N):
        raise InvalidParameterError("both schedules must share M and N")
    if (s0.params.bit, s1.params.bit) != (LogicBit.ZERO, LogicBit.ONE):
        raise InvalidParameterError("schedule pair must be (bit 0, bit 1)")
    if not 0.0 < prior < 1.0:
        raise InvalidParameterError(f"prior must lie in (0, 1), got {prior}")
    m, n = _inner_coords(s0, couple_at)
    d0 = couple_pointer(s0, {s0.inner_slice(m, n)}, model, post)
    d1 = couple_pointer(s1, {s1.inner_slice(m, n)}, model, post)

    lo = min(d0.positions.min(), d1.positions.min()) - GRID_SPAN * model.sigma
    hi = max(d0.positions.max(), d1.positions.max()) + GRID_SPAN * model.sigma
    x = np.linspace(lo, hi, points)
    p0, p1 = d0.density(x), d1.density(x)
    for b, p in ((0, p0), (1, p1)):
        mass = float(np.trapezoid(p, x))
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            raise PrecisionError(f"bit-{b} density integrates to {mass:.8f} on the grid")

    # roundoff can leave -1e-300-ish values in the tails
    p0 = np.clip(p0, 0.0, None)
    p1 = np.clip(p1, 0.0, None)
    w0, w1 = 1.0 - prior, prior
    mix = w0 * p0 + w1 * p1
    info = 0.0
    for w, p in ((w0, p0), (w1, p1)):
        terms = np.zeros_like(p)
        ok = p > 0
        terms[ok] = p[ok] * np.log2(p[ok] / mix[ok])
        info += w * float(np.trapezoid(terms, x))
    tv = 0.5 * float(np.trapezoid(np.abs(p0 - p1), x))
    return EveResult(max(info, 0.0), tv, x, p0, p1)
