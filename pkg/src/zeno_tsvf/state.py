"""Exact single-photon state algebra over three live path modes.

A photon lives in Alice's retained arm ``A``, the Alice-side inner arm ``B``
or the transmission channel ``C``.  Beam splitters are real two-mode
rotations; absorbers and detectors move a mode's amplitude into the leak
ledger so that the live part of the state shrinks while the total
probability (live plus leaked) is conserved.

All values are immutable and every operation returns a new state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import ContractViolation, InvalidParameterError

ASSERT_TOL = 1e-12
STEP_TOL = 1e-15


class PathMode(IntEnum):
    A = 0  # Alice's retained arm
    B = 1  # inner-interferometer arm on Alice's side
    C = 2  # transmission channel

    @property
    def label(self) -> str:
        return self.name.lower()


MODES = (PathMode.A, PathMode.B, PathMode.C)
CHANNEL = PathMode.C


@dataclass(frozen=True, order=True)
class SinkId:
    """Where leaked amplitude ends up.

    ``kind`` is one of ``"D1"``, ``"D2"``, ``"D3"`` (with outer cycle ``m``)
    or ``"BobAbsorb"`` (with outer cycle ``m`` and inner step ``n``).
    """

    kind: str
    m: Optional[int] = None
    n: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind in ("D1", "D2"):
            ok = self.m is None and self.n is None
        elif self.kind == "D3":
            ok = self.m is not None and self.m >= 1 and self.n is None
        elif self.kind == "BobAbsorb":
            ok = (self.m is not None and self.m >= 1
                  and self.n is not None and self.n >= 1)
        else:
            ok = False
        if not ok:
            raise InvalidParameterError(f"malformed sink id {self!r}")

    @classmethod
    def d1(cls) -> "SinkId":
        return cls("D1")

    @classmethod
    def d2(cls) -> "SinkId":
        return cls("D2")

    @classmethod
    def d3(cls, m: int) -> "SinkId":
        return cls("D3", m)

    @classmethod
    def bob(cls, m: int, n: int) -> "SinkId":
        return cls("BobAbsorb", m, n)

    @classmethod
    def parse(cls, text: str) -> "SinkId":
        """Parse ``D1``, ``D2``, ``D3:m``/``D3(m)`` or ``Bob:m,n``/``BobAbsorb(m,n)``."""
        t = text.strip().replace("(", ":").replace(")", "").replace(" ", "")
        head, _, tail = t.partition(":")
        head = head.upper()
        try:
            if head in ("D1", "D2") and not tail:
                return cls(head)
            if head == "D3":
                return cls("D3", int(tail))
            if head in ("BOB", "BOBABSORB"):
                m, n = tail.split(",")
                return cls("BobAbsorb", int(m), int(n))
        except (ValueError, InvalidParameterError):
            pass
        raise InvalidParameterError(f"cannot parse sink id {text!r}")

    @property
    def label(self) -> str:
        if self.kind == "D3":
            return f"D3({self.m})"
        if self.kind == "BobAbsorb":
            return f"BobAbsorb({self.m},{self.n})"
        return self.kind

    def __str__(self) -> str:
        return self.label


def _check_finite(z: complex, what: str) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidParameterError(f"non-finite {what}: {z!r}")
    return z


@dataclass(frozen=True)
class LeakRecord:
    sink: SinkId
    event_index: int
    amplitude: complex

    @property
    def probability(self) -> float:
        return abs(self.amplitude) ** 2


@dataclass(frozen=True)
class PhotonState:
    """Live amplitudes on (A, B, C) plus the ordered leak ledger."""

    amp: Tuple[complex, complex, complex]
    leaks: Tuple[LeakRecord, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.amp) != 3:
            raise InvalidParameterError("a photon state has exactly three live modes")
        object.__setattr__(
            self, "amp", tuple(_check_finite(z, "amplitude") for z in self.amp))
        object.__setattr__(self, "leaks", tuple(self.leaks))

    @classmethod
    def initial(cls) -> "PhotonState":
        """Photon entering in Alice's arm."""
        return cls((1.0, 0.0, 0.0))

    @classmethod
    def from_vector(cls, vec: Sequence[complex],
                    leaks: Iterable[LeakRecord] = ()) -> "PhotonState":
        return cls(tuple(complex(v) for v in vec), tuple(leaks))

    def __getitem__(self, mode: PathMode) -> complex:
        return self.amp[int(mode)]

    def vector(self) -> np.ndarray:
        return np.array(self.amp, dtype=np.complex128)

    @property
    def live_norm2(self) -> float:
        return sum(abs(z) ** 2 for z in self.amp)

    @property
    def leak_probability(self) -> float:
        return sum(r.probability for r in self.leaks)

    @property
    def total_probability(self) -> float:
        return self.live_norm2 + self.leak_probability

    def leak_by_sink(self, sink: SinkId) -> complex:
        return sum((r.amplitude for r in self.leaks if r.sink == sink), 0j)

    def isclose(self, other: "PhotonState", tol: float = ASSERT_TOL) -> bool:
        return all(abs(x - y) <= tol for x, y in zip(self.amp, other.amp))


def rotate(state: PhotonState, pair: Tuple[PathMode, PathMode],
           theta: float) -> PhotonState:
    """Beam splitter on ``pair = (u, v)``: ``(u, v) -> (cos u - sin v, sin u + cos v)``."""
    u, v = (PathMode(p) for p in pair)
    if u == v:
        raise InvalidParameterError("rotation needs two distinct modes")
    if not math.isfinite(theta):
        raise InvalidParameterError(f"non-finite rotation angle {theta!r}")
    c, s = math.cos(theta), math.sin(theta)
    amp = list(state.amp)
    x, y = amp[u], amp[v]
    amp[u] = complex(c * x.real - s * y.real, c * x.imag - s * y.imag)
    amp[v] = complex(s * x.real + c * y.real, s * x.imag + c * y.imag)
    return PhotonState(tuple(amp), state.leaks)


def absorb(state: PhotonState, mode: PathMode, sink: SinkId,
           event_index: int) -> PhotonState:
    """Move the amplitude of ``mode`` into a new leak record."""
    mode = PathMode(mode)
    if state.leaks and event_index <= state.leaks[-1].event_index:
        raise ContractViolation(
            f"leak event index {event_index} does not follow "
            f"{state.leaks[-1].event_index}")
    amp = list(state.amp)
    record = LeakRecord(sink, int(event_index), amp[mode])
    amp[mode] = 0j
    return PhotonState(tuple(amp), state.leaks + (record,))


def detect_final(state: PhotonState, event_index: int) -> PhotonState:
    """Terminal detection: ``A`` clicks D1, ``B`` clicks D2.

    Both records share ``event_index``; this is the only place two leaks
    may carry the same index.
    """
    if state.leaks and event_index <= state.leaks[-1].event_index:
        raise ContractViolation(
            f"leak event index {event_index} does not follow "
            f"{state.leaks[-1].event_index}")
    a, b, c = state.amp
    records = (LeakRecord(SinkId.d1(), event_index, a),
               LeakRecord(SinkId.d2(), event_index, b))
    return PhotonState((0j, 0j, c), state.leaks + records)


def inner_product(bra: PhotonState, ket: PhotonState) -> complex:
    """``<bra|ket>`` over the live modes; the leak ledger is ignored."""
    return sum((x.conjugate() * y for x, y in zip(bra.amp, ket.amp)), 0j)


def project(state: PhotonState, mode: PathMode) -> PhotonState:
    """Keep only ``mode``; the leak ledger is dropped."""
    mode = PathMode(mode)
    return PhotonState(tuple(z if i == mode else 0j
                             for i, z in enumerate(state.amp)))
