"""Forward and backward evolution, weak values and ABL probabilities.

The forward state is recorded on the slice grid "initial, then after every
event".  The backward state is anchored at the post-selected detector: it
starts as the unit vector of the mode feeding that detector, just before the
detection event, and is propagated to earlier slices with adjoint rotations.
Absorbers and detectors passed on the way back keep only the surviving
branch, so the backward vectors are unnormalised conditional amplitudes and
``<backward|forward>`` is the same number at every slice.

Slices after the post-selecting detection carry the detected branch frozen
in its pre-detection mode (forward ``alpha * e_X``, backward ``e_X``), which
keeps the overlap constant over the whole grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .errors import ImpossiblePostSelectionError, UndefinedABLError
from .schedule import (BOB_ABSORB, D3_DETECT, FINAL_DETECT, Event, ProtocolParams,
                       Schedule, SliceLocator)
from .state import MODES, LeakRecord, PathMode, PhotonState, SinkId

# sink amplitudes at or below this are treated as "never happens"
POSTSELECT_EPS = 1e-12


def _event_sinks(event: Event) -> Tuple[SinkId, ...]:
    if event.kind == BOB_ABSORB:
        return (SinkId.bob(event.m, event.n),)
    if event.kind == D3_DETECT:
        return (SinkId.d3(event.m),)
    if event.kind == FINAL_DETECT:
        return (SinkId.d1(), SinkId.d2())
    return ()


@dataclass(frozen=True)
class SliceRecord:
    slice: SliceLocator
    forward: PhotonState


@dataclass(frozen=True)
class RunReport:
    params: ProtocolParams
    p_D1: float
    p_D2: float
    p_D3: Dict[int, float]
    p_bob_absorb: Dict[Tuple[int, int], float]
    total: float

    @property
    def p_absorbed(self) -> float:
        return math.fsum(self.p_bob_absorb.values())

    @property
    def sum_p_D3(self) -> float:
        return math.fsum(self.p_D3.values())

    def probability(self, sink: SinkId) -> float:
        if sink.kind == "D1":
            return self.p_D1
        if sink.kind == "D2":
            return self.p_D2
        if sink.kind == "D3":
            return self.p_D3[sink.m]
        return self.p_bob_absorb[(sink.m, sink.n)]

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "p_D1": self.p_D1,
            "p_D2": self.p_D2,
            "p_D3": {str(m): p for m, p in sorted(self.p_D3.items())},
            "p_bob_absorb": {f"{m},{n}": p for (m, n), p in sorted(self.p_bob_absorb.items())},
            "p_absorbed": self.p_absorbed,
            "total": self.total,
        }

    def to_rows(self) -> Tuple[List[str], List[list]]:
        rows = [["D1", self.p_D1], ["D2", self.p_D2]]
        rows += [[SinkId.d3(m).label, p] for m, p in sorted(self.p_D3.items())]
        rows += [[SinkId.bob(m, n).label, p] for (m, n), p in sorted(self.p_bob_absorb.items())]
        rows.append(["total", self.total])
        return ["sink", "probability"], rows


class ForwardRun(Sequence[SliceRecord]):
    """Recorded forward evolution; ``SliceRecord`` objects are built on access.

    Indexing is by slice: 0 is the initial state, ``k + 1`` follows event ``k``.
    """

    def __init__(self, schedule: Schedule, amps: Optional[np.ndarray], leaks: np.ndarray):
        self.schedule = schedule
        self.amps = amps
        self.leaks = leaks

    @property
    def recorded(self) -> bool:
        return self.amps is not None

    def __len__(self) -> int:
        return 0 if self.amps is None else len(self.amps)

    def __getitem__(self, s):
        if isinstance(s, slice):
            return [self[i] for i in range(*s.indices(len(self)))]
        if self.amps is None:
            raise IndexError("forward run was not recorded")
        if s < 0:
            s += len(self)
        if not 0 <= s < len(self):
            raise IndexError(s)
        return SliceRecord(SliceLocator(s - 1), PhotonState.from_vector(
            self.amps[s], self.leak_records(upto=s - 1)))

    def leak_records(self, upto: Optional[int] = None) -> List[LeakRecord]:
        """Leak ledger for events ``0 .. upto`` (all events by default)."""
        events = self.schedule.events
        last = len(events) - 1 if upto is None else upto
        op = self.schedule.compiled["op"]
        out = []
        for k in np.flatnonzero(op[:last + 1] != 0):
            for col, sink in enumerate(_event_sinks(events[k])):
                out.append(LeakRecord(sink, int(k), complex(self.leaks[k, col])))
        return out


def forward_evolve(schedule: Schedule, record: bool = True) -> Tuple[ForwardRun, RunReport]:
    """Propagate the photon from Alice's arm through every event.

    With ``record=False`` only the detector statistics are produced, which
    is what sweeps use.
    """
    E = len(schedule)
    compiled = schedule.compiled
    state = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
    leaks = np.zeros((E, 2), dtype=np.complex128)
    amps = np.empty((E + 1, 3), dtype=np.complex128) if record else None
    kernels.run(compiled, state, 0, E, leaks, amps)
    return ForwardRun(schedule, amps, leaks), _report(schedule, leaks, state)


def _report(schedule: Schedule, leaks: np.ndarray, live: np.ndarray) -> RunReport:
    prob = leaks.real ** 2 + leaks.imag ** 2
    p_D3: Dict[int, float] = {}
    p_bob: Dict[Tuple[int, int], float] = {}
    p_D1 = p_D2 = 0.0
    op = schedule.compiled["op"]
    for k in np.flatnonzero(op != 0):
        e = schedule.events[k]
        if e.kind == D3_DETECT:
            p_D3[e.m] = float(prob[k, 0])
        elif e.kind == BOB_ABSORB:
            p_bob[(e.m, e.n)] = float(prob[k, 0])
        else:
            p_D1, p_D2 = float(prob[k, 0]), float(prob[k, 1])
    live_p = float(np.sum(live.real ** 2 + live.imag ** 2))
    total = math.fsum([p_D1, p_D2, live_p, *p_D3.values(), *p_bob.values()])
    return RunReport(schedule.params, p_D1, p_D2, p_D3, p_bob, total)


def closed_form_pD1_unblocked(M: int) -> float:
    """``cos^(2M)(pi / 2M)``: D1 probability of the open channel, for any N."""
    return math.cos(math.pi / (2 * M)) ** (2 * M)


def blocked_recursion_oracle(M: int, N: int) -> Tuple[float, float, float]:
    """(p_D1, p_D2, p_absorbed) of the blocked run from a two-amplitude recursion.

    Each outer cycle rotates (a, b) by ``pi/2M``; the blocked inner chain then
    multiplies ``b`` by ``cos^N(pi/2N)`` and the lost weight is absorbed.
    """
    th = math.pi / (2 * M)
    c, s = math.cos(th), math.sin(th)
    damp = math.cos(math.pi / (2 * N)) ** N
    a, b, absorbed = 1.0, 0.0, 0.0
    for _ in range(M):
        a, b = a * c - b * s, a * s + b * c
        absorbed += b * b * (1.0 - damp * damp)
        b *= damp
    return a * a, b * b, absorbed


@dataclass(frozen=True)
class PostSelection:
    target: SinkId

    @classmethod
    def coerce(cls, value: Union["PostSelection", SinkId, str]) -> "PostSelection":
        if isinstance(value, PostSelection):
            return value
        if isinstance(value, SinkId):
            return cls(value)
        return cls(SinkId.parse(value))

    def locate(self, schedule: Schedule) -> Tuple[int, PathMode]:
        """(index of the detection event, live mode feeding the sink)."""
        return schedule.sink_event(self.target), schedule.pre_sink_mode(self.target)


@dataclass(frozen=True)
class TraceSlice:
    slice_index: int
    forward: PhotonState
    backward: PhotonState
    weak_values: Dict[PathMode, complex]
    overlap: complex


@dataclass
class TwoStateTrace:
    """Per-slice forward/backward vectors with weak values and ABL probabilities.

    Arrays have one row per slice and one column per mode (A, B, C).
    """

    schedule: Schedule
    post: PostSelection
    forward: np.ndarray
    backward: np.ndarray
    overlap: np.ndarray
    weak_values: np.ndarray
    abl: np.ndarray
    sink_amplitude: complex
    post_event: int

    def __len__(self) -> int:
        return len(self.forward)

    def __getitem__(self, s: int) -> TraceSlice:
        return TraceSlice(
            s,
            PhotonState.from_vector(self.forward[s]),
            PhotonState.from_vector(self.backward[s]),
            {m: complex(self.weak_values[s, m]) for m in MODES},
            complex(self.overlap[s]),
        )

    def __iter__(self) -> Iterator[TraceSlice]:
        return (self[s] for s in range(len(self)))

    def slice_event(self, s: int) -> Optional[Event]:
        return None if s == 0 else self.schedule.events[s - 1]


def backward_evolve(schedule: Schedule, slices: Optional[ForwardRun],
                    post) -> TwoStateTrace:
    post = PostSelection.coerce(post)
    if slices is None or not slices.recorded:
        slices, _ = forward_evolve(schedule, record=True)
    k, mode = post.locate(schedule)
    fwd = slices.amps.copy()
    alpha = complex(fwd[k, mode])
    if abs(alpha) <= POSTSELECT_EPS:
        raise ImpossiblePostSelectionError(
            f"post-selection on {post.target} has amplitude {abs(alpha):.3g}")

    unit = np.zeros(3, dtype=np.complex128)
    unit[mode] = 1.0
    bwd = np.empty_like(fwd)
    kernels.run_backward(schedule.compiled, unit.copy(), k, bwd)
    # detected branch, frozen at the detector
    bwd[k + 1:] = unit
    fwd[k + 1:] = alpha * unit

    numer = bwd.conj() * fwd
    overlap = numer.sum(axis=1)
    weak = numer / overlap[:, None]
    p_in = np.abs(numer) ** 2
    p_out = np.abs(overlap[:, None] - numer) ** 2
    abl = p_in / (p_in + p_out)
    return TwoStateTrace(schedule, post, fwd, bwd, overlap, weak, abl, alpha, k)


def two_state_trace(schedule: Schedule, post) -> TwoStateTrace:
    runs, _ = forward_evolve(schedule, record=True)
    return backward_evolve(schedule, runs, post)


def weak_value(forward: PhotonState, backward: PhotonState, mode: PathMode) -> complex:
    """``<backward|P_mode|forward> / <backward|forward>``."""
    overlap = sum((b.conjugate() * f for b, f in zip(backward.amp, forward.amp)), 0j)
    if overlap == 0:
        raise ImpossiblePostSelectionError("pre- and post-selected states are orthogonal")
    return backward[mode].conjugate() * forward[mode] / overlap


def abl_probability(forward: PhotonState, backward: PhotonState, mode: PathMode) -> float:
    """Probability that an ideal projective test of ``mode`` finds the photon."""
    mode = PathMode(mode)
    inside = backward[mode].conjugate() * forward[mode]
    outside = sum((backward[m].conjugate() * forward[m] for m in MODES if m != mode), 0j)
    p_in, p_out = abs(inside) ** 2, abs(outside) ** 2
    if p_in + p_out <= 0.0:
        raise UndefinedABLError(f"both branches of P_{mode.name} vanish")
    return p_in / (p_in + p_out)


TRACE_COLUMNS = (
    ["slice_index", "event_kind", "m", "n"]
    + [f"fwd_{x}_{p}" for x in "abc" for p in ("re", "im")]
    + [f"bwd_{x}_{p}" for x in "abc" for p in ("re", "im")]
    + [f"W_{x}_{p}" for x in "abc" for p in ("re", "im")]
    + ["abl_c"]
)

WEAKVALUE_COLUMNS = (
    ["slice_index", "event_kind", "m", "n"]
    + [f"W_{x}_{p}" for x in "abc" for p in ("re", "im")]
    + ["abl_a", "abl_b", "abl_c"]
)


def _slice_head(trace: TwoStateTrace, s: int) -> list:
    e = trace.slice_event(s)
    if e is None:
        return [s, "Initial", "", ""]
    return [s, e.kind, "" if e.m is None else e.m, "" if e.n is None else e.n]


def _split(z: np.ndarray) -> list:
    out = []
    for v in z:
        out += [float(v.real), float(v.imag)]
    return out


def presence_trace_export(trace: TwoStateTrace) -> Tuple[List[str], List[list]]:
    """One row per slice in ``TRACE_COLUMNS`` order."""
    rows = []
    for s in range(len(trace)):
        rows.append(_slice_head(trace, s) + _split(trace.forward[s]) + _split(trace.backward[s])
                    + _split(trace.weak_values[s]) + [float(trace.abl[s, PathMode.C])])
    return list(TRACE_COLUMNS), rows


def weak_value_export(trace: TwoStateTrace) -> Tuple[List[str], List[list]]:
    """Weak values and ABL probabilities of all three modes, one row per slice."""
    rows = []
    for s in range(len(trace)):
        rows.append(_slice_head(trace, s) + _split(trace.weak_values[s])
                    + [float(p) for p in trace.abl[s]])
    return list(WEAKVALUE_COLUMNS), rows
