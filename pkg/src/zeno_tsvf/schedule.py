"""Event schedule of the nested chained-Zeno interferometer.

Each of the ``M`` outer cycles tilts a fraction ``pi/(2M)`` of Alice's arm
into the inner arm ``B``.  An inner chain of ``N`` beam splitters of angle
``pi/(2N)`` then couples ``B`` to the transmission channel ``C``; when Bob
blocks (bit 1) an absorber follows every inner beam splitter.  Detector D3
removes whatever reached the channel at the end of the chain, and a final
detection sends ``A`` to D1 and ``B`` to D2.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError
from .state import PathMode, SinkId

OUTER_BS = "OuterBS"
INNER_BS = "InnerBS"
BOB_ABSORB = "BobAbsorb"
D3_DETECT = "D3Detect"
FINAL_DETECT = "FinalDetect"
EVENT_KINDS = (OUTER_BS, INNER_BS, BOB_ABSORB, D3_DETECT, FINAL_DETECT)

# opcodes shared with the kernels
OP_ROTATE = 0
OP_ABSORB = 1
OP_FINAL = 2


class LogicBit(IntEnum):
    ZERO = 0  # channel open
    ONE = 1  # Bob blocks

    @classmethod
    def coerce(cls, value) -> "LogicBit":
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise InvalidParameterError(f"logic bit must be 0 or 1, got {value!r}") from None


@dataclass(frozen=True, order=True)
class SliceLocator:
    """The slice just after event ``after_event_index``."""

    after_event_index: int

    @property
    def slice_index(self) -> int:
        return self.after_event_index + 1


def _positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidParameterError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise InvalidParameterError(f"{name} must be >= 1, got {value}")
    return int(value)


@dataclass(frozen=True)
class ProtocolParams:
    outer_cycles: int
    inner_cycles: int
    bit: LogicBit = LogicBit.ZERO
    monitor_slices: FrozenSet[SliceLocator] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "outer_cycles", _positive_int(self.outer_cycles, "M"))
        object.__setattr__(self, "inner_cycles", _positive_int(self.inner_cycles, "N"))
        object.__setattr__(self, "bit", LogicBit.coerce(self.bit))
        object.__setattr__(self, "monitor_slices", frozenset(self.monitor_slices))

    @property
    def M(self) -> int:
        return self.outer_cycles

    @property
    def N(self) -> int:
        return self.inner_cycles

    def with_bit(self, bit) -> "ProtocolParams":
        return ProtocolParams(self.outer_cycles, self.inner_cycles, bit)

    def to_dict(self) -> dict:
        return {"M": self.outer_cycles, "N": self.inner_cycles, "bit": int(self.bit)}


@dataclass(frozen=True)
class Event:
    kind: str
    index: int
    m: Optional[int] = None
    n: Optional[int] = None

    @property
    def label(self) -> str:
        if self.m is None:
            return self.kind
        if self.n is None:
            return f"{self.kind}({self.m})"
        return f"{self.kind}({self.m},{self.n})"

    def to_dict(self) -> dict:
        return {"index": self.index, "kind": self.kind, "m": self.m, "n": self.n}


def expected_event_count(M: int, N: int, bit: LogicBit) -> int:
    return M * (1 + N + int(bit) * N + 1) + 1


@dataclass(frozen=True)
class Schedule:
    params: ProtocolParams
    events: Tuple[Event, ...]
    theta_outer: float
    theta_inner: float

    def __len__(self) -> int:
        return len(self.events)

    @property
    def n_slices(self) -> int:
        return len(self.events) + 1

    @cached_property
    def _inner_index(self) -> Dict[Tuple[int, int], int]:
        return {(e.m, e.n): e.index for e in self.events if e.kind == INNER_BS}

    @cached_property
    def _sink_index(self) -> Dict[SinkId, int]:
        out = {}
        for e in self.events:
            if e.kind == BOB_ABSORB:
                out[SinkId.bob(e.m, e.n)] = e.index
            elif e.kind == D3_DETECT:
                out[SinkId.d3(e.m)] = e.index
            elif e.kind == FINAL_DETECT:
                out[SinkId.d1()] = e.index
                out[SinkId.d2()] = e.index
        return out

    def inner_slice(self, m: int, n: int) -> SliceLocator:
        """Locator of the slice right after ``InnerBS(m, n)``."""
        try:
            return SliceLocator(self._inner_index[(m, n)])
        except KeyError:
            raise InvalidParameterError(f"no InnerBS({m},{n}) in this schedule") from None

    def inner_slices(self) -> List[SliceLocator]:
        return [SliceLocator(i) for i in sorted(self._inner_index.values())]

    def sinks(self) -> List[SinkId]:
        return list(self._sink_index)

    def sink_event(self, sink: SinkId) -> int:
        """Index of the event that feeds ``sink``."""
        try:
            return self._sink_index[sink]
        except KeyError:
            raise InvalidParameterError(f"sink {sink} does not exist in this schedule") from None

    @staticmethod
    def pre_sink_mode(sink: SinkId) -> PathMode:
        """Live mode whose amplitude flows into ``sink``."""
        return {"D1": PathMode.A, "D2": PathMode.B}.get(sink.kind, PathMode.C)

    @cached_property
    def compiled(self) -> Dict[str, np.ndarray]:
        """Flat opcode arrays consumed by the kernels.

        Angles are converted to cos/sin here, once, so every backend sees
        bit-identical coefficients.
        """
        E = len(self.events)
        op = np.zeros(E, dtype=np.int8)
        mi = np.zeros(E, dtype=np.int8)
        mj = np.zeros(E, dtype=np.int8)
        cs = np.zeros(E, dtype=np.float64)
        sn = np.zeros(E, dtype=np.float64)
        co, so = math.cos(self.theta_outer), math.sin(self.theta_outer)
        ci, si = math.cos(self.theta_inner), math.sin(self.theta_inner)
        for e in self.events:
            k = e.index
            if e.kind == OUTER_BS:
                op[k], mi[k], mj[k], cs[k], sn[k] = OP_ROTATE, 0, 1, co, so
            elif e.kind == INNER_BS:
                op[k], mi[k], mj[k], cs[k], sn[k] = OP_ROTATE, 1, 2, ci, si
            elif e.kind in (BOB_ABSORB, D3_DETECT):
                op[k], mi[k] = OP_ABSORB, 2
            else:
                op[k] = OP_FINAL
        for a in (op, mi, mj, cs, sn):
            a.setflags(write=False)
        return {"op": op, "mi": mi, "mj": mj, "cos": cs, "sin": sn}

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "theta_outer": self.theta_outer,
            "theta_inner": self.theta_inner,
            "events": [e.to_dict() for e in self.events],
        }


def build_schedule(params: ProtocolParams) -> Schedule:
    M, N, bit = params.outer_cycles, params.inner_cycles, params.bit
    events: List[Event] = []

    def add(kind, m=None, n=None):
        events.append(Event(kind, len(events), m, n))

    for m in range(1, M + 1):
        add(OUTER_BS, m)
        for n in range(1, N + 1):
            add(INNER_BS, m, n)
            if bit == LogicBit.ONE:
                add(BOB_ABSORB, m, n)
        add(D3_DETECT, m)
    add(FINAL_DETECT)
    assert len(events) == expected_event_count(M, N, bit)

    schedule = Schedule(params, tuple(events), math.pi / (2 * M), math.pi / (2 * N))
    if params.monitor_slices:
        bad = set(params.monitor_slices) - set(schedule.inner_slices())
        if bad:
            raise InvalidParameterError(
                f"monitor slices outside the channel region: {sorted(bad)}")
    return schedule


def validate_monitor_slices(schedule: Schedule,
                            slices: AbstractSet[SliceLocator]) -> FrozenSet[SliceLocator]:
    """Keep only locators sitting right after an ``InnerBS`` event.

    Anything else is dropped; if nothing survives a nonempty request a
    ``UserWarning`` is issued.
    """
    valid = set(schedule.inner_slices())
    kept = frozenset(s for s in slices if s in valid)
    if slices and not kept:
        warnings.warn("none of the requested monitor slices lies in the channel region",
                      UserWarning, stacklevel=2)
    return kept


def parse_slice(schedule: Schedule, text: str) -> SliceLocator:
    """``inner:m,n`` (after ``InnerBS(m,n)``) or a bare event index."""
    t = text.strip()
    if t.lower().startswith("inner:"):
        try:
            m, n = (int(x) for x in t[6:].split(","))
        except ValueError:
            raise InvalidParameterError(f"bad slice locator {text!r}") from None
        return schedule.inner_slice(m, n)
    try:
        k = int(t)
    except ValueError:
        raise InvalidParameterError(f"bad slice locator {text!r}") from None
    if not 0 <= k < len(schedule):
        raise InvalidParameterError(f"event index {k} out of range")
    return SliceLocator(k)


def slices_from_spec(schedule: Schedule, specs: Iterable[str]) -> FrozenSet[SliceLocator]:
    out = set()
    for s in specs:
        if s.strip().lower() == "all":
            out.update(schedule.inner_slices())
        else:
            out.add(parse_slice(schedule, s))
    return frozenset(out)
