"""Projective (nondemolition) monitoring of the transmission channel.

A monitored trajectory measures the channel projector at chosen slices.  A
"found" outcome collapses the photon into the channel, where it keeps
propagating; "absent" removes the channel component and renormalises.
Absorbers and detectors are sampled as terminal outcomes.

Randomness: a batch with seed ``s`` draws one ``(n_runs, D)`` block of
uniforms from ``numpy.random.Generator(PCG64(s))`` in row-major order, where
``D`` is the number of decision points (monitors, absorbers and the final
detection).  Trajectory ``i`` consumes row ``i`` only, column ``j`` belonging
to the ``j``-th decision point in schedule order, so any prefix of a batch
is reproducible on its own and chunks can be generated independently with
``PCG64.advance``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import AbstractSet, Dict, List, Tuple

import numpy as np

from . import kernels
from .errors import ImpossiblePostSelectionError, InvalidParameterError
from .schedule import (BOB_ABSORB, ProtocolParams, LogicBit, Schedule, SliceLocator,
                       build_schedule, validate_monitor_slices)
from .state import SinkId
from .tsvf import _event_sinks, forward_evolve

BEFORE_ABSORBER = "before_absorber"
AFTER_ABSORBER = "after_absorber"
PLACEMENTS = (BEFORE_ABSORBER, AFTER_ABSORBER)

# conditioning events at or below this probability are reported as impossible
CONDITION_EPS = 1e-24
_CHUNK_DOUBLES = 1 << 22


@dataclass(frozen=True)
class MonitorOutcome:
    detector: SinkId
    found_events: Tuple[SliceLocator, ...]


class MonitorBatch:
    """Outcomes of ``n_runs`` monitored trajectories."""

    def __init__(self, schedule: Schedule, monitors: List[SliceLocator], seed: int,
                 event: np.ndarray, port: np.ndarray, found: np.ndarray):
        self.schedule = schedule
        self.monitors = monitors
        self.seed = seed
        self.event = event
        self.port = port
        self.found = found

    @property
    def n_runs(self) -> int:
        return len(self.event)

    def detector(self, i: int) -> SinkId:
        sinks = _event_sinks(self.schedule.events[int(self.event[i])])
        return sinks[int(self.port[i])]

    def outcome(self, i: int) -> MonitorOutcome:
        hits = np.flatnonzero(self.found[i])
        return MonitorOutcome(self.detector(i), tuple(self.monitors[j] for j in hits))

    def detector_counts(self, mask=None) -> Dict[str, int]:
        idx = np.arange(self.n_runs) if mask is None else np.flatnonzero(mask)
        keys = self.event[idx] * 2 + self.port[idx]
        counts: Counter = Counter()
        for key, c in zip(*np.unique(keys, return_counts=True)):
            sink = _event_sinks(self.schedule.events[int(key) // 2])[int(key) % 2]
            counts[sink.label] += int(c)
        return dict(counts)

    def never_found(self) -> np.ndarray:
        return ~self.found.any(axis=1)

    def found_given(self, sink: SinkId) -> float:
        """Fraction of runs ending at ``sink`` in which some monitor fired."""
        k = self.schedule.sink_event(sink)
        hits = (self.event == k) & (self.port == (1 if sink.kind == "D2" else 0))
        n = int(hits.sum())
        return float((~self.never_found() & hits).sum() / n) if n else math.nan

    def summary(self) -> dict:
        hist = Counter(self.found.sum(axis=1).tolist())
        return {
            "n_runs": self.n_runs,
            "seed": self.seed,
            "detector_counts": self.detector_counts(),
            "found_histogram": {str(k): v for k, v in sorted(hist.items())},
            "never_found_detector_counts": self.detector_counts(self.never_found()),
        }


def _monitor_flags(schedule: Schedule, monitors: List[SliceLocator], placement: str) -> np.ndarray:
    if placement not in PLACEMENTS:
        raise InvalidParameterError(f"placement must be one of {PLACEMENTS}")
    flags = np.zeros(len(schedule), dtype=np.int8)
    for loc in monitors:
        k = loc.after_event_index
        if (placement == AFTER_ABSORBER and k + 1 < len(schedule)
                and schedule.events[k + 1].kind == BOB_ABSORB):
            k += 1
        flags[k] = 1
    return flags


def run_monitored(schedule: Schedule, monitor: AbstractSet[SliceLocator], seed: int,
                  n_runs: int, placement: str = BEFORE_ABSORBER) -> MonitorBatch:
    """Sample ``n_runs`` monitored trajectories, deterministically in ``seed``."""
    if n_runs < 1:
        raise InvalidParameterError("n_runs must be >= 1")
    if not 0 <= int(seed) < 2 ** 64:
        raise InvalidParameterError("seed must be a 64-bit unsigned integer")
    monitor = frozenset(monitor)
    kept = validate_monitor_slices(schedule, monitor) if monitor else frozenset()
    if kept != monitor:
        raise InvalidParameterError("monitor slices must follow an InnerBS event")
    monitors = sorted(kept)
    flags = _monitor_flags(schedule, monitors, placement)
    c = schedule.compiled
    n_draws = len(monitors) + int(np.count_nonzero(c["op"] != 0))

    event = np.empty(n_runs, dtype=np.int64)
    port = np.empty(n_runs, dtype=np.int8)
    found = np.zeros((n_runs, len(monitors)), dtype=np.uint8)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    chunk = max(1, _CHUNK_DOUBLES // n_draws)
    for lo in range(0, n_runs, chunk):
        hi = min(n_runs, lo + chunk)
        u = rng.random((hi - lo, n_draws))
        kernels.trajectories(c["op"], c["mi"], c["mj"], c["cos"], c["sin"], flags, u,
                             event[lo:hi], port[lo:hi], found[lo:hi])
    return MonitorBatch(schedule, monitors, int(seed), event, port, found)


def monitored_run(schedule: Schedule, monitor: AbstractSet[SliceLocator], seed: int,
                  placement: str = BEFORE_ABSORBER) -> MonitorOutcome:
    """One monitored trajectory (row 0 of the batch with the same seed)."""
    return run_monitored(schedule, monitor, seed, 1, placement).outcome(0)


def never_found_equivalence_oracle(M: int, N: int) -> Dict[SinkId, float]:
    """Detector distribution of the open, fully monitored run given "never found".

    Zeroes the channel amplitude after every inner beam splitter (the
    never-found branch, unnormalised) and renormalises once at the end.
    """
    params = ProtocolParams(M, N, LogicBit.ZERO)
    to, ti = math.pi / (2 * params.M), math.pi / (2 * params.N)
    co, so, ci = math.cos(to), math.sin(to), math.cos(ti)
    a, b = 1.0, 0.0
    d3 = {}
    for m in range(1, M + 1):
        a, b = co * a - so * b, so * a + co * b
        for _ in range(N):
            b = ci * b  # the channel share si * b is what "absent" discards
        d3[m] = 0.0  # nothing reaches D3 once the channel is emptied
    kept = a * a + b * b
    if kept <= CONDITION_EPS:
        raise ImpossiblePostSelectionError(
            f"'never found' has probability {kept:.3g} at M={M}, N={N}")
    out = {SinkId.d1(): a * a / kept, SinkId.d2(): b * b / kept}
    out.update({SinkId.d3(m): p for m, p in d3.items()})
    return out


def finite_size_found(M: int, N: int) -> Dict[str, float]:
    """Finite-size residue of "a D1 click implies the channel monitor fires".

    ``d1_ratio`` is blocked ``p_D1`` over unblocked ``p_D1``: never-found
    runs behave as blocked ones, so this is the rate of D1 clicks left
    unexplained by a monitor hit.  It vanishes only as ``M, N`` grow.
    ``p_found`` is the probability that at least one monitor fires.
    """
    params = ProtocolParams(M, N, LogicBit.ZERO)
    _, open_rep = forward_evolve(build_schedule(params), record=False)
    _, blocked = forward_evolve(build_schedule(params.with_bit(LogicBit.ONE)), record=False)
    never = blocked.p_D1 + blocked.p_D2 + math.fsum(blocked.p_D3.values())
    ratio = blocked.p_D1 / open_rep.p_D1 if open_rep.p_D1 > CONDITION_EPS else math.nan
    return {"blocked_p_D1": blocked.p_D1, "open_p_D1": open_rep.p_D1,
            "d1_ratio": ratio, "p_found": 1.0 - never}


def blocked_kept_distribution(M: int, N: int) -> Dict[SinkId, float]:
    """Blocked run's detector distribution conditioned on no absorption."""
    _, rep = forward_evolve(build_schedule(ProtocolParams(M, N, LogicBit.ONE)), record=False)
    kept = math.fsum([rep.p_D1, rep.p_D2, *rep.p_D3.values()])
    if kept <= CONDITION_EPS:
        raise ImpossiblePostSelectionError(f"blocked run never survives at M={M}, N={N}")
    out = {SinkId.d1(): rep.p_D1 / kept, SinkId.d2(): rep.p_D2 / kept}
    out.update({SinkId.d3(m): p / kept for m, p in rep.p_D3.items()})
    return out
