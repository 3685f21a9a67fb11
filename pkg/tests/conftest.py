import math

import numpy as np
import pytest

from zeno_tsvf.schedule import ProtocolParams, build_schedule
from zeno_tsvf.state import PhotonState, SinkId, absorb, detect_final, rotate, PathMode

ACCEPTANCE_LINES = []


def record_acceptance(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def sched():
    """Schedule factory: ``sched(M, N, bit)``."""
    def make(M, N, bit=0):
        return build_schedule(ProtocolParams(M, N, bit))
    return make


def reference_forward(schedule):
    """Object-level forward run through the state algebra (no kernels).

    Returns the list of per-slice ``PhotonState`` values, leak ledgers included.
    """
    pairs = {"OuterBS": (PathMode.A, PathMode.B), "InnerBS": (PathMode.B, PathMode.C)}
    thetas = {"OuterBS": math.pi / (2 * schedule.params.M),
              "InnerBS": math.pi / (2 * schedule.params.N)}
    state = PhotonState.initial()
    out = [state]
    for e in schedule.events:
        if e.kind in pairs:
            state = rotate(state, pairs[e.kind], thetas[e.kind])
        elif e.kind == "BobAbsorb":
            state = absorb(state, PathMode.C, SinkId.bob(e.m, e.n), e.index)
        elif e.kind == "D3Detect":
            state = absorb(state, PathMode.C, SinkId.d3(e.m), e.index)
        else:
            state = detect_final(state, e.index)
        out.append(state)
    return out


def vec(*xs):
    return np.array(xs, dtype=np.complex128)
