"""Parameter sweeps over (M, N, bit[, g]).

Points are evaluated independently, optionally in worker processes, and the
rows always come back ordered by the parameter tuple.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .errors import CapacityError, InvalidParameterError
from .eve import eve_information
from .pointer import PointerModel
from .schedule import LogicBit, ProtocolParams, build_schedule
from .tsvf import forward_evolve

DEFAULT_POINT_CAP = 10 ** 6
JOBS_ENV = "ZENO_TSVF_JOBS"

BASE_COLUMNS = ["M", "N", "bit", "p_D1", "p_D2", "sum_p_D3", "sum_p_absorb", "total"]
EVE_COLUMNS = ["g", "sigma", "couple_m", "couple_n", "I_bits", "tv"]


@dataclass(frozen=True)
class SweepSpec:
    M: Sequence[int]
    N: Sequence[int]
    bits: Sequence[int] = (0,)
    g: Sequence[float] = ()
    sigma: float = 1.0
    couple_at: Optional[Tuple[int, int]] = None
    max_points: int = DEFAULT_POINT_CAP

    def __post_init__(self) -> None:
        for name in ("M", "N", "bits"):
            if not getattr(self, name):
                raise InvalidParameterError(f"sweep list {name} is empty")
        if self.g and self.couple_at is None:
            raise InvalidParameterError("an eve sweep (g values) needs a coupling slice")
        if self.n_points > self.max_points:
            raise CapacityError(f"sweep has {self.n_points} points, cap is {self.max_points}")

    @property
    def eve(self) -> bool:
        return bool(self.g)

    @property
    def n_points(self) -> int:
        return len(self.M) * len(self.N) * len(self.bits) * max(1, len(self.g))

    def points(self) -> List[tuple]:
        gs = sorted(set(self.g)) if self.g else [None]
        return list(itertools.product(sorted(set(self.M)), sorted(set(self.N)),
                                      sorted(set(self.bits)), gs))

    @property
    def columns(self) -> List[str]:
        return BASE_COLUMNS + (EVE_COLUMNS if self.eve else [])


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _evaluate(point: tuple, sigma: float, couple_at: Optional[Tuple[int, int]]) -> list:
    M, N, bit, g = point
    _, rep = forward_evolve(build_schedule(ProtocolParams(M, N, bit)), record=False)
    row = [M, N, bit, rep.p_D1, rep.p_D2, rep.sum_p_D3, rep.p_absorbed, rep.total]
    if g is None:
        return row
    m, n = couple_at
    if m > M or n > N:
        return row + [g, sigma, m, n, None, None]
    pair = (build_schedule(ProtocolParams(M, N, LogicBit.ZERO)),
            build_schedule(ProtocolParams(M, N, LogicBit.ONE)))
    res = eve_information(pair, (m, n), PointerModel(g, sigma))
    return row + [g, sigma, m, n, res.mutual_information, res.tv_distance]


def _evaluate_chunk(args) -> List[list]:
    points, sigma, couple_at = args
    return [_evaluate(p, sigma, couple_at) for p in points]


def run_sweep(spec: SweepSpec, jobs: int = 1) -> Tuple[List[str], List[list]]:
    points = spec.points()
    if jobs <= 1 or len(points) < 2:
        rows = _evaluate_chunk((points, spec.sigma, spec.couple_at))
    else:
        size = max(1, len(points) // (4 * jobs))
        chunks = [(points[i:i + size], spec.sigma, spec.couple_at)
                  for i in range(0, len(points), size)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = [r for part in pool.map(_evaluate_chunk, chunks) for r in part]
    return spec.columns, rows
