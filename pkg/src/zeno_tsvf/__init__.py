"""Two-state-vector simulator for chained-Zeno counterfactual communication."""

__version__ = "0.1.0"

from .errors import (CapacityError, ContractViolation, ImpossiblePostSelectionError,
                     InvalidParameterError, PrecisionError, UndefinedABLError, ZenoError)
from .eve import EveResult, eve_information
from .kernels import BACKEND
from .monitor import (MonitorOutcome, blocked_kept_distribution, finite_size_found,
                      monitored_run,
                      never_found_equivalence_oracle, run_monitored)
from .pointer import PointerDistribution, PointerModel, couple_pointer, pointer_mean
from .schedule import (Event, LogicBit, ProtocolParams, Schedule, SliceLocator,
                       build_schedule, validate_monitor_slices)
from .state import (LeakRecord, PathMode, PhotonState, SinkId, absorb, detect_final,
                    inner_product, project, rotate)
from .tsvf import (PostSelection, RunReport, SliceRecord, TwoStateTrace, abl_probability,
                   backward_evolve, blocked_recursion_oracle, closed_form_pD1_unblocked,
                   forward_evolve, presence_trace_export, two_state_trace, weak_value)

__all__ = [
    "BACKEND",
    "CapacityError",
    "ContractViolation",
    "EveResult",
    "Event",
    "ImpossiblePostSelectionError",
    "InvalidParameterError",
    "LeakRecord",
    "LogicBit",
    "MonitorOutcome",
    "PathMode",
    "PhotonState",
    "PointerDistribution",
    "PointerModel",
    "PostSelection",
    "PrecisionError",
    "ProtocolParams",
    "RunReport",
    "Schedule",
    "SinkId",
    "SliceLocator",
    "SliceRecord",
    "TwoStateTrace",
    "UndefinedABLError",
    "ZenoError",
    "abl_probability",
    "absorb",
    "backward_evolve",
    "blocked_kept_distribution",
    "blocked_recursion_oracle",
    "build_schedule",
    "closed_form_pD1_unblocked",
    "couple_pointer",
    "detect_final",
    "eve_information",
    "finite_size_found",
    "forward_evolve",
    "inner_product",
    "monitored_run",
    "never_found_equivalence_oracle",
    "pointer_mean",
    "presence_trace_export",
    "project",
    "rotate",
    "run_monitored",
    "two_state_trace",
    "validate_monitor_slices",
    "weak_value",
]
