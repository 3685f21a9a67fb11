"""Kernel backend selection.

The compiled extension is used when importable; ``ZENO_TSVF_PURE=1`` forces
the pure-Python twin.  Both expose ``evolve``, ``backward`` and
``trajectories`` with identical semantics and bit-identical output.
"""
import os

from . import _kernels_py

if os.environ.get("ZENO_TSVF_PURE", "").strip() not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "cython"

evolve = _impl.evolve
backward = _impl.backward
trajectories = _impl.trajectories


def available_backends():
    """Map backend name to module, for parity tests and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out


def run(compiled, state, start, stop, leaks, slices=None):
    """``evolve`` on a schedule's compiled opcode dict."""
    evolve(compiled["op"], compiled["mi"], compiled["mj"], compiled["cos"],
           compiled["sin"], state, start, stop, leaks, slices)


def run_backward(compiled, phi, stop, out):
    backward(compiled["op"], compiled["mi"], compiled["mj"], compiled["cos"],
             compiled["sin"], phi, stop, out)
