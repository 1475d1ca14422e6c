"""Kernel selection: the compiled extension when importable, numpy otherwise."""
import os

from . import _kernels_py

try:
    if os.environ.get("SSHG_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _kernels as _impl
    COMPILED = True
except ImportError:
    _impl = _kernels_py
    COMPILED = False

accel = _impl.accel
energy = _impl.energy
momentum = _impl.momentum
defect_closure = _impl.defect_closure
rk4_defect_step = _impl.rk4_defect_step

__all__ = ["COMPILED", "accel", "defect_closure", "energy", "momentum", "rk4_defect_step"]
