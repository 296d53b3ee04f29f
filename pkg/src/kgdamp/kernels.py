"""Backend selection for the hot loops.

The compiled ``_ckernels`` module is used when it imports; otherwise the
numpy versions in ``_pykernels`` are bound. Setting ``KGDAMP_PURE_PYTHON=1``
before import forces the fallback. ``set_backend`` switches at runtime,
which the benchmark and the parity tests rely on.
"""
import os

from . import _pykernels

try:
    if os.environ.get("KGDAMP_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

_FUNCS = ("power_nonlinearity", "advance", "weighted_sum_sq", "abs_power_sum", "all_finite")

BACKEND = None


def available_backends():
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "cython")
    return names


def backend_module(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        if _ckernels is None:
            raise ValueError("cython backend is not compiled")
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def set_backend(name):
    """Bind the module-level kernel functions to backend ``name``."""
    global BACKEND
    mod = backend_module(name)
    g = globals()
    for fn in _FUNCS:
        g[fn] = getattr(mod, fn)
    BACKEND = name


set_backend(available_backends()[0])
