"""Backend selection for the splitting hot loop.

The compiled extension is used when it was built; otherwise the numpy
implementation is. Set ``DIRAC_TSFP_BACKEND=python`` to force the fallback.
"""
import os

from . import _pykernels

FREE = _pykernels.FREE
POTENTIAL = _pykernels.POTENTIAL

_impl = _pykernels
BACKEND = "python"
if os.environ.get("DIRAC_TSFP_BACKEND", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

run_stages = _impl.run_stages


def available_backends():
    """Map of backend name to its ``run_stages`` implementation."""
    backends = {"python": _pykernels.run_stages}
    try:
        from . import _ckernels
    except ImportError:
        return backends
    backends["cython"] = _ckernels.run_stages
    return backends
