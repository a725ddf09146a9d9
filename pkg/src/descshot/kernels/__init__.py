"""Per-pixel mask kernels with a compiled fast path.

``_native`` is a Cython extension built by setup.py; ``_pure`` is the
pure-Python implementation of the same functions. The compiled module is
preferred when importable; ``DESCSHOT_KERNELS=pure|native`` forces a
backend (used by the benchmark and the backend-equality tests). Both
backends implement identical algorithms and return identical values.
"""

import os

from . import _pure as pure

try:
    from . import _native as native
except ImportError:
    native = None

_forced = os.environ.get("DESCSHOT_KERNELS", "").strip().lower()
if _forced == "pure":
    _impl = pure
elif _forced == "native":
    if native is None:
        raise ImportError(
            "DESCSHOT_KERNELS=native but the compiled kernels are not built; "
            "run pip install -e . --no-build-isolation"
        )
    _impl = native
elif _forced:
    raise ImportError(f"unknown DESCSHOT_KERNELS value: {_forced!r}")
else:
    _impl = native if native is not None else pure


def backend_name() -> str:
    """Name of the active kernel backend ("native" or "pure")."""
    return "native" if _impl is native else "pure"


trace_outer_contour = _impl.trace_outer_contour
label_components = _impl.label_components
