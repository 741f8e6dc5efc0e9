"""Kernel selection.

The compiled extension ``tlsw._ckernels`` is used when it was built and
importable; otherwise the numpy fallback in ``tlsw._kernels_py`` is used.
Setting ``TLSW_PURE_PYTHON=1`` forces the fallback.  Both backends accumulate
taps in the same order, so results agree to the last bit.
"""
import os

from . import _kernels_py

BACKEND = "python"
conv_dilated = _kernels_py.conv_dilated
corr_dilated = _kernels_py.corr_dilated

if os.environ.get("TLSW_PURE_PYTHON", "").strip() not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        BACKEND = "cython"
        conv_dilated = _ckernels.conv_dilated
        corr_dilated = _ckernels.corr_dilated


def backends():
    """Mapping of available backend name to ``(conv_dilated, corr_dilated)``."""
    out = {"python": (_kernels_py.conv_dilated, _kernels_py.corr_dilated)}
    try:
        from . import _ckernels
    except ImportError:
        return out
    out["cython"] = (_ckernels.conv_dilated, _ckernels.corr_dilated)
    return out
