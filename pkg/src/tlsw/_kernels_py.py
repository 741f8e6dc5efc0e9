"""Pure numpy implementations of the dilated circular filtering kernels.

Both functions act row-wise on a 2-D array ``x`` of shape ``(rows, T)``.
"""
import numpy as np


def conv_dilated(x, f, step):
    """``y[:, k] = sum_m f[m] * x[:, (k - m*step) % T]``."""
    x = np.ascontiguousarray(x, dtype=float)
    T = x.shape[-1]
    y = np.zeros_like(x)
    for m, fm in enumerate(f):
        if fm != 0.0:
            y += fm * np.roll(x, (m * step) % T, axis=-1)
    return y


def corr_dilated(x, f, step):
    """Adjoint of :func:`conv_dilated`: ``y[:, k] = sum_m f[m] * x[:, (k + m*step) % T]``."""
    x = np.ascontiguousarray(x, dtype=float)
    T = x.shape[-1]
    y = np.zeros_like(x)
    for m, fm in enumerate(f):
        if fm != 0.0:
            y += fm * np.roll(x, -((m * step) % T), axis=-1)
    return y
