"""Grid calculus helpers: cumulative Simpson quadrature and finite differences.

All routines assume a uniform grid. Endpoints of derivatives use second-order
one-sided stencils so quantities are defined on the full closed interval.
"""

from __future__ import annotations

import numpy as np


def cumulative_simpson(y: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral of samples `y` with I[0] = 0.

    Interior sub-intervals are integrated with the cubic through the four
    surrounding sample points (the boundary intervals use one-sided
    cubics), which is fourth-order accurate globally; on pairs of
    intervals the rule reduces to composite Simpson values up to the same
    order.
    """
    y = np.asarray(y)
    if y.shape[-1] < 4:
        if y.shape[-1] == 3:
            out = np.zeros_like(y, dtype=np.result_type(y.dtype, float))
            out[..., 1] = dx * (5.0 * y[..., 0] + 8.0 * y[..., 1] - y[..., 2]) / 12.0
            out[..., 2] = dx * (y[..., 0] + 4.0 * y[..., 1] + y[..., 2]) / 3.0
            return out
        raise ValueError("need at least 3 samples for cumulative quadrature")
    out = np.zeros_like(y, dtype=np.result_type(y.dtype, float))
    # first interval: cubic through points 0..3
    out[..., 1] = dx * (9.0 * y[..., 0] + 19.0 * y[..., 1]
                        - 5.0 * y[..., 2] + y[..., 3]) / 24.0
    # interior interval (k, k+1): cubic through points k-1..k+2
    incr = dx * (-y[..., :-3] + 13.0 * y[..., 1:-2]
                 + 13.0 * y[..., 2:-1] - y[..., 3:]) / 24.0
    out[..., 2:-1] = out[..., 1:2] + np.cumsum(incr, axis=-1)
    # last interval: mirrored one-sided cubic
    out[..., -1] = out[..., -2] + dx * (9.0 * y[..., -1] + 19.0 * y[..., -2]
                                        - 5.0 * y[..., -3] + y[..., -4]) / 24.0
    return out


def derivative(y: np.ndarray, dx: float, axis: int = 0) -> np.ndarray:
    """Second-order derivative on a uniform grid (central, one-sided ends)."""
    y = np.moveaxis(np.asarray(y), axis, 0)
    if y.shape[0] < 3:
        raise ValueError("need at least 3 samples for a second-order derivative")
    d = np.empty_like(y, dtype=np.result_type(y.dtype, float))
    d[1:-1] = (y[2:] - y[:-2]) / (2.0 * dx)
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx)
    d[-1] = (3.0 * y[-1] - 4.0 * y[-2] + y[-3]) / (2.0 * dx)
    return np.moveaxis(d, 0, axis)
