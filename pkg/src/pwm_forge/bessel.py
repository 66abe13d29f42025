"""Integer-order Bessel functions of the first kind by backward recurrence."""
from __future__ import annotations

import math

import numpy as np

_RESCALE = 1e150


def bessel_j(j_max: int, z: float) -> np.ndarray:
    """``J_0(z) .. J_{j_max}(z)`` for real ``z`` (Miller's algorithm).

    The recurrence ``J_{j-1} = (2j/z) J_j - J_{j+1}`` is run downward from an
    order well above both ``j_max`` and ``|z|`` and normalised with
    ``J_0 + 2 * sum(J_2m) = 1``.
    """
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    z = float(z)
    out = np.zeros(j_max + 1)
    if z == 0.0:
        out[0] = 1.0
        return out
    sign = 1.0
    if z < 0:
        # J_j(-z) = (-1)^j J_j(z)
        sign = -1.0
        z = -z

    top = max(j_max, int(z)) + 20 + int(math.sqrt(40.0 * max(j_max, z, 1.0)))
    top += top % 2
    vals = np.zeros(top + 2)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    for j in range(top, 0, -1):
        j_prev = (2.0 * j / z) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            vals /= _RESCALE
            norm /= _RESCALE
        vals[j - 1] = j_cur
        if (j - 1) % 2 == 0 and j - 1 > 0:
            norm += 2.0 * j_cur
    norm += vals[0]
    out[:] = vals[: j_max + 1] / norm
    if sign < 0:
        out[1::2] *= -1.0
    return out


def bessel_j_signed(j_max: int, z: float) -> tuple:
    """Orders ``-j_max .. j_max`` and the matching ``J_j(z)`` values."""
    pos = bessel_j(j_max, z)
    orders = np.arange(-j_max, j_max + 1)
    vals = np.where(orders < 0, ((-1.0) ** np.abs(orders)) * pos[np.abs(orders)], pos[np.abs(orders)])
    return orders, vals
