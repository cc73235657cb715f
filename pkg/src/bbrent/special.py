"""Numerically stable special functions used by the bath kernels.

All functions accept scalars or numpy arrays and are pure.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

__all__ = [
    "sine_integral",
    "cin",
    "coth_half",
    "geometric_weight",
    "aniso_weight",
    "binary_entropy",
]

_EULER_GAMMA = 0.5772156649015328606


def sine_integral(x):
    """Si(x) = integral of sin(u)/u from 0 to x.

    Odd in x; tends to +-pi/2 for x -> +-inf. Backed by scipy's sici,
    which switches between the power series and the asymptotic auxiliary
    functions internally, so arguments up to and beyond 1e9 are fine.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("sine_integral: argument must be finite")
    si, _ = _sp.sici(x)
    if np.ndim(si) == 0:
        return float(si)
    return si


def cin(x):
    """Cin(x) = integral of (1 - cos u)/u from 0 to x; even in x.

    Related to the cosine integral by Cin(x) = gamma + log|x| - Ci(|x|),
    but that difference cancels catastrophically for small x, so a power
    series takes over below |x| = 4.
    """
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ValueError("cin: argument must be finite")
    ax = np.abs(x)
    out = np.empty_like(ax)

    small = ax <= 4.0
    if np.any(small):
        xs = ax[small]
        x2 = xs * xs
        # sum_{k>=1} (-1)^(k+1) x^(2k) / (2k (2k)!)
        term = x2 / 4.0
        total = term.copy()
        for k in range(2, 26):
            term *= -x2 * (2 * k - 2) / ((2 * k) * (2 * k) * (2 * k - 1))
            total += term
        out[small] = total
    if np.any(~small):
        xl = ax[~small]
        _, ci = _sp.sici(xl)
        out[~small] = _EULER_GAMMA + np.log(xl) - ci
    if np.ndim(out) == 0:
        return float(out)
    return out


def coth_half(y):
    """coth(y/2) for y > 0, stable at both ends.

    Uses the Laurent expansion 2/y + y/6 below 1e-4 and returns exactly
    1.0 above 40 where the correction is below double precision.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0.0):
        raise ValueError("coth_half: argument must be > 0")
    out = np.empty_like(y)
    tiny = y < 1e-4
    big = y > 40.0
    mid = ~(tiny | big)
    out[tiny] = 2.0 / y[tiny] + y[tiny] / 6.0
    out[big] = 1.0
    out[mid] = 1.0 / np.tanh(0.5 * y[mid])
    if np.ndim(out) == 0:
        return float(out)
    return out


def aniso_weight(x):
    """g(x) = cos(x)/x^2 - sin(x)/x^3, the anisotropic part of the
    angular weights; g(0) = -1/3 and |g| <= 1/3 on x >= 0.

    Below x = 1e-2 the closed form loses ~x^-3 digits to cancellation,
    so the Taylor form -1/3 + x^2/30 - x^4/840 is used there.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-2
    xs = x[small]
    out[small] = -1.0 / 3.0 + xs * xs / 30.0 - xs**4 / 840.0
    xl = x[~small]
    out[~small] = np.cos(xl) / xl**2 - np.sin(xl) / xl**3
    if np.ndim(out) == 0:
        return float(out)
    return out


def geometric_weight(nu: int, x):
    """Angular weight 1/3 + (-1)^nu (cos x/x^2 - sin x/x^3) for bath nu.

    nu = 1 selects the cos-wave bath (limit 2/3 at x -> 0), nu = 2 the
    sin-wave bath (limit 0). The two weights sum to 2/3 identically.
    """
    if nu not in (1, 2):
        raise ValueError(f"geometric_weight: nu must be 1 or 2, got {nu}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("geometric_weight: argument must be >= 0")
    sign = -1.0 if nu == 1 else 1.0
    out = 1.0 / 3.0 + sign * aniso_weight(x)
    if np.ndim(out) == 0:
        return float(out)
    return out


def binary_entropy(x):
    """h(x) = -x log2 x - (1-x) log2(1-x) on [0, 1], with 0 log 0 := 0."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise ValueError("binary_entropy: argument must lie in [0, 1]")
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -xi * np.log2(xi) - (1.0 - xi) * np.log2(1.0 - xi)
    if np.ndim(out) == 0:
        return float(out)
    return out
