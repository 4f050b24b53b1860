"""Riccati-Bessel and Riccati-Hankel functions for complex argument.

The outgoing function used throughout is

    hplus_l(z) = i**(l+1) * z * h1_l(z) = exp(iz) * sum_m c_lm (i/(2z))**m

with c_lm = (l+m)! / (m! (l-m)!).  This normalization tends to exp(iz) for
large z with no l-dependent phase, which keeps the outgoing boundary
condition of the solver uniform in l.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

__all__ = ["riccati_hplus", "riccati_hminus", "riccati_j"]


@lru_cache(maxsize=None)
def _coeffs(ell: int) -> tuple[float, ...]:
    if ell < 0:
        raise ValueError(f"ell must be >= 0, got {ell}")
    return tuple(
        factorial(ell + m) / (factorial(m) * factorial(ell - m)) for m in range(ell + 1)
    )


def _poly_pair(ell: int, t):
    """S0 = sum c_m t^m and S1 = sum m c_m t^m, by Horner."""
    c = _coeffs(ell)
    s0 = np.full_like(t, c[ell])
    s1 = ell * s0
    for m in range(ell - 1, -1, -1):
        s0 = s0 * t + c[m]
        s1 = s1 * t + m * c[m]
    return s0, s1


def riccati_hplus(ell: int, z):
    """Outgoing Riccati-Hankel function and its first two z derivatives.

    Returns the triple (h, h', h'').  The second derivative comes from the
    defining equation h'' = (l(l+1)/z**2 - 1) h, which is exact.
    """
    z = np.asarray(z, dtype=complex)
    t = 0.5j / z
    s0, s1 = _poly_pair(ell, t)
    e = np.exp(1j * z)
    h = e * s0
    dh = e * (1j * s0 - s1 / z)
    d2h = (ell * (ell + 1) / z**2 - 1.0) * h
    return h, dh, d2h


def riccati_hminus(ell: int, z):
    """Incoming counterpart, equal to riccati_hplus evaluated at -z."""
    z = np.asarray(z, dtype=complex)
    t = -0.5j / z
    s0, s1 = _poly_pair(ell, t)
    e = np.exp(-1j * z)
    h = e * s0
    dh = e * (-1j * s0 - s1 / z)
    d2h = (ell * (ell + 1) / z**2 - 1.0) * h
    return h, dh, d2h


def _riccati_j_series(ell: int, z):
    # jhat = z^{l+1} sum_s (-z^2/2)^s / (s! (2l+2s+1)!!); converges everywhere,
    # used only where the Hankel combination would cancel
    dfac = 1.0
    for m in range(1, 2 * ell + 2, 2):
        dfac *= m
    term = z ** (ell + 1) / dfac
    total = term.copy()
    z2 = z * z
    for s in range(1, 60):
        term = term * (-0.5 * z2) / (s * (2 * ell + 2 * s + 1))
        total += term
        if np.all(np.abs(term) <= 1e-17 * (np.abs(total) + 1e-300)):
            break
    return total


def riccati_j(ell: int, z):
    """Regular Riccati-Bessel function z * j_l(z) for complex z."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    small = np.abs(z) < 0.5 + ell
    if np.any(small):
        out[small] = _riccati_j_series(ell, z[small])
    big = ~small
    if np.any(big):
        hp = riccati_hplus(ell, z[big])[0]
        hm = riccati_hminus(ell, z[big])[0]
        out[big] = ((-1j) ** (ell + 1) * hp + 1j ** (ell + 1) * hm) / 2.0
    return complex(out[0]) if scalar else out
