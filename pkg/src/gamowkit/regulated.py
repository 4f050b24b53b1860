"""Regulated integrals of resonance-state products.

Beyond the potential cutoff every solution is a finite combination of
outgoing/incoming free waves, so products of two of them have exact tails
that are finite sums c * r^p * e^{iqr}.  Integrals over [0, inf) are split
at the last grid node: the interior part is ordinary quadrature, the tail
part has closed forms.  For exponentially growing tails (resonance
products, Im q < 0) the integral is defined through the Gaussian regulator
exp(-nu r^2) and the limit nu -> 0, evaluated on a fixed nu sequence and
extrapolated polynomially; the Abel closed form -c e^{iqR}/(iq) serves as
an independent route where both are defined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import roots_laguerre, wofz

from .errors import ExtrapolationUnstable, TailDivergence
from .solver import RadialGrid

NU_SEQUENCE = (1e-2, 7.5e-3, 5e-3, 2.5e-3, 1e-3)

_Q_FLOOR = 1e-12
_RAY_NODES = 96


@dataclass(frozen=True)
class TailTerm:
    """One tail contribution coef * r^power * exp(i q r), valid r >= r0."""

    coef: complex
    q: complex
    power: int = 0


def product_tails(tails_a, tails_b):
    """Tail terms of the pointwise product of two tail sums."""
    out = {}
    for ta in tails_a:
        for tb in tails_b:
            key = (ta.q + tb.q, ta.power + tb.power)
            out[key] = out.get(key, 0.0) + ta.coef * tb.coef
    return tuple(TailTerm(c, q, p) for (q, p), c in out.items() if c != 0.0)


def tail_values(tails, r):
    """Evaluate a tail sum at radii r (for matching against grid data)."""
    r = np.asarray(r, dtype=complex)
    total = np.zeros_like(r)
    for t in tails:
        total += t.coef * r**t.power * np.exp(1j * t.q * r)
    return total


def abel_tail(q: complex, power: int, r0: float) -> complex:
    """Abel-limit integral of r^power e^{iqr} over [r0, inf).

    Closed-form recursion for power >= 0.  Negative powers are evaluated on
    the rotated ray r = r0 + s e^{i theta}, theta = pi/2 - arg q, where the
    integrand decays as e^{-|q| s}; the ray never meets the origin so the
    integer pole of r^power is harmless.
    """
    if abs(q) < _Q_FLOOR:
        raise TailDivergence("tail term with q = 0 has no regulated limit")
    if power >= 0:
        val = -np.exp(1j * q * r0) / (1j * q)
        for p in range(1, power + 1):
            val = -(r0**p * np.exp(1j * q * r0) + p * val) / (1j * q)
        return complex(val)
    theta = 0.5 * np.pi - np.angle(q)
    ray = np.exp(1j * theta)
    x, w = roots_laguerre(_RAY_NODES)
    s = x / abs(q)
    pts = r0 + s * ray
    # weight e^{-x} already in w; residual phase is exactly e^{iq r0}
    vals = pts**power
    return complex(np.exp(1j * q * r0) * ray / abs(q) * np.dot(w, vals))


def _moment_series(qt: complex, j: int, nu: float) -> complex:
    """M_j = int_0^inf s^j e^{i qt s - nu s^2} ds by the expansion of the
    gaussian factor, sum_n (-nu)^n/n! (2n+j)!/(-i qt)^{2n+j+1}.

    Asymptotic in nu; usable while terms decrease, i.e. |qt|^2/(4 nu) large.
    """
    base = 1.0 / (-1j * qt)
    term = base ** (j + 1)
    for m in range(1, j + 1):
        term *= m
    total = term
    for n in range(1, 64):
        term *= -nu / n * (2 * n + j) * (2 * n + j - 1) * base * base
        if abs(term) > abs(total):
            break
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return total


def gauss_tail(q: complex, power: int, r0: float, nu: float) -> complex:
    """Integral of r^power e^{iqr - nu r^2} over [r0, inf), closed form.

    The power-0 case reduces to the complementary error function via the
    Faddeeva function.  Higher powers use the shifted moments M_j at
    qt = q + 2 i nu r0: the derivative recursion
    2 nu M_j = i qt M_{j-1} + (j-1) M_{j-2} cancels badly when nu is small
    against qt^2, so that regime goes through the asymptotic series instead.
    """
    if abs(q) < _Q_FLOOR:
        raise TailDivergence("tail term with q = 0 has no regulated limit")
    if power < 0:
        raise ValueError("gaussian tail recursion needs power >= 0")
    rt = np.sqrt(nu)
    edge = np.exp(1j * q * r0 - nu * r0 * r0)
    qt = q + 2j * nu * r0
    if power == 0:
        return complex(
            0.5 * np.sqrt(np.pi) / rt * edge * wofz(1j * rt * r0 + q / (2.0 * rt))
        )
    if abs(qt) ** 2 >= 256.0 * nu:
        moments = [_moment_series(qt, j, nu) for j in range(power + 1)]
    else:
        m0 = 0.5 * np.sqrt(np.pi) / rt * wofz(qt / (2.0 * rt))
        moments = [m0]
        m_prev, m_cur = None, m0
        for j in range(1, power + 1):
            nxt = 1j * qt * m_cur
            nxt += 1.0 if j == 1 else (j - 1) * m_prev
            m_prev, m_cur = m_cur, nxt / (2.0 * nu)
            moments.append(m_cur)
    total = 0.0 + 0.0j
    binom = 1.0
    for j in range(power + 1):
        binom = binom * (power - j + 1) / j if j else 1.0
        total += binom * r0 ** (power - j) * moments[j]
    return complex(edge * total)


def _berggren_ok(q: complex) -> bool:
    # growing tails are regularizable only while |Im q| < |Re q|
    return q.imag >= 0.0 or abs(q.imag) < abs(q.real)


def _neville(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0, full degree."""
    tab = list(ys)
    n = len(tab)
    for level in range(1, n):
        for i in range(n - level):
            x0, x1 = xs[i], xs[i + level]
            tab[i] = (x1 * tab[i] - x0 * tab[i + 1]) / (x1 - x0)
    return tab[0]


@dataclass(frozen=True)
class RegulatedIntegral:
    value: complex
    method: str
    nu_sequence: tuple = ()
    samples: tuple = ()
    extrapolation_error: float = 0.0
    interior: complex = 0.0
    tail: complex = 0.0


def _interior(grid: RadialGrid, values, nu: float = 0.0) -> complex:
    w = grid.quad_weights()
    if nu:
        return complex(np.dot(w, values * np.exp(-nu * grid.r**2)))
    return complex(np.dot(w, values))


def regulated_integral(
    grid: RadialGrid,
    values,
    tails,
    nu_sequence=NU_SEQUENCE,
    method: str = "auto",
    match_tol: float = 1e-6,
) -> RegulatedIntegral:
    """Integral over [0, inf) of a function given on the grid with an exact
    tail description for r >= grid.r[-1].

    method: "gaussian" (regulator + nu -> 0 extrapolation), "exact"
    (Abel-limit closed forms), or "auto" (gaussian when every tail term
    admits it, else exact).
    """
    values = np.asarray(values, dtype=complex)
    if values.shape != grid.r.shape:
        raise ValueError("values must be sampled on the full grid")
    r0 = float(grid.r[-1])
    tails = tuple(tails)

    if tails:
        # the tail description must continue the grid data
        here = tail_values(tails, np.array([r0]))[0]
        scale = max(abs(values[-1]), abs(here), 1e-300)
        if abs(here - values[-1]) > match_tol * scale:
            raise ValueError(
                f"tail terms disagree with grid data at r={r0:.6g}: "
                f"{here:.6e} vs {values[-1]:.6e}"
            )

    for t in tails:
        if abs(t.q) < _Q_FLOOR:
            raise TailDivergence("tail term with q = 0 has no regulated limit")

    gaussian_ok = all(_berggren_ok(t.q) and t.power >= 0 for t in tails)
    if method == "auto":
        method = "gaussian" if gaussian_ok else "exact"

    if method == "exact":
        tail = sum(
            (abel_tail(t.q, t.power, r0) * t.coef for t in tails), 0.0 + 0.0j
        )
        inter = _interior(grid, values)
        return RegulatedIntegral(
            value=inter + tail, method="ExactTail", interior=inter, tail=tail
        )

    if method != "gaussian":
        raise ValueError(f"unknown method {method!r}")
    if not gaussian_ok:
        bad = [t for t in tails if not (_berggren_ok(t.q) and t.power >= 0)]
        if any(not _berggren_ok(t.q) for t in bad):
            raise TailDivergence(
                "tail growth too fast for the gaussian regulator: "
                + ", ".join(f"q={t.q:.4g}" for t in bad)
            )
        raise ValueError("negative tail powers require method='exact'")

    nus = tuple(sorted(nu_sequence, reverse=True))
    samples = []
    for nu in nus:
        tail = sum(
            (gauss_tail(t.q, t.power, r0, nu) * t.coef for t in tails), 0.0 + 0.0j
        )
        samples.append(_interior(grid, values, nu) + tail)
    full = _neville(nus, samples)
    dropped = _neville(nus[1:], samples[1:])
    err = abs(full - dropped)
    if err > 1e-6 * max(1.0, abs(full)):
        raise ExtrapolationUnstable(
            f"nu extrapolation unstable: {err:.3e} at value {abs(full):.3e}"
        )
    inter = _interior(grid, values)
    return RegulatedIntegral(
        value=full,
        method="GaussianExtrapolated",
        nu_sequence=nus,
        samples=tuple(samples),
        extrapolation_error=err,
        interior=inter,
        tail=full - inter,
    )
