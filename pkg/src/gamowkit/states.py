"""Normalized states at Jost-function zeros and the pair {u, u_hat} at a
double zero.

Normalization never integrates blindly: at a simple zero k_n the squared
norm comes from the derivative rule

    N^2 = i F(-k_n) F'(k_n) / (4 k_n^(2l+2)),

and the regulated integral of u^2 is kept as a cross-check.  At a double
zero F' vanishes and the rule is replaced by its second-derivative
counterpart; the state there pairs with a companion built from dphi/dE,
completed by a multiple of phi so the pair block-diagonalizes the
Hamiltonian with a one-sided coupling (H - E_m) u_hat = X_m^2 u.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    BoundDegeneracyImpossible,
    MultiplicityMismatch,
    SecondDerivativeVanishes,
    TooCoarse,
)
from .potentials import PotentialSpec, evaluate_potential
from .regulated import TailTerm, product_tails, regulated_integral
from .solver import (
    DEFAULT_H,
    JostData,
    build_grid,
    jost_derivatives,
    jost_function,
    solve_regular,
)
from .zeros import _classify

# residual keys used by reports and the verification gate; the right-hand
# values are the external contract names, frozen
IDENTITY_CONTRACT = {
    "deriv_overlap": "eq64",
    "deriv_square": "eq65",
    "phi_hat_square": "eq67",
    "hat_overlap": "eq70",
    "u_square": "eq74",
    "u_hat_square": "eq75",
    "u_pair": "eq76",
}

ALLOWED_X = (1.0 + 0.0j, 2.0 + 0.0j, 1.0j)


def outgoing_tail_terms(ell: int, k: complex, coef: complex = 1.0):
    """Tail terms of coef * f+(k, r): exact for r beyond the cutoff."""
    out = []
    for m in range(ell + 1):
        c = factorial(ell + m) / (factorial(m) * factorial(ell - m))
        out.append(TailTerm(coef * 1j**ell * c * (0.5j / k) ** m, k, -m))
    return tuple(out)


def outgoing_kderiv_tail_terms(ell: int, k: complex, coef: complex = 1.0):
    """Tail terms of coef * d/dk f+(k, r)."""
    out = []
    for m in range(ell + 1):
        c = factorial(ell + m) / (factorial(m) * factorial(ell - m))
        amp = coef * 1j**ell * c * (0.5j) ** m
        if m:
            out.append(TailTerm(-m * amp * k ** (-m - 1), k, -m))
        out.append(TailTerm(1j * amp * k**-m, k, 1 - m))
    return tuple(out)


def _merge(tails):
    acc = {}
    for t in tails:
        key = (t.q, t.power)
        acc[key] = acc.get(key, 0.0) + t.coef
    return tuple(TailTerm(c, q, p) for (q, p), c in acc.items() if c != 0.0)


def _scaled(tails, s: complex):
    return tuple(TailTerm(t.coef * s, t.q, t.power) for t in tails)


def _wave_amplitudes(ell: int, k: complex, f_minus: complex, d1_minus: complex):
    """(a, da/dk) of the outgoing component of phi, phi = a f+ + b f-.

    a depends on F at -k only, so it stays meaningful at zeros of F where
    b drops out.  d/dk F(-k) = -F'(-k) by the chain rule.
    """
    pref = -0.5j * (-1.0) ** ell
    a = pref * k ** (-ell - 1) * f_minus
    adot = pref * (-(ell + 1) * k ** (-ell - 2) * f_minus - k ** (-ell - 1) * d1_minus)
    return a, adot


@dataclass(frozen=True, eq=False)
class GamowState:
    """State at a simple zero, normalized by the derivative rule."""

    k: complex
    ell: int
    grid: object
    u: np.ndarray
    du: np.ndarray
    norm2: complex
    tails: tuple
    state_class: str
    norm_residual: float
    jost: JostData

    @property
    def energy(self) -> complex:
        return self.k * self.k


def normalize_simple(
    spec: PotentialSpec,
    k_n: complex,
    ell: int = 0,
    h: float = DEFAULT_H,
    grid=None,
    zero_tol: float = 1e-6,
) -> GamowState:
    """Build the normalized state at a simple zero k_n of F.

    Raises MultiplicityMismatch when F' also vanishes there (the norm rule
    has no simple-zero form at a double zero).
    """
    k_n = complex(k_n)
    if grid is None:
        grid = build_grid(spec, ell, h)
    jd = jost_derivatives(spec, k_n, ell=ell, h=h, grid=grid)
    scale = max(abs(jd.d1) * abs(k_n), abs(jd.d2) * abs(k_n) ** 2, 1.0)
    if abs(jd.f) > zero_tol * scale:
        raise ValueError(f"F({k_n}) = {jd.f:.3e} is not numerically zero")
    if abs(jd.d1) * abs(k_n) <= zero_tol * max(abs(jd.d2) * abs(k_n) ** 2, 1.0):
        raise MultiplicityMismatch(
            "F' vanishes too: this is a higher-order zero, use the chain"
        )
    f_minus = jost_function(spec, -k_n, ell=ell, h=h)
    norm2 = 1j * f_minus * jd.d1 / (4.0 * k_n ** (2 * (ell + 1)))
    kind = _classify(k_n)
    if kind == "bound":
        # the rule gives a real positive number there; scrub roundoff
        if abs(norm2.imag) > 1e-8 * abs(norm2):
            raise ValueError(f"bound-state norm came out complex: {norm2:.6e}")
        norm2 = complex(norm2.real)
    n = np.sqrt(norm2)

    phi = solve_regular(grid, k_n)[0]
    u = phi.values[:, 0] / n
    du = phi.dvalues[:, 0] / n
    a, _ = _wave_amplitudes(ell, k_n, f_minus, 0.0)
    tails = outgoing_tail_terms(ell, k_n, coef=a / n)

    check = regulated_integral(grid, u * u, product_tails(tails, tails))
    return GamowState(
        k=k_n,
        ell=ell,
        grid=grid,
        u=u,
        du=du,
        norm2=norm2,
        tails=tails,
        state_class=kind,
        norm_residual=float(abs(check.value - 1.0)),
        jost=jd,
    )


@dataclass(frozen=True, eq=False)
class JordanChain:
    """The pair {u, u_hat} at a double zero k_m.

    u_hat = X_m (dphi/dE + C_l phi) / N with dphi/dE = dphi/dk / (2 k_m);
    the constant C_l is fixed by the requirement that the regulated square
    of u_hat vanish.  The pair satisfies (H - E_m) u = 0 and
    (H - E_m) u_hat = X_m^2 u.
    """

    k: complex
    ell: int
    grid: object
    u: np.ndarray
    du: np.ndarray
    u_hat: np.ndarray
    du_hat: np.ndarray
    c_ell: complex
    norm2: complex
    x_m: complex
    u_tails: tuple
    u_hat_tails: tuple
    phi: np.ndarray
    phi_dot: np.ndarray
    phi_tails: tuple
    phi_dot_tails: tuple
    jost: JostData
    f_minus: complex
    d1_minus: complex

    @property
    def energy(self) -> complex:
        return self.k * self.k


def build_jordan_chain(
    spec: PotentialSpec,
    k_m: complex,
    ell: int = 0,
    h: float = DEFAULT_H,
    x_m: complex = 1.0,
    grid=None,
    zero_tol: float = 1e-6,
) -> JordanChain:
    """Construct {u, u_hat} at a double zero k_m of F."""
    k_m = complex(k_m)
    if abs(k_m.real) <= 1e-8 * abs(k_m) and k_m.imag > 0:
        raise BoundDegeneracyImpossible(
            "a bound state cannot be degenerate: F and F' share no zero on "
            "the positive imaginary axis"
        )
    if grid is None:
        grid = build_grid(spec, ell, h)
    jd = jost_derivatives(spec, k_m, ell=ell, h=h, grid=grid)
    jm = jost_derivatives(spec, -k_m, ell=ell, h=h, grid=grid)
    scale = abs(jd.d2) * abs(k_m) ** 2
    if scale < 1e-12 * max(1.0, abs(jd.d3) * abs(k_m) ** 3):
        raise SecondDerivativeVanishes(
            f"F'' = {jd.d2:.3e} at {k_m}: zero is of order three or higher"
        )
    if abs(jd.f) > zero_tol * scale or abs(jd.d1) * abs(k_m) > zero_tol * scale:
        raise MultiplicityMismatch(
            f"not a double zero: F = {jd.f:.3e}, F' = {jd.d1:.3e}"
        )
    x_m = complex(x_m)

    norm2 = 1j * jm.f * jd.d2 / (16.0 * k_m ** (2 * ell + 3))
    n = np.sqrt(norm2)
    c_ell = (
        (ell + 1) / k_m + jm.d1 / (2.0 * jm.f) - jd.d3 / (6.0 * jd.d2)
    ) / (2.0 * k_m)

    phi_s, phidot_s = solve_regular(grid, k_m, n_derivs=1)
    phi, dphi = phi_s.values[:, 0], phi_s.dvalues[:, 0]
    phidot, dphidot = phidot_s.values[:, 0], phidot_s.dvalues[:, 0]

    a, adot = _wave_amplitudes(ell, k_m, jm.f, jm.d1)
    phi_tails = outgoing_tail_terms(ell, k_m, coef=a)
    # b and db/dk both vanish at a double zero, so dphi/dk is outgoing too
    phidot_tails = _merge(
        outgoing_tail_terms(ell, k_m, coef=adot)
        + outgoing_kderiv_tail_terms(ell, k_m, coef=a)
    )

    phi_hat = phidot / (2.0 * k_m) + c_ell * phi
    dphi_hat = dphidot / (2.0 * k_m) + c_ell * dphi
    hat_tails = _merge(
        _scaled(phidot_tails, 1.0 / (2.0 * k_m)) + _scaled(phi_tails, c_ell)
    )

    return JordanChain(
        k=k_m,
        ell=ell,
        grid=grid,
        u=phi / (x_m * n),
        du=dphi / (x_m * n),
        u_hat=x_m * phi_hat / n,
        du_hat=x_m * dphi_hat / n,
        c_ell=c_ell,
        norm2=norm2,
        x_m=x_m,
        u_tails=_scaled(phi_tails, 1.0 / (x_m * n)),
        u_hat_tails=_scaled(hat_tails, x_m / n),
        phi=phi,
        phi_dot=phidot,
        phi_tails=phi_tails,
        phi_dot_tails=phidot_tails,
        jost=jd,
        f_minus=jm.f,
        d1_minus=jm.d1,
    )


def chain_identities(chain: JordanChain, method: str = "auto") -> dict[str, float]:
    """Relative residuals of the regulated-integral identities of the pair.

    Keys are the ones in IDENTITY_CONTRACT.  The first four compare
    regulated integrals of phi-level quantities against their closed forms
    in F and its derivatives; the last three check the normalized pair.
    """
    g, k, ell = chain.grid, chain.k, chain.ell
    jd = chain.jost
    kpow = k ** (2 * (ell + 1))

    def reg(va, vb, ta, tb):
        return regulated_integral(g, va * vb, product_tails(ta, tb), method=method)

    phi, phidot = chain.phi, chain.phi_dot
    pt, pdt = chain.phi_tails, chain.phi_dot_tails
    n2 = chain.norm2

    i_dot_phi = reg(phidot, phi, pdt, pt).value
    rhs64 = 0.125j * chain.f_minus * jd.d2 / kpow

    i_dot_dot = reg(phidot, phidot, pdt, pdt).value
    rhs65 = (
        0.125j
        * chain.f_minus
        * (jd.d3 / 3.0 - jd.d2 * (2.0 * (ell + 1) / k + chain.d1_minus / chain.f_minus))
        / kpow
    )

    phi_hat = phidot / (2.0 * k) + chain.c_ell * phi
    hat_tails = _merge(_scaled(pdt, 1.0 / (2.0 * k)) + _scaled(pt, chain.c_ell))
    i_hat_hat = reg(phi_hat, phi_hat, hat_tails, hat_tails).value
    i_phi_phi = reg(phi, phi, pt, pt).value
    i_hat_phi = reg(phi_hat, phi, hat_tails, pt).value

    u, uh = chain.u, chain.u_hat
    ut, uht = chain.u_tails, chain.u_hat_tails
    i_uu = reg(u, u, ut, ut).value
    i_hh = reg(uh, uh, uht, uht).value
    i_uh = reg(u, uh, ut, uht).value

    return {
        "deriv_overlap": abs(i_dot_phi - rhs64) / abs(rhs64),
        "deriv_square": abs(i_dot_dot - rhs65) / abs(rhs65),
        "phi_hat_square": abs(i_hat_hat - chain.c_ell**2 * i_phi_phi) / abs(n2),
        "hat_overlap": abs(i_hat_phi - n2) / abs(n2),
        "u_square": abs(i_uu),
        "u_hat_square": abs(i_hh),
        "u_pair": abs(i_uh - 1.0),
    }


def _fornberg(x, x0: float, m: int):
    """Finite-difference weights for the m-th derivative at x0 on nodes x."""
    n = len(x)
    d = np.zeros((m + 1, n))
    d[0, 0] = 1.0
    c1 = 1.0
    for j in range(1, n):
        c2 = 1.0
        prev_diag = d[:, j - 1].copy()
        for v in range(j):
            c3 = x[j] - x[v]
            c2 *= c3
            for s in range(min(j, m), -1, -1):
                d[s, v] = (
                    (x[j] - x0) * d[s, v] - (s * d[s - 1, v] if s else 0.0)
                ) / c3
        for s in range(min(j, m), -1, -1):
            d[s, j] = (
                c1
                * ((s * prev_diag[s - 1] if s else 0.0) - (x[j - 1] - x0) * prev_diag[s])
            ) / c2
        c1 = c2
    return d[m]


def apply_hamiltonian(grid, values, noise_tol: float = 1e-5):
    """(-d2/dr2 + V + l(l+1)/r^2) values, nodewise, away from shells.

    Five-point stencils drawn from within each uniform run; run-boundary
    nodes (potential features live there) are masked out.  Raises TooCoarse
    when the fourth-vs-second order discrepancy says the grid cannot
    support the stencils.

    Returns (h_values, mask).
    """
    values = np.asarray(values)
    r = grid.r
    out = np.zeros_like(values, dtype=complex)
    mask = np.zeros(len(r), dtype=bool)
    d2_err = []
    d2_mag = []
    for i0, i1, uniform in grid.runs:
        if i1 - i0 < 4:
            continue
        if uniform:
            hh = grid.widths[i0]
            v = values[i0 : i1 + 1]
            d4 = (-v[:-4] + 16 * v[1:-3] - 30 * v[2:-2] + 16 * v[3:-1] - v[4:]) / (
                12.0 * hh * hh
            )
            d2 = (v[1:-3] - 2 * v[2:-2] + v[3:-1]) / (hh * hh)
            out[i0 + 2 : i1 - 1] = -d4
            mask[i0 + 2 : i1 - 1] = True
            d2_err.extend(np.abs(d4 - d2))
            d2_mag.extend(np.abs(d4))
            edge_nodes = (i0 + 1, i1 - 1)
        else:
            edge_nodes = range(i0 + 1, i1)
        for i in edge_nodes:
            lo = min(max(i0, i - 2), i1 - 4)
            idx = np.arange(lo, lo + 5)
            w4 = _fornberg(r[idx], r[i], 2)
            d4 = np.dot(w4, values[idx])
            j0 = min(max(i0, i - 1), i1 - 2)
            jdx = np.arange(j0, j0 + 3)
            w2 = _fornberg(r[jdx], r[i], 2)
            d2 = np.dot(w2, values[jdx])
            out[i] = -d4
            mask[i] = True
            d2_err.append(abs(d4 - d2))
            d2_mag.append(abs(d4))
    if not np.any(mask):
        raise TooCoarse("no run is long enough for a five-point stencil")
    noise = np.percentile(d2_err, 95) / max(np.percentile(d2_mag, 95), 1e-300)
    if noise > noise_tol:
        raise TooCoarse(
            f"stencil discrepancy {noise:.2e} exceeds {noise_tol:.0e}; refine h"
        )
    keep = mask.nonzero()[0]
    v_node = evaluate_potential(grid.spec, r[keep])
    cf = grid.ell * (grid.ell + 1)
    centrifugal = np.where(r[keep] > 0, cf / np.where(r[keep] > 0, r[keep], 1.0) ** 2, 0.0)
    out[keep] += (v_node + centrifugal) * values[keep]
    return out, mask


def _masked_l2(grid, values, mask):
    w = grid.quad_weights()
    return float(np.sqrt(np.dot(w[mask], np.abs(values[mask]) ** 2).real))


def hamiltonian_residuals(chain: JordanChain) -> dict[str, float]:
    """Norm checks of the one-sided coupling on the pair.

    Returns relative residuals of (H - E_m) u = 0 and
    (H - E_m) u_hat = X_m^2 u, plus the size of (H - E_m) u_hat itself
    (which must NOT be small: u_hat is no eigenfunction).
    """
    g = chain.grid
    e = chain.energy
    hu, mask = apply_hamiltonian(g, chain.u)
    hh, _ = apply_hamiltonian(g, chain.u_hat)
    nu = _masked_l2(g, chain.u, mask)
    res_u = _masked_l2(g, hu - e * chain.u, mask) / nu
    dev = hh - e * chain.u_hat
    res_hat = _masked_l2(g, dev - chain.x_m**2 * chain.u, mask) / nu
    return {
        "u": res_u,
        "u_hat": res_hat,
        "u_hat_drive": _masked_l2(g, dev, mask) / nu,
    }
