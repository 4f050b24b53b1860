"""Radial Schroedinger solver on [0, r_max] for shell-plus-step potentials.

Units are hbar^2/(2 mu) = 1 throughout, so the equation integrated is

    u'' = (V(r) + l(l+1)/r^2 - k^2) u

with E = k^2.  Delta shells enter as derivative jumps at their nodes; the
stored derivative at a shell node is always the left limit, from either
integration direction, so Wronskians of stored arrays stay consistent.

Everything is batched over a trailing column axis.  A column is one
(k, potential) pair; per-column potential overrides let parameter
perturbations and momentum grids share a single sequential sweep.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import (
    CircleTouchesOrigin,
    GridMissingShellNode,
    KIsZero,
    WronskianDrift,
)
from .potentials import PotentialSpec, evaluate_potential
from .special import riccati_hplus

__all__ = [
    "DEFAULT_H",
    "RadialGrid",
    "RadialSolution",
    "JostData",
    "build_grid",
    "solve_regular",
    "solve_outgoing",
    "jost_function",
    "jost_derivatives_ode",
    "jost_derivatives",
    "cauchy_derivatives",
]

DEFAULT_H = 1e-3
_GRADE_RATIO = 1.2
_DRIFT_TOL = 1e-6

_REGULAR_KINDS = ("Regular", "RegularKDeriv1", "RegularKDeriv2")
_OUTGOING_KINDS = ("Outgoing", "OutgoingKDeriv1", "OutgoingKDeriv2")


@dataclass(frozen=True, eq=False)
class RadialGrid:
    r: np.ndarray
    widths: np.ndarray
    v_mid: np.ndarray
    cf_a: np.ndarray
    cf_m: np.ndarray
    cf_b: np.ndarray
    shell_idx: np.ndarray
    shell_lam: np.ndarray
    cutoff_idx: int
    first_seg_end: int
    ell: int
    h: float
    spec: PotentialSpec
    runs: tuple
    probes: tuple

    @property
    def n_nodes(self) -> int:
        return len(self.r)

    def quad_weights(self) -> np.ndarray:
        """Weights w with sum(w * f(r)) ~ integral of f over [r[0], r[-1]].

        Composite Simpson on the uniform runs (built with even interval
        counts), trapezoid on the graded start.
        """
        w = np.zeros(self.n_nodes)
        for i0, i1, uniform in self.runs:
            n = i1 - i0
            if uniform and n % 2 == 0 and n >= 2:
                hh = self.widths[i0]
                c = np.ones(n + 1)
                c[1:-1:2] = 4.0
                c[2:-1:2] = 2.0
                w[i0 : i1 + 1] += hh / 3.0 * c
            else:
                dr = np.diff(self.r[i0 : i1 + 1])
                w[i0] += dr[0] / 2.0
                w[i1] += dr[-1] / 2.0
                w[i0 + 1 : i1] += (dr[:-1] + dr[1:]) / 2.0
        return w

    def column_arrays(self, specs) -> tuple[np.ndarray, np.ndarray]:
        """Per-interval V and per-shell strengths for same-geometry specs.

        Returns (v_cols, lam_cols) with shapes (n_intervals, n_specs) and
        (n_shells, n_specs).  All specs must share shell radii, step edges
        and cutoff with the grid's base spec; only strengths may differ.
        """
        base = self.spec
        mids = (self.r[:-1] + self.r[1:]) / 2.0
        v_cols = np.empty((len(mids), len(specs)))
        lam_cols = np.empty((len(base.shells), len(specs)))
        for j, sp in enumerate(specs):
            same = (
                len(sp.shells) == len(base.shells)
                and all(a.a == b.a for a, b in zip(sp.shells, base.shells))
                and len(sp.steps) == len(base.steps)
                and all(
                    (a.lo, a.hi) == (b.lo, b.hi) for a, b in zip(sp.steps, base.steps)
                )
                and sp.cutoff == base.cutoff
            )
            if not same:
                raise ValueError("spec geometry differs from the grid's base spec")
            v_cols[:, j] = evaluate_potential(sp, mids)
            lam_cols[:, j] = [sh.lam for sh in sp.shells]
        return v_cols, lam_cols


@dataclass(frozen=True, eq=False)
class RadialSolution:
    """One solution family on a grid, batched over columns."""

    kind: str
    k: np.ndarray
    values: np.ndarray
    dvalues: np.ndarray
    grid: RadialGrid


@dataclass(frozen=True)
class JostData:
    """F(k) and derivatives at one point, with a self-consistency estimate."""

    k: complex
    f: complex
    d1: complex | None = None
    d2: complex | None = None
    d3: complex | None = None
    method: str = "OdeSystem"
    err: float | None = None


@lru_cache(maxsize=64)
def build_grid(
    spec: PotentialSpec, ell: int = 0, h: float = DEFAULT_H, r_max: float | None = None
) -> RadialGrid:
    """Build a node set with breakpoints on every potential feature.

    Uniform runs between breakpoints carry even interval counts so Simpson
    weights exist; for ell > 0 the first run opens with a geometrically
    graded section from eps = 1e-6 * cutoff, where the solution starts from
    its power series.
    """
    if r_max is None:
        r_max = spec.cutoff
    if r_max < spec.cutoff:
        raise ValueError("r_max must not be smaller than the cutoff")
    bps = {0.0, float(spec.cutoff), float(r_max)}
    bps.update(float(sh.a) for sh in spec.shells)
    for st in spec.steps:
        bps.update((float(st.lo), float(st.hi)))
    bps = sorted(bps)
    merged = [bps[0]]
    for b in bps[1:]:
        if b - merged[-1] > 1e-12 * max(1.0, r_max):
            merged.append(b)

    nodes = []
    runs = []
    first_seg_end = None
    first = True
    for b0, b1 in zip(merged, merged[1:]):
        n = max(2, int(np.ceil((b1 - b0) / h)))
        n += n % 2
        xs = np.linspace(b0, b1, n + 1)
        if first and ell > 0:
            eps = 1e-6 * spec.cutoff
            g = [eps]
            while g[-1] * _GRADE_RATIO < xs[1]:
                g.append(g[-1] * _GRADE_RATIO)
            nodes.extend(g)
            runs.append((0, len(g), False))
            n_u = max(2, int(np.ceil((b1 - xs[1]) / h)))
            n_u += n_u % 2
            xs_u = np.linspace(xs[1], b1, n_u + 1)
            nodes.extend(xs_u[1:])
            runs.append((len(g), len(g) + n_u, True))
        else:
            i0 = len(nodes) - 1 if nodes else 0
            if not nodes:
                nodes.append(xs[0])
            nodes.extend(xs[1:])
            runs.append((i0, i0 + n, True))
        if first:
            first_seg_end = len(nodes) - 1
        first = False

    r = np.asarray(nodes)
    widths = np.diff(r)
    mids = (r[:-1] + r[1:]) / 2.0
    v_mid = evaluate_potential(spec, mids)
    cf = float(ell * (ell + 1))
    if ell > 0:
        cf_a = cf / r[:-1] ** 2
        cf_m = cf / mids**2
        cf_b = cf / r[1:] ** 2
    else:
        cf_a = np.zeros_like(mids)
        cf_m = np.zeros_like(mids)
        cf_b = np.zeros_like(mids)

    shell_idx = []
    for sh in spec.shells:
        i = int(np.argmin(np.abs(r - sh.a)))
        if abs(r[i] - sh.a) > 1e-9:
            raise GridMissingShellNode(f"no node at shell radius {sh.a}")
        shell_idx.append(i)
    shell_lam = np.array([sh.lam for sh in spec.shells])

    i_cut = int(np.argmin(np.abs(r - spec.cutoff)))
    probes = []
    taken = set(shell_idx)
    for frac in (0.35, 0.55, 0.75):
        i = int(np.argmin(np.abs(r - frac * spec.cutoff)))
        while i in taken:
            i += 1
        taken.add(i)
        probes.append(i)

    return RadialGrid(
        r=r,
        widths=widths,
        v_mid=v_mid,
        cf_a=cf_a,
        cf_m=cf_m,
        cf_b=cf_b,
        shell_idx=np.array(shell_idx, dtype=int),
        shell_lam=shell_lam,
        cutoff_idx=i_cut,
        first_seg_end=int(first_seg_end),
        ell=ell,
        h=h,
        spec=spec,
        runs=tuple(runs),
        probes=tuple(probes),
    )


def _check_k(k) -> np.ndarray:
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    if np.any(np.abs(k) < 1e-12):
        raise KIsZero("momentum too close to 0 for the outgoing solution")
    return k


def _weff(grid: RadialGrid, v_cols):
    """Effective interval potentials at (left, mid, right) samples."""
    if v_cols is None:
        return (
            grid.v_mid + grid.cf_a,
            grid.v_mid + grid.cf_m,
            grid.v_mid + grid.cf_b,
        )
    v_cols = np.asarray(v_cols)
    return (
        v_cols + grid.cf_a[:, None],
        v_cols + grid.cf_m[:, None],
        v_cols + grid.cf_b[:, None],
    )


def _propagate(grid, k, m, state, w_a, w_m, w_b, lam_cols, outward, i_start, i_stop):
    """RK4 sweep of the coupled (u, du/dk, d2u/dk2) system between nodes.

    state has shape (2m, ncols): m value rows then m derivative rows.
    Returns (values, dvalues) of shape (m, n_nodes, ncols), filled only on
    the swept index range.
    """
    n_nodes = grid.n_nodes
    ncols = state.shape[1]
    vals = np.zeros((m, n_nodes, ncols), dtype=complex)
    dvals = np.zeros((m, n_nodes, ncols), dtype=complex)
    ksq = k * k
    shell_of = {int(i): j for j, i in enumerate(grid.shell_idx)}

    def deriv(s, q):
        d = np.empty_like(s)
        d[:m] = s[m:]
        d[m] = q * s[0]
        if m > 1:
            d[m + 1] = q * s[1] - 2.0 * k * s[0]
        if m > 2:
            d[m + 2] = q * s[2] - 4.0 * k * s[1] - 2.0 * s[0]
        return d

    def step(s, h, qf, qm, ql):
        s1 = deriv(s, qf)
        s2 = deriv(s + (0.5 * h) * s1, qm)
        s3 = deriv(s + (0.5 * h) * s2, qm)
        s4 = deriv(s + h * s3, ql)
        return s + (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4)

    vals[:, i_start] = state[:m]
    dvals[:, i_start] = state[m:]
    if outward:
        if i_start in shell_of:
            # stored start values are left limits; continue with the jump
            state = state.copy()
            state[m:] += lam_cols[shell_of[i_start]] * state[:m]
        for j in range(i_start, i_stop):
            qa = w_a[j] - ksq
            qm = w_m[j] - ksq
            qb = w_b[j] - ksq
            state = step(state, grid.widths[j], qa, qm, qb)
            i = j + 1
            vals[:, i] = state[:m]
            dvals[:, i] = state[m:]
            if i in shell_of:
                state = state.copy()
                state[m:] += lam_cols[shell_of[i]] * state[:m]
    else:
        for j in range(i_start - 1, i_stop - 1, -1):
            qa = w_a[j] - ksq
            qm = w_m[j] - ksq
            qb = w_b[j] - ksq
            state = step(state, -grid.widths[j], qb, qm, qa)
            i = j
            if i in shell_of:
                state = state.copy()
                state[m:] -= lam_cols[shell_of[i]] * state[:m]
            vals[:, i] = state[:m]
            dvals[:, i] = state[m:]
    return vals, dvals


def _dfac_odd(ell: int) -> float:
    out = 1.0
    for q in range(1, 2 * ell + 2, 2):
        out *= q
    return out


_SERIES_CAP = 12.0
_SERIES_MAX_TERMS = 120


def _series_fill(grid: RadialGrid, k, m, v_cols, i_fill):
    """Exact power series of phi and its k-derivative companions on nodes
    0..i_fill of the first constant-potential segment.

    With c = V0 - k^2 the regular solution there is
    phi = b0 sum_s c^s r^(l+1+2s) / D_s,  D_s = prod_j (2j)(2l+2j+1),
    so d/dk chains reduce to the c-derivative series, which share the same
    term recursion and stay regular at c = 0.
    """
    ell = grid.ell
    r = grid.r[: i_fill + 1]
    rcol = r[:, None]
    rr = rcol * rcol
    v0 = v_cols[0] if v_cols is not None else grid.v_mid[0]
    c = (np.zeros_like(k) + v0) - k * k
    b0 = 1.0 / _dfac_odd(ell)

    vals = np.zeros((m, len(r), len(k)), dtype=complex)
    dvals = np.zeros((m, len(r), len(k)), dtype=complex)
    cterm = b0 * rcol**ell * np.ones((1, len(k)), dtype=complex)
    eterm = np.zeros_like(cterm)
    gterm = np.zeros_like(cterm)
    phi = cterm * rcol
    dphi = (ell + 1.0) * cterm
    phic = np.zeros_like(phi)
    dphic = np.zeros_like(phi)
    phicc = np.zeros_like(phi)
    dphicc = np.zeros_like(phi)
    for s in range(1, _SERIES_MAX_TERMS):
        dd = (2.0 * s) * (2 * ell + 2 * s + 1)
        if m > 2:
            gterm = eterm * (s * rr) / dd
        if m > 1:
            eterm, cterm = cterm * (s * rr) / dd, cterm * (c * rr) / dd
        else:
            cterm = cterm * (c * rr) / dd
        pw = ell + 1.0 + 2 * s
        phi += cterm * rcol
        dphi += pw * cterm
        if m > 1:
            phic += eterm * rcol
            dphic += pw * eterm
        if m > 2:
            phicc += gterm * rcol
            dphicc += pw * gterm
        if np.max(np.abs(cterm)) * np.max(np.abs(rcol)) < 1e-17 * max(
            np.max(np.abs(phi)), 1e-300
        ):
            break

    vals[0], dvals[0] = phi, dphi
    if m > 1:
        vals[1] = -2.0 * k * phic
        dvals[1] = -2.0 * k * dphic
    if m > 2:
        vals[2] = 4.0 * k * k * phicc - 2.0 * phic
        dvals[2] = 4.0 * k * k * dphicc - 2.0 * dphic
    return vals, dvals


def _hankel_rows(ell: int, k, r):
    """(f, fdot, fddot) and radial derivatives of the outgoing solution at
    radius r, from the exact Riccati-Hankel expressions."""
    z = k * r
    h, dh, d2h = riccati_hplus(ell, z)
    cf = float(ell * (ell + 1))
    d3h = (cf / z**2 - 1.0) * dh - 2.0 * cf / z**3 * h
    pref = 1j**ell
    f = pref * h
    fp = pref * k * dh
    fd = pref * r * dh
    fdp = pref * (dh + k * r * d2h)
    fdd = pref * r * r * d2h
    fddp = pref * (2.0 * r * d2h + k * r * r * d3h)
    return (f, fd, fdd), (fp, fdp, fddp)


def _outgoing_init(grid: RadialGrid, k, m):
    state = np.zeros((2 * m, k.shape[0]), dtype=complex)
    rows, drows = _hankel_rows(grid.ell, k, grid.r[grid.cutoff_idx])
    for i in range(m):
        state[i] = rows[i]
        state[m + i] = drows[i]
    return state


def _lam_cols(grid: RadialGrid, lam_cols):
    if lam_cols is not None:
        return np.asarray(lam_cols)
    return grid.shell_lam[:, None] if len(grid.shell_lam) else grid.shell_lam


def _solve_regular_arrays(grid, k, m, v_cols=None, lam_cols=None):
    # exact on the first segment up to where the series stays well
    # conditioned, RK4 onward from that node
    v0 = v_cols[0] if v_cols is not None else grid.v_mid[0]
    kap_max = np.sqrt(np.max(np.abs(k * k - v0)))
    r_fill = grid.r[grid.first_seg_end]
    if kap_max * r_fill > _SERIES_CAP:
        r_fill = _SERIES_CAP / kap_max
    i_fill = int(np.searchsorted(grid.r, r_fill * (1 + 1e-12)) - 1)
    i_fill = max(1, min(i_fill, grid.first_seg_end))
    fv, fd = _series_fill(grid, k, m, v_cols, i_fill)

    state = np.empty((2 * m, len(k)), dtype=complex)
    state[:m] = fv[:, i_fill]
    state[m:] = fd[:, i_fill]
    w_a, w_m, w_b = _weff(grid, v_cols)
    vals, dvals = _propagate(
        grid, k, m, state, w_a, w_m, w_b, _lam_cols(grid, lam_cols), True, i_fill, grid.n_nodes - 1
    )
    vals[:, :i_fill] = fv[:, :i_fill]
    dvals[:, :i_fill] = fd[:, :i_fill]
    return vals, dvals


def _solve_outgoing_arrays(grid, k, m, v_cols=None, lam_cols=None):
    k = _check_k(k)
    w_a, w_m, w_b = _weff(grid, v_cols)
    state = _outgoing_init(grid, k, m)
    vals, dvals = _propagate(
        grid, k, m, state, w_a, w_m, w_b, _lam_cols(grid, lam_cols), False, grid.cutoff_idx, 0
    )
    # the region beyond the cutoff is potential-free, so the Hankel
    # expressions are exact there; fill instead of integrating
    for i in range(grid.cutoff_idx + 1, grid.n_nodes):
        rows, drows = _hankel_rows(grid.ell, k, grid.r[i])
        for s in range(m):
            vals[s, i] = rows[s]
            dvals[s, i] = drows[s]
    return vals, dvals


def solve_regular(grid: RadialGrid, k, n_derivs: int = 0, v_cols=None, lam_cols=None):
    """Regular solution phi (and k-derivative companions) on the grid.

    phi is normalized by phi ~ r^(l+1)/(2l+1)!! at the origin, which makes
    it entire in k and even under k -> -k.

    Returns a list of RadialSolution, one per derivative order requested.
    """
    k = np.atleast_1d(np.asarray(k, dtype=complex))
    m = n_derivs + 1
    vals, dvals = _solve_regular_arrays(grid, k, m, v_cols, lam_cols)
    return [
        RadialSolution(_REGULAR_KINDS[s], k, vals[s], dvals[s], grid) for s in range(m)
    ]


def solve_outgoing(grid: RadialGrid, k, n_derivs: int = 0, v_cols=None, lam_cols=None):
    """Outgoing solution f+ (and k-derivative companions) on the grid.

    f+ equals i^l hplus_l(kr) exactly beyond the cutoff and is continued
    inward from there, so f+ -> exp(ikr) at large r for every l.
    """
    k = _check_k(k)
    m = n_derivs + 1
    vals, dvals = _solve_outgoing_arrays(grid, k, m, v_cols, lam_cols)
    return [
        RadialSolution(_OUTGOING_KINDS[s], k, vals[s], dvals[s], grid) for s in range(m)
    ]


def _wronskian(f, fp, g, gp):
    return f * gp - fp * g


def _jost_core(grid: RadialGrid, k, n_derivs=0, v_cols=None, lam_cols=None):
    """F(k) and derivatives from the Wronskian of f+ with phi.

    F(k) = (-1)^l k^l W[f+, phi], checked at three probe radii; disagreement
    between probes beyond _DRIFT_TOL of the natural product scale raises
    WronskianDrift.
    """
    k = _check_k(k)
    m = n_derivs + 1
    rv, rd = _solve_regular_arrays(grid, k, m, v_cols, lam_cols)
    ov, od = _solve_outgoing_arrays(grid, k, m, v_cols, lam_cols)
    p = list(grid.probes)
    ell = grid.ell

    w = {}
    for a in range(m):
        for b in range(m - a):
            w[(a, b)] = _wronskian(ov[a][p], od[a][p], rv[b][p], rd[b][p])

    w00 = w[(0, 0)]
    scale = np.max(
        np.abs(ov[0][p]) * np.abs(rd[0][p]) + np.abs(od[0][p]) * np.abs(rv[0][p]),
        axis=0,
    )
    wbar = w00.mean(axis=0)
    drift = np.max(np.abs(w00 - wbar), axis=0)
    bad = drift > _DRIFT_TOL * np.maximum(scale, 1e-300)
    if np.any(bad):
        j = int(np.argmax(drift / np.maximum(scale, 1e-300)))
        raise WronskianDrift(
            f"probe spread {drift[j]:.3e} vs scale {scale[j]:.3e} at k={k[j]}"
        )

    sign = (-1.0) ** ell
    out = [sign * k**ell * wbar]
    if n_derivs >= 1:
        w10 = w[(1, 0)].mean(axis=0)
        w01 = w[(0, 1)].mean(axis=0)
        d1 = sign * k**ell * (w10 + w01)
        if ell:
            d1 = d1 + sign * ell * k ** (ell - 1) * wbar
        out.append(d1)
    if n_derivs >= 2:
        w20 = w[(2, 0)].mean(axis=0)
        w11 = w[(1, 1)].mean(axis=0)
        w02 = w[(0, 2)].mean(axis=0)
        d2 = sign * k**ell * (w20 + 2.0 * w11 + w02)
        if ell:
            d2 = d2 + sign * 2.0 * ell * k ** (ell - 1) * (w[(1, 0)].mean(0) + w[(0, 1)].mean(0))
        if ell >= 2:
            d2 = d2 + sign * ell * (ell - 1) * k ** (ell - 2) * wbar
        out.append(d2)
    return out


def jost_function(spec: PotentialSpec, k, ell: int = 0, h: float = DEFAULT_H, grid=None):
    """Jost function F(k), vectorized over k.

    Normalized to F -> 1 as the potential vanishes; zeros in Im k > 0 on
    the imaginary axis are bound states, zeros in the lower half plane are
    resonances and their mirrors.  S(k) = F(-k)/F(k).
    """
    if grid is None:
        grid = build_grid(spec, ell, h)
    k_arr = np.asarray(k, dtype=complex)
    f = _jost_core(grid, k_arr.ravel(), 0)[0]
    if k_arr.ndim == 0:
        return complex(f[0])
    return f.reshape(k_arr.shape)


def jost_derivatives_ode(
    spec: PotentialSpec, k, order: int = 1, ell: int = 0, h: float = DEFAULT_H, grid=None
) -> JostData:
    """F, F', F'' at one point from the coupled k-derivative systems."""
    if grid is None:
        grid = build_grid(spec, ell, h)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    vals = _jost_core(grid, np.array([k], dtype=complex), order)
    flat = [complex(v[0]) for v in vals]
    return JostData(
        k=complex(k),
        f=flat[0],
        d1=flat[1],
        d2=flat[2] if order >= 2 else None,
        d3=None,
        method="OdeSystem",
        err=None,
    )


def cauchy_derivatives(fun, k0, rho, n_points=32):
    """First three derivatives of an analytic callable from one circle.

    fun maps a complex ndarray to values; it is called once on the circle
    points plus the center.  Returns ((d0, d1, d2, d3), err) where err is
    the largest relative change under halving the point count, including
    the mean-value check of d0 against the direct center value.
    """
    k0 = complex(k0)
    if rho <= 0 or rho >= 0.9 * abs(k0):
        raise CircleTouchesOrigin(f"radius {rho} unsafe for center {k0}")
    if n_points % 2 or n_points < 8:
        raise ValueError("n_points must be even and >= 8")
    theta = 2.0 * np.pi * np.arange(n_points) / n_points
    ks = np.concatenate([k0 + rho * np.exp(1j * theta), [k0]])
    f_all = np.asarray(fun(ks))
    f_circ, f0 = f_all[:-1], complex(f_all[-1])

    def coeffs(samples):
        c = np.fft.fft(samples) / len(samples)
        return [factorial(n) * c[n] / rho**n for n in range(4)]

    d_full = coeffs(f_circ)
    d_half = coeffs(f_circ[::2])
    err = max(abs(a - b) / max(1.0, abs(a)) for a, b in zip(d_full, d_half))
    err = max(err, abs(d_full[0] - f0) / max(1.0, abs(f0)))
    d_full[0] = f0
    return tuple(complex(d) for d in d_full), float(err)


def jost_derivatives(
    spec: PotentialSpec,
    k0,
    ell: int = 0,
    h: float = DEFAULT_H,
    rho: float | None = None,
    n_points: int = 32,
    grid=None,
) -> JostData:
    """F and its first three derivatives at k0 from a Cauchy circle."""
    if grid is None:
        grid = build_grid(spec, ell, h)
    k0 = complex(k0)
    if rho is None:
        rho = min(0.1, 0.6 * abs(k0))
    d, err = cauchy_derivatives(
        lambda ks: _jost_core(grid, ks, 0)[0], k0, rho, n_points
    )
    return JostData(
        k=k0, f=d[0], d1=d[1], d2=d[2], d3=d[3], method="CauchyCircle", err=err
    )
