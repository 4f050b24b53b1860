"""Locating accidental degeneracies: double zeros of the Jost function.

A double zero needs two tunable real parameters, so the search spec must
declare exactly two free_params.  The Newton iteration solves the four real
conditions Re F = Im F = Re F' = Im F' = 0 in (Re k, Im k, p1, p2), with
analytic k-derivatives from a Cauchy circle and central differences in the
parameters, all evaluated in one batched sweep per iteration.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import (
    LostZero,
    MultiplicityMismatch,
    NewtonStalled,
    NoConvergence,
    SecondDerivativeVanishes,
)
from .potentials import PotentialSpec
from .solver import DEFAULT_H
from .zeros import JostEngine, SearchBox, _polish_simple, _winding

__all__ = [
    "DegeneracyResult",
    "TrackResult",
    "MonodromyResult",
    "find_double_zero",
    "track_zero",
    "monodromy",
    "splitting_exponent",
]


@dataclass(frozen=True)
class DegeneracyResult:
    params: np.ndarray
    k: complex
    f: complex
    d1: complex
    d2: complex
    d3: complex
    residual: float
    iterations: int
    jac_cond: float
    method: str

    @property
    def energy(self) -> complex:
        return self.k * self.k


@dataclass(frozen=True)
class TrackResult:
    status: str
    params: np.ndarray
    ks: np.ndarray
    sep_estimates: np.ndarray


@dataclass(frozen=True)
class MonodromyResult:
    swapped: bool
    thetas: np.ndarray
    path_a: np.ndarray
    path_b: np.ndarray


def _f_multi(engine: JostEngine, ks, specs):
    """F on the outer product specs x ks, one row per spec."""
    ks = np.asarray(ks, dtype=complex)
    if engine.method == "closed":
        return np.stack([engine.f(ks, spec=sp) for sp in specs])
    from .solver import _jost_core

    v_cols, lam_cols = engine.grid.column_arrays(specs)
    ns, nk = len(specs), ks.size
    v_rep = np.repeat(v_cols, nk, axis=1)
    lam_rep = np.repeat(lam_cols, nk, axis=1) if lam_cols.size else lam_cols
    k_rep = np.tile(ks, ns)
    f = _jost_core(engine.grid, k_rep, 0, v_rep, lam_rep)[0]
    return f.reshape(ns, nk)


def _circle_block(row, rho, n_circle):
    """F, F', F'', F''' from one circle row whose last entry is the center."""
    c = np.fft.fft(row[:-1]) / n_circle
    return (
        complex(row[-1]),
        complex(c[1] / rho),
        complex(2.0 * c[2] / rho**2),
        complex(factorial(3) * c[3] / rho**3),
    )


def find_double_zero(
    spec: PotentialSpec,
    k_seed: complex,
    p_seed=None,
    ell: int = 0,
    h: float = DEFAULT_H,
    method: str = "auto",
    tol: float = 1e-11,
    fail_tol: float = 1e-10,
    max_iter: int = 40,
    fd_rel: float = 1e-5,
    n_circle: int = 32,
    verify: bool = True,
) -> tuple[DegeneracyResult, PotentialSpec]:
    """Drive (F, F') to zero by a damped Newton step in (k, p1, p2).

    Returns the converged result and the potential at the degeneracy point.
    Residual is max(|F|, |F'|); above fail_tol after the iteration budget
    raises NoConvergence.  With verify=True the winding number on a small
    box around k_m is checked to be exactly 2.
    """
    if len(spec.free_params) != 2:
        raise ValueError("find_double_zero needs a spec with exactly two free_params")
    engine = JostEngine(spec, ell, h, method)
    p = np.array(
        p_seed if p_seed is not None else spec.current_params(), dtype=float
    )
    k = complex(k_seed)
    theta = 2.0 * np.pi * np.arange(n_circle) / n_circle

    best = None
    jac_cond = np.inf
    stalls = 0
    for it in range(1, max_iter + 1):
        rho = min(0.1, 0.5 * abs(k))
        dels = [fd_rel * max(1.0, abs(p[j])) for j in (0, 1)]
        specs = [spec.with_params(p)]
        for j in (0, 1):
            for sgn in (1.0, -1.0):
                pp = p.copy()
                pp[j] += sgn * dels[j]
                specs.append(spec.with_params(pp))
        ks = np.concatenate([k + rho * np.exp(1j * theta), [k]])
        rows = _f_multi(engine, ks, specs)
        blocks = [_circle_block(rows[i], rho, n_circle) for i in range(5)]
        f0, f1, f2, f3 = blocks[0]
        resid = max(abs(f0), abs(f1))
        if best is None or resid < best[0]:
            best = (resid, k, p.copy(), blocks[0])
        if resid <= tol:
            break

        g = np.array([f0.real, f0.imag, f1.real, f1.imag])
        jac = np.empty((4, 4))
        jac[:, 0] = [f1.real, f1.imag, f2.real, f2.imag]
        jac[:, 1] = [-f1.imag, f1.real, -f2.imag, f2.real]
        for j in (0, 1):
            bp, bm = blocks[1 + 2 * j], blocks[2 + 2 * j]
            dfdp = (bp[0] - bm[0]) / (2.0 * dels[j])
            df1dp = (bp[1] - bm[1]) / (2.0 * dels[j])
            jac[:, 2 + j] = [dfdp.real, dfdp.imag, df1dp.real, df1dp.imag]
        jac_cond = float(np.linalg.cond(jac))
        try:
            dx = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Jacobian at iteration {it}") from exc

        # backtracking on the same residual measure
        accepted = False
        t = 1.0
        while t >= 1.0 / 64.0:
            k_t = k + t * complex(dx[0], dx[1])
            p_t = p + t * dx[2:]
            f_t, d1_t = engine.f_d1(np.array([k_t]), spec=spec.with_params(p_t))
            r_t = max(abs(complex(f_t[0])), abs(complex(d1_t[0])))
            if r_t < (1.0 - 0.25 * t) * resid:
                k, p = k_t, p_t
                accepted = True
                break
            t /= 2.0
        if not accepted:
            k = k + complex(dx[0], dx[1]) / 64.0
            p = p + dx[2:] / 64.0
            stalls += 1
            if stalls >= 4:
                if best[0] <= fail_tol:
                    break
                raise NoConvergence(
                    f"Newton stalled at residual {resid:.3e} after {it} iterations"
                )

    resid, k, p, (f0, f1, f2, f3) = best
    if resid > fail_tol:
        raise NoConvergence(f"residual {resid:.3e} exceeds {fail_tol:.1e}")
    if abs(f2) < 1e-4:
        raise SecondDerivativeVanishes(f"|F''| = {abs(f2):.2e} at {k}")

    spec_star = spec.with_params(p)
    if verify:
        half = 1e-3 * max(1.0, abs(k))
        box = SearchBox(k.real - half, k.real + half, k.imag - half, k.imag + half)
        n, _ = _winding(engine, box, 48, spec=spec_star)
        if n != 2:
            raise MultiplicityMismatch(f"winding around {k} gives {n}, expected 2")

    result = DegeneracyResult(
        params=p,
        k=k,
        f=f0,
        d1=f1,
        d2=f2,
        d3=f3,
        residual=resid,
        iterations=it,
        jac_cond=jac_cond,
        method=engine.method,
    )
    return result, spec_star


def track_zero(
    spec: PotentialSpec,
    k_start: complex,
    p_start,
    p_target,
    n_steps: int = 20,
    ell: int = 0,
    h: float = DEFAULT_H,
    method: str = "auto",
    sep_tol: float = 1e-2,
    polish_tol: float = 1e-11,
) -> TrackResult:
    """Continue one simple zero along a straight path in parameter space.

    Stops with status "DoubleZeroEncountered" when the local two-zero
    separation estimate 2|F'/F''| falls below sep_tol; raises LostZero if
    the corrector fails even after shrinking the step 8 times.
    """
    engine = JostEngine(spec, ell, h, method)
    p_start = np.asarray(p_start, dtype=float)
    p_target = np.asarray(p_target, dtype=float)
    k = complex(k_start)
    p = p_start.copy()
    ps, ks, seps = [p.copy()], [k], []

    _, d1, d2, _ = engine.derivs(k, order=2, spec=spec.with_params(p))
    seps.append(2.0 * abs(d1 / d2))

    s = 0.0
    ds = 1.0 / n_steps
    while s < 1.0 - 1e-12:
        step = min(ds, 1.0 - s)
        shrink = 0
        while True:
            p_try = p_start + (s + step) * (p_target - p_start)
            try:
                k_try, _, _ = _polish_simple(
                    engine, k, 1.0, spec=spec.with_params(p_try), tol=polish_tol, max_iter=12
                )
            except NewtonStalled:
                shrink += 1
                step /= 2.0
                if shrink > 8:
                    raise LostZero(f"corrector failed near p = {p_try}") from None
                continue
            break
        s += step
        k, p = k_try, p_try
        _, d1, d2, _ = engine.derivs(k, order=2, spec=spec.with_params(p))
        sep = 2.0 * abs(d1 / d2)
        ps.append(p.copy())
        ks.append(k)
        seps.append(sep)
        if sep < sep_tol:
            return TrackResult("DoubleZeroEncountered", np.array(ps), np.array(ks), np.array(seps))
    return TrackResult("ok", np.array(ps), np.array(ks), np.array(seps))


def _pair_near(engine, spec_at, k_m, seed_delta, polish_tol=1e-12):
    """Polish the two zeros straddling a near-double point from quadratic seeds."""
    out = []
    for sgn in (1.0, -1.0):
        k, _, _ = _polish_simple(
            engine, k_m + sgn * seed_delta, 1.0, spec=spec_at, tol=polish_tol, max_iter=30
        )
        out.append(k)
    if abs(out[0] - out[1]) < 1e-13:
        raise LostZero("both seeds polished to the same zero")
    return out


def monodromy(
    spec: PotentialSpec,
    p_star,
    k_m: complex,
    radius: float,
    n_steps: int = 48,
    ell: int = 0,
    h: float = DEFAULT_H,
    method: str = "auto",
) -> MonodromyResult:
    """Carry the two split zeros around a parameter-space loop at p_star.

    On a loop around a square-root branch point the zeros exchange places;
    swapped reports whether they did.
    """
    engine = JostEngine(spec, ell, h, method)
    p_star = np.asarray(p_star, dtype=float)
    thetas = np.linspace(0.0, 2.0 * np.pi, n_steps + 1)

    def p_at(th):
        return p_star + radius * np.array([np.cos(th), np.sin(th)])

    sp0 = spec.with_params(p_at(0.0))
    f0, _, d2, _ = engine.derivs(k_m, order=2, spec=sp0)
    seed = np.sqrt(-2.0 * f0 / d2)
    ka, kb = _pair_near(engine, sp0, k_m, seed)

    path_a, path_b = [ka], [kb]
    for th in thetas[1:]:
        sp = spec.with_params(p_at(th))
        ka, _, _ = _polish_simple(engine, ka, 1.0, spec=sp, tol=1e-12, max_iter=20)
        kb, _, _ = _polish_simple(engine, kb, 1.0, spec=sp, tol=1e-12, max_iter=20)
        if abs(ka - kb) < 1e-10:
            raise LostZero(f"tracked zeros collided at theta = {th:.3f}")
        path_a.append(ka)
        path_b.append(kb)

    path_a = np.array(path_a)
    path_b = np.array(path_b)
    swapped = abs(path_a[-1] - path_b[0]) < abs(path_a[-1] - path_a[0])
    return MonodromyResult(swapped, thetas, path_a, path_b)


def splitting_exponent(
    spec: PotentialSpec,
    p_star,
    k_m: complex,
    direction,
    t_values=None,
    ell: int = 0,
    h: float = DEFAULT_H,
    method: str = "auto",
):
    """Exponent of the zero separation |k+ - k-| ~ t^alpha along a ray.

    Fits log separation against log t by least squares; a square-root
    branch point gives alpha = 1/2.  Returns (alpha, t_values, separations).
    """
    engine = JostEngine(spec, ell, h, method)
    p_star = np.asarray(p_star, dtype=float)
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    if t_values is None:
        t_values = np.logspace(-5, -2, 7)
    seps = []
    for t in t_values:
        sp = spec.with_params(p_star + t * direction)
        f0, _, d2, _ = engine.derivs(k_m, order=2, spec=sp)
        seed = np.sqrt(-2.0 * f0 / d2)
        ka, kb = _pair_near(engine, sp, k_m, seed)
        seps.append(abs(ka - kb))
    seps = np.asarray(seps)
    slope = np.polyfit(np.log(t_values), np.log(seps), 1)[0]
    return float(slope), np.asarray(t_values), seps
