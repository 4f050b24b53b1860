"""Locating and classifying zeros of the Jost function.

Counting uses the argument principle with a trapezoid rule for F'/F along
the box edges; isolation is recursive bisection with jittered split lines,
and each isolated zero is polished by Newton iteration.  Zeros on the
positive imaginary axis are bound states and cannot be degenerate, which
the record constructor enforces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundDegeneracyImpossible,
    DepthExhausted,
    NewtonStalled,
    NotDeltaShellFamily,
    SecondDerivativeVanishes,
    WindingNotInteger,
)
from .potentials import PotentialSpec, closed_form_jost
from .solver import DEFAULT_H, _jost_core, build_grid, cauchy_derivatives

__all__ = [
    "SearchBox",
    "ZeroRecord",
    "JostEngine",
    "count_zeros_in_box",
    "find_zeros",
    "s_matrix",
]

_WINDING_TOL = 0.05
_SPLIT_FRACTIONS = (0.5, 0.487, 0.513, 0.531, 0.469, 0.551)


@dataclass(frozen=True)
class SearchBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate box {self}")

    @property
    def center(self) -> complex:
        return complex((self.re_min + self.re_max) / 2, (self.im_min + self.im_max) / 2)

    @property
    def diag(self) -> float:
        return float(np.hypot(self.re_max - self.re_min, self.im_max - self.im_min))

    def contains(self, k: complex) -> bool:
        return (self.re_min <= k.real <= self.re_max) and (
            self.im_min <= k.imag <= self.im_max
        )

    def expanded(self, d: float) -> "SearchBox":
        return SearchBox(self.re_min - d, self.re_max + d, self.im_min - d, self.im_max + d)

    def perimeter(self, n_edge: int) -> np.ndarray:
        """Counterclockwise sample points, n_edge per edge, corners once."""
        b = np.linspace(self.re_min, self.re_max, n_edge, endpoint=False) + 1j * self.im_min
        r = self.re_max + 1j * np.linspace(self.im_min, self.im_max, n_edge, endpoint=False)
        t = np.linspace(self.re_max, self.re_min, n_edge, endpoint=False) + 1j * self.im_max
        l = self.re_min + 1j * np.linspace(self.im_max, self.im_min, n_edge, endpoint=False)
        return np.concatenate([b, r, t, l])

    def split(self, frac: float = 0.5) -> tuple["SearchBox", "SearchBox"]:
        if (self.re_max - self.re_min) >= (self.im_max - self.im_min):
            mid = self.re_min + frac * (self.re_max - self.re_min)
            return (
                SearchBox(self.re_min, mid, self.im_min, self.im_max),
                SearchBox(mid, self.re_max, self.im_min, self.im_max),
            )
        mid = self.im_min + frac * (self.im_max - self.im_min)
        return (
            SearchBox(self.re_min, self.re_max, self.im_min, mid),
            SearchBox(self.re_min, self.re_max, mid, self.im_max),
        )


@dataclass(frozen=True)
class ZeroRecord:
    """One zero of F: momentum, multiplicity, class and residuals."""

    k: complex
    multiplicity: int
    kind: str
    res_f: float
    res_df: float

    def __post_init__(self):
        if self.multiplicity >= 2 and self.kind == "bound":
            raise BoundDegeneracyImpossible(
                f"multiplicity {self.multiplicity} zero on the bound-state axis at {self.k}"
            )

    @property
    def energy(self) -> complex:
        return self.k * self.k


def _classify(k: complex, axis_tol: float = 1e-8) -> str:
    scale = max(1.0, abs(k))
    if abs(k.real) < axis_tol * scale:
        return "bound" if k.imag > 0 else "antibound"
    if k.imag < 0:
        return "resonance" if k.real > 0 else "mirror"
    return "other"


class JostEngine:
    """Uniform access to F and its derivatives for one potential family.

    method "ode" runs the radial solver; "closed" uses the transfer-matrix
    expression, valid for pure delta shells in the s wave and much faster.
    "auto" picks "closed" whenever it applies.
    """

    def __init__(
        self,
        spec: PotentialSpec,
        ell: int = 0,
        h: float = DEFAULT_H,
        method: str = "auto",
        r_max: float | None = None,
    ):
        if method == "auto":
            method = "closed" if (ell == 0 and not spec.steps) else "ode"
        if method == "closed" and (ell != 0 or spec.steps):
            raise NotDeltaShellFamily("closed-form engine needs s-wave delta shells")
        if method not in ("closed", "ode"):
            raise ValueError(f"unknown method {method!r}")
        self.spec = spec
        self.ell = ell
        self.h = h
        self.method = method
        self.grid = None if method == "closed" else build_grid(spec, ell, h, r_max)

    def _cols(self, spec):
        if spec is None or spec == self.spec:
            return None, None
        return self.grid.column_arrays([spec])

    def f(self, ks, spec=None) -> np.ndarray:
        ks = np.asarray(ks, dtype=complex)
        if self.method == "closed":
            return np.atleast_1d(closed_form_jost(spec or self.spec, ks))
        v_cols, lam_cols = self._cols(spec)
        return _jost_core(self.grid, ks, 0, v_cols, lam_cols)[0]

    def f_d1(self, ks, spec=None):
        ks = np.atleast_1d(np.asarray(ks, dtype=complex))
        if self.method == "closed":
            sp = spec or self.spec
            f = np.atleast_1d(closed_form_jost(sp, ks))
            d = 1e-6
            d1 = (closed_form_jost(sp, ks + d) - closed_form_jost(sp, ks - d)) / (2 * d)
            return f, np.atleast_1d(d1)
        v_cols, lam_cols = self._cols(spec)
        f, d1 = _jost_core(self.grid, ks, 1, v_cols, lam_cols)
        return f, d1

    def derivs(self, k0: complex, order: int = 2, spec=None, rho: float | None = None):
        """(F, F', F'', F''') at k0; entries beyond order are still filled
        when the Cauchy route is used, None otherwise."""
        if rho is None:
            rho = min(0.1, 0.6 * abs(k0))
        if self.method == "closed":
            sp = spec or self.spec
            d, _ = cauchy_derivatives(lambda ks: closed_form_jost(sp, ks), k0, rho)
            return d
        if order >= 3:
            v_cols, lam_cols = self._cols(spec)
            d, _ = cauchy_derivatives(
                lambda ks: _jost_core(self.grid, ks, 0, v_cols, lam_cols)[0], k0, rho
            )
            return d
        v_cols, lam_cols = self._cols(spec)
        vals = _jost_core(self.grid, np.array([k0], dtype=complex), order, v_cols, lam_cols)
        out = [complex(v[0]) for v in vals]
        while len(out) < 4:
            out.append(None)
        return tuple(out)


def _winding(engine: JostEngine, box: SearchBox, n_edge: int, spec=None):
    ks = box.perimeter(n_edge)
    f, d1 = engine.f_d1(ks, spec=spec)
    fmed = np.median(np.abs(f))
    if np.min(np.abs(f)) < 1e-8 * max(fmed, 1e-300):
        raise WindingNotInteger(f"|F| nearly vanishes on the edge of {box}")
    g = d1 / f
    g_next = np.roll(g, -1)
    dk = np.roll(ks, -1) - ks
    w = np.sum((g + g_next) / 2.0 * dk) / (2j * np.pi)
    n = int(np.round(w.real))
    if abs(w - n) > _WINDING_TOL:
        raise WindingNotInteger(f"winding {w:.4f} on {box}")
    return n, float(fmed)


def count_zeros_in_box(
    spec: PotentialSpec,
    box: SearchBox,
    ell: int = 0,
    h: float = DEFAULT_H,
    n_edge: int = 64,
    method: str = "auto",
) -> int:
    """Number of zeros of F inside the box, counted with multiplicity."""
    engine = JostEngine(spec, ell, h, method)
    return _winding(engine, box, n_edge)[0]


def _polish_simple(engine, k0, f_scale, spec=None, tol=1e-10, max_iter=50, max_excursion=None):
    k = complex(k0)
    for _ in range(max_iter):
        f, d1 = engine.f_d1(np.array([k]), spec=spec)
        f, d1 = complex(f[0]), complex(d1[0])
        if not (np.isfinite(f) and np.isfinite(d1)):
            raise NewtonStalled(f"non-finite F during polish at {k}")
        if abs(f) <= tol * f_scale:
            return k, abs(f), abs(d1)
        if d1 == 0:
            raise NewtonStalled(f"F' vanished during polish at {k}")
        step = f / d1
        if abs(step) > 1.0 + abs(k):
            raise NewtonStalled(f"divergent Newton step {step} at {k}")
        k -= step
        if max_excursion is not None and abs(k - k0) > max_excursion:
            raise NewtonStalled(f"polish wandered {abs(k - k0):.3e} from {k0}")
    raise NewtonStalled(f"no convergence polishing near {k0}")


def _polish_double(engine, k0, f_scale, spec=None, tol=1e-9, max_iter=50):
    """Newton on F' for a candidate double zero; returns (k, |F|, |F'|, F'')."""
    k = complex(k0)
    for _ in range(max_iter):
        f, d1, d2, _ = engine.derivs(k, order=2, spec=spec)
        if not (np.isfinite(f) and np.isfinite(d1) and np.isfinite(d2)):
            raise NewtonStalled(f"non-finite F during double polish at {k}")
        if abs(d1) <= tol * f_scale:
            if abs(d2) < 1e-4 * f_scale:
                raise SecondDerivativeVanishes(f"|F''|={abs(d2):.2e} at {k}")
            return k, abs(f), abs(d1), d2
        step = d1 / d2
        if abs(step) > 1.0 + abs(k):
            raise NewtonStalled(f"divergent double-zero step at {k}")
        k -= step
    raise NewtonStalled(f"no double-zero convergence near {k0}")


def _polish_starts(box):
    c = box.center
    w = (box.re_max - box.re_min) / 4.0
    v = (box.im_max - box.im_min) / 4.0
    yield c
    for sr, si in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
        yield c + complex(sr * w, si * v)


def _resolve(engine, box, n, f_scale, depth, max_depth, n_edge, tol_double):
    if n == 0:
        return []
    if n == 1:
        # the polish may converge to a zero outside this box; only an
        # in-box result is trusted, otherwise subdivide to localize
        home = box.expanded(1e-3 * box.diag)
        for start in _polish_starts(box):
            try:
                k, rf, rdf = _polish_simple(
                    engine, start, f_scale, max_excursion=4.0 * box.diag
                )
            except NewtonStalled:
                continue
            if home.contains(k):
                return [ZeroRecord(k, 1, _classify(k), rf, rdf)]
    if n == 2 and (box.diag < 1e-4 or depth >= max_depth - 3):
        try:
            k, rf, rdf, d2 = _polish_double(engine, box.center, f_scale)
            sep = np.sqrt(8.0 * rf / abs(d2))
            if rf <= 1e-9 * f_scale and sep <= tol_double:
                return [ZeroRecord(k, 2, _classify(k), rf, rdf)]
        except (NewtonStalled, SecondDerivativeVanishes):
            pass
    if depth >= max_depth:
        raise DepthExhausted(f"{n} zeros left unresolved in {box}")
    for frac in _SPLIT_FRACTIONS:
        box_a, box_b = box.split(frac)
        try:
            na, _ = _winding(engine, box_a, n_edge)
            nb, _ = _winding(engine, box_b, n_edge)
        except WindingNotInteger:
            continue
        if na + nb != n:
            continue
        return _resolve(
            engine, box_a, na, f_scale, depth + 1, max_depth, n_edge, tol_double
        ) + _resolve(engine, box_b, nb, f_scale, depth + 1, max_depth, n_edge, tol_double)
    raise WindingNotInteger(f"no clean split of {box} found")


def find_zeros(
    spec: PotentialSpec,
    box: SearchBox,
    ell: int = 0,
    h: float = DEFAULT_H,
    n_edge: int = 64,
    max_depth: int = 24,
    tol_double: float = 1e-6,
    method: str = "auto",
) -> list[ZeroRecord]:
    """All zeros of F in the box, isolated, polished and classified.

    Returns records sorted by Re E.  A zero sitting on the box edge makes
    the top-level count fail; recovery nudges the box alternately outward
    and inward by a few 1e-3 of the diagonal (never past the real or
    imaginary axis when the original box respects them) while refining the
    edge sampling, since a pole just off an edge also needs nodes denser
    than its clearance.
    """
    engine = JostEngine(spec, ell, h, method)
    last = None
    n = f_scale = None
    for mult in (1, 4, 16):
        for step in (0.0, 1e-3, -1e-3, 2.5e-3, -2.5e-3):
            try:
                work = box.expanded(step * box.diag)
                if box.im_max <= 0.0:
                    work = SearchBox(work.re_min, work.re_max, work.im_min,
                                     min(work.im_max, box.im_max * 0.1))
                if box.re_min >= 0.0:
                    work = SearchBox(max(work.re_min, box.re_min * 0.1),
                                     work.re_max, work.im_min, work.im_max)
            except ValueError:
                continue
            try:
                n, f_scale = _winding(engine, work, n_edge * mult)
                break
            except WindingNotInteger as exc:
                last = exc
        if n is not None:
            break
    else:
        raise last
    recs = _resolve(engine, work, n, f_scale, 0, max_depth, n_edge, tol_double)
    return sorted(recs, key=lambda z: (z.energy.real, z.energy.imag))


def s_matrix(spec: PotentialSpec, k, ell: int = 0, h: float = DEFAULT_H, method: str = "auto"):
    """S(k) = F(-k)/F(k), vectorized over k."""
    engine = JostEngine(spec, ell, h, method)
    k_arr = np.asarray(k, dtype=complex)
    flat = k_arr.ravel()
    both = engine.f(np.concatenate([-flat, flat]))
    s = both[: flat.size] / both[flat.size :]
    if k_arr.ndim == 0:
        return complex(s[0])
    return s.reshape(k_arr.shape)
