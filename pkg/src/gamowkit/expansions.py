"""Completeness expansions over bound, resonance and chain states.

The real-axis continuum in the textbook completeness relation is deformed
onto a rectangular polyline dipping into the fourth k-quadrant; every Jost
zero between the real axis and the path converts into a discrete basis
term (a pair {u, u_hat} for a double zero), the rest stays as a background
quadrature.  The same bookkeeping produces the resolvent expansion with
its double pole, the Jordan-block representation of functions of H, and
survival amplitudes.

Pairings are bilinear on the resonance side: <u|chi> = int u chi dr with
no conjugation; ordinary left factors are conjugated, <Phi|u> =
int conj(Phi) u dr.  The two scattering kernels are
psi_plus = k^(l+1) phi / F(k) and its lower-half-plane-regular partner
psi_tilde = k^(l+1) phi / F(-k), which coincide with each other's
conjugates on the real axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AtEigenvalue,
    AtPole,
    BackgroundNotConverged,
    ContourPoleClash,
    MultiplicityMismatch,
)
from .potentials import PotentialSpec
from .solver import DEFAULT_H, build_grid, jost_function, solve_outgoing, solve_regular
from .states import JordanChain, build_jordan_chain, normalize_simple
from .zeros import SearchBox, find_zeros

_PATH_CLEARANCE = 1e-3


def _gauss_segment(a: complex, b: complex, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    return mid + half * x, half * w


@dataclass(frozen=True)
class ContourSpec:
    """Deformed continuum path 0 -> -i gamma -> corner - i gamma -> corner,
    then along the real axis to k_max.

    The three deformed segments are covered by composite Gauss-Legendre
    panels of length path_panel with path_nodes nodes each; with the
    defaults, a kernel pole 0.1 away from the path costs below 1e-8, so
    keep pole clearances at that scale (the 1e-3 floor enforced when a
    basis is built only guards validity, not accuracy).  panel/n_panel
    size the real-axis tail used for stationary kernels (expansion,
    resolvent); the tail must also resolve Jost-function dips past the
    corner, whose width is the depth of the sub-axis zero behind them,
    so panels are kept narrow by default.  e_panel/n_filon size the
    energy-variable Filon panels used for time evolution, where the
    phase is linear in E.
    """

    gamma: float
    corner: float
    k_max: float
    path_panel: float = 0.5
    path_nodes: int = 24
    panel: float = 2.0
    n_panel: int = 32
    e_panel: float = 64.0
    n_filon: int = 48

    def __post_init__(self):
        if self.gamma <= 0 or self.corner <= 0 or self.k_max <= self.corner:
            raise ValueError("need gamma > 0 and 0 < corner < k_max")

    @property
    def vertices(self):
        return (
            0.0 + 0.0j,
            -1j * self.gamma,
            self.corner - 1j * self.gamma,
            self.corner + 0.0j,
            self.k_max + 0.0j,
        )

    def nodes_weights(self, refine: float = 1.0):
        """Gauss-Legendre nodes and weights along the polyline.

        refine scales the node counts; 0.5 gives the coarse companion set
        used for convergence estimates.  Returns (k, w, n_path) with
        n_path the number of nodes on the three deformed segments; the
        rest sit on the real-axis tail.
        """
        vs = self.vertices
        n_per = max(6, int(round(self.path_nodes * refine)))
        ks, ws = [], []
        n_path = 0
        for a, b in zip(vs[:3], vs[1:4]):
            pieces = max(1, int(np.ceil(abs(b - a) / self.path_panel)))
            cuts = a + (b - a) * np.linspace(0.0, 1.0, pieces + 1)
            for lo, hi in zip(cuts, cuts[1:]):
                k, w = _gauss_segment(lo, hi, n_per)
                ks.append(k)
                ws.append(w)
                n_path += n_per
        # real-axis tail in fixed-width panels so the nodes-per-wavelength
        # density does not degrade as k grows
        a = self.corner
        n_tail = max(8, int(round(self.n_panel * refine)))
        while a < self.k_max - 1e-12:
            b = min(a + self.panel, self.k_max)
            k, w = _gauss_segment(a + 0.0j, b + 0.0j, n_tail)
            ks.append(k)
            ws.append(w)
            a = b
        return np.concatenate(ks), np.concatenate(ws), n_path

    def distance(self, k: complex) -> float:
        """Distance from k to the polyline."""
        d = np.inf
        vs = self.vertices
        for a, b in zip(vs, vs[1:]):
            ab = b - a
            t = ((k - a) * np.conj(ab)).real / abs(ab) ** 2
            t = min(max(t, 0.0), 1.0)
            d = min(d, abs(k - (a + t * ab)))
        return d

    def captures(self, k: complex) -> bool:
        """True when k lies strictly between the real axis and the path."""
        return 0.0 < k.real < self.corner and -self.gamma < k.imag < 0.0


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Radial probe function sampled on a grid.

    Must vanish at the origin and decay to nothing by the last node, so
    all pairings are plain interior quadratures.
    """

    grid: object
    values: np.ndarray
    label: str = "gaussian"

    def __post_init__(self):
        v = np.asarray(self.values)
        top = np.max(np.abs(v))
        if abs(v[0]) > 1e-13 * top or abs(v[-1]) > 1e-13 * top:
            raise ValueError("test function must vanish at both grid ends")


def gaussian_bump(grid, center: float, width: float, amplitude: float = 1.0):
    r = grid.r
    vals = amplitude * r * np.exp(-((r - center) / width) ** 2)
    return TestFunction(grid=grid, values=vals, label="gaussian")


@dataclass(frozen=True, eq=False)
class _Background:
    k: np.ndarray
    w: np.ndarray
    psi: np.ndarray      # psi_plus columns, (n_nodes, n_k)
    psi_t: np.ndarray    # psi_tilde columns
    n_path: int          # nodes on the deformed segments; rest on the tail


@dataclass(frozen=True, eq=False)
class BasisSet:
    spec: PotentialSpec
    ell: int
    grid: object
    bound: tuple
    resonances: tuple
    chain: JordanChain | None
    contour: ContourSpec
    bg: _Background
    bg_half: _Background
    quad_w: np.ndarray

    def right_bracket(self, state_values, chi: TestFunction) -> complex:
        return complex(np.dot(self.quad_w, state_values * chi.values))

    def left_bracket(self, chi: TestFunction, state_values) -> complex:
        return complex(np.dot(self.quad_w, np.conj(chi.values) * state_values))


def _background_cache(spec, ell, grid, contour, refine):
    k, w, n_path = contour.nodes_weights(refine)
    phi = solve_regular(grid, k)[0].values
    f_pos = jost_function(spec, k, ell=ell, grid=grid)
    f_neg = jost_function(spec, -k, ell=ell, grid=grid)
    kp = k ** (ell + 1)
    return _Background(
        k=k, w=w, psi=phi * (kp / f_pos), psi_t=phi * (kp / f_neg), n_path=n_path
    )


def find_bound_states(spec: PotentialSpec, ell: int = 0, h: float = DEFAULT_H,
                      s_max: float = 12.0, n_scan: int = 600):
    """Bound wave numbers i*kappa from sign changes of F on the +i axis."""
    from scipy.optimize import brentq

    grid = build_grid(spec, ell, h)
    s = np.linspace(1e-3, s_max, n_scan)
    f = jost_function(spec, 1j * s, ell=ell, grid=grid).real
    out = []
    for i in np.where(np.diff(np.sign(f)) != 0)[0]:
        fn = lambda x: jost_function(spec, 1j * x, ell=ell, grid=grid).real
        out.append(1j * brentq(fn, s[i], s[i + 1], xtol=1e-13))
    return tuple(out)


def make_basis(
    spec: PotentialSpec,
    contour: ContourSpec,
    ell: int = 0,
    h: float = DEFAULT_H,
    census_h: float = 2e-3,
    x_m: complex = 1.0,
    zeros=None,
    bound=None,
) -> BasisSet:
    """Assemble the basis captured by a contour, with background caches.

    zeros: optional precomputed census of Jost zeros in the lower half
    plane (list of ZeroRecord); when omitted the capture rectangle is
    swept.  bound: optional list of bound wave numbers.
    """
    grid = build_grid(spec, ell, h)
    if zeros is None:
        box = SearchBox(1e-2, contour.corner, -contour.gamma, -1e-4)
        zeros = find_zeros(spec, box, ell=ell, h=census_h)
    if bound is None:
        bound = find_bound_states(spec, ell, h)

    # clearance: every pole of either kernel must stay off the path
    for z in [rec.k for rec in zeros] + list(bound):
        for pole in (z, -z):
            d = contour.distance(pole)
            if d < _PATH_CLEARANCE:
                raise ContourPoleClash(
                    f"kernel pole at {pole:.6g} lies {d:.2e} from the contour"
                )

    bound_states = tuple(normalize_simple(spec, kb, ell, h, grid=grid) for kb in bound)
    captured = [rec for rec in zeros if contour.captures(rec.k)]
    doubles = [rec for rec in captured if rec.multiplicity == 2]
    if len(doubles) > 1:
        raise MultiplicityMismatch("at most one double zero is supported")
    chain = None
    if doubles:
        chain = build_jordan_chain(spec, doubles[0].k, ell, h, x_m=x_m, grid=grid)
    resonances = tuple(
        normalize_simple(spec, rec.k, ell, h, grid=grid)
        for rec in captured
        if rec.multiplicity == 1
    )

    return BasisSet(
        spec=spec,
        ell=ell,
        grid=grid,
        bound=bound_states,
        resonances=resonances,
        chain=chain,
        contour=contour,
        bg=_background_cache(spec, ell, grid, contour, 1.0),
        bg_half=_background_cache(spec, ell, grid, contour, 0.5),
        quad_w=grid.quad_weights(),
    )


@dataclass(frozen=True, eq=False)
class ExpansionResult:
    coeff_bound: tuple
    coeff_resonances: tuple
    coeff_u: complex | None      # multiplies u (equals <u_hat|chi>)
    coeff_u_hat: complex | None  # multiplies u_hat (equals <u|chi>)
    background: np.ndarray
    reconstruction: np.ndarray
    residual: float


def expand_function(chi: TestFunction, basis: BasisSet,
                    drop_hat: bool = False) -> ExpansionResult:
    """Expand chi over the basis; the residual is the relative max-norm
    gap between chi and its reconstruction on the grid.

    drop_hat omits the u_hat carrier term (the one with coefficient
    <u|chi>) to expose how much the chain's abnormal mode carries.
    """
    if chi.grid is not basis.grid:
        raise ValueError("test function sampled on a different grid")
    rec = np.zeros_like(chi.values, dtype=complex)
    cb = []
    for st in basis.bound:
        c = basis.right_bracket(st.u, chi)
        cb.append(c)
        rec += c * st.u
    cr = []
    for st in basis.resonances:
        c = basis.right_bracket(st.u, chi)
        cr.append(c)
        rec += c * st.u
    c_u = c_hat = None
    if basis.chain is not None:
        ch = basis.chain
        c_hat = basis.right_bracket(ch.u, chi)
        c_u = basis.right_bracket(ch.u_hat, chi)
        rec += c_u * ch.u
        if not drop_hat:
            rec += c_hat * ch.u_hat
    bg = basis.bg
    br = (2.0 / np.pi) * bg.w * np.dot(chi.values, basis.quad_w[:, None] * bg.psi_t)
    background = bg.psi @ br
    rec += background
    residual = float(np.max(np.abs(chi.values - rec)) / np.max(np.abs(chi.values)))
    return ExpansionResult(
        coeff_bound=tuple(cb),
        coeff_resonances=tuple(cr),
        coeff_u=c_u,
        coeff_u_hat=c_hat,
        background=background,
        reconstruction=rec,
        residual=residual,
    )


def _snap(grid, r: float) -> int:
    i = int(np.searchsorted(grid.r, r))
    if i >= len(grid.r):
        return len(grid.r) - 1
    if i > 0 and abs(grid.r[i - 1] - r) <= abs(grid.r[i] - r):
        return i - 1
    return i


def greens_direct(
    spec: PotentialSpec,
    ell: int,
    k: complex,
    r: float,
    rp: float,
    h: float = DEFAULT_H,
    grid=None,
):
    """Outgoing Green's function (-1)^(l+1) k^l phi(k, r_<) f+(k, r_>)/F(k),
    with the radii snapped to grid nodes."""
    if grid is None:
        grid = build_grid(spec, ell, h)
    k = complex(k)
    f = jost_function(spec, k, ell=ell, grid=grid)
    if abs(f) < 1e-11:
        raise AtPole(f"F({k}) = {f:.3e}")
    lo, hi = sorted((_snap(grid, r), _snap(grid, rp)))
    phi = solve_regular(grid, k)[0].values[lo, 0]
    fp = solve_outgoing(grid, k)[0].values[hi, 0]
    return (-1.0) ** (ell + 1) * k**ell * phi * fp / f


def _pole_sum(basis: BasisSet, e: complex, i: int, j: int) -> complex:
    total = 0.0 + 0.0j
    for st in list(basis.bound) + list(basis.resonances):
        total += st.u[i] * st.u[j] / (e - st.energy)
    if basis.chain is not None:
        ch = basis.chain
        de = e - ch.energy
        total += ch.x_m**2 * ch.u[i] * ch.u[j] / de**2
        total += (ch.u[i] * ch.u_hat[j] + ch.u_hat[i] * ch.u[j]) / de
    return total


def _check_energy(basis: BasisSet, e: complex):
    for st in list(basis.bound) + list(basis.resonances):
        if abs(e - st.energy) < 1e-8 * max(1.0, abs(st.energy)):
            raise AtEigenvalue(f"energy {e} sits on the eigenvalue {st.energy}")
    if basis.chain is not None and abs(e - basis.chain.energy) < 1e-8 * max(
        1.0, abs(basis.chain.energy)
    ):
        raise AtEigenvalue(f"energy {e} sits on the double eigenvalue")
    k = np.sqrt(e)
    if min(basis.contour.distance(k), basis.contour.distance(-k)) < _PATH_CLEARANCE:
        raise AtEigenvalue(
            f"wave number {k:.6g} lies on the background contour; deform it"
        )


def reference_energy(basis: BasisSet) -> complex:
    """Subtraction point on the negative real energy axis, clear of the
    contour's first segment and of every pole of the basis.

    Deepened in fixed steps rather than continuously so that contours of
    comparable depth share the same point; the subtracted resolvent is
    then contour independent to quadrature accuracy, not just to the
    (weaker) e0-sensitivity of the truncated tail."""
    e0 = -15.0
    poles = [st.energy for st in list(basis.bound) + list(basis.resonances)]
    if basis.chain is not None:
        poles.append(basis.chain.energy)
    while e0 > -(basis.contour.gamma**2 + 10.0) or any(
        abs(e0 - p) < 2.0 for p in poles
    ):
        e0 *= 1.7
    return complex(e0)


def resolvent_expansion(
    spec: PotentialSpec,
    ell: int,
    e: complex,
    r: float,
    rp: float,
    basis: BasisSet,
    subtract: bool = True,
):
    """Resolvent kernel at energy e from the captured states plus the
    contour background; the poles it exhibits are exactly the basis ones.

    For Im e < 0 the value is the continuation through the spectrum onto
    the unphysical sheet, i.e. the direct kernel at the principal branch
    of sqrt(e); that is the sheet where the resonance poles live.

    The delta shells leave kink tails ~ 1/k'^2 in the continuum kernel, so
    the bare background converges only like 1/k_max.  By default a single
    dispersion subtraction at reference_energy(basis) is applied: the
    constant there comes from the direct kernel, and the remaining
    integrand decays like 1/k'^4, restoring fast convergence.  subtract
    False evaluates the bare representation.
    """
    if spec != basis.spec or ell != basis.ell:
        raise ValueError("basis was built for a different potential")
    e = complex(e)
    _check_energy(basis, e)
    i, j = _snap(basis.grid, r), _snap(basis.grid, rp)
    total = _pole_sum(basis, e, i, j)
    bg = basis.bg
    if not subtract:
        return total + (2.0 / np.pi) * np.sum(
            bg.w * bg.psi[i] * bg.psi_t[j] / (e - bg.k**2)
        )
    e0 = reference_energy(basis)
    g0 = greens_direct(
        spec, ell, complex(np.sqrt(e0)), basis.grid.r[i], basis.grid.r[j],
        grid=basis.grid,
    )
    kernel = bg.w * bg.psi[i] * bg.psi_t[j] / ((e - bg.k**2) * (e0 - bg.k**2))
    total += g0 - _pole_sum(basis, e0, i, j)
    total -= (e - e0) * (2.0 / np.pi) * np.sum(kernel)
    return total


@dataclass(frozen=True)
class OperatorMatrix:
    """Spectral representation of f(H) over the basis.

    Diagonal entries carry f at each simple eigenvalue; the chain, when
    present, contributes the 2x2 block [[f, X^2 f'], [0, f]] at the double
    eigenvalue.  The background keeps f as a functional factor under the
    contour integral.
    """

    labels: tuple
    diagonal: tuple
    block: np.ndarray | None
    block_energy: complex | None
    background_factor: object


def represent_operator(f, df, basis: BasisSet) -> OperatorMatrix:
    labels, diag = [], []
    for st in basis.bound:
        labels.append(("bound", st.k))
        diag.append(f(st.energy))
    for st in basis.resonances:
        labels.append(("resonance", st.k))
        diag.append(f(st.energy))
    block = None
    be = None
    if basis.chain is not None:
        ch = basis.chain
        be = ch.energy
        block = np.array(
            [[f(be), ch.x_m**2 * df(be)], [0.0, f(be)]], dtype=complex
        )
    return OperatorMatrix(
        labels=tuple(labels),
        diagonal=tuple(diag),
        block=block,
        block_energy=be,
        background_factor=f,
    )


def _filon_tail(basis: BasisSet, chi: TestFunction, n_nodes: int):
    """Legendre data for the real-axis tail in the energy variable.

    The tail integral int g(k) exp(-i k^2 t) dk becomes, with E = k^2,
    a Fourier integral of the smooth part p(E) = g(sqrt(E))/(2 sqrt(E)).
    Per panel, p is projected on Legendre polynomials; the oscillatory
    moments int P_n(x) exp(-i w x) dx = 2 (-i)^n j_n(w) are then exact
    at every time.  Returns (panel mids, halfwidth, folded coefficients).
    """
    ct = basis.contour
    e_lo, e_hi = ct.corner**2, ct.k_max**2
    n_panels = max(1, int(np.ceil((e_hi - e_lo) / ct.e_panel)))
    hw = (e_hi - e_lo) / (2.0 * n_panels)
    mids = e_lo + hw * (2.0 * np.arange(n_panels) + 1.0)
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    k_nodes = np.sqrt((mids[:, None] + hw * x[None, :]).ravel())
    w_r = basis.quad_w
    bl = np.empty(k_nodes.size, dtype=complex)
    br = np.empty(k_nodes.size, dtype=complex)
    for i0 in range(0, k_nodes.size, 256):
        sl = slice(i0, min(i0 + 256, k_nodes.size))
        kk = k_nodes[sl]
        phi = solve_regular(basis.grid, kk)[0].values
        f_pos = jost_function(basis.spec, kk, ell=basis.ell, grid=basis.grid)
        f_neg = jost_function(basis.spec, -kk, ell=basis.ell, grid=basis.grid)
        kp = kk ** (basis.ell + 1)
        bl[sl] = np.conj(chi.values) @ ((w_r[:, None] * phi) * (kp / f_pos))
        br[sl] = chi.values @ ((w_r[:, None] * phi) * (kp / f_neg))
    p = ((2.0 / np.pi) * bl * br / (2.0 * k_nodes)).reshape(n_panels, n_nodes)
    orders = np.arange(n_nodes)
    vander = np.polynomial.legendre.legvander(x, n_nodes - 1)
    coeff = (p @ (vander * w[:, None])) * (orders + 0.5)
    coeff = coeff * 2.0 * (-1j) ** orders
    return mids, hw, coeff


def _filon_series(mids, hw, coeff, ts):
    from scipy.special import spherical_jn

    orders = np.arange(coeff.shape[1])
    out = np.empty(len(ts), dtype=complex)
    for i, t in enumerate(ts):
        bessel = spherical_jn(orders, hw * t)
        out[i] = hw * np.dot(np.exp(-1j * mids * t), coeff @ bessel)
    return out


def evolve_survival(
    chi: TestFunction,
    ts,
    basis: BasisSet,
    bg_tol: float = 1e-4,
):
    """Survival amplitude A(t) = <chi*| exp(-iHt) |chi> over the basis.

    The deformed segments carry decaying or slowly turning phases and are
    summed directly; the real-axis tail, whose phase rate 2kt outruns any
    fixed node set, goes through the Filon treatment.  Everything is
    evaluated on a full and a half node set and their disagreement is the
    convergence estimate; BackgroundNotConverged names the first bad time.
    The estimate bounds the coarse rule, so it is conservative for the
    returned value, typically by an order of magnitude or more; the shallow
    resonance peaks threading the real axis are what it reacts to.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts < 0):
        raise ValueError("only forward evolution is defined here")
    discrete = np.zeros(len(ts), dtype=complex)
    for st in list(basis.bound) + list(basis.resonances):
        cl = basis.left_bracket(chi, st.u)
        cr = basis.right_bracket(st.u, chi)
        discrete += cl * cr * np.exp(-1j * st.energy * ts)
    if basis.chain is not None:
        ch = basis.chain
        lu = basis.left_bracket(chi, ch.u)
        lh = basis.left_bracket(chi, ch.u_hat)
        ru = basis.right_bracket(ch.u, chi)
        rh = basis.right_bracket(ch.u_hat, chi)
        phase = np.exp(-1j * ch.energy * ts)
        discrete += phase * (lh * ru + lu * rh)
        discrete += phase * (-1j * ts) * ch.x_m**2 * lu * ru
    w_r = basis.quad_w

    def segments(bg):
        n = bg.n_path
        bl = np.conj(chi.values) @ (w_r[:, None] * bg.psi[:, :n])
        br = chi.values @ (w_r[:, None] * bg.psi_t[:, :n])
        ph = np.exp(-1j * np.outer(ts, bg.k[:n] ** 2))
        return (2.0 / np.pi) * ph @ (bg.w[:n] * bl * br)

    n_filon = basis.contour.n_filon
    full = segments(basis.bg) + _filon_series(*_filon_tail(basis, chi, n_filon), ts)
    half = segments(basis.bg_half) + _filon_series(
        *_filon_tail(basis, chi, max(8, n_filon // 2)), ts
    )
    a = discrete + full
    err = np.abs(full - half)
    bad = err > bg_tol * np.maximum(1.0, np.abs(a))
    if np.any(bad):
        t_bad = ts[int(np.argmax(bad))]
        raise BackgroundNotConverged(
            f"background quadrature estimate {err.max():.2e} at t = {t_bad:g}"
        )
    return a
