"""Independent numerical oracles for the test suite.

Nothing here shares algorithms with the package.  Survival amplitudes
come from Crank-Nicolson stepping of the reduced radial equation on a
uniform grid with a quadratic absorber at the outer wall, Richardson
extrapolated in the time step.  The stepper itself is validated against
exact half-line free propagation (image-method kernel) before anything
trusts it.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


def _grid_potential(spec, ell, r, dr, cap_start, cap_strength):
    v = np.zeros(r.size, dtype=complex)
    for st in spec.steps:
        v[(r >= st.lo) & (r < st.hi)] += st.v
    for sh in spec.shells:
        j = int(round(sh.a / dr))
        if abs(j * dr - sh.a) > 1e-9 * max(sh.a, 1.0):
            raise ValueError(f"shell at r={sh.a} does not sit on a grid node")
        # delta shell as lam/dr on its node: the finite difference then
        # reproduces the derivative jump exactly, leaving an O(dr^2) defect
        v[j - 1] += sh.lam / dr
    if ell:
        v = v + ell * (ell + 1) / r**2
    mask = r > cap_start
    v[mask] -= (
        1j * cap_strength * ((r[mask] - cap_start) / (r[-1] - cap_start)) ** 2
    )
    return v


def cn_survival(
    spec,
    chi_fn,
    times,
    *,
    ell=0,
    r_max=24.0,
    dr=1e-3,
    dt=5e-4,
    cap_start=16.0,
    cap_strength=112.0,
    richardson=True,
):
    """Survival amplitude integral of chi * psi(t) for i psi_t = H psi.

    Dirichlet walls at r = 0 and r = r_max; the absorber handles whatever
    reaches the outer one.  Sample times must be integer multiples of dt.
    Richardson combines runs at dt and dt/2, removing the O(dt^2) phase
    error of the trapezoidal stepper.
    """
    times = np.asarray(times, dtype=float)
    n = int(round(r_max / dr)) - 1
    r = dr * np.arange(1, n + 1)
    v = _grid_potential(spec, ell, r, dr, cap_start, cap_strength)
    main = 2.0 / dr**2 + v
    off = np.full(n - 1, -1.0 / dr**2)
    chi = chi_fn(r).astype(complex)
    if abs(chi[-1]) > 1e-12 * np.abs(chi).max():
        raise ValueError("test packet must vanish at the outer wall")

    def run(step):
        a_op = sp.diags(
            [0.5j * step * off, 1.0 + 0.5j * step * main, 0.5j * step * off],
            [-1, 0, 1],
            format="csc",
        )
        solve = spla.factorized(a_op)
        b_main = 1.0 - 0.5j * step * main
        b_off = -0.5j * step * off
        psi = chi.copy()
        rhs = np.empty_like(psi)
        out = np.empty(times.size, dtype=complex)
        done = 0
        for i, target in enumerate(times):
            want = int(round(target / step))
            if abs(want * step - target) > 1e-9:
                raise ValueError("sample times must be multiples of the step")
            for _ in range(want - done):
                rhs[:] = b_main * psi
                rhs[:-1] += b_off * psi[1:]
                rhs[1:] += b_off * psi[:-1]
                psi = solve(rhs)
            done = want
            # chi vanishes at both walls, so the plain sum is the trapezoid
            out[i] = dr * (chi @ psi)
        return out

    coarse = run(dt)
    if not richardson:
        return coarse
    fine = run(dt / 2.0)
    return (4.0 * fine - coarse) / 3.0


def free_survival_exact(chi_fn, times, *, support=(1e-9, 3.0), n_nodes=1200):
    """Half-line free propagation by quadrature of the image kernel.

    A(t) = integral of chi(r) [K(r-r',t) - K(r+r',t)] chi(r'), with
    K(x,t) = exp(i x^2 / 4t) / sqrt(4 pi i t).  chi must vanish at both
    ends of the support interval.
    """
    lo, hi = support
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    rr = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
    ww = 0.5 * (hi - lo) * w
    g = chi_fn(rr) * ww
    diff = (rr[:, None] - rr[None, :]) ** 2
    plus = (rr[:, None] + rr[None, :]) ** 2
    out = []
    for t in np.asarray(times, dtype=float):
        pref = 1.0 / np.sqrt(4.0j * np.pi * t)
        kern = pref * (np.exp(0.25j * diff / t) - np.exp(0.25j * plus / t))
        out.append(g @ kern @ g)
    return np.array(out)
