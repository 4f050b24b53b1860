"""Locate a double zero of the Jost function for a two-shell potential.

Stage 1 eliminates the strengths analytically: for fixed complex k the
conditions F = 0 and dF/dk = 0 are bilinear in (lam1, lam2), so lam1
satisfies a quadratic whose coefficients are entire functions of k, and
lam2 follows linearly.  Both strengths must come out real, which happens
on the zero set of the resultant of Re/Im of that quadratic.  We trace
those curves on a grid and keep points where the induced lam2 is real
too.  Stage 2 polishes each candidate with the library Newton solver and
certifies it (winding count, monodromy swap, splitting exponent).

Note the radii must not be commensurate: for a2/a1 = 2 the elimination
shows the resultant curves never meet Im(lam2) = 0 off the imaginary
axis, i.e. that family only degenerates at antibound points.  Run with
--a2 2.0 to reproduce that negative result.
"""

import argparse
import json

import numpy as np

from gamowkit.degeneracy import find_double_zero, monodromy, splitting_exponent
from gamowkit.potentials import PotentialSpec, Shell
from gamowkit.zeros import JostEngine, SearchBox, count_zeros_in_box, find_zeros


def strength_fields(K, a1, a2):
    """Resultant R, the real strength lam1 on R=0, and the induced lam2.

    F(k) = 1 + lam1*q1 + lam2*q2 + lam1*lam2*q12 with q's entire in k.
    F = F' = 0 gives  A*lam1^2 + B*lam1 + C = 0,
    A = q1*q12' - q1'*q12,  B = q1*q2' + q12' - q1'*q2,  C = q2'.
    lam1 is real iff the resultant of (Re, Im) of that quadratic vanishes.
    """
    u = 2j * K
    p1, p2 = np.exp(u * a1), np.exp(u * a2)
    q1 = (p1 - 1.0) / u
    q2 = (p2 - 1.0) / u
    r12 = p2 / p1
    num = (p1 - 1.0) * (r12 - 1.0)
    q12 = num / (u * u)
    dp1, dp2 = 2j * a1 * p1, 2j * a2 * p2
    dq1 = (dp1 * u - (p1 - 1.0) * 2j) / u**2
    dq2 = (dp2 * u - (p2 - 1.0) * 2j) / u**2
    dnum = dp1 * (r12 - 1.0) + (p1 - 1.0) * 2j * (a2 - a1) * r12
    dq12 = (dnum * u - num * 4j) / u**3
    A = q1 * dq12 - dq1 * q12
    B = q1 * dq2 + dq12 - dq1 * q2
    C = dq2
    ar, ai = A.real, A.imag
    br, bi = B.real, B.imag
    cr, ci = C.real, C.imag
    R = (ar * ci - ai * cr) ** 2 - (ar * bi - ai * br) * (br * ci - bi * cr)
    with np.errstate(all="ignore"):
        lam1 = (ar * ci - ai * cr) / (ai * br - ar * bi)
        lam2 = -lam1 * dq1 / (dq2 + lam1 * dq12)
    return R, lam1, lam2


def candidates(a1, a2, box, n_re=1400, n_im=500, lam_cap=30.0, rel_tol=0.02):
    """EP candidates: resultant-curve crossings where lam2 is nearly real."""
    re = np.linspace(box[0], box[1], n_re)
    im = np.linspace(box[2], box[3], n_im)
    K = re[None, :] + 1j * im[:, None]
    R, L1, L2 = strength_fields(K, a1, a2)
    sR = np.sign(R)
    hits = []
    for horiz in (True, False):
        if horiz:
            ii, jj = np.where(sR[:, :-1] * sR[:, 1:] < 0)
            pick = lambda F: (F[ii, jj], F[ii, jj + 1])
        else:
            ii, jj = np.where(sR[:-1, :] * sR[1:, :] < 0)
            pick = lambda F: (F[ii, jj], F[ii + 1, jj])
        Ra, Rb = pick(R)
        t = Ra / (Ra - Rb)
        k = (lambda a, b: a * (1 - t) + b * t)(*pick(K))
        l1 = (lambda a, b: a * (1 - t) + b * t)(*pick(L1))
        l2 = (lambda a, b: a * (1 - t) + b * t)(*pick(L2))
        ok = (
            np.isfinite(l1) & np.isfinite(l2)
            & (np.abs(l1) > 0.5) & (np.abs(l1) < lam_cap)
            & (np.abs(l2) > 0.5) & (np.abs(l2) < lam_cap)
        )
        rel = np.abs(l2.imag) / np.abs(l2)
        good = ok & (rel < rel_tol)
        hits += list(zip(k[good], l1[good], l2[good], rel[good]))
    hits.sort(key=lambda h: h[3])
    distinct = []
    for k, l1, l2, rel in hits:
        if any(abs(k - d[0]) < 0.05 for d in distinct):
            continue
        distinct.append((k, l1, l2, rel))
    return distinct


def certify(a1, a2, cutoff, k0, l1, l2, ell=0):
    """Polish with the library Newton and run the independent checks."""
    fam = PotentialSpec(
        shells=(Shell(a1, float(l1)), Shell(a2, float(l2))),
        cutoff=cutoff,
        free_params=("shells.0.lambda", "shells.1.lambda"),
    )
    res, spec_star = find_double_zero(
        fam, k_seed=complex(k0), p_seed=(float(l1), float(l2)), ell=ell,
        method="closed",
    )
    k_m, p_star = res.k, tuple(float(p) for p in res.params)
    eng = JostEngine(spec_star, ell=ell, method="closed")
    _, _, f2, f3 = eng.derivs(k_m, order=3, spec=spec_star)
    box = SearchBox(k_m.real - 1e-3, k_m.real + 1e-3, k_m.imag - 1e-3, k_m.imag + 1e-3)
    n_disk = count_zeros_in_box(spec_star, box, ell=ell)
    mono = monodromy(spec_star, p_star, k_m, radius=0.35, n_steps=64)
    slope, _, _ = splitting_exponent(spec_star, p_star, k_m, direction=(1.0, 0.0))
    return {
        "p_star": list(p_star),
        "k_m": {"re": k_m.real, "im": k_m.imag},
        "residuals": {"f": abs(res.f), "d1": abs(res.d1)},
        "f2": {"re": f2.real, "im": f2.imag},
        "f3": {"re": f3.real, "im": f3.imag},
        "newton_iters": int(res.iterations),
        "jac_cond": float(res.jac_cond),
        "count_in_disk": int(n_disk),
        "monodromy_swapped": bool(mono.swapped),
        "splitting_exponent": float(slope),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a1", type=float, default=1.0)
    ap.add_argument("--a2", type=float, default=1.8)
    ap.add_argument("--cutoff", type=float, default=2.0)
    ap.add_argument("--box", type=float, nargs=4, default=(0.3, 6.0, -0.9, -0.02),
                    metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    ap.add_argument("--lam-cap", type=float, default=30.0)
    ap.add_argument("--out", type=str, default=None, help="write certified JSON here")
    args = ap.parse_args()

    cands = candidates(args.a1, args.a2, args.box, lam_cap=args.lam_cap)
    if not cands:
        print(f"no candidate double zero for radii ({args.a1}, {args.a2}) "
              f"with |lambda| <= {args.lam_cap} in {args.box}")
        return
    for k, l1, l2, rel in cands:
        print(f"candidate k={k:.5f} lam1={l1:.4f} lam2={l2.real:.4f} "
              f"(rel Im lam2 = {rel:.1e})")
    k, l1, l2, _ = cands[0]
    report = certify(args.a1, args.a2, args.cutoff, k, l1, l2.real)
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
