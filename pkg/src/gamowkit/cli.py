"""Command line front end: zero census, degeneracy hunts, chain reports,
resolvent comparisons, time evolution and a verification gate.

Exit codes: 0 success, 1 verification failure, 2 configuration or I/O
problem, 3 a numerical iteration or representation that failed.  Flags are
kebab-case; a config file given with --config takes precedence over flags
covering the same field.  Every float is printed with 17 significant
digits, and a fixed seed makes repeated runs byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .errors import GamowKitError, NoConvergence, NotDeltaShellFamily
from .degeneracy import find_double_zero
from .expansions import (
    ContourSpec,
    evolve_survival,
    gaussian_bump,
    greens_direct,
    make_basis,
    resolvent_expansion,
)
from .potentials import PotentialSpec, closed_form_jost
from .regulated import NU_SEQUENCE, product_tails, regulated_integral
from .solver import DEFAULT_H, build_grid, jost_function, solve_regular
from .states import (
    IDENTITY_CONTRACT,
    _wave_amplitudes,
    build_jordan_chain,
    chain_identities,
    hamiltonian_residuals,
    outgoing_tail_terms,
)
from .zeros import SearchBox, find_zeros, s_matrix

CONFIG_SCHEMA = "gamowkit.config/1"

_EXIT_VERIFY = 1
_EXIT_CONFIG = 2
_EXIT_NUMERICS = 3


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _json_value(v, indent: int) -> str:
    pad = " " * indent
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = (
            f'{pad}  "{k}": {_json_value(v[k], indent + 2)}' for k in sorted(v)
        )
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        items = (f"{pad}  {_json_value(x, indent + 2)}" for x in v)
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    if v is None:
        return "null"
    return json.dumps(str(v))


def _write_json(path, doc: dict) -> None:
    with open(path, "w") as fh:
        fh.write(_json_value(doc, 0))
        fh.write("\n")


def _write_csv(path, schema: str, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema: {schema}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(
                ",".join(
                    c if isinstance(c, str) else
                    str(c) if isinstance(c, (int, np.integer)) else _fmt(c)
                    for c in row
                )
                + "\n"
            )


def _cpair(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _as_complex(v) -> complex:
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


@dataclass
class RunConfig:
    potential: PotentialSpec | None = None
    ell: int = 0
    h: float = DEFAULT_H
    gamma: float = 0.8
    corner: float = 6.0
    k_max: float | None = None
    box: tuple | None = None
    nu_sequence: tuple = NU_SEQUENCE
    seed: int = 7
    out_dir: str = "."
    k_m: complex | None = None
    x_m: complex = 1.0
    p_seed: tuple | None = None
    chi_center: float = 0.5
    chi_width: float = 0.12
    t_max: float = 2.0
    n_times: int = 41
    n_samples: int = 20
    field_points: int = 41
    fixture: str | None = None
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(t <= 0 for t in self.tolerances.values()):
            raise ValueError("tolerances must be positive")

    def contour(self) -> ContourSpec:
        # the tail must outrun the spectral content of the test function
        k_max = self.k_max if self.k_max is not None else 12.0 / self.chi_width
        return ContourSpec(gamma=self.gamma, corner=self.corner, k_max=k_max)

    def census_box(self) -> SearchBox:
        if self.box is not None:
            return SearchBox(*self.box)
        return SearchBox(1e-2, self.corner, -self.gamma, -1e-4)


_X_VALUES = {"1": 1.0 + 0.0j, "2": 2.0 + 0.0j, "i": 1.0j}


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    for name in (
        "ell", "h", "gamma", "corner", "k_max", "seed", "out_dir",
        "chi_center", "chi_width", "t_max", "n_times", "n_samples",
        "field_points", "fixture",
    ):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "potential", None):
        with open(args.potential) as fh:
            cfg.potential = PotentialSpec.from_dict(json.load(fh))
    if getattr(args, "box", None):
        cfg.box = tuple(args.box)
    if getattr(args, "k_m", None):
        cfg.k_m = complex(args.k_m[0], args.k_m[1])
    if getattr(args, "k_seed", None):
        cfg.k_m = complex(args.k_seed[0], args.k_seed[1])
    if getattr(args, "x_m", None):
        cfg.x_m = _X_VALUES[args.x_m]
    # the config file wins over flags on every field it names
    if getattr(args, "config", None):
        with open(args.config) as fh:
            doc = json.load(fh)
        if doc.get("schema") != CONFIG_SCHEMA:
            raise NotDeltaShellFamily(
                f"unknown config schema {doc.get('schema')!r}, "
                f"expected {CONFIG_SCHEMA!r}"
            )
        if "potential" in doc:
            cfg.potential = PotentialSpec.from_dict(doc["potential"])
        grid = doc.get("grid", {})
        cfg.ell = int(grid.get("ell", cfg.ell))
        cfg.h = float(grid.get("h", cfg.h))
        ct = doc.get("contour", {})
        cfg.gamma = float(ct.get("gamma", cfg.gamma))
        cfg.corner = float(ct.get("corner", cfg.corner))
        if "k_max" in ct:
            cfg.k_max = float(ct["k_max"])
        if "nu_sequence" in doc:
            cfg.nu_sequence = tuple(float(v) for v in doc["nu_sequence"])
        if "seed" in doc:
            cfg.seed = int(doc["seed"])
        if "box" in doc:
            cfg.box = tuple(float(v) for v in doc["box"])
        if "k_m" in doc:
            cfg.k_m = _as_complex(doc["k_m"])
        if "x_m" in doc:
            cfg.x_m = _X_VALUES[str(doc["x_m"])]
        if "p_seed" in doc:
            cfg.p_seed = tuple(float(v) for v in doc["p_seed"])
        chi = doc.get("chi", {})
        cfg.chi_center = float(chi.get("center", cfg.chi_center))
        cfg.chi_width = float(chi.get("width", cfg.chi_width))
        ev = doc.get("evolve", {})
        cfg.t_max = float(ev.get("t_max", cfg.t_max))
        cfg.n_times = int(ev.get("n_times", cfg.n_times))
        if "n_samples" in doc:
            cfg.n_samples = int(doc["n_samples"])
        if "out_dir" in doc:
            cfg.out_dir = str(doc["out_dir"])
        if "fixture" in doc:
            cfg.fixture = str(doc["fixture"])
        if "tolerances" in doc:
            cfg.tolerances = {k: float(v) for k, v in doc["tolerances"].items()}
            if any(t <= 0 for t in cfg.tolerances.values()):
                raise ValueError("tolerances must be positive")
    return cfg


def _require_potential(cfg: RunConfig) -> PotentialSpec:
    if cfg.potential is None:
        raise NotDeltaShellFamily("no potential given (flag --potential or config)")
    return cfg.potential


def _out(cfg: RunConfig, name: str) -> str:
    import os

    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def cmd_scan(cfg: RunConfig) -> int:
    spec = _require_potential(cfg)
    box = cfg.census_box()
    zeros = find_zeros(spec, box, ell=cfg.ell, h=cfg.h)
    rows = [
        (z.k.real, z.k.imag, z.multiplicity, z.kind, z.res_f, z.res_df,
         z.energy.real, z.energy.imag)
        for z in zeros
    ]
    _write_csv(
        _out(cfg, "zeros.csv"),
        "gamowkit.zeros/1",
        "re_k,im_k,multiplicity,class,res_f,res_df,re_E,im_E",
        rows,
    )
    n = cfg.field_points
    res = np.linspace(box.re_min, box.re_max, n)
    ims = np.linspace(box.im_min, box.im_max, n)
    kk = (res[None, :] + 1j * ims[:, None]).ravel()
    f = jost_function(spec, kk, ell=cfg.ell, h=cfg.h)
    _write_csv(
        _out(cfg, "jost_field.csv"),
        "gamowkit.field/1",
        "re_k,im_k,abs_f",
        ((k.real, k.imag, abs(v)) for k, v in zip(kk, f)),
    )
    return 0


def _chain_report(spec: PotentialSpec, k_m: complex, cfg: RunConfig) -> dict:
    chain = build_jordan_chain(spec, k_m, ell=cfg.ell, h=cfg.h, x_m=cfg.x_m)
    idents = chain_identities(chain)
    ham = hamiltonian_residuals(chain)
    return {
        "schema": "gamowkit.chain/1",
        "k_m": _cpair(chain.k),
        "energy": _cpair(chain.energy),
        "N2": _cpair(chain.norm2),
        "C_l": _cpair(chain.c_ell),
        "X_m": _cpair(chain.x_m),
        "identities": {IDENTITY_CONTRACT[k]: v for k, v in idents.items()},
        "hamiltonian_residuals": ham,
        "matrix": {
            "labels": ["u", "u_hat"],
            "jordan_block": {
                "eigenvalue": _cpair(chain.energy),
                "offdiag": _cpair(chain.x_m**2),
            },
        },
    }


def cmd_ep(cfg: RunConfig) -> int:
    spec = _require_potential(cfg)
    if cfg.k_m is None:
        raise NotDeltaShellFamily("ep needs a momentum seed (--k-seed or config k_m)")
    if len(spec.free_params) != 2:
        # the hunt varies two couplings; without them it cannot converge
        raise NoConvergence(
            "degeneracy hunt needs a family with two free_params, got "
            f"{len(spec.free_params)}"
        )
    result, spec_star = find_double_zero(
        spec, cfg.k_m, p_seed=cfg.p_seed, ell=cfg.ell, h=cfg.h
    )
    doc = {
        "schema": "gamowkit.ep/1",
        "family": spec.to_dict(),
        "p_star": list(result.params),
        "k_m": _cpair(result.k),
        "f": _cpair(result.f),
        "f1": _cpair(result.d1),
        "f2": _cpair(result.d2),
        "f3": _cpair(result.d3),
        "residual": result.residual,
        "iterations": result.iterations,
        "jac_cond": result.jac_cond,
        "method": result.method,
    }
    _write_json(_out(cfg, "ep.json"), doc)
    _write_json(_out(cfg, "chain.json"), _chain_report(spec_star, result.k, cfg))
    return 0


def cmd_chain(cfg: RunConfig) -> int:
    spec = _require_potential(cfg)
    if cfg.k_m is None:
        raise NotDeltaShellFamily("chain needs the double momentum (--k-m or config)")
    _write_json(_out(cfg, "chain.json"), _chain_report(spec, cfg.k_m, cfg))
    return 0


def cmd_greens(cfg: RunConfig) -> int:
    spec = _require_potential(cfg)
    basis = make_basis(spec, cfg.contour(), ell=cfg.ell, h=cfg.h)
    rng = np.random.default_rng(cfg.seed)
    e_hi = min(40.0, 0.8 * cfg.corner**2)
    rows = []
    for _ in range(cfg.n_samples):
        e = complex(rng.uniform(2.0, e_hi), rng.uniform(-1.2, 3.0))
        r, rp = rng.uniform(0.1 * spec.cutoff, 0.95 * spec.cutoff, size=2)
        gd = greens_direct(spec, cfg.ell, np.sqrt(e), r, rp, grid=basis.grid)
        ge = resolvent_expansion(spec, cfg.ell, e, r, rp, basis)
        rows.append(
            (e.real, e.imag, r, rp, gd.real, gd.imag, ge.real, ge.imag,
             abs(ge - gd) / abs(gd))
        )
    _write_csv(
        _out(cfg, "greens.csv"),
        "gamowkit.greens/1",
        "re_e,im_e,r,rp,re_direct,im_direct,re_expansion,im_expansion,rel_err",
        rows,
    )
    return 0


def cmd_evolve(cfg: RunConfig) -> int:
    spec = _require_potential(cfg)
    basis = make_basis(spec, cfg.contour(), ell=cfg.ell, h=cfg.h)
    chi = gaussian_bump(basis.grid, cfg.chi_center, cfg.chi_width)
    ts = np.linspace(0.0, cfg.t_max, cfg.n_times)
    amps = evolve_survival(chi, ts, basis)
    _write_csv(
        _out(cfg, "survival.csv"),
        "gamowkit.survival/1",
        "t,re_A,im_A,abs_A",
        ((t, a.real, a.imag, abs(a)) for t, a in zip(ts, amps)),
    )
    return 0


def _regulated_phi_square(spec, k0, ell, grid) -> complex:
    phi = solve_regular(grid, k0)[0].values[:, 0]
    f_minus = jost_function(spec, -k0, ell=ell, grid=grid)
    a, _ = _wave_amplitudes(ell, k0, f_minus, 0.0)
    tails = outgoing_tail_terms(ell, k0, coef=a)
    return regulated_integral(grid, phi * phi, product_tails(tails, tails)).value


def cmd_verify(cfg: RunConfig) -> int:
    import os

    if cfg.fixture is None:
        fx = json.loads(
            resources.files("gamowkit").joinpath("data/ep_double_delta.json").read_text()
        )
    else:
        if not os.path.exists(cfg.fixture):
            raise FileNotFoundError(f"fixture {cfg.fixture!r} not found")
        with open(cfg.fixture) as fh:
            fx = json.load(fh)
    family = PotentialSpec.from_dict(fx["family"])
    k_m = _as_complex(fx["k_m"])
    ell = int(fx["ell"])

    checks = []

    def check(name, value, bound, sense="<="):
        tol = cfg.tolerances.get(name, bound)
        ok = value <= tol if sense == "<=" else value >= tol
        checks.append((name, value, tol, sense, bool(ok)))

    spec_star = family.with_params(np.asarray(fx["p_star"], dtype=float))
    grid = build_grid(spec_star, ell, cfg.h)

    res = np.linspace(0.2, 5.0, 10)
    ims = np.linspace(-1.0, -0.01, 10)
    kk = (res[None, :] + 1j * ims[:, None]).ravel()
    f_ode = jost_function(spec_star, kk, ell=ell, grid=grid)
    f_cf = closed_form_jost(spec_star, kk, ell=ell)
    check("jost_oracle", float(np.max(np.abs(f_ode - f_cf) / np.abs(f_cf))), 1e-8)

    k_real = np.linspace(0.05, 12.0, 100)
    s = s_matrix(spec_star, k_real, ell=ell)
    check("unitarity", float(np.max(np.abs(np.abs(s) - 1.0))), 1e-10)
    # real potential: F(k)* = F(-conj k)
    f_ref = closed_form_jost(spec_star, -np.conj(kk), ell=ell)
    check(
        "reflection",
        float(np.max(np.abs(np.conj(f_ref) - f_cf) / np.abs(f_cf))),
        1e-10,
    )

    seed_k = _as_complex(fx["seed"]["k"])
    seed_p = tuple(float(v) for v in fx["seed"]["p"])
    result, _ = find_double_zero(family, seed_k, p_seed=seed_p, ell=ell)
    check("ep_residual", result.residual, 1e-9)
    check("ep_matches_fixture", abs(result.k - k_m), 1e-8)
    check("ep_f2_magnitude", abs(result.d2), 1e-4, sense=">=")

    chain = build_jordan_chain(spec_star, k_m, ell=ell, h=cfg.h, x_m=1.0)
    idents = chain_identities(chain)
    for key, bound in (
        ("deriv_overlap", 1e-5),
        ("deriv_square", 1e-5),
        ("phi_hat_square", 1e-5),
        ("hat_overlap", 1e-5),
        ("u_square", 1e-6),
        ("u_hat_square", 1e-6),
        ("u_pair", 1e-6),
    ):
        check(IDENTITY_CONTRACT[key], idents[key], bound)

    check("reg_double", abs(_regulated_phi_square(spec_star, k_m, ell, grid)), 1e-6)
    simple_min = min(
        abs(_regulated_phi_square(spec_star, _as_complex(z), ell, grid))
        for z in fx["census"]
        if z["multiplicity"] == 1
    )
    check("reg_simple_min", simple_min, 1e-3, sense=">=")

    ham = hamiltonian_residuals(chain)
    check("hamiltonian_u", ham["u"], 1e-4)
    check("hamiltonian_u_hat", ham["u_hat"], 1e-3)

    all_ok = all(c[4] for c in checks)
    for name, value, tol, sense, ok in checks:
        flag = "PASS" if ok else "FAIL"
        print(f"{flag}  {name:<20} {value:.3e} {sense} {tol:.1e}")
    doc = {
        "schema": "gamowkit.verify/1",
        "fixture": cfg.fixture if cfg.fixture is not None else "packaged",
        "checks": [
            {"name": n, "value": v, "tolerance": t, "sense": s, "ok": ok}
            for n, v, t, s, ok in checks
        ],
        "ok": all_ok,
    }
    _write_json(_out(cfg, "verify.json"), doc)
    return 0 if all_ok else _EXIT_VERIFY


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="gamowkit", description=__doc__)
    sub = top.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config; overrides flags")
        p.add_argument("--potential", help="potential JSON file")
        p.add_argument("--ell", type=int)
        p.add_argument("--h", type=float, dest="h")
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--seed", type=int)

    def contoured(p):
        p.add_argument("--gamma", type=float)
        p.add_argument("--corner", type=float)
        p.add_argument("--k-max", type=float, dest="k_max")

    p = sub.add_parser("scan", help="zero census and |F| field over a box")
    common(p)
    p.add_argument("--box", type=float, nargs=4,
                   metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"))
    p.add_argument("--gamma", type=float)
    p.add_argument("--corner", type=float)
    p.add_argument("--field-points", type=int, dest="field_points")

    p = sub.add_parser("ep", help="drive a two-parameter family to a double zero")
    common(p)
    p.add_argument("--k-seed", type=float, nargs=2, metavar=("RE", "IM"),
                   dest="k_seed")

    p = sub.add_parser("chain", help="build and report the pair at a double zero")
    common(p)
    p.add_argument("--k-m", type=float, nargs=2, metavar=("RE", "IM"), dest="k_m")
    p.add_argument("--x-m", choices=sorted(_X_VALUES), dest="x_m")

    p = sub.add_parser("greens", help="resolvent expansion vs direct kernel")
    common(p)
    contoured(p)
    p.add_argument("--n-samples", type=int, dest="n_samples")

    p = sub.add_parser("evolve", help="survival amplitude of a Gaussian packet")
    common(p)
    contoured(p)
    p.add_argument("--chi-center", type=float, dest="chi_center")
    p.add_argument("--chi-width", type=float, dest="chi_width")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--n-times", type=int, dest="n_times")

    p = sub.add_parser("verify", help="acceptance checks against the shipped fixture")
    common(p)
    p.add_argument("--fixture")

    return top


_VERBS = {
    "scan": cmd_scan,
    "ep": cmd_ep,
    "chain": cmd_chain,
    "greens": cmd_greens,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        return _VERBS[args.verb](cfg)
    except (OSError, json.JSONDecodeError, KeyError, ValueError,
            NotDeltaShellFamily) as exc:
        json.dump({"error": str(exc), "kind": type(exc).__name__}, sys.stderr)
        sys.stderr.write("\n")
        return _EXIT_CONFIG
    except GamowKitError as exc:
        json.dump({"error": str(exc), "kind": type(exc).__name__}, sys.stderr)
        sys.stderr.write("\n")
        return _EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
