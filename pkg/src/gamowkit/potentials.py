"""Finite-range potential specifications.

The family handled by this package is a finite sum of delta shells plus
piecewise-constant steps, identically zero beyond a cutoff radius.  Shells
are distributional and therefore never appear in pointwise evaluation; they
enter the solver as derivative jumps and the closed form as transfer
matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import KIsZero, NotDeltaShellFamily

__all__ = [
    "Shell",
    "Step",
    "PotentialSpec",
    "evaluate_potential",
    "closed_form_jost",
    "load_potential",
    "dump_potential",
]


@dataclass(frozen=True)
class Shell:
    """Delta shell lam * delta(r - a)."""

    a: float
    lam: float


@dataclass(frozen=True)
class Step:
    """Constant value v on the half-open interval [lo, hi)."""

    lo: float
    hi: float
    v: float


@dataclass(frozen=True)
class PotentialSpec:
    shells: tuple[Shell, ...] = ()
    steps: tuple[Step, ...] = ()
    cutoff: float = 1.0
    free_params: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "shells", tuple(self.shells))
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "free_params", tuple(self.free_params))
        if not self.cutoff > 0:
            raise NotDeltaShellFamily(f"cutoff must be positive, got {self.cutoff}")
        radii = [sh.a for sh in self.shells]
        if any(a <= 0 for a in radii):
            raise NotDeltaShellFamily("shell radii must be strictly positive")
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise NotDeltaShellFamily("shell radii must be strictly increasing")
        # a shell sitting exactly on the cutoff would make the outgoing
        # boundary condition ambiguous there
        if any(a >= self.cutoff for a in radii):
            raise NotDeltaShellFamily("shells must lie strictly inside the cutoff")
        for st in self.steps:
            if not (0.0 <= st.lo < st.hi <= self.cutoff):
                raise NotDeltaShellFamily(f"step [{st.lo}, {st.hi}) outside [0, cutoff]")
        edges = sorted((st.lo, st.hi) for st in self.steps)
        if any(b[0] < a[1] for a, b in zip(edges, edges[1:])):
            raise NotDeltaShellFamily("steps must not overlap")
        for path in self.free_params:
            self._resolve(path)

    def _resolve(self, path: str) -> tuple[str, int, str]:
        parts = path.split(".")
        if len(parts) == 1 and parts[0] == "cutoff":
            return ("cutoff", 0, "cutoff")
        if len(parts) == 3:
            kind, idx, attr = parts
            if attr == "lambda":
                attr = "lam"
            try:
                i = int(idx)
            except ValueError:
                raise NotDeltaShellFamily(f"bad free parameter path {path!r}") from None
            if kind == "shells" and 0 <= i < len(self.shells) and attr in ("a", "lam"):
                return ("shells", i, attr)
            if kind == "steps" and 0 <= i < len(self.steps) and attr in ("lo", "hi", "v"):
                return ("steps", i, attr)
        raise NotDeltaShellFamily(f"bad free parameter path {path!r}")

    def current_params(self) -> np.ndarray:
        """Values of the free parameters, in declaration order."""
        out = []
        for path in self.free_params:
            kind, i, attr = self._resolve(path)
            if kind == "cutoff":
                out.append(self.cutoff)
            elif kind == "shells":
                out.append(getattr(self.shells[i], attr))
            else:
                out.append(getattr(self.steps[i], attr))
        return np.array(out, dtype=float)

    def with_params(self, values) -> "PotentialSpec":
        """Return a copy with the free parameters set to ``values``."""
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self.free_params),):
            raise NotDeltaShellFamily(
                f"expected {len(self.free_params)} parameter values, got shape {values.shape}"
            )
        shells = list(self.shells)
        steps = list(self.steps)
        cutoff = self.cutoff
        for path, val in zip(self.free_params, values):
            kind, i, attr = self._resolve(path)
            if kind == "cutoff":
                cutoff = float(val)
            elif kind == "shells":
                shells[i] = replace(shells[i], **{attr: float(val)})
            else:
                steps[i] = replace(steps[i], **{attr: float(val)})
        return PotentialSpec(tuple(shells), tuple(steps), cutoff, self.free_params)

    def to_dict(self) -> dict:
        return {
            "shells": [{"a": sh.a, "lambda": sh.lam} for sh in self.shells],
            "steps": [{"lo": st.lo, "hi": st.hi, "v": st.v} for st in self.steps],
            "cutoff": self.cutoff,
            "free_params": list(self.free_params),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PotentialSpec":
        shells = tuple(
            Shell(a=s["a"], lam=s["lambda"] if "lambda" in s else s["lam"])
            for s in d.get("shells", ())
        )
        steps = tuple(Step(lo=s["lo"], hi=s["hi"], v=s["v"]) for s in d.get("steps", ()))
        return cls(
            shells=shells,
            steps=steps,
            cutoff=d.get("cutoff", 1.0),
            free_params=tuple(d.get("free_params", ())),
        )


def evaluate_potential(spec: PotentialSpec, r) -> np.ndarray:
    """Pointwise step part of the potential; the shells are not included."""
    r = np.asarray(r, dtype=float)
    v = np.zeros_like(r)
    for st in spec.steps:
        v = np.where((r >= st.lo) & (r < st.hi), v + st.v, v)
    return v


def closed_form_jost(spec: PotentialSpec, k, ell: int = 0):
    """Jost function of a pure delta-shell potential, s wave, in closed form.

    Writes the regular solution as A exp(ikr) + B exp(-ikr) between shells
    and propagates (A, B) outward across each shell.  With the start values
    scaled to (1, -1) the Jost function is F(k) = -B after the last shell,
    normalized so that F -> 1 for a vanishing potential.

    Parameters
    ----------
    spec : PotentialSpec
        Must contain shells only.
    k : complex or array_like
        Momentum, anywhere in the complex plane except 0.
    ell : int
        Only 0 is supported; the closed form does not extend to
        higher waves.

    Returns
    -------
    complex or ndarray
        F(k), same shape as ``k``.
    """
    if ell != 0:
        raise NotDeltaShellFamily("closed form only exists for the s wave")
    if spec.steps:
        raise NotDeltaShellFamily("closed form only exists for pure delta shells")
    k_arr = np.asarray(k, dtype=complex)
    if np.any(k_arr == 0):
        raise KIsZero("Jost function evaluation at k = 0")
    a_coef = np.ones_like(k_arr)
    b_coef = -np.ones_like(k_arr)
    # far off the real axis the phases overflow; the resulting inf/nan is a
    # faithful "out of range" answer and callers guard on finiteness
    with np.errstate(over="ignore", invalid="ignore"):
        for sh in spec.shells:
            g = sh.lam / (2j * k_arr)
            phase = np.exp(2j * k_arr * sh.a)
            a_coef, b_coef = (
                a_coef + g * (a_coef + b_coef / phase),
                b_coef - g * (a_coef * phase + b_coef),
            )
    f = -b_coef
    return f if f.ndim else complex(f)


def load_potential(path) -> PotentialSpec:
    with open(path) as fh:
        return PotentialSpec.from_dict(json.load(fh))


def dump_potential(spec: PotentialSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
