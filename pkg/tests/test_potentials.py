"""Potential specifications and the closed-form Jost function."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamowkit import PotentialSpec, Shell, Step
from gamowkit.errors import KIsZero, NotDeltaShellFamily
from gamowkit.potentials import closed_form_jost, evaluate_potential

EP_SHELLS = (Shell(1.0, 11.328463986167739), Shell(1.8, 2.527494840652575))


def test_free_jost_is_one():
    free = PotentialSpec(cutoff=1.0)
    for k in (0.5, 2.0 - 0.3j, 5j, -1.0 - 1.0j):
        assert closed_form_jost(free, k) == pytest.approx(1.0)


def test_one_shell_matches_textbook_formula():
    # independent closed form: F(k) = 1 + lam e^{ika} sin(ka)/k
    lam, a = 4.0, 1.0
    spec = PotentialSpec(shells=(Shell(a, lam),), cutoff=1.2)
    rng = np.random.default_rng(11)
    for _ in range(40):
        k = complex(rng.uniform(0.2, 9), rng.uniform(-2, 2))
        ref = 1.0 + lam * np.exp(1j * k * a) * np.sin(k * a) / k
        assert closed_form_jost(spec, k) == pytest.approx(ref, rel=1e-13)


def test_free_limit_far_up_the_imaginary_axis():
    # F(is) - 1 decays like sum(lam)/(2s), so the deviation at O(10)
    # strengths is O(0.1); the limit shows as the 1/s rate, and the
    # absolute bound is meaningful only for weak shells
    spec = PotentialSpec(shells=EP_SHELLS, cutoff=2.0)
    d50 = abs(closed_form_jost(spec, 50j) - 1.0)
    d200 = abs(closed_form_jost(spec, 200j) - 1.0)
    assert d200 == pytest.approx(d50 / 4.0, rel=5e-2)
    weak = PotentialSpec(shells=(Shell(1.0, 1e-4),), cutoff=1.2)
    assert abs(closed_form_jost(weak, 50j) - 1.0) <= 1e-6


@settings(max_examples=60, deadline=None)
@given(
    re=st.floats(-6.0, 6.0),
    im=st.floats(-3.0, 3.0),
)
def test_reality_symmetry(re, im):
    k = complex(re, im)
    if abs(k) < 0.05:
        return
    spec = PotentialSpec(shells=EP_SHELLS, cutoff=2.0)
    left = closed_form_jost(spec, -np.conj(k))
    right = np.conj(closed_form_jost(spec, k))
    assert abs(left - right) <= 1e-12 * max(abs(right), 1.0)


def test_zeros_come_in_mirror_pairs(one_shell_fixture, one_shell_spec):
    for z in one_shell_fixture["zeros"]:
        k = complex(z["re"], z["im"])
        assert abs(closed_form_jost(one_shell_spec, k)) <= 1e-10
        assert abs(closed_form_jost(one_shell_spec, -np.conj(k))) <= 1e-10


def test_evaluation_rejects_k_zero():
    spec = PotentialSpec(shells=(Shell(1.0, 2.0),), cutoff=1.2)
    with pytest.raises(KIsZero):
        closed_form_jost(spec, 0.0)


def test_closed_form_scope():
    stepped = PotentialSpec(steps=(Step(0.0, 1.0, -4.0),), cutoff=1.2)
    with pytest.raises(NotDeltaShellFamily):
        closed_form_jost(stepped, 1.0)
    shelled = PotentialSpec(shells=(Shell(1.0, 2.0),), cutoff=1.2)
    with pytest.raises(NotDeltaShellFamily):
        closed_form_jost(shelled, 1.0, ell=1)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(cutoff=-1.0),
        dict(shells=(Shell(-0.5, 1.0),), cutoff=1.0),
        dict(shells=(Shell(0.8, 1.0), Shell(0.3, 1.0)), cutoff=1.0),
        dict(shells=(Shell(1.0, 1.0),), cutoff=1.0),
        dict(steps=(Step(0.0, 1.5, -1.0),), cutoff=1.0),
        dict(steps=(Step(0.0, 0.6, -1.0), Step(0.5, 0.9, -2.0)), cutoff=1.0),
        dict(free_params=("shells.0.lambda",), cutoff=1.0),
    ],
)
def test_invalid_specs_are_rejected(kwargs):
    with pytest.raises(NotDeltaShellFamily):
        PotentialSpec(**kwargs)


def test_step_part_evaluation():
    spec = PotentialSpec(
        steps=(Step(0.0, 0.5, -4.0), Step(0.5, 1.0, -1.0)), cutoff=1.2
    )
    r = np.array([0.1, 0.49, 0.5, 0.99, 1.0, 1.1])
    np.testing.assert_allclose(
        evaluate_potential(spec, r), [-4.0, -4.0, -1.0, -1.0, 0.0, 0.0]
    )


def test_free_parameter_paths(ep_spec):
    assert list(ep_spec.current_params()) == [11.328463986167739, 2.527494840652575]
    moved = ep_spec.with_params([10.0, 3.0])
    assert moved.shells[0].lam == 10.0
    assert moved.shells[1].lam == 3.0
    assert moved.shells[0].a == ep_spec.shells[0].a
    with pytest.raises(NotDeltaShellFamily):
        ep_spec.with_params([1.0])


@settings(max_examples=40, deadline=None)
@given(
    radii=st.lists(
        st.floats(0.1, 1.8), min_size=1, max_size=3, unique_by=lambda x: round(x, 3)
    ),
    lams=st.lists(st.floats(-20.0, 20.0), min_size=3, max_size=3),
)
def test_serialization_roundtrip(radii, lams):
    shells = tuple(Shell(a, lam) for a, lam in zip(sorted(radii), lams))
    spec = PotentialSpec(shells=shells, cutoff=2.0, free_params=("shells.0.lam",))
    assert PotentialSpec.from_dict(spec.to_dict()) == spec
