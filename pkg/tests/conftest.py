"""Shared fixtures: the certified degeneracy data and reference bases.

Session scope for anything that costs seconds.  The packaged census is
handed to make_basis instead of being re-swept, which keeps the suite
inside the desk-scale runtime budget; the census itself is exercised
separately in test_zeros.
"""

import json
from importlib import resources
from pathlib import Path

import pytest

from gamowkit import (
    ContourSpec,
    PotentialSpec,
    Shell,
    Step,
    build_jordan_chain,
    make_basis,
)
from gamowkit.zeros import ZeroRecord

FIXTURE_DIR = Path(__file__).parent / "fixtures"

EP_CONTOUR = dict(gamma=0.9, corner=7.0, k_max=90.0)


@pytest.fixture(scope="session")
def ep_fixture():
    path = resources.files("gamowkit").joinpath("data/ep_double_delta.json")
    return json.loads(path.read_text())


@pytest.fixture(scope="session")
def ep_spec(ep_fixture):
    return PotentialSpec.from_dict(ep_fixture["family"])


@pytest.fixture(scope="session")
def ep_km(ep_fixture):
    d = ep_fixture["k_m"]
    return complex(d["re"], d["im"])


@pytest.fixture(scope="session")
def ep_zero_records(ep_fixture):
    return [
        ZeroRecord(complex(z["re"], z["im"]), z["multiplicity"], "resonance", 0.0, 0.0)
        for z in ep_fixture["census"]
    ]


@pytest.fixture(scope="session")
def ep_chain(ep_spec, ep_km):
    return build_jordan_chain(ep_spec, ep_km)


@pytest.fixture(scope="session")
def ep_basis(ep_spec, ep_zero_records):
    return make_basis(ep_spec, ContourSpec(**EP_CONTOUR), zeros=ep_zero_records)


@pytest.fixture(scope="session")
def ep_basis_deep(ep_spec, ep_zero_records):
    # twice the depth, same capture set: the contour-independence partner
    return make_basis(
        ep_spec, ContourSpec(gamma=1.8, corner=7.0, k_max=90.0), zeros=ep_zero_records
    )


@pytest.fixture(scope="session")
def well_spec():
    return PotentialSpec(shells=(Shell(1.0, -3.0),), cutoff=1.2)


@pytest.fixture(scope="session")
def well_basis(well_spec):
    # gamma clears the first resonance depth of 0.514 so the capture count
    # is stable against census jitter
    return make_basis(well_spec, ContourSpec(gamma=0.8, corner=6.0, k_max=60.0))


@pytest.fixture(scope="session")
def square_well():
    return PotentialSpec(steps=(Step(0.0, 1.0, -4.0),), cutoff=1.2)


@pytest.fixture(scope="session")
def one_shell_fixture():
    with open(FIXTURE_DIR / "one_shell_census.json") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def one_shell_spec(one_shell_fixture):
    return PotentialSpec.from_dict(one_shell_fixture["family"])
