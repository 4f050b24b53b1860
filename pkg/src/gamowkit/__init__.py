"""Resonances, Jost-function degeneracies and Gamow-Jordan chains."""

from .errors import GamowKitError
from .potentials import (
    PotentialSpec,
    Shell,
    Step,
    closed_form_jost,
    dump_potential,
    evaluate_potential,
    load_potential,
)
from .solver import (
    DEFAULT_H,
    build_grid,
    jost_derivatives,
    jost_function,
    solve_outgoing,
    solve_regular,
)
from .zeros import SearchBox, ZeroRecord, count_zeros_in_box, find_zeros, s_matrix
from .degeneracy import (
    DegeneracyResult,
    find_double_zero,
    monodromy,
    splitting_exponent,
    track_zero,
)
from .regulated import NU_SEQUENCE, TailTerm, product_tails, regulated_integral
from .states import (
    GamowState,
    IDENTITY_CONTRACT,
    JordanChain,
    apply_hamiltonian,
    build_jordan_chain,
    chain_identities,
    hamiltonian_residuals,
    normalize_simple,
)
from .expansions import (
    BasisSet,
    ContourSpec,
    TestFunction,
    evolve_survival,
    expand_function,
    find_bound_states,
    gaussian_bump,
    greens_direct,
    make_basis,
    represent_operator,
    resolvent_expansion,
)

__all__ = [
    "GamowKitError",
    "PotentialSpec",
    "Shell",
    "Step",
    "closed_form_jost",
    "dump_potential",
    "evaluate_potential",
    "load_potential",
    "DEFAULT_H",
    "build_grid",
    "jost_derivatives",
    "jost_function",
    "solve_outgoing",
    "solve_regular",
    "SearchBox",
    "ZeroRecord",
    "count_zeros_in_box",
    "find_zeros",
    "s_matrix",
    "DegeneracyResult",
    "find_double_zero",
    "monodromy",
    "splitting_exponent",
    "track_zero",
    "NU_SEQUENCE",
    "TailTerm",
    "product_tails",
    "regulated_integral",
    "GamowState",
    "IDENTITY_CONTRACT",
    "JordanChain",
    "apply_hamiltonian",
    "build_jordan_chain",
    "chain_identities",
    "hamiltonian_residuals",
    "normalize_simple",
    "BasisSet",
    "ContourSpec",
    "TestFunction",
    "evolve_survival",
    "expand_function",
    "find_bound_states",
    "gaussian_bump",
    "greens_direct",
    "make_basis",
    "represent_operator",
    "resolvent_expansion",
]
