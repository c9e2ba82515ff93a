"""Patch-density, spectral closures and support data on finite and pro-finite spectral spaces.

A finite spectral space is a finite poset: ``x <= y`` when ``y`` lies in the
closure of ``x``, so closed sets are up-sets and opens are down-sets.
"""
from .errors import (
    DepthError,
    InvalidPointError,
    InvalidSubsetError,
    IsomorphismError,
    LatticeError,
    NotMonotoneError,
    OrderError,
    ParseError,
    PatchDenseError,
    ReconstructionError,
    SectionError,
    SupportError,
)
from .finspace import (
    FinPoset,
    SpectralMapFin,
    all_posets,
    closure,
    constructible_sets,
    find_isomorphism,
    hochster_dual,
    is_constructible,
    is_jacobson,
    is_thomason,
    lemma_dense_epi,
    locally_closed_points,
    patch_dense_fin,
    random_poset,
    weakly_visible_points_fin,
)
from .lattice import (
    ClosureResult,
    Realization,
    SetLattice,
    closure_isomorphism,
    closure_map,
    closure_via_evaluation,
    generate,
    join_irreducibles,
    realize_in_ambient,
    restricted_lattice,
    spectral_closure,
)
from .prospace import (
    Answer,
    ChainGrowthRule,
    ConstantRule,
    Density,
    DenseFamily,
    LevelSet,
    ProPoint,
    ProSpace,
    SectionSystem,
    TableRule,
    Visibility,
    builtin_sections,
    chromatic,
    finite_points,
    is_constructible_singleton,
    lift,
    make_prospace,
    member,
    patch_dense_pro,
    retractable_limit,
    weakly_visible_pro,
)
from .support import (
    SupportDatum,
    chromatic_datum,
    classify,
    dense_injectivity_check,
    distinguishes_supports,
    enumerate_terms,
    ideal_of_thomason,
    parse_term,
    reconstruct_from_dense,
    supp,
    supp_of_ideal,
)
from .textio import Workspace, bundled, load, loads

__version__ = "0.1.0"
