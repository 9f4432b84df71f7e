"""Dominating scalar products on finite-dimensional symplectic spaces.

Polarizators, purification and the mu_s family, relative continuity of
symplectically adjoint pairs, lattice Klein-Gordon checks, counterexamples,
and the one-particle structures of quasifree states.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DEFAULT_TOL,
    DominatingProduct,
    Polarizator,
    StateClass,
    SymplecticForm,
    Tolerances,
    canonical_form,
    check_domination,
    classify,
    dominating_product,
    polarizator,
    purify,
    saturation_defect,
    scaled_product,
    validate_symplectic,
)
from .continuity import (  # noqa: E402
    AdjointPair,
    adjoint_of,
    check_interpolation,
    make_pair,
    mu_s_norm,
    verify_relative_continuity,
)
from .errors import SymplectaError  # noqa: E402

__all__ = [
    "__version__",
    "DEFAULT_TOL",
    "AdjointPair",
    "DominatingProduct",
    "Polarizator",
    "StateClass",
    "SymplecticForm",
    "SymplectaError",
    "Tolerances",
    "adjoint_of",
    "canonical_form",
    "check_domination",
    "check_interpolation",
    "classify",
    "dominating_product",
    "make_pair",
    "mu_s_norm",
    "polarizator",
    "purify",
    "saturation_defect",
    "scaled_product",
    "validate_symplectic",
    "verify_relative_continuity",
]
