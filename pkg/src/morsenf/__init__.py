"""Normal forms and semiclassical invariants at nondegenerate critical points.

Exact (fraction-based) and floating-point computation of:

* the symplectic classification of the quadratic parts of a commuting
  family of Hamiltonians at a common nondegenerate critical point,
* the classical Birkhoff-type normal form that writes the family as
  functions of the quadratic model integrals, and
* the semiclassical correction series whose constant terms are the
  hbar-expansion invariants of the joint spectrum.
"""

from .brackets import (POISSON_CONVENTION, lie_transform, moyal_bracket,
                       moyal_lie_transform, moyal_star, poisson)
from .coeffs import GaussianRational
from .homological import solve_homological
from .nf_classical import (ClassicalNF, IntegrableSystem,
                           classical_normal_form, verify_classical_nf)
from .nf_semiclassical import (SemiclassicalNF, alpha_first_order,
                               semiclassical_normal_form,
                               verify_semiclassical_nf)
from .poly import FLOAT, RATIONAL, PolySymbol, monomial_basis
from .symplectic import (CartanBasis, CartanType, QuadraticForm,
                         verify_cartan, williamson_classify)
from .systems import NeumannSpec, model_system, neumann_local_system

__all__ = [
    "GaussianRational",
    "PolySymbol",
    "RATIONAL",
    "FLOAT",
    "monomial_basis",
    "POISSON_CONVENTION",
    "poisson",
    "moyal_star",
    "moyal_bracket",
    "lie_transform",
    "moyal_lie_transform",
    "QuadraticForm",
    "CartanType",
    "CartanBasis",
    "verify_cartan",
    "williamson_classify",
    "solve_homological",
    "IntegrableSystem",
    "ClassicalNF",
    "classical_normal_form",
    "verify_classical_nf",
    "SemiclassicalNF",
    "alpha_first_order",
    "semiclassical_normal_form",
    "verify_semiclassical_nf",
    "NeumannSpec",
    "neumann_local_system",
    "model_system",
]

__version__ = "0.1.0"
