"""Strict contact geometry toolkit."""

from .contact import (StrictContactManifold, SymplecticManifold, alpha_flat, alpha_sharp,
                      classify_vector_field, contactise, reeb, symplectise, verify_contact)
from .expr import Expression, parse
from .flows import integrate
from .geometry import (Chart, DifferentialForm, ManifoldSpec, ScalarField, SmoothMap, VectorField,
                       exterior_derivative, interior_product, lie_bracket, pullback, wedge)
from .hamiltonian import check_bracket_laws, hamiltonian_field, jacobi_bracket
from .integrability import IntegrableSystemSpec, check_integrable
from .models import build

__all__ = [
    "StrictContactManifold", "SymplecticManifold", "alpha_flat", "alpha_sharp", "classify_vector_field",
    "contactise", "reeb", "symplectise", "verify_contact", "Expression", "parse", "integrate", "Chart",
    "DifferentialForm", "ManifoldSpec", "ScalarField", "SmoothMap", "VectorField", "exterior_derivative",
    "interior_product", "lie_bracket", "pullback", "wedge", "check_bracket_laws", "hamiltonian_field",
    "jacobi_bracket", "IntegrableSystemSpec", "check_integrable", "build",
]
