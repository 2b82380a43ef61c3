"""General H-type Lie algebras and groups with indefinite scalar products."""

from .algebra import (AlgebraSpecError, HTypeAlgebra, ValidationReport, bracket, center_check, mu,
                      validate_h_type)
from .catalog import FAMILIES, catalog
from .composition import (CompositionError, CompositionMap, algebra_from_composition,
                          composition_from_algebra, search_composition_2d, verify_composition)
from .curvature import (DegeneratePlaneError, TangentElement, classify_plane, covariant_derivative,
                        curvature_endomorphism, plane, ricci_tensor, scalar_curvature,
                        sectional_curvature)
from .geodesics import (Covector, GroupPoint, Regime, Trajectory, geodesic_closed_form, group_mul,
                        hamiltonian, integrate_hamiltonian, left_frame, omega, theta2)
from .spaces import ScalarSpace, mat_exp, scalar_product

__version__ = "0.1.0"
