"""Eigenbundle obstructions and unitary-equivalence invariants of normal matrix fields.

Matrix fields live on a meshed 2-sphere or on a product of two 2-spheres.
For a normal, multiplicity-free field the eigenvalues are ordered globally,
the eigenprojectors are formed by Lagrange interpolation, and the first
Chern numbers of the eigenbundles are read off as exact integers from
gauge-invariant plaquette phases (with a Chern-Weil integral as an
independent check).
"""
from .chern import (ChernVector, chern_plaquette_number, chern_weil_number, curvature_density,
                    pair_with_cycles)
from .construct import (EigenvalueProfile, ProjectorFamily, assemble, bloch, clutching,
                        constant_profile, coordinate_family, default_profile, diagonal_field,
                        fixture_A, fixture_A_projectors, fixture_B, fixture_B_projectors,
                        orthogonalize, pullback, transplant)
from .equivalence import (ThetaInvariant, diag_obstruction, kron_hom_projector, theta,
                          theta_of_fields, verdict)
from .errors import (ContractError, DegeneracyError, DomainError, EigenbundleError,
                     EvaluationError, InconclusiveError, InfeasibleError, MonodromyError,
                     PreconditionError, ResolutionError, SolverError)
from .geometry import (CycleBasis, ProductDomain, SphereGrid, azimuthal_wrap,
                       build_product_domain, build_sphere_grid, first_factor, second_factor)
from .matrixfield import (CharPolyField, MatrixField, ValidationReport, char_poly, check_multiplicity_free,
                          check_normal, validate)
from .relations import (ProductOfSpheres, ProjectiveSpace, RingClass, Sphere,
                        cp_forced_diagonalizable, enumerate_admissible_n2, star_check,
                        symmetric_poly_check)
from .spectral import (SpectralData, cross_check_projectors, eigen_normal, order_globally,
                       projector_lagrange)

__version__ = "0.1.0"
