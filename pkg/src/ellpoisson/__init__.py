"""Theta bases, elliptic quadratic Poisson brackets and residue calculus.

The package has six building blocks: ``theta`` (the series and the order-n
section basis), ``poisson`` (quadratic brackets, Jacobi certification,
Heisenberg canonical form, projective descent), ``fo`` (elliptic quadratic
relations, the F table, the semiclassical bracket and its finite-parameter
oracle), ``cech`` (residue quadrature, dual bases, the principal-part
projection and the extension-moduli bracket), ``homology`` (exact chain
algebra for the endomorphism complex, the bivector and the cone
identification) and ``leaves`` (torsion-type combinatorics and the
divisor-class constraint).  ``cli`` drives batch verification runs.
"""

from .theta import (
    CurveParams,
    ThetaBasis,
    ThetaSection,
    heisenberg_act,
    theta_alpha_deriv,
    theta_alpha_eval,
    theta_eval,
    verify_automorphy,
)
from .poisson import (
    HnBracket,
    Polynomial,
    QuadraticBracket,
    bracket_generators,
    bracket_poly,
    hn_canonical_extract,
    jacobi_defect,
    projective_bracket,
)
from .fo import (
    FConstants,
    FORelationTensor,
    f_constants,
    fo_relations,
    semiclassical_from_relations,
    single_eta_bracket,
    sklyanin_bracket,
)
from .cech import (
    CechCocycle,
    DiscLocalFunction,
    GlobalSection,
    QuadratureConfig,
    ResidueSystem,
    duality_pairing_matrix,
    laurent_coeffs,
    moduli_bracket,
    p_plus,
    pi_t_class,
    psi_basis,
    trace,
    verify_p_plus,
    verify_trace_identity,
)
from .homology import (
    VSComplex,
    ad_map,
    cone_iso_check,
    duality_t,
    hom_complex,
    pi_bivector,
    random_kronecker_complex,
)
from .leaves import (
    DivisorDatum,
    LeafRecord,
    TorsionType,
    divisor_constraint,
    end_dim_local,
    end_dim_sheaf,
    enumerate_strata,
    kronecker_dims,
    leaf_dimension,
)

__version__ = "0.1.0"
