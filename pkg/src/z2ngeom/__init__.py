"""Exact kernel for Z_2^n-graded Grassmann algebras, domains and Lambda-points."""

from .degrees import commutation_sign, degree_add, enumerate_nonzero_degrees, scalar_product_parity
from .domains import (
    BerezinVector,
    Box,
    Domain,
    DomainMorphism,
    berezin_satisfies_propagation,
    berezin_to_morphism,
    compose_domain_morphisms,
    compose_local,
    identity_domain_morphism,
    morphism_to_berezin,
    separating_witness,
)
from .errors import *  # noqa: F401,F403
from .galgebra import (
    AlgebraMorphism,
    GrassmannAlgebra,
    apply_morphism,
    base_projection,
    compose_morphisms,
    identity_morphism,
    make_algebra,
)
from .gseries import GeneratorSignature, GradedSeries
from .points import (
    LambdaPoint,
    TangentVector,
    check_lambda0_linearity,
    check_naturality_square,
    check_psi_linearity,
    evaluate,
    gateaux_derivative,
    push_point,
)
from .polynomials import BasePolynomial, Opaque, RationalFunction

__version__ = "0.1.0"
