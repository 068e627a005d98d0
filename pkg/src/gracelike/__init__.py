"""Grace-like polynomials: multiaffine polynomials that cannot vanish when a
circle separates their two groups of variables.

Construction, reduced forms, randomized verification, and the Lee-Yang,
Heilmann-Lieb and unbranched-subgraph root-location applications.
"""

from .asano_leeyang import (
    PairCoefficients,
    RadialRegion,
    asano_contract,
    key_lemma_region,
    lee_yang_asano,
    lee_yang_polynomial,
    verify_unit_circle,
)
from .constructions import (
    determinant_gnomial,
    flow_to_sigma,
    grace_sigma,
    interpolate,
    random_unitary,
    symmetrize,
)
from .exceptions import ConvergenceError, GraphParseError, PoleError, StructuralError
from .geometry import GeneralizedCircle, MoebiusMap, find_separating_circle, separates, side_of
from .gnomial_verify import (
    GTestReport,
    bitorus_certify,
    classify_n2,
    g0_test_randomized,
    g_test_directed,
    g_test_randomized,
    reduce_to_canonical,
    theta_form,
)
from .graph_polys import Graph, RegionSpec, dimer_polynomial, load_graph, unbranched_polynomial, verify_region
from .mapoly import MAPolynomial
from .reduced_form import (
    PermutationCoefficients,
    assemble,
    diagonal_restrict,
    reduced_form_iterative,
    reduced_form_linear,
)
from .rootfinder import RootSet, roots

__version__ = "0.1.0"
