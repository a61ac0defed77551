"""Free resolutions over graded complete intersections and the operators that make them small."""
from . import linalg
from .errors import CIError, DegreeBoundTooSmall, LiftFailed, NotRegular, ParseError, Undetermined, WindowTooShort
from .polynomial import Polynomial
from .ring import RingTower, certify_regular_sequence, graded_piece_basis, hilbert_series, multiplication_matrix
from .complexes import (
    ChainComplex,
    ChainMap,
    GradedMap,
    PeriodicTail,
    homology_dims,
    mapping_cone,
    minimize,
    residue_betti,
    suspend,
    verify_complex,
)
from .resolution import BettiTable, ModulePresentation, Resolution, koszul_complex, minimal_free_resolution, tor_dims
from .construct import (
    OperatorFamily,
    SmallnessCertificate,
    chi_operator,
    detect_periodic_tail,
    higher_homotopies,
    iterate_tower,
    koszul_cone,
    splice,
    spliced_resolution,
    tensor_down,
)
from .growth import GrowthReport, check_growth_step, classify_ring, complexity, fit_growth, verify_zci_to_gci

__version__ = "0.1.0"


def __getattr__(name):
    # the estimators pull in scikit-learn, which the CLI does not need
    if name in ("RingClassifier", "SpliceResolver"):
        from . import estimators

        return getattr(estimators, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
