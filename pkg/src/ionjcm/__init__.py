"""Exact dynamics of two trapped ions on the red sideband of their COM mode."""

__version__ = "0.1.0"

from .core import (  # noqa: F401
    BasisLabel,
    InternalOccupations,
    InvariantError,
    MotionalDensityMatrix,
    PhysicalParams,
    default_cutoff,
    subspace_members,
    total_excitation,
)
from .states import (  # noqa: F401
    CaseOneInit,
    CaseTwoInit,
    PhononDistribution,
    case_one_state,
    case_two_state,
    coherent_amplitudes,
    phonon_distribution,
)
from .propagator import block_propagator, subspace_propagator  # noqa: F401
from .closed_form import (  # noqa: F401
    EvolutionPoint,
    evaluate_case1,
    evaluate_case2,
    limit_coherent_form,
    limit_squeezed_form,
    motional_case1,
    motional_case2,
    occupations_case1,
    occupations_case2,
)
from .observables import (  # noqa: F401
    QuadratureVariances,
    coherent_fraction,
    mean_phonons,
    quadrature_variances,
)
from .scan import (  # noqa: F401
    ScanGrid,
    ScanResult,
    default_case1_grid,
    default_case2_grid,
    scan_case1,
    scan_case2,
    threshold_no_squeezing,
)
