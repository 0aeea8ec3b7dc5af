"""Catalysis-assisted entanglement distribution over repeater chains.

Schmidt-spectrum majorization algebra, optimal catalyst construction,
analytic timing and rate models for an N-edge chain with auxiliary-path
catalyst supply, and Monte Carlo simulators validating the analytics.
"""

from .catalysis import (
    CatalystSpec,
    ConcentrationProblem,
    catalysis_probability,
    combined_supply_feasible,
    copies_for_catalyst,
    efficiency_ratio,
    initial_spectrum,
    intermediate_state,
    locc_probability,
    n_cat_required,
    n_star,
    optimal_two_qubit_catalyst,
    search_catalyst,
    target_spectrum,
)
from .errors import (
    CatalysisWindowError,
    InvalidInputError,
    NumericFailureError,
    ResourceLimitError,
)
from .network import (
    AUX_RICH,
    FINITE_AUX,
    NO_AUX,
    AuxConfig,
    AuxPath,
    EdgeParams,
    RateReport,
    SweepRow,
    TimingBreakdown,
    alpha_from_fidelity,
    alpha_from_transmittivities,
    edge_catalyst,
    fidelity_from_alpha,
    rate_catalytic,
    swap_decay_scaling,
    sweep_rates,
    t_catalyst,
    t_edge_cycle,
    t_primary,
    waiting_factor,
    waiting_factor_small_p,
    write_sweep_csv,
)
from .simulate import (
    SimConfig,
    SimResult,
    run_simulation,
    simulate_abstract,
    simulate_detailed,
    validate_waiting_factor,
)
from .spectra import (
    MonotoneVector,
    SchmidtVector,
    can_convert_deterministically,
    conversion_probability,
    make_schmidt,
    monotones,
    tensor_product,
    two_qubit_state,
)

__version__ = "0.1.0"
