"""z2ladder: spinon-vison interferometry on quasi-1D Z2 gauge ladders.

Library layout:

- :mod:`.lattice`           chain geometry, vison configs, segments
- :mod:`.disorder`          quenched Gaussian disorder realizations
- :mod:`.integrate`         adaptive Runge-Kutta stepper
- :mod:`.lindblad`          dephased spinon dynamics and vison ensembles
- :mod:`.strobo`            stochastic (stroboscopic) vison dynamics
- :mod:`.randomwalk`        classical Metropolis walker baseline
- :mod:`.segment_stats`     closed-form segment statistics
- :mod:`.stars`             gauge-matter star exact diagonalization
- :mod:`.effective_lattice` first-order spinon hopping graph
- :mod:`.dwave`             annealer feasibility arithmetic
- :mod:`.config`/:mod:`.runner`/:mod:`.cli`  experiment orchestration
"""

__version__ = "0.1.0"

from .disorder import DisorderRealization, sample_disorder
from .dwave import FeasibilityReport, dwave_feasibility
from .effective_lattice import (
    effective_lattice_spectrum,
    most_localized_other_star_weight,
    perturbative_couplings,
    projected_hop_amplitude,
    single_star_ground_overlap,
)
from .errors import (
    CapacityError,
    ConfigError,
    NumericalError,
    ParameterError,
    StructureError,
    Z2LadderError,
)
from .lattice import (
    ChainSpec,
    Segment,
    VisonConfig,
    sample_vison_config,
    segment_containing,
    segments,
)
from .lindblad import (
    build_hamiltonian,
    density_profile,
    evolve,
    initial_density_matrix,
    mean_square_displacement,
    run_base_ensemble,
)
from .randomwalk import PinningLandscape, run_rw_ensemble
from .results import TrajectoryResult, read_csv
from .segment_stats import (
    asymptotic_density,
    plateau_msd,
    segment_probability,
    semi_analytic_msd,
)
from .stars import (
    HADAMARD_W,
    EffectiveCouplings,
    Spectrum,
    StarAssembly,
    build_gp_operator,
    build_star_hamiltonian,
    coupling_map,
    extract_couplings,
    lowest_spectrum,
    single_star_assembly,
    single_star_levels,
    two_star_assembly,
    two_star_spectrum,
    z2_two_star_spectrum,
)
from .strobo import StroboSchedule, apply_site_update, evolve_strobo, poisson_event_times

__all__ = [name for name in dir() if not name.startswith("_")]
