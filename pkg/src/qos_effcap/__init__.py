"""Energy efficiency of fixed-rate ON-OFF transmission over fading channels
under statistical queueing constraints."""

from .asymptotics import (
    AsymptoticResult,
    lowpower_alpha_star,
    lowpower_limits,
    uniqueness_scan,
    wideband_alpha_star,
    wideband_limits,
    wideband_ratio_monotonicity_check,
)
from .effcap import (
    EffCapPoint,
    SystemParams,
    bit_energy,
    effective_capacity_at_rate,
    effective_capacity_theta0,
    log_mgf_per_frame,
    optimize_rate,
    outage_threshold,
)
from .errors import (
    DomainError,
    EffCapError,
    EstimationError,
    MultipleRootsError,
    ParameterError,
    SingularityError,
    SolverError,
)
from .fading import FadingModel, make_stream, parse_model
from .queue_sim import (
    DecayEstimate,
    QueueTrace,
    estimate_decay_rate,
    simulate_queue,
    validate_effective_capacity,
)
from .training import (
    TrainingParams,
    TrainingPoint,
    effective_snr,
    lowpower_snr_eff_coefficient,
    min_bit_energy_scan,
    optimal_training_fraction,
    optimize_rate_training,
)

__version__ = "0.1.0"
