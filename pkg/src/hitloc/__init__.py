"""First-hitting-location noise under drift: distribution, entropy and capacity tools."""

from hitloc.capacity import (
    CapacityReport,
    capacity_lower,
    capacity_report,
    capacity_table,
    capacity_upper,
    effective_noise_power,
    offset_curve,
    refined_offset,
)
from hitloc.entropy import (
    EntropyEstimate,
    entropy_closed_form_d3,
    entropy_lower,
    entropy_mc,
    entropy_quadrature,
    entropy_upper,
    jensen_gap,
    mutual_info_TN,
)
from hitloc.errors import ConvergenceError, DomainError, NonTerminationError
from hitloc.ig import (
    IgParams,
    PhysicalTransport,
    ig_entropy,
    ig_from_physical,
    ig_laplace,
    ig_mean_inverse,
    ig_mean_log,
    ig_pdf,
    ig_sample,
)
from hitloc.ndfhl import (
    NdfhlParams,
    SampleBatch,
    SignedDriftParams,
    cauchy_entropy,
    cauchy_pdf,
    cf,
    pdf,
    sample,
)
from hitloc.validation import SdeConfig, ValidationReport

__all__ = [name for name in dir() if not name.startswith("_")]
