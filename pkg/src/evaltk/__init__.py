"""p-values, e-values and testing by betting on finite probability spaces."""

__version__ = "0.1.0"

from .calibration import (
    Calibrator,
    RoundTripResult,
    calibrate_rv,
    e_to_p,
    e_to_p_rv,
    jeffreys_table,
    power_calibrate,
    round_trip,
    shafer_calibrate,
    validate_calibrator,
)
from .combination import (
    CounterexampleCertificate,
    MartingaleTrace,
    average_e,
    combine_report,
    expected_wealth,
    p_average_counterexample,
    sequential_product,
)
from .datasplit import (
    BernoulliDataset,
    SplitReport,
    derandomized_e,
    reproducibility_report,
    split,
    split_e_value,
)
from .space import (
    DimensionError,
    DomainError,
    FiniteSpace,
    RandomVariable,
    RejectionRegion,
    expectation,
    is_e_variable,
    is_p_variable,
)
from .testing import (
    CournotTest,
    Decision,
    HypothesisPair,
    cournot_decide,
    embed_e,
    embed_p,
    likelihood_ratio_e,
    log_optimality_check,
    np_p_variable,
    p_uniformity_check,
)
