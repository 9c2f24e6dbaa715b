"""GHZ paradoxes for N parties holding N-port Bell multiports.

Exact phase arithmetic (:mod:`.angles`), quantum correlations (:mod:`.quantum`),
local hidden variable constraint solving (:mod:`.lhv`) and the paradox
families with their certificates (:mod:`.paradox`).
"""

from .angles import (
    BellValue,
    Turn,
    root_exponent,
    turn_add,
    turn_from_fraction,
    turn_scale,
    turn_to_complex,
)
from .errors import CapExceededError, NoPerfectCorrelationError, SolverMismatchError
from .lhv import (
    CongruenceSystem,
    LhvStrategy,
    ProductConstraint,
    SolutionSet,
    achievable_values,
    enumerate_consistent,
    mixture_correlation,
    solve_congruences,
    strategy_value,
    to_congruences,
)
from .paradox import (
    ParadoxCertificate,
    SettingPair,
    build_certificate,
    constraint_configs,
    expected_constraint_value,
    ghz_settings,
    quantum_probe_value,
    scan,
)
from .quantum import (
    ExperimentConfig,
    StateVector,
    apply_phases,
    bell_multiport,
    correlation_closed,
    correlation_direct,
    ghz_state,
    joint_probability,
    outcome_distribution,
    perfect_correlation_value,
    predict_remote_outcome,
)

__version__ = "0.1.0"
