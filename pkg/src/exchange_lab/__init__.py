"""Energy exchange between a quantum system and its environment.

Exact finite-dimensional numerics for the counting-field characteristic
function, the exchanged energy ``dE(t)`` and its rate ``V_E(t)``, closed
forms for two solvable couplings, and a truncated Zassenhaus product.
"""

from .cumulant import (
    CaseBSpeedSplit,
    CumulantConfig,
    TimeSeries,
    case_b_delta_e,
    case_b_speed_split,
    characteristic_function,
    delta_e_basis_sum,
    energy_exchange,
    energy_exchange_oracle,
    exchange_speed,
    exchange_speed_commutator,
    speed_basis_sum,
    sweep,
)
from .electron_phonon import (
    alpha_zeta_psi,
    compare_matrix_element_paths,
    electron_phonon_exchange,
    electron_phonon_matrix_element,
    printed_matrix_element,
)
from .errors import (
    ConfigError,
    HermiticityError,
    NormalizationError,
    NotCaseBError,
    PathDisagreementError,
    SpaceMismatchError,
    TruncationError,
)
from .hilbert import (
    BosonFock,
    FermionModes,
    HilbertSpace,
    Levels,
    anticommutator,
    boson_ladder,
    commutator,
    fermion_ladder,
    lift,
    make_space,
)
from .models import (
    ElectronPhononParams,
    InitialState,
    ModelSpec,
    TwoLevelLevel,
    TwoLevelParams,
    build_electron_phonon_q0,
    build_generic,
    build_impurity_bec,
    build_two_level_env,
    classify_commutation,
    initial_state,
)
from .propagator import evolution, expm, hermitian_eig
from .two_level import appendix_a_coefficients, two_level_delta_e, two_level_speed
from .zassenhaus import (
    bch_closed_form,
    electron_phonon_factorization,
    evaluate_word,
    zassenhaus_apply,
    zassenhaus_terms,
)

__version__ = "0.1.0"
