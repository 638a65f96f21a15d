"""Bell nonlocality and entanglement of qubit pairs inside W-class three-qubit states."""
from .boundaries import C_STAR, CURVES, E_STAR, M_JK_STAR, N_ONE, N_TWO, Region
from .errors import (
    ConsistencyError, ContractError, InvalidStateError, InvariantViolation,
    NumericalError, ValidationError, WClassError,
)
from .measures import PairMeasures, all_pairs, closed_form_measures, matrix_path_measures
from .scan import ScanResult, build_figure, empirical_envelope, export_csv, run_scan
from .states import PAIRS, PairId, Probabilities, Sector, WClassState, make_state, probabilities

__version__ = "0.1.0"
