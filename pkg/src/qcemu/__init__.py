"""State-vector simulation and high-level emulation of quantum circuits."""

from .circuit import (Circuit, DenseUnitary, apply_circuit, build_entangler, build_qft, build_tfim_trotter,
                      parse_circuit, to_dense_matrix)
from .emulator import (DistributionTable, emulate_classical_function, emulate_divide, emulate_multiply,
                       emulate_qft, expectation, full_distribution)
from .gates import Gate, apply_controlled, apply_controlled_phase, apply_gate, apply_single_qubit, matrix_of
from .statevector import (MeasurementOutcome, StateVector, collapse, distance, new_basis_state, norm_sq,
                          sample_all)

__version__ = "0.1.0"
