"""Compile fault-tolerant Clifford circuits on stabilizer codes into holonomic
adiabatic Hamiltonian schedules and check them by state-vector simulation."""

from .circuit import (
    Circuit,
    Gate,
    audit_fault_tolerance,
    expand_macros,
    load_circuit,
    logical_action_oracle,
    parse_circuit,
    propagate_pauli,
)
from .code import (
    StabilizerCode,
    build_decoder,
    codeword_basis,
    default_local_errors,
    load_code,
    local_error_set,
    parse_code,
    syndrome,
    validate,
)
from .compiler import (
    RampSpec,
    Schedule,
    gap_report,
    hamiltonian_at,
    max_weight,
    parse_terms,
    rewrite_generators,
    schedule_from_json,
    schedule_to_json,
    stage_spectrum,
    synthesize,
    validate_schedule,
)
from .pauli import PauliOp, PauliSum, WeightedTerm, commutes, group_membership, mul
from .sim import (
    InjectionEvent,
    SimOptions,
    compare_up_to_phase,
    convergence_sweep,
    evolve,
    ft_matrix,
    ft_trial,
    holonomy,
    ideal_final_state_oracle,
    inject_and_run,
    syndrome_project,
)

__version__ = "0.1.0"
