"""Quantum circuit simulation with decision-diagram and tensor-network backends."""

from dualsim._core import (
    Circuit,
    DualsimError,
    __version__,
    check_equivalence,
    concatenate,
    dd_amplitude,
    dd_dot,
    dd_gate_nodes,
    dd_state_nodes,
    dd_statevector,
    gate_matrix_of,
    ghz,
    grover_oracle,
    invert_circuit,
    parse_circuit,
    random_circuit,
    run,
    sweep,
    tn_amplitude,
    tn_plan_cost,
    tn_statevector,
    to_text,
)

__all__ = [
    "Circuit",
    "DualsimError",
    "__version__",
    "check_equivalence",
    "concatenate",
    "dd_amplitude",
    "dd_dot",
    "dd_gate_nodes",
    "dd_state_nodes",
    "dd_statevector",
    "gate_matrix_of",
    "ghz",
    "grover_oracle",
    "invert_circuit",
    "parse_circuit",
    "random_circuit",
    "run",
    "sweep",
    "tn_amplitude",
    "tn_plan_cost",
    "tn_statevector",
    "to_text",
]
