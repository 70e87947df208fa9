"""qnokey: simulator for quantum no-key (three-pass) message transmission.

Executes the basic, classical-message, and authenticated protocol variants
as exact linear-algebra state evolutions over named qubit registers, and
quantifies the security behaviour (tamper detection, man-in-the-middle
outcomes, eavesdropper distinguishability) by exact computation at small
register sizes.
"""

__version__ = "0.1.0"

from .adversary import AttackReport, EveStrategy, attack, eve_view, mitm_demo
from .boolfn import (
    BooleanFunction,
    KeyPair,
    deserialize,
    is_permutation,
    random_function,
    serialize,
    xor,
)
from .oracle import (
    EntangledRegisterError,
    Gate,
    apply_gates,
    apply_hadamard,
    apply_oracle,
    attach_register,
    compile_oracle,
    detach_register,
)
from .protocol import (
    PartySecrets,
    ProtocolTranscript,
    run_alt_scheme,
    run_authenticated_protocol,
    run_basic_protocol,
    run_classical_protocol,
    run_sequence,
)
from .statevector import (
    DensityMatrix,
    MeasurementOutcome,
    QuantumState,
    RegisterLayout,
    fidelity,
    make_state,
    measure_register,
    reduced_density_matrix,
    trace_distance,
    zero_probability,
)

__all__ = [
    "__version__",
    "AttackReport",
    "BooleanFunction",
    "DensityMatrix",
    "EntangledRegisterError",
    "EveStrategy",
    "Gate",
    "KeyPair",
    "MeasurementOutcome",
    "PartySecrets",
    "ProtocolTranscript",
    "QuantumState",
    "RegisterLayout",
    "apply_gates",
    "apply_hadamard",
    "apply_oracle",
    "attach_register",
    "attack",
    "compile_oracle",
    "deserialize",
    "detach_register",
    "eve_view",
    "fidelity",
    "is_permutation",
    "make_state",
    "measure_register",
    "mitm_demo",
    "random_function",
    "reduced_density_matrix",
    "run_alt_scheme",
    "run_authenticated_protocol",
    "run_basic_protocol",
    "run_classical_protocol",
    "run_sequence",
    "serialize",
    "trace_distance",
    "xor",
    "zero_probability",
]
