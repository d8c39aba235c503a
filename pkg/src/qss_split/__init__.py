"""Exact simulation of GHZ-carrier quantum secret sharing and Bob's entanglement-split cheat."""

from .attack import (
    AttackInvariantError,
    CheatRecords,
    Q2Knowledge,
    SPLIT_U,
    execute_split,
    intercept_even,
    intercept_odd,
    maintain_split_carriers,
    post_correction,
    resend_bit,
    run_attacked_session,
)
from .detection import ComparisonReport, compare, select_comparison, verify_round
from .equations import verify_equations
from .montecarlo import TrialReport, TrialStats, run_trials
from .protocol import (
    RoundKind,
    Transcript,
    alice_encode_even,
    alice_encode_odd,
    bob_decode_honest,
    charlie_decode_honest,
    end_of_round_toggle,
    make_E,
    make_G,
    run_honest_session,
)
from .statevec import (
    BellOutcome,
    NotSeparableError,
    PureState,
    UnitaryMatrix,
    apply_cnot,
    apply_hadamard,
    apply_unitary,
    basis_state,
    discard,
    equal_up_to_global_phase,
    measure_bell,
    measure_computational,
    tensor,
)

__version__ = "0.1.0"
