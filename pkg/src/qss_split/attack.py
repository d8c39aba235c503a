"""Bob's entanglement-split cheat.

In round 2 Bob intercepts Charlie's qubit and applies a three-qubit
permutation on ``(b, q1, q2)``. The GHZ-type carrier falls apart into an
Alice-Bob pair ``(a, bbar)`` and a Bob-Charlie pair ``(b, c)``, where
``bbar`` is the round-2 ``q1`` that Bob keeps. From then on Bob sits in the
middle: he reads Alice's data through ``(a, bbar)`` and feeds Charlie
counterfeit qubits through ``(b, c)``.

Which pair of Bell states the carriers settle into depends on Alice's
round-2 bit ``q2``, which Bob does not know. Even-round intercepts come out
XORed with ``q2``; Bob recovers ``q2`` afterwards from any announced even
round >= 4.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .detection import ComparisonReport, compare, select_comparison
from .protocol import (
    COUNTERFEIT,
    RoundKind,
    Transcript,
    alice_encode_even,
    alice_encode_odd,
    bob_decode_honest,
    charlie_decode_honest,
    end_of_round_toggle,
    make_G,
    session_streams,
)
from .statevec import (
    BellOutcome,
    PureState,
    UnitaryMatrix,
    apply_cnot,
    apply_hadamard,
    apply_unitary,
    basis_state,
    discard,
    measure_bell,
    measure_computational,
    relabel,
    tensor,
)

log = logging.getLogger(__name__)

BOB_KEPT = "bbar"
SPLIT_CARRIER_LABELS = ("a", BOB_KEPT, "b", "c")

# basis map on (b, q1, q2), big-endian
SPLIT_TABLE = {
    0b000: 0b000,
    0b001: 0b110,
    0b010: 0b111,
    0b011: 0b001,
    0b100: 0b100,
    0b101: 0b010,
    0b110: 0b011,
    0b111: 0b101,
}
SPLIT_U = UnitaryMatrix.from_permutation(SPLIT_TABLE, 8)


class AttackInvariantError(RuntimeError):
    """The simulated attack reached a state the analysis rules out (an engine bug)."""


class Q2Knowledge(enum.Enum):
    UNKNOWN = "unknown"
    ZERO = 0
    ONE = 1

    @property
    def bit(self) -> int | None:
        return None if self is Q2Knowledge.UNKNOWN else self.value


@dataclass
class CheatRecords:
    """Bob's private strings, indexed by 1-based round.

    ``d`` holds what Bob eavesdropped, ``e`` what he announces and ``psi``
    what he resent to Charlie. Round 1 is honest, so ``psi[1]`` is ``None``.
    """

    d: list = field(default_factory=list)
    e: list = field(default_factory=list)
    psi: list = field(default_factory=list)
    q2_knowledge: Q2Knowledge = Q2Knowledge.UNKNOWN

    @classmethod
    def empty(cls, n: int) -> "CheatRecords":
        return cls([None] * n, [None] * n, [None] * n)

    def set(self, index: int, d: int, e: int, psi: int | None) -> None:
        self.d[index - 1] = int(d)
        self.e[index - 1] = int(e)
        self.psi[index - 1] = None if psi is None else int(psi)

    def get(self, index: int) -> tuple:
        return self.d[index - 1], self.e[index - 1], self.psi[index - 1]

    def __len__(self):
        return len(self.d)

    def to_dict(self) -> dict:
        return {"d": list(self.d), "e": list(self.e), "psi": list(self.psi), "q2": self.q2_knowledge.value}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "CheatRecords":
        return cls(list(data["d"]), list(data["e"]), list(data["psi"]), Q2Knowledge(data["q2"]))


def execute_split(state: PureState, records: CheatRecords, round_index: int = 2) -> PureState:
    """Apply the split permutation on ``(b, q1, q2)``, drop ``q2`` and keep ``q1`` as ``bbar``.

    ``state`` is Alice's round-2 encoding with ``q1`` and ``q2`` both in Bob's hands.
    """
    if round_index != 2:
        raise ValueError(f"the split happens in round 2, not round {round_index}")
    s = apply_unitary(state, ("b", "q1", "q2"), SPLIT_U)
    s = discard(s, "q2")
    s = relabel(s, "q1", BOB_KEPT)
    records.set(2, 0, 0, 0)
    return s


def maintain_split_carriers(state: PureState) -> PureState:
    """End-of-round Hadamards, with Bob also covering ``bbar``."""
    if set(state.labels) != set(SPLIT_CARRIER_LABELS):
        raise ValueError(f"expected exactly {SPLIT_CARRIER_LABELS} live, got {state.labels}")
    for label in SPLIT_CARRIER_LABELS:
        state = apply_hadamard(state, label)
    return state


def resend_bit(state: PureState, psi: int) -> PureState:
    """Prepare a counterfeit ``|psi>`` and entangle it with Bob's ``b`` for Charlie."""
    if COUNTERFEIT in state:
        raise ValueError("a counterfeit qubit is already in flight")
    s = tensor(state, basis_state(COUNTERFEIT, [psi]))
    return apply_cnot(s, "b", COUNTERFEIT)


def intercept_odd(state: PureState, records: CheatRecords, round_index: int, rng: np.random.Generator):
    """Undo Alice's odd-round CNOTs from ``bbar`` and read ``|q,q>`` off the data pair."""
    if round_index < 3 or round_index % 2 == 0:
        raise ValueError(f"odd-round intercept needs an odd round >= 3, got {round_index}")
    s = apply_cnot(state, BOB_KEPT, "q1")
    s = apply_cnot(s, BOB_KEPT, "q2")
    (m1, m2), s = measure_computational(s, ("q1", "q2"), rng)
    if m1 != m2:
        raise AttackInvariantError(f"round {round_index}: intercepted pair read ({m1}, {m2})")
    s = discard(s, ("q1", "q2"))
    records.set(round_index, m1, m1, m1)
    return m1, s


def intercept_even(
    state: PureState,
    records: CheatRecords,
    round_index: int,
    rng: np.random.Generator,
    split_rng: np.random.Generator | None = None,
):
    """Undo Alice's even-round CNOT from ``bbar`` and Bell-measure the data pair.

    The eavesdropped bit ``d`` is split at random into the announced bit ``e``
    and the resent bit ``psi`` with ``e ^ psi == d``. ``split_rng`` drives that
    choice; it falls back to ``rng``.
    """
    if round_index < 4 or round_index % 2:
        raise ValueError(f"even-round intercept needs an even round >= 4, got {round_index}")
    s = apply_cnot(state, BOB_KEPT, "q1")
    outcome, s = measure_bell(s, ("q1", "q2"), rng)
    if outcome is BellOutcome.PHI_PLUS:
        d = 0
    elif outcome is BellOutcome.PSI_PLUS:
        d = 1
    else:
        raise AttackInvariantError(f"round {round_index}: Bell outcome {outcome.value} is impossible here")
    s = discard(s, ("q1", "q2"))
    e = int((split_rng or rng).integers(2))
    records.set(round_index, d, e, d ^ e)
    return d, s


def post_correction(records: CheatRecords, announced: Iterable[tuple[int, int]]):
    """Fix up Bob's eavesdropped string from the publicly announced Alice bits.

    Returns ``(recovered_bits, q2_knowledge)``. Any announced even round
    ``2m >= 4`` gives ``q2 = d_2m ^ q_2m``; when ``q2`` is 1 every even-round
    ``d`` from round 4 on is flipped.
    """
    announced = sorted(set(announced))
    n = len(records)
    recovered = list(records.d)

    q2 = None
    for i, alice_bit in announced:
        if i >= 4 and i % 2 == 0:
            guess = records.d[i - 1] ^ alice_bit
            if q2 is None:
                q2 = guess
            elif guess != q2:
                raise AttackInvariantError(f"announced round {i} implies q2={guess}, earlier rounds gave {q2}")

    if q2 == 1:
        for i in range(4, n + 1, 2):
            recovered[i - 1] ^= 1
    if q2 is not None and n >= 2:
        recovered[1] = q2
    for i, alice_bit in announced:
        if i == 2:
            recovered[1] = alice_bit

    knowledge = Q2Knowledge.UNKNOWN if q2 is None else Q2Knowledge(q2)
    return recovered, knowledge


class AttackedSession(NamedTuple):
    transcript: Transcript
    records: CheatRecords
    recovered: list
    comparison: ComparisonReport


def run_attacked_session(
    n: int,
    bits: Sequence[int],
    compare_fraction: float,
    seed,
    trace: list | None = None,
) -> AttackedSession:
    """Round 1 honest, split in round 2, intercept-resend in every later round.

    ``seed`` is an int or ``SeedSequence``; measurement, record-split and
    comparison randomness come from independent child streams. If ``trace`` is
    a list, the carrier entering each round is appended to it.
    """
    if n < 2:
        raise ValueError(f"the attack starts in round 2; need n >= 2, got {n}")
    bits = [int(b) for b in bits]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"need {n} data bits in {{0, 1}}")
    _, rng, split_rng, compare_rng = session_streams(seed)

    transcript = Transcript()
    records = CheatRecords.empty(n)
    carrier = make_G()
    for i, q in enumerate(bits, start=1):
        rk = RoundKind(i)
        if trace is not None:
            trace.append(carrier)
        if i == 1:
            s = alice_encode_odd(carrier, q)
            bob, s = bob_decode_honest(s, rk, rng)
            charlie, s = charlie_decode_honest(s, rng)
            records.set(1, bob, bob, None)
            transcript.add(i, q, bob, charlie)
            carrier = end_of_round_toggle(s)
            continue

        if i == 2:
            s = execute_split(alice_encode_even(carrier, q), records)
        elif rk.is_odd:
            _, s = intercept_odd(alice_encode_odd(carrier, q), records, i, rng)
        else:
            _, s = intercept_even(alice_encode_even(carrier, q), records, i, rng, split_rng)
        _, e, psi = records.get(i)
        s = resend_bit(s, psi)
        charlie, s = charlie_decode_honest(s, rng)
        transcript.add(i, q, e, charlie)
        carrier = maintain_split_carriers(s)
        if log.isEnabledFor(logging.DEBUG):
            log.debug("after round %d carriers %r", i, carrier)

    comparison = compare(transcript, select_comparison(n, compare_fraction, compare_rng))
    recovered, knowledge = post_correction(records, comparison.announced())
    records.q2_knowledge = knowledge
    return AttackedSession(transcript, records, recovered, comparison)
