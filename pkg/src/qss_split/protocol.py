"""Honest three-party secret sharing over reusable GHZ-type carriers.

Alice, Bob and Charlie hold carrier qubits ``a``, ``b`` and ``c``. Each round
Alice entangles a fresh two-qubit data register ``(q1, q2)`` with the carrier
and sends ``q1`` to Bob and ``q2`` to Charlie. Odd rounds run on
``(|000> + |111>)/sqrt2``; even rounds on the even-parity state
``(|000> + |011> + |101> + |110>)/2``. Hadamards on every carrier qubit swap
the two between rounds.

Transmission is a label handoff: whichever routine next touches ``q1`` or
``q2`` is the party holding it.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevec import (
    PureState,
    apply_cnot,
    apply_hadamard,
    basis_state,
    discard,
    from_terms,
    measure_computational,
    tensor,
)

log = logging.getLogger(__name__)

CARRIER_LABELS = ("a", "b", "c")
DATA_LABELS = ("q1", "q2")
COUNTERFEIT = "cf"

_S = 1 / np.sqrt(2)


class Kind(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


@dataclass(frozen=True)
class RoundKind:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise ValueError(f"round indices start at 1, got {self.index}")

    @property
    def kind(self) -> Kind:
        return Kind.ODD if self.index % 2 else Kind.EVEN

    @property
    def is_odd(self) -> bool:
        return self.kind is Kind.ODD


@dataclass(frozen=True)
class RoundRecord:
    index: int
    q: int
    bob: int
    charlie: int

    @property
    def kind(self) -> Kind:
        return RoundKind(self.index).kind

    def to_dict(self) -> dict:
        return {"i": self.index, "kind": self.kind.value, "q": self.q, "bob": self.bob, "charlie": self.charlie}


@dataclass
class Transcript:
    """Per-round bits: Alice's data bit, Bob's (announced) bit, Charlie's bit."""

    rounds: list[RoundRecord] = field(default_factory=list)

    def add(self, index: int, q: int, bob: int, charlie: int) -> None:
        if index != len(self.rounds) + 1:
            raise ValueError(f"expected round {len(self.rounds) + 1}, got {index}")
        self.rounds.append(RoundRecord(index, int(q), int(bob), int(charlie)))

    def __len__(self):
        return len(self.rounds)

    def __getitem__(self, index: int) -> RoundRecord:
        """1-based round lookup."""
        if index < 1:
            raise IndexError(index)
        return self.rounds[index - 1]

    @property
    def alice_bits(self) -> list[int]:
        return [r.q for r in self.rounds]

    def to_dict(self) -> dict:
        return {"rounds": [r.to_dict() for r in self.rounds]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Transcript":
        t = cls()
        for r in data["rounds"]:
            if RoundKind(r["i"]).kind.value != r["kind"]:
                raise ValueError(f"round {r['i']} cannot be {r['kind']}")
            t.add(r["i"], r["q"], r["bob"], r["charlie"])
        return t


def session_streams(seed) -> tuple[np.random.Generator, ...]:
    """Independent generators for (data bits, measurements, record splits, comparison)."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return tuple(np.random.default_rng(child) for child in ss.spawn(4))


def _check_bit(q: int) -> int:
    if q not in (0, 1):
        raise ValueError(f"data bit must be 0 or 1, got {q!r}")
    return int(q)


def _require_absent(state: PureState, labels: Sequence[str]) -> None:
    present = [l for l in labels if l in state]
    if present:
        raise ValueError(f"labels {present} are already live in the register")


def make_G() -> PureState:
    return from_terms(CARRIER_LABELS, {"000": 1, "111": 1}, _S)


def make_E() -> PureState:
    return from_terms(CARRIER_LABELS, {"000": 1, "110": 1, "101": 1, "011": 1}, 0.5)


def bar_state(q: int, first: str = "q1", second: str = "q2") -> PureState:
    """``(|0,q> + |1,1+q>)/sqrt2``: bit ``q`` stored in the parity of the pair."""
    q = _check_bit(q)
    return from_terms((first, second), {f"0{q}": 1, f"1{1 - q}": 1}, _S)


def alice_encode_odd(carrier: PureState, q: int) -> PureState:
    """Attach ``|q,q>`` on ``q1, q2`` and apply CNOTs from ``a`` to both."""
    _require_absent(carrier, DATA_LABELS)
    q = _check_bit(q)
    s = tensor(carrier, basis_state(DATA_LABELS, (q, q)))
    s = apply_cnot(s, "a", "q1")
    return apply_cnot(s, "a", "q2")


def alice_encode_even(carrier: PureState, q: int) -> PureState:
    """Attach the parity-encoded pair on ``q1, q2`` and apply a single CNOT from ``a``."""
    _require_absent(carrier, DATA_LABELS)
    s = tensor(carrier, bar_state(q))
    return apply_cnot(s, "a", "q1")


def alice_encode(carrier: PureState, q: int, round_kind: RoundKind) -> PureState:
    if round_kind.is_odd:
        return alice_encode_odd(carrier, q)
    return alice_encode_even(carrier, q)


def bob_decode_honest(state: PureState, round_kind: RoundKind, rng: np.random.Generator):
    """CNOT ``b -> q1``, measure ``q1`` and drop it. Same circuit in both round kinds."""
    state.index("q1")
    s = apply_cnot(state, "b", "q1")
    (bit,), s = measure_computational(s, "q1", rng)
    log.debug("round %d: Bob measured %d", round_kind.index, bit)
    return bit, discard(s, "q1")


def charlie_decode_honest(state: PureState, rng: np.random.Generator, label: str | None = None):
    """CNOT ``c -> label``, measure and drop it.

    ``label`` defaults to the counterfeit qubit when one is live, else ``q2``.
    """
    if label is None:
        label = COUNTERFEIT if COUNTERFEIT in state else "q2"
    state.index(label)
    s = apply_cnot(state, "c", label)
    (bit,), s = measure_computational(s, label, rng)
    return bit, discard(s, label)


def end_of_round_toggle(state: PureState) -> PureState:
    leftover = [l for l in (*DATA_LABELS, COUNTERFEIT) if l in state]
    if leftover:
        raise ValueError(f"data qubits {leftover} still live at end of round")
    for label in CARRIER_LABELS:
        state = apply_hadamard(state, label)
    return state


def run_honest_session(n: int, bits: Sequence[int], seed, trace: list | None = None) -> Transcript:
    """Run ``n`` honest rounds starting from the odd-round carrier.

    ``seed`` is an int, a ``SeedSequence`` or a ready ``Generator`` used for
    the measurements. If ``trace`` is a list, the carrier entering each round
    is appended to it.
    """
    if n < 1:
        raise ValueError(f"need at least one round, got n={n}")
    bits = [_check_bit(b) for b in bits]
    if len(bits) != n:
        raise ValueError(f"{len(bits)} data bits given for {n} rounds")
    rng = seed if isinstance(seed, np.random.Generator) else session_streams(seed)[1]

    transcript = Transcript()
    carrier = make_G()
    for i, q in enumerate(bits, start=1):
        rk = RoundKind(i)
        if trace is not None:
            trace.append(carrier)
        s = alice_encode(carrier, q, rk)
        bob, s = bob_decode_honest(s, rk, rng)
        charlie, s = charlie_decode_honest(s, rng)
        transcript.add(i, q, bob, charlie)
        carrier = end_of_round_toggle(s)
        if log.isEnabledFor(logging.DEBUG):
            log.debug("after round %d carrier %r", i, carrier)
    return transcript
