"""Closed-form states of the protocol and the split attack, checked against simulation.

Each check builds the left side operationally, by running the same routines
the sessions use on prepared inputs, and the right side literally from
hand-entered kets, then compares the two up to a global phase.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import attack, protocol
from .statevec import (
    TOL,
    BellOutcome,
    PureState,
    apply_cnot,
    apply_unitary,
    basis_state,
    bell_state,
    from_terms,
    phase_aligned_distance,
    plus_state,
    reorder,
    tensor,
)

PHI_P, PHI_M, PSI_P = BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS, BellOutcome.PSI_PLUS
_S = 1 / np.sqrt(2)


@dataclass(frozen=True)
class EquationCheck:
    equation: str
    case: str
    deviation: float
    tol: float = TOL

    @property
    def passed(self) -> bool:
        return self.deviation < self.tol

    def to_dict(self) -> dict:
        return {"equation": self.equation, "case": self.case, "pass": self.passed, "max_deviation": self.deviation}


def _sum(*terms: tuple[complex, PureState]) -> PureState:
    """Linear combination of states over the same label set (first term fixes the order)."""
    labels = terms[0][1].labels
    amps = sum(c * reorder(s, labels).amps for c, s in terms)
    return PureState(labels, amps)


def _ket(labels, bits) -> PureState:
    return basis_state(labels, bits)


def _check(rows: list, equation: str, case: str, built: PureState, literal: PureState) -> None:
    rows.append(EquationCheck(equation, case, phase_aligned_distance(built, literal)))


def _toggle(rows):
    g, e = protocol.make_G(), protocol.make_E()
    _check(rows, "carrier toggle", "H(x)3 |G> = |E>", protocol.end_of_round_toggle(g), e)
    _check(rows, "carrier toggle", "H(x)3 |E> = |G>", protocol.end_of_round_toggle(e), g)


def _honest_encodings(rows):
    for q in (0, 1):
        p = 1 - q
        built = protocol.alice_encode_odd(protocol.make_G(), q)
        literal = from_terms(("a", "b", "c", "q1", "q2"), {f"000{q}{q}": 1, f"111{p}{p}": 1}, _S)
        _check(rows, "odd encoding", f"q={q}", built, literal)

        built = protocol.alice_encode_even(protocol.make_E(), q)
        literal = _sum(
            (_S, tensor(_ket("a", [0]), protocol.bar_state(0, "b", "c"), protocol.bar_state(q))),
            (_S, tensor(_ket("a", [1]), protocol.bar_state(1, "b", "c"), protocol.bar_state(p))),
        )
        _check(rows, "even encoding", f"q={q}", built, literal)


ROUND2_KETS = {
    0: ["00000", "00011", "01100", "01111", "10101", "10110", "11001", "11010"],
    1: ["00001", "00010", "01101", "01110", "10100", "10111", "11000", "11011"],
}
SPLIT_KETS = {
    0: ["00000", "00001", "01100", "01101", "11110", "11111", "10010", "10011"],
    1: ["01010", "01011", "00110", "00111", "10100", "10101", "11000", "11001"],
}
_ABC12 = ("a", "b", "c", "q1", "q2")


def _split(rows):
    scale = 1 / (2 * np.sqrt(2))
    for q2 in (0, 1):
        encoded = protocol.alice_encode_even(protocol.make_E(), q2)
        literal_encoded = from_terms(_ABC12, dict.fromkeys(ROUND2_KETS[q2], 1), scale)
        _check(rows, "round-2 encoding", f"q2={q2}", encoded, literal_encoded)

        after_u = apply_unitary(encoded, ("b", "q1", "q2"), attack.SPLIT_U)
        literal_permuted = from_terms(_ABC12, dict.fromkeys(SPLIT_KETS[q2], 1), scale)
        _check(rows, "split permutation", f"q2={q2}", after_u, literal_permuted)

        pair = PHI_P if q2 == 0 else PSI_P
        literal_factored = tensor(bell_state(pair, "a", "q1"), bell_state(pair, "b", "c"), plus_state("q2"))
        _check(rows, "split factorization", f"q2={q2} (after U)", after_u, literal_factored)
        _check(rows, "split factorization", f"q2={q2} (hand-entered kets agree)", literal_permuted, literal_factored)

        records = attack.CheatRecords.empty(2)
        split = attack.execute_split(encoded, records)
        expected = tensor(bell_state(pair, "a", attack.BOB_KEPT), bell_state(pair, "b", "c"))
        _check(rows, "split factorization", f"q2={q2} (q2 discarded, q1 kept as bbar)", split, expected)


def _split_carriers(kind: BellOutcome) -> PureState:
    return tensor(bell_state(kind, "a", attack.BOB_KEPT), bell_state(kind, "b", "c"))


def _maintenance(rows):
    for before, after in ((PHI_P, PHI_P), (PSI_P, PHI_M), (PHI_M, PSI_P)):
        built = attack.maintain_split_carriers(_split_carriers(before))
        _check(rows, "carrier maintenance", f"{before.value} x {before.value} -> {after.value} x {after.value}",
               built, _split_carriers(after))


def _resend(rows):
    for kind in (PHI_P, PHI_M, PSI_P):
        for psi in (0, 1):
            case = f"bc={kind.value}, psi={psi}"
            carrier = bell_state(kind, "b", "c")
            flipped = 1 - psi
            literal_prepared = from_terms(("b", "c", "cf"), _prepared_terms(kind, psi), _S)
            _check(rows, "counterfeit preparation", case, tensor(carrier, _ket("cf", [psi])), literal_prepared)

            sent = attack.resend_bit(carrier, psi)
            sign = -1 if kind is PHI_M else 1
            c0 = "1" if kind is PSI_P else "0"
            c1 = "0" if kind is PSI_P else "1"
            literal_sent = from_terms(("b", "c", "cf"), {f"0{c0}{psi}": 1, f"1{c1}{flipped}": sign}, _S)
            _check(rows, "counterfeit entangling", case, sent, literal_sent)

            received = apply_cnot(sent, "c", "cf")
            out_bit = flipped if kind is PSI_P else psi
            literal_received = tensor(bell_state(kind, "b", "c"), _ket("cf", [out_bit]))
            _check(rows, "counterfeit decode", case, received, literal_received)


def _prepared_terms(kind: BellOutcome, psi: int) -> dict[str, complex]:
    if kind is PHI_P:
        return {f"00{psi}": 1, f"11{psi}": 1}
    if kind is PHI_M:
        return {f"00{psi}": 1, f"11{psi}": -1}
    return {f"01{psi}": 1, f"10{psi}": 1}


def _intercepts(rows):
    bbar = attack.BOB_KEPT
    for q2 in (0, 1):
        odd_kind = PHI_P if q2 == 0 else PHI_M
        even_kind = PHI_P if q2 == 0 else PSI_P
        sign = 1 if q2 == 0 else -1
        for q in (0, 1):
            p = 1 - q
            case = f"q2={q2}, q={q}"

            encoded = protocol.alice_encode_odd(_split_carriers(odd_kind), q)
            literal_encoded = tensor(
                from_terms(("a", bbar, "q1", "q2"), {f"00{q}{q}": 1, f"11{p}{p}": sign}, _S),
                bell_state(odd_kind, "b", "c"),
            )
            _check(rows, "split odd encoding", case, encoded, literal_encoded)

            decoded = apply_cnot(apply_cnot(encoded, bbar, "q1"), bbar, "q2")
            literal_decoded = tensor(
                bell_state(odd_kind, "a", bbar), _ket(("q1", "q2"), [q, q]), bell_state(odd_kind, "b", "c")
            )
            _check(rows, "odd intercept", case, decoded, literal_decoded)

            encoded = protocol.alice_encode_even(_split_carriers(even_kind), q)
            lo, hi = ("00", "11") if q2 == 0 else ("01", "10")
            literal_even_encoded = tensor(
                _sum(
                    (_S, tensor(from_terms(("a", bbar), {lo: 1}), protocol.bar_state(q))),
                    (_S, tensor(from_terms(("a", bbar), {hi: 1}), protocol.bar_state(p))),
                ),
                bell_state(even_kind, "b", "c"),
            )
            _check(rows, "split even encoding", case, encoded, literal_even_encoded)

            decoded = apply_cnot(encoded, bbar, "q1")
            data_bit = q if q2 == 0 else p
            literal_even_decoded = tensor(
                bell_state(even_kind, "a", bbar), protocol.bar_state(data_bit), bell_state(even_kind, "b", "c")
            )
            _check(rows, "even intercept", case, decoded, literal_even_decoded)


def verify_equations() -> list[EquationCheck]:
    rows: list[EquationCheck] = []
    _toggle(rows)
    _honest_encodings(rows)
    _split(rows)
    _maintenance(rows)
    _resend(rows)
    _intercepts(rows)
    return rows


def format_ledger(rows: list[EquationCheck]) -> str:
    width = max(len(r.equation) for r in rows)
    lines = [
        f"{r.equation:<{width}}  {'PASS' if r.passed else 'FAIL'}  dev={r.deviation:.2e}  {r.case}" for r in rows
    ]
    passed = sum(r.passed for r in rows)
    lines.append(f"{passed}/{len(rows)} checks passed")
    return "\n".join(lines)
