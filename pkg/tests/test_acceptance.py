"""Exit criteria. Each test records one PASS/FAIL line, shown in the terminal summary."""

import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from conftest import ACCEPTANCE_LINES
from qss_split.attack import BOB_KEPT, SPLIT_U, run_attacked_session
from qss_split.detection import compare, select_comparison
from qss_split.equations import verify_equations
from qss_split.montecarlo import run_trials
from qss_split.protocol import (
    Kind,
    end_of_round_toggle,
    make_E,
    make_G,
    run_honest_session,
    session_streams,
)
from qss_split.statevec import (
    BellOutcome,
    NotSeparableError,
    PureState,
    apply_cnot,
    apply_hadamard,
    apply_unitary,
    bell_state,
    discard,
    measure_bell,
    phase_aligned_distance,
    reorder,
    tensor,
)

PROPERTY_CASES = 1000
LABELS = ("a", "b", "c", "q1", "q2", "bbar", "cf")


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def attack_run():
    return run_trials("attack", 20, 10_000, fraction=0.25, seed=2025)


def test_1_equation_ledger():
    start = time.perf_counter()
    rows = verify_equations()
    elapsed = time.perf_counter() - start
    groups = {r.equation for r in rows}
    worst = max(r.deviation for r in rows)
    ok = all(r.passed for r in rows) and worst < 1e-10 and elapsed < 1.0 and len(groups) == 14
    record(1, "equation ledger", ok, f"{sum(r.passed for r in rows)}/{len(rows)} checks, "
           f"max deviation {worst:.1e}, {elapsed:.3f} s")


def test_2_carrier_toggling():
    forward = phase_aligned_distance(end_of_round_toggle(make_G()), make_E())
    back = phase_aligned_distance(end_of_round_toggle(make_E()), make_G())
    ok = forward < 1e-12 and back < 1e-12
    record(2, "carrier toggling", ok, f"G->E {forward:.1e}, E->G {back:.1e}")


def test_3_honest_protocol():
    start = time.perf_counter()
    violations = 0
    rounds = 0
    detected = 0
    for k in range(100):
        bits_rng, measure_rng, _, compare_rng = session_streams([7, k])
        bits = [int(b) for b in bits_rng.integers(2, size=100)]
        t = run_honest_session(100, bits, measure_rng)
        for r in t.rounds:
            rounds += 1
            if r.kind is Kind.ODD:
                violations += not (r.bob == r.charlie == r.q)
            else:
                violations += (r.bob ^ r.charlie) != r.q
        detected += compare(t, select_comparison(100, 0.25, compare_rng)).detected
    elapsed = time.perf_counter() - start
    ok = violations == 0 and rounds == 10_000 and detected == 0 and elapsed < 10.0
    record(3, "honest protocol", ok, f"{rounds} rounds, {violations} violations, "
           f"detection rate {detected / 100:.1f}, {elapsed:.2f} s")


def test_4_attack_stealth(attack_run):
    stealth = attack_run.stealth_failure_count
    r2 = attack_run.round2_check_pass_rate
    ok = stealth == 0 and r2 is not None
    record(4, "attack stealth", ok, f"{stealth} failures outside round 2 over {attack_run.trials} sessions; "
           f"round-2 check pass rate {r2:.4f} over {attack_run.round2_checked_trials} checked sessions")


def test_5_at_most_one_error(attack_run):
    hist = attack_run.recovery_error_histogram
    bad = [r for r in attack_run.reports if set(r.bob_recovery_errors) - {2}]
    bad_in_failure_event = sum(r.failure_event and r.q2 == 1 for r in bad)
    ok = set(hist) <= {0, 1} and not bad
    record(5, "at most one recovery error (index 2)", ok,
           f"histogram {hist}; {len(bad)} trials with errors outside index 2 "
           f"({bad_in_failure_event} of them have no even round >= 4 compared and q2 = 1)")


def test_6_carrier_alternation():
    n = 102
    bits = [int(b) for b in np.random.default_rng(6).integers(2, size=n)]
    bits[1] = 1
    trace = []
    run_attacked_session(n, bits, 0.25, seed=6, trace=trace)
    odd = tensor(bell_state(BellOutcome.PHI_MINUS, "a", BOB_KEPT), bell_state(BellOutcome.PHI_MINUS, "b", "c"))
    even = tensor(bell_state(BellOutcome.PSI_PLUS, "a", BOB_KEPT), bell_state(BellOutcome.PSI_PLUS, "b", "c"))
    worst = max(phase_aligned_distance(trace[i - 1], odd if i % 2 else even) for i in range(3, n + 1))
    ok = worst < 1e-10 and len(trace) - 2 == 100
    record(6, "carrier-kind alternation (q2 = 1)", ok, f"rounds 3..{n}, max deviation {worst:.1e}")


def test_7_offset_law():
    n = 8
    breaches = 0
    for bits in itertools.product((0, 1), repeat=n):
        session = run_attacked_session(n, list(bits), 0.25, seed=8)
        for i in range(4, n + 1, 2):
            breaches += session.records.d[i - 1] != bits[i - 1] ^ bits[1]
    record(7, "offset law", breaches == 0, f"{2 ** n} bit strings, {breaches} breaches")


@pytest.mark.parametrize("fraction", [0.1, 0.25, 0.5])
def test_8_failure_event_rate(fraction, attack_run):
    stats = attack_run if fraction == 0.25 else run_trials("attack", 20, 10_000, fraction=fraction, seed=2025)
    p = stats.expected_failure_event_rate()
    se = math.sqrt(p * (1 - p) / stats.trials)
    unresolved = 1.0 - stats.q2_resolution_rate
    z = (unresolved - p) / se
    ok = abs(z) <= 3.0
    record(8, f"failure-event rate (fraction {fraction})", ok,
           f"unresolved {unresolved:.4f} vs closed form {p:.4f} ({z:+.2f} SE)")


def _random_state(labels, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** len(labels)) + 1j * rng.normal(size=2 ** len(labels))
    return PureState(tuple(labels), v / np.linalg.norm(v))


registers = st.integers(1, 7).flatmap(
    lambda n: st.tuples(st.permutations(LABELS).map(lambda p: tuple(p[:n])), st.integers(0, 2**32 - 1))
)


def _run_property(prop):
    try:
        prop()
    except Exception as exc:  # noqa: BLE001 - reported as a FAIL line
        return False, f"{type(exc).__name__}: {exc}"
    return True, f"{PROPERTY_CASES} cases"


def test_9_engine_properties():
    results = {}

    @settings(max_examples=PROPERTY_CASES, deadline=None, database=None)
    @given(registers, st.data())
    def norm_preservation(case, data):
        labels, seed = case
        s = _random_state(labels, seed)
        for _ in range(data.draw(st.integers(1, 6))):
            gate = data.draw(st.sampled_from(["h", "cx", "u"]))
            if gate == "h" or len(labels) == 1:
                s = apply_hadamard(s, data.draw(st.sampled_from(labels)))
            elif gate == "cx" or len(labels) < 3:
                c, t = data.draw(st.permutations(labels))[:2]
                s = apply_cnot(s, c, t)
            else:
                s = apply_unitary(s, data.draw(st.permutations(labels))[:3], SPLIT_U)
            assert abs(np.vdot(s.amps, s.amps).real - 1.0) < 1e-10

    @settings(max_examples=PROPERTY_CASES, deadline=None, database=None)
    @given(st.integers(0, 2**32 - 1), st.permutations(range(5)))
    def split_unitary(seed, order):
        m = SPLIT_U.matrix
        assert SPLIT_U.is_permutation()
        assert np.max(np.abs(m.conj().T @ m - np.eye(8))) == 0.0
        labels = ("a", "b", "c", "q1", "q2")
        s = _random_state(labels, seed)
        got = apply_unitary(s, tuple(labels[k] for k in order[:3]), SPLIT_U)
        expected = oracle.full_operator(5, list(order[:3]), m) @ s.amps
        assert np.max(np.abs(got.amps - expected)) < 1e-12

    @settings(max_examples=PROPERTY_CASES, deadline=None, database=None)
    @given(st.sampled_from(list(BellOutcome)), st.integers(0, 2**32 - 1), st.integers(0, 3))
    def bell_round_trip(outcome, seed, spectators):
        pair = bell_state(outcome, "q1", "q2")
        state = pair if spectators == 0 else tensor(_random_state(("a", "b", "c")[:spectators], seed), pair)
        order = list(np.random.default_rng(seed).permutation(state.labels))
        state = reorder(state, order)
        got, post = measure_bell(state, ("q1", "q2"), np.random.default_rng(seed))
        assert got is outcome
        assert phase_aligned_distance(post, state) < 1e-10

    @settings(max_examples=PROPERTY_CASES, deadline=None, database=None)
    @given(registers, st.data())
    def hadamard_involution(case, data):
        labels, seed = case
        s = _random_state(labels, seed)
        target = data.draw(st.sampled_from(labels))
        twice = apply_hadamard(apply_hadamard(s, target), target)
        assert np.max(np.abs(twice.amps - s.amps)) < 1e-10

    @settings(max_examples=PROPERTY_CASES, deadline=None, database=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.05, math.pi / 4))
    def discard_tripwire(seed, angle):
        rng = np.random.default_rng(seed)
        # Schmidt form cos|u0 v0> + sin|u1 v1> with random local unitaries: entangled for angle > 0
        u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        v = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        amps = math.cos(angle) * np.kron(u[:, 0], v[:, 0]) + math.sin(angle) * np.kron(u[:, 1], v[:, 1])
        entangled = PureState(("a", "b"), amps)
        try:
            discard(entangled, "b")
        except NotSeparableError:
            pass
        else:
            raise AssertionError("entangled discard did not raise")
        product = PureState(("a", "b"), np.kron(u[:, 0], v[:, 1]))
        rest = discard(product, "b")
        assert phase_aligned_distance(rest, PureState(("a",), u[:, 0])) < 1e-10

    for name, prop in [
        ("norm preservation", norm_preservation),
        ("split unitary structure", split_unitary),
        ("Bell round trip", bell_round_trip),
        ("Hadamard involution", hadamard_involution),
        ("discard tripwire", discard_tripwire),
    ]:
        results[name] = _run_property(prop)

    ok = all(flag for flag, _ in results.values())
    detail = "; ".join(f"{name} {'ok' if flag else 'FAILED'} ({msg})" for name, (flag, msg) in results.items())
    record(9, "engine properties", ok, detail)
