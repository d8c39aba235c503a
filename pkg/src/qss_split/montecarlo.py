"""Seeded Monte Carlo over honest or attacked sessions.

Trial ``k`` of a run with master seed ``s`` draws all of its randomness
(Alice's data bits, measurements, Bob's record splits, the compared subset)
from ``SeedSequence([s, k])``, so any single trial can be replayed alone and
the aggregate does not depend on execution order.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .attack import run_attacked_session
from .detection import DEFAULT_FRACTION, compare, select_comparison
from .protocol import run_honest_session, session_streams

MODES = ("honest", "attack")


@dataclass(frozen=True)
class TrialReport:
    trial: int
    n: int
    detected: bool
    compared: tuple[int, ...]
    round2_compared: bool
    round2_passed: bool | None
    stealth_failures: tuple[int, ...]
    bob_recovery_errors: tuple[int, ...] | None
    q2_resolved: bool | None
    q2: int | None
    failure_event: bool


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, trial])


def run_trial(mode: str, n: int, fraction: float, seed: int, trial: int) -> TrialReport:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    ss = trial_seed(seed, trial)
    bits_rng = session_streams(ss)[0]
    bits = [int(b) for b in bits_rng.integers(2, size=n)]

    if mode == "honest":
        _, measure_rng, _, compare_rng = session_streams(ss)
        transcript = run_honest_session(n, bits, measure_rng)
        comparison = compare(transcript, select_comparison(n, fraction, compare_rng))
        errors = None
        resolved = None
    else:
        session = run_attacked_session(n, bits, fraction, ss)
        comparison = session.comparison
        errors = tuple(i for i, (r, q) in enumerate(zip(session.recovered, bits), start=1) if r != q)
        resolved = session.records.q2_knowledge.bit is not None

    compared = tuple(sorted(comparison.compared_indices))
    round2 = comparison.checks.get(2)
    return TrialReport(
        trial=trial,
        n=n,
        detected=comparison.detected,
        compared=compared,
        round2_compared=round2 is not None,
        round2_passed=None if round2 is None else round2.passed,
        stealth_failures=tuple(i for i in comparison.failures if i != 2),
        bob_recovery_errors=errors,
        q2_resolved=resolved,
        q2=bits[1] if n >= 2 else None,
        failure_event=not any(i >= 4 and i % 2 == 0 for i in compared),
    )


def _run_chunk(args) -> list[TrialReport]:
    mode, n, fraction, seed, start, stop = args
    return [run_trial(mode, n, fraction, seed, k) for k in range(start, stop)]


@dataclass
class TrialStats:
    mode: str
    n: int
    trials: int
    fraction: float
    seed: int
    reports: list[TrialReport] = field(default_factory=list, repr=False)

    @property
    def detection_rate(self) -> float:
        return sum(r.detected for r in self.reports) / len(self.reports)

    @property
    def round2_check_pass_rate(self) -> float | None:
        checked = [r.round2_passed for r in self.reports if r.round2_compared]
        return sum(checked) / len(checked) if checked else None

    @property
    def round2_checked_trials(self) -> int:
        return sum(r.round2_compared for r in self.reports)

    @property
    def stealth_failure_count(self) -> int:
        return sum(len(r.stealth_failures) for r in self.reports)

    @property
    def recovery_error_histogram(self) -> dict[int, int]:
        counts = Counter(len(r.bob_recovery_errors) for r in self.reports if r.bob_recovery_errors is not None)
        return dict(sorted(counts.items()))

    @property
    def q2_resolution_rate(self) -> float | None:
        flags = [r.q2_resolved for r in self.reports if r.q2_resolved is not None]
        return sum(flags) / len(flags) if flags else None

    @property
    def failure_event_rate(self) -> float:
        return sum(r.failure_event for r in self.reports) / len(self.reports)

    def expected_failure_event_rate(self) -> float:
        """Probability that no even round >= 4 lands in the compared subset."""
        return (1.0 - self.fraction) ** ((self.n - 2) // 2)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "trials": self.trials,
            "fraction": self.fraction,
            "seed": self.seed,
            "detection_rate": self.detection_rate,
            "round2_check_pass_rate": self.round2_check_pass_rate,
            "round2_checked_trials": self.round2_checked_trials,
            "stealth_failure_count": self.stealth_failure_count,
            "recovery_error_histogram": {str(k): v for k, v in self.recovery_error_histogram.items()},
            "q2_resolution_rate": self.q2_resolution_rate,
            "failure_event_rate": self.failure_event_rate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = [
            "trial", "n", "detected", "compared", "round2_compared", "round2_passed",
            "stealth_failures", "recovery_errors", "recovery_error_indices", "q2", "q2_resolved",
            "failure_event",
        ]
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for r in self.reports:
            row = asdict(r)
            errors = row.pop("bob_recovery_errors")
            writer.writerow({
                "trial": r.trial,
                "n": r.n,
                "detected": int(r.detected),
                "compared": " ".join(map(str, r.compared)),
                "round2_compared": int(r.round2_compared),
                "round2_passed": "" if r.round2_passed is None else int(r.round2_passed),
                "stealth_failures": " ".join(map(str, r.stealth_failures)),
                "recovery_errors": "" if errors is None else len(errors),
                "recovery_error_indices": "" if errors is None else " ".join(map(str, errors)),
                "q2": "" if r.q2 is None else r.q2,
                "q2_resolved": "" if r.q2_resolved is None else int(r.q2_resolved),
                "failure_event": int(r.failure_event),
            })
        return buf.getvalue()

    def summary(self) -> str:
        d = self.to_dict()
        lines = [
            f"mode={self.mode} n={self.n} trials={self.trials} fraction={self.fraction} seed={self.seed}",
            f"  detection rate            {d['detection_rate']:.4f}",
            f"  stealth failures          {d['stealth_failure_count']} (compared rounds other than 2)",
        ]
        r2 = d["round2_check_pass_rate"]
        lines.append(
            f"  round-2 check pass rate   {'n/a' if r2 is None else f'{r2:.4f}'}"
            f" over {d['round2_checked_trials']} trials"
        )
        if self.mode == "attack":
            lines += [
                f"  recovery error histogram  {self.recovery_error_histogram}",
                f"  q2 resolution rate        {d['q2_resolution_rate']:.4f}",
                f"  failure event rate        {d['failure_event_rate']:.4f}"
                f" (closed form {self.expected_failure_event_rate():.4f})",
                "  note: Bob's round-2 record is 0 regardless of Alice's bit; the public"
                " check on round 2 only sees Bob XOR Charlie",
            ]
        return "\n".join(lines)


def run_trials(
    mode: str,
    n: int,
    trials: int,
    fraction: float = DEFAULT_FRACTION,
    seed: int = 42,
    workers: int = 1,
) -> TrialStats:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    if mode == "attack" and n < 2:
        raise ValueError(f"attacked sessions need n >= 2, got {n}")
    if n < 1:
        raise ValueError(f"need at least one round, got n={n}")
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"compare fraction must lie in (0, 1], got {fraction}")

    if workers <= 1:
        reports = _run_chunk((mode, n, fraction, seed, 0, trials))
    else:
        step = -(-trials // (4 * workers))
        chunks = [(mode, n, fraction, seed, k, min(k + step, trials)) for k in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    reports.sort(key=lambda r: r.trial)
    return TrialStats(mode, n, trials, fraction, seed, reports)
