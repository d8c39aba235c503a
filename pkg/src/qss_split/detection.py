"""Public comparison of a random subsequence of rounds.

For every compared round Alice's bit is announced together with Bob's and
Charlie's. Odd rounds pass when all three agree; even rounds pass when the
three bits XOR to zero. A single failing round flags eavesdropping.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .protocol import Kind, RoundKind, Transcript

DEFAULT_FRACTION = 0.25


def select_comparison(n: int, fraction: float, rng: np.random.Generator) -> frozenset[int]:
    """Each round in ``1..n`` is compared independently with probability ``fraction``."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"compare fraction must lie in (0, 1], got {fraction}")
    if n < 1:
        raise ValueError(f"need at least one round, got n={n}")
    picks = rng.random(n) < fraction
    return frozenset(int(i) + 1 for i in np.flatnonzero(picks))


def verify_round(kind, alice: int, bob: int, charlie: int) -> bool:
    if isinstance(kind, RoundKind):
        kind = kind.kind
    for b in (alice, bob, charlie):
        if b not in (0, 1):
            raise ValueError(f"bits must be 0 or 1, got {b!r}")
    if Kind(kind) is Kind.ODD:
        return alice == bob == charlie
    return (alice ^ bob ^ charlie) == 0


@dataclass(frozen=True)
class RoundCheck:
    index: int
    alice: int
    bob: int
    charlie: int
    passed: bool


@dataclass
class ComparisonReport:
    checks: dict[int, RoundCheck] = field(default_factory=dict)

    @property
    def compared_indices(self) -> frozenset[int]:
        return frozenset(self.checks)

    @property
    def detected(self) -> bool:
        return any(not c.passed for c in self.checks.values())

    @property
    def failures(self) -> list[int]:
        return sorted(i for i, c in self.checks.items() if not c.passed)

    def announced(self) -> set[tuple[int, int]]:
        """The (index, Alice's bit) pairs made public by the comparison."""
        return {(i, c.alice) for i, c in self.checks.items()}

    def to_dict(self) -> dict:
        return {
            "compared": sorted(self.checks),
            "checks": [
                {"i": c.index, "alice": c.alice, "bob": c.bob, "charlie": c.charlie, "pass": c.passed}
                for c in sorted(self.checks.values(), key=lambda c: c.index)
            ],
            "detected": self.detected,
        }


def compare(transcript: Transcript, indices) -> ComparisonReport:
    n = len(transcript)
    report = ComparisonReport()
    for i in sorted(indices):
        if not 1 <= i <= n:
            raise ValueError(f"compared index {i} outside 1..{n}")
        r = transcript[i]
        report.checks[i] = RoundCheck(i, r.q, r.bob, r.charlie, verify_round(r.kind, r.q, r.bob, r.charlie))
    return report
