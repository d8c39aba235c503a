"""Command-line front end: honest and attacked Monte Carlo runs, and the equation ledger.

Exit codes: 0 success, 2 bad configuration, 3 an engine invariant tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass

from .attack import AttackInvariantError
from .equations import format_ledger, verify_equations
from .montecarlo import run_trials
from .statevec import NotSeparableError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

log = logging.getLogger("qss_split")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    mode: str = "attack"
    rounds: int = 20
    trials: int = 1000
    compare_fraction: float = 0.25
    seed: int = 42
    out: str | None = None
    format: str = "json"
    workers: int = 1

    def validate(self) -> None:
        if self.mode == "verify-equations":
            return
        min_rounds = 2 if self.mode == "attack" else 1
        if self.rounds < min_rounds:
            raise ConfigError(f"--rounds must be >= {min_rounds} in {self.mode} mode")
        if self.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if not 0.0 < self.compare_fraction <= 1.0:
            raise ConfigError("--compare-fraction must lie in (0, 1]")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qss-split",
        description="Simulate GHZ-carrier secret sharing with and without the entanglement-split cheat.",
    )
    p.add_argument("--mode", choices=["honest", "attack", "verify-equations"], default="attack")
    p.add_argument("--rounds", type=int, default=20, help="rounds per session (default 20)")
    p.add_argument("--trials", type=int, default=1000, help="sessions to simulate (default 1000)")
    p.add_argument("--compare-fraction", type=float, default=0.25,
                   help="probability that each round is publicly compared (default 0.25)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--workers", type=int, default=1, help="worker processes for the trials")
    return p


def _equation_report(fmt: str) -> tuple[str, bool]:
    rows = verify_equations()
    ok = all(r.passed for r in rows)
    if fmt == "text":
        return format_ledger(rows) + "\n", ok
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["equation", "case", "pass", "max_deviation"])
        for r in rows:
            writer.writerow([r.equation, r.case, int(r.passed), repr(r.deviation)])
        return buf.getvalue(), ok
    body = {"checks": [r.to_dict() for r in rows], "all_pass": ok}
    return json.dumps(body, indent=2) + "\n", ok


def run(cfg: RunConfig) -> tuple[str, int]:
    if cfg.mode == "verify-equations":
        text, ok = _equation_report(cfg.format)
        return text, EXIT_OK if ok else EXIT_INVARIANT
    stats = run_trials(cfg.mode, cfg.rounds, cfg.trials, cfg.compare_fraction, cfg.seed, cfg.workers)
    if cfg.format == "csv":
        return stats.to_csv(), EXIT_OK
    if cfg.format == "text":
        return stats.summary() + "\n", EXIT_OK
    return stats.to_json() + "\n", EXIT_OK


def _configure_logging() -> None:
    level = os.environ.get("QSS_LOG", "error").lower()
    if level not in LOG_LEVELS:
        raise ConfigError(f"QSS_LOG must be one of {sorted(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    log.setLevel(LOG_LEVELS[level])


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG

    cfg = RunConfig(
        mode=args.mode,
        rounds=args.rounds,
        trials=args.trials,
        compare_fraction=args.compare_fraction,
        seed=args.seed,
        out=args.out,
        format=args.format,
        workers=args.workers,
    )
    try:
        _configure_logging()
        cfg.validate()
    except ConfigError as exc:
        print(f"qss-split: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        text, code = run(cfg)
    except (AttackInvariantError, NotSeparableError) as exc:
        print(f"qss-split: internal invariant breached: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    if cfg.out is None:
        sys.stdout.write(text)
    else:
        try:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qss-split: cannot write {cfg.out}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    return code


if __name__ == "__main__":
    sys.exit(main())
