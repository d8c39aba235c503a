"""
How often the cheat goes unnoticed
==================================

Seeded Monte Carlo over many attacked sessions. Detection, stealth and the
chance that Bob never learns the round-2 offset.
"""

# %%
from qss_split.montecarlo import run_trials

stats = run_trials("attack", n=20, trials=2000, fraction=0.25, seed=42)
print(stats.summary())

# %%
# The rounds Alice compares are drawn independently, so Bob is left guessing
# exactly when no even round from 4 on is compared.
for fraction in (0.1, 0.25, 0.5):
    s = run_trials("attack", n=20, trials=2000, fraction=fraction, seed=42)
    print(fraction, round(1 - s.q2_resolution_rate, 4), round(s.expected_failure_event_rate(), 4))

# %%
# Per-trial rows for further analysis.
print(stats.to_csv().splitlines()[:3])
