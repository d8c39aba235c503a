"""
The entanglement split
======================

Bob swaps the tripartite carrier for two Bell pairs during round 2, then
reads every later bit himself and forwards a counterfeit to Charlie.
"""

# %%
import numpy as np

from qss_split.attack import CheatRecords, SPLIT_U, execute_split, post_correction, run_attacked_session
from qss_split.protocol import alice_encode_even, make_E

print(SPLIT_U.matrix.real.astype(int))

# %%
# Round 2 as Alice sends it, then Bob's permutation and discard. What is
# left is a pair shared with Alice and a pair Charlie holds with Bob.
records = CheatRecords.empty(2)
for q2 in (0, 1):
    split = execute_split(alice_encode_even(make_E(), q2), records)
    print(q2, split)

# %%
# A whole attacked session. For odd rounds Bob's bit is exact; for even
# rounds it is off by the round-2 bit until he learns it.
bits = [0, 1, 1, 0, 1, 1, 0, 0, 1, 0]
session = run_attacked_session(len(bits), bits, 0.3, seed=5)
print("alice", bits)
print("d    ", session.records.d)

# %%
# Alice's announcement of one compared even round pins down the offset.
recovered, knowledge = post_correction(session.records, {(4, bits[3])})
print("fixed", recovered, knowledge)
print("errors at", [i + 1 for i in range(len(bits)) if recovered[i] != bits[i]])

# %%
# Charlie's view stays consistent: every compared round outside round 2
# passes the public check.
for i, check in sorted(session.comparison.checks.items()):
    print(i, check.passed)
