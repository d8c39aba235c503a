"""
Carriers and honest rounds
==========================

A walk through one honest session: the two carrier states, how a bit rides
on them, and why the carrier survives the round.
"""

# %%
# The two carriers. ``make_G`` is the three-party GHZ state and ``make_E``
# the uniform superposition of even-parity strings.
import numpy as np

from qss_split import equal_up_to_global_phase, make_E, make_G
from qss_split.protocol import alice_encode_odd, bob_decode_honest, charlie_decode_honest
from qss_split.protocol import RoundKind, end_of_round_toggle, run_honest_session

g, e = make_G(), make_E()
print(g)
print(e)

# %%
# A Hadamard on every carrier qubit swaps the two, which is all the
# parties do between rounds.
print(equal_up_to_global_phase(end_of_round_toggle(g), e))
print(equal_up_to_global_phase(end_of_round_toggle(e), g))

# %%
# Odd round by hand. Alice writes q onto two fresh data qubits, Bob and
# Charlie each undo their share and read the same bit.
rng = np.random.default_rng(1)
state = alice_encode_odd(g, 1)
bob, state = bob_decode_honest(state, RoundKind(1), rng)
charlie, state = charlie_decode_honest(state, rng)
print(bob, charlie, state.labels)

# %%
# A full session. In even rounds neither share alone says anything, only
# the XOR of the two does.
bits = [1, 0, 1, 1, 0, 1]
for r in run_honest_session(len(bits), bits, seed=3).rounds:
    print(r.index, r.kind.value, r.q, r.bob, r.charlie, r.bob ^ r.charlie)
