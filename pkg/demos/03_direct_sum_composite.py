"""The direct-sum composite: dynamically independent and no-signaling, yet
its joint effects never leave the block diagonal.

Local operations act as a block map on their own sector and a scalar on
the other, so opposite sides commute exactly.  The span of locally
generated joint effects is d1^2 + d2^2, strictly under the ambient
(d1 + d2)^2: there is no way to tomograph this composite locally.
"""

import numpy as np

from optheory import (
    DSumLocalOp,
    DSumState,
    KrausOp,
    ds_commutation_defect,
    ds_condition,
    ds_joint_prob,
    ds_local_effect_span,
    ds_local_prob,
    ds_nosig_check,
)
from optheory.directsum import ds_random_action, ds_random_local_op
from optheory.sampling import ginibre_state, trial_rng

rng = trial_rng(303)
omega = DSumState(0.6 * ginibre_state(rng, 2), 0.4 * ginibre_state(rng, 2))

# Probability rule: block trace plus sector weight.
a = DSumLocalOp(1, KrausOp([np.diag([1.0, 0.0])]), p=0.5, label="filter")
b = ds_random_local_op(rng, 2, 2)
print("P(a alone)  =", ds_local_prob(omega, a))
print("P(a and b)  =", ds_joint_prob(omega, a, b))

# Opposite-side operations commute exactly.
worst = max(
    ds_commutation_defect(ds_random_local_op(rng, 1, 2), ds_random_local_op(rng, 2, 2), 2, 2)
    for _ in range(50)
)
print("commutation defect over 50 random pairs:", worst)

# Hence no-signaling: complete side-1 actions are invisible to side 2.
action = ds_random_action(rng, 1, 2, 3)
probes = [ds_random_local_op(rng, 2, 2) for _ in range(4)]
print(ds_nosig_check(omega, action, probes).summary())

# Conditioning reproduces the quotient of joint by local probability.
conditioned = ds_condition(omega, a)
lhs = ds_local_prob(conditioned, b)
rhs = ds_joint_prob(omega, a, b) / ds_local_prob(omega, a)
print("conditional probe probability:", lhs, "vs quotient:", rhs)

# The tomographic deficit, the reason this composition rule is rejected by
# local observability even though it is perfectly no-signaling.
for d1, d2 in ((2, 2), (2, 3)):
    rank = ds_local_effect_span(d1, d2, samples=8 * (d1 + d2) ** 2)
    print(f"local effect span at ({d1},{d2}): {rank} of {(d1 + d2) ** 2}")
