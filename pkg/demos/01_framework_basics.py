"""States as probability rules, Bayes conditioning, and coarse-graining.

Walks the operational framework on the simplest concrete theory: a
classical bit, where states are probability 2-vectors and transformations
are substochastic matrices.
"""

import numpy as np

from optheory import (
    Action,
    ClassicalModel,
    add_coexistent,
    complement,
    compose,
    condition,
    effect_of,
    prob,
    scale,
    total_of_action,
)

model = ClassicalModel(2)

# A state assigns each transformation its probability of occurring.
omega = model.state([0.2, 0.8])
damp = model.transformation(np.diag([0.5, 0.25]), "damp")
print("omega =", omega.payload)
print("P(damp occurs) =", prob(omega, damp))  # 0.2*0.5 + 0.8*0.25 = 0.3

# Conditioning is Bayes' rule; evolution of states IS conditioning.
after = condition(omega, damp)
print("omega | damp =", after.payload)  # (0.1, 0.2)/0.3

# Probabilities chain through sequential composition.
flip = model.transformation([[0.0, 1.0], [1.0, 0.0]], "flip")
chain = prob(condition(omega, damp), flip) * prob(omega, damp)
direct = prob(omega, compose(damp, flip))
print("Bayes chain:", chain, "== direct:", direct)

# Coarse-graining adds coexistent transformations; an action is a complete
# set of alternatives, and its total is deterministic.
p0 = model.transformation(np.diag([1.0, 0.0]), "read0")
p1 = model.transformation(np.diag([0.0, 1.0]), "read1")
readout = Action([p0, p1])
certain = total_of_action(readout)
print("P(total of readout) =", prob(omega, certain))

either = add_coexistent(scale(0.5, p0), scale(0.5, p1))
print("P(fair coin over outcomes) =", prob(omega, either))

# Every sub-unit transformation can be completed to an action.
partial = model.transformation(np.diag([0.3, 0.7]), "partial")
rest = complement(partial)
print("effect of complement =", effect_of(rest).payload)  # (0.7, 0.3)
print("completes to certainty:", prob(omega, total_of_action(Action([partial, rest]))))
