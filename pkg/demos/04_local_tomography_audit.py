"""Informational completeness and the local observability audit.

Builds minimal IC observables (point observables classically, the
tetrahedral POVM for a qubit, a fiducial-orbit POVM for a qutrit), expands
arbitrary effects in them, and then asks for each composition rule whether
jointly measured local IC observables can be IC for the composite.  The
answer separates the tensor product (yes, and the affine dimension identity
follows) from the direct sum (no).
"""

import numpy as np

from optheory import (
    ClassicalBipartite,
    DSumBipartite,
    Effect,
    QuantumBipartite,
    QuantumModel,
    affine_dims,
    dimension_identity_check,
    expand_in_ic,
    ic_rank,
    minimal_ic_observable,
)
from optheory.tomography import audit_rows

qubit = QuantumModel(2)

# Minimal informationally complete observable for a qubit: 4 effects, rank 4.
sic = minimal_ic_observable(qubit)
cert = ic_rank(sic)
print("qubit IC observable:", len(sic), "effects, rank", cert.rank, "minimal:", cert.minimal)

# Any effect expands in it; the unit effect has coefficients (1, 1, 1, 1).
coeffs = expand_in_ic(qubit.unit_effect(), sic)
print("unit effect coefficients:", np.round(coeffs, 12))
plus = Effect(qubit, np.array([[0.5, 0.5], [0.5, 0.5]]))
print("|+><+| coefficients:", np.round(expand_in_ic(plus, sic), 6))

# Affine dimensions: states always one below effects.
for model in (qubit, QuantumModel(3)):
    print(f"{model.name}: adm(states), dim(effects) =", affine_dims(model))

# The audit across the three composition rules.
print()
for row in audit_rows(2, 2, seed=0):
    verdict = "pass" if row["lop_pass"] else f"FAIL {row['lop_rank']}/{row['lop_ambient']}"
    print(f"{row['model']:<16} adm(S)={row['adm_states']:<3} local observability: {verdict}")

# Where the audit passes, the composite affine dimension is pinned exactly.
for bip in (QuantumBipartite(2, 2), QuantumBipartite(2, 3), ClassicalBipartite(2, 2)):
    rep = dimension_identity_check(bip)
    d = rep.details
    print(
        f"{bip.joint.name}: adm = {d['adm_joint']} = "
        f"{d['adm_left']}*{d['adm_right']}+{d['adm_left']}+{d['adm_right']}"
    )

# Where it fails, the identity fails with it.
rep = dimension_identity_check(DSumBipartite(2, 2))
print(
    f"{rep.details['adm_joint']} != {rep.details['formula']} for the direct sum",
    "(expected failure)" if rep.ok else "(unexpected)",
)
