"""CHSH landmarks: 2 (classical) < 2*sqrt(2) (singlet) < 4 (no-signaling).

No-signaling alone does not pin down quantum statistics: the extremal
no-signaling table beats every quantum strategy while keeping all marginals
perfectly local.
"""

import numpy as np

from optheory import (
    OPTIMAL_CHSH_ANGLES,
    chsh_value,
    classical_chsh_max,
    is_nosignaling_box,
    pr_box,
    singlet_box,
)


def show(name, box):
    print(f"{name}: CHSH = {chsh_value(box):.10f}, "
          f"no-signaling: {is_nosignaling_box(box, tol=1e-10)}")
    for x in range(2):
        for y in range(2):
            row = " ".join(f"{box.p(a, b, x, y):5.3f}" for a in range(2) for b in range(2))
            print(f"  settings (x={x}, y={y}): p(ab) = {row}")


print("classical maximum over all 16 deterministic strategies:", classical_chsh_max())
print()

quantum = singlet_box(OPTIMAL_CHSH_ANGLES)
show("singlet at optimal angles", quantum)
print("  equals 2*sqrt(2) up to", abs(chsh_value(quantum) - 2 * np.sqrt(2)))
print()

show("extremal no-signaling box", pr_box())
print()
print(
    "ordering:",
    classical_chsh_max(),
    "<",
    round(chsh_value(quantum), 6),
    "<",
    chsh_value(pr_box()),
)
