"""Image of the closing map (t, s) -> (P1, P3) on the two branches.

The minus branch contains every published closed curve; the image never
reaches (0, 0), which is why a search for that target reports failure.

Run:  python3 demos/03_quantum_map.py
"""

import numpy as np

from crtwist import closure


def summarize(branch, n=12):
    lo, hi = closure.branch_interval(branch)
    ts = np.linspace(lo, hi, n + 2)[1:-1]
    ss = np.linspace(0, 1, n + 2)[1:-1]
    rows = closure.pmap_grid(branch, ts, ss)
    good = np.array([v.pair for v in rows if not v.exceptional])
    bad = sum(v.exceptional for v in rows)
    print(f"{branch:5s}  t in ({lo:.5f}, {hi:.5f})  {len(good)} samples, {bad} exceptional")
    print(f"       P1 in [{good[:, 0].min():+.3f}, {good[:, 0].max():+.3f}]"
          f"  P3 in [{good[:, 1].min():+.3f}, {good[:, 1].max():+.3f}]")


if __name__ == "__main__":
    print(f"contact point of the separatrix with the discriminant curve: {closure.CONTACT_POINT}")
    print(f"reached at t' = {closure.contact_parameter():.12f}")
    for branch in ("minus", "plus"):
        summarize(branch)
