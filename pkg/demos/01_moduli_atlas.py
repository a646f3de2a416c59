"""Walk through the moduli plane: roots, orbit types and curve classes.

Run:  python3 demos/01_moduli_atlas.py
"""

import numpy as np

from crtwist import moduli, quadrature

PROBES = [(-2, 1), (1 / 6, 8), (1 / 6, -8), (-6, -9), (4, -9), (0, 5), (0, -9)]


def describe(c):
    cl = moduli.classify(c)
    roots = moduli.quintic_roots(c)
    mom = moduli.momentum_eigenvalues(c)
    line = (f"c = ({c[0]:+.4f}, {c[1]:+.4f})  phase {cl.phase}  {mom.kind}  region {cl.region or '-':5s}"
            f"  classes {', '.join(cl.curve_classes) or '-'}")
    print(line)
    print("    real roots", np.array2string(np.asarray(roots.real_roots), precision=5),
          "multiplicities", list(roots.multiplicities))
    if cl.phase == "B":
        print(f"    half period of the bounded cycle  omega = {quadrature.half_period(c):.6f}")
    elif cl.phase == "A":
        print(f"    escape time of the unbounded cycle  = {quadrature.escape_time(c):.6f}")


if __name__ == "__main__":
    for c in PROBES:
        describe(c)
    print()
    print("The separatrix between one and three real roots passes through")
    for t in (np.pi / 4, np.pi / 2, 2.0):
        x, y = moduli.separatrix(t)
        print(f"    t = {t:.4f}:  ({x:+.5f}, {y:+.5f})")
