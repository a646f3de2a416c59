"""From a pair of rational quantum numbers to a closed critical curve.

1. differential evolution finds the modulus with (P1, P3) = (-2/15, -10/21);
2. the twist and phases are integrated and the curve is put in standard configuration;
3. turning number and trace are measured as winding numbers;
4. the curve is exported to CSV and OBJ through the Heisenberg projection.

Run:  python3 demos/02_closed_curve.py [out_dir]
"""

import sys
from fractions import Fraction

from crtwist import closure, geometry_io, invariants, quadrature, reconstruction

Q1, Q3 = Fraction(-2, 15), Fraction(-10, 21)


def main(out_dir="demo_output"):
    cfg = closure.SearchConfig(rect=(1.83, 1.86, 0.65, 0.75), seed=7)
    res = closure.search_modulus(float(Q1), float(Q3), cfg)
    c = res.modulus
    print(f"search: delta = {res.delta:.2e} after {res.generations} generations at p = {res.point}")
    print(f"modulus c = ({c.c1:.10f}, {c.c2:.10f})")

    P = quadrature.quantum_integrals(c).values
    q2 = closure.rationalize(P[1], 2000, 1e-8)
    print(f"closing integrals P = {tuple(round(p, 10) for p in P)}, P2 = {q2}")

    config = reconstruction.standard_configuration(c)
    print(f"half period {config.omega:.6f}, polarization {config.polarization} (eps = {config.eps})")

    inv = invariants.curve_invariants(config, Q1, Q3, q2)
    print(f"spin {inv.numbers.spin_label}, wave number {inv.numbers.wave_number}, "
          f"turning {inv.turning}, trace {inv.trace} (linking with the z-axis {inv.linking})")
    print(f"closure gap after {inv.numbers.wave_number} periods: {inv.closure_distance:.1e}")

    sampler = invariants.PeriodSampler(config, 512)
    n = inv.numbers.wave_number
    files, _ = geometry_io.export_curve(out_dir, "curve", sampler.s(n), sampler.points(n),
                                        {"invariants": geometry_io.invariants_block(inv)},
                                        closed=True, comment="seed=7")
    for kind, path in files.items():
        print(f"wrote {kind}: {path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
