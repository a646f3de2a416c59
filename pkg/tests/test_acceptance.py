"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary; ``python3 tests/test_acceptance.py`` prints the same lines directly.
"""

import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE, EXAMPLE_POINT, random_general_moduli  # noqa: E402

from crtwist import closure, dynamics, moduli, quadrature, reconstruction  # noqa: E402
from crtwist.geometry_io import projective_distance  # noqa: E402
from crtwist.invariants import curve_invariants  # noqa: E402


def _record(k, checks, elapsed, bound):
    """checks: list of (name, ok, detail). Adds the runtime check and stores the line."""
    checks = list(checks) + [("runtime", elapsed < bound, f"{elapsed:.2f}s < {bound:g}s")]
    failed = [f"{n} ({d})" for n, ok, d in checks if not ok]
    ok = not failed
    detail = "; ".join(f"{n}: {d}" for n, _, d in checks) if ok else "failed " + "; ".join(failed)
    ACCEPTANCE[k] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    return ok, detail


def _close(a, b, tol):
    return bool(np.all(np.abs(np.asarray(a, float) - np.asarray(b, float)) <= tol))


# ---------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    expected_roots = {
        (-2.0, 1.0): (-2.44175, -0.9904, 2.87645),
        (1 / 6, 8.0): (-2.14118, -0.448099, 0.0701938),
        (1 / 6, -8.0): (0.12498, 0.250656, 2.15383),
    }
    checks = []
    for c, exp in expected_roots.items():
        got = moduli.quintic_roots(c).real_roots
        ok = len(got) == 3 and _close(got, exp, 1e-4)
        checks.append((f"roots{c}", ok, np.array2string(np.asarray(got), precision=6)))
    phases = {(-2, 1): "B", (1 / 6, 8): "B", (1 / 6, -8): "B", (-6, -9): "A", (4, -9): "A"}
    got = {c: moduli.classify(c).phase for c in phases}
    checks.append(("phases", got == phases, "".join(got.values())))
    return _record(1, checks, time.perf_counter() - t0, 1.0)


def criterion_2():
    t0 = time.perf_counter()
    checks = []
    c_psi = closure.psi("minus", 1.84438, 0.719473)
    c_ref = (-0.828424, -8.349418)
    err = np.abs(np.array(tuple(c_psi)) - c_ref)
    checks.append(("psi(1.84438, 0.719473)", bool(np.all(err <= 1e-5)),
                   f"({c_psi.c1:.6f}, {c_psi.c2:.6f}), error {err.max():.1e}"))
    # downstream quantities of the stated example modulus
    c = moduli.Modulus(*c_ref)
    roots = moduli.quintic_roots(c).real_roots
    checks.append(("roots", _close(roots, (-0.931924, -0.678034, 2.79051), 1e-4),
                   np.array2string(np.asarray(roots), precision=6)))
    lam = moduli.momentum_eigenvalues(c).real
    checks.append(("eigenvalues", _close(lam, (-2.40462, 0.40614, 1.99848), 1e-4),
                   np.array2string(lam, precision=5)))
    omega = quadrature.half_period(c)
    checks.append(("omega", abs(omega - 0.732307) <= 1e-5, f"{omega:.7f}"))
    P = quadrature.quantum_integrals(c).values
    ok = abs(P[0] + 2 / 15) <= 1e-6 and abs(P[2] + 10 / 21) <= 1e-6
    checks.append(("P1,P3", ok, f"({P[0]:.8f}, {P[2]:.8f})"))
    return _record(2, checks, time.perf_counter() - t0, 10.0)


def criterion_3(seed=0):
    t0 = time.perf_counter()
    cfg = closure.SearchConfig(rect=(1.83, 1.86, 0.65, 0.75), seed=seed, refine=False)
    a = closure.search_modulus(-2 / 15, -10 / 21, cfg)
    b = closure.search_modulus(-2 / 15, -10 / 21, cfg)
    dp = float(np.hypot(a.point[0] - 1.84438, a.point[1] - 0.719473))
    checks = [
        ("delta", a.delta <= 1e-6, f"{a.delta:.2e} after {a.generations} generations"),
        ("point", dp <= 1e-3, f"({a.point[0]:.6f}, {a.point[1]:.6f}), distance {dp:.1e}"),
        ("deterministic", a.point == b.point and a.delta == b.delta, f"seed {seed}"),
    ]
    return _record(3, checks, time.perf_counter() - t0, 300.0)


def _conservation(c):
    prof = dynamics.twist_profile(c, "B'1")
    path = dynamics.integrate_frame(prof)
    s = np.linspace(0.0, 4 * prof.omega, 401)
    tau, dtau, kappa, _ = prof(s)
    cons = float(np.max(np.abs(1.5 * tau**2 * dtau**2 - c.P(tau))))
    bend = float(np.max(np.abs(kappa * tau**2 - c.c1)) / abs(c.c1))
    herm, det = path.group_residual(s)
    drift = path.momentum_drift(s[::4])
    Q = -np.array(c.cubic, dtype=float)
    cp = max(float(np.max(np.abs(dynamics.charpoly(prof.lax(si)) - Q))) for si in s[::20])
    eig = float(np.max(reconstruction.eigen_sections(prof, s[:201]).eigen_residual(c.c1)))
    return {"conservation": (cons, 1e-9), "kappa tau^2": (bend, 1e-10), "G": (max(herm, det), 1e-7),
            "momentum drift": (drift, 1e-7), "charpoly": (cp, 1e-8), "L y = lambda y": (eig, 1e-8)}


def criterion_4(count=20, seed=2024):
    t0 = time.perf_counter()
    worst = {}
    for c in random_general_moduli(count, seed):
        for name, (val, tol) in _conservation(c).items():
            if name not in worst or val > worst[name][0]:
                worst[name] = (val, tol)
    checks = [(n, v < tol, f"{v:.1e} < {tol:g}") for n, (v, tol) in worst.items()]
    return _record(4, checks, time.perf_counter() - t0, 600.0)


def _reconstruction_gap(c):
    prof = dynamics.twist_profile(c, "B'1")
    config = reconstruction.standard_configuration(c, prof)
    path = dynamics.integrate_frame(prof)
    A, _ = reconstruction.align_to_standard(config, path)
    s = np.linspace(0.0, 4 * prof.omega, 161)
    integrated = path(s)[:, :, 0] @ A.T
    closed = config.points(s)
    return max(projective_distance(p, q) for p, q in zip(integrated, closed))


def criterion_5(count=5, seed=7):
    t0 = time.perf_counter()
    moduli_list = [closure.psi("minus", *EXAMPLE_POINT)] + random_general_moduli(count, seed)
    gaps = [_reconstruction_gap(c) for c in moduli_list]
    checks = [("example", gaps[0] < 1e-6, f"{gaps[0]:.1e}"),
              (f"{count} random", max(gaps[1:]) < 1e-6, f"max {max(gaps[1:]):.1e}")]
    return _record(5, checks, time.perf_counter() - t0, 300.0)


TABLE = [
    ((Fraction(-2, 15), Fraction(-10, 21)), (35, -50, 12)),
    ((Fraction(-3, 10), Fraction(-9, 25)), (50, -18, 3)),
    ((Fraction(-1, 5), Fraction(-3, 7)), (35, -15, 8)),
    ((Fraction(5, 49), Fraction(-4, 7)), (49, -28, 33)),
    ((Fraction(-7, 36), Fraction(-23, 54)), (108, -46, 25)),
]


def criterion_6():
    t_all = time.perf_counter()
    checks = []
    slowest = 0.0
    for (q1, q3), expected in TABLE:
        t0 = time.perf_counter()
        (ts, ss, _), _ = closure.screen_grid(float(q1), float(q3))
        p, d = closure.refine_modulus(float(q1), float(q3), (ts, ss))
        c = closure.psi("minus", *p)
        P = quadrature.quantum_integrals(c).values
        q2 = closure.rationalize(P[1], 2000, 1e-8)
        config = reconstruction.standard_configuration(c)
        inv = curve_invariants(config, q1, q3, q2)
        got = (inv.numbers.wave_number, inv.turning, inv.trace)
        slowest = max(slowest, time.perf_counter() - t0)
        ok = (got == expected and config.eps in inv.matching_branch and inv.closure_distance < 1e-5)
        checks.append((f"({q1}, {q3})", ok,
                       f"{got}, closure {inv.closure_distance:.1e}, eps {config.eps}"))
    checks.append(("per curve", slowest < 120.0, f"slowest {slowest:.2f}s"))
    return _record(6, checks, time.perf_counter() - t_all, 600.0)


def criterion_7():
    t0 = time.perf_counter()
    c = closure.psi("minus", *EXAMPLE_POINT)
    prof = dynamics.twist_profile(c, "B'1")
    path = dynamics.integrate_frame(prof)
    mono = dynamics.monodromy(path)
    P = np.array(quadrature.quantum_integrals(c).values)
    # phases are in turns: arg(mu) / 2 pi against P_j, both reduced mod 1
    target = np.sort(dynamics.wrap_phase(P))
    got = np.sort(mono.phases)
    err = float(2 * np.pi * np.max(np.abs(dynamics.wrap_phase(got - target))))
    M = mono.matrix
    mom = path.momentum(0.0)
    comm = float(np.abs(M @ mom - mom @ M).max() / np.abs(mom).max())
    checks = [("phases", err < 1e-5, f"error {err:.1e}"), ("commutator", comm < 1e-6, f"{comm:.1e}")]
    return _record(7, checks, time.perf_counter() - t0, 60.0)


def criterion_8(h=1e-4):
    t0 = time.perf_counter()
    t, s = 2.0, 0.5

    def P13(t, s):
        v = closure.pmap("minus", t, s)
        return np.array([v.P[0], v.P[2]])

    dt = (P13(t + h, s) - P13(t - h, s)) / (2 * h)
    ds = (P13(t, s + h) - P13(t, s - h)) / (2 * h)
    signs = np.sign([dt[0], dt[1], ds[0], ds[1]])
    ok = bool(np.all(signs == [1, -1, -1, -1]))
    detail = f"dP1/dt {dt[0]:+.3f}, dP3/dt {dt[1]:+.3f}, dP1/ds {ds[0]:+.4f}, dP3/ds {ds[1]:+.4f}"
    return _record(8, [("signs", ok, detail)], time.perf_counter() - t0, 30.0)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 9)])
def test_criterion(criterion):
    ok, detail = criterion()
    assert ok, detail


if __name__ == "__main__":
    results = [crit()[0] for crit in CRITERIA]
    sys.exit(0 if all(results) else 1)
