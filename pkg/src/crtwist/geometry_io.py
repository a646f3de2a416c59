"""Heisenberg projection and chart, dual curves, and file export.

The CR 3-sphere is the null cone of the Hermitian form modulo scalars. Away
from the pole [e3] the Heisenberg projection

    [z] -> (Re z2/z1, Im z2/z1, Re z3/z1)

identifies it with R^3; its inverse is the chart
(x, y, z) -> [1, x + i y, z + (i/2)(x^2 + y^2)].
"""

import csv
import json
from pathlib import Path

import numpy as np

from .errors import CRTwistError, PoleError
from .group import inner

POLE_TOL = 1e-10
SCHEMA_VERSION = 1


def heisenberg_project(z):
    """Project homogeneous points (shape (..., 3)) to R^3."""
    z = np.asarray(z, dtype=complex)
    norm = np.linalg.norm(z, axis=-1)
    if np.any(np.abs(z[..., 0]) < POLE_TOL * norm):
        raise PoleError("point at the pole of the Heisenberg projection")
    w2 = z[..., 1] / z[..., 0]
    w3 = z[..., 2] / z[..., 0]
    return np.stack([w2.real, w2.imag, w3.real], axis=-1)


def heisenberg_chart(x, y, z):
    """Homogeneous null representative [1, x + i y, z + (i/2)(x^2 + y^2)]."""
    x, y, z = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float), np.asarray(z, float))
    return np.stack([np.ones_like(x, dtype=complex), x + 1j * y, z + 0.5j * (x * x + y * y)], axis=-1)


def null_residual(z):
    """|<z, z>| / |z|^2, zero on the sphere."""
    z = np.asarray(z, dtype=complex)
    return np.abs(inner(z, z)) / np.sum(np.abs(z) ** 2, axis=-1)


def normalize_homogeneous(z):
    """Unit Euclidean norm with the first nonzero component real and positive."""
    z = np.asarray(z, dtype=complex)
    z = z / np.linalg.norm(z, axis=-1, keepdims=True)
    mags = np.abs(z)
    k = np.argmax(mags > 1e-12, axis=-1)
    lead = np.take_along_axis(z, k[..., None], axis=-1)
    return z * np.exp(-1j * np.angle(lead))


def projective_distance(p, q):
    """Distance between the lines through p and q.

    Both are scaled to unit norm and q is rotated by the phase that best
    aligns it with p; the result is the Euclidean norm of the difference.
    It vanishes exactly when [p] = [q] and is accurate down to rounding.
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    v = np.vdot(q, p)
    phase = v / abs(v) if abs(v) > 0 else 1.0
    return float(np.linalg.norm(p - phase * q))


def dual_curve(frame_path, s):
    """Dual points [F_3(s)] and the transversality diagnostic -i <F_3, F_3'>.

    Along a Wilczynski frame F_3' = tau F_1 + F_2 + i kappa F_3, so the diagnostic
    equals -tau; the dual is Legendrian exactly where tau vanishes.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    F = frame_path(s)
    F3 = F[:, :, 2]
    tau, _, kappa, _ = frame_path.profile(s)
    dF3 = tau[:, None] * F[:, :, 0] + F[:, :, 1] + (1j * kappa)[:, None] * F3
    diag = (-1j * inner(F3, dF3)).real
    return F3, diag


# ---------------------------------------------------------------------------
# export


def _fmt(x):
    return "%.17g" % x


def write_csv(path, s, xyz, comment=None):
    """Rows ``s,x,y,z`` with a header; reals printed with 17 significant digits.

    An optional ``comment`` is written first as a line starting with ``#``.
    """
    path = Path(path)
    s = np.asarray(s, dtype=float).ravel()
    xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
    try:
        with path.open("w", newline="") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "x", "y", "z"])
            for si, p in zip(s, xyz):
                w.writerow([_fmt(si), _fmt(p[0]), _fmt(p[1]), _fmt(p[2])])
    except OSError as exc:
        raise CRTwistError(f"cannot write {path}: {exc}") from exc
    return path


def read_csv(path):
    """Inverse of write_csv: returns (s, xyz)."""
    path = Path(path)
    try:
        with path.open() as fh:
            rows = list(csv.reader(line for line in fh if not line.startswith("#")))
    except OSError as exc:
        raise CRTwistError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0] != ["s", "x", "y", "z"]:
        raise CRTwistError(f"{path} lacks the s,x,y,z header")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, 4)
    return data[:, 0], data[:, 1:]


def write_obj(path, xyz, closed=False):
    """OBJ file with one ``v`` line per vertex and a single ``l`` polyline."""
    path = Path(path)
    xyz = np.asarray(xyz, dtype=float).reshape(-1, 3)
    lines = [f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}" for p in xyz]
    if len(xyz):
        idx = list(range(1, len(xyz) + 1)) + ([1] if closed else [])
        lines.append("l " + " ".join(map(str, idx)))
    try:
        path.write_text("\n".join(lines) + ("\n" if lines else ""))
    except OSError as exc:
        raise CRTwistError(f"cannot write {path}: {exc}") from exc
    return path


def to_jsonable(obj):
    """Convert numpy scalars/arrays, complex numbers and fractions for json.dump."""
    from fractions import Fraction

    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def write_json(path, report):
    """Write a report with a schema_version field; float fields round-trip exactly."""
    path = Path(path)
    body = {"schema_version": SCHEMA_VERSION}
    body.update(to_jsonable(report))
    try:
        path.write_text(json.dumps(body, indent=2, sort_keys=False) + "\n")
    except OSError as exc:
        raise CRTwistError(f"cannot write {path}: {exc}") from exc
    return path


def invariants_block(inv):
    """The ``invariants`` JSON block of a CurveInvariants result."""
    return {
        "spin": inv.numbers.spin_label,
        "wave_number": int(inv.numbers.wave_number),
        "turning": int(inv.turning),
        "trace": int(inv.trace),
    }


def export_curve(out_dir, stem, s, points, report=None, closed=False, comment=None):
    """Write ``stem.csv``, ``stem.obj`` and (if given) ``stem.json`` into ``out_dir``.

    Points are normalised homogeneous coordinates before projection, so the
    files are identical across runs.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CRTwistError(f"cannot create {out}: {exc}") from exc
    pts = normalize_homogeneous(points) if len(points) else np.zeros((0, 3), complex)
    xyz = heisenberg_project(pts) if len(pts) else np.zeros((0, 3))
    files = {
        "csv": write_csv(out / f"{stem}.csv", s, xyz, comment),
        "obj": write_obj(out / f"{stem}.obj", xyz, closed),
    }
    if report is not None:
        files["json"] = write_json(out / f"{stem}.json", report)
    return files, xyz
