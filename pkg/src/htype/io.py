"""File formats: algebra JSON, trajectory CSV with a JSON sidecar, atomic writes."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .algebra import AlgebraSpecError, HTypeAlgebra
from .geodesics import Trajectory


def atomic_write(path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def load_algebra(path) -> HTypeAlgebra:
    """Read an algebra from JSON; malformed input raises :class:`AlgebraSpecError`."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise AlgebraSpecError("<json>", f"not valid JSON ({exc.msg} at line {exc.lineno})") from None
    return HTypeAlgebra.from_dict(data)


def save_algebra(alg: HTypeAlgebra, path) -> None:
    atomic_write(path, dumps(alg.to_dict()))


def trajectory_csv(traj: Trajectory) -> str:
    n, m = traj.x.shape[1], traj.t.shape[1]
    header = ["s"] + [f"x{i + 1}" for i in range(n)] + [f"t{a + 1}" for a in range(m)]
    lines = [",".join(header)]
    for s, x, t in zip(traj.s, traj.x, traj.t):
        lines.append(",".join("%.17g" % val for val in (s, *x, *t)))
    return "\n".join(lines) + "\n"


def trajectory_sidecar(traj: Trajectory, **extra) -> dict:
    return {
        "regime": traj.regime.value,
        "theta2": traj.theta2,
        "v0": [float(c) for c in traj.v0],
        "theta": [float(c) for c in traj.theta],
        "samples": int(len(traj.s)),
        **extra,
    }


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_trajectory(traj: Trajectory, path, **extra) -> Path:
    """Write the CSV at ``path`` and the sidecar next to it; returns the sidecar path."""
    side = sidecar_path(path)
    atomic_write(path, trajectory_csv(traj))
    atomic_write(side, dumps(trajectory_sidecar(traj, **extra)))
    return side


def read_trajectory_csv(path):
    """Return ``(header, rows)`` with rows as a float array."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
