"""Text format for centroid sets.

One header line followed by ``k`` rows of ``n`` comma-separated values::

    pedcc-points v1, k=3, n=4, provenance=analytic-recursive, seed=none
    0.0000000000000000e+00,...

Values carry 17 significant digits, enough to round-trip any float64.
"""
import re

import numpy as np

from pedcc.generator import PedccSet

MAGIC = "pedcc-points v1"
_HEADER = re.compile(
    r"^pedcc-points v1, k=(\d+), n=(\d+), provenance=([^,\s]+), seed=(none|\d+)$"
)


class PointFileError(ValueError):
    """Malformed or truncated point-set file."""


def format_point_set(pedcc):
    seed = "none" if pedcc.seed is None else str(pedcc.seed)
    lines = [f"{MAGIC}, k={pedcc.k}, n={pedcc.n}, provenance={pedcc.provenance}, seed={seed}"]
    for row in pedcc.points:
        lines.append(",".join(f"{x:.16e}" for x in row))
    return "\n".join(lines) + "\n"


def parse_point_set(text):
    lines = text.splitlines()
    if not lines:
        raise PointFileError("empty file")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise PointFileError(f"bad header: {lines[0][:80]!r}")
    k, n = int(m.group(1)), int(m.group(2))
    provenance = m.group(3)
    seed = None if m.group(4) == "none" else int(m.group(4))
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != k:
        raise PointFileError(f"header says k={k} rows, found {len(body)}")
    points = np.empty((k, n))
    for i, ln in enumerate(body):
        fields = ln.split(",")
        if len(fields) != n:
            raise PointFileError(f"row {i} has {len(fields)} values, expected n={n}")
        try:
            points[i] = [float(x) for x in fields]
        except ValueError as exc:
            raise PointFileError(f"row {i}: {exc}") from None
    try:
        return PedccSet(points, provenance, seed)
    except ValueError as exc:
        raise PointFileError(f"invalid point set: {exc}") from None


def write_point_set(path, pedcc):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_point_set(pedcc))


def read_point_set(path):
    with open(path, encoding="ascii") as fh:
        return parse_point_set(fh.read())
