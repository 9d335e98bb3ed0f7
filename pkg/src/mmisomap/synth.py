"""Synthetic multi-manifold datasets and CSV input/output.

Random draws come from numpy's PCG64 bit generator seeded through
``SeedSequence``.  Only the raw 64-bit stream is used, mapped to doubles as
``(x >> 11) * 2**-53``, so samples do not depend on numpy's distribution code.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import CsvFormatError


@dataclass(frozen=True)
class PointSet:
    """``coords`` is ``(n, D)``; ``labels`` optionally holds ids ``1..M``."""

    coords: np.ndarray
    labels: np.ndarray = None

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=float)
        if coords.ndim != 2:
            raise ValueError("coords must be a 2-D array")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coords must be finite")
        object.__setattr__(self, "coords", coords)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=int)
            if labels.shape != (len(coords),):
                raise ValueError("one label per point required")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.coords.shape[0]

    @property
    def dim(self):
        return self.coords.shape[1]

    @property
    def n_labels(self):
        return 0 if self.labels is None else len(np.unique(self.labels))


class UniformStream:
    """Uniform doubles in ``[0, 1)`` from a seeded PCG64 stream."""

    def __init__(self, seed):
        self._bitgen = np.random.PCG64(np.random.SeedSequence(seed))

    def random(self, size):
        raw = self._bitgen.random_raw(size)
        return (raw >> np.uint64(11)).astype(float) * 2.0 ** -53

    def uniform(self, low, high, size):
        return low + (high - low) * self.random(size)


def _swiss_coords(t, height):
    return np.column_stack([t * np.cos(t), height, t * np.sin(t)])


def gen_two_strips(N, seed=0):
    """Two strips of one Swiss-roll sheet separated in height (``N`` even)."""
    if N < 2 or N % 2:
        raise ValueError(f"two-strips needs an even N >= 2, got {N}")
    rng = UniformStream(seed)
    t = (math.pi / 6) * (1 + 2 * rng.random(N))
    z = np.concatenate([rng.uniform(1, 10, N // 2), rng.uniform(16, 25, N // 2)])
    labels = np.repeat([1, 2], N // 2)
    return PointSet(_swiss_coords(t, z), labels)


def gen_strip_and_disc(N, seed=0):
    """Two angular bands of the same sheet at full height (``N`` even)."""
    if N < 2 or N % 2:
        raise ValueError(f"strip-disc needs an even N >= 2, got {N}")
    rng = UniformStream(seed)
    t = np.concatenate([rng.uniform(math.pi * 11 / 12, math.pi * 14 / 12, N // 2),
                        rng.uniform(math.pi * 16 / 12, math.pi * 19 / 12, N // 2)])
    z = rng.uniform(1, 25, N)
    labels = np.repeat([1, 2], N // 2)
    return PointSet(_swiss_coords(t, z), labels)


def gen_three_strips(N, seed=0):
    """Three rectangles on a Swiss roll: ``N/4``, ``N/4`` and ``N/2`` points."""
    if N < 4 or N % 4:
        raise ValueError(f"three-strips needs N divisible by 4, got {N}")
    q = N // 4
    rng = UniformStream(seed)
    t1 = rng.uniform(math.pi * 5 / 6, math.pi * 16 / 12, q)
    t2 = rng.uniform(math.pi * 18 / 12, math.pi * 12 / 6, q)
    t3 = (5 * math.pi / 6) * (1 + 7 / 5 * rng.random(N // 2))
    c1 = rng.uniform(-1, 3, q)
    c2 = rng.uniform(-1, 3, q)
    c3 = rng.uniform(6, 10, N // 2)
    coords = np.vstack([_swiss_coords(t1, c1), _swiss_coords(t2, c2), _swiss_coords(t3, c3)])
    labels = np.concatenate([np.full(q, 1), np.full(q, 2), np.full(N // 2, 3)])
    return PointSet(coords, labels)


GENERATORS = {
    "two-strips": gen_two_strips,
    "strip-disc": gen_strip_and_disc,
    "three-strips": gen_three_strips,
}


def sheet_parameter(coords):
    """Recover the roll parameter ``t`` as the radius in the (x, third) plane."""
    coords = np.asarray(coords, dtype=float)
    return np.hypot(coords[:, 0], coords[:, 2])


def save_csv(path, coords, labels=None):
    """Write points (and optional integer labels) with a ``# dim=D labels=0|1`` header."""
    coords = np.asarray(coords, dtype=float)
    if coords.ndim != 2:
        raise ValueError("coords must be a 2-D array")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# dim={coords.shape[1]} labels={0 if labels is None else 1}\n")
        for i, row in enumerate(coords):
            fields = [format(float(v), ".17g") for v in row]
            if labels is not None:
                fields.append(str(int(labels[i])))
            fh.write(",".join(fields) + "\n")


def _parse_header(line):
    opts = {}
    for token in line.lstrip("#").split():
        key, sep, value = token.partition("=")
        if sep:
            opts[key.strip()] = value.strip()
    try:
        dim = int(opts["dim"]) if "dim" in opts else None
        has_labels = opts.get("labels", "0") == "1"
    except ValueError as exc:
        raise CsvFormatError(f"bad header line: {line.strip()!r}") from exc
    return dim, has_labels


def load_csv(path):
    """Read a point CSV written by :func:`save_csv` (header optional)."""
    dim, has_labels = None, False
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, record in enumerate(csv.reader(fh), start=1):
            if not record or all(not f.strip() for f in record):
                continue
            if record[0].lstrip().startswith("#"):
                if rows or lineno != 1:
                    raise CsvFormatError(f"row {lineno}: header must be the first line")
                dim, has_labels = _parse_header(",".join(record))
                continue
            rows.append((lineno, record))
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    width = len(rows[0][1])
    expected = None if dim is None else dim + int(has_labels)
    if expected is not None and width != expected:
        raise CsvFormatError(f"row {rows[0][0]}: expected {expected} fields, got {width}")
    coords = np.empty((len(rows), width - int(has_labels)))
    labels = np.empty(len(rows), dtype=int) if has_labels else None
    for r, (lineno, record) in enumerate(rows):
        if len(record) != width:
            raise CsvFormatError(f"row {lineno}: expected {width} fields, got {len(record)}")
        try:
            values = [float(f) for f in record[:coords.shape[1]]]
            if has_labels:
                labels[r] = int(record[-1])
        except ValueError as exc:
            raise CsvFormatError(f"row {lineno}: non-numeric field") from exc
        coords[r] = values
    if not np.all(np.isfinite(coords)):
        raise CsvFormatError(f"{path}: non-finite value")
    return PointSet(coords, labels)


def load_matrix(path):
    """Read a plain numeric CSV (for example a geodesic distance matrix)."""
    return load_csv(path).coords
