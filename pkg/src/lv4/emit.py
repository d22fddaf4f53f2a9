"""File emitters: CSV, JSON and binary PPM, all written atomically.

Floats are written with ``repr``, the shortest string that round-trips
(never more than 17 significant digits), so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .lvmap import SPECIES, Trajectory
from .stability import StabilityGrid, Stability

STABLE_RGB = (255, 0, 0)
BLANK_RGB = (255, 255, 255)
GRAY_TOP = 200  # gray level at rho = 1; rho >= 2 maps to 0


def fmt(value) -> str:
    value = float(value)
    if math.isnan(value):
        return "nan"
    return repr(value)


def atomic_write(path, data: bytes | str) -> Path:
    """Write via a temp file in the target directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, allow_nan=False) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write(path, dumps(obj))


def trajectory_csv(t: Trajectory) -> str:
    lines = ["generation," + ",".join(SPECIES)]
    for g, row in enumerate(t.states.tolist()):
        lines.append(f"{g}," + ",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def grid_csv(grid: StabilityGrid) -> str:
    lines = ["h1,h2,class,rho"]
    for h1, h2, kind, rho in grid.rows():
        lines.append(f"{fmt(h1)},{fmt(h2)},{kind.label},{fmt(rho)}")
    return "\n".join(lines) + "\n"


def heatmap_pixels(grid: StabilityGrid) -> np.ndarray:
    """RGB image of shape (N, N, 3); image row 0 is the largest h2.

    Stable cells are red, unstable positive cells are gray with level
    ``200 * (2 - min(rho, 2))`` (darker means more unstable; rho is
    clipped below at 1), everything else is white.
    """
    n = grid.resolution
    # cell (i, j) -> pixel (row n-1-j, column i)
    kind = grid.kind.T[::-1]
    rho = grid.spectral_radius.T[::-1]
    img = np.empty((n, n, 3), dtype=np.uint8)
    img[...] = BLANK_RGB
    unstable = kind == Stability.UNSTABLE
    level = np.clip(np.nan_to_num(rho, nan=2.0), 1.0, 2.0)
    gray = np.rint(GRAY_TOP * (2.0 - level)).astype(np.uint8)
    img[unstable] = gray[unstable, None]
    img[kind == Stability.STABLE] = STABLE_RGB
    return img


def ppm_bytes(img: np.ndarray) -> bytes:
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(img, dtype=np.uint8).tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    """Parse a binary P6 pixmap as written by :func:`ppm_bytes`."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a P6 pixmap")
    w, h = (int(v) for v in parts[1].split())
    if int(parts[2]) != 255:
        raise ValueError("only maxval 255 is supported")
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
