"""Fixed points, linearization and stability diagrams.

The classification pipeline is written once over stacked arrays
(:func:`classify_arrays`) and reused for single parameter sets and whole
grids, so a diagram cell and a direct :func:`classify` call on the same
coefficients agree bit for bit.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import smallmat
from .lvmap import CoeffParams, EcoParams, coefficients

STABILITY_MARGIN = 1e-9
EQUILIBRIUM_RTOL = 1e-8
DEFAULT_RESOLUTION = 200


class NotAFixedPointError(ValueError):
    pass


class Stability(enum.IntEnum):
    NO_UNIQUE_FIXED_POINT = 0
    NON_POSITIVE = 1
    STABLE = 2
    UNSTABLE = 3

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def from_label(cls, label: str) -> "Stability":
        for member, name in _LABELS.items():
            if name == label:
                return member
        raise ValueError(f"unknown stability class {label!r}")


_LABELS = {
    Stability.NO_UNIQUE_FIXED_POINT: "NoUniqueFixedPoint",
    Stability.NON_POSITIVE: "NonPositive",
    Stability.STABLE: "Stable",
    Stability.UNSTABLE: "Unstable",
}


@dataclass(frozen=True, eq=False)
class FixedPointReport:
    exists: bool
    point: np.ndarray | None
    positive: bool

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "point": None if self.point is None else self.point.tolist(),
            "positive": self.positive,
        }


@dataclass(frozen=True, eq=False)
class EigenReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    converged: bool = True


@dataclass(frozen=True, eq=False)
class Classification:
    kind: Stability
    fixed_point: FixedPointReport
    eigen: EigenReport | None = None

    @property
    def warning(self) -> str | None:
        if self.eigen is not None and not self.eigen.converged:
            return "eigenvalue iteration did not converge; classified Unstable"
        return None

    @property
    def spectral_radius(self) -> float | None:
        return None if self.eigen is None else self.eigen.spectral_radius


def _system(k, B, C):
    """Stacked 4x4 matrices of the zero-increment equations."""
    shape = np.broadcast_shapes(k.shape[:-1], B.shape[:-2], C.shape[:-2])
    M = np.zeros(shape + (4, 4))
    M[..., 0, 0] = k[..., 0]
    M[..., 1, 1] = k[..., 1]
    M[..., :2, 2:] = B
    M[..., 2:, :2] = C
    return M


def fixed_points(r, k, B, C, p):
    """Stacked nondegenerate fixed points; returns ``(points, exists)``."""
    r, k, B, C, p = (np.asarray(a, dtype=float) for a in (r, k, B, C, p))
    inv, singular = smallmat.try_invert(_system(k, B, C))
    rhs = np.concatenate(np.broadcast_arrays(r, p), axis=-1)
    return smallmat.matvec(inv, rhs), ~singular


def fixed_point(c: CoeffParams) -> FixedPointReport:
    """Solve the zero-increment conditions for the interior equilibrium.

    ``exists`` is False when the 4x4 system is singular; ``positive``
    additionally requires every coordinate to be strictly positive.
    """
    points, exists = fixed_points(c.r, c.k, c.B, c.C, c.p)
    if not bool(exists):
        return FixedPointReport(exists=False, point=None, positive=False)
    point = np.array(points)
    point.setflags(write=False)
    return FixedPointReport(exists=True, point=point, positive=bool(np.all(point > 0)))


def jacobians(k, B, C, x):
    """Stacked Jacobians of the map at equilibria ``x`` (no residual check)."""
    J = np.zeros(x.shape[:-1] + (4, 4))
    J[..., 0, 0] = 1.0 - k[..., 0] * x[..., 0]
    J[..., 1, 1] = 1.0 - k[..., 1] * x[..., 1]
    J[..., :2, 2:] = -B * x[..., :2, None]
    J[..., 2:, :2] = C * x[..., 2:, None]
    J[..., 2, 2] = 1.0
    J[..., 3, 3] = 1.0
    return J


def equilibrium_residual(c: CoeffParams, x) -> float:
    """Largest relative violation of the zero-increment conditions at ``x``."""
    x = np.asarray(x, dtype=float)
    prey, pred = x[:2], x[2:]
    predation = c.B * pred
    growth = c.r - c.k * prey - predation.sum(axis=1)
    scale = np.abs(c.r) + np.abs(c.k * prey) + np.abs(predation).sum(axis=1)
    gain = c.C * prey
    net = -c.p + gain.sum(axis=1)
    pscale = np.abs(c.p) + np.abs(gain).sum(axis=1)
    rel = np.concatenate([np.abs(growth) / scale, np.abs(net) / pscale])
    return float(rel.max())


def jacobian(c: CoeffParams, fp) -> np.ndarray:
    """Jacobian of the map at a nondegenerate fixed point.

    Uses the equilibrium conditions to simplify the diagonal, so it is
    only valid at a fixed point.

    Raises
    ------
    NotAFixedPointError
        If the relative equilibrium residual at ``fp`` exceeds 1e-8.
    """
    x = np.asarray(fp, dtype=float)
    if x.shape != (4,) or not np.all(np.isfinite(x)):
        raise NotAFixedPointError("fixed point must be a finite 4-vector")
    residual = equilibrium_residual(c, x)
    if not residual <= EQUILIBRIUM_RTOL:
        raise NotAFixedPointError(f"equilibrium residual {residual:.3g} exceeds {EQUILIBRIUM_RTOL:g}")
    return jacobians(c.k, c.B, c.C, x)


def classify_arrays(r, k, B, C, p):
    """Classify a stack of coefficient sets.

    Returns a dict of arrays over the stack: ``kind`` (Stability codes),
    ``points``, ``exists``, ``eigenvalues`` (NaN where not computed),
    ``spectral_radius`` (NaN unless a positive fixed point exists) and
    ``converged``.
    """
    r, k, B, C, p = (np.asarray(a, dtype=float) for a in (r, k, B, C, p))
    points, exists = fixed_points(r, k, B, C, p)
    positive = exists & np.all(points > 0, axis=-1)
    shape = exists.shape

    eig = np.full(shape + (4,), np.nan + 0j)
    rho = np.full(shape, np.nan)
    converged = np.ones(shape, dtype=bool)
    if np.any(positive):
        sel = positive
        J = jacobians(
            np.broadcast_to(k, shape + (2,))[sel],
            np.broadcast_to(B, shape + (2, 2))[sel],
            np.broadcast_to(C, shape + (2, 2))[sel],
            points[sel],
        )
        roots, ok, _ = smallmat.try_poly_roots(smallmat.char_poly(J))
        eig[sel] = roots
        rho[sel] = np.max(np.abs(roots), axis=-1)
        converged[sel] = ok

    kind = np.full(shape, int(Stability.NO_UNIQUE_FIXED_POINT), dtype=np.int8)
    kind[exists] = Stability.NON_POSITIVE
    stable = positive & converged & (rho < 1.0 - STABILITY_MARGIN)
    kind[positive] = Stability.UNSTABLE
    kind[stable] = Stability.STABLE
    return {
        "kind": kind,
        "points": points,
        "exists": exists,
        "eigenvalues": eig,
        "spectral_radius": rho,
        "converged": converged,
    }


def classify(c: CoeffParams) -> Classification:
    """Fixed point, Jacobian spectrum and stability verdict in one pass.

    Stable means a positive fixed point whose Jacobian has spectral radius
    below ``1 - STABILITY_MARGIN``. If the eigenvalue iteration fails the
    verdict is Unstable and the report carries a warning.
    """
    out = classify_arrays(c.r, c.k, c.B, c.C, c.p)
    kind = Stability(int(out["kind"]))
    if not bool(out["exists"]):
        return Classification(kind, FixedPointReport(False, None, False))
    point = np.array(out["points"])
    point.setflags(write=False)
    fp = FixedPointReport(True, point, bool(np.all(point > 0)))
    if kind == Stability.NON_POSITIVE:
        return Classification(kind, fp)
    eigen = EigenReport(
        eigenvalues=np.array(out["eigenvalues"]),
        spectral_radius=float(out["spectral_radius"]),
        converged=bool(out["converged"]),
    )
    return Classification(kind, fp, eigen)


def grid_centres(resolution: int) -> np.ndarray:
    return (np.arange(resolution) + 0.5) / resolution


@dataclass(frozen=True, eq=False)
class StabilityGrid:
    """Classification of the (h1, h2) square, ``kind[i, j]`` at ``(h[i], h[j])``.

    ``h1`` is predator 1's share of effort on prey 1 and ``h2`` is
    predator 2's share on prey 2.
    """

    resolution: int
    h: np.ndarray
    kind: np.ndarray
    spectral_radius: np.ndarray
    converged: np.ndarray

    def cell(self, i: int, j: int) -> tuple[Stability, float]:
        return Stability(int(self.kind[i, j])), float(self.spectral_radius[i, j])

    def count(self, kind: Stability) -> int:
        return int(np.count_nonzero(self.kind == kind))

    def rows(self):
        """Yield ``(h1, h2, kind, rho)`` in row-major (i, j) order."""
        for i in range(self.resolution):
            for j in range(self.resolution):
                yield float(self.h[i]), float(self.h[j]), Stability(int(self.kind[i, j])), float(
                    self.spectral_radius[i, j]
                )


def efficiency_grid(h1, h2) -> np.ndarray:
    """Normalized hunting efficiencies ``[[h1, 1 - h1], [1 - h2, h2]]``, stacked."""
    h1, h2 = np.broadcast_arrays(np.asarray(h1, float), np.asarray(h2, float))
    E = np.empty(h1.shape + (2, 2))
    E[..., 0, 0] = h1
    E[..., 0, 1] = 1.0 - h1
    E[..., 1, 0] = 1.0 - h2
    E[..., 1, 1] = h2
    return E


def _classify_rows(template: EcoParams, h: np.ndarray, rows: np.ndarray):
    h1 = h[rows][:, None]
    h2 = h[None, :]
    E = efficiency_grid(h1, h2)
    r, k, B, C, p = coefficients(template.r, template.K, template.s, template.p, E, template.D, template.Q)
    out = classify_arrays(r, k, B, C, p)
    return out["kind"], out["spectral_radius"], out["converged"]


def diagram(template: EcoParams, resolution: int = DEFAULT_RESOLUTION, workers: int = 1, chunk_rows: int = 25) -> StabilityGrid:
    """Sweep the normalized hunting-efficiency square.

    Every cell replaces the template's E with ``[[h1, 1-h1], [1-h2, h2]]``
    at cell centres ``(i + 0.5) / N``. Rows are processed in chunks, in
    parallel when ``workers > 1``; each cell is computed independently so
    the chunking never changes the output.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    h = grid_centres(resolution)
    chunks = [np.arange(a, min(a + chunk_rows, resolution)) for a in range(0, resolution, chunk_rows)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda rows: _classify_rows(template, h, rows), chunks))
    else:
        parts = [_classify_rows(template, h, rows) for rows in chunks]
    kind = np.concatenate([p[0] for p in parts])
    rho = np.concatenate([p[1] for p in parts])
    converged = np.concatenate([p[2] for p in parts])
    for arr in (h, kind, rho, converged):
        arr.setflags(write=False)
    return StabilityGrid(resolution, h, kind, rho, converged)


def cell_params(template: EcoParams, h1: float, h2: float) -> EcoParams:
    """The EcoParams a diagram evaluates at one (h1, h2) sample."""
    E = efficiency_grid(h1, h2)
    return replace(template, E=tuple(map(tuple, E.tolist())))
