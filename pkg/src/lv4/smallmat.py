"""Dense linear algebra for small real matrices.

Every routine accepts a single matrix of shape ``(n, n)`` or a stack of
shape ``(..., n, n)``. Stacks are processed with elementwise array
operations only (no BLAS, no reductions whose summation order depends on
the memory layout), so the answer for any one matrix is bit-identical no
matter how many other matrices share the call.

Eigenvalues are computed as roots of the characteristic polynomial
(Faddeev-LeVerrier trace recursion followed by Durand-Kerner iteration).
That route is only sensible for n <= 8, which is all this module allows.
"""

from __future__ import annotations

import numpy as np

MIN_DIM = 2
MAX_DIM = 8

SINGULAR_RTOL = 1e-12
ROOT_STEP_RTOL = 1e-13
MAX_ITERATIONS = 1000
REAL_SNAP_TOL = 1e-9
SEED_ANGLE = 0.4

_EPS = np.finfo(float).eps
# |p(z)| below this many ulps of sum|a_k||z|^k counts as an exact root
_RESIDUAL_ULPS = 8.0
# cluster detection radius for multiple roots; eps**(1/8) ~ 0.011
_CLUSTER_RADIUS = 0.05
_CLUSTER_ULPS = 128.0
_CLUSTER_SCREEN = 1e-8


class SingularMatrixError(ArithmeticError):
    """Raised when elimination meets a pivot that is numerically zero."""


class NoConvergenceError(ArithmeticError):
    """Durand-Kerner hit its iteration cap.

    The best iterate and the polynomial residuals at it are kept on the
    exception so callers can still inspect (or use) them.
    """

    def __init__(self, message, roots, residuals):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


def as_matrix(m) -> np.ndarray:
    """Validate and convert to a float array of shape ``(..., n, n)``."""
    arr = np.array(m, dtype=float)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {arr.shape}")
    n = arr.shape[-1]
    if not MIN_DIM <= n <= MAX_DIM:
        raise ValueError(f"matrix dimension {n} outside [{MIN_DIM}, {MAX_DIM}]")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return arr


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Stacked matrix product with a fixed left-to-right summation order."""
    n = a.shape[-1]
    out = a[..., :, 0, None] * b[..., None, 0, :]
    for k in range(1, n):
        out = out + a[..., :, k, None] * b[..., None, k, :]
    return out


def matvec(a: np.ndarray, v: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    out = a[..., :, 0] * v[..., None, 0]
    for k in range(1, n):
        out = out + a[..., :, k] * v[..., None, k]
    return out


def trace(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    out = a[..., 0, 0]
    for i in range(1, n):
        out = out + a[..., i, i]
    return out


def _identity_like(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    return np.broadcast_to(np.eye(n), a.shape).copy()


def try_invert(m) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Jordan inversion with partial pivoting, without raising.

    Returns ``(inverse, singular)`` where ``singular`` is a boolean array
    over the stack. Singular entries of the inverse are NaN. A matrix is
    singular when some pivot falls below ``SINGULAR_RTOL`` times the
    largest initial row norm (infinity norm of the rows).
    """
    a = as_matrix(m).copy()
    inv = _identity_like(a)
    threshold = SINGULAR_RTOL * np.max(np.abs(a), axis=(-2, -1))
    singular = np.zeros(a.shape[:-2], dtype=bool)

    with np.errstate(all="ignore"):
        inv, singular = _eliminate(a, inv, threshold, singular)
    inv[singular] = np.nan
    return inv, singular


def _eliminate(a, inv, threshold, singular):
    n = a.shape[-1]
    batch = a.shape[:-2]
    for col in range(n):
        piv = col + np.argmax(np.abs(a[..., col:, col]), axis=-1)
        order = np.broadcast_to(np.arange(n), batch + (n,)).copy()
        np.put_along_axis(order, piv[..., None], col, axis=-1)
        order[..., col] = piv
        a = np.take_along_axis(a, order[..., :, None], axis=-2)
        inv = np.take_along_axis(inv, order[..., :, None], axis=-2)

        pivot = a[..., col, col]
        # written so that a zero pivot against a zero threshold still counts
        singular |= ~(np.abs(pivot) > threshold)
        pivot = np.where(singular, 1.0, pivot)
        a[..., col, :] = a[..., col, :] / pivot[..., None]
        inv[..., col, :] = inv[..., col, :] / pivot[..., None]

        factors = a[..., :, col].copy()
        factors[..., col] = 0.0
        a = a - factors[..., :, None] * a[..., None, col, :]
        inv = inv - factors[..., :, None] * inv[..., None, col, :]
    return inv, singular


def invert(m) -> np.ndarray:
    """Inverse of a (stack of) small matrices.

    Raises
    ------
    SingularMatrixError
        If any matrix in the stack has no numerically reliable inverse.
    """
    inv, singular = try_invert(m)
    if np.any(singular):
        raise SingularMatrixError("matrix is singular to working precision")
    return inv


def char_poly(m) -> np.ndarray:
    """Coefficients of det(lambda*I - m), lowest degree first.

    The result has shape ``(..., n + 1)`` and its last coefficient is
    exactly 1.
    """
    a = as_matrix(m)
    n = a.shape[-1]
    eye = _identity_like(a)
    coeffs = np.zeros(a.shape[:-2] + (n + 1,))
    coeffs[..., n] = 1.0
    mk = np.zeros_like(a)
    for k in range(1, n + 1):
        mk = matmul(a, mk) + coeffs[..., n - k + 1, None, None] * eye
        coeffs[..., n - k] = -trace(matmul(a, mk)) / k
    return coeffs


def polyval(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Horner evaluation; ``coeffs`` lowest degree first, broadcast over roots."""
    n = coeffs.shape[-1] - 1
    out = np.broadcast_to(coeffs[..., n, None], z.shape).astype(z.dtype)
    for k in range(n - 1, -1, -1):
        out = out * z + coeffs[..., k, None]
    return out


def _derivative(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[-1] - 1
    return coeffs[..., 1:] * np.arange(1, n + 1)


def _as_poly(p) -> np.ndarray:
    c = np.array(p, dtype=float)
    if c.ndim < 1 or c.shape[-1] < 2:
        raise ValueError("polynomial must have degree >= 1")
    if not np.all(np.isfinite(c)):
        raise ValueError("polynomial coefficients must be finite")
    if np.any(c[..., -1] == 0.0):
        raise ValueError("leading coefficient must be nonzero")
    return c / c[..., -1:]


def durand_kerner(p, max_iter: int = MAX_ITERATIONS):
    """Raw simultaneous iteration on monic-normalized ``p``.

    Returns ``(roots, converged, residuals)``. An element stops updating
    as soon as either every per-root step is below
    ``ROOT_STEP_RTOL * (1 + |z|)`` or every residual is at rounding level.
    Stopped elements are frozen, so batching does not change any result.
    """
    a = _as_poly(p)
    n = a.shape[-1] - 1
    batch = a.shape[:-1]
    radius = 1.0 + np.max(np.abs(a[..., :n]), axis=-1)
    angles = 2.0 * np.pi * np.arange(n) / n + SEED_ANGLE
    z = radius[..., None] * np.exp(1j * angles)
    abs_a = np.abs(a)

    active = np.ones(batch, dtype=bool)
    pz = polyval(a, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(max_iter):
            bound = _RESIDUAL_ULPS * n * _EPS * polyval(abs_a, np.abs(z))
            exact = np.all(np.abs(pz) <= bound, axis=-1)
            active &= ~exact
            if not np.any(active):
                break

            denom = np.ones_like(z)
            for j in range(n):
                diff = z - z[..., j, None]
                diff[..., j] = 1.0
                denom = denom * diff
            denom = np.where(denom == 0, _EPS, denom)
            step = pz / denom
            z_new = z - step

            z = np.where(active[..., None], z_new, z)
            small = np.all(np.abs(step) < ROOT_STEP_RTOL * (1.0 + np.abs(z)), axis=-1)
            pz = polyval(a, z)
            active &= ~small
            if not np.any(active):
                break

    return z, ~active, np.abs(pz)


def _merge_clusters(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Collapse clusters that are numerically one multiple root.

    Durand-Kerner only reaches ~eps**(1/m) accuracy at an m-fold root,
    while the (m - 1)th derivative has a well-conditioned simple root
    there. The cluster centroid is polished by Newton on that derivative
    and the cluster is merged when p and its first m - 1 derivatives all
    vanish at the polished point to within rounding error.
    """
    z = z.copy()
    n = z.shape[-1]
    gap = np.abs(z[..., :, None] - z[..., None, :])
    gap[..., np.arange(n), np.arange(n)] = np.inf
    near = gap < _CLUSTER_RADIUS * (1.0 + np.abs(z[..., :, None]))
    # cheap screen: p at the midpoint of two distinct roots d apart is ~d**2,
    # while inside a rounding-induced cluster it stays near rounding level
    mid = 0.5 * (z[..., :, None] + z[..., None, :])
    mid_val = np.abs(polyval(a[..., None, :], mid))
    mid_bound = _CLUSTER_SCREEN * polyval(np.abs(a)[..., None, :], np.abs(mid))
    near &= mid_val <= mid_bound
    candidates = np.argwhere(np.any(near, axis=(-2, -1)).reshape(-1))
    flat_z = z.reshape(-1, n)
    flat_a = a.reshape(-1, n + 1)
    flat_near = near.reshape(-1, n, n)
    for (idx,) in candidates:
        roots = flat_z[idx]
        coeffs = flat_a[idx]
        seen = np.zeros(n, dtype=bool)
        for start in range(n):
            if seen[start]:
                continue
            members = [start]
            seen[start] = True
            frontier = [start]
            while frontier:
                cur = frontier.pop()
                for nxt in np.flatnonzero(flat_near[idx, cur] & ~seen):
                    seen[nxt] = True
                    members.append(nxt)
                    frontier.append(nxt)
            if len(members) < 2:
                continue
            m = len(members)
            centre = complex(np.mean(roots[members]))
            # an m-fold root is a simple root of the (m-1)th derivative
            top = coeffs
            for _ in range(m - 1):
                top = _derivative(top)
            slope = _derivative(top)
            with np.errstate(all="ignore"):
                for _ in range(8):
                    f = polyval(top, np.array([centre]))[0]
                    df = polyval(slope, np.array([centre]))[0]
                    nxt = centre - f / df if df != 0 else centre
                    if not np.isfinite(nxt) or nxt == centre:
                        break
                    centre = complex(nxt)
            deriv = coeffs
            is_multiple = True
            for _ in range(m):
                val = abs(polyval(deriv, np.array([centre]))[0])
                bound = _CLUSTER_ULPS * _EPS * polyval(np.abs(deriv), np.array([abs(centre)]))[0]
                if val > bound:
                    is_multiple = False
                    break
                deriv = _derivative(deriv)
            if is_multiple:
                roots[members] = centre
        flat_z[idx] = roots
    return flat_z.reshape(z.shape)


def _enforce_conjugates(z: np.ndarray) -> np.ndarray:
    """Snap near-real roots to the axis and symmetrize conjugate pairs."""
    re, im = z.real.copy(), z.imag.copy()
    im[np.abs(im) < REAL_SNAP_TOL] = 0.0
    z = re + 1j * im
    n = z.shape[-1]
    upper = im > 0
    lower = im < 0
    # distance between z_i and conj(z_j), restricted to upper/lower pairs
    dist = np.abs(z[..., :, None] - np.conj(z[..., None, :]))
    dist = np.where(upper[..., :, None] & lower[..., None, :], dist, np.inf)
    best_lower = np.argmin(dist, axis=-1)
    best_upper = np.argmin(dist, axis=-2)
    idx = np.arange(n)
    has_match = np.isfinite(np.min(dist, axis=-1))
    back = np.take_along_axis(best_upper, best_lower, axis=-1)
    mutual = upper & has_match & (back == idx)
    partner = np.take_along_axis(z, best_lower, axis=-1)
    avg = 0.5 * (z + np.conj(partner))
    out = np.where(mutual, avg, z)
    # write conj(avg) into the partner slots
    flat_out = out.reshape(-1, n)
    flat_mutual = mutual.reshape(-1, n)
    flat_partner = best_lower.reshape(-1, n)
    flat_avg = avg.reshape(-1, n)
    rows, cols = np.nonzero(flat_mutual)
    flat_out[rows, flat_partner[rows, cols]] = np.conj(flat_avg[rows, cols])
    return flat_out.reshape(z.shape)


def _order(z: np.ndarray) -> np.ndarray:
    keys = np.lexsort((-z.imag, -z.real, -np.abs(z)), axis=-1)
    return np.take_along_axis(z, keys, axis=-1)


def try_poly_roots(p, max_iter: int = MAX_ITERATIONS):
    """Roots of real polynomials without raising on non-convergence.

    Returns ``(roots, converged, residuals)``. Roots are sorted by
    decreasing modulus, then real part, then imaginary part.
    """
    a = _as_poly(p)
    z, converged, _ = durand_kerner(a, max_iter=max_iter)
    z = _merge_clusters(a, z)
    z = _enforce_conjugates(z)
    z = _order(z)
    return z, converged, np.abs(polyval(a, z))


def poly_roots(p, max_iter: int = MAX_ITERATIONS) -> np.ndarray:
    """All complex roots of a real polynomial given lowest degree first.

    Raises
    ------
    NoConvergenceError
        If the iteration cap is reached for any polynomial in the stack.
    """
    z, converged, residuals = try_poly_roots(p, max_iter=max_iter)
    if not np.all(converged):
        raise NoConvergenceError(
            f"Durand-Kerner did not converge in {max_iter} iterations", z, residuals
        )
    return z


def eigenvalues(m) -> np.ndarray:
    return poly_roots(char_poly(m))


def spectral_radius(m) -> np.ndarray | float:
    rho = np.max(np.abs(eigenvalues(m)), axis=-1)
    return float(rho) if np.ndim(rho) == 0 else rho
