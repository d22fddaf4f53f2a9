"""Two-prey / two-predator discrete-time Lotka-Volterra map.

State vectors are ordered ``(x1, x2, X1, X2)``: prey first, predators
second. The map iterated here is the increment form

    x_i <- x_i + x_i * (r_i - k_i x_i - sum_j B[i, j] X_j)
    X_j <- X_j + X_j * (-p_j + sum_i C[j, i] x_i)

whose nondegenerate fixed points solve a 4x4 linear system (see
:mod:`lv4.stability`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

SPECIES = ("x1", "x2", "X1", "X2")
BLOWUP_LIMIT = 1e12
DEFAULT_EXTINCTION_THRESHOLD = 1e-6


class InvalidParametersError(ValueError):
    pass


class ZeroRowError(ValueError):
    """A predator with zero total hunting efficiency cannot be normalized."""


class BlowUpError(ArithmeticError):
    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


def _vec(values, name, size=2):
    out = tuple(float(v) for v in values)
    if len(out) != size:
        raise InvalidParametersError(f"{name} must have {size} entries")
    return out


def _mat(rows, name):
    out = tuple(_vec(row, name) for row in rows)
    if len(out) != 2:
        raise InvalidParametersError(f"{name} must be 2x2")
    return out


def _flat(m):
    return [v for row in m for v in row]


@dataclass(frozen=True)
class EcoParams:
    """Ecological parameterization of the two-prey / two-predator model.

    Attributes
    ----------
    r : growth rate per prey.
    K : carrying capacity per prey; ``math.inf`` disables self-inhibition.
    s : search rate per predator.
    p : dependency (decay rate) per predator, in (0, 1).
    E : hunting efficiency, ``E[j][i]`` is predator j on prey i.
    D : adaptation, ``D[i][j]`` is prey i against predator j.
    Q : conversion ratio, ``Q[j][i]`` is predator j eating prey i.
    """

    r: tuple
    K: tuple
    s: tuple
    p: tuple
    E: tuple
    Q: tuple
    D: tuple = ((1.0, 1.0), (1.0, 1.0))

    def __post_init__(self):
        for name in ("r", "K", "s", "p"):
            object.__setattr__(self, name, _vec(getattr(self, name), name))
        for name in ("E", "D", "Q"):
            object.__setattr__(self, name, _mat(getattr(self, name), name))

        finite = [*self.r, *self.s, *self.p, *_flat(self.E), *_flat(self.D), *_flat(self.Q)]
        if not all(math.isfinite(v) for v in finite):
            raise InvalidParametersError("parameters must be finite (only K may be infinite)")
        if any(math.isnan(v) for v in self.K):
            raise InvalidParametersError("K must not be NaN")
        if not all(v > 0 for v in self.r):
            raise InvalidParametersError("growth rates r must be > 0")
        if not all(v > 0 for v in self.K):
            raise InvalidParametersError("carrying capacities K must be > 0")
        if not all(v >= 0 for v in self.s):
            raise InvalidParametersError("search rates s must be >= 0")
        if not all(0 < v < 1 for v in self.p):
            raise InvalidParametersError("dependencies p must lie in (0, 1)")
        if not all(v >= 0 for v in _flat(self.E)):
            raise InvalidParametersError("hunting efficiencies E must be >= 0")
        if not all(v > 0 for v in _flat(self.D)):
            raise InvalidParametersError("adaptation coefficients D must be > 0")
        if not all(v > 0 for v in _flat(self.Q)):
            raise InvalidParametersError("conversion ratios Q must be > 0")

    def to_dict(self) -> dict:
        return {
            "r": list(self.r),
            "K": list(self.K),
            "s": list(self.s),
            "p": list(self.p),
            "E": [list(row) for row in self.E],
            "D": [list(row) for row in self.D],
            "Q": [list(row) for row in self.Q],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EcoParams":
        known = {"r", "K", "s", "p", "E", "D", "Q"}
        extra = set(data) - known
        if extra:
            raise InvalidParametersError(f"unknown parameter fields: {sorted(extra)}")
        missing = {"r", "K", "s", "p", "E", "Q"} - set(data)
        if missing:
            raise InvalidParametersError(f"missing parameter fields: {sorted(missing)}")
        kwargs = dict(data)
        kwargs["K"] = [_capacity(v) for v in data["K"]]
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidParametersError):
                raise
            raise InvalidParametersError(str(exc)) from exc


def _capacity(value):
    if value is None:
        return math.inf
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        raise InvalidParametersError(f"bad carrying capacity {value!r}")
    return value


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class CoeffParams:
    """Coefficients actually iterated by the map.

    ``B[i, j]`` is predation of prey i by predator j, ``C[j, i]`` is
    reproduction of predator j from prey i, and ``k = r / K``.
    """

    r: np.ndarray
    k: np.ndarray
    B: np.ndarray
    C: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("r", "k", "B", "C", "p"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def __eq__(self, other):
        if not isinstance(other, CoeffParams):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, n), getattr(other, n)) for n in ("r", "k", "B", "C", "p")
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {n: getattr(self, n).tolist() for n in ("r", "k", "B", "C", "p")}


def normalized_rows(s, E):
    """Split hunting efficiency into row shares and a total search rate.

    Works on broadcast arrays: ``s`` is ``(..., 2)`` and ``E`` is
    ``(..., 2, 2)``. The second share is written as ``1 - first`` so that
    applying this twice returns the first result bit for bit. Rows with
    zero total are passed through unchanged.
    """
    s = np.asarray(s, dtype=float)
    E = np.asarray(E, dtype=float)
    total = E[..., 0] + E[..., 1]
    zero = total == 0.0
    safe = np.where(zero, 1.0, total)
    first = np.where(zero, E[..., 0], E[..., 0] / safe)
    second = np.where(zero, E[..., 1], 1.0 - first)
    return s * safe, np.stack([first, second], axis=-1)


def coefficients(r, K, s, p, E, D, Q):
    """Broadcasting core of :func:`compile`; returns ``(r, k, B, C, p)`` arrays."""
    r = np.asarray(r, dtype=float)
    K = np.asarray(K, dtype=float)
    D = np.asarray(D, dtype=float)
    Q = np.asarray(Q, dtype=float)
    s_eff, shares = normalized_rows(s, E)
    k = r / K
    shares_t = np.swapaxes(shares, -1, -2)
    B = s_eff[..., None, :] * D * shares_t
    C = s_eff[..., :, None] * Q * np.swapaxes(D, -1, -2) * shares
    return r, k, B, C, np.asarray(p, dtype=float)


def compile(eco: EcoParams) -> CoeffParams:
    """Fold ecological parameters into map coefficients.

    ``B[i][j] = s_j D[i][j] E[j][i]`` and ``C[j][i] = s_j Q[j][i] D[i][j] E[j][i]``.
    Each predator row of E is split into shares and a total before the
    products are formed, which makes the result invariant under
    :func:`normalize` exactly rather than up to rounding.
    """
    r, k, B, C, p = coefficients(eco.r, eco.K, eco.s, eco.p, eco.E, eco.D, eco.Q)
    return CoeffParams(r=r, k=k, B=B, C=C, p=p)


def normalize(eco: EcoParams) -> EcoParams:
    """Rescale so each predator's hunting efficiencies sum to one.

    The row total moves into the search rate: ``E'[j] = E[j] / sum(E[j])``
    and ``s'_j = s_j * sum(E[j])``.
    """
    E = np.asarray(eco.E)
    totals = E.sum(axis=1)
    for j, total in enumerate(totals):
        if not total > 0:
            raise ZeroRowError(f"predator {j + 1} has zero total hunting efficiency")
    s_eff, shares = normalized_rows(eco.s, eco.E)
    return replace(eco, s=tuple(s_eff.tolist()), E=tuple(map(tuple, shares.tolist())))


def _check_state(state) -> np.ndarray:
    x = np.array(state, dtype=float)
    if x.shape != (4,):
        raise ValueError(f"state must have 4 coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)) or np.any(x < 0):
        raise ValueError("state coordinates must be finite and >= 0")
    return x


class _Stepper:
    """Scalar inner loop over Python floats; ~30x faster than numpy for 4-vectors."""

    def __init__(self, c: CoeffParams):
        self.r1, self.r2 = c.r.tolist()
        self.k1, self.k2 = c.k.tolist()
        (self.b11, self.b12), (self.b21, self.b22) = c.B.tolist()
        (self.c11, self.c12), (self.c21, self.c22) = c.C.tolist()
        self.p1, self.p2 = c.p.tolist()

    def __call__(self, x1, x2, y1, y2):
        n1 = x1 + x1 * (self.r1 - self.k1 * x1 - (self.b11 * y1 + self.b12 * y2))
        n2 = x2 + x2 * (self.r2 - self.k2 * x2 - (self.b21 * y1 + self.b22 * y2))
        m1 = y1 + y1 * (-self.p1 + (self.c11 * x1 + self.c12 * x2))
        m2 = y2 + y2 * (-self.p2 + (self.c21 * x1 + self.c22 * x2))
        return n1, n2, m1, m2


def _advance(stepper: _Stepper, state):
    """One generation; returns ``(new_state, clamped_indices)`` or raises BlowUpError."""
    new = stepper(*state)
    for v in new:
        if not (abs(v) <= BLOWUP_LIMIT):
            raise BlowUpError(f"population exceeded {BLOWUP_LIMIT:g}", state=new)
    clamped = tuple(i for i, v in enumerate(new) if v < 0.0)
    if clamped:
        new = tuple(0.0 if v < 0.0 else v for v in new)
    return new, clamped


def step(c: CoeffParams, state) -> np.ndarray:
    """Advance one generation, clamping negative populations to zero.

    Raises
    ------
    BlowUpError
        If any coordinate exceeds ``BLOWUP_LIMIT`` or becomes NaN.
    """
    x = _check_state(state)
    new, _ = _advance(_Stepper(c), tuple(x.tolist()))
    return np.array(new)


@dataclass(frozen=True)
class Event:
    generation: int
    kind: str  # "extinction" or "blowup"
    species: tuple

    def to_dict(self) -> dict:
        return {"generation": self.generation, "kind": self.kind, "species": list(self.species)}


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray  # shape (T + 1, 4)
    events: tuple = ()
    requested_generations: int = 0

    @property
    def generations(self) -> int:
        return len(self.states) - 1

    @property
    def blew_up(self) -> bool:
        return any(e.kind == "blowup" for e in self.events)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def simulate(c: CoeffParams, init, generations: int) -> Trajectory:
    """Iterate the map from ``init`` for ``generations`` steps.

    Clamps are logged as extinction events. A blow-up ends the run early;
    the offending state is not stored.
    """
    if generations < 0:
        raise ValueError("generations must be >= 0")
    x = tuple(_check_state(init).tolist())
    stepper = _Stepper(c)
    states = [x]
    events = []
    for g in range(1, generations + 1):
        try:
            x, clamped = _advance(stepper, x)
        except BlowUpError as exc:
            bad = tuple(SPECIES[i] for i, v in enumerate(exc.state) if not abs(v) <= BLOWUP_LIMIT)
            events.append(Event(g, "blowup", bad))
            break
        if clamped:
            events.append(Event(g, "extinction", tuple(SPECIES[i] for i in clamped)))
        states.append(x)
    arr = np.array(states, dtype=float)
    arr.setflags(write=False)
    return Trajectory(states=arr, events=tuple(events), requested_generations=generations)


@dataclass(frozen=True)
class PersistenceReport:
    threshold: float
    collapse_generation: int | None
    collapsed_species: tuple
    blew_up: bool
    blowup_generation: int | None
    generations: int

    @property
    def collapsed(self) -> bool:
        return self.collapse_generation is not None

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "collapse_generation": self.collapse_generation,
            "collapsed_species": list(self.collapsed_species),
            "blew_up": self.blew_up,
            "blowup_generation": self.blowup_generation,
            "generations": self.generations,
        }


def persistence(t: Trajectory, extinction_threshold: float = DEFAULT_EXTINCTION_THRESHOLD) -> PersistenceReport:
    if not extinction_threshold > 0:
        raise ValueError("extinction threshold must be > 0")
    below = t.states < extinction_threshold
    hit = np.flatnonzero(below.any(axis=1))
    if hit.size:
        g = int(hit[0])
        species = tuple(SPECIES[i] for i in np.flatnonzero(below[g]))
    else:
        g, species = None, ()
    blowups = [e.generation for e in t.events if e.kind == "blowup"]
    return PersistenceReport(
        threshold=extinction_threshold,
        collapse_generation=g,
        collapsed_species=species,
        blew_up=bool(blowups),
        blowup_generation=blowups[0] if blowups else None,
        generations=t.generations,
    )


@dataclass(frozen=True, eq=False)
class GenericLV:
    """Multiplicative Lotka-Volterra map ``x_i' = x_i (e_i + sum_j A[i, j] x_j)``."""

    e: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        e = _frozen(np.atleast_1d(self.e))
        A = _frozen(np.atleast_2d(self.A))
        n = e.shape[0]
        if not 1 <= n <= 4 or A.shape != (n, n):
            raise InvalidParametersError(f"GenericLV needs 1 <= n <= 4 and A of shape (n, n), got {A.shape}")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(A))):
            raise InvalidParametersError("GenericLV entries must be finite")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "A", A)

    @property
    def dim(self) -> int:
        return self.e.shape[0]


def step_generic(g: GenericLV, state) -> np.ndarray:
    """One multiplicative step; no clamping, negative values pass through."""
    x = np.array(state, dtype=float)
    if x.shape != (g.dim,):
        raise ValueError(f"state must have {g.dim} coordinates")
    n = g.dim
    out = np.empty(n)
    for i in range(n):
        acc = g.e[i]
        for j in range(n):
            acc = acc + g.A[i, j] * x[j]
        out[i] = x[i] * acc
    if not np.all(np.abs(out) <= BLOWUP_LIMIT):
        raise BlowUpError(f"population exceeded {BLOWUP_LIMIT:g}", state=out)
    return out


def multiplicative_form(c: CoeffParams) -> GenericLV:
    """The same coefficients read as the bracketed four-species map.

    ``x1' = x1 (r1 - k1 x1 - B11 X1 - B12 X2)`` and
    ``X1' = X1 (-p1 + C11 x1 + C12 x2)``. This is *not* what
    :func:`step` iterates: ``step`` equals this map with growth terms
    ``1 + r`` and ``1 - p``.
    """
    e = np.concatenate([c.r, -c.p])
    A = np.zeros((4, 4))
    A[0, 0], A[1, 1] = -c.k[0], -c.k[1]
    A[:2, 2:] = -c.B
    A[2:, :2] = c.C
    return GenericLV(e=e, A=A)
