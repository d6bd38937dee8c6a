"""Rational quadratic Bezier triangles and their boundary conic arcs.

Control points and weights are indexed by ``(i, j, k)`` with ``i + j + k = 2``,
the exponents of ``u``, ``v`` and ``w``. Every constructor and serializer uses
the fixed order ``002, 011, 020, 101, 110, 200``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from .errors import DegenerateConic, InvalidNet, InvalidScale, PoleEncountered
from .projective import DEFAULT_TOL

INDEX_ORDER: Tuple[str, ...] = ("002", "011", "020", "101", "110", "200")

_MULTI = {key: tuple(int(ch) for ch in key) for key in INDEX_ORDER}
_BINOM = {key: factorial(2) // (factorial(i) * factorial(j) * factorial(k))
          for key, (i, j, k) in _MULTI.items()}

# boundary label -> (p0, p1, p2) indices; the arc parameter runs from p0 to p2
BOUNDARY = {
    "u": ("002", "011", "020"),
    "v": ("002", "101", "200"),
    "w": ("020", "110", "200"),
}


def _collinear(a, b, c, tol) -> bool:
    e1 = b - a
    e2 = c - a
    return np.linalg.norm(np.cross(e1, e2)) <= tol * np.linalg.norm(e1) * np.linalg.norm(e2)


@dataclass(frozen=True)
class BarycentricParam:
    """Barycentric parameter; ``w`` is always ``1 - u - v``."""

    u: float
    v: float

    @property
    def w(self) -> float:
        return 1.0 - self.u - self.v

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.u, self.v, self.w


class ControlNet:
    """Six control points and six nonzero weights of a quadratic triangle."""

    __slots__ = ("_points", "_weights")

    def __init__(self, points: Mapping[str, Sequence[float]], weights: Mapping[str, float],
                 tol: float = DEFAULT_TOL):
        missing = [f"points.{k}" for k in INDEX_ORDER if k not in points]
        missing += [f"weights.{k}" for k in INDEX_ORDER if k not in weights]
        extra = [k for k in list(points) + list(weights) if k not in _MULTI]
        if missing:
            raise InvalidNet(f"missing control-net entries: {', '.join(missing)}")
        if extra:
            raise InvalidNet(f"unknown index keys: {', '.join(sorted(set(extra)))}")

        pts = {}
        for k in INDEX_ORDER:
            p = np.array(points[k], dtype=float)
            if p.shape != (3,) or not np.all(np.isfinite(p)):
                raise InvalidNet(f"points.{k} must be three finite numbers")
            p.setflags(write=False)
            pts[k] = p
        wts = {}
        for k in INDEX_ORDER:
            wk = float(weights[k])
            if not np.isfinite(wk):
                raise InvalidNet(f"weights.{k} must be finite")
            if wk == 0.0:
                raise InvalidNet(f"weights.{k}: zero weight")
            wts[k] = wk

        corners = [pts["002"], pts["020"], pts["200"]]
        if any(np.array_equal(corners[a], corners[b]) for a, b in ((0, 1), (0, 2), (1, 2))):
            raise InvalidNet("corner points 002, 020, 200 must be pairwise distinct")
        if _collinear(*corners, tol):
            raise InvalidNet("corner points 002, 020, 200 are collinear")
        self._points = pts
        self._weights = wts

    @classmethod
    def from_lists(cls, points: Sequence[Sequence[float]], weights: Sequence[float],
                   tol: float = DEFAULT_TOL) -> "ControlNet":
        """Build from sequences in the fixed index order."""
        if len(points) != 6 or len(weights) != 6:
            raise InvalidNet("expected six points and six weights")
        return cls(dict(zip(INDEX_ORDER, points)), dict(zip(INDEX_ORDER, weights)), tol=tol)

    @property
    def points(self) -> Dict[str, np.ndarray]:
        return dict(self._points)

    @property
    def weights(self) -> Dict[str, float]:
        return dict(self._weights)

    def point(self, key: str) -> np.ndarray:
        return self._points[key]

    def weight(self, key: str) -> float:
        return self._weights[key]

    def point_array(self) -> np.ndarray:
        return np.array([self._points[k] for k in INDEX_ORDER])

    def weight_array(self) -> np.ndarray:
        return np.array([self._weights[k] for k in INDEX_ORDER])

    @property
    def P(self) -> np.ndarray:
        return self._points["002"]

    @property
    def Q(self) -> np.ndarray:
        return self._points["020"]

    @property
    def R(self) -> np.ndarray:
        return self._points["200"]

    def with_weights(self, weights) -> "ControlNet":
        if not isinstance(weights, Mapping):
            weights = dict(zip(INDEX_ORDER, weights))
        return ControlNet(self._points, weights)

    def with_weight(self, key: str, value: float) -> "ControlNet":
        wts = dict(self._weights)
        wts[key] = value
        return ControlNet(self._points, wts)

    def transformed(self, a: np.ndarray, b=None) -> "ControlNet":
        """Apply ``x -> a @ x + b`` to every control point."""
        a = np.asarray(a, dtype=float)
        b = np.zeros(3) if b is None else np.asarray(b, dtype=float)
        return ControlNet({k: a @ p + b for k, p in self._points.items()}, self._weights)

    def scaled_weights(self, lam: float) -> "ControlNet":
        return ControlNet(self._points, {k: lam * w for k, w in self._weights.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, ControlNet):
            return NotImplemented
        return (all(np.array_equal(self._points[k], other._points[k]) for k in INDEX_ORDER)
                and self._weights == other._weights)

    def __repr__(self):
        pts = ", ".join(f"{k}: {self._points[k].tolist()}" for k in INDEX_ORDER)
        wts = ", ".join(f"{k}: {self._weights[k]:g}" for k in INDEX_ORDER)
        return f"ControlNet(points={{{pts}}}, weights={{{wts}}})"


@dataclass(frozen=True)
class ConicArc:
    """Rational quadratic Bezier arc from ``p0`` (t=0) to ``p2`` (t=1)."""

    p0: Tuple[float, float, float]
    p1: Tuple[float, float, float]
    p2: Tuple[float, float, float]
    w0: float
    w1: float
    w2: float
    label: str = ""

    def __post_init__(self):
        if 0.0 in (self.w0, self.w1, self.w2):
            raise InvalidNet(f"arc {self.label or '?'}: zero weight")

    @classmethod
    def make(cls, p0, p1, p2, w0, w1, w2, label: str = "", tol: float = DEFAULT_TOL) -> "ConicArc":
        a, b, c = (np.asarray(p, dtype=float) for p in (p0, p1, p2))
        if _collinear(a, b, c, tol):
            raise DegenerateConic(f"arc {label or '?'}: control polygon is collinear")
        return cls(tuple(a.tolist()), tuple(b.tolist()), tuple(c.tolist()),
                   float(w0), float(w1), float(w2), label)

    @property
    def polygon(self) -> np.ndarray:
        return np.array([self.p0, self.p1, self.p2])

    @property
    def weights(self) -> Tuple[float, float, float]:
        return self.w0, self.w1, self.w2


def evaluate(net: ControlNet, p, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Point of the patch at barycentric parameter ``p``.

    ``p`` may be a :class:`BarycentricParam` or any ``(u, v, w)`` triple; values
    outside the unit triangle are allowed.
    """
    u, v, w = p.as_tuple() if isinstance(p, BarycentricParam) else (float(c) for c in p)
    num = np.zeros(3)
    den = 0.0
    scale = 0.0
    for key, (i, j, k) in _MULTI.items():
        b = _BINOM[key] * net.weight(key) * u ** i * v ** j * w ** k
        num += b * net.point(key)
        den += b
        scale += abs(b)
    if abs(den) <= tol * scale or den == 0.0:
        raise PoleEncountered(f"denominator vanishes at (u, v, w) = ({u}, {v}, {w})")
    return num / den


def boundary_conic(net: ControlNet, which: str, tol: float = DEFAULT_TOL) -> ConicArc:
    """Boundary arc on ``u = 0``, ``v = 0`` or ``w = 0``."""
    try:
        keys = BOUNDARY[which]
    except KeyError:
        raise ValueError(f"boundary must be one of 'u', 'v', 'w', not {which!r}") from None
    return ConicArc.make(*(net.point(k) for k in keys), *(net.weight(k) for k in keys),
                         label=which, tol=tol)


def evaluate_conic(arc: ConicArc, t: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    s = 1.0 - t
    b0 = arc.w0 * s * s
    b1 = 2.0 * arc.w1 * t * s
    b2 = arc.w2 * t * t
    den = b0 + b1 + b2
    if den == 0.0 or abs(den) <= tol * (abs(b0) + abs(b1) + abs(b2)):
        raise PoleEncountered(f"arc {arc.label or '?'}: denominator vanishes at t = {t}")
    return (b0 * np.asarray(arc.p0) + b1 * np.asarray(arc.p1) + b2 * np.asarray(arc.p2)) / den


def mobius_rescale(arc: ConicArc, rho: float) -> ConicArc:
    """Weights ``(rho^2 w0, rho w1, w2)``: same conic, reparametrized.

    A point at parameter ``s`` of the rescaled arc is the point at
    ``s / ((1 - rho) s + rho)`` of the original one.
    """
    if rho == 0.0 or not np.isfinite(rho):
        raise InvalidScale(f"Mobius scale must be finite and nonzero, got {rho}")
    return ConicArc(arc.p0, arc.p1, arc.p2, rho * rho * arc.w0, rho * arc.w1, arc.w2, arc.label)
