"""Projective primitives: homogeneous points, plane forms and symmetric 4x4 forms.

Every tolerance here is relative. A quantity is treated as zero when it is
below ``tol`` times the natural magnitude of the inputs it was computed from.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence, Tuple

import numpy as np

from .errors import DegenerateConfiguration, NormalizationSingular, NotInPlane

DEFAULT_TOL = 1e-9

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class HPoint:
    """Homogeneous point ``(x, y, z, h)``; ``h == 0`` marks a point at infinity."""

    x: float
    y: float
    z: float
    h: float = 1.0

    def __post_init__(self):
        for name in ("x", "y", "z", "h"):
            object.__setattr__(self, name, float(getattr(self, name)) + 0.0)
        if not any(self.coords):
            raise DegenerateConfiguration("homogeneous point with all-zero coordinates")

    @classmethod
    def point(cls, p: Sequence[float]) -> "HPoint":
        x, y, z = (float(c) for c in p)
        return cls(x, y, z, 1.0)

    @classmethod
    def direction(cls, d: Sequence[float]) -> "HPoint":
        x, y, z = (float(c) for c in d)
        return cls(x, y, z, 0.0)

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "HPoint":
        return cls(*(float(c) for c in a))

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.h])

    @property
    def xyz(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def is_infinite(self) -> bool:
        return self.h == 0.0

    def affine(self) -> np.ndarray:
        """Cartesian coordinates of a finite point."""
        if self.is_infinite:
            raise DegenerateConfiguration("point at infinity has no affine coordinates")
        return self.xyz / self.h

    def dehomogenized(self) -> "HPoint":
        if self.is_infinite:
            return self
        return HPoint.point(self.affine())

    def equals(self, other: "HPoint", tol: float = DEFAULT_TOL) -> bool:
        """Projective equality: the coordinate vectors are parallel."""
        return projective_sine(self.coords, other.coords) < tol


@dataclass(frozen=True)
class AffineForm:
    """The linear form ``a*x + b*y + c*z + d*h``."""

    a: float
    b: float
    c: float
    d: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)) + 0.0)
        if self.a == 0.0 and self.b == 0.0 and self.c == 0.0:
            raise DegenerateConfiguration("linear form with zero normal does not define a plane")

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "AffineForm":
        return cls(*(float(c) for c in a))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c])

    def __call__(self, p) -> float:
        return evaluate_form(self, p)

    def scaled(self, k: float) -> "AffineForm":
        return AffineForm.from_array(k * self.coeffs)

    def parallel_to(self, other: "AffineForm", tol: float = DEFAULT_TOL) -> bool:
        return projective_sine(self.coeffs, other.coeffs) < tol


class SymForm4:
    """Symmetric bilinear form on homogeneous 4-vectors.

    The matrix is stored read-only. Instances are built from :func:`sym_product`,
    sums and scalar multiples of those, or :meth:`from_matrix`, which
    symmetrizes its argument.
    """

    __slots__ = ("_m",)

    def __init__(self, m: np.ndarray):
        m = np.array(m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_matrix(cls, m) -> "SymForm4":
        return cls(m)

    @classmethod
    def zero(cls) -> "SymForm4":
        return cls(np.zeros((4, 4)))

    @property
    def m(self) -> np.ndarray:
        return self._m

    def __add__(self, other: "SymForm4") -> "SymForm4":
        return SymForm4(self._m + other._m)

    def __mul__(self, k: float) -> "SymForm4":
        return SymForm4(float(k) * self._m)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, SymForm4) and np.array_equal(self._m, other._m)

    def __hash__(self):
        return hash(self._m.tobytes())

    def __repr__(self):
        return f"SymForm4({self._m.tolist()!r})"

    def bilinear(self, x, y) -> float:
        return float(_hvec(x) @ self._m @ _hvec(y))

    def quadratic(self, x) -> float:
        """``C(X, X)``; bare 3-vectors are read as finite points."""
        v = _hvec(x)
        return float(v @ self._m @ v)


def _hvec(p) -> np.ndarray:
    if isinstance(p, HPoint):
        return p.coords
    v = np.asarray(p, dtype=float)
    if v.shape == (3,):
        return np.append(v, 1.0)
    if v.shape == (4,):
        return v
    raise ValueError(f"expected a 3- or 4-vector, got shape {v.shape}")


def _as_hpoint(p) -> HPoint:
    if isinstance(p, HPoint):
        return p
    v = np.asarray(p, dtype=float)
    if v.shape == (3,):
        return HPoint.point(v)
    return HPoint.from_array(v)


def projective_sine(a, b) -> float:
    """Sine of the angle between two coordinate vectors (0 when parallel)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 1.0
    a = a / na
    b = b / nb
    # |a ^ b| via the Lagrange identity, stable for nearly parallel vectors
    wedge = np.outer(a, b) - np.outer(b, a)
    return float(min(1.0, np.sqrt(0.5 * np.sum(wedge * wedge))))


def plane_through(p1, p2, p3, tol: float = DEFAULT_TOL) -> AffineForm:
    """Form vanishing at three finite, non-collinear points (scale unspecified)."""
    pts = [_as_hpoint(p) for p in (p1, p2, p3)]
    if any(p.is_infinite for p in pts):
        raise DegenerateConfiguration("plane_through needs finite points")
    a, b, c = (p.affine() for p in pts)
    e1 = b - a
    e2 = c - a
    n = np.cross(e1, e2)
    if np.linalg.norm(n) <= tol * np.linalg.norm(e1) * np.linalg.norm(e2):
        raise DegenerateConfiguration(f"points {a}, {b}, {c} are collinear")
    return AffineForm(n[0], n[1], n[2], -float(n @ a))


def evaluate_form(f: AffineForm, p) -> float:
    """``a*x + b*y + c*z + d*h``; on a direction (h = 0) only the linear part acts."""
    return float(f.coeffs @ _hvec(p))


def normalize_form(f: AffineForm, p, tol: float = DEFAULT_TOL) -> AffineForm:
    """Rescale ``f`` so that it takes the value 1 at ``p``."""
    hp = _hvec(p)
    val = float(f.coeffs @ hp)
    if abs(val) <= tol * np.linalg.norm(f.coeffs) * np.linalg.norm(hp):
        raise NormalizationSingular(f"point {hp.tolist()} lies on the plane {f.coeffs.tolist()}")
    # already normalized up to the rounding of the evaluation itself
    if abs(val - 1.0) <= 4 * _EPS * float(np.abs(f.coeffs) @ np.abs(hp)):
        return f
    return f.scaled(1.0 / val)


def intersect_three_planes(u: AffineForm, v: AffineForm, w: AffineForm,
                           tol: float = DEFAULT_TOL) -> HPoint:
    """Common point of three planes, possibly at infinity.

    The null vector of the 3x4 coefficient matrix is formed from its signed
    3x3 minors, which is exact for small integer input.
    """
    a = np.vstack([u.coeffs, v.coeffs, w.coeffs])
    # forms are defined up to scale; power-of-two row scaling is exact and
    # keeps the minors clear of underflow
    _, exp = np.frexp(np.max(np.abs(a), axis=1))
    a = np.ldexp(a, -exp[:, None])
    minors = np.array([
        (-1) ** i * np.linalg.det(np.delete(a, i, axis=1)) for i in range(4)
    ])
    if np.max(np.abs(minors)) <= tol * float(np.prod(np.linalg.norm(a, axis=1))):
        raise DegenerateConfiguration("planes belong to a pencil; no unique common point")
    xyz, h = minors[:3], minors[3]
    if abs(h) < tol * np.linalg.norm(xyz):
        d = xyz / np.max(np.abs(xyz))
        return HPoint.direction(d)
    return HPoint.point(xyz / h)


def barycentric_in_plane(s, p, t, q, tol: float = DEFAULT_TOL) -> Tuple[float, float, float]:
    """Coordinates of ``s`` with respect to the triangle ``(p, t, q)``.

    Finite ``s`` gives an affine combination (sum 1). A direction gives the
    homogeneous solution (sum 0) scaled so its largest entry is 1.

    The 4x3 system is solved on the affine row plus the two coordinate rows
    whose 3x3 block is best conditioned; the dropped row is the in-plane check.
    """
    s = _as_hpoint(s)
    tri = [_as_hpoint(x) for x in (p, t, q)]
    if any(x.is_infinite for x in tri):
        raise DegenerateConfiguration("triangle vertices must be finite")
    verts = np.array([x.affine() for x in tri])
    edge_scale = np.linalg.norm(verts[1] - verts[0]) * np.linalg.norm(verts[2] - verts[0])
    if np.linalg.norm(np.cross(verts[1] - verts[0], verts[2] - verts[0])) <= tol * edge_scale:
        raise DegenerateConfiguration("triangle is degenerate")

    a = np.vstack([verts.T, np.ones(3)])
    rhs = s.dehomogenized().coords

    best = None
    for rows in combinations(range(3), 2):
        idx = list(rows) + [3]
        sub = a[idx]
        cond = np.linalg.cond(sub)
        if best is None or cond < best[0]:
            best = (cond, idx)
    idx = best[1]
    dropped = next(r for r in range(3) if r not in idx)
    coef = np.linalg.solve(a[idx], rhs[idx])

    resid = abs(float(a[dropped] @ coef - rhs[dropped]))
    mag = np.abs(a[dropped]) @ np.abs(coef) + abs(rhs[dropped])
    span = max(np.max(np.abs(verts)), 1.0)
    if resid > tol * max(mag, span * np.max(np.abs(coef))):
        raise NotInPlane(f"point {rhs.tolist()} is off the plane of the triangle (residual {resid:.3g})")

    if s.is_infinite:
        coef = coef / coef[np.argmax(np.abs(coef))]
    return float(coef[0]), float(coef[1]), float(coef[2])


def sym_product(f: AffineForm, g: AffineForm) -> SymForm4:
    """Symmetric bilinear form whose quadratic form is ``f(X) * g(X)``."""
    return SymForm4(0.5 * (np.outer(f.coeffs, g.coeffs) + np.outer(g.coeffs, f.coeffs)))
