"""Polynomial expansion, classification and residual checks for quadric forms.

Also hosts :func:`fit_by_sampling`, an implicitization by least squares on
sampled patch points. It shares nothing with the closed-form construction
beyond patch evaluation and is used to cross-check it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from .errors import PoleEncountered, RankDeficient
from .patch import ControlNet, evaluate
from .projective import DEFAULT_TOL, SymForm4

MONOMIALS = ("x^2", "y^2", "z^2", "xy", "xz", "yz", "x", "y", "z", "1")


class PolyCoeffs(NamedTuple):
    xx: float
    yy: float
    zz: float
    xy: float
    xz: float
    yz: float
    x: float
    y: float
    z: float
    one: float

    def array(self) -> np.ndarray:
        return np.array(self, dtype=float)

    def __call__(self, p) -> float:
        x, y, z = (float(c) for c in p)
        return float(self.array() @ np.array([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, 1.0]))


class QuadricClass(str, enum.Enum):
    SPHERE = "sphere"
    ELLIPSOID = "ellipsoid"
    ELLIPTIC_PARABOLOID = "elliptic_paraboloid"
    HYPERBOLIC_PARABOLOID = "hyperbolic_paraboloid"
    HYPERBOLOID_ONE_SHEET = "hyperboloid_one_sheet"
    HYPERBOLOID_TWO_SHEETS = "hyperboloid_two_sheets"
    DEGENERATE_OR_OTHER = "degenerate_or_other"

    def __str__(self):
        return self.value


def expand_coefficients(C: SymForm4) -> PolyCoeffs:
    m = C.m
    return PolyCoeffs(
        m[0, 0], m[1, 1], m[2, 2],
        2 * m[0, 1], 2 * m[0, 2], 2 * m[1, 2],
        2 * m[0, 3], 2 * m[1, 3], 2 * m[2, 3],
        m[3, 3],
    )


def form_from_coefficients(c) -> SymForm4:
    xx, yy, zz, xy, xz, yz, x, y, z, one = (float(v) for v in c)
    return SymForm4(np.array([
        [xx, xy / 2, xz / 2, x / 2],
        [xy / 2, yy, yz / 2, y / 2],
        [xz / 2, yz / 2, zz, z / 2],
        [x / 2, y / 2, z / 2, one],
    ]))


def normalize_quadric(C: SymForm4, tol: float = DEFAULT_TOL) -> SymForm4:
    """Scale so the largest matrix entry has magnitude 1 and the first
    non-negligible coefficient in monomial order is positive."""
    m = C.m
    big = np.max(np.abs(m))
    if big == 0.0:
        return C
    m = m / big
    coeffs = expand_coefficients(SymForm4(m)).array()
    cmax = np.max(np.abs(coeffs))
    lead = next(c for c in coeffs if abs(c) > tol * cmax)
    if lead < 0:
        m = -m
    # flush negative zeros so printed output is stable
    return SymForm4(m + 0.0)


def coefficient_angle(a, b) -> float:
    """Angle between two coefficient vectors after sign alignment."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    if a @ b < 0:
        b = -b
    # 2*asin(|a-b|/2) stays accurate near zero, unlike acos
    return float(2.0 * np.arcsin(min(1.0, np.linalg.norm(a - b) / 2.0)))


def classify(C: SymForm4, tol: float = DEFAULT_TOL) -> QuadricClass:
    """Affine type of a quadric from the signs of its quadratic-part
    eigenvalues and of the 4x4 determinant."""
    m = C.m
    if not np.any(m):
        return QuadricClass.DEGENERATE_OR_OTHER
    det4 = np.linalg.det(m)
    if abs(det4) <= tol * np.prod(np.linalg.norm(m, axis=1)):
        return QuadricClass.DEGENERATE_OR_OTHER

    lam = np.linalg.eigvalsh(m[:3, :3])
    lmax = np.max(np.abs(lam))
    if lmax == 0.0:
        return QuadricClass.DEGENERATE_OR_OTHER
    nonzero = lam[np.abs(lam) > tol * lmax]
    pos = int(np.sum(nonzero > 0))
    neg = int(np.sum(nonzero < 0))

    if len(nonzero) == 3:
        if pos == 3 or neg == 3:
            if det4 > 0:
                # no real points
                return QuadricClass.DEGENERATE_OR_OTHER
            if np.ptp(lam) <= tol * lmax:
                return QuadricClass.SPHERE
            return QuadricClass.ELLIPSOID
        if det4 > 0:
            return QuadricClass.HYPERBOLOID_ONE_SHEET
        return QuadricClass.HYPERBOLOID_TWO_SHEETS
    if len(nonzero) == 2:
        if pos == 2 or neg == 2:
            return QuadricClass.ELLIPTIC_PARABOLOID
        return QuadricClass.HYPERBOLIC_PARABOLOID
    return QuadricClass.DEGENERATE_OR_OTHER


def normalized_residual(C: SymForm4, x) -> float:
    """``|C(X, X)|`` relative to the form's size and ``|X|^2``, ``X = (x, 1)``."""
    x = np.asarray(x, dtype=float)
    return abs(C.quadratic(x)) / (np.max(np.abs(C.m)) * (1.0 + x @ x))


def barycentric_grid(n: int):
    for i in range(n + 1):
        for j in range(n + 1 - i):
            yield i / n, j / n, 1.0 - (i + j) / n


def validate_residuals(net: ControlNet, C: SymForm4, grid_n: int,
                       tol: float = DEFAULT_TOL) -> Tuple[float, int]:
    """Largest normalized residual of the patch points on a barycentric grid.

    Parameters where the patch has a pole are skipped and not counted.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    worst = 0.0
    samples = 0
    for p in barycentric_grid(grid_n):
        try:
            x = evaluate(net, p, tol=tol)
        except PoleEncountered:
            continue
        worst = max(worst, normalized_residual(C, x))
        samples += 1
    return worst, samples


# R2 low-discrepancy steps (inverse powers of the plastic number)
_PLASTIC = 1.3247179572447460260
_STEP = np.array([1.0 / _PLASTIC, 1.0 / _PLASTIC ** 2])
_OFFSET = 0.5


def sample_parameters(n: int) -> np.ndarray:
    """Deterministic, well-spread ``(u, v, w)`` parameters in the unit triangle."""
    i = np.arange(1, n + 1)[:, None]
    uv = np.mod(_OFFSET + i * _STEP, 1.0)
    flip = uv.sum(axis=1) > 1.0
    uv[flip] = 1.0 - uv[flip]
    return np.column_stack([uv, 1.0 - uv.sum(axis=1)])


def monomial_row(x) -> np.ndarray:
    x, y, z = x
    return np.array([x * x, y * y, z * z, x * y, x * z, y * z, x, y, z, 1.0])


@dataclass(frozen=True)
class FitResult:
    coefficients: PolyCoeffs
    quadric: SymForm4
    singular_ratio: float  # smallest / second-smallest singular value
    n_points: int


def fit_by_sampling(net: ControlNet, n_points: int = 25, tol: float = DEFAULT_TOL) -> FitResult:
    """Least-squares quadric through sampled patch points.

    Points are centred and scaled before building the ``n x 10`` monomial
    matrix; the null direction is the right singular vector of the smallest
    singular value, mapped back to the original coordinates.

    Raises:
        RankDeficient: if the second-smallest singular value is negligible,
            i.e. the samples lie on more than one quadric.
    """
    if n_points < 10:
        raise ValueError("need at least 10 sample points")
    pts = []
    params = sample_parameters(4 * n_points)
    for p in params:
        try:
            pts.append(evaluate(net, p, tol=tol))
        except PoleEncountered:
            continue
        if len(pts) == n_points:
            break
    if len(pts) < n_points:
        raise RankDeficient("too many sample parameters hit poles of the patch")
    pts = np.array(pts)

    centre = pts.mean(axis=0)
    scale = np.max(np.abs(pts - centre))
    if scale == 0.0:
        raise RankDeficient("all sampled points coincide")
    local = (pts - centre) / scale
    a = np.array([monomial_row(x) for x in local])
    a /= np.linalg.norm(a, axis=1)[:, None]
    _, sv, vt = np.linalg.svd(a)
    if sv[-2] <= tol * sv[0]:
        raise RankDeficient(
            f"samples determine no unique quadric (singular values {sv[-2]:.3g}, {sv[-1]:.3g})")

    local_form = form_from_coefficients(vt[-1])
    T = np.eye(4)
    T[:3, :3] /= scale
    T[:3, 3] = -centre / scale
    C = normalize_quadric(SymForm4(T.T @ local_form.m @ T), tol=tol)
    return FitResult(
        coefficients=expand_coefficients(C),
        quadric=C,
        singular_ratio=float(sv[-1] / sv[-2]),
        n_points=n_points,
    )
