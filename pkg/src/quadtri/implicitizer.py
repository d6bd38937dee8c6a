"""Quadric test and closed-form implicit equation of a quadratic triangle.

The construction works in the tetrahedron spanned by the patch corners
``P = c002``, ``Q = c020``, ``R = c200`` and the point ``S`` where the three
boundary planes meet. With plane forms normalized as ``t(S) = u(R) = v(Q) =
w(P) = 1``, every quadric through ``P, Q, R, S`` is a combination of the six
products ``tu, tv, tw, uv, uw, vw``. Its coefficients are read off from the
boundary conics once the weights are rescaled so that each conic reaches ``S``
at parameter infinity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .analysis import PolyCoeffs, classify, expand_coefficients, normalize_quadric
from .errors import DegenerateConfiguration, NormalizationSingular
from .patch import BOUNDARY, INDEX_ORDER, ConicArc, ControlNet, boundary_conic
from .projective import (
    DEFAULT_TOL,
    AffineForm,
    HPoint,
    SymForm4,
    barycentric_in_plane,
    evaluate_form,
    intersect_three_planes,
    normalize_form,
    plane_through,
    sym_product,
)

PENCIL_TERMS = ("tu", "tv", "tw", "uv", "uw", "vw")


@dataclass(frozen=True)
class Tetrahedron:
    t: AffineForm
    u: AffineForm
    v: AffineForm
    w: AffineForm
    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    S: HPoint

    def form(self, name: str) -> AffineForm:
        return getattr(self, name)


@dataclass(frozen=True)
class AdjustedWeights:
    """Weights rescaled so that every boundary conic passes ``S`` at infinity.

    ``rho``, ``sigma`` and ``tau`` relate them to the input weights as
    ``(rho^2 w002, rho w011, w020, tau rho sigma w101, sigma w110, sigma^2 w200)``.
    """

    weights: Dict[str, float]
    rho: float
    sigma: float
    tau: float

    def as_list(self):
        return [self.weights[k] for k in INDEX_ORDER]

    def arc_weights(self, which: str) -> Tuple[float, float, float]:
        return tuple(self.weights[k] for k in BOUNDARY[which])


@dataclass(frozen=True)
class CompatibilityReport:
    on_conic_residuals: Tuple[float, float, float]
    compatibility_residual: float
    tangent_determinant: Optional[float]
    is_quadric: bool
    s_is_infinite: bool


@dataclass(frozen=True)
class QuadricReport:
    net: ControlNet
    tetrahedron: Tetrahedron
    compatibility: CompatibilityReport
    tolerance: float
    adjusted: Optional[AdjustedWeights] = None
    pencil: Optional[Dict[str, float]] = None
    t_of_representatives: Optional[Tuple[float, float, float]] = None
    quadric: Optional[SymForm4] = None
    coefficients: Optional[PolyCoeffs] = None
    quadric_class: Optional[str] = None

    @property
    def is_quadric(self) -> bool:
        return self.compatibility.is_quadric

    @property
    def S(self) -> HPoint:
        return self.tetrahedron.S


def build_tetrahedron(net: ControlNet, tol: float = DEFAULT_TOL) -> Tetrahedron:
    """Normalized plane forms ``t, u, v, w`` and their common point ``S``."""
    P, Q, R = net.P, net.Q, net.R
    forms = {}
    for name, opposite in (("u", R), ("v", Q), ("w", P)):
        keys = BOUNDARY[name]
        plane = plane_through(*(net.point(k) for k in keys), tol=tol)
        try:
            forms[name] = normalize_form(plane, opposite, tol=tol)
        except NormalizationSingular as exc:
            raise DegenerateConfiguration(f"plane {name} contains the opposite corner") from exc
    S = intersect_three_planes(forms["u"], forms["v"], forms["w"], tol=tol)
    t_plane = plane_through(P, Q, R, tol=tol)
    try:
        t = normalize_form(t_plane, S, tol=tol)
    except NormalizationSingular as exc:
        raise DegenerateConfiguration("S lies on the plane through the corners") from exc
    return Tetrahedron(t=t, u=forms["u"], v=forms["v"], w=forms["w"], P=P, Q=Q, R=R, S=S)


def _on_conic_residual(alpha: float, beta: float, gamma: float, arc: ConicArc) -> float:
    a = beta * beta * arc.w0 * arc.w2
    b = 4.0 * alpha * gamma * arc.w1 * arc.w1
    scale = abs(a) + abs(b)
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def conic_scale_triple(arc: ConicArc, S: HPoint, tol: float = DEFAULT_TOL):
    """Barycentric coordinates of ``S`` on the arc's control triangle.

    Returns ``(alpha, beta, gamma, residual)``. The residual is the normalized
    value of ``beta^2 w0 w2 - 4 alpha gamma w1^2``; it vanishes exactly when
    ``(alpha, -beta/2, gamma)`` is a rescaled weight triple of the same conic,
    i.e. when ``S`` lies on the conic.
    """
    alpha, beta, gamma = barycentric_in_plane(S, arc.p0, arc.p1, arc.p2, tol=tol)
    return alpha, beta, gamma, _on_conic_residual(alpha, beta, gamma, arc)


def _ratio_residual(a: float, b: float) -> float:
    scale = abs(a) + abs(b)
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def _corner_residual(tu, tv, tw) -> float:
    """Mismatch of the two values of ``w200`` after matching ``w002`` and ``w020``."""
    return _ratio_residual(tu[0] * tv[2] * tw[0], tu[2] * tw[2] * tv[0])


def _orientation_residual(net: ControlNet, aw: "AdjustedWeights") -> float:
    """Zero iff the adjusted weights are ``lam a^i b^j c^k`` times the input ones.

    With ``r = adjusted / input`` this is ``r101 r020 = r011 r110``, i.e.
    ``tau = 1``. The corner test alone only forces ``tau^2 = 1``; ``tau = -1``
    swaps one boundary arc for its complement and the patch leaves the quadric.
    """
    r = {k: aw.weights[k] / net.weight(k) for k in INDEX_ORDER}
    return _ratio_residual(r["101"] * r["020"], r["011"] * r["110"])


def merge_weights(net: ControlNet, triples, tol: float = DEFAULT_TOL) -> AdjustedWeights:
    """Merge per-conic weight triples through their shared corner weights.

    ``triples`` maps ``u, v, w`` to ``(alpha, beta, gamma)``. Conic ``u`` keeps
    its scale, ``v`` is matched on ``w002`` and ``w`` on ``w020``; the result is
    scaled so that ``w020`` keeps its input value.
    """
    au, bu, gu = triples["u"]
    av, bv, gv = triples["v"]
    aw, bw, gw = triples["w"]
    mags = [abs(c) for tr in (triples["u"], triples["v"], triples["w"]) for c in (tr[0], tr[2])]
    if min(mags) <= tol * max(mags):
        raise DegenerateConfiguration("S coincides with a corner of the control net")

    lam_v = au / av
    lam_w = gu / aw
    adj = {
        "002": au, "011": -0.5 * bu, "020": gu,
        "101": -0.5 * bv * lam_v, "200": gv * lam_v,
        "110": -0.5 * bw * lam_w,
    }
    k = net.weight("020") / gu
    adj = {key: k * adj[key] for key in INDEX_ORDER}

    w = net.weights
    rho = adj["011"] / w["011"]
    sigma = adj["110"] / w["110"]
    tau = adj["101"] / (rho * sigma * w["101"])
    return AdjustedWeights(weights=adj, rho=rho, sigma=sigma, tau=tau)


def tangent_at_S(arc: ConicArc, S: HPoint) -> np.ndarray:
    """Tangent direction at ``S`` of an arc whose weights put ``S`` at infinity.

    The tangent line is ``w0 * f + w2 * g = 0`` where ``f`` and ``g`` are the
    side lines through ``(p2, S)`` and ``(p0, S)`` normalized to 1 at the
    opposite corner, so the direction is ``w0 (p0 - S) - w2 (p2 - S)``.
    """
    s = S.affine()
    return arc.w0 * (np.asarray(arc.p0) - s) - arc.w2 * (np.asarray(arc.p2) - s)


def _arc_point_and_tangent(arc: ConicArc, a: float, b: float):
    """Point and tangent of the arc at homogeneous Bernstein parameter ``(a, b)``."""
    p0, p1, p2 = (np.asarray(p) for p in (arc.p0, arc.p1, arc.p2))
    n = arc.w0 * p0 * a * a + 2 * arc.w1 * p1 * a * b + arc.w2 * p2 * b * b
    d = arc.w0 * a * a + 2 * arc.w1 * a * b + arc.w2 * b * b
    # derivative along (da, db) = (-b, a)
    dn = 2 * arc.w0 * p0 * a * -b + 2 * arc.w1 * p1 * (a * a - b * b) + 2 * arc.w2 * p2 * b * a
    dd = 2 * arc.w0 * a * -b + 2 * arc.w1 * (a * a - b * b) + 2 * arc.w2 * b * a
    return n, d, d * dn - n * dd


def conic_meet_points(arc: ConicArc, through_p0: AffineForm, through_p2: AffineForm):
    """Second intersections of the arc with a plane through each endpoint.

    Returns the two homogeneous points and the curve tangents there.
    """
    f0, f2 = through_p0, through_p2
    a0, b0 = arc.w2 * f0(arc.p2), -2 * arc.w1 * f0(arc.p1)
    a2, b2 = 2 * arc.w1 * f2(arc.p1), -arc.w0 * f2(arc.p0)
    n0, d0, t0 = _arc_point_and_tangent(arc, a0, b0)
    n2, d2, t2 = _arc_point_and_tangent(arc, a2, b2)
    return (np.append(n0, d0), np.append(n2, d2)), (t0, t2)


# for each boundary conic: planes containing its p0 and p2 endpoints
_SIDE_PLANES = {"u": ("v", "w"), "v": ("u", "w"), "w": ("u", "v")}


def coplanarity_determinant(net: ControlNet, tet: Optional[Tetrahedron] = None,
                            tol: float = DEFAULT_TOL) -> Tuple[float, float]:
    """Geometric quadric check at a finite ``S``.

    Each boundary conic is intersected with the two neighbouring boundary
    planes and differentiated there. Returns ``(det, meet)``: ``det`` is the
    largest-magnitude determinant of three unit tangents, one per conic, and
    ``meet`` the largest distance between an intersection point and ``S``
    relative to the size of the net. For a quadric patch both vanish.
    """
    if tet is None:
        tet = build_tetrahedron(net, tol=tol)
    if tet.S.is_infinite:
        raise DegenerateConfiguration("tangent test needs a finite S")
    s = tet.S.affine()
    pts = net.point_array()
    size = np.max(np.linalg.norm(pts - s, axis=1))
    choices = []
    meet = 0.0
    for which in "uvw":
        arc = boundary_conic(net, which, tol=tol)
        f0, f2 = (tet.form(name) for name in _SIDE_PLANES[which])
        meets, tans = conic_meet_points(arc, f0, f2)
        for x in meets:
            if abs(x[3]) <= tol * np.linalg.norm(x[:3]):
                meet = np.inf
            else:
                meet = max(meet, np.linalg.norm(x[:3] / x[3] - s) / size)
        choices.append([t / np.linalg.norm(t) for t in tans])
    # any single choice of tangent points is blind to one weight
    dets = [np.linalg.det(np.array(c)) for c in itertools.product(*choices)]
    det = max(dets, key=abs)
    return float(det), float(meet)


def quadric_test(net: ControlNet, tol: float = DEFAULT_TOL, tet: Optional[Tetrahedron] = None):
    """Decide whether the patch lies on a non-degenerate quadric.

    Returns ``(report, adjusted)`` where ``adjusted`` is None unless every
    residual passes.
    """
    if tet is None:
        tet = build_tetrahedron(net, tol=tol)
    triples = {}
    residuals = []
    for which in "uvw":
        arc = boundary_conic(net, which, tol=tol)
        alpha, beta, gamma, r = conic_scale_triple(arc, tet.S, tol=tol)
        triples[which] = (alpha, beta, gamma)
        residuals.append(r)
    on_conic_ok = max(residuals) < tol
    compat = _corner_residual(triples["u"], triples["v"], triples["w"])
    merged = None
    try:
        merged = merge_weights(net, triples, tol=tol)
    except DegenerateConfiguration:
        # S on a corner tangent: only possible off the conics
        if on_conic_ok:
            raise
    if merged is not None:
        compat = max(compat, _orientation_residual(net, merged))

    det = None
    if not tet.S.is_infinite:
        det, _ = coplanarity_determinant(net, tet, tol=tol)

    ok = on_conic_ok and compat < tol
    adjusted = merged if ok else None
    report = CompatibilityReport(
        on_conic_residuals=tuple(residuals),
        compatibility_residual=compat,
        tangent_determinant=det,
        is_quadric=ok,
        s_is_infinite=tet.S.is_infinite,
    )
    return report, adjusted


def representatives(net: ControlNet, aw: AdjustedWeights) -> Dict[str, np.ndarray]:
    """Homogeneous ``S_u, S_v, S_w`` built from the adjusted weights."""
    reps = {}
    for which in "uvw":
        k0, k1, k2 = BOUNDARY[which]
        w0, w1, w2 = aw.weights[k0], aw.weights[k1], aw.weights[k2]
        xyz = w0 * net.point(k0) - 2 * w1 * net.point(k1) + w2 * net.point(k2)
        reps[which] = np.append(xyz, w0 - 2 * w1 + w2)
    return reps


def pencil_coefficients(tet: Tetrahedron, net: ControlNet, aw: AdjustedWeights):
    """Coefficients of ``tu, tv, tw, uv, uw, vw`` and the ``t`` form they refer to.

    For finite ``S`` the form ``t`` is the one with ``t(S) = 1``; at infinity it
    is rescaled to ``t(S_u) = 1``. In both cases the mixed coefficients use
    ``t`` applied to the homogeneous representatives, which for finite ``S``
    equals ``w002 - 2 w011 + w020`` and its analogues.
    """
    reps = representatives(net, aw)
    t = tet.t
    if tet.S.is_infinite:
        t = normalize_form(t, reps["u"])
    tS = {k: evaluate_form(t, r) for k, r in reps.items()}
    w = aw.weights
    coeffs = {
        "tu": w["020"] * w["002"],
        "tv": w["002"] * w["200"],
        "tw": w["200"] * w["020"],
        "uv": w["002"] * tS["w"],
        "uw": w["020"] * tS["v"],
        "vw": w["200"] * tS["u"],
    }
    return coeffs, t, (tS["u"], tS["v"], tS["w"])


def assemble_quadric(tet: Tetrahedron, aw: AdjustedWeights, net: ControlNet,
                     normalize: bool = True, tol: float = DEFAULT_TOL) -> SymForm4:
    coeffs, t, _ = pencil_coefficients(tet, net, aw)
    forms = {"t": t, "u": tet.u, "v": tet.v, "w": tet.w}
    C = SymForm4.zero()
    for term in PENCIL_TERMS:
        C = C + coeffs[term] * sym_product(forms[term[0]], forms[term[1]])
    return normalize_quadric(C, tol=tol) if normalize else C


def implicitize(net: ControlNet, tol: float = DEFAULT_TOL) -> QuadricReport:
    """Full pipeline: tetrahedron, quadric test, closed-form bilinear form."""
    tet = build_tetrahedron(net, tol=tol)
    compat, adjusted = quadric_test(net, tol=tol, tet=tet)
    if adjusted is None:
        return QuadricReport(net=net, tetrahedron=tet, compatibility=compat, tolerance=tol)
    pencil, _, t_reps = pencil_coefficients(tet, net, adjusted)
    C = assemble_quadric(tet, adjusted, net, tol=tol)
    return QuadricReport(
        net=net,
        tetrahedron=tet,
        compatibility=compat,
        tolerance=tol,
        adjusted=adjusted,
        pencil=pencil,
        t_of_representatives=t_reps,
        quadric=C,
        coefficients=expand_coefficients(C),
        quadric_class=classify(C, tol=tol),
    )
