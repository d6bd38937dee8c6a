import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadtri.errors import DegenerateConfiguration, NormalizationSingular, NotInPlane
from quadtri.projective import (
    AffineForm,
    HPoint,
    SymForm4,
    barycentric_in_plane,
    evaluate_form,
    intersect_three_planes,
    normalize_form,
    plane_through,
    projective_sine,
    sym_product,
)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
# products of these stay clear of the subnormal range
moderate = st.one_of(st.just(0.0), st.floats(1e-6, 10), st.floats(-10, -1e-6))
vec3 = st.tuples(coord, coord, coord)


def parallel(a, b, tol=1e-12):
    return projective_sine(a, b) < tol


class TestHPoint:
    def test_projective_equality(self):
        assert HPoint(1, 2, 3, 1).equals(HPoint(2, 4, 6, 2))
        assert HPoint(0, 0, -2, 0).equals(HPoint.direction((0, 0, 1)))
        assert not HPoint(1, 2, 3, 1).equals(HPoint(1, 2, 3, 0))

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateConfiguration):
            HPoint(0, 0, 0, 0)

    def test_affine_of_direction_raises(self):
        with pytest.raises(DegenerateConfiguration):
            HPoint.direction((1, 0, 0)).affine()


def test_affine_form_needs_normal():
    with pytest.raises(DegenerateConfiguration):
        AffineForm(0, 0, 0, 1)


class TestPlaneThrough:
    def test_sphere_net_plane_u(self):
        f = plane_through((0, 0, 1), (1, 0, 1), (1, 0, 0))
        assert parallel(f.coeffs, [0, 1, 0, 0])

    def test_coordinate_plane(self):
        f = plane_through((0, 0, 0), (1, 0, 0), (0, 1, 0))
        assert parallel(f.coeffs, [0, 0, 1, 0])

    def test_paraboloid_net_plane_u(self):
        f = plane_through((0, 0, 0), (1, 0, 1), (2, 0, 0))
        assert parallel(f.coeffs, [0, 1, 0, 0])

    def test_collinear(self):
        with pytest.raises(DegenerateConfiguration):
            plane_through((0, 0, 0), (1, 1, 1), (2, 2, 2))

    def test_point_at_infinity(self):
        with pytest.raises(DegenerateConfiguration):
            plane_through((0, 0, 0), (1, 0, 0), HPoint.direction((0, 1, 0)))

    @given(vec3, vec3, vec3)
    def test_vanishes_and_is_order_invariant(self, a, b, c):
        a, b, c = map(np.array, (a, b, c))
        n = np.cross(b - a, c - a)
        if np.linalg.norm(n) < 1e-3 * (1 + np.linalg.norm(b - a) * np.linalg.norm(c - a)):
            return
        f = plane_through(a, b, c)
        scale = np.linalg.norm(f.coeffs) * (1 + max(np.linalg.norm(a), np.linalg.norm(b), np.linalg.norm(c)))
        for p in (a, b, c):
            assert abs(evaluate_form(f, p)) < 1e-12 * scale
        for perm in itertools.permutations((a, b, c)):
            assert parallel(plane_through(*perm).coeffs, f.coeffs, 1e-9)


class TestEvaluateForm:
    def test_finite_point(self):
        t = AffineForm(-0.5, -0.5, -0.5, 0.5)
        assert evaluate_form(t, HPoint(0, 0, -1, 1)) == 1.0

    def test_direction_uses_linear_part(self):
        t = AffineForm(0, 0, -0.5, 0)
        assert evaluate_form(t, HPoint.direction((0, 0, -2))) == 1.0

    def test_vanishes_on_own_plane(self):
        f = plane_through((1, 2, 3), (0, 1, 0), (4, 0, 1))
        assert abs(f((4, 0, 1))) < 1e-12


class TestNormalizeForm:
    def test_sphere_u(self):
        f = normalize_form(AffineForm(0, 3, 0), (0, 1, 0))
        assert f == AffineForm(0, 1, 0)

    def test_paraboloid_u(self):
        # the corner opposite plane u is c200 = (0, 2, 0)
        f = normalize_form(AffineForm(0, 1, 0), (0, 2, 0))
        assert f == AffineForm(0, 0.5, 0)

    def test_scalar_division(self):
        assert normalize_form(AffineForm(0, 0, 2), (0, 0, 1)) == AffineForm(0, 0, 1)

    def test_point_on_plane(self):
        with pytest.raises(NormalizationSingular):
            normalize_form(AffineForm(0, 1, 0), (2, 0, 0))

    @given(vec3, st.floats(0.1, 10), vec3)
    def test_idempotent(self, n, d, p):
        if np.linalg.norm(n) < 1e-3:
            return
        f = AffineForm(*n, d)
        try:
            g = normalize_form(f, p)
        except NormalizationSingular:
            return
        if abs(g(p)) < 1e-6:
            return
        assert normalize_form(g, p) == g


class TestIntersectThreePlanes:
    def test_sphere_tetrahedron(self):
        s = intersect_three_planes(AffineForm(0, 1, 0), AffineForm(1, 0, 0),
                                   AffineForm(-0.5, -0.5, 0.5, 0.5))
        np.testing.assert_allclose(s.coords, [0, 0, -1, 1], atol=1e-12)

    def test_point_at_infinity(self):
        s = intersect_three_planes(AffineForm(0, 0.5, 0), AffineForm(0.5, 0, 0),
                                   AffineForm(-0.5, -0.5, 0, 1))
        assert s.h == 0.0
        assert s.equals(HPoint.direction((0, 0, -2)))

    def test_origin(self):
        s = intersect_three_planes(AffineForm(1, 0, 0), AffineForm(0, 1, 0), AffineForm(0, 0, 1))
        assert s == HPoint(0, 0, 0, 1)

    def test_pencil(self):
        with pytest.raises(DegenerateConfiguration):
            intersect_three_planes(AffineForm(1, 0, 0), AffineForm(0, 1, 0), AffineForm(1, 1, 0))

    @given(st.lists(st.tuples(coord, coord, coord, coord), min_size=3, max_size=3))
    def test_result_on_all_planes(self, rows):
        try:
            forms = [AffineForm(*r) for r in rows]
            s = intersect_three_planes(*forms)
        except DegenerateConfiguration:
            return
        x = s.coords / np.linalg.norm(s.coords)
        for f in forms:
            c = f.coeffs / np.max(np.abs(f.coeffs))
            assert abs(c @ x) < 1e-9


class TestBarycentric:
    tri = ((0, 0, 1), (1, 0, 1), (1, 0, 0))

    def test_sphere_S(self):
        coef = barycentric_in_plane(HPoint(0, 0, -1, 1), *self.tri)
        np.testing.assert_allclose(coef, (1, -2, 2), atol=1e-12)

    def test_vertex(self):
        np.testing.assert_allclose(barycentric_in_plane((0, 0, 1), *self.tri), (1, 0, 0), atol=1e-12)

    def test_direction(self):
        coef = barycentric_in_plane(HPoint.direction((0, 0, -2)), (0, 0, 0), (1, 0, 1), (2, 0, 0))
        assert parallel(coef, (1, -2, 1))
        assert max(abs(c) for c in coef) == 1.0
        assert abs(sum(coef)) < 1e-15

    def test_off_plane(self):
        with pytest.raises(NotInPlane):
            barycentric_in_plane((0, 1, 0), *self.tri)

    def test_degenerate_triangle(self):
        with pytest.raises(DegenerateConfiguration):
            barycentric_in_plane((0, 0, 0), (0, 0, 0), (1, 1, 1), (2, 2, 2))

    @given(vec3, vec3, vec3, st.floats(-3, 3), st.floats(-3, 3))
    def test_roundtrip(self, p, t, q, b, g):
        p, t, q = map(np.array, (p, t, q))
        n = np.cross(t - p, q - p)
        if np.linalg.norm(n) < 1e-2 * (1 + np.linalg.norm(t - p) * np.linalg.norm(q - p)):
            return
        s = (1 - b - g) * p + b * t + g * q
        coef = barycentric_in_plane(s, p, t, q)
        back = coef[0] * p + coef[1] * t + coef[2] * q
        assert abs(sum(coef) - 1) < 1e-9
        assert np.linalg.norm(back - s) < 1e-8 * (1 + np.linalg.norm(s))


class TestSymProduct:
    def test_square(self):
        m = sym_product(AffineForm(0, 0, 1), AffineForm(0, 0, 1)).m
        expected = np.zeros((4, 4))
        expected[2, 2] = 1
        np.testing.assert_array_equal(m, expected)

    def test_symmetrized(self):
        m = sym_product(AffineForm(1, 0, 0), AffineForm(0, 1, 0)).m
        assert m[0, 1] == m[1, 0] == 0.5
        assert np.count_nonzero(m) == 2

    def test_sphere_tu_value(self):
        t = AffineForm(-0.5, -0.5, -0.5, 0.5)
        u = AffineForm(0, 1, 0)
        # t(1,1,1) = -1 and u(1,1,1) = 1
        assert sym_product(t, u).quadratic((1, 1, 1)) == -1.0

    def test_read_only(self):
        m = sym_product(AffineForm(1, 0, 0), AffineForm(0, 1, 0)).m
        with pytest.raises(ValueError):
            m[0, 0] = 3

    @settings(max_examples=200)
    @given(st.tuples(*[moderate] * 4), st.tuples(*[moderate] * 4), vec3)
    def test_product_identity(self, a, b, x):
        if not any(a[:3]) or not any(b[:3]):
            return
        f, g = AffineForm(*a), AffineForm(*b)
        lhs = sym_product(f, g).quadratic(x)
        rhs = f(x) * g(x)
        scale = np.linalg.norm(a) * np.linalg.norm(b) * (1 + np.dot(x, x))
        assert abs(lhs - rhs) <= 1e-14 * scale


def test_symform_from_matrix_symmetrizes():
    m = np.arange(16.0).reshape(4, 4)
    s = SymForm4.from_matrix(m)
    np.testing.assert_array_equal(s.m, s.m.T)
