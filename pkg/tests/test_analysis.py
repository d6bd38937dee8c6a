import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _gen import random_affine, random_quadric_net
from quadtri.analysis import (
    MONOMIALS,
    PolyCoeffs,
    QuadricClass,
    classify,
    coefficient_angle,
    expand_coefficients,
    fit_by_sampling,
    form_from_coefficients,
    normalize_quadric,
    normalized_residual,
    sample_parameters,
    validate_residuals,
)
from quadtri.errors import RankDeficient
from quadtri.fixtures import example1, example2, example3
from quadtri.implicitizer import implicitize
from quadtri.patch import ControlNet
from quadtri.projective import SymForm4

SPHERE = form_from_coefficients([1, 1, 1, 0, 0, 0, 0, 0, 0, -1])


def diag(*d):
    return SymForm4(np.diag(np.array(d, dtype=float)))


class TestCoefficients:
    def test_zero(self):
        assert expand_coefficients(SymForm4.zero()) == PolyCoeffs(*[0.0] * 10)

    def test_off_diagonal_doubled(self):
        m = np.zeros((4, 4))
        m[0, 1] = m[1, 0] = 0.5
        m[2, 3] = m[3, 2] = -1.5
        c = expand_coefficients(SymForm4(m))
        assert c.xy == 1.0 and c.z == -3.0
        assert sum(abs(v) for v in c) == 4.0

    def test_evaluation_matches_form(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            C = SymForm4.from_matrix(rng.normal(size=(4, 4)))
            x = rng.normal(size=3)
            assert expand_coefficients(C)(x) == pytest.approx(C.quadratic(x), rel=1e-12, abs=1e-12)

    def test_roundtrip(self):
        c = np.arange(1.0, 11.0)
        np.testing.assert_array_equal(expand_coefficients(form_from_coefficients(c)).array(), c)
        assert len(MONOMIALS) == 10


class TestNormalize:
    def test_sign_and_scale(self):
        C = normalize_quadric(SymForm4(-3.0 * SPHERE.m))
        np.testing.assert_array_equal(C.m, SPHERE.m)

    def test_leading_zero_skipped(self):
        # first non-negligible coefficient is yz
        C = normalize_quadric(form_from_coefficients([0, 0, 0, 0, 0, -2, 1, 0, 0, 0]))
        assert expand_coefficients(C).yz == 2.0

    def test_no_negative_zero(self):
        C = normalize_quadric(SymForm4(-SPHERE.m))
        assert not np.any(np.signbit(C.m) & (C.m == 0))

    def test_zero_form(self):
        assert normalize_quadric(SymForm4.zero()) == SymForm4.zero()


class TestAngle:
    def test_sign_blind(self):
        assert coefficient_angle([1, 2, 3], [-2, -4, -6]) == 0.0

    def test_orthogonal(self):
        assert coefficient_angle([1, 0], [0, 1]) == pytest.approx(np.pi / 2)

    def test_small_angle_resolved(self):
        assert coefficient_angle([1, 0], [1, 1e-12]) == pytest.approx(1e-12, rel=1e-6)


class TestClassify:
    @pytest.mark.parametrize("make, expected", [
        (example1, QuadricClass.ELLIPTIC_PARABOLOID),
        (example2, QuadricClass.SPHERE),
        (example3, QuadricClass.HYPERBOLIC_PARABOLOID),
    ])
    def test_examples(self, make, expected):
        C = implicitize(make()).quadric
        assert classify(C) is expected
        assert classify(SymForm4(-2.5 * C.m)) is expected

    @pytest.mark.parametrize("d, expected", [
        ((1, 1, 1, -1), QuadricClass.SPHERE),
        ((1, 2, 3, -1), QuadricClass.ELLIPSOID),
        ((1, 1, -1, -1), QuadricClass.HYPERBOLOID_ONE_SHEET),
        ((1, -1, -1, -1), QuadricClass.HYPERBOLOID_TWO_SHEETS),
        ((1, 1, 1, 1), QuadricClass.DEGENERATE_OR_OTHER),  # no real points
        ((1, 1, -1, 0), QuadricClass.DEGENERATE_OR_OTHER),  # cone
        ((1, 1, 0, -1), QuadricClass.DEGENERATE_OR_OTHER),  # cylinder
    ])
    def test_diagonal(self, d, expected):
        assert classify(diag(*d)) is expected

    def test_zero(self):
        assert classify(SymForm4.zero()) is QuadricClass.DEGENERATE_OR_OTHER

    def test_affine_invariant(self):
        rng = np.random.default_rng(11)
        for d in [(1, 2, 3, -1), (1, 1, -1, -1), (1, -1, -1, -1)]:
            a, b = random_affine(rng)
            h = np.eye(4)
            h[:3, :3], h[:3, 3] = a, b
            hi = np.linalg.inv(h)
            C = SymForm4(hi.T @ diag(*d).m @ hi)
            assert classify(C) is classify(diag(*d))


class TestResiduals:
    def test_point_on_sphere(self):
        assert normalized_residual(SPHERE, (0.6, 0.8, 0.0)) == 0.0

    def test_scale_free(self):
        x = (1.0, 2.0, -1.0)
        assert normalized_residual(SymForm4(7 * SPHERE.m), x) == pytest.approx(
            normalized_residual(SPHERE, x), rel=1e-15)

    def test_grid_count(self):
        _, n = validate_residuals(example2(), SPHERE, 2)
        assert n == 6

    def test_sphere_patch(self):
        worst, n = validate_residuals(example2(), SPHERE, 15)
        assert n == 136
        assert worst < 1e-10

    def test_perturbed_patch_off_sphere(self):
        net = example2().with_weight("110", 1.1)
        worst, _ = validate_residuals(net, SPHERE, 10)
        assert worst > 1e-3

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            validate_residuals(example2(), SPHERE, 1)


class TestSampling:
    def test_parameters_in_triangle(self):
        p = sample_parameters(200)
        assert np.all(p >= -1e-15)
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-15)
        assert len({tuple(r) for r in p.round(12)}) == 200

    @given(st.integers(1, 300))
    def test_prefix_stable(self, n):
        np.testing.assert_array_equal(sample_parameters(n), sample_parameters(300)[:n])

    @pytest.mark.parametrize("make", [example1, example2, example3])
    def test_agrees_with_closed_form(self, make):
        net = make()
        fit = fit_by_sampling(net)
        assert coefficient_angle(fit.coefficients, implicitize(net).coefficients) < 1e-9
        assert fit.n_points == 25
        assert fit.singular_ratio < 1e-10

    def test_random_nets(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            net = random_quadric_net(rng)
            fit = fit_by_sampling(net)
            assert coefficient_angle(fit.coefficients, implicitize(net).coefficients) < 1e-6

    def test_reproducible(self):
        a = fit_by_sampling(example3())
        b = fit_by_sampling(example3())
        assert a.coefficients == b.coefficients

    def test_planar_patch_rank_deficient(self):
        pts = {k: (x, y, 0.0) for k, (x, y, _) in example2().points.items()}
        net = ControlNet(pts, example2().weights)
        with pytest.raises(RankDeficient):
            fit_by_sampling(net)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_by_sampling(example2(), n_points=9)
