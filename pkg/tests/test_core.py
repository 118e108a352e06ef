import numpy as np
import pytest

from polarhull.core import (
    CircleContour,
    CompactSample,
    Disk,
    NodeEvaluationError,
    PolynomialC,
    contour_integral,
    poly_eval,
    poly_from_roots,
    sup_norm,
)


def test_poly_eval_constant():
    p = PolynomialC([1.0])
    assert poly_eval(p, 5.0 + 0j) == 1.0 + 0j


def test_poly_eval_identity():
    p = PolynomialC([0.0, 1.0])
    assert poly_eval(p, 2.0 + 3.0j) == 2.0 + 3.0j


def test_poly_eval_two_roots_at_zero():
    # (z-1)(z-2) = z^2 - 3z + 2
    p = PolynomialC([2.0, -3.0, 1.0])
    assert poly_eval(p, 0.0 + 0j) == 2.0 + 0j


def test_poly_from_roots_empty():
    p = poly_from_roots([])
    assert p.degree == 0
    assert p.coeffs[0] == 1.0


def test_poly_from_roots_single():
    a = 0.7 + 0.2j
    p = poly_from_roots([a])
    np.testing.assert_allclose(p.coeffs, [-a, 1.0])


def test_poly_from_roots_pm_one():
    p = poly_from_roots([1.0, -1.0])
    np.testing.assert_allclose(p.coeffs, [-1.0, 0.0, 1.0], atol=1e-15)
    assert abs(poly_eval(p, 2.0) - 3.0) < 1e-14


@pytest.mark.parametrize("trial", range(5))
def test_roots_roundtrip_random(rng, trial):
    n = int(rng.integers(1, 31))
    roots = rng.uniform(-0.9, 0.9, n) + 1j * rng.uniform(-0.9, 0.9, n)
    p = poly_from_roots(roots)
    scale = np.sum(np.abs(p.coeffs))
    for r in roots:
        assert abs(poly_eval(p, r)) <= 1e-10 * max(scale, 1.0)
        assert abs(p.eval_root_form(r)) == 0.0


def test_contour_residue_inside():
    val = contour_integral(lambda z: 1.0 / z, CircleContour(0j, 1.0, 64))
    assert abs(val - 1.0) < 1e-12


def test_contour_entire_zero():
    val = contour_integral(lambda z: np.ones_like(z), CircleContour(0j, 1.0))
    assert abs(val) < 1e-12


def test_contour_pole_outside():
    val = contour_integral(lambda z: 1.0 / (z - 3.0), CircleContour(0j, 1.0))
    assert abs(val) < 1e-10


@pytest.mark.parametrize("k", [0, 1, 2, 5, 9])
def test_contour_monomials_vanish(k):
    # analytic integrands have no residue, on any circle missing 0
    val = contour_integral(lambda z, k=k: z**k, CircleContour(0.3 + 0.1j, 0.8))
    assert abs(val) < 1e-12


def test_contour_node_doubling_stable():
    f = lambda z: np.exp(z) / (z - 0.2)
    a = contour_integral(f, CircleContour(0j, 1.0, 64))
    b = contour_integral(f, CircleContour(0j, 1.0, 128))
    assert abs(a - b) < 1e-10


def test_contour_rejects_nonfinite():
    def bad(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / (z - z)

    with pytest.raises(NodeEvaluationError):
        contour_integral(bad, CircleContour(0j, 1.0))


def test_sup_norm_constant():
    s = CompactSample([0.1, 0.5, -0.9])
    assert sup_norm(lambda z: np.full_like(z, 2j), s) == 2.0


def test_sup_norm_identity():
    s = CompactSample([0.1, 0.5, -0.9])
    assert sup_norm(lambda z: z, s) == pytest.approx(0.9)


def test_sup_norm_circle_pole():
    theta = 2 * np.pi * np.arange(100) / 100  # includes angle 0
    s = CompactSample(0.5 * np.exp(1j * theta))
    val = sup_norm(lambda z: 1.0 / (z - 1.0), s)
    assert val == pytest.approx(2.0, rel=1e-10)


def test_sup_norm_monotone_under_refinement(rng):
    pts = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)
    f = lambda z: np.exp(z) / (z - 2.0)
    coarse = sup_norm(f, CompactSample(pts[:20]))
    fine = sup_norm(f, CompactSample(pts))
    assert fine >= coarse


def test_sample_rejects_duplicates():
    with pytest.raises(ValueError):
        CompactSample([0.5, 0.5 + 1e-16])


def test_sample_rejects_empty():
    with pytest.raises(ValueError):
        CompactSample([])


def test_disk_requires_positive_radius():
    with pytest.raises(ValueError):
        Disk(0j, 0.0)


def test_contour_node_count_validation():
    with pytest.raises(ValueError):
        CircleContour(0j, 1.0, 15)
    with pytest.raises(ValueError):
        CircleContour(0j, 1.0, 18 + 1)
