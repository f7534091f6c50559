import numpy as np
import pytest

from feastlib import build_contour, gauss_legendre
from feastlib.params import ALLOWED_CONTOUR_POINTS

# Printed reference constants for the 8-point rule (positive nodes).
_EIGHT_POINT = [
    (0.183434642495649, 0.362683783378361),
    (0.525532409916328, 0.313706645877887),
    (0.796666477413626, 0.222381034453374),
    (0.960289856497536, 0.101228536290376),
]


def test_eight_point_reference_pairs():
    rule = gauss_legendre(8)
    for x_ref, w_ref in _EIGHT_POINT:
        i = int(np.argmin(np.abs(rule.nodes - x_ref)))
        assert abs(rule.nodes[i] - x_ref) <= 1e-15
        assert abs(rule.weights[i] - w_ref) <= 1e-15
        # mirrored node with equal weight
        j = int(np.argmin(np.abs(rule.nodes + x_ref)))
        assert rule.nodes[j] == -rule.nodes[i]
        assert rule.weights[j] == rule.weights[i]


def test_four_point_rule_values():
    # Frozen from Newton iteration on the degree-4 polynomial roots,
    # cross-checked by exact integration of x^0..x^7 below.
    rule = gauss_legendre(4)
    nodes = np.sort(rule.nodes)
    ref_nodes = [-0.8611363115940526, -0.3399810435848563,
                 0.3399810435848563, 0.8611363115940526]
    ref_weights = [0.3478548451374538, 0.6521451548625461,
                   0.6521451548625461, 0.3478548451374538]
    assert np.allclose(nodes, ref_nodes, rtol=0, atol=1e-15)
    order = np.argsort(rule.nodes)
    assert np.allclose(rule.weights[order], ref_weights, rtol=0, atol=1e-15)


@pytest.mark.parametrize("ne", ALLOWED_CONTOUR_POINTS)
def test_rule_invariants(ne):
    rule = gauss_legendre(ne)
    assert rule.nodes.shape == (ne,)
    assert abs(rule.weights.sum() - 2.0) <= 1e-13
    assert np.all(rule.weights > 0)
    assert np.all((rule.nodes > -1.0) & (rule.nodes < 1.0))
    assert np.all(np.diff(rule.nodes) > 0)
    # exact pairing by construction
    assert np.array_equal(rule.nodes, -rule.nodes[::-1])
    assert np.array_equal(rule.weights, rule.weights[::-1])


@pytest.mark.parametrize("ne", ALLOWED_CONTOUR_POINTS)
def test_polynomial_exactness(ne):
    rule = gauss_legendre(ne)
    for k in range(2 * ne):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        approx = float(np.sum(rule.weights * rule.nodes ** k))
        assert abs(approx - exact) <= 1e-12, (ne, k)


def test_unsupported_order_rejected():
    with pytest.raises(ValueError):
        gauss_legendre(7)
    with pytest.raises(ValueError):
        gauss_legendre(2)


def test_contour_geometry():
    rule = gauss_legendre(8)
    c = build_contour(rule, -5.0, 5.0)
    assert c.radius == 5.0
    assert c.center == 0.0
    assert np.all(np.abs(np.abs(c.z - c.center) - c.radius) <= 1e-13)
    assert np.all(c.z.imag > 0)
    # theta = -(pi/2)(x - 1), independent recomputation
    assert np.allclose(c.theta, -(np.pi / 2) * (rule.nodes - 1.0), rtol=0, atol=0)
    assert np.allclose(c.z, c.center + c.radius * np.exp(1j * c.theta), rtol=0, atol=1e-13)


def test_contour_midnode_maps_to_apex():
    # Odd orders carry an exact zero node, which maps to the circle apex.
    rule = gauss_legendre(3)
    assert rule.nodes[1] == 0.0
    c = build_contour(rule, -5.0, 5.0)
    assert c.theta[1] == np.pi / 2
    assert abs(c.z[1] - 5j) <= 1e-15


def test_contour_shifted_interval():
    c = build_contour(gauss_legendre(8), 1.0, 3.0)
    assert c.center == 2.0
    assert c.radius == 1.0
    assert np.all(c.z.imag > 0)
    # cross-check against an independent complex-exponential evaluation
    x = gauss_legendre(8).nodes
    z_ref = 2.0 + np.exp(1j * (np.pi / 2) * (1.0 - x))
    assert np.allclose(c.z, z_ref, rtol=0, atol=1e-14)


def test_contour_ordering_preserved():
    rule = gauss_legendre(8)
    c = build_contour(rule, -1.0, 1.0)
    # ascending nodes map to strictly decreasing angles
    assert np.all(np.diff(c.theta) < 0)


def test_invalid_interval_rejected():
    with pytest.raises(ValueError):
        build_contour(gauss_legendre(8), 1.0, 1.0)
    with pytest.raises(ValueError):
        build_contour(gauss_legendre(8), 2.0, -2.0)
