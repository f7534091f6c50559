"""Gauss-Legendre rules and the complex half-circle contour over an interval."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ALLOWED_CONTOUR_POINTS


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of an ``order``-point Gauss-Legendre rule on [-1, 1].

    Nodes are stored in ascending order; weights sum to 2.
    """

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class Contour:
    """Quadrature points mapped onto the open upper half-circle over
    [emin, emax]: ``z[e] = center + radius * exp(1j * theta[e])`` with
    ``theta[e] = -(pi/2) * (x[e] - 1)`` in (0, pi).
    """

    theta: np.ndarray
    z: np.ndarray
    weights: np.ndarray
    radius: float
    center: float

    def __len__(self) -> int:
        return len(self.z)


def gauss_legendre(ne: int) -> QuadratureRule:
    """Gauss-Legendre nodes/weights of one of the supported orders.

    Roots of the Legendre polynomial are found by Newton iteration from the
    Chebyshev-angle initial guess (100-iteration cap, 1e-16 step tolerance);
    the negative half is mirrored from the positive one so that paired nodes
    are exact negations with equal weights.
    """
    if ne not in ALLOWED_CONTOUR_POINTS:
        raise ValueError(
            f"unsupported quadrature order {ne}; allowed: {ALLOWED_CONTOUR_POINTS}"
        )
    # Roots come in +/- pairs; compute the strictly positive ones (the upper
    # half of the Chebyshev-angle guesses) and mirror.
    k = np.arange(1, ne // 2 + 1)
    x = np.cos(np.pi * (k - 0.25) / (ne + 0.5))
    for _ in range(100):
        p, dp = _legendre_and_derivative(ne, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-16:
            break
    _, dp = _legendre_and_derivative(ne, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x, w = x[::-1], w[::-1]  # ascending positives
    if ne % 2:
        nodes = np.concatenate([-x[::-1], [0.0], x])
        p0, dp0 = _legendre_and_derivative(ne, np.array([0.0]))
        w0 = 2.0 / (dp0 * dp0)
        weights = np.concatenate([w[::-1], w0, w])
    else:
        nodes = np.concatenate([-x[::-1], x])
        weights = np.concatenate([w[::-1], w])
    return QuadratureRule(ne, nodes, weights)


def _legendre_and_derivative(n: int, x: np.ndarray):
    """Evaluate P_n(x) and P_n'(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def build_contour(rule: QuadratureRule, emin: float, emax: float) -> Contour:
    """Map a quadrature rule onto the half-circle contour over [emin, emax]."""
    if not emin < emax:
        raise ValueError(f"invalid interval: emin={emin} >= emax={emax}")
    radius = (emax - emin) / 2.0
    center = (emax + emin) / 2.0
    theta = -(np.pi / 2.0) * (rule.nodes - 1.0)
    z = center + radius * np.exp(1j * theta)
    return Contour(theta, z, rule.weights.copy(), radius, center)
