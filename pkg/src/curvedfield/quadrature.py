"""Quadrature utilities: composite Gauss-Legendre grids and tabulated fallback.

Transforms integrate tabulated integrands.  Grids made by gauss_legendre_grid
carry their own weights and integrate polynomials of degree < 2*order per
panel exactly; arbitrary tabulated grids fall back to the trapezoid rule.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError


def gauss_legendre_grid(a: float, b: float, panels: int, order: int = 8):
    """Composite Gauss-Legendre nodes/weights on [a, b] with equal panels.

    Returns (x, w), both shape (panels*order,), x strictly increasing.
    """
    if not (b > a):
        raise DomainError(f"empty integration interval [{a}, {b}]")
    if panels < 1 or order < 1:
        raise DomainError("panels and order must be >= 1")
    xg, wg = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def integrate_samples(x: np.ndarray, y: np.ndarray, weights: np.ndarray | None = None):
    """Integrate samples y over x; use supplied weights if present.

    y may have extra leading axes; integration runs over the last axis.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y)
    if weights is not None:
        return y @ np.asarray(weights, dtype=float)
    return np.trapz(y, x, axis=-1)


def tail_fraction(contrib: np.ndarray, tail_nodes: int):
    """|sum over the trailing nodes| / sum|contrib|, per output value.

    contrib has node contributions along the last axis.  Used as the
    monitored tail estimate for truncated infinite-range integrals.
    """
    total = np.sum(np.abs(contrib), axis=-1)
    tail = np.abs(np.sum(contrib[..., -tail_nodes:], axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(total > 0, tail / np.maximum(total, np.finfo(float).tiny), 0.0)
    return frac
