"""Composite Gauss-Legendre quadrature helpers."""

from __future__ import annotations

import numpy as np


def gl_panels(lo: float, hi: float, panels: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [lo, hi]."""
    if panels < 1 or nodes < 1:
        raise ValueError("panels and nodes must be positive")
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def integrate_2d(f, box: tuple[float, float, float, float],
                 panels: tuple[int, int] = (8, 8), nodes: int = 20) -> float:
    """Tensor-product GL integral of f(x, y) over [x0,x1] x [y0,y1].

    ``f`` must accept broadcast arrays of shape (nx, 1) and (1, ny).
    """
    x0, x1, y0, y1 = box
    xs, wx = gl_panels(x0, x1, panels[0], nodes)
    ys, wy = gl_panels(y0, y1, panels[1], nodes)
    vals = f(xs[:, None], ys[None, :])
    return float(wx @ vals @ wy)
