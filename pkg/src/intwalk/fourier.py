"""Characteristic-function machinery and the Gaussian endpoint density.

The endpoint pair (S_n, A_n) has characteristic function
f_n(t1, t2) = prod_{j=1..n} cos(t1 + j t2), and its lattice point masses are
recovered by inverting f_n over [-pi, pi]^2.  After scaling by the lattice
cell volume n^2/4, the masses converge uniformly to the closed-form density
g of (Brownian motion, integrated Brownian motion) at time 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .layers import run_layers
from .quad import gl_panels

#: Inverse covariance pair of the limiting Gaussian: covariance R_INV, precision R.
GAUSS_R = np.array([[4.0, -6.0], [-6.0, 12.0]])
GAUSS_R_INV = np.array([[1.0, 0.5], [0.5, 1.0 / 3.0]])
GAUSS_NORM = math.sqrt(3.0) / math.pi


def g_density(x, y):
    """Endpoint density (sqrt(3)/pi) exp(-2x^2 + 6xy - 6y^2); vectorized."""
    return GAUSS_NORM * np.exp(-2.0 * np.square(x) + 6.0 * x * y - 6.0 * np.square(y))


def g_transition(t: float, u, v, x, y):
    """Transition density over a time interval of length t.

    g_t(u, v; x, y) = t^-2 g((x - u)/sqrt(t), (y - v - t u)/t^{3/2}).
    """
    if t <= 0:
        raise PreconditionError("transition time must be positive")
    rt = math.sqrt(t)
    return g_density((x - u) / rt, (y - v - t * u) / (t * rt)) / (t * t)


def char_fn(n: int, t1, t2):
    """prod_{j=1..n} cos(t1 + j t2); accepts broadcast arrays."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    t1 = np.asarray(t1, dtype=np.float64)
    t2 = np.asarray(t2, dtype=np.float64)
    out = np.ones(np.broadcast(t1, t2).shape)
    for j in range(1, n + 1):
        out = out * np.cos(t1 + j * t2)
    if out.shape == ():
        return float(out)
    return out


# -- inversion ---------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre resolution for the inversion integral."""

    panels_t1: int
    panels_t2: int
    nodes: int = 16
    rule: str = "gauss-legendre"

    def __post_init__(self) -> None:
        if self.panels_t1 * self.nodes < 4 or self.panels_t2 * self.nodes < 4:
            raise PreconditionError("need at least 4 quadrature nodes per dimension")

    @classmethod
    def for_horizon(cls, n: int, nodes: int = 16) -> "QuadratureSpec":
        """Panel counts that resolve the integrand's oscillation at horizon n.

        The product of cosines contains t2-frequencies up to n(n+1)/2 and the
        inversion cosine adds as much again; panels grow linearly with that
        bandwidth so each panel sees a bounded number of oscillations.
        """
        band2 = n * (n + 1)          # integrand + inversion factor
        band1 = 2 * n
        margin = max(2, nodes - 6)
        return cls(
            panels_t1=max(4, int(np.ceil(math.pi * band1 / margin))),
            panels_t2=max(4, int(np.ceil(math.pi * band2 / margin))),
            nodes=nodes,
        )

    def min_panels_ok(self, n: int) -> bool:
        ref = QuadratureSpec.for_horizon(n, nodes=self.nodes)
        return self.panels_t1 >= ref.panels_t1 and self.panels_t2 >= ref.panels_t2


def _cf_grid(n: int, spec: QuadratureSpec):
    x1, w1 = gl_panels(-math.pi, math.pi, spec.panels_t1, spec.nodes)
    x2, w2 = gl_panels(-math.pi, math.pi, spec.panels_t2, spec.nodes)
    f = char_fn(n, x1[:, None], x2[None, :])
    return x1, w1, x2, w2, f


def invert_cf_grid(n: int, l1_vals, l2_vals, spec: QuadratureSpec | None = None) -> np.ndarray:
    """Inversion integral for every pair in l1_vals x l2_vals at once.

    P(Y = l) = (2pi)^-2 Int f(t) cos(t1 l1 + t2 l2) dt factors through
    cos(a+b) = cos a cos b - sin a sin b into four 1D transforms, so a full
    support sweep costs three matrix products instead of one 2D quadrature
    per lattice point.
    """
    if spec is None:
        spec = QuadratureSpec.for_horizon(n)
    elif not spec.min_panels_ok(n):
        raise PreconditionError(
            f"quadrature spec below the minimum panel counts for n={n}")
    x1, w1, x2, w2, f = _cf_grid(n, spec)
    l1 = np.asarray(l1_vals, dtype=np.float64)
    l2 = np.asarray(l2_vals, dtype=np.float64)
    fw = f * w1[:, None] * w2[None, :]
    c1 = np.cos(np.outer(l1, x1)); s1 = np.sin(np.outer(l1, x1))
    c2 = np.cos(np.outer(l2, x2)); s2 = np.sin(np.outer(l2, x2))
    vals = c1 @ fw @ c2.T - s1 @ fw @ s2.T
    return vals / (4.0 * math.pi**2)


def invert_cf(n: int, l: tuple[int, int], spec: QuadratureSpec | None = None,
              *, estimate_error: bool = False):
    """Numerical inversion value at one lattice point.

    With ``estimate_error=True`` returns (value, error estimate), the estimate
    being the difference against a refinement with 50% more panels.
    """
    val = float(invert_cf_grid(n, [l[0]], [l[1]], spec)[0, 0])
    if not estimate_error:
        return val
    base = spec if spec is not None else QuadratureSpec.for_horizon(n)
    fine = QuadratureSpec(panels_t1=int(base.panels_t1 * 1.5) + 1,
                          panels_t2=int(base.panels_t2 * 1.5) + 1,
                          nodes=base.nodes)
    ref = float(invert_cf_grid(n, [l[0]], [l[1]], fine)[0, 0])
    return val, abs(val - ref)


# -- the local limit error ----------------------------------------------------


def llt_sup_error(n: int, *, exact: bool | None = None, budget: int | None = None) -> float:
    """sup over the reachable support of |(n^2/4) P((S_n,A_n)=l) - g(l1/sqrt n, l2/n^1.5)|.

    The sup runs over the full parity lattice within |l1| <= n, |l2| <= n(n+1)/2;
    outside that rectangle the point mass is zero and g is exponentially smaller
    than the reported sup (g decays along rays, so its values beyond the
    rectangle are dominated by its boundary values, which the sweep includes).
    """
    if exact is None:
        exact = n <= 64
    layer = run_layers(n, exact=exact, budget=budget)
    if exact:
        probs = (layer.counts / Fraction(1 << n)).astype(np.float64)
    else:
        probs = layer.counts
    x = layer.s_values().astype(np.float64) / math.sqrt(n)
    y = layer.a_values().astype(np.float64) / n**1.5
    gvals = g_density(x[:, None], y[None, :])
    return float(np.max(np.abs(0.25 * n * n * probs - gvals)))


# -- quantitative lemma scans --------------------------------------------------


@dataclass(frozen=True)
class QuadraticScan:
    n: int
    min_ratio: float
    c1: Fraction        # 3(n+1) / (2(2n+1))
    min_g: Fraction     # n - S1^2/S2, the minimum of sum (jt-1)^2 over t


def quadratic_bound_scan(n: int, grid: int = 2048) -> QuadraticScan:
    """Grid minimum of sum_j (t1 + j t2)^2 / (n t1^2 + n^3 t2^2).

    The ratio is scale-invariant, so directions are scanned on the unit
    circle both isotropically and with t2 compressed by 1/n (the natural
    anisotropy of the denominator).
    """
    if n < 2:
        raise PreconditionError("n must be >= 2")
    if grid < 8:
        raise PreconditionError("grid too coarse")
    s1 = n * (n + 1) // 2
    s2 = n * (n + 1) * (2 * n + 1) // 6
    phi = np.linspace(0.0, math.pi, grid, endpoint=False)[1:]
    ratios = []
    for squeeze in (1.0, 1.0 / n):
        t1 = np.cos(phi)
        t2 = np.sin(phi) * squeeze
        num = n * t1**2 + 2 * s1 * t1 * t2 + s2 * t2**2
        den = n * t1**2 + n**3 * t2**2
        ratios.append(np.min(num / den))
    return QuadraticScan(
        n=n,
        min_ratio=float(min(ratios)),
        c1=Fraction(3 * (n + 1), 2 * (2 * n + 1)),
        min_g=n - Fraction(s1 * s1, s2),
    )


@dataclass(frozen=True)
class DecayScan:
    n: int
    eps: float
    sup_abs: float
    per_step: float
    grid_t1: int
    grid_t2: int


def cf_decay_scan(n: int, eps: float, grid: int = 384) -> DecayScan:
    """Grid supremum of |f_n| off the eps-neighborhood of the degenerate points.

    |f_n| is pi-periodic in both arguments, so the scan covers [0, pi)^2 with
    the weighted torus distance d(t) = |t1| + n |t2| (each coordinate reduced
    mod pi to the nearest degenerate point).  The reported sup is a grid lower
    bound of the true sup; a second, locally refined pass sharpens it.
    """
    if not (0.0 < eps < math.pi / 2):
        raise PreconditionError("eps must lie in (0, pi/2)")
    if n < 4:
        raise PreconditionError("n must be >= 4")
    g1 = grid
    g2 = max(grid, 4 * n)

    def masked_sup(t1_vals, t2_vals):
        d1 = np.minimum(t1_vals % math.pi, math.pi - (t1_vals % math.pi))
        d2 = np.minimum(t2_vals % math.pi, math.pi - (t2_vals % math.pi))
        dist = d1[:, None] + n * d2[None, :]
        f = np.abs(char_fn(n, t1_vals[:, None], t2_vals[None, :]))
        f[dist < eps] = 0.0
        idx = np.unravel_index(np.argmax(f), f.shape)
        return float(f[idx]), float(t1_vals[idx[0]]), float(t2_vals[idx[1]])

    t1 = np.linspace(0.0, math.pi, g1, endpoint=False)
    t2 = np.linspace(0.0, math.pi, g2, endpoint=False)
    sup, b1, b2 = masked_sup(t1, t2)
    h1, h2 = math.pi / g1, math.pi / g2
    r1 = np.linspace(b1 - h1, b1 + h1, 129)
    r2 = np.linspace(b2 - h2, b2 + h2, 129)
    sup2, _, _ = masked_sup(r1, r2)
    sup = max(sup, sup2)
    return DecayScan(n=n, eps=eps, sup_abs=sup, per_step=sup ** (1.0 / n),
                     grid_t1=g1, grid_t2=g2)
