"""Exact conditional sampling of pinned walks and Monte Carlo persistence.

A backward table stores, for every time layer, the mass of continuations from
each state that satisfy the endpoint constraint (and, optionally, keep the
running area nonnegative).  Forward sampling then draws each step with
probability proportional to the backward mass of the step's target, which
reproduces the conditional law exactly.

Backward tables hold every time layer, so memory grows like N^4; horizons
beyond the table budget are served by an exact single-time marginal sampler
that only needs the two free layers meeting at the requested time (the
endpoint constraint enters through the start-shift identity).  Both code
paths draw from the same conditional law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError, PreconditionError
from .fourier import g_density, g_transition
from .layers import Layer, Weight, initial_layer, run_layers, step
from .paths import StepPath, in_support
from .quad import gl_panels

#: Largest horizon for full backward tables in exact (big-integer) mode.
TABLE_EXACT_BUDGET = 48
#: Largest horizon for full backward tables in float mode (memory ~ N^4/8 floats).
TABLE_FLOAT_BUDGET = 128
#: Sample block size; block b always uses RNG stream b, so results do not
#: depend on how blocks are scheduled.
SAMPLE_BLOCK = 1 << 14


def rng_stream(seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for stream ``index`` of a seed."""
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=seed, spawn_key=(index,))))


@dataclass(frozen=True)
class PinSpec:
    """A real endpoint target and its parity-corrected lattice rounding."""

    p: tuple[float, float]

    def lattice_point(self, n: int) -> tuple[int, int]:
        """Nearest point of the time-n support in the scaled metric.

        Ties break toward the smaller coordinate.
        """
        def round_parity(x: float, parity: int) -> int:
            lo = math.floor(x)
            if (lo - parity) % 2:
                lo -= 1
            hi = lo + 2
            return lo if (x - lo) <= (hi - x) else hi

        s = round_parity(self.p[0] * math.sqrt(n), n % 2)
        a = round_parity(self.p[1] * n ** 1.5, (n * (n + 1) // 2) % 2)
        return s, a

    def scaled_back(self, n: int) -> tuple[float, float]:
        s, a = self.lattice_point(n)
        return s / math.sqrt(n), a / n ** 1.5


Pin = tuple[int, int] | None   # lattice endpoint, or None for a free table


@dataclass
class BackwardTable:
    """Constrained continuation masses for every time layer of one horizon.

    ``masses[k]`` is indexed like an origin-started layer at time k
    (row i <-> s = -k + 2i, col c <-> a = -k(k+1)/2 + 2c) and holds the mass
    of step continuations from that state to time N that satisfy the endpoint
    constraint; in positive mode, states with a < 0 at times >= 1 are zeroed
    and never contribute.  ``sampling[k]`` is the float64 view used to form
    step ratios (identical to ``masses[k]`` in float mode).
    """

    n: int
    pin: Pin
    walk_pin: int | None
    positive: bool
    exact: bool
    masses: list[np.ndarray] = field(repr=False)
    sampling: list[np.ndarray] = field(repr=False)

    def root_weight(self) -> Weight:
        v = self.masses[0][0, 0]
        return Weight.from_count(v, self.n) if self.exact else Weight.from_float(v)


def _mask_negative_area(arr: np.ndarray, k: int, exact: bool) -> None:
    tri = k * (k + 1) // 2
    kill = (tri + 1) // 2            # cols with a = -tri + 2c < 0
    if k >= 1 and kill:
        arr[:, :kill] = 0 if exact else 0.0


def build_backward(n: int, pin: Pin = None, *, walk_pin: int | None = None,
                   positivity: bool = False, exact: bool = True,
                   budget: int | None = None) -> BackwardTable:
    """Backward table for horizon n with an optional endpoint constraint.

    ``pin`` fixes the full endpoint (s, a); ``walk_pin`` fixes only the walk
    value and marginalizes the area.  Conditioning on an unreachable endpoint
    raises a PreconditionError.
    """
    if n < 1:
        raise PreconditionError("horizon must be >= 1")
    cap = budget if budget is not None else (TABLE_EXACT_BUDGET if exact else TABLE_FLOAT_BUDGET)
    if n > cap:
        raise BudgetError(
            f"horizon {n} exceeds the backward-table budget {cap}; "
            f"use float mode, raise the budget, or use the marginal sampler")
    if pin is not None and walk_pin is not None:
        raise PreconditionError("give at most one of pin and walk_pin")
    dtype = object if exact else np.float64
    tri_n = n * (n + 1) // 2
    top = np.zeros((n + 1, tri_n + 1), dtype=dtype)
    if pin is not None:
        s, a = int(pin[0]), int(pin[1])
        if not in_support(n, (s, a)) or abs(s) > n or abs(a) > tri_n:
            raise PreconditionError(f"endpoint {(s, a)} is outside the time-{n} support")
        top[(s + n) // 2, (a + tri_n) // 2] = 1 if exact else 1.0
    elif walk_pin is not None:
        s = int(walk_pin)
        if (s - n) % 2 or abs(s) > n:
            raise PreconditionError(f"walk endpoint {s} is outside the time-{n} support")
        top[(s + n) // 2, :] = 1 if exact else 1.0
    else:
        top[:, :] = 1 if exact else 1.0
    if positivity:
        _mask_negative_area(top, n, exact)

    masses: list[np.ndarray] = [np.empty(0)] * (n + 1)
    masses[n] = top
    for k in range(n - 1, -1, -1):
        tri = k * (k + 1) // 2
        nxt = masses[k + 1]
        cur = np.zeros((k + 1, tri + 1), dtype=dtype)
        width = tri + 1
        for i in range(k + 1):
            up = nxt[i + 1, i + 1:i + 1 + width]
            dn = nxt[i, i:i + width]
            cur[i, :] = up + dn
        if not exact:
            cur *= 0.5
        if positivity:
            _mask_negative_area(cur, k, exact)
        masses[k] = cur

    if masses[0][0, 0] == 0:
        raise PreconditionError("conditioning event has probability zero")
    sampling = masses if not exact else [m.astype(np.float64) for m in masses]
    return BackwardTable(n=n, pin=pin, walk_pin=walk_pin, positive=positivity,
                         exact=exact, masses=masses, sampling=sampling)


def sample_pinned(table: BackwardTable, seed: int, count: int) -> np.ndarray:
    """i.i.d. paths from the table's conditional law, as a (count, N) +-1 matrix.

    Step probabilities are proportional to the backward mass of each step's
    target state, evaluated in float64 (exact-mode counts below 2^53 convert
    losslessly).
    """
    if count < 0:
        raise PreconditionError("count must be nonnegative")
    n = table.n
    out = np.empty((count, n), dtype=np.int8)
    done = 0
    block_idx = 0
    while done < count:
        m = min(SAMPLE_BLOCK, count - done)
        rng = rng_stream(seed, block_idx)
        ii = np.zeros(m, dtype=np.int64)
        cc = np.zeros(m, dtype=np.int64)
        for k in range(n):
            nxt = table.sampling[k + 1]
            up = nxt[ii + 1, cc + ii + 1]
            dn = nxt[ii, cc + ii]
            tot = up + dn
            go_up = rng.random(m) * tot < up
            out[done:done + m, k] = np.where(go_up, 1, -1)
            cc += ii + go_up
            ii += go_up
        done += m
        block_idx += 1
    return out


def paths_to_signs(matrix: np.ndarray) -> list[str]:
    return ["".join("+" if x > 0 else "-" for x in row) for row in matrix]


def matrix_to_paths(matrix: np.ndarray) -> list[StepPath]:
    return [StepPath(tuple(int(x) for x in row)) for row in matrix]


def walk_area_endpoints(matrix: np.ndarray, k: int | None = None) -> np.ndarray:
    """(S_k, A_k) for every sampled path; k defaults to the horizon."""
    s = np.cumsum(matrix.astype(np.int64), axis=1)
    a = np.cumsum(s, axis=1)
    k = matrix.shape[1] if k is None else k
    return np.stack([s[:, k - 1], a[:, k - 1]], axis=1)


def conditional_marginal(table: BackwardTable, k: int) -> tuple[Layer, np.ndarray]:
    """Exact law of (S_k, A_k) under the table's conditioning.

    Returns the forward layer at time k (same positivity mode) and the
    normalized probability array over its grid, forward mass times backward
    mass over total.
    """
    if not (0 <= k <= table.n):
        raise PreconditionError("time must lie in [0, N]")
    fwd = run_layers(k, positive=table.positive, exact=table.exact)
    joint = fwd.counts * table.masses[k]
    if table.exact:
        total = joint.sum()
        probs = (joint / total).astype(np.float64) if total else joint.astype(np.float64)
    else:
        probs = joint / joint.sum()
    return fwd, probs


# -- scaled paths and the positivity functional -----------------------------


@dataclass(frozen=True)
class ScaledPath:
    """Breakpoints (S_{Ns}/sqrt(N), A_{Ns}/N^{3/2}) with linear interpolation."""

    horizon: int
    breakpoints: np.ndarray      # shape (N+1, 2)

    @classmethod
    def from_steps(cls, steps: np.ndarray | StepPath) -> "ScaledPath":
        arr = np.asarray(steps.steps if isinstance(steps, StepPath) else steps,
                         dtype=np.int64)
        n = arr.shape[0]
        s = np.concatenate([[0], np.cumsum(arr)])
        a = np.concatenate([[0], np.cumsum(s[1:])])
        pts = np.stack([s / math.sqrt(n), a / n ** 1.5], axis=1)
        return cls(horizon=n, breakpoints=pts)

    def at(self, t: float) -> tuple[float, float]:
        if not (0.0 <= t <= 1.0):
            raise PreconditionError("time must lie in [0, 1]")
        x = t * self.horizon
        k = min(int(math.floor(x)), self.horizon - 1)
        frac = x - k
        p = self.breakpoints
        return (float((1 - frac) * p[k, 0] + frac * p[k + 1, 0]),
                float((1 - frac) * p[k, 1] + frac * p[k + 1, 1]))


def positivity_functional(path: ScaledPath) -> float:
    """1 ∧ (inf of the scaled area over [0,1])⁺; piecewise-linear, so the
    infimum is attained at a breakpoint."""
    m = float(np.min(path.breakpoints[:, 1]))
    return min(1.0, max(0.0, m))


# -- pinned marginal density of the limit process ---------------------------


def pinned_marginal_density(t: float, pin: tuple[float, float], z1, z2):
    """Density of the limit pair at time t given its endpoint at time 1.

    g_t(0,0;z) g_{1-t}(z;pin) / g_1(0,0;pin); vectorized in (z1, z2).
    """
    if not (0.0 < t < 1.0):
        raise PreconditionError("t must lie in (0, 1)")
    num = g_transition(t, 0.0, 0.0, z1, z2) * g_transition(1.0 - t, z1, z2, pin[0], pin[1])
    return num / g_transition(1.0, 0.0, 0.0, pin[0], pin[1])


def _oracle_box(t: float, pin: tuple[float, float]) -> tuple[float, float, float, float]:
    """Bounding box holding all but ~1e-30 of the pinned marginal's mass.

    Locates the density peak on a coarse grid, estimates curvature by finite
    differences, and pads by 12 standard deviations per coordinate.
    """
    lo = min(-3.0, 1.5 * min(0.0, pin[0], pin[1]) - 3.0)
    hi = max(3.0, 1.5 * max(0.0, pin[0], pin[1]) + 3.0)
    grid = np.linspace(lo, hi, 241)
    vals = pinned_marginal_density(t, pin, grid[:, None], grid[None, :])
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    cx, cy = float(grid[i]), float(grid[j])
    h = 1e-3

    def logd(x, y):
        return math.log(float(pinned_marginal_density(t, pin, x, y)))

    dxx = (logd(cx + h, cy) - 2 * logd(cx, cy) + logd(cx - h, cy)) / h**2
    dyy = (logd(cx, cy + h) - 2 * logd(cx, cy) + logd(cx, cy - h)) / h**2
    sx, sy = 1.0 / math.sqrt(-dxx), 1.0 / math.sqrt(-dyy)
    return cx - 12 * sx, cx + 12 * sx, cy - 12 * sy, cy + 12 * sy


def pinned_oracle_moments(t: float, pin: tuple[float, float],
                          panels: int = 40, nodes: int = 12) -> dict[str, np.ndarray]:
    """Mean and covariance of the pinned marginal by 2D Gauss-Legendre quadrature."""
    x0, x1, y0, y1 = _oracle_box(t, pin)
    xs, wx = gl_panels(x0, x1, panels, nodes)
    ys, wy = gl_panels(y0, y1, panels, nodes)
    dens = pinned_marginal_density(t, pin, xs[:, None], ys[None, :])
    wgrid = wx[:, None] * wy[None, :] * dens
    mass = float(wgrid.sum())
    mx = float((xs[:, None] * wgrid).sum()) / mass
    my = float((ys[None, :] * wgrid).sum()) / mass
    cxx = float((xs[:, None] ** 2 * wgrid).sum()) / mass - mx * mx
    cyy = float((ys[None, :] ** 2 * wgrid).sum()) / mass - my * my
    cxy = float(((xs[:, None] * ys[None, :]) * wgrid).sum()) / mass - mx * my
    return {"mass": mass, "mean": np.array([mx, my]),
            "cov": np.array([[cxx, cxy], [cxy, cyy]])}


# -- the pinned CLT check -----------------------------------------------------


def _marginal_product(n: int, k: int, pin: tuple[int, int],
                      budget: int | None = None) -> tuple[Layer, np.ndarray]:
    """Conditional law of (S_k, A_k) given the endpoint, from two free layers.

    The backward mass from (s, a) equals the free (n-k)-step point mass at
    (pin_s - s, pin_a - a - (n-k) s) by the start-shift identity, so one layer
    at k and one at n - k suffice for any horizon.
    """
    m = n - k
    first = run_layers(k, exact=False, budget=budget)
    second = run_layers(m, exact=False, budget=budget)
    tri_k, tri_m = k * (k + 1) // 2, m * (m + 1) // 2
    joint = np.zeros_like(first.counts)
    for i in range(k + 1):
        s = -k + 2 * i
        s2 = pin[0] - s
        if abs(s2) > m or (s2 + m) % 2:
            continue
        i2 = (s2 + m) // 2
        twice_base = pin[1] + tri_k + tri_m - m * s
        if twice_base % 2:
            continue
        base = twice_base // 2          # c2 = base - c
        c_lo = max(0, base - tri_m)
        c_hi = min(tri_k, base)
        if c_lo > c_hi:
            continue
        seg = second.counts[i2, base - c_hi:base - c_lo + 1][::-1]
        joint[i, c_lo:c_hi + 1] = first.counts[i, c_lo:c_hi + 1] * seg
    total = joint.sum()
    if total <= 0:
        raise PreconditionError("conditioning event has probability zero")
    return first, joint / total


def _sample_from_grid(layer: Layer, probs: np.ndarray, seed: int,
                      count: int) -> np.ndarray:
    """Draw (s, a) pairs from a probability array over a layer grid."""
    flat = probs.ravel()
    cdf = np.cumsum(flat)
    cdf /= cdf[-1]
    svals = layer.s_values()
    avals = layer.a_values()
    cols = probs.shape[1]
    out = np.empty((count, 2), dtype=np.int64)
    done = 0
    block_idx = 0
    while done < count:
        m = min(SAMPLE_BLOCK, count - done)
        rng = rng_stream(seed, block_idx)
        idx = np.searchsorted(cdf, rng.random(m), side="right")
        out[done:done + m, 0] = svals[idx // cols]
        out[done:done + m, 1] = avals[idx % cols]
        done += m
        block_idx += 1
    return out


@dataclass(frozen=True)
class PinnedCltReport:
    n: int
    t: float
    pin_lattice: tuple[int, int]
    pin_scaled: tuple[float, float]
    samples: int
    method: str
    emp_mean: np.ndarray
    emp_cov: np.ndarray
    oracle_mean: np.ndarray
    oracle_cov: np.ndarray

    @property
    def mean_rel_err(self) -> np.ndarray:
        scale = np.maximum(np.abs(self.oracle_mean), np.sqrt(np.diag(self.oracle_cov)))
        return np.abs(self.emp_mean - self.oracle_mean) / scale

    @property
    def cov_rel_err(self) -> np.ndarray:
        d = np.sqrt(np.diag(self.oracle_cov))
        return np.abs(self.emp_cov - self.oracle_cov) / np.outer(d, d)


def pinned_clt_check(n: int, pin: PinSpec, t: float, samples: int, seed: int,
                     *, method: str = "auto", allow_odd: bool = False,
                     budget: int | None = None) -> PinnedCltReport:
    """Empirical scaled marginal at time t of the endpoint-pinned walk versus
    the quadrature moments of the limiting pinned marginal.

    ``method`` is "paths" (full backward table plus path sampling), "marginal"
    (exact single-time marginal sampling; any horizon), or "auto".  Both
    methods draw from the same conditional law.  Odd horizons are permitted
    only behind ``allow_odd``; no convergence claim is attached to them.
    """
    if n % 2 and not allow_odd:
        raise PreconditionError("horizon must be even (pass allow_odd to override)")
    if not (0.0 < t < 1.0):
        raise PreconditionError("t must lie in (0, 1)")
    if samples < 1:
        raise PreconditionError("need at least one sample")
    k = round(t * n)
    k = min(max(k, 1), n - 1)
    t_used = k / n
    lattice = pin.lattice_point(n)
    if method == "auto":
        method = "paths" if n <= TABLE_FLOAT_BUDGET else "marginal"
    if method == "paths":
        table = build_backward(n, pin=lattice, positivity=False, exact=False,
                               budget=budget)
        steps = sample_pinned(table, seed, samples)
        pts = walk_area_endpoints(steps, k).astype(np.float64)
    elif method == "marginal":
        layer, probs = _marginal_product(n, k, lattice, budget=budget)
        pts = _sample_from_grid(layer, probs, seed, samples).astype(np.float64)
    else:
        raise PreconditionError(f"unknown method {method!r}")
    pts[:, 0] /= math.sqrt(n)
    pts[:, 1] /= n ** 1.5
    emp_mean = pts.mean(axis=0)
    emp_cov = np.cov(pts.T, bias=False)
    scaled_pin = (lattice[0] / math.sqrt(n), lattice[1] / n ** 1.5)
    oracle = pinned_oracle_moments(t_used, scaled_pin)
    return PinnedCltReport(
        n=n, t=t_used, pin_lattice=lattice, pin_scaled=scaled_pin,
        samples=samples, method=method,
        emp_mean=emp_mean, emp_cov=emp_cov,
        oracle_mean=oracle["mean"], oracle_cov=oracle["cov"],
    )


# -- Monte Carlo persistence --------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    n: int
    regime: str
    samples: int
    estimate: float
    std_error: float


def area_nonnegative(matrix: np.ndarray) -> np.ndarray:
    s = np.cumsum(matrix.astype(np.int64), axis=1)
    a = np.cumsum(s, axis=1)
    return (a >= 0).all(axis=1)


def mc_persistence(n: int, samples: int, seed: int, regime: str = "free",
                   *, budget: int | None = None) -> McEstimate:
    """Monte Carlo estimate of a persistence probability.

    free: raw paths and the area-nonnegativity indicator.  full-bridge /
    s-bridge: exact endpoint-conditioned paths from a backward table, then
    the same indicator; the estimate is unbiased for the conditional
    probability, with binomial standard error.
    """
    if samples < 1:
        raise PreconditionError("need at least one sample")
    if regime == "free":
        if n < 1:
            raise PreconditionError("n must be >= 1")
        hits = 0
        done = 0
        block_idx = 0
        while done < samples:
            m = min(SAMPLE_BLOCK, samples - done)
            rng = rng_stream(seed, block_idx)
            block = rng.integers(0, 2, size=(m, n), dtype=np.int8) * 2 - 1
            hits += int(area_nonnegative(block).sum())
            done += m
            block_idx += 1
    elif regime in ("full-bridge", "s-bridge"):
        if regime == "full-bridge":
            if n % 4:
                raise PreconditionError("full-bridge horizon must be a multiple of 4")
            table = build_backward(n, pin=(0, 0), positivity=False, exact=False,
                                   budget=budget)
        else:
            if n % 2:
                raise PreconditionError("s-bridge horizon must be even")
            table = build_backward(n, walk_pin=0, positivity=False, exact=False,
                                   budget=budget)
        steps = sample_pinned(table, seed, samples)
        hits = int(area_nonnegative(steps).sum())
    else:
        raise PreconditionError(f"unknown regime {regime!r}")
    p = hits / samples
    se = math.sqrt(max(p * (1.0 - p), 1.0 / samples) / samples)
    return McEstimate(n=n, regime=regime, samples=samples, estimate=p, std_error=se)
