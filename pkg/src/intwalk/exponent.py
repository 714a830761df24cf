"""Decay-exponent estimation by least squares on log-log series."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .layers import check_budget, initial_layer, step
from . import sampling

REGIMES = ("free", "s-bridge", "full-bridge")

#: Grid sizes below this are dropped before fitting (finite-size bias);
#: artifact configuration, reported alongside every fit.
DEFAULT_MIN_N = 8


@dataclass(frozen=True)
class DecayPoint:
    n: int
    p: float
    exact: bool      # deterministic DP value (either precision) vs MC estimate
    num: int | None = None   # exact integer numerator/denominator, when available
    den: int | None = None


@dataclass(frozen=True)
class DecaySeries:
    regime: str
    points: tuple[DecayPoint, ...]

    def __post_init__(self) -> None:
        ns = [pt.n for pt in self.points]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise PreconditionError("sizes must be strictly increasing")
        if any(not (0.0 < pt.p <= 1.0) for pt in self.points):
            raise PreconditionError("probabilities must lie in (0, 1]")


@dataclass(frozen=True)
class ExponentFit:
    theta: float
    intercept: float
    residual: float
    n_used: tuple[int, ...]


def fit_exponent(series: DecaySeries, *, min_n: int = 0) -> ExponentFit:
    """Least-squares slope of log p against log n, negated.

    Exact power laws p = C n^-theta are recovered with zero residual; the
    constant goes into the intercept.  Points with n < min_n are excluded.
    """
    pts = [pt for pt in series.points if pt.n >= min_n]
    if len(pts) < 3:
        raise PreconditionError("need at least 3 points to fit")
    x = np.log([pt.n for pt in pts])
    y = np.log([pt.p for pt in pts])
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.sqrt(np.mean((design @ np.array([slope, intercept]) - y) ** 2)))
    return ExponentFit(theta=float(-slope), intercept=float(intercept),
                       residual=resid, n_used=tuple(pt.n for pt in pts))


def _dp_series(regime: str, n_list: list[int], exact: bool,
               budget: int | None) -> list[DecayPoint]:
    """One rolling DP pass serving every size of one regime.

    free sizes are the horizons themselves; bridge regimes read the
    conditioned mass at horizon 4n (full) or 2n-style even horizons (walk
    bridge conditions at the given even n directly).
    """
    horizons = sorted(set(n_list))
    for n in horizons:
        if regime == "full-bridge" and n % 4:
            raise PreconditionError("full-bridge sizes must be multiples of 4")
        if regime == "s-bridge" and n % 2:
            raise PreconditionError("s-bridge sizes must be even")
    top = horizons[-1]
    check_budget(top, exact, budget)
    free = initial_layer(exact=exact)
    pos = initial_layer(positive=True, exact=exact)
    want = set(horizons)
    out = []
    for k in range(1, top + 1):
        free = step(free)
        pos = step(pos)
        if k not in want:
            continue
        if regime == "free":
            num, den = pos.total(), free.total()
        elif regime == "full-bridge":
            num, den = pos.count_at(0, 0), free.count_at(0, 0)
        else:
            num, den = (pos.count_where(s_lo=0, s_hi=0),
                        free.count_where(s_lo=0, s_hi=0))
        if den == 0:
            raise PreconditionError(f"null conditioning event at n={k}")
        out.append(DecayPoint(n=k, p=float(num) / float(den), exact=True,
                              num=int(num) if exact else None,
                              den=int(den) if exact else None))
    return out


def regime_suite(n_list: list[int], regime: str, *, source: str = "dp",
                 exact: bool = False, samples: int = 100000, seed: int = 0,
                 budget: int | None = None) -> DecaySeries:
    """Assemble a persistence decay series for one conditioning regime.

    ``source``: "dp" computes every point deterministically by lattice DP;
    "mc" estimates every point with the Monte Carlo sampler (flagged
    non-exact).  Bridge regimes require the sizes to admit the conditioning
    event and propagate null-conditioning errors.
    """
    if regime not in REGIMES:
        raise PreconditionError(f"unknown regime {regime!r}")
    if not n_list:
        raise PreconditionError("empty size list")
    if source == "dp":
        pts = _dp_series(regime, list(n_list), exact, budget)
    elif source == "mc":
        pts = [DecayPoint(n=n,
                          p=sampling.mc_persistence(n, samples, seed + i, regime,
                                                    budget=budget).estimate,
                          exact=False)
               for i, n in enumerate(sorted(set(n_list)))]
    else:
        raise PreconditionError(f"unknown source {source!r}")
    return DecaySeries(regime=regime, points=tuple(pts))
