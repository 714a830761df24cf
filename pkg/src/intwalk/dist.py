"""Point probabilities, persistence, bridges, conditioned moments and identities.

Every quantity is computed by the dense lattice DP of :mod:`intwalk.layers`.
In exact mode results are dyadic rationals (or ratios of them for conditional
quantities); float mode swaps in float64 layers behind the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .layers import Layer, Weight, initial_layer, run_layers, step

Scalar = Fraction | float


def _ratio(num, den, exact: bool) -> Scalar:
    if exact:
        if den == 0:
            raise PreconditionError("conditioning event has probability zero")
        return Fraction(int(num), int(den))
    if den == 0.0:
        raise PreconditionError("conditioning event has probability zero")
    return float(num) / float(den)


def point_prob(n: int, l: tuple[int, int], *, exact: bool = True,
               budget: int | None = None) -> Weight:
    """P((S_n, A_n) = l); zero off the parity support."""
    layer = run_layers(n, exact=exact, budget=budget)
    return layer.prob_at(int(l[0]), int(l[1]))


def persistence(n: int, *, exact: bool = True, budget: int | None = None) -> Weight:
    """P(A_1 >= 0, ..., A_n >= 0): retained mass of the area-constrained DP."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return run_layers(n, positive=True, exact=exact, budget=budget).mass()


@dataclass(frozen=True)
class BridgeResult:
    n: int
    joint: Weight          # P(positivity and endpoint event)
    endpoint: Weight       # P(endpoint event)
    conditional: Scalar    # their ratio


def bridge_persistence(n: int, *, exact: bool = True,
                       budget: int | None = None) -> BridgeResult:
    """P(A_1 >= 0, ..., A_n >= 0 | S_n = A_n = 0).

    The pair returns to (0,0) only at times divisible by 4; other n are a
    null conditioning event and are rejected.
    """
    if n < 4 or n % 4:
        raise PreconditionError("bridge horizon must be a positive multiple of 4")
    pos = run_layers(n, positive=True, exact=exact, budget=budget)
    free = run_layers(n, exact=exact, budget=budget)
    num = pos.count_at(0, 0)
    den = free.count_at(0, 0)
    return BridgeResult(
        n=n,
        joint=pos.prob_at(0, 0),
        endpoint=free.prob_at(0, 0),
        conditional=_ratio(num, den, exact),
    )


def s_bridge_persistence(n: int, *, exact: bool = True,
                         budget: int | None = None) -> BridgeResult:
    """P(A_1 >= 0, ..., A_n >= 0 | S_n = 0), marginalizing the area endpoint."""
    if n < 2 or n % 2:
        raise PreconditionError("walk-bridge horizon must be a positive even number")
    pos = run_layers(n, positive=True, exact=exact, budget=budget)
    free = run_layers(n, exact=exact, budget=budget)
    num = pos.count_where(s_lo=0, s_hi=0)
    den = free.count_where(s_lo=0, s_hi=0)
    return BridgeResult(
        n=n,
        joint=Weight.from_count(num, n) if exact else Weight.from_float(num),
        endpoint=Weight.from_count(den, n) if exact else Weight.from_float(den),
        conditional=_ratio(num, den, exact),
    )


@dataclass(frozen=True)
class ConditionalMoments:
    n: int
    e_abs_s: Scalar     # E(|S_n| | positivity)
    e_a: Scalar         # E(A_n | positivity)
    e_s_plus: Scalar    # E(S_n^+ | positivity)


def conditional_moments(n: int, *, exact: bool = True,
                        budget: int | None = None) -> ConditionalMoments:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    layer = run_layers(n, positive=True, exact=exact, budget=budget)
    total = layer.total()
    row_sums = layer.counts.sum(axis=1)
    svals = layer.s_values()
    abs_s = sum(abs(int(s)) * w for s, w in zip(svals, row_sums))
    s_plus = sum(int(s) * w for s, w in zip(svals, row_sums) if s > 0)
    col_sums = layer.counts.sum(axis=0)
    avals = layer.a_values()
    if layer.exact:
        a_sum = sum(int(a) * w for a, w in zip(avals, col_sums))
    else:
        a_sum = float(np.dot(avals.astype(np.float64), col_sums))
    return ConditionalMoments(
        n=n,
        e_abs_s=_ratio(abs_s, total, exact),
        e_a=_ratio(a_sum, total, exact),
        e_s_plus=_ratio(s_plus, total, exact),
    )


def scaled_pair_covariance(n: int, *, exact: bool = True,
                           budget: int | None = None) -> dict[str, Scalar]:
    """Exact Var/Cov of (S_n/sqrt(n), A_n/n^{3/2}) from the free layer.

    Converges to the limiting matrix [[1, 1/2], [1/2, 1/3]] at rate O(1/n).
    """
    layer = run_layers(n, exact=exact, budget=budget)
    total = layer.total()
    svals = layer.s_values()
    avals = layer.a_values()
    row_sums = layer.counts.sum(axis=1)
    col_sums = layer.counts.sum(axis=0)
    s2 = sum(int(s) ** 2 * w for s, w in zip(svals, row_sums))
    if layer.exact:
        a2 = sum(int(a) ** 2 * w for a, w in zip(avals, col_sums))
        sa = 0
        for i, s in enumerate(svals):
            sa += int(s) * sum(int(a) * w for a, w in zip(avals, layer.counts[i]))
    else:
        af = avals.astype(np.float64)
        a2 = float(np.dot(af**2, col_sums))
        sa = float(np.dot(svals.astype(np.float64), layer.counts @ af))
    var_s = _ratio(s2, total, exact) / n
    var_a = _ratio(a2, total, exact) / Fraction(n) ** 3 if exact else _ratio(a2, total, exact) / n**3
    cov = _ratio(sa, total, exact) / Fraction(n) ** 2 if exact else _ratio(sa, total, exact) / n**2
    return {"var_s": var_s, "var_a": var_a, "cov_sa": cov}


# -- first-passage identities (walk only) --------------------------------


@dataclass(frozen=True)
class FirstPassage:
    n: int
    p_survive: Scalar   # P(walk stays above -1 through time n)
    lhs: Scalar         # E[S_n; no visit to -1]
    rhs: Scalar         # P(visit to -1 by time n)


def _walk_survival(n: int, floor: int) -> list[int]:
    """Counts of n-step walks with S_k >= floor for all 1 <= k <= n, by endpoint.

    Returns a list indexed by i with S = -n + 2i.
    """
    counts = {0: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for s, c in counts.items():
            for x in (1, -1):
                t = s + x
                if t >= floor:
                    nxt[t] = nxt.get(t, 0) + c
        counts = nxt
    return [counts.get(-n + 2 * i, 0) for i in range(n + 1)]


def first_passage(n: int, *, exact: bool = True) -> FirstPassage:
    """Survival above -1 and both sides of the optional-stopping identity.

    With v the first visit of the walk to -1, E[S_n; v > n] = P(v <= n)
    exactly at every n.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    alive = _walk_survival(n, floor=0)
    total = 1 << n
    surv = sum(alive)
    lhs_num = sum((-n + 2 * i) * c for i, c in enumerate(alive))
    p_surv = _ratio(surv, total, True)
    lhs = _ratio(lhs_num, total, True)
    rhs = 1 - p_surv
    if not exact:
        return FirstPassage(n, float(p_surv), float(lhs), float(rhs))
    return FirstPassage(n, p_surv, lhs, rhs)


def strict_positive_moment(n: int, *, exact: bool = True) -> Scalar:
    """E(S_{n+1} | S_i > 0 for 1 <= i <= n+1).

    Satisfies the closed identity 1 + P(v <= n) / P(v > n) with v the first
    visit to -1 of an independent walk.
    """
    if n < 0:
        raise PreconditionError("n must be >= 0")
    alive = _walk_survival(n + 1, floor=1)
    surv = sum(alive)
    num = sum((-(n + 1) + 2 * i) * c for i, c in enumerate(alive))
    val = _ratio(num, surv, True)
    return val if exact else float(val)


# -- comparison inequalities ----------------------------------------------


def _walk_tail_counts(n: int) -> list[int]:
    """Binomial endpoint counts of the free n-step walk, index i <-> S = -n + 2i."""
    row = [1]
    for _ in range(n):
        row = [ (row[i - 1] if i >= 1 else 0) + (row[i] if i < len(row) else 0)
                for i in range(len(row) + 1) ]
    return row


def _walk_prob_ge(n: int, m: int) -> Fraction:
    row = _walk_tail_counts(n)
    c = sum(cnt for i, cnt in enumerate(row) if -n + 2 * i >= m)
    return Fraction(c, 1 << n)


def _walk_prob_abs_le(n: int, m: int) -> Fraction:
    if n == 0:
        return Fraction(1 if m >= 0 else 0)
    row = _walk_tail_counts(n)
    c = sum(cnt for i, cnt in enumerate(row) if abs(-n + 2 * i) <= m)
    return Fraction(c, 1 << n)


@dataclass(frozen=True)
class BoundCheck:
    lhs: Scalar
    rhs: Scalar

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs


def tail_joint_bound(n: int, l: int, m: int, *, exact: bool = True,
                     budget: int | None = None) -> BoundCheck:
    """P(S_n >= m, A_n >= l*m | positivity) >= P(S_l >= 2m) P(|S_{n-l}| <= m)."""
    if not (1 <= l < n):
        raise PreconditionError("need 1 <= l < n")
    if m < 0:
        raise PreconditionError("m must be nonnegative")
    layer = run_layers(n, positive=True, exact=exact, budget=budget)
    num = layer.count_where(s_lo=m, a_lo=l * m)
    lhs = _ratio(num, layer.total(), exact)
    rhs = _walk_prob_ge(l, 2 * m) * _walk_prob_abs_le(n - l, m)
    return BoundCheck(lhs=lhs, rhs=rhs if exact else float(rhs))


def association_check(l: int, m: int, *, exact: bool = True,
                      budget: int | None = None) -> BoundCheck:
    """P({S_l >= 2m} and positivity) >= P(S_l >= 2m) P(positivity)."""
    if l < 1 or m < 0:
        raise PreconditionError("need l >= 1 and m >= 0")
    pos = run_layers(l, positive=True, exact=exact, budget=budget)
    scale = 1 << l if exact else 1.0
    lhs = _ratio(pos.count_where(s_lo=2 * m), scale, exact)
    p_tail = _walk_prob_ge(l, 2 * m)
    p_pos = _ratio(pos.total(), scale, exact)
    rhs = (p_tail * p_pos) if exact else float(p_tail) * p_pos
    return BoundCheck(lhs=lhs, rhs=rhs)


def target_zone_mass(n: int, a_coef: float, b_coef: float, *, exact: bool = True,
                     budget: int | None = None) -> Scalar:
    """Conditional mass of [a sqrt(n), b sqrt(n)] x [a n^1.5, b n^1.5] under positivity."""
    if not (0 < a_coef < b_coef):
        raise PreconditionError("need 0 < a_coef < b_coef")
    layer = run_layers(n, positive=True, exact=exact, budget=budget)
    rt = float(np.sqrt(n))
    s_lo, s_hi = a_coef * rt, b_coef * rt
    a_lo, a_hi = a_coef * n * rt, b_coef * n * rt
    num = layer.count_where(s_lo=int(np.ceil(s_lo)), s_hi=int(np.floor(s_hi)),
                            a_lo=int(np.ceil(a_lo)), a_hi=int(np.floor(a_hi)))
    return _ratio(num, layer.total(), exact)


# -- Markov decomposition of the bridge event ------------------------------


@dataclass(frozen=True)
class Decomposition:
    n: int
    direct: Weight
    composed: Weight

    @property
    def holds(self) -> bool:
        if self.direct.exact and self.composed.exact:
            return self.direct.as_fraction() == self.composed.as_fraction()
        return np.isclose(self.direct.value, self.composed.value, rtol=1e-12)


def _nonzero_states(layer: Layer) -> list[tuple[int, int]]:
    svals = layer.s_values()
    avals = layer.a_values()
    out = []
    rows, cols = np.nonzero(layer.counts != 0) if layer.exact else np.nonzero(layer.counts)
    for i, c in zip(rows, cols):
        out.append((int(svals[i]), int(avals[c])))
    return out


def decomposition_identity(n4: int, *, exact: bool = True,
                           budget: int | None = None) -> Decomposition:
    """Split P(positivity and return to (0,0) at time 4n) at times n and 3n.

    The composed value sums, over intermediate states (k,l) at time n and
    (k',l') at time 3n, the product of three area-constrained DP runs whose
    middle and final factors start from the shifted intermediate states.
    Exact equality with the direct DP value is a consistency check of the
    Markov property together with the start-shift identity.
    """
    if n4 < 4 or n4 % 4:
        raise PreconditionError("horizon must be a positive multiple of 4")
    n = n4 // 4
    direct_layer = run_layers(n4, positive=True, exact=exact, budget=budget)
    direct = direct_layer.prob_at(0, 0)

    first = run_layers(n, positive=True, exact=exact, budget=budget)
    total = 0 if exact else 0.0
    for (k, l) in _nonzero_states(first):
        w1 = first.count_at(k, l)
        middle = run_layers(2 * n, start=(k, l), positive=True, exact=exact, budget=budget)
        inner = 0 if exact else 0.0
        for (k2, l2) in _nonzero_states(middle):
            w2 = middle.count_at(k2, l2)
            last = run_layers(n, start=(k2, l2), positive=True, exact=exact, budget=budget)
            w3 = last.count_at(0, 0)
            if w3:
                inner += w2 * w3
        total += w1 * inner
    composed = Weight.from_count(total, n4) if exact else Weight.from_float(float(total))
    return Decomposition(n=n4, direct=direct, composed=composed)


def endpoint_reversal_prob(n: int, start: tuple[int, int], *, exact: bool = True,
                           budget: int | None = None) -> tuple[Weight, Weight]:
    """Both sides of the time-reversal identity for hitting (0,0) under positivity.

    Left: P from ``start`` of keeping the (shifted) area nonnegative for n steps
    and landing on (0,0).  Right: the same probability rewritten through the
    reversed process started at the origin, i.e. the origin-start DP value of
    {area nonnegative through n-1, A_{n-1} = start_a, S_n = -start_s}.
    Requires start_a >= 0.
    """
    if n < 1:
        raise PreconditionError("n must be >= 1")
    k, l = int(start[0]), int(start[1])
    if l < 0:
        raise PreconditionError("reversal identity needs a nonnegative start area")
    fwd = run_layers(n, start=(k, l), positive=True, exact=exact, budget=budget)
    lhs = fwd.prob_at(0, 0)

    pos = run_layers(n - 1, positive=True, exact=exact, budget=budget)
    # one more unconstrained step: S_n = -k reached from S_{n-1} = -k -+ 1
    num = 0 if exact else 0.0
    for s_prev in (-k - 1, -k + 1):
        num += pos.count_at(s_prev, l)
    rhs = Weight.from_count(num, n) if exact else Weight.from_float(num * 0.5)
    return lhs, rhs
