"""Brute-force enumeration oracle over all 2^n sign paths.

Everything here is a direct sum over the full path space with integer
counting; nothing is shared with the lattice DP it is used to check.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def sign_matrix(n: int) -> np.ndarray:
    """All 2^n paths as a (2^n, n) +-1 int8 matrix (bit i of the row index)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = (idx[:, None] >> np.arange(n, dtype=np.uint32)[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


@lru_cache(maxsize=32)
def trajectories(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Walk and area trajectories S[:, 1..n], A[:, 1..n] for all paths."""
    x = sign_matrix(n).astype(np.int64)
    s = np.cumsum(x, axis=1)
    a = np.cumsum(s, axis=1)
    return s, a


def nonneg_mask(n: int) -> np.ndarray:
    _, a = trajectories(n)
    return (a >= 0).all(axis=1)


def frac(count: int, n: int) -> Fraction:
    return Fraction(int(count), 1 << n)


def point_prob(n: int, l: tuple[int, int]) -> Fraction:
    s, a = trajectories(n)
    hits = np.count_nonzero((s[:, -1] == l[0]) & (a[:, -1] == l[1]))
    return frac(hits, n)


def persistence(n: int) -> Fraction:
    return frac(np.count_nonzero(nonneg_mask(n)), n)


def bridge_counts(n: int) -> tuple[int, int]:
    s, a = trajectories(n)
    at_zero = (s[:, -1] == 0) & (a[:, -1] == 0)
    return (int(np.count_nonzero(at_zero & nonneg_mask(n))),
            int(np.count_nonzero(at_zero)))


def s_bridge_counts(n: int) -> tuple[int, int]:
    s, _ = trajectories(n)
    at_zero = s[:, -1] == 0
    return (int(np.count_nonzero(at_zero & nonneg_mask(n))),
            int(np.count_nonzero(at_zero)))


def conditional_moments(n: int) -> tuple[Fraction, Fraction, Fraction]:
    s, a = trajectories(n)
    keep = nonneg_mask(n)
    sn = s[keep, -1]
    an = a[keep, -1]
    tot = int(keep.sum())
    return (Fraction(int(np.abs(sn).sum()), tot),
            Fraction(int(an.sum()), tot),
            Fraction(int(sn[sn > 0].sum()), tot))


def first_passage(n: int) -> tuple[Fraction, Fraction, Fraction]:
    """(P(v > n), E[S_n; v > n], P(v <= n)) with v the first visit to -1."""
    s, _ = trajectories(n)
    alive = (s >= 0).all(axis=1)
    return (frac(np.count_nonzero(alive), n),
            frac(int(s[alive, -1].sum()), n),
            frac(np.count_nonzero(~alive), n))


def strict_positive_moment(n: int) -> Fraction:
    s, _ = trajectories(n + 1)
    keep = (s >= 1).all(axis=1)
    return Fraction(int(s[keep, -1].sum()), int(keep.sum()))


def tail_joint_bound(n: int, l: int, m: int) -> tuple[Fraction, Fraction]:
    s, a = trajectories(n)
    keep = nonneg_mask(n)
    lhs = Fraction(int(np.count_nonzero(keep & (s[:, -1] >= m) & (a[:, -1] >= l * m))),
                   int(keep.sum()))
    sl, _ = trajectories(l)
    snl, _ = trajectories(n - l) if n > l else (np.zeros((1, 1), dtype=np.int64), None)
    p1 = frac(np.count_nonzero(sl[:, -1] >= 2 * m), l)
    if n - l == 0:
        p2 = Fraction(1)
    else:
        p2 = frac(np.count_nonzero(np.abs(snl[:, -1]) <= m), n - l)
    return lhs, p1 * p2


def association(l: int, m: int) -> tuple[Fraction, Fraction]:
    s, _ = trajectories(l)
    keep = nonneg_mask(l)
    lhs = frac(np.count_nonzero(keep & (s[:, -1] >= 2 * m)), l)
    rhs = frac(np.count_nonzero(s[:, -1] >= 2 * m), l) * frac(np.count_nonzero(keep), l)
    return lhs, rhs


def bridge_joint_prob(n: int) -> Fraction:
    num, _ = bridge_counts(n)
    return frac(num, n)


def target_zone(n: int, a_coef: float, b_coef: float) -> Fraction:
    s, a = trajectories(n)
    keep = nonneg_mask(n)
    rt = float(np.sqrt(n))
    sel = (keep & (s[:, -1] >= a_coef * rt) & (s[:, -1] <= b_coef * rt)
           & (a[:, -1] >= a_coef * n * rt) & (a[:, -1] <= b_coef * n * rt))
    return Fraction(int(np.count_nonzero(sel)), int(keep.sum()))


def last_zero_tail_moment(n: int, t: int) -> Fraction | None:
    """E(S_n^+ on {area nonneg through t, S_t = 0, walk > 0 after t}), conditional.

    Returns None when the conditioning event is empty.
    """
    s, a = trajectories(n)
    keep = np.ones(s.shape[0], dtype=bool)
    if t >= 1:
        keep &= (a[:, :t] >= 0).all(axis=1)
        keep &= s[:, t - 1] == 0
    if t < n:
        keep &= (s[:, t:] > 0).all(axis=1)
    tot = int(keep.sum())
    if tot == 0:
        return None
    sn = s[keep, -1]
    return Fraction(int(sn[sn > 0].sum()), tot)


def strict_positive_from(k: int) -> Fraction | None:
    """E(S_k^+ | walk strictly positive through k); None if k = 0 gives trivial 0."""
    if k == 0:
        return Fraction(0)
    s, _ = trajectories(k)
    keep = (s >= 1).all(axis=1)
    tot = int(keep.sum())
    if tot == 0:
        return None
    sk = s[keep, -1]
    return Fraction(int(sk[sk > 0].sum()), tot)
