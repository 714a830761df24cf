"""Dense dynamic-programming layers over the (walk, area) integer lattice.

A layer holds the distribution of the pair (S_k, A_k) at one time, either as
arbitrary-precision path counts with implicit denominator 2^k (exact mode) or
as float64 probabilities (float mode, where the per-step halving is itself
exact in binary floating point and round-off enters only through additions).

Storage is a dense rectangle indexed by offset s- and a-grids with step 2,
which keeps the sweep cache-friendly; one step to horizon n costs O(n^3)
cell updates, the whole DP O(n^4).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetError, PreconditionError

#: Largest horizon accepted in exact (big-integer) mode by default.
EXACT_BUDGET_DEFAULT = 96
#: Largest horizon accepted in float mode by default (memory ~ n^3 per layer).
FLOAT_BUDGET_DEFAULT = 512


@dataclass(frozen=True)
class Weight:
    """A probability as a dyadic rational count/2^scale, or a bare float.

    Exact weights keep the integer path count; ``value`` is always the float
    rendering.  Float-mode weights carry only ``value``.
    """

    numerator: int | None
    scale: int | None
    value: float

    @classmethod
    def from_count(cls, count: int, scale: int) -> "Weight":
        if count < 0:
            raise ValueError("negative path count")
        return cls(int(count), int(scale), float(Fraction(int(count), 1 << scale)))

    @classmethod
    def from_float(cls, value: float) -> "Weight":
        return cls(None, None, float(value))

    @property
    def exact(self) -> bool:
        return self.numerator is not None

    def as_fraction(self) -> Fraction:
        if not self.exact:
            raise ValueError("float-mode weight has no exact value")
        return Fraction(self.numerator, 1 << self.scale)

    def __str__(self) -> str:
        if self.exact:
            return f"{self.numerator}/2^{self.scale}"
        return repr(self.value)


def check_budget(n: int, exact: bool, budget: int | None) -> None:
    cap = budget if budget is not None else (EXACT_BUDGET_DEFAULT if exact else FLOAT_BUDGET_DEFAULT)
    if n > cap:
        mode = "exact" if exact else "float"
        raise BudgetError(
            f"horizon {n} exceeds the {mode}-mode budget {cap}; "
            f"raise the budget explicitly or switch mode"
        )


@dataclass(frozen=True)
class Layer:
    """Distribution of (S, A) at a fixed time, relative to an arbitrary start.

    Grid conventions for a layer at time k started at (s0, a0):
      row i   <->  s = s0 - k + 2*i,          i in 0..k
      col c   <->  a = a_lo + 2*c,            a_lo = a0 + k*s0 - k(k+1)/2
    ``positive`` layers have had every target with a < 0 discarded at each
    step since time 1, so the retained mass is the probability of the
    area-nonnegativity event up to this time.
    """

    time: int
    start: tuple[int, int]
    positive: bool
    exact: bool
    counts: np.ndarray

    # -- grid geometry -------------------------------------------------

    @property
    def tri(self) -> int:
        return self.time * (self.time + 1) // 2

    @property
    def s_lo(self) -> int:
        return self.start[0] - self.time

    @property
    def a_lo(self) -> int:
        s0, a0 = self.start
        return a0 + self.time * s0 - self.tri

    def s_values(self) -> np.ndarray:
        return self.s_lo + 2 * np.arange(self.time + 1)

    def a_values(self) -> np.ndarray:
        return self.a_lo + 2 * np.arange(self.tri + 1)

    # -- queries --------------------------------------------------------

    def count_at(self, s: int, a: int):
        """Raw cell value at (s, a); 0 off-grid or off-parity."""
        i2, c2 = s - self.s_lo, a - self.a_lo
        if i2 % 2 or c2 % 2:
            return 0 if self.exact else 0.0
        i, c = i2 // 2, c2 // 2
        if 0 <= i <= self.time and 0 <= c <= self.tri:
            return self.counts[i, c]
        return 0 if self.exact else 0.0

    def prob_at(self, s: int, a: int) -> Weight:
        v = self.count_at(s, a)
        if self.exact:
            return Weight.from_count(v, self.time)
        return Weight.from_float(v)

    def total(self):
        """Total retained count (exact) or probability (float)."""
        return self.counts.sum()

    def mass(self) -> Weight:
        if self.exact:
            return Weight.from_count(self.total(), self.time)
        return Weight.from_float(self.total())

    def count_where(self, s_lo=None, s_hi=None, a_lo=None, a_hi=None):
        """Sum of cell values over a rectangle of (s, a) values, bounds inclusive."""
        total = 0 if self.exact else 0.0
        svals = self.s_values()
        avals = self.a_values()
        c0 = 0 if a_lo is None else int(np.searchsorted(avals, a_lo, side="left"))
        c1 = self.tri + 1 if a_hi is None else int(np.searchsorted(avals, a_hi, side="right"))
        if c0 >= c1:
            return total
        for i, s in enumerate(svals):
            if (s_lo is not None and s < s_lo) or (s_hi is not None and s > s_hi):
                continue
            total += self.counts[i, c0:c1].sum()
        return total


def initial_layer(start: tuple[int, int] = (0, 0), *, positive: bool = False,
                  exact: bool = True) -> Layer:
    dtype = object if exact else np.float64
    counts = np.zeros((1, 1), dtype=dtype)
    counts[0, 0] = 1 if exact else 1.0
    return Layer(time=0, start=(int(start[0]), int(start[1])), positive=positive,
                 exact=exact, counts=counts)


def step(layer: Layer) -> Layer:
    """One transition (s,a) -> (s+-1, a+s+-1), each branch carrying half the mass.

    In positive mode, targets with a < 0 are discarded (the constraint applies
    to every time >= 1, never to the start cell).
    """
    k = layer.time
    old = layer.counts
    width = layer.tri + 1
    dtype = object if layer.exact else np.float64
    new = np.zeros((k + 2, width + k + 1), dtype=dtype)
    for i_new in range(k + 2):
        span = new[i_new, i_new:i_new + width]
        if i_new >= 1:
            span += old[i_new - 1]          # up-step into this s-row
        if i_new <= k:
            span += old[i_new]              # down-step into this s-row
    if not layer.exact:
        new *= 0.5
    nxt = Layer(time=k + 1, start=layer.start, positive=layer.positive,
                exact=layer.exact, counts=new)
    if layer.positive:
        kill = max(0, (-nxt.a_lo + 1) // 2)  # cells with a < 0
        if kill:
            new[:, :kill] = 0 if layer.exact else 0.0
    return nxt


def run_layers(n: int, *, start: tuple[int, int] = (0, 0), positive: bool = False,
               exact: bool = True, budget: int | None = None) -> Layer:
    """DP to horizon n, returning the final layer."""
    if n < 0:
        raise PreconditionError("horizon must be nonnegative")
    check_budget(n, exact, budget)
    layer = initial_layer(start, positive=positive, exact=exact)
    for _ in range(n):
        layer = step(layer)
    return layer


def layer_sequence(n: int, *, start: tuple[int, int] = (0, 0), positive: bool = False,
                   exact: bool = True, budget: int | None = None) -> list[Layer]:
    """All layers from time 0 through n (memory ~ n^4 cells in total)."""
    if n < 0:
        raise PreconditionError("horizon must be nonnegative")
    check_budget(n, exact, budget)
    out = [initial_layer(start, positive=positive, exact=exact)]
    for _ in range(n):
        out.append(step(out[-1]))
    return out
