"""Step paths, walk/area trajectories, parity supports, and time reversal.

The elementary object is a finite sequence of +-1 steps.  A path of length n
induces the walk S_k = x_1 + ... + x_k and its running area A_k = S_1 + ... + S_k.
Everything in this module is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .errors import PreconditionError


class State(NamedTuple):
    """Pair (walk value, area value) at a fixed time."""

    s: int
    a: int


@dataclass(frozen=True)
class StepPath:
    """A finite sequence of +-1 steps."""

    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(x not in (-1, 1) for x in self.steps):
            raise PreconditionError("step entries must be -1 or +1")

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[int]:
        return iter(self.steps)

    @classmethod
    def from_signs(cls, signs: str) -> "StepPath":
        """Build a path from a compact sign string like '+-+'."""
        table = {"+": 1, "-": -1}
        try:
            return cls(tuple(table[c] for c in signs))
        except KeyError as exc:
            raise PreconditionError(f"invalid sign character {exc.args[0]!r}") from None

    def signs(self) -> str:
        return "".join("+" if x > 0 else "-" for x in self.steps)


def make_path(steps: Iterable[int]) -> StepPath:
    return StepPath(tuple(steps))


def evolve(path: StepPath) -> list[State]:
    """Walk/area trajectory [(S_0,A_0), ..., (S_n,A_n)] with S_0 = A_0 = 0."""
    out = [State(0, 0)]
    s = a = 0
    for x in path:
        s += x
        a += s
        out.append(State(s, a))
    return out


def in_support(n: int, l: tuple[int, int], *, shifted_area: bool = False) -> bool:
    """Whether an integer pair satisfies the time-n parity congruences.

    The endpoint pair (S_n, A_n) always has S_n = n (mod 2) and
    A_n = n(n+1)/2 (mod 2).  With ``shifted_area=True`` the second congruence
    is taken against (n-1)n/2 instead, which is the support of (S_n, A_{n-1}).
    """
    if n < 0:
        raise PreconditionError("time index must be nonnegative")
    l1, l2 = l
    tri = (n - 1) * n // 2 if shifted_area else n * (n + 1) // 2
    return (l1 - n) % 2 == 0 and (l2 - tri) % 2 == 0


def reachable(n: int, l: tuple[int, int]) -> bool:
    """Parity membership plus the coarse range bounds |l1| <= n, |l2| <= n(n+1)/2."""
    l1, l2 = l
    return in_support(n, l) and abs(l1) <= n and abs(l2) <= n * (n + 1) // 2


@dataclass(frozen=True)
class AdjointPath:
    """Time-reversed trajectory started at a declared endpoint.

    ``states[k]`` is the reversed pair after unwinding k of the original steps,
    following s_{k+1} = s_k - x_{N-k}, a_{k+1} = a_k - s_k.
    """

    origin: State
    horizon: int
    states: tuple[State, ...]


def adjoint_evolve(path: StepPath, origin: State) -> AdjointPath:
    """Run the reversed recursion from ``origin`` over the path's steps.

    When ``origin`` equals the path's true endpoint (S_N, A_N), the reversed
    trajectory retraces the forward one: states[N-k] == evolve(path)[k] for
    every k.  For any other origin the two disagree at every index.
    """
    n = len(path)
    s, a = origin
    out = [State(s, a)]
    for k in range(n):
        x = path.steps[n - 1 - k]
        a -= s
        s -= x
        out.append(State(s, a))
    return AdjointPath(origin=State(*origin), horizon=n, states=tuple(out))


def accordance_set(path: StepPath, origin: State) -> list[int]:
    """Indices k where the reversed trajectory matches the forward one.

    By construction this is either all of 0..N or empty.
    """
    fwd = evolve(path)
    rev = adjoint_evolve(path, origin).states
    n = len(path)
    return [k for k in range(n + 1) if rev[n - k] == fwd[k]]


def shift_states(start: State, states: list[State]) -> list[State]:
    """Translate a trajectory started at the origin to one started at ``start``.

    The walk/area pair started at (s, a) is (S_n + s, A_n + a + n*s) in terms
    of the origin-started pair.
    """
    s0, a0 = start
    return [State(st.s + s0, st.a + a0 + k * s0) for k, st in enumerate(states)]


def area_before_start(start: State) -> int:
    """The convention value A_{-1} = A_0 - S_0 for a trajectory started at ``start``."""
    return start.a - start.s


def all_paths(n: int) -> Iterator[StepPath]:
    """All 2^n step paths of length n, in lexicographic bit order."""
    for bits in range(1 << n):
        yield StepPath(tuple(1 if (bits >> i) & 1 else -1 for i in range(n)))
