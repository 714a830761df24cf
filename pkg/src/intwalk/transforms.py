"""Step-inversion path transformations and their exhaustive verification.

Two maps are covered: inversion of all steps after the walk's last visit to
zero, and after its last visit to a level R.  Restricted to the right domains
they are injections that push area-nonnegative paths with a low endpoint onto
area-nonnegative paths with a high endpoint, which yields counting
inequalities between endpoint classes.  The checks below enumerate all 2^n
paths and validate injectivity, codomain membership, and the inequalities as
exact integer counts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .paths import StepPath, all_paths, evolve


def _walk(path: StepPath) -> list[int]:
    vals = [0]
    for x in path:
        vals.append(vals[-1] + x)
    return vals


def invert_after_last_zero(path: StepPath) -> StepPath:
    """Negate every step after the walk's last visit to zero.

    Time 0 counts as a zero visit, so the cut index always exists.  Applying
    the map twice returns the original path.
    """
    walk = _walk(path)
    sigma = max(k for k, s in enumerate(walk) if s == 0)
    return StepPath(path.steps[:sigma] + tuple(-x for x in path.steps[sigma:]))


def invert_after_last_r(path: StepPath, r: int) -> StepPath:
    """Negate every step after the walk's last visit to level r >= 1.

    Rejects paths whose walk never reaches r.
    """
    if r < 1:
        raise PreconditionError("level must be >= 1")
    walk = _walk(path)
    if max(walk) < r:
        raise PreconditionError(f"walk never reaches level {r}")
    sigma = max(k for k, s in enumerate(walk) if s == r)
    return StepPath(path.steps[:sigma] + tuple(-x for x in path.steps[sigma:]))


def _area_nonneg(path: StepPath) -> bool:
    return all(st.a >= 0 for st in evolve(path)[1:])


@dataclass(frozen=True)
class TransformReport:
    n: int
    domain_size: int
    image_size: int
    injective: bool
    codomain_ok: bool
    inequality_ok: bool

    @property
    def passed(self) -> bool:
        return self.injective and self.codomain_ok and self.inequality_ok


def check_sign_flip_injection(n: int) -> TransformReport:
    """Exhaustively verify the last-zero inversion on area-nonnegative paths.

    Domain: area nonnegative with S_n < 0.  The image must stay area
    nonnegative with S_n > 0, distinct inputs must give distinct images, and
    consequently the endpoint counts satisfy
    #(nonneg, S_n = -k) <= #(nonneg, S_n = k) for every k > 0.
    """
    domain = []
    minus: dict[int, int] = {}
    plus: dict[int, int] = {}
    for p in all_paths(n):
        if not _area_nonneg(p):
            continue
        sn = sum(p.steps)
        if sn < 0:
            domain.append(p)
            minus[-sn] = minus.get(-sn, 0) + 1
        elif sn > 0:
            plus[sn] = plus.get(sn, 0) + 1
    images = set()
    codomain_ok = True
    for p in domain:
        q = invert_after_last_zero(p)
        images.add(q.steps)
        if not (_area_nonneg(q) and sum(q.steps) > 0):
            codomain_ok = False
    inequality_ok = all(minus[k] <= plus.get(k, 0) for k in minus)
    return TransformReport(n=n, domain_size=len(domain), image_size=len(images),
                           injective=len(images) == len(domain),
                           codomain_ok=codomain_ok, inequality_ok=inequality_ok)


def check_level_r_injection(n: int, r: int) -> TransformReport:
    """Exhaustively verify the level-r inversion and its 2x counting bound.

    Domain: area nonnegative, walk maximum >= r, S_n < r.  Images must be
    area nonnegative with S_n > r and every image walk must exceed r strictly
    after the cut.  The resulting bound is
    #(max >= r, nonneg) <= 2 #(S_n >= r, nonneg), checked as exact counts.
    """
    if r < 1:
        raise PreconditionError("level must be >= 1")
    domain = []
    count_max_ge = 0
    count_end_ge = 0
    count_end_gt = 0
    for p in all_paths(n):
        if not _area_nonneg(p):
            continue
        walk = _walk(p)
        sn = walk[-1]
        if max(walk) >= r:
            count_max_ge += 1
            if sn < r:
                domain.append(p)
        if sn >= r:
            count_end_ge += 1
        if sn > r:
            count_end_gt += 1
    images = set()
    codomain_ok = True
    for p in domain:
        q = invert_after_last_r(p, r)
        images.add(q.steps)
        qwalk = _walk(q)
        sigma = max(k for k, s in enumerate(_walk(p)) if s == r)
        tail_ok = all(v > r for v in qwalk[sigma + 1:]) if sigma < n else True
        if not (_area_nonneg(q) and qwalk[-1] > r and tail_ok):
            codomain_ok = False
    injective = len(images) == len(domain)
    image_fits = len(domain) <= count_end_gt
    inequality_ok = image_fits and count_max_ge <= 2 * count_end_ge
    return TransformReport(n=n, domain_size=len(domain), image_size=len(images),
                           injective=injective, codomain_ok=codomain_ok,
                           inequality_ok=inequality_ok)


def check_monotone_membership(n: int) -> bool:
    """For every path pair with pointwise-dominating walks, nonnegative area
    of the lower path forces nonnegative area of the upper one."""
    paths = list(all_paths(n))
    walks = [_walk(p) for p in paths]
    nonneg = [_area_nonneg(p) for p in paths]
    for i, wx in enumerate(walks):
        if not nonneg[i]:
            continue
        for j, wy in enumerate(walks):
            if all(a >= b for a, b in zip(wy, wx)) and not nonneg[j]:
                return False
    return True
