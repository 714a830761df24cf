from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from intwalk import (PreconditionError, all_paths, check_level_r_injection,
                     check_monotone_membership, check_sign_flip_injection,
                     conditional_moments, evolve, invert_after_last_r,
                     invert_after_last_zero, make_path)

step_lists = st.lists(st.sampled_from([-1, 1]), min_size=1, max_size=20)


def test_invert_after_last_zero_examples():
    assert invert_after_last_zero(make_path([1, -1, -1])).steps == (1, -1, 1)
    # endpoint at zero: the cut is the horizon, identity map
    p = make_path([1, -1, -1, 1])
    assert invert_after_last_zero(p) == p
    assert invert_after_last_zero(make_path([-1])).steps == (1,)


def test_invert_after_last_r_examples():
    assert invert_after_last_r(make_path([1, -1]), 1).steps == (1, 1)
    p = make_path([1, 1, -1])   # ends exactly at R = 1
    assert invert_after_last_r(p, 1) == p
    with pytest.raises(PreconditionError):
        invert_after_last_r(make_path([-1, -1]), 1)
    with pytest.raises(PreconditionError):
        invert_after_last_r(make_path([1, 1]), 0)


@given(step_lists)
def test_last_zero_involution(steps):
    p = make_path(steps)
    assert invert_after_last_zero(invert_after_last_zero(p)) == p


@given(step_lists, st.integers(1, 3))
def test_level_r_involution(steps, r):
    p = make_path(steps)
    walk = [0]
    for x in steps:
        walk.append(walk[-1] + x)
    if max(walk) < r:
        return
    q = invert_after_last_r(p, r)
    # the image still visits r at the same last index, so the map inverts itself
    assert invert_after_last_r(q, r) == p


def test_sign_flip_injection_small():
    rep = check_sign_flip_injection(3)
    assert rep.passed
    rep1 = check_sign_flip_injection(1)
    assert rep1.domain_size == 0 and rep1.passed


@pytest.mark.parametrize("n", range(2, 13))
def test_sign_flip_injection_sweep(n):
    rep = check_sign_flip_injection(n)
    assert rep.passed
    assert rep.image_size == rep.domain_size


@pytest.mark.parametrize("n", range(2, 13))
@pytest.mark.parametrize("r", (1, 2, 3))
def test_level_r_injection_sweep(n, r):
    rep = check_level_r_injection(n, r)
    assert rep.passed


def test_level_r_unreachable_is_vacuous():
    rep = check_level_r_injection(2, 3)
    assert rep.domain_size == 0 and rep.passed


@pytest.mark.parametrize("n", range(1, 9))
def test_monotone_membership(n):
    assert check_monotone_membership(n)


def test_negative_part_dominated_by_positive_part():
    # consequence of the sign-flip injection, cross-checked against the
    # conditioned moments: E(S^-) <= E(S^+) under positivity
    for n in range(1, 13):
        m = conditional_moments(n)
        e_minus = m.e_abs_s - m.e_s_plus
        assert e_minus <= m.e_s_plus


def test_image_walks_exceed_level():
    for n in (4, 6, 8):
        for p in all_paths(n):
            states = evolve(p)
            walk = [st.s for st in states]
            if min(st.a for st in states[1:]) < 0:
                continue
            for r in (1, 2):
                if max(walk) < r or walk[-1] >= r:
                    continue
                q = invert_after_last_r(p, r)
                qwalk = [st.s for st in evolve(q)]
                sigma = max(k for k, s in enumerate(walk) if s == r)
                assert all(v > r for v in qwalk[sigma + 1:])
                assert qwalk[-1] > r
