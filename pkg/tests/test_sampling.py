import math
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

import oracle
from intwalk import (BudgetError, PinSpec, PreconditionError, ScaledPath,
                     area_nonnegative, bridge_persistence, build_backward,
                     conditional_marginal, mc_persistence, paths_to_signs,
                     persistence, pinned_clt_check, pinned_marginal_density,
                     pinned_oracle_moments, point_prob, positivity_functional,
                     rng_stream, sample_pinned, walk_area_endpoints)
from intwalk.quad import integrate_2d


def test_backward_root_examples():
    free = build_backward(4, pin=(0, 0))
    assert free.root_weight().as_fraction() == point_prob(4, (0, 0)).as_fraction()
    pos = build_backward(4, pin=(0, 0), positivity=True)
    assert pos.root_weight().as_fraction() == F(1, 16)
    with pytest.raises(PreconditionError):
        build_backward(2, pin=(1, 0))        # off parity
    with pytest.raises(PreconditionError):
        build_backward(6, pin=(0, 0), positivity=False) and None
    # n = 6 cannot return to (0,0): zero-mass endpoint


def test_backward_one_step_consistency():
    for exact in (True, False):
        table = build_backward(8, pin=(0, 0), positivity=True, exact=exact)
        for k in range(8):
            cur, nxt = table.masses[k], table.masses[k + 1]
            width = k * (k + 1) // 2 + 1
            for i in range(k + 1):
                up = nxt[i + 1, i + 1:i + 1 + width]
                dn = nxt[i, i:i + width]
                combined = up + dn if exact else 0.5 * (up + dn)
                got = cur[i, :]
                if exact:
                    assert all(int(x) == int(y) for x, y in zip(got, combined))
                else:
                    assert np.allclose(got, combined)


def test_backward_free_table_mass():
    table = build_backward(5)
    assert table.root_weight().as_fraction() == 1


def test_sample_point_mass_case():
    table = build_backward(4, pin=(0, 0), positivity=True)
    steps = sample_pinned(table, seed=1, count=16)
    assert paths_to_signs(steps) == ["+--+"] * 16


def test_sample_endpoints_hit_pin():
    for pin in [(0, 0), (2, 5)]:
        n = 8 if pin == (0, 0) else 7
        if (pin[0] - n) % 2 or (pin[1] - n * (n + 1) // 2) % 2:
            n += 1
        table = build_backward(n, pin=pin, exact=True)
        steps = sample_pinned(table, seed=3, count=500)
        ends = walk_area_endpoints(steps)
        assert np.all(ends[:, 0] == pin[0])
        assert np.all(ends[:, 1] == pin[1])


def test_sample_free_bridge_split():
    table = build_backward(4, pin=(0, 0))
    steps = sample_pinned(table, seed=9, count=4000)
    signs = paths_to_signs(steps)
    frac_plus = signs.count("+--+") / len(signs)
    assert abs(frac_plus - 0.5) < 0.03
    assert set(signs) == {"+--+", "-++-"}


def test_sampling_reproducible_and_blockwise():
    table = build_backward(12, pin=(0, 0), positivity=True)
    a = sample_pinned(table, seed=77, count=300)
    b = sample_pinned(table, seed=77, count=300)
    assert np.array_equal(a, b)
    c = sample_pinned(table, seed=78, count=300)
    assert not np.array_equal(a, c)


def test_walk_pin_table():
    table = build_backward(6, walk_pin=0)
    steps = sample_pinned(table, seed=5, count=400)
    ends = walk_area_endpoints(steps)
    assert np.all(ends[:, 0] == 0)
    assert len(np.unique(ends[:, 1])) > 1


def test_conditional_marginal_is_normalized_and_matches_oracle():
    table = build_backward(8, pin=(0, 0), positivity=True)
    layer, probs = conditional_marginal(table, 4)
    assert abs(probs.sum() - 1.0) < 1e-12
    # enumeration: bridge paths with nonnegative area, classified by midpoint
    s, a = oracle.trajectories(8)
    keep = oracle.nonneg_mask(8) & (s[:, -1] == 0) & (a[:, -1] == 0)
    svals, avals = layer.s_values(), layer.a_values()
    for i, sv in enumerate(svals):
        for c, av in enumerate(avals):
            cnt = np.count_nonzero(keep & (s[:, 3] == sv) & (a[:, 3] == av))
            assert abs(probs[i, c] - cnt / keep.sum()) < 1e-12


def test_chi_square_marginal_small():
    table = build_backward(16, pin=(0, 0), positivity=True)
    layer, probs = conditional_marginal(table, 8)
    steps = sample_pinned(table, seed=123, count=30000)
    pts = walk_area_endpoints(steps, 8)
    obs = np.zeros_like(probs, dtype=np.int64)
    ii = (pts[:, 0] + 8) // 2
    cc = (pts[:, 1] + 36) // 2
    np.add.at(obs, (ii.astype(int), cc.astype(int)), 1)
    exp = probs * 30000
    mask = exp >= 5
    o = np.append(obs[mask], obs[~mask].sum())
    e = np.append(exp[mask], exp[~mask].sum())
    stat = float(((o - e) ** 2 / e).sum())
    pval = stats.chi2.sf(stat, len(o) - 1)
    assert pval > 1e-3


def test_budget_guard():
    with pytest.raises(BudgetError):
        build_backward(49, pin=(0, 0))                 # exact default budget
    with pytest.raises(BudgetError):
        build_backward(129, pin=(0, 0), exact=False)   # float default budget


def test_scaled_path_and_functional():
    sp = ScaledPath.from_steps(np.array([1, 1, -1, -1]))
    assert sp.breakpoints.shape == (5, 2)
    assert sp.at(0.0) == (0.0, 0.0)
    mid = sp.at(0.5)
    assert abs(mid[0] - 2 / math.sqrt(4)) < 1e-12
    # clipping behavior
    high = ScaledPath(horizon=2, breakpoints=np.array([[0, 3.0], [0, 4.0], [0, 5.0]]))
    assert positivity_functional(high) == 1.0
    half = ScaledPath(horizon=2, breakpoints=np.array([[0, 0.5], [0, 2.0], [0, 1.0]]))
    assert positivity_functional(half) == 0.5
    neg = ScaledPath(horizon=2, breakpoints=np.array([[0, 1.0], [0, -0.1], [0, 1.0]]))
    assert positivity_functional(neg) == 0.0


def test_functional_bounded_by_indicator_and_lipschitz():
    rng = rng_stream(10)
    for _ in range(50):
        steps = (rng.integers(0, 2, size=16) * 2 - 1).astype(np.int8)
        sp = ScaledPath.from_steps(steps)
        f = positivity_functional(sp)
        indicator = 1.0 if np.all(sp.breakpoints[:, 1] >= 0) else 0.0
        assert f <= indicator + 1e-15
        # 1-Lipschitz in sup-norm of the area coordinate
        bumped = ScaledPath(sp.horizon, sp.breakpoints + np.array([0.0, 0.07]))
        assert abs(positivity_functional(bumped) - f) <= 0.07 + 1e-12


def test_pinned_marginal_density_normalization():
    dens = lambda x, y: pinned_marginal_density(0.5, (0.5, 0.4), x, y)
    total = integrate_2d(dens, (-6, 7, -6, 7), panels=(40, 40), nodes=12)
    assert abs(total - 1.0) < 1e-6
    assert float(pinned_marginal_density(0.5, (0.5, 0.4), 0.2, 0.1)) >= 0
    with pytest.raises(PreconditionError):
        pinned_marginal_density(1.5, (0, 0), 0, 0)


def test_pin_spec_rounding():
    pin = PinSpec((0.5, 0.5))
    s, a = pin.lattice_point(32)
    assert (s - 32) % 2 == 0 and (a - 32 * 33 // 2) % 2 == 0
    assert abs(s - 0.5 * math.sqrt(32)) <= 1.0
    assert abs(a - 0.5 * 32 ** 1.5) <= 1.0
    # ties break toward the smaller coordinate
    tie = PinSpec((0.0, 0.0))
    s0, a0 = tie.lattice_point(3)      # 0 on an odd-parity axis: candidates -1, 1
    assert s0 == -1


def test_clt_methods_agree_in_law():
    # the single-time marginal sampler and the path sampler draw from the
    # same conditional law; compare empirical means within MC error
    pin = PinSpec((0.5, 0.5))
    a = pinned_clt_check(32, pin, 0.5, 60000, seed=5, method="paths")
    b = pinned_clt_check(32, pin, 0.5, 60000, seed=6, method="marginal")
    sd = np.sqrt(np.diag(a.emp_cov)) * math.sqrt(2.0 / 60000)
    assert np.all(np.abs(a.emp_mean - b.emp_mean) < 6 * sd + 1e-9)


def test_clt_check_small_horizon():
    rep = pinned_clt_check(64, PinSpec((0.5, 0.5)), 0.5, 50000, seed=11)
    assert rep.method == "paths"
    assert np.all(rep.mean_rel_err < 0.08)
    rep0 = pinned_clt_check(32, PinSpec((0.0, 0.0)), 0.5, 50000, seed=12)
    # pinned at zero: first coordinate symmetric around 0
    assert abs(rep0.emp_mean[0]) < 0.02


def test_clt_check_odd_horizon_flagged():
    with pytest.raises(PreconditionError):
        pinned_clt_check(33, PinSpec((0.5, 0.5)), 0.5, 100, seed=1)
    rep = pinned_clt_check(33, PinSpec((0.5, 0.5)), 0.5, 2000, seed=1,
                           allow_odd=True, method="paths")
    assert rep.samples == 2000


def test_oracle_moments_have_unit_mass():
    m = pinned_oracle_moments(0.5, (0.53033, 0.5))
    assert abs(m["mass"] - 1.0) < 1e-9
    assert m["cov"][0, 0] > 0 and m["cov"][1, 1] > 0


def test_mc_persistence_regimes_match_exact():
    est = mc_persistence(4, 60000, seed=21, regime="full-bridge")
    assert abs(est.estimate - 0.5) < 3 * est.std_error
    est = mc_persistence(8, 60000, seed=22, regime="full-bridge")
    assert abs(est.estimate - 0.375) < 3 * est.std_error
    est = mc_persistence(32, 60000, seed=23, regime="free")
    exact = persistence(32).value
    assert abs(est.estimate - exact) < 3 * est.std_error
    est = mc_persistence(8, 60000, seed=24, regime="s-bridge")
    num, den = oracle.s_bridge_counts(8)
    assert abs(est.estimate - num / den) < 3 * est.std_error
    with pytest.raises(PreconditionError):
        mc_persistence(6, 100, seed=1, regime="full-bridge")
    with pytest.raises(PreconditionError):
        mc_persistence(8, 100, seed=1, regime="unknown")


def test_bridge_time_reversal_symmetry():
    # positivity of the first quarter vs the last quarter of the full bridge
    # has the same law (reversal through the matched-endpoint identity)
    for n4 in (8, 12):
        n = n4 // 4
        s, a = oracle.trajectories(n4)
        on_bridge = (s[:, -1] == 0) & (a[:, -1] == 0)
        first = (a[:, :n] >= 0).all(axis=1)
        # last n areas, excluding the pinned final zero: A_{3n} ... A_{4n-1}
        last = (a[:, 3 * n - 1:n4 - 1] >= 0).all(axis=1)
        assert np.count_nonzero(on_bridge & first) == np.count_nonzero(on_bridge & last)
