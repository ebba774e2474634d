import math

import numpy as np
import pytest

from conftest import make_params

from trihardy.behavior import Behavior, HardyParams, ParameterError, hardy_behavior, hardy_probability
from trihardy.concavity import GridSpec, omega
from trihardy.quantum import angles_from_params, born_behavior, hardy_state, optimal_params
from trihardy.randomness import (
    DELTA_MAX,
    certified_bits,
    equalizing_r,
    guessing_probability,
    iso_hardy_slice,
    params_for_delta,
    randomness_region,
    row_uniformity_analysis,
)

LOG2_7 = math.log2(7.0)
SPECIAL = HardyParams(7.0 / 8.0, 4.0 / 7.0, 4.0 / 7.0)


@pytest.fixture(scope="module")
def coarse_grid():
    return GridSpec.cube(10)


@pytest.fixture(scope="module")
def coarse_samples(coarse_grid):
    pts = coarse_grid.points()
    return pts, omega(pts[:, 0], pts[:, 1], pts[:, 2])


# ---------------------------------------------------------------- guessing


def test_guess_prob_at_special_point_is_one_seventh():
    g = guessing_probability(SPECIAL, (1, 1, 1))
    assert abs(g - 1.0 / 7.0) < 1e-15


def test_bits_at_special_point_is_log2_7():
    rep = certified_bits(SPECIAL)  # settings default to (1, 1, 1)
    assert rep.settings == (1, 1, 1)
    assert abs(rep.bits - LOG2_7) < 1e-9
    assert rep.certified is None
    assert rep.uncertified


def test_guess_prob_accepts_behavior_or_params(rng):
    for _ in range(5):
        p = make_params(rng)
        b = hardy_behavior(p)
        assert guessing_probability(p, (1, 0, 1)) == guessing_probability(b, (1, 0, 1))


def test_global_mode_dominates_every_settings_row(rng):
    for _ in range(10):
        b = hardy_behavior(make_params(rng))
        g_all = guessing_probability(b, None)
        for x in (0, 1):
            for y in (0, 1):
                for z in (0, 1):
                    assert g_all >= guessing_probability(b, (x, y, z)) - 1e-15


def test_analytic_and_born_guessing_agree(rng):
    # The closed-form table and the state/measurement route must certify
    # the same number of bits.
    for _ in range(20):
        p = make_params(rng)
        qb = born_behavior(hardy_state(p), angles_from_params(p))
        a = certified_bits(p).bits
        q = -math.log2(guessing_probability(qb, (1, 1, 1)))
        assert abs(a - q) < 1e-9


def test_guessing_probability_is_convex_under_mixing(rng):
    for _ in range(20):
        b1 = hardy_behavior(make_params(rng)).table
        b2 = hardy_behavior(make_params(rng)).table
        theta = rng.uniform(0.1, 0.9)
        mix = Behavior(theta * b1 + (1.0 - theta) * b2)
        for settings in [(1, 1, 1), (0, 0, 0), None]:
            lhs = guessing_probability(mix, settings)
            rhs = theta * guessing_probability(Behavior(b1), settings) + (
                1.0 - theta
            ) * guessing_probability(Behavior(b2), settings)
            assert lhs <= rhs + 1e-12


def test_grid_argmax_of_bits_sits_next_to_special_point():
    # On a grid the most random point for the all-1 settings must be at or
    # adjacent to (7/8, 4/7, 4/7).
    axes = [np.linspace(0.80, 0.95, 16), np.linspace(0.50, 0.65, 16), np.linspace(0.50, 0.65, 16)]
    best = (-1.0, None)
    for r in axes[0]:
        for s in axes[1]:
            for t in axes[2]:
                if 1.0 - s - t + r * s * t <= 0.0:
                    continue
                rep = certified_bits(HardyParams(r, s, t))
                if rep.bits > best[0]:
                    best = (rep.bits, (r, s, t))
    assert best[0] <= LOG2_7 + 1e-12  # never beats the closed-form maximum
    assert np.abs(np.subtract(best[1], SPECIAL.as_tuple())).max() < 0.011


# ------------------------------------------------------------ certification


def test_certified_flag_passes_through():
    assert certified_bits(SPECIAL, certified=True).certified is True
    assert certified_bits(SPECIAL, certified=False).certified is False


def test_samples_route_certifies_the_special_point(coarse_samples):
    rep = certified_bits(SPECIAL, samples=coarse_samples)
    assert rep.certified is True
    assert not rep.uncertified


def test_samples_route_rejects_an_uncovered_point(coarse_samples):
    # Deep in the indefinite-curvature corner the surface lies strictly
    # below its concave cover.
    rep = certified_bits(HardyParams(0.1, 0.1, 0.1), samples=coarse_samples)
    assert rep.certified is False
    assert rep.bits > 0.0  # still computed, just labelled


def test_flag_and_samples_are_mutually_exclusive(coarse_samples):
    with pytest.raises(ValueError):
        certified_bits(SPECIAL, certified=True, samples=coarse_samples)


# ------------------------------------------------------------- iso slices


def test_slice_rejects_out_of_range_delta():
    for bad in (0.0, -0.01, DELTA_MAX + 1e-6, 1.0):
        with pytest.raises(ParameterError):
            iso_hardy_slice(bad, GridSpec.cube(4))


def test_slice_members_sit_on_the_shell(coarse_grid):
    delta = 0.012
    sl = iso_hardy_slice(delta, coarse_grid, tolerance=2e-3)
    assert len(sl) > 0
    for point in sl.members:
        assert abs(float(omega(*point)) - delta) <= 2e-3
        HardyParams(*point)  # in-domain by construction


def test_special_point_anchors_its_slice(coarse_grid):
    # 1/56 is within 1e-4 of 0.0179, so the named point joins the slice
    # even though no grid point falls inside so thin a shell.
    sl = iso_hardy_slice(0.0179, coarse_grid, tolerance=1e-4)
    assert SPECIAL.as_tuple() in sl.members
    sl_plain = iso_hardy_slice(0.0179, coarse_grid, tolerance=1e-4, anchors=False)
    assert SPECIAL.as_tuple() not in sl_plain.members


def test_optimum_anchors_the_top_slice(coarse_grid):
    sl = iso_hardy_slice(0.0181, coarse_grid, tolerance=1e-4)
    assert optimal_params().as_tuple() in sl.members
    assert SPECIAL.as_tuple() not in sl.members  # 2.4e-4 away


def test_region_reports_log2_7_at_0179(coarse_grid):
    region = randomness_region(0.0179, coarse_grid, tolerance=1e-4)
    assert not region.empty
    assert abs(region.max_bits - LOG2_7) < 1e-9
    assert all(rep.certified for rep in region.members)


def test_region_spread_orders_and_bounds(coarse_grid):
    region = randomness_region(0.010, coarse_grid, tolerance=2e-3)
    assert not region.empty
    assert 0.0 < region.min_bits <= region.max_bits <= 3.0  # log2(8) hard cap
    for rep in region.members:
        assert region.min_bits <= rep.bits <= region.max_bits


def test_empty_slice_degrades_gracefully():
    # A grid confined near the optimum has no omega anywhere near 1e-3,
    # and neither named anchor qualifies.
    tight = GridSpec((0.82, 0.86, 4), (0.52, 0.56, 4), (0.52, 0.56, 4))
    region = randomness_region(0.001, tight, tolerance=1e-4)
    assert region.empty
    assert region.min_bits is None and region.max_bits is None
    assert region.members == ()


def test_precomputed_cover_results_match_direct_route(coarse_grid):
    from trihardy.cover import self_test_region

    results = self_test_region(coarse_grid)
    direct = iso_hardy_slice(0.012, coarse_grid, tolerance=2e-3)
    reused = iso_hardy_slice(0.012, coarse_grid, tolerance=2e-3, cover_results=results)
    assert direct.members == reused.members
    with pytest.raises(ValueError):
        iso_hardy_slice(0.012, coarse_grid, cover_results=results[:-3])


# -------------------------------------------------------- row uniformity


def test_equalizing_r_hits_seven_eighths():
    assert abs(equalizing_r(4.0 / 7.0) - 7.0 / 8.0) < 2e-15


def test_equalizing_r_domain():
    for bad in (0.0, 1.0 / 3.0, 1.0, 1.2, -0.5):
        with pytest.raises(ParameterError):
            equalizing_r(bad)


def test_equalizer_flattens_both_outcome_classes():
    # Outcome index = 4*a + 2*b + c with 1 meaning the minus outcome:
    # {1, 2, 4} carry one minus, {3, 5, 6} carry two.
    for s in (0.40, 0.50, 0.65, 0.80):
        r = equalizing_r(s)
        row = hardy_behavior(HardyParams(r, s, s)).settings_row(1, 1, 1)
        ones = row[[1, 2, 4]]
        twos = row[[3, 5, 6]]
        assert ones.max() - ones.min() < 1e-12
        assert twos.max() - twos.min() < 1e-12
        if abs(s - 4.0 / 7.0) > 1e-3:
            assert abs(ones[0] - twos[0]) > 1e-4  # levels merge only at s = 4/7


def test_off_equalizer_rows_are_not_flat():
    for s in (0.45, 0.6):
        r = equalizing_r(s)
        for wobble in (-0.05, 0.05):
            row = hardy_behavior(HardyParams(r + wobble, s, s)).settings_row(1, 1, 1)
            ones = row[[1, 2, 4]]
            assert ones.max() - ones.min() > 1e-4


def test_row_uniformity_report():
    rep = row_uniformity_analysis()
    assert rep.ok
    assert abs(rep.equalizer_at_4_7 - 7.0 / 8.0) < 1e-12
    assert rep.row111_max_deviation < 1e-14
    assert rep.row111_zero_entry == 0.0
    assert rep.first_row_uniform_u == 0.5
    assert rep.first_row_impossible


def test_first_row_never_flattens_numerically():
    # Independent check of the impossibility: over a scan of the valid
    # domain the seven non-Hardy entries of the all-0 row keep a spread
    # bounded well away from zero (the refined minimum is about 0.21).
    best = np.inf
    for r in np.linspace(0.05, 0.95, 13):
        for s in np.linspace(0.05, 0.95, 13):
            for t in np.linspace(0.05, 0.95, 13):
                if 1.0 - s - t + r * s * t <= 1e-9:
                    continue
                row = hardy_behavior(HardyParams(r, s, t)).settings_row(0, 0, 0)
                seven = np.delete(row, 0)
                best = min(best, float(seven.max() - seven.min()))
    assert best > 0.2


# ------------------------------------------------------- params_for_delta


def test_params_for_delta_hits_target():
    for delta in (1e-4, 5e-3, 0.0179, 0.0181, DELTA_MAX):
        p = params_for_delta(delta)
        assert abs(hardy_probability(p) - delta) < 1e-12
        assert p.s == p.t == optimal_params().s


def test_params_for_delta_rejects_bad_targets():
    for bad in (0.0, -1e-3, DELTA_MAX + 1e-6):
        with pytest.raises(ParameterError):
            params_for_delta(bad)


def test_params_for_delta_top_end_returns_the_optimum():
    assert params_for_delta(DELTA_MAX) == optimal_params()
