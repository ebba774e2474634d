import io
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from trihardy import (
    Behavior,
    HardyParams,
    ParameterError,
    check_behavior,
    check_hardy_constraints,
    check_no_signalling,
    hardy_behavior,
    hardy_probability,
    params_from_behavior,
)

from conftest import make_params, params_strategy


# --------------------------------------------------------------------------
# Exact-fraction oracle for the closed-form family.
#
# The table below re-evaluates every nonzero cell in exact rational
# arithmetic.  Row sums must then equal 1 *exactly*, which is a much
# stronger statement than float normalization and pins each formula
# (including the two cells that are easy to get wrong: the (-,-,-) entries
# of the (1,0,1) and (0,1,1) rows).
# --------------------------------------------------------------------------


def exact_table(r: Fraction, s: Fraction, t: Fraction) -> dict[tuple, Fraction]:
    h = 1 - s - t + r * s * t
    q = 1 - r
    ds = 1 - r * s
    dt = 1 - r * t
    cells = {
        (0, 0, 0, 1, 1, 1): q * r * r * s * t * h / (ds * dt),
        (0, 0, 0, -1, 1, 1): q * r * t * h / dt,
        (0, 0, 0, 1, -1, 1): q * r * s * h / ds,
        (0, 0, 0, 1, 1, -1): q * q * r * s * t / (ds * dt),
        (0, 0, 0, -1, -1, 1): q * h,
        (0, 0, 0, -1, 1, -1): q * q * t / dt,
        (0, 0, 0, 1, -1, -1): q * q * s / ds,
        (0, 0, 0, -1, -1, -1): r,
        (1, 0, 0, -1, 1, 1): q * r * t * h / (ds * dt),
        (1, 0, 0, -1, -1, 1): q * h / ds,
        (1, 0, 0, -1, 1, -1): q * q * t / (ds * dt),
        (1, 0, 0, 1, -1, -1): s,
        (1, 0, 0, -1, -1, -1): r * (1 - s) ** 2 / ds,
        (0, 1, 0, 1, -1, 1): q * r * s * h / (ds * dt),
        (0, 1, 0, -1, -1, 1): q * h / dt,
        (0, 1, 0, -1, 1, -1): t,
        (0, 1, 0, 1, -1, -1): q * q * s / (ds * dt),
        (0, 1, 0, -1, -1, -1): r * (1 - t) ** 2 / dt,
        (1, 1, 0, 1, 1, -1): r * s * t,
        (1, 1, 0, -1, -1, 1): q * h / (ds * dt),
        (1, 1, 0, -1, 1, -1): ds * t,
        (1, 1, 0, 1, -1, -1): s * dt,
        (1, 1, 0, -1, -1, -1): r * h * h / (ds * dt),
        (0, 0, 1, 1, 1, -1): q * r * s * t,
        (0, 0, 1, -1, -1, 1): h / (ds * dt),
        (0, 0, 1, -1, 1, -1): q * ds * t,
        (0, 0, 1, 1, -1, -1): q * s * dt,
        (0, 0, 1, -1, -1, -1): r * q * (1 - h) ** 2 / (ds * dt),
        (1, 0, 1, 1, -1, 1): r * s * h / (ds * dt),
        (1, 0, 1, -1, -1, 1): h / dt,
        (1, 0, 1, -1, 1, -1): q * t,
        (1, 0, 1, 1, -1, -1): q * s / (ds * dt),
        (1, 0, 1, -1, -1, -1): q * r * t * t / dt,
        (0, 1, 1, -1, 1, 1): r * t * h / (ds * dt),
        (0, 1, 1, -1, -1, 1): h / ds,
        (0, 1, 1, -1, 1, -1): q * t / (ds * dt),
        (0, 1, 1, 1, -1, -1): q * s,
        (0, 1, 1, -1, -1, -1): q * r * s * s / ds,
        (1, 1, 1, 1, 1, 1): r * r * s * t * h / (ds * dt),
        (1, 1, 1, -1, 1, 1): r * t * h / dt,
        (1, 1, 1, 1, -1, 1): r * s * h / ds,
        (1, 1, 1, 1, 1, -1): q * r * s * t / (ds * dt),
        (1, 1, 1, -1, -1, 1): h,
        (1, 1, 1, -1, 1, -1): q * t / dt,
        (1, 1, 1, 1, -1, -1): q * s / ds,
    }
    return cells


RATIONAL_TRIPLES = [
    (Fraction(1, 2), Fraction(3, 10), Fraction(3, 5)),
    (Fraction(7, 8), Fraction(4, 7), Fraction(4, 7)),
    (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)),
    (Fraction(2, 3), Fraction(1, 5), Fraction(5, 7)),
]


@pytest.mark.parametrize("r,s,t", RATIONAL_TRIPLES)
def test_exact_rows_sum_to_one(r, s, t):
    cells = exact_table(r, s, t)
    for x in (0, 1):
        for y in (0, 1):
            for z in (0, 1):
                row = sum(v for k, v in cells.items() if k[:3] == (x, y, z))
                assert row == 1, f"row {(x, y, z)} sums to {row}"


@pytest.mark.parametrize("r,s,t", RATIONAL_TRIPLES)
def test_table_matches_exact_fractions(r, s, t):
    b = hardy_behavior(HardyParams(float(r), float(s), float(t)))
    cells = exact_table(r, s, t)
    count = 0
    for x in (0, 1):
        for y in (0, 1):
            for z in (0, 1):
                for a in (1, -1):
                    for bb in (1, -1):
                        for c in (1, -1):
                            got = b.prob(a, bb, c, x, y, z)
                            want = cells.get((x, y, z, a, bb, c), Fraction(0))
                            if want == 0:
                                assert got == 0.0
                            else:
                                assert got == pytest.approx(float(want), abs=1e-15)
                                count += 1
    assert count == 45  # and hence exactly 19 assigned zeros


def test_zero_pattern_counts():
    b = hardy_behavior(HardyParams(0.5, 0.3, 0.6))
    zeros_per_row = {
        (x, y, z): int(np.sum(b.table[x, y, z] == 0.0))
        for x in (0, 1) for y in (0, 1) for z in (0, 1)
    }
    assert zeros_per_row[(0, 0, 0)] == 0
    assert zeros_per_row[(1, 1, 1)] == 1
    for key in [(1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1), (1, 0, 1), (0, 1, 1)]:
        assert zeros_per_row[key] == 3
    assert sum(zeros_per_row.values()) == 19


# --------------------------------------------------------------------------
# Frozen anchor values.
# --------------------------------------------------------------------------


def test_hardy_probability_symmetric_point():
    # r = s = t = 1/2: p_H = (1/8)(1/2)(1/2)(9/16)^{-1}... worked through,
    # the exact value is 1/144.
    assert hardy_probability(0.5, 0.5, 0.5) == pytest.approx(1.0 / 144.0, abs=1e-16)


def test_hardy_probability_log2seven_point():
    p = hardy_probability(7.0 / 8.0, 4.0 / 7.0, 4.0 / 7.0)
    assert p == pytest.approx(1.0 / 56.0, abs=1e-14)


def test_uniform_row_at_log2seven_point():
    b = hardy_behavior(HardyParams(7.0 / 8.0, 4.0 / 7.0, 4.0 / 7.0))
    row = b.settings_row(1, 1, 1)
    assert row[-1] == 0.0
    assert np.abs(row[:-1] - 1.0 / 7.0).max() < 1e-14


def test_reference_maximum_value():
    # Frozen output of the closed form near the argmax of p_H.
    assert hardy_probability(0.8392, 0.5436, 0.5436) == pytest.approx(
        0.018193825748718383, abs=1e-15
    )
    assert abs(hardy_probability(0.8392, 0.5436, 0.5436) - 0.0181) < 5e-4


# --------------------------------------------------------------------------
# Analytic marginals (worked out by summing the closed forms by hand).
# --------------------------------------------------------------------------


def test_analytic_marginals(rng):
    for _ in range(10):
        params = make_params(rng)
        r, s, t = params.as_tuple()
        h = params.h
        ds, dt = 1 - r * s, 1 - r * t
        b = hardy_behavior(params)
        table = b.table

        # p_AB(+1,+1 | 0,0) = (1-r) r s t, any spectator setting z.
        for z in (0, 1):
            got = table[0, 0, z, 0, 0, :].sum()
            assert got == pytest.approx((1 - r) * r * s * t, abs=1e-12)

        # p_AB(-1,-1 | 0,0) = (1-r) h + r.
        for z in (0, 1):
            got = table[0, 0, z, 1, 1, :].sum()
            assert got == pytest.approx((1 - r) * h + r, abs=1e-12)

        # p_C(-1 | z=1) = (1-r)(1-h) / ((1-rs)(1-rt)).
        for x in (0, 1):
            for y in (0, 1):
                got = table[x, y, 1, :, :, 1].sum()
                assert got == pytest.approx((1 - r) * (1 - h) / (ds * dt), abs=1e-12)

        # p_BC(-1,-1 | 1,1) = (1-r) s / (1-rs).
        for x in (0, 1):
            got = table[x, 1, 1, :, 1, 1].sum()
            assert got == pytest.approx((1 - r) * s / ds, abs=1e-12)


# --------------------------------------------------------------------------
# Domain handling.
# --------------------------------------------------------------------------


@pytest.mark.parametrize(
    "r,s,t",
    [
        (0.0, 0.5, 0.5),
        (1.0, 0.5, 0.5),
        (0.5, 0.0, 0.5),
        (0.5, 1.0, 0.5),
        (0.5, 0.5, 0.0),
        (0.5, 0.5, 1.0),
        (-0.1, 0.5, 0.5),
        (0.5, 0.5, float("nan")),
    ],
)
def test_params_boundary_rejected(r, s, t):
    with pytest.raises(ParameterError):
        HardyParams(r, s, t)


def test_params_t_bound_rejected():
    # t must lie strictly below (1-s)/(1-rs); at 1/2, 1/2 that bound is 2/3.
    HardyParams(0.5, 0.5, 0.66)
    with pytest.raises(ParameterError):
        HardyParams(0.5, 0.5, 2.0 / 3.0)
    with pytest.raises(ParameterError):
        HardyParams(0.5, 0.5, 0.7)


def test_hardy_probability_raw_floats_validated():
    with pytest.raises(ParameterError):
        hardy_probability(0.5, 0.5, 0.9)


@given(params_strategy())
@settings(max_examples=200, deadline=None)
def test_domain_iff_h_positive(params):
    # Everything the strategy produces must satisfy the closed-form domain.
    assert params.h > 0
    assert params.t < (1 - params.s) / (1 - params.r * params.s)
    assert hardy_probability(params) > 0


# --------------------------------------------------------------------------
# Behaviour-level invariants as properties.
# --------------------------------------------------------------------------


@given(params_strategy())
@settings(max_examples=100, deadline=None)
def test_family_satisfies_all_checks(params):
    b = hardy_behavior(params)
    assert check_behavior(b, tol=1e-12).ok
    rep = check_hardy_constraints(b, tol=0.0)
    assert rep.residuals == (0.0, 0.0, 0.0, 0.0)  # assigned, not computed
    assert check_no_signalling(b, tol=1e-12).ok
    assert b.hardy_probability == pytest.approx(hardy_probability(params), abs=1e-14)


@given(params_strategy())
@settings(max_examples=50, deadline=None)
def test_params_round_trip(params):
    b = hardy_behavior(params)
    back = params_from_behavior(b)
    assert back.r == pytest.approx(params.r, abs=1e-14)
    assert back.s == pytest.approx(params.s, abs=1e-14)
    assert back.t == pytest.approx(params.t, abs=1e-14)


def test_params_from_behavior_rejects_non_family():
    uniform = Behavior(np.full((2, 2, 2, 2, 2, 2), 1.0 / 8.0))
    with pytest.raises((ValueError, ParameterError)):
        params_from_behavior(uniform)


# --------------------------------------------------------------------------
# Check functions on deliberately defective tables.
# --------------------------------------------------------------------------


def test_uniform_behavior_fails_all_hardy_zeros():
    uniform = Behavior(np.full((2, 2, 2, 2, 2, 2), 1.0 / 8.0))
    assert check_behavior(uniform).ok
    assert check_no_signalling(uniform).ok
    rep = check_hardy_constraints(uniform, tol=1e-12)
    assert rep.passed == (False, False, False, False)
    assert rep.residuals == (0.25, 0.25, 0.25, 0.125)


def test_all_minus_deterministic_fails_only_triple_zero():
    table = np.zeros((2, 2, 2, 2, 2, 2))
    table[:, :, :, 1, 1, 1] = 1.0
    det = Behavior(table)
    rep = check_hardy_constraints(det, tol=1e-12)
    assert rep.passed == (True, True, True, False)
    assert rep.triple_residual == 1.0


def test_signalling_table_detected():
    # Party A's marginal depends on y: legal rows, but B's setting steers A.
    table = np.zeros((2, 2, 2, 2, 2, 2))
    table[:, 0, :, 0, 0, 0] = 1.0
    table[:, 1, :, 1, 0, 0] = 1.0
    sig = Behavior(table)
    assert check_behavior(sig).ok
    rep = check_no_signalling(sig, tol=1e-12)
    assert not rep.ok
    assert rep.max_deviation == 1.0
    # Any A-vs-y dependence shows up in the AC pair marginal too, so either
    # label is a correct diagnosis here.
    assert rep.worst_channel in ("AC marginal vs y", "A marginal vs (y,z)")


def test_normalization_failure_detected():
    table = np.full((2, 2, 2, 2, 2, 2), 1.0 / 8.0)
    table[0, 0, 0, 0, 0, 0] = 0.5
    rep = check_behavior(Behavior(table))
    assert not rep.ok
    assert rep.max_normalization_error == pytest.approx(0.375)


def test_check_reports_worst_spectator_setting():
    # Constraint holds at z=0 but is broken at z=1; the report must see it.
    params = HardyParams(0.5, 0.3, 0.6)
    table = np.array(hardy_behavior(params).table)
    table[1, 0, 1, 0, 0, 0] += 0.2
    rep = check_hardy_constraints(Behavior(table))
    assert rep.ab_residual == pytest.approx(0.2)
    assert not rep.ok


# --------------------------------------------------------------------------
# Container semantics and serialisation.
# --------------------------------------------------------------------------


def test_behavior_is_immutable():
    b = hardy_behavior(HardyParams(0.5, 0.3, 0.6))
    with pytest.raises(ValueError):
        b.table[0, 0, 0, 0, 0, 0] = 1.0
    with pytest.raises(AttributeError):
        b.table = np.zeros((2, 2, 2, 2, 2, 2))


def test_behavior_rejects_bad_input():
    with pytest.raises(ValueError):
        Behavior(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        Behavior(np.full((2, 2, 2, 2, 2, 2), np.inf))
    with pytest.raises(ValueError):
        Behavior.from_flat([0.0] * 63)


def test_prob_outcome_labels():
    b = hardy_behavior(HardyParams(0.5, 0.3, 0.6))
    assert b.prob(-1, -1, -1, 0, 0, 0) == 0.5
    with pytest.raises(ValueError):
        b.prob(0, 1, 1, 0, 0, 0)


def test_flat_order_row_major():
    b = hardy_behavior(HardyParams(0.5, 0.3, 0.6))
    flat = b.flat
    assert flat[0] == b.prob(1, 1, 1, 0, 0, 0)
    assert flat[63] == b.prob(-1, -1, -1, 1, 1, 1)
    assert flat[7] == b.prob(-1, -1, -1, 0, 0, 0)
    assert Behavior.from_flat(flat) == b


def test_csv_round_trip_bit_exact(rng):
    b = hardy_behavior(make_params(rng))
    buf = io.StringIO()
    b.to_csv(buf)
    buf.seek(0)
    back = Behavior.from_csv(buf)
    assert np.array_equal(back.table, b.table)


def test_csv_header_and_labels(rng):
    b = hardy_behavior(make_params(rng))
    buf = io.StringIO()
    b.to_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,y,z,a,b,c,p"
    assert len(lines) == 65
    assert lines[1].startswith("0,0,0,+1,+1,+1,")
    assert lines[-1].startswith("1,1,1,-1,-1,-1,")


def test_json_round_trip_bit_exact(rng):
    b = hardy_behavior(make_params(rng))
    text = b.to_json()
    doc = json.loads(text)
    assert doc["format"] == "trihardy-behavior/1"
    assert len(doc["p"]) == 64
    back = Behavior.from_json(text)
    assert np.array_equal(back.table, b.table)


def test_equality_and_hash():
    p = HardyParams(0.5, 0.3, 0.6)
    assert hardy_behavior(p) == hardy_behavior(p)
    assert hash(hardy_behavior(p)) == hash(hardy_behavior(p))
    assert hardy_behavior(p) != hardy_behavior(HardyParams(0.5, 0.3, 0.61))
