"""Moment-relaxation hierarchy: symbolic layer, solves, and the curve."""

import json
import math

import numpy as np
import pytest

import trihardy.npa as npa_mod
from trihardy.behavior import Behavior, HardyParams, ParameterError, hardy_probability
from trihardy.npa import (
    DELTA_CAP,
    IDENTITY_ID,
    Monomial,
    build_basis,
    hardy_moment_problem,
    moment_id,
    moment_matrix,
    probability_functional,
    randomness_curve,
    solve_sdp,
)
from trihardy.npa import _HARDY_ID, _PAIR_ZERO_IDS, _solve_functional
from trihardy.quantum import angles_from_params, born_behavior, hardy_state, rotated_basis
from trihardy.randomness import params_for_delta


# ---------------------------------------------------------------------------
# symbolic layer
# ---------------------------------------------------------------------------


def test_basis_counts():
    assert len(build_basis("level1")) == 7
    assert len(build_basis("local1")) == 27
    assert len(build_basis("level2")) == 33
    with pytest.raises(ValueError):
        build_basis("level3")


def test_monomial_collapse():
    # adjacent idempotent repeats collapse, non-adjacent ones survive
    assert Monomial(a=(0, 0, 1)).a == (0, 1)
    assert Monomial(a=(0, 1, 1, 0)).a == (0, 1, 0)
    assert Monomial(b=(1, 1, 1)).b == (1,)
    assert Monomial().degree == 0
    assert Monomial(a=(0,), c=(1,)).degree == 2
    with pytest.raises(ValueError):
        Monomial(a=(2,))


def test_moment_id_cross_party_commutation():
    ab = moment_id(Monomial(a=(0,)), Monomial(b=(1,)))
    ba = moment_id(Monomial(b=(1,)), Monomial(a=(0,)))
    assert ab == ba == ((0,), (1,), ())


def test_moment_id_adjoint_identification():
    # <(A0 A1)> and <(A1 A0)> are conjugates; the real matrix uses one id
    fwd = moment_id(Monomial(), Monomial(a=(0, 1)))
    rev = moment_id(Monomial(), Monomial(a=(1, 0)))
    assert fwd == rev


def test_moment_id_left_adjoint_concatenation():
    # <(A0A1)^dagger A0A1> = <A1 A0 A0 A1> collapses to the length-3 word
    mid = moment_id(Monomial(a=(0, 1)), Monomial(a=(0, 1)))
    assert mid == ((1, 0, 1), (), ())


def test_probability_functionals_telescope():
    for settings in ((0, 0, 0), (1, 0, 1), (1, 1, 1)):
        total: dict = {}
        for a in (0, 1):
            for b in (0, 1):
                for c in (0, 1):
                    for mid, coef in probability_functional(a, b, c, *settings).items():
                        total[mid] = total.get(mid, 0.0) + coef
        total = {mid: v for mid, v in total.items() if abs(v) > 1e-12}
        assert total == {IDENTITY_ID: pytest.approx(1.0)}
    with pytest.raises(ValueError):
        probability_functional(0, 0, 2, 0, 0, 0)


# ---------------------------------------------------------------------------
# quantum oracle for the moment language
# ---------------------------------------------------------------------------


def _projectors(params: HardyParams):
    """Per party and setting, the 2x2 projector onto the + outcome."""
    ang = angles_from_params(params)
    plus0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    out = []
    for angle in (ang.alpha, ang.beta, ang.gamma):
        u0 = rotated_basis(angle, 0.0)[0]
        out.append((plus0, np.outer(u0, u0.conj())))
    return out


def _quantum_moment(params: HardyParams, mid) -> float:
    psi = hardy_state(params).as_tensor().reshape(8)
    projs = _projectors(params)
    ops = []
    for party, word in enumerate(mid):
        op = np.eye(2, dtype=complex)
        for setting in word:
            op = op @ projs[party][setting]
        ops.append(op)
    full = np.kron(np.kron(ops[0], ops[1]), ops[2])
    return float(np.real(psi.conj() @ full @ psi))


@pytest.fixture(scope="module")
def sample_params():
    return [
        HardyParams(0.5, 0.4, 0.3),
        HardyParams(0.8392, 0.5436, 0.5436),
        HardyParams(0.3, 0.5, 0.4),
    ]


def test_functionals_match_born_rule(sample_params):
    for params in sample_params:
        beh = born_behavior(hardy_state(params), angles_from_params(params))
        cache: dict = {}
        for x in (0, 1):
            for y in (0, 1):
                for z in (0, 1):
                    for a in (0, 1):
                        for b in (0, 1):
                            for c in (0, 1):
                                fn = probability_functional(a, b, c, x, y, z)
                                val = sum(
                                    coef * cache.setdefault(mid, _quantum_moment(params, mid))
                                    for mid, coef in fn.items()
                                )
                                assert val == pytest.approx(
                                    float(beh.table[x, y, z, a, b, c]), abs=1e-10
                                )


def test_quantum_point_is_feasible(sample_params):
    """Born moments satisfy every constraint of the pinned problem."""
    for params in sample_params:
        delta = hardy_probability(params.r, params.s, params.t)
        prob = hardy_moment_problem(delta, (0, 0, 0, 1, 1, 1), level="local1")
        moments = {mid: _quantum_moment(params, mid) for mid in prob.moment_ids()}
        for fn, rhs in prob.equalities:
            val = sum(coef * moments[mid] for mid, coef in fn.items())
            assert abs(val - rhs) < 1e-12
        n = len(prob.basis)
        M = np.array(
            [[moments[prob.matrix_ids[i][j]] for j in range(n)] for i in range(n)]
        )
        assert np.linalg.eigvalsh(0.5 * (M + M.T)).min() > -1e-10


# ---------------------------------------------------------------------------
# problem construction
# ---------------------------------------------------------------------------


def test_problem_structure():
    prob = hardy_moment_problem(0.01, (0, 0, 0, 0, 0, 0), level="local1")
    assert prob.equalities[0] == ({IDENTITY_ID: 1.0}, 1.0)
    assert len(prob.zero_constraints) == 4
    assert prob.equalities[-1] == ({_HARDY_ID: 1.0}, 0.01)
    assert len(prob.equalities) == 6
    assert len(prob.kernels) == 1 and len(prob.kernels[0]) == 8

    free = hardy_moment_problem(None, (0, 0, 0, 0, 0, 0), level="local1")
    assert len(free.equalities) == 5

    weak = hardy_moment_problem(0.01, (0, 0, 0, 0, 0, 0), level="level1")
    assert weak.kernels == ()  # pair and triple words absent from the basis


def test_delta_domain():
    for bad in (-1e-3, DELTA_CAP + 1e-6, 0.5):
        with pytest.raises(ParameterError):
            hardy_moment_problem(bad)
    hardy_moment_problem(0.0)
    hardy_moment_problem(DELTA_CAP)
    with pytest.raises(ValueError):
        hardy_moment_problem(0.01, (0, 0, 0, 0, 0))


def test_index_map_matches_matrix():
    prob = hardy_moment_problem(None, level="level1")
    n = len(prob.basis)
    imap = prob.index_map
    assert len(imap) == n * n
    assert imap[(0, 0)] == IDENTITY_ID
    assert imap[(2, 3)] == moment_id(prob.basis[2], prob.basis[3])


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------


def test_reduced_dimensions(monkeypatch):
    """Pinned zeros and the forced null vector shrink the PSD block."""
    seen = []
    real = npa_mod.solve_semidefinite

    def spy(q, F0, Fs, **kw):
        seen.append(F0.shape[0])
        return real(q, F0, Fs, **kw)

    monkeypatch.setattr(npa_mod, "solve_semidefinite", spy)
    for level in ("level1", "local1", "level2"):
        solve_sdp(hardy_moment_problem(None, (0, 0, 0, 0, 0, 0), level=level))
    # level1: 7 rows + 2x2 boxes for the two carried triple moments;
    # local1: 27 -> 18 by zero diagonals -> 17 on the null complement;
    # level2: 33 -> 24 -> 23.
    assert seen == [11, 17, 23]


def test_infeasible_pin_contradiction():
    prob = hardy_moment_problem(0.017, (0, 0, 0, 0, 0, 0), level="local1")
    eqs = list(prob.equalities) + [({_HARDY_ID: 1.0}, 0.016)]
    res, moments, _ = _solve_functional(
        prob.matrix_ids, {}, eqs, prob.objective, kernels=prob.kernels
    )
    assert res.status == "infeasible"
    assert moments is None


# ---------------------------------------------------------------------------
# solves
# ---------------------------------------------------------------------------


def test_max_hardy_probability_by_level():
    values = {}
    for level in ("level1", "local1", "level2"):
        sol = solve_sdp(hardy_moment_problem(None, (0, 0, 0, 0, 0, 0), level=level))
        assert sol.ok, (level, sol.status)
        values[level] = sol.optimum
    assert values["level1"] >= 1.0 - 1e-6  # too weak to see the bound at all
    assert 0.0181 - 1e-6 <= values["local1"] <= 0.0184
    assert 0.0181 - 1e-6 <= values["level2"] <= values["local1"] + 2e-6


def test_monotone_level_nesting():
    cases = [
        (0.0181, (0, 0, 1, 0, 1, 1)),
        (0.005, (1, 0, 0, 1, 0, 0)),
        (0.0179, (0, 0, 0, 1, 1, 1)),
    ]
    for delta, target in cases:
        vals = []
        for level in ("level1", "local1", "level2"):
            sol = solve_sdp(hardy_moment_problem(delta, target, level=level))
            assert sol.ok, (level, delta, target, sol.status)
            vals.append(sol.optimum)
        assert vals[0] >= vals[1] - 5e-6
        assert vals[1] >= vals[2] - 5e-6


def test_soundness_against_quantum_strategies():
    """The relaxed maximum can never undercut an explicit construction."""
    for delta in np.linspace(1e-3, 0.0181, 10):
        params = params_for_delta(float(delta))
        beh = born_behavior(hardy_state(params), angles_from_params(params))
        for xyz in ((0, 0, 0), (1, 1, 1)):
            block = beh.table[xyz]
            a, b, c = np.unravel_index(np.argmax(block), (2, 2, 2))
            sol = solve_sdp(
                hardy_moment_problem(float(delta), (int(a), int(b), int(c)) + xyz)
            )
            assert sol.ok
            assert sol.optimum + sol.duality_gap >= float(block[a, b, c]) - 1e-9


def test_delta_zero_admits_deterministic_point():
    # all-minus at setting 0 satisfies the four zeros with certainty
    sol = solve_sdp(hardy_moment_problem(0.0, (1, 1, 1, 0, 0, 0)))
    assert sol.ok and sol.optimum >= 1.0 - 1e-6
    pinned = solve_sdp(hardy_moment_problem(0.0, (0, 0, 0, 0, 0, 0)))
    assert pinned.ok and abs(pinned.optimum) < 1e-9


def test_pin_above_the_maximum_fails_honestly():
    sol = solve_sdp(hardy_moment_problem(DELTA_CAP, (1, 1, 1, 1, 1, 1)))
    assert not sol.ok
    assert sol.optimum is None and sol.moment_values is None
    with pytest.raises(ValueError):
        sol.moment(IDENTITY_ID)


def test_certificate_diagnostics():
    for delta, target in ((0.0179, (0, 1, 1, 0, 1, 1)), (0.005, (1, 1, 1, 0, 0, 0))):
        sol = solve_sdp(hardy_moment_problem(delta, target))
        assert sol.ok
        assert sol.min_eigenvalue >= -1e-7
        assert sol.max_residual <= 1e-7
        assert sol.moment(IDENTITY_ID) == pytest.approx(1.0, abs=1e-12)
        assert sol.evaluate({_HARDY_ID: 2.0}) == pytest.approx(2 * delta, abs=1e-9)
        with pytest.raises(KeyError):
            sol.moment(((0, 1, 0, 1),) * 3)


def test_cyclic_relabeling_is_a_symmetry():
    # rotating the parties (and their settings) maps the constraint set to
    # itself, so rotated targets solve to the same optimum
    def rot(mid):
        rotated = (mid[2], mid[0], mid[1])
        return min(rotated, tuple(w[::-1] for w in rotated))

    prob = hardy_moment_problem(0.0179, (0, 1, 1, 0, 1, 1), level="local1")
    pool = {mid for row in prob.matrix_ids for mid in row}
    assert {rot(mid) for mid in pool} == pool
    assert {rot(mid) for mid in _PAIR_ZERO_IDS} == set(_PAIR_ZERO_IDS)
    assert rot(_HARDY_ID) == _HARDY_ID
    fourth = prob.zero_constraints[3][0]
    assert {rot(mid): c for mid, c in fourth.items()} == fourth

    a = solve_sdp(hardy_moment_problem(0.0179, (0, 1, 1, 0, 1, 1)))
    b = solve_sdp(hardy_moment_problem(0.0179, (1, 0, 1, 1, 0, 1)))
    assert a.ok and b.ok
    assert a.optimum == pytest.approx(b.optimum, abs=1e-8)


def test_party_swap_is_not_a_symmetry():
    # swapping B and C mirrors the zero pattern onto different moments
    swapped = {(mid[0], mid[2], mid[1]) for mid in _PAIR_ZERO_IDS}
    assert swapped.isdisjoint(set(_PAIR_ZERO_IDS))


# ---------------------------------------------------------------------------
# a classic bipartite cross-check of the shared solve path
# ---------------------------------------------------------------------------


def test_chsh_through_the_same_machinery():
    basis = [
        Monomial(),
        Monomial(a=(0,)),
        Monomial(a=(1,)),
        Monomial(b=(0,)),
        Monomial(b=(1,)),
    ]
    ids = tuple(tuple(row) for row in moment_matrix(basis))
    objective: dict = {}

    def bump(mid, coef):
        objective[mid] = objective.get(mid, 0.0) + coef

    for x, y, sign in ((0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)):
        # E(x,y) = 4 <Ax By> - 2 <Ax> - 2 <By> + 1 in projector moments
        bump(moment_id(Monomial(a=(x,)), Monomial(b=(y,))), 4.0 * sign)
        bump(moment_id(Monomial(), Monomial(a=(x,))), -2.0 * sign)
        bump(moment_id(Monomial(), Monomial(b=(y,))), -2.0 * sign)
        bump(IDENTITY_ID, sign)

    res, moments, optimum = _solve_functional(
        ids, {}, [({IDENTITY_ID: 1.0}, 1.0)], objective
    )
    assert res.ok
    assert optimum == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-5)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def test_json_export_round_trip():
    prob = hardy_moment_problem(0.0179, (0, 0, 0, 1, 1, 1), level="level1")
    doc = json.loads(prob.to_json())
    assert doc["format"] == "trihardy-moment-problem/1"
    assert doc["level"] == "level1"
    assert doc["delta"] == pytest.approx(0.0179)
    assert doc["target"] == [0, 0, 0, 1, 1, 1]
    n = len(prob.basis)
    assert len(doc["basis"]) == n
    assert len(doc["index_map"]) == n * (n + 1) // 2
    assert len(doc["equalities"]) == len(prob.equalities)
    for i, j, mid in doc["index_map"]:
        assert tuple(tuple(w) for w in mid) == prob.matrix_ids[i][j]

    free = json.loads(hardy_moment_problem(None).to_json())
    assert free["delta"] is None


# ---------------------------------------------------------------------------
# the curve
# ---------------------------------------------------------------------------


def test_randomness_curve_monotone():
    pts = randomness_curve([1e-3, 5e-3, 0.0179], level="local1", settings=(0, 0, 0))
    assert [p.status for p in pts] == ["optimal"] * 3
    bits = [p.bits for p in pts]
    assert all(math.isfinite(b) and b >= 0.0 for b in bits)
    assert bits[0] <= bits[1] + 1e-9 <= bits[2] + 2e-9
    assert pts[0].bits <= 0.05  # nearly no randomness at tiny delta
    assert pts[2].guess_prob == pytest.approx(0.8728, abs=2e-3)


def test_randomness_curve_reference_point():
    (pt,) = randomness_curve([0.0181], level="local1", settings=(0, 0, 0))
    assert pt.status == "optimal"
    assert math.isfinite(pt.bits)
    assert pt.bits <= 0.2387 + 0.02


def test_randomness_curve_all_settings_dominates():
    (single,) = randomness_curve([0.0179], level="local1", settings=(0, 0, 0))
    (global_,) = randomness_curve([0.0179], level="local1", settings=None)
    assert global_.settings is None
    assert global_.guess_prob >= single.guess_prob - 1e-9
    assert global_.bits <= single.bits + 1e-9


def test_randomness_curve_failures_inline():
    pts = randomness_curve([5e-3, DELTA_CAP], level="local1", settings=(0, 0, 0))
    assert pts[0].status == "optimal" and math.isfinite(pts[0].bits)
    assert pts[1].status != "optimal" and math.isnan(pts[1].bits)
