"""Moment-matrix (NPA-style) relaxation of the Hardy guessing program.

The scenario is three parties, two settings, two outcomes.  Monomials are
products of the "+1"-outcome projectors P_{+|setting}; a moment is the
state expectation of one such word, identified only up to the algebra
rules (projector idempotence, cross-party commutation, adjoint symmetry).
A basis of monomials induces the moment matrix M[i, j] = <m_i† m_j>; its
positive semidefiniteness for *some* quantum model is the relaxation.

The guessing program fixes the four Hardy zeros and the Hardy probability
p(+,+,+|0,0,0) = delta, then maximises one outcome probability at a fixed
settings triple; -log2 of the maximum over the eight outcomes is a
certified lower bound on the randomness of those settings, valid against
quantum adversaries to the extent the hierarchy level is tight.

Three levels are provided: ``level1`` (identity plus the six projectors,
with the pair/triple moments the constraints need carried as scalar
[0, 1] boxes), ``local1`` (adds all cross-party pairs and triples — the
default, a 27-monomial basis), and ``level2`` (adds same-party length-2
words).  Structural zeros are eliminated by facial reduction before the
interior-point solve.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .behavior import ParameterError
from .sdp import solve_semidefinite

__all__ = [
    "DELTA_CAP",
    "Monomial",
    "MomentProblem",
    "SDPSolution",
    "CurvePoint",
    "build_basis",
    "moment_id",
    "moment_matrix",
    "probability_functional",
    "hardy_moment_problem",
    "solve_sdp",
    "randomness_curve",
]

#: Upper end of accepted Hardy-probability pins.  The quantum optimum is
#: 0.01819...; the relaxation stays feasible slightly above it, and the
#: deterministic delta = 0 problem is meaningful too, so validation is
#: deliberately a little wider than the attainable quantum range.
DELTA_CAP = 0.0182

LEVELS = ("level1", "local1", "level2")

_PARTIES = ("a", "b", "c")

#: Moment id of the identity operator.
IDENTITY_ID = ((), (), ())


def _collapse(word: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for setting in word:
        if setting not in (0, 1):
            raise ValueError(f"settings must be 0 or 1, got {setting!r}")
        if not out or out[-1] != setting:
            out.append(setting)
    return tuple(out)


@dataclass(frozen=True)
class Monomial:
    """A product of +1-outcome projectors, one word per party.

    Words are tuples of setting labels; adjacent repeats collapse on
    construction (P^2 = P).  Operators of different parties commute, so a
    triple of words is a complete description.
    """

    a: tuple[int, ...] = ()
    b: tuple[int, ...] = ()
    c: tuple[int, ...] = ()

    def __post_init__(self):
        for party in _PARTIES:
            object.__setattr__(self, party, _collapse(getattr(self, party)))

    @property
    def degree(self) -> int:
        return len(self.a) + len(self.b) + len(self.c)

    def words(self) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
        return (self.a, self.b, self.c)

    def __repr__(self) -> str:
        if self.degree == 0:
            return "Monomial(1)"
        parts = []
        for name, word in zip("ABC", self.words()):
            parts.extend(f"{name}{s}" for s in word)
        return f"Monomial({' '.join(parts)})"


MomentId = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def moment_id(left: Monomial, right: Monomial) -> MomentId:
    """Canonical id of the moment <left† · right>.

    Within each party the left word is reversed (adjoint) and concatenated
    with the right word, collapsing idempotent repeats.  Because moments
    of a word and of its adjoint coincide, the id is the lexicographic
    minimum of the word triple and its party-wise reversal.
    """
    fwd = tuple(
        _collapse(tuple(reversed(getattr(left, p))) + getattr(right, p))
        for p in _PARTIES
    )
    rev = tuple(w[::-1] for w in fwd)
    return min(fwd, rev)


def build_basis(level: str) -> list[Monomial]:
    """Monomial basis of the requested level (see module docstring)."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    identity = Monomial()
    singles = (
        [Monomial(a=(x,)) for x in (0, 1)]
        + [Monomial(b=(y,)) for y in (0, 1)]
        + [Monomial(c=(z,)) for z in (0, 1)]
    )
    if level == "level1":
        return [identity] + singles
    pairs = (
        [Monomial(a=(x,), b=(y,)) for x in (0, 1) for y in (0, 1)]
        + [Monomial(a=(x,), c=(z,)) for x in (0, 1) for z in (0, 1)]
        + [Monomial(b=(y,), c=(z,)) for y in (0, 1) for z in (0, 1)]
    )
    triples = [
        Monomial(a=(x,), b=(y,), c=(z,))
        for x in (0, 1)
        for y in (0, 1)
        for z in (0, 1)
    ]
    basis = [identity] + singles + pairs + triples
    if level == "level2":
        basis += [Monomial(a=w) for w in ((0, 1), (1, 0))]
        basis += [Monomial(b=w) for w in ((0, 1), (1, 0))]
        basis += [Monomial(c=w) for w in ((0, 1), (1, 0))]
    return basis


def moment_matrix(basis: Sequence[Monomial]) -> list[list[MomentId]]:
    """The symbolic moment matrix: entry (i, j) is the id of <m_i† m_j>."""
    n = len(basis)
    return [[moment_id(basis[i], basis[j]) for j in range(n)] for i in range(n)]


def probability_functional(
    a: int, b: int, c: int, x: int, y: int, z: int
) -> dict[MomentId, float]:
    """p(a, b, c | x, y, z) as a linear functional over moment ids.

    Outcome index 0 is the +1 outcome (the projector itself), index 1 the
    -1 outcome (its complement); complements expand by inclusion-exclusion
    into at most eight projector-word moments, the empty word being the
    identity.
    """
    for v in (a, b, c, x, y, z):
        if v not in (0, 1):
            raise ValueError("outcomes and settings must be 0 or 1")
    settings = (x, y, z)
    plus = [i for i, outcome in enumerate((a, b, c)) if outcome == 0]
    minus = [i for i in range(3) if i not in plus]
    terms: dict[MomentId, float] = {}
    for mask in range(1 << len(minus)):
        picked = [minus[i] for i in range(len(minus)) if mask >> i & 1]
        words: list[tuple[int, ...]] = [(), (), ()]
        for i in plus + picked:
            words[i] = (settings[i],)
        mono = Monomial(*words)
        mid = moment_id(Monomial(), mono)
        terms[mid] = terms.get(mid, 0.0) + (-1.0) ** len(picked)
    return terms


# -------------------------------------------------------------------------
# The Hardy guessing problem.
# -------------------------------------------------------------------------

_PAIR_ZERO_IDS: tuple[MomentId, ...] = (
    (((1,), (0,), ())),  # p_AB(+,+|x=1,y=0)
    (((), (1,), (0,))),  # p_BC(+,+|y=1,z=0)
    (((0,), (), (1,))),  # p_AC(+,+|x=0,z=1)
)
_HARDY_ID: MomentId = ((0,), (0,), (0,))


@dataclass(frozen=True, eq=False)
class MomentProblem:
    """A declarative moment problem: basis, objective, equality constraints.

    ``equalities`` always starts with normalization (moment of the
    identity equals one) followed by the four Hardy zeros; a pinned Hardy
    probability, when requested, comes last.  The moment matrix is stored
    symbolically so the problem can be exported and cross-checked without
    any solver.
    """

    level: str
    delta: float | None
    target: tuple[int, int, int, int, int, int]
    basis: tuple[Monomial, ...]
    matrix_ids: tuple[tuple[MomentId, ...], ...]
    objective: dict[MomentId, float]
    equalities: tuple[tuple[dict[MomentId, float], float], ...]
    # Vectors w over basis rows with w^T M w pinned to zero by an equality;
    # positive semidefiniteness then forces M w = 0, so the matrix can never
    # be strictly definite.  The solver restricts to the orthogonal
    # complement of these (a facial reduction) to restore an interior.
    kernels: tuple[tuple[tuple[int, float], ...], ...] = ()

    @property
    def zero_constraints(self) -> tuple[tuple[dict[MomentId, float], float], ...]:
        return self.equalities[1:5]

    @property
    def index_map(self) -> dict[tuple[int, int], MomentId]:
        n = len(self.basis)
        return {
            (i, j): self.matrix_ids[i][j] for i in range(n) for j in range(n)
        }

    def moment_ids(self) -> list[MomentId]:
        """Every distinct id the problem mentions, in sorted order."""
        ids = {mid for row in self.matrix_ids for mid in row}
        ids.update(self.objective)
        for fn, _ in self.equalities:
            ids.update(fn)
        return sorted(ids)

    def to_json(self) -> str:
        """Serialize for external cross-validation.

        Schema (``trihardy-moment-problem/1``): ``basis`` is a list of
        per-party word triples; ``index_map`` lists upper-triangle entries
        as ``[i, j, id]``; functionals are ``{"terms": [[id, coef]...],
        "rhs": value}``.  Ids are word triples like the basis entries.
        """
        n = len(self.basis)
        payload = {
            "format": "trihardy-moment-problem/1",
            "level": self.level,
            "delta": self.delta,
            "target": list(self.target),
            "basis": [[list(w) for w in m.words()] for m in self.basis],
            "index_map": [
                [i, j, [list(w) for w in self.matrix_ids[i][j]]]
                for i in range(n)
                for j in range(i, n)
            ],
            "objective": _functional_json(self.objective),
            "equalities": [
                dict(_functional_json(fn), rhs=rhs) for fn, rhs in self.equalities
            ],
        }
        return json.dumps(payload, indent=2)


def _functional_json(fn: Mapping[MomentId, float]) -> dict:
    return {
        "terms": [
            [[list(w) for w in mid], coef] for mid, coef in sorted(fn.items())
        ]
    }


def hardy_moment_problem(
    delta: float | None,
    target: tuple[int, int, int, int, int, int] = (0, 0, 0, 0, 0, 0),
    level: str = "local1",
) -> MomentProblem:
    """Build the guessing problem at a pinned Hardy probability.

    ``delta=None`` leaves the Hardy probability free, which turns the
    problem into "maximise p(target) under the four zeros alone" — with
    the default target that is the relaxation's own Hardy maximum.
    ``delta=0`` is allowed (deterministic models reach it), values above
    :data:`DELTA_CAP` are rejected.
    """
    if delta is not None:
        delta = float(delta)
        if not 0.0 <= delta <= DELTA_CAP:
            raise ParameterError(
                f"delta = {delta!r} outside [0, {DELTA_CAP}]"
            )
    target = tuple(int(v) for v in target)
    if len(target) != 6:
        raise ValueError("target must be (a, b, c, x, y, z)")
    basis = tuple(build_basis(level))
    matrix_ids = tuple(tuple(row) for row in moment_matrix(basis))
    objective = probability_functional(*target)

    equalities: list[tuple[dict[MomentId, float], float]] = [
        ({IDENTITY_ID: 1.0}, 1.0)
    ]
    for mid in _PAIR_ZERO_IDS:
        equalities.append(({mid: 1.0}, 0.0))
    equalities.append((probability_functional(1, 1, 1, 1, 1, 1), 0.0))
    if delta is not None:
        equalities.append(({_HARDY_ID: 1.0}, delta))

    # The fourth zero is the quadratic form of w = expansion coefficients of
    # (1 - A1)(1 - B1)(1 - C1) over basis words: w^T M w = p(-,-,-|1,1,1).
    # When every word of w sits in the basis (all levels above level1) the
    # zero makes each feasible moment matrix singular, which the solver
    # must know about to keep an interior point.
    kernels: list[tuple[tuple[int, float], ...]] = []
    row = {m: k for k, m in enumerate(basis)}
    vec = []
    for sub in range(8):
        picked = [i for i in range(3) if sub >> i & 1]
        words: list[tuple[int, ...]] = [(), (), ()]
        for i in picked:
            words[i] = (1,)
        mono = Monomial(*words)
        if mono not in row:
            vec = None
            break
        vec.append((row[mono], (-1.0) ** len(picked)))
    if vec is not None:
        kernels.append(tuple(sorted(vec)))

    return MomentProblem(
        level=level,
        delta=delta,
        target=target,
        basis=basis,
        matrix_ids=matrix_ids,
        objective=objective,
        equalities=tuple(equalities),
        kernels=tuple(kernels),
    )


# -------------------------------------------------------------------------
# Reduction and solve.
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class SDPSolution:
    """Solved moment problem.

    ``moment_values`` aligns with ``moment_ids``; both cover every id the
    problem mentions (pinned, eliminated, and free alike) when the status
    is optimal, and are None otherwise.  ``min_eigenvalue`` is that of the
    assembled PSD block at the returned moments, ``max_residual`` the
    worst violation among the declared equalities.
    """

    status: str
    optimum: float | None
    moment_ids: tuple[MomentId, ...] | None
    moment_values: np.ndarray | None
    duality_gap: float
    min_eigenvalue: float | None
    max_residual: float | None
    iterations: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"

    def moment(self, mid: MomentId) -> float:
        if self.moment_values is None:
            raise ValueError(f"no moments available on status {self.status!r}")
        try:
            k = self.moment_ids.index(mid)
        except ValueError:
            raise KeyError(f"unknown moment id {mid!r}") from None
        return float(self.moment_values[k])

    def evaluate(self, functional: Mapping[MomentId, float]) -> float:
        return float(sum(coef * self.moment(mid) for mid, coef in functional.items()))


def _failure(status: str, gap: float = math.inf, iterations: int = 0) -> SDPSolution:
    return SDPSolution(
        status=status,
        optimum=None,
        moment_ids=None,
        moment_values=None,
        duality_gap=gap,
        min_eigenvalue=None,
        max_residual=None,
        iterations=iterations,
    )


def _facial_reduction(
    matrix_ids: Sequence[Sequence[MomentId]], pins: dict[MomentId, float]
) -> list[int] | None:
    """Drop basis rows whose diagonal moment is pinned to zero.

    A PSD matrix with a zero diagonal entry has the whole row zero, so
    every id in the dropped row is pinned to zero as well; the sweep
    repeats until stable.  Returns the surviving row indices, or None if
    propagation contradicts an existing nonzero pin (infeasible problem).
    """
    active = list(range(len(matrix_ids)))
    changed = True
    while changed:
        changed = False
        for k in list(active):
            if pins.get(matrix_ids[k][k]) == 0.0:
                active.remove(k)
                changed = True
                for j in range(len(matrix_ids)):
                    mid = matrix_ids[k][j]
                    old = pins.setdefault(mid, 0.0)
                    if old != 0.0:
                        return None
    return active


def _solve_functional(
    matrix_ids: Sequence[Sequence[MomentId]],
    pins: Mapping[MomentId, float],
    equalities: Sequence[tuple[Mapping[MomentId, float], float]],
    objective: Mapping[MomentId, float],
    *,
    box_missing: bool = False,
    kernels: Sequence[Sequence[tuple[int, float]]] = (),
    gap_tol: float = 1e-7,
    max_iterations: int = 200,
):
    """Shared assembly: pin, reduce, eliminate equalities, solve.

    Returns ``(result, moments, optimum)`` where ``moments`` maps every
    mentioned id to its value (None on failure).  ``box_missing`` carries
    ids absent from the matrix as diag(m, 1-m) blocks — sound because all
    projector-word moments lie in [0, 1] — instead of treating them as an
    error.  ``kernels`` lists known null vectors of every feasible matrix
    (basis-row index, coefficient); the PSD block is restricted to their
    orthogonal complement and the null condition M w = 0 is carried over
    as linear equalities, an exact reformulation that restores strict
    feasibility for the interior-point method.
    """
    pins = dict(pins)
    pins.setdefault(IDENTITY_ID, 1.0)
    for fn, rhs in equalities:
        if len(fn) == 1:
            ((mid, coef),) = fn.items()
            value = rhs / coef
            if mid in pins and abs(pins[mid] - value) > 1e-12:
                return _failure("infeasible"), None, None
            pins[mid] = value

    active = _facial_reduction(matrix_ids, pins)
    if active is None:
        return _failure("infeasible"), None, None
    d = len(active)
    position = {i: ii for ii, i in enumerate(active)}

    # Null vectors restricted to the surviving rows (dropped rows are zero
    # already), plus the implied equalities sum_j w_j M_ij = 0.
    kernel_rows: list[np.ndarray] = []
    kernel_eqs: list[tuple[dict[MomentId, float], float]] = []
    for vec in kernels:
        w = np.zeros(d)
        for i, coef in vec:
            if i in position:
                w[position[i]] = coef
        if not np.any(w):
            continue
        kernel_rows.append(w)
        for i in active:
            fn: dict[MomentId, float] = {}
            for j, coef in vec:
                if j not in position:
                    continue
                mid = matrix_ids[i][j]
                fn[mid] = fn.get(mid, 0.0) + coef
            fn = {mid: coef for mid, coef in fn.items() if abs(coef) > 1e-12}
            if fn:
                kernel_eqs.append((fn, 0.0))

    matrix_pool = {matrix_ids[i][j] for i in active for j in active}
    mentioned: set[MomentId] = set(matrix_pool) | set(objective)
    for fn, _ in equalities:
        mentioned.update(fn)
    unknowns = sorted(mid for mid in mentioned if mid not in pins)
    missing = [mid for mid in unknowns if mid not in matrix_pool]
    if missing and not box_missing:
        raise RuntimeError(f"moments outside the matrix without boxing: {missing}")
    boxed = sorted(missing) if box_missing else []

    index = {mid: k for k, mid in enumerate(unknowns)}
    K = len(unknowns)

    A0 = np.zeros((d, d))
    As = np.zeros((K, d, d))
    for ii, i in enumerate(active):
        for jj, j in enumerate(active):
            mid = matrix_ids[i][j]
            if mid in pins:
                A0[ii, jj] = pins[mid]
            else:
                As[index[mid], ii, jj] = 1.0

    if kernel_rows:
        Wk = np.array(kernel_rows)
        _, sv, Vt = np.linalg.svd(Wk)
        rank = int(np.sum(sv > 1e-12 * sv[0]))
        B = Vt[rank:].T  # orthonormal complement, d x (d - rank)
        A0 = B.T @ A0 @ B
        As = np.einsum("ai,kab,bj->kij", B, As, B)
    dr = A0.shape[0]

    dim = dr + 2 * len(boxed)
    if dim > 200:
        raise ValueError(f"moment-matrix dimension {dim} exceeds the 200 cap")

    G0 = np.zeros((dim, dim))
    Gs = np.zeros((K, dim, dim))
    G0[:dr, :dr] = A0
    Gs[:, :dr, :dr] = As
    for t, mid in enumerate(boxed):
        p1, p2 = dr + 2 * t, dr + 2 * t + 1
        Gs[index[mid], p1, p1] = 1.0
        G0[p2, p2] = 1.0
        Gs[index[mid], p2, p2] = -1.0

    # Remaining multi-term equalities over the unknowns.
    rows, rhs_vec = [], []
    for fn, rhs in list(equalities) + kernel_eqs:
        if len(fn) == 1 and next(iter(fn)) in pins:
            continue  # consumed as a pin (or checked against one below)
        row = np.zeros(K)
        shift = rhs
        for mid, coef in fn.items():
            if mid in pins:
                shift -= coef * pins[mid]
            else:
                row[index[mid]] += coef
        if not np.any(row):
            if abs(shift) > 1e-9:
                return _failure("infeasible"), None, None
            continue
        rows.append(row)
        rhs_vec.append(shift)

    if rows:
        E = np.array(rows)
        f = np.array(rhs_vec)
        u0, *_ = np.linalg.lstsq(E, f, rcond=None)
        if np.linalg.norm(E @ u0 - f) > 1e-9:
            return _failure("infeasible"), None, None
        _, sv, Vt = np.linalg.svd(E)
        rank = int(np.sum(sv > 1e-12 * max(1.0, sv[0] if sv.size else 1.0)))
        N = Vt[rank:].T
    else:
        u0 = np.zeros(K)
        N = np.eye(K)

    c = np.zeros(K)
    const = 0.0
    for mid, coef in objective.items():
        if mid in pins:
            const += coef * pins[mid]
        else:
            c[index[mid]] += coef

    F0 = G0 + np.tensordot(u0, Gs, axes=1)
    qvec = c @ N
    Fs_all = [np.tensordot(N[:, j], Gs, axes=1) for j in range(N.shape[1])]
    # Directions that no longer touch the projected matrix are free: a flat
    # improving direction means an unbounded objective, a neutral one is
    # fixed at the particular solution.
    keep = []
    for j, Fj in enumerate(Fs_all):
        if np.abs(Fj).max() > 1e-12:
            keep.append(j)
        elif abs(qvec[j]) > 1e-12:
            return _failure("infeasible"), None, None
    N = N[:, keep]
    Fs = [Fs_all[j] for j in keep]
    res = solve_semidefinite(
        qvec[keep], F0, Fs, gap_tol=gap_tol, max_iterations=max_iterations
    )
    if not res.ok:
        return _failure(res.status, res.gap, res.iterations), None, None

    u = u0 + N @ res.z
    moments = dict(pins)
    moments.update({mid: float(u[index[mid]]) for mid in unknowns})
    return res, moments, const + float(c @ u)


def solve_sdp(
    problem: MomentProblem,
    *,
    gap_tol: float = 1e-7,
    max_iterations: int = 200,
) -> SDPSolution:
    """Solve a Hardy moment problem to the requested duality gap."""
    res, moments, optimum = _solve_functional(
        problem.matrix_ids,
        {},
        problem.equalities,
        problem.objective,
        box_missing=problem.level == "level1",
        kernels=problem.kernels,
        gap_tol=gap_tol,
        max_iterations=max_iterations,
    )
    if moments is None:
        return res  # already an SDPSolution describing the failure

    ids = sorted(moments)
    values = np.array([moments[mid] for mid in ids])
    # Certificate-grade diagnostics recomputed from the moments themselves:
    # the full (unreduced) moment matrix, dropped rows included, must be PSD.
    n = len(problem.basis)
    M = np.array(
        [[moments[problem.matrix_ids[i][j]] for j in range(n)] for i in range(n)]
    )
    min_eig = float(np.linalg.eigvalsh(0.5 * (M + M.T)).min())
    residual = max(
        abs(sum(coef * moments.get(mid, 0.0) for mid, coef in fn.items()) - rhs)
        for fn, rhs in problem.equalities
    )
    return SDPSolution(
        status="optimal",
        optimum=optimum,
        moment_ids=tuple(ids),
        moment_values=values,
        duality_gap=res.gap,
        min_eigenvalue=min_eig,
        max_residual=float(residual),
        iterations=res.iterations,
    )


# -------------------------------------------------------------------------
# The randomness curve.
# -------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    """One delta on the certified-randomness curve."""

    delta: float
    level: str
    settings: tuple[int, int, int] | None
    guess_prob: float
    bits: float
    status: str
    gap: float


def randomness_curve(
    deltas: Sequence[float],
    level: str = "local1",
    settings: tuple[int, int, int] | None = (0, 0, 0),
    *,
    gap_tol: float = 1e-7,
    max_iterations: int = 200,
) -> list[CurvePoint]:
    """Certified bits against the pinned Hardy probability.

    For each delta the guessing probability is the maximum solved optimum
    over the eight outcomes at ``settings`` (or over all 64 entries when
    ``settings`` is None — the conservative any-settings mode).  A failed
    solve is reported inline through ``status`` with NaN bits; the rest of
    the curve is still produced.
    """
    if settings is not None:
        settings = tuple(int(v) for v in settings)
        triples = [settings]
    else:
        triples = [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)]

    points: list[CurvePoint] = []
    for delta in deltas:
        worst = 0.0
        status = "optimal"
        gap = 0.0
        for xyz in triples:
            for a in (0, 1):
                for b_ in (0, 1):
                    for c_ in (0, 1):
                        problem = hardy_moment_problem(
                            delta, (a, b_, c_) + xyz, level
                        )
                        sol = solve_sdp(
                            problem, gap_tol=gap_tol, max_iterations=max_iterations
                        )
                        if not sol.ok:
                            status = sol.status
                            continue
                        worst = max(worst, sol.optimum)
                        gap = max(gap, sol.duality_gap)
        if status == "optimal":
            bits = -math.log2(min(max(worst, 1e-300), 1.0))
        else:
            bits = math.nan
        points.append(
            CurvePoint(
                delta=float(delta),
                level=level,
                settings=settings,
                guess_prob=worst,
                bits=bits,
                status=status,
                gap=gap,
            )
        )
    return points
