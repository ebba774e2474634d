"""Finite ontic-model classes and the LP certificates that rule them out.

Two strategy classes are enumerated exhaustively:

* *fully local*: each party answers deterministically from its own setting
  (4 single-party functions per party, 64 product strategies);
* *no-signalling bilocal* (NSBL): one party answers deterministically on
  its own while the remaining pair may share an arbitrary extremal
  bipartite no-signalling box (local-deterministic or PR-type).

Because both classes are convex hulls of finitely many extremal
strategies, the question "can a model of this class reproduce the four
Hardy zero constraints with a nonzero Hardy probability?" is a small
linear program over mixture weights; :func:`max_hardy_over_model` solves
it with the in-package simplex.  The bipartite no-signalling extremal
boxes are derived on the fly by basic-solution enumeration plus an
extremality LP, not hardcoded.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .behavior import Behavior, check_hardy_constraints
from .simplex import solve_lp

__all__ = [
    "DeterministicStrategy",
    "NSExtremalPair",
    "NSBLStrategy",
    "StrategySet",
    "bipartite_ns_vertices",
    "chsh_value",
    "enumerate_fully_local",
    "enumerate_nsbl",
    "max_hardy_over_model",
    "check_predictability_failure",
    "PredictabilityReport",
]

_PM = (1, -1)


def _outcome_idx(o: int) -> int:
    return 0 if o == 1 else 1


def _fmt(o: int) -> str:
    return "+" if o == 1 else "-"


@dataclass(frozen=True)
class DeterministicStrategy:
    """A fully local deterministic strategy: per party, outputs at settings 0, 1."""

    a: tuple[int, int]
    b: tuple[int, int]
    c: tuple[int, int]

    def behavior(self) -> Behavior:
        table = np.zeros((2, 2, 2, 2, 2, 2))
        for x in (0, 1):
            for y in (0, 1):
                for z in (0, 1):
                    table[
                        x, y, z,
                        _outcome_idx(self.a[x]),
                        _outcome_idx(self.b[y]),
                        _outcome_idx(self.c[z]),
                    ] = 1.0
        return Behavior(table)

    def label(self) -> str:
        return (
            f"det a=({_fmt(self.a[0])}{_fmt(self.a[1])}) "
            f"b=({_fmt(self.b[0])}{_fmt(self.b[1])}) "
            f"c=({_fmt(self.c[0])}{_fmt(self.c[1])})"
        )


@dataclass(frozen=True)
class NSExtremalPair:
    """An extremal vertex of the bipartite 2-setting/2-outcome no-signalling set.

    ``box`` has shape (2, 2, 2, 2) indexed [x, y, ia, ib] (outcome index 0
    is +1); ``tag`` is ``"local"`` (all entries 0/1) or ``"pr"`` (entries
    0 or 1/2, PR-box type).
    """

    box: np.ndarray
    tag: str

    def __post_init__(self) -> None:
        arr = np.array(self.box, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "box", arr)


@dataclass(frozen=True)
class NSBLStrategy:
    """One party deterministic, the other two sharing an extremal NS box.

    ``bipartition`` names the isolated party: ``"A|BC"``, ``"B|AC"`` or
    ``"C|AB"``.  ``solo`` is the isolated party's deterministic outputs at
    settings (0, 1).
    """

    bipartition: str
    solo: tuple[int, int]
    pair: NSExtremalPair

    def behavior(self) -> Behavior:
        solo = np.zeros((2, 2))
        solo[0, _outcome_idx(self.solo[0])] = 1.0
        solo[1, _outcome_idx(self.solo[1])] = 1.0
        q = self.pair.box
        if self.bipartition == "A|BC":
            table = np.einsum("xi,yzjk->xyzijk", solo, q)
        elif self.bipartition == "B|AC":
            table = np.einsum("yj,xzik->xyzijk", solo, q)
        elif self.bipartition == "C|AB":
            table = np.einsum("zk,xyij->xyzijk", solo, q)
        else:
            raise ValueError(f"unknown bipartition {self.bipartition!r}")
        return Behavior(table)

    def label(self) -> str:
        return (
            f"nsbl {self.bipartition} solo=({_fmt(self.solo[0])}{_fmt(self.solo[1])}) "
            f"pair={self.pair.tag}"
        )


class StrategySet(Sequence[Behavior]):
    """An ordered finite set of strategies realized as behaviours."""

    def __init__(self, behaviors: Sequence[Behavior], labels: Sequence[str]):
        if len(behaviors) != len(labels):
            raise ValueError("behaviors and labels must have equal length")
        self._behaviors = tuple(behaviors)
        self._labels = tuple(labels)

    def __len__(self) -> int:
        return len(self._behaviors)

    def __getitem__(self, i):
        return self._behaviors[i]

    def __iter__(self) -> Iterator[Behavior]:
        return iter(self._behaviors)

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def tables(self) -> np.ndarray:
        """All behaviours stacked as a (n, 64) array of flat tables."""
        return np.stack([b.flat for b in self._behaviors])

    def subset(self, indices: Sequence[int]) -> "StrategySet":
        return StrategySet(
            [self._behaviors[i] for i in indices],
            [self._labels[i] for i in indices],
        )


# --------------------------------------------------------------------------
# Bipartite no-signalling extremal boxes, derived in-repo.
# --------------------------------------------------------------------------


def _ns_equality_system() -> tuple[np.ndarray, np.ndarray]:
    """Equality rows for the bipartite NS polytope over 16 variables.

    Variables are q(a, b | x, y) flattened in (x, y, ia, ib) order.  Rows:
    four normalizations plus, for each party and each of its settings, the
    independence of its marginal from the other party's setting (one
    outcome suffices given normalization).  The system has rank 8, leaving
    the familiar 8-dimensional no-signalling set.
    """

    def flat(x: int, y: int, ia: int, ib: int) -> int:
        return ((x * 2 + y) * 2 + ia) * 2 + ib

    rows = []
    rhs = []
    for x in (0, 1):
        for y in (0, 1):
            row = np.zeros(16)
            for ia in (0, 1):
                for ib in (0, 1):
                    row[flat(x, y, ia, ib)] = 1.0
            rows.append(row)
            rhs.append(1.0)
    for x in (0, 1):  # A's marginal at setting x must not depend on y
        row = np.zeros(16)
        for ib in (0, 1):
            row[flat(x, 0, 0, ib)] += 1.0
            row[flat(x, 1, 0, ib)] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    for y in (0, 1):  # B's marginal at setting y must not depend on x
        row = np.zeros(16)
        for ia in (0, 1):
            row[flat(0, y, ia, 0)] += 1.0
            row[flat(1, y, ia, 0)] -= 1.0
        rows.append(row)
        rhs.append(0.0)
    return np.array(rows), np.array(rhs)


def chsh_value(box: np.ndarray) -> float:
    """Largest CHSH combination |±E00 ± E01 ± E10 ± E11| (odd minus signs).

    Local boxes stay at or below 2; PR-type vertices reach 4.
    """
    box = np.asarray(box, dtype=float)
    sign = np.array([[1.0, -1.0], [-1.0, 1.0]])  # a*b over outcome indices
    corr = np.einsum("xyij,ij->xy", box, sign)
    best = 0.0
    for signs in itertools.product((1.0, -1.0), repeat=4):
        if signs[0] * signs[1] * signs[2] * signs[3] > 0:
            continue
        val = abs(sum(sg * corr[x, y] for sg, (x, y) in
                      zip(signs, itertools.product((0, 1), repeat=2))))
        best = max(best, val)
    return best


@lru_cache(maxsize=1)
def bipartite_ns_vertices() -> tuple[NSExtremalPair, ...]:
    """All extremal points of the bipartite 2x2x2x2 no-signalling set.

    Enumerates every basic solution of the 8-row equality system (all
    C(16,8) = 12870 column subsets, solved in one batched call), keeps the
    nonnegative ones, deduplicates, and then *verifies* extremality of
    each survivor by an LP showing it is not a convex mixture of the
    others.  Returns 24 vertices: 16 local-deterministic and 8 PR-type,
    sorted lexicographically for reproducibility.
    """
    E, rhs = _ns_equality_system()
    subsets = np.array(list(itertools.combinations(range(16), 8)))
    mats = E[:, subsets].transpose(1, 0, 2)  # (12870, 8, 8)
    dets = np.linalg.det(mats)
    solvable = np.abs(dets) > 1e-9
    k = int(solvable.sum())
    sols = np.linalg.solve(mats[solvable], np.tile(rhs, (k, 1))[:, :, None])[:, :, 0]

    seen: dict[tuple, np.ndarray] = {}
    for subset, sol in zip(subsets[solvable], sols):
        if sol.min() < -1e-9:
            continue
        full = np.zeros(16)
        full[subset] = np.clip(sol, 0.0, None)
        key = tuple(np.round(full, 9))
        seen.setdefault(key, full)

    candidates = [seen[key] for key in sorted(seen)]
    points = np.stack(candidates)  # (k, 16)

    vertices: list[NSExtremalPair] = []
    for i, v in enumerate(points):
        others = np.delete(points, i, axis=0)
        A = np.vstack([others.T, np.ones(len(others))])
        bvec = np.concatenate([v, [1.0]])
        res = solve_lp(np.zeros(len(others)), A, bvec)
        if res.status == "infeasible":
            box = v.reshape(2, 2, 2, 2)
            if np.allclose(np.round(box), box, atol=1e-9):
                tag = "local"
            elif np.allclose(np.round(2 * box) / 2, box, atol=1e-9):
                tag = "pr"
            else:  # pragma: no cover - would indicate an enumeration bug
                raise RuntimeError(f"vertex with unexpected entry pattern: {v}")
            vertices.append(NSExtremalPair(box=box, tag=tag))
    return tuple(vertices)


# --------------------------------------------------------------------------
# Strategy enumerations.
# --------------------------------------------------------------------------


def enumerate_fully_local() -> StrategySet:
    """All 64 fully local deterministic strategies."""
    behaviors = []
    labels = []
    for a0, a1, b0, b1, c0, c1 in itertools.product(_PM, repeat=6):
        strat = DeterministicStrategy((a0, a1), (b0, b1), (c0, c1))
        behaviors.append(strat.behavior())
        labels.append(strat.label())
    return StrategySet(behaviors, labels)


def enumerate_nsbl() -> StrategySet:
    """All 288 extremal no-signalling-bilocal strategies.

    3 bipartitions x 4 solo deterministic tables x 24 extremal pair boxes.
    Strategies whose pair box is local-deterministic duplicate fully local
    strategies (and each fully local strategy appears once per
    bipartition); the duplicates are kept so the index layout stays the
    plain product order.
    """
    behaviors = []
    labels = []
    pairs = bipartite_ns_vertices()
    for bipartition in ("A|BC", "B|AC", "C|AB"):
        for solo in itertools.product(_PM, repeat=2):
            for k, pair in enumerate(pairs):
                strat = NSBLStrategy(bipartition, solo, pair)
                behaviors.append(strat.behavior())
                labels.append(f"{strat.label()}#{k}")
    return StrategySet(behaviors, labels)


# --------------------------------------------------------------------------
# LP certificates.
# --------------------------------------------------------------------------


def _zero_constraint_rows(tables: np.ndarray) -> np.ndarray:
    """Per-strategy coefficients of the four Hardy zero constraints.

    ``tables`` is (n, 64) in flat (x,y,z,a,b,c) order.  The pair marginals
    are evaluated at spectator setting 0; all enumerated strategies are
    no-signalling, so the spectator choice is immaterial.
    """
    t = tables.reshape(-1, 2, 2, 2, 2, 2, 2)
    ab = t[:, 1, 0, 0, 0, 0, :].sum(axis=-1)  # p_AB(+,+|1,0), z=0
    bc = t[:, 0, 1, 0, :, 0, 0].sum(axis=-1)  # p_BC(+,+|1,0), x=0
    ac = t[:, 0, 0, 1, 0, :, 0].sum(axis=-1)  # p_AC(+,+|0,1), y=0
    triple = t[:, 1, 1, 1, 1, 1, 1]
    return np.stack([ab, bc, ac, triple])


def max_hardy_over_model(
    strategies: StrategySet | Sequence[Behavior],
    *,
    include_triple_zero: bool = True,
    tol: float = 1e-9,
) -> tuple[float, np.ndarray]:
    """Maximum Hardy probability over zero-constrained mixtures of ``strategies``.

    Solves  max  sum_k mu_k p_k(+1,+1,+1|0,0,0)  over  mu >= 0,
    sum(mu) = 1, with the four Hardy zero constraints imposed on the
    mixture (``include_triple_zero=False`` drops the all-minus triple
    constraint, the relaxation under which PR-type pair boxes open a gap).
    Returns the optimum and one optimal weight vector.
    """
    if isinstance(strategies, StrategySet):
        tables = strategies.tables
    else:
        tables = np.stack([b.flat for b in strategies])
    n = tables.shape[0]
    if n == 0:
        raise ValueError("strategy set is empty")

    objective = tables.reshape(n, -1)[:, 0]  # p(+1,+1,+1|0,0,0)
    zero_rows = _zero_constraint_rows(tables)
    if not include_triple_zero:
        zero_rows = zero_rows[:3]
    A = np.vstack([np.ones(n), zero_rows])
    b = np.zeros(A.shape[0])
    b[0] = 1.0
    res = solve_lp(objective, A, b, maximize=True, tol=tol)
    if not res.ok:
        # The all-minus deterministic strategy satisfies every zero row, so
        # mixtures over any set containing it are feasible; a failure here
        # means the caller passed a set that cannot meet the constraints.
        raise RuntimeError(f"zero-constrained mixture LP returned {res.status}")
    return res.value, res.x


@dataclass(frozen=True)
class PredictabilityReport:
    """Outcome of the expressibility check for a zero-constrained behaviour."""

    target: float
    model_optimum: float
    expressible: bool
    tol: float

    @property
    def gap(self) -> float:
        return self.target - self.model_optimum


def check_predictability_failure(
    b: Behavior,
    strategies: StrategySet | Sequence[Behavior] | None = None,
    *,
    tol: float = 1e-9,
) -> PredictabilityReport:
    """Can a predictable (outcome-deterministic) model reproduce ``b``'s p_H?

    ``b`` must satisfy the three pairwise zero constraints (checked at
    1e-9); the triple zero is not required of the input, since it is the
    constraint the model class is tested against — the all-minus point,
    which violates only the triple zero, is a legitimate query.  The model
    optimum is the LP maximum of the Hardy probability over mixtures of
    ``strategies`` (default: the fully local set) satisfying all four
    zeros.  Any value in [0, optimum] is attainable by convexity (the
    all-minus strategy contributes 0), so ``b`` is expressible exactly
    when its Hardy probability does not exceed the optimum.
    """
    pairwise_ok = check_hardy_constraints(b, tol=1e-9).passed[:3]
    if not all(pairwise_ok):
        raise ValueError("behaviour does not satisfy the pairwise Hardy zero constraints")
    if strategies is None:
        strategies = enumerate_fully_local()
    optimum, _ = max_hardy_over_model(strategies, tol=tol)
    target = b.hardy_probability
    return PredictabilityReport(
        target=target,
        model_optimum=optimum,
        expressible=bool(target <= optimum + tol),
        tol=tol,
    )
