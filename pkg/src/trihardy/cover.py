"""Concave cover of the Hardy probability and the self-testable region.

The concave cover (concave envelope) of omega over the sampled cube is
evaluated pointwise through the upper hull of the hypograph: the cover
value at x is the best value any convex mixture of sample points can
reach while averaging to x,

    E(x) = max  sum_i lam_i v_i
           s.t. sum_i lam_i p_i = x,  sum_i lam_i = 1,  lam >= 0.

A point lies *on* the cover when no mixture strictly beats its own value,
and the self-testable region is the set of on-cover points with positive
omega (the positivity filter is applied after the hull computation).

The LP-per-point formulation answers exactly the same question as a 4-D
upper-hull facet enumeration would, reuses the package simplex, and
parallelizes trivially; :func:`self_test_region` accepts an index range
so callers can shard the scan across processes.

For fine grids each query is first solved against only the samples in an
axis-aligned window around it.  Restricting the competitor set can only
lower the LP optimum, so a window verdict of "dominated" (off the cover)
is already final; points the window pass leaves on the cover are
re-checked against the full sample set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .concavity import GridSpec, omega
from .simplex import solve_lp

__all__ = [
    "HypographSample",
    "CoverResult",
    "hypograph_samples",
    "cover_value_at",
    "cover_result_at",
    "self_test_region",
    "WINDOW_THRESHOLD",
]

#: Grids with more points than this use the windowed scan in
#: :func:`self_test_region`.
WINDOW_THRESHOLD = 30**3


@dataclass(frozen=True)
class HypographSample:
    """A sampled graph point (point, value) of the function being covered."""

    point: tuple[float, ...]
    value: float


@dataclass(frozen=True)
class CoverResult:
    """Cover diagnosis of one query point."""

    point: tuple[float, float, float]
    omega: float
    cover_value: float
    gap: float
    on_cover: bool

    @property
    def in_region(self) -> bool:
        """Membership in the self-testable set: on the cover with omega > 0."""
        return self.on_cover and self.omega > 0.0


def hypograph_samples(grid: GridSpec | None = None) -> list[HypographSample]:
    """Graph samples of omega over ``grid`` (default 60^3).

    Points with omega <= 0 are *included*: the hull is built over the
    whole cube and the positivity filter is applied to the results, not
    to the inputs.
    """
    if grid is None:
        grid = GridSpec()
    pts = grid.points()
    vals = omega(pts[:, 0], pts[:, 1], pts[:, 2])
    return [
        HypographSample(point=tuple(float(v) for v in p), value=float(w))
        for p, w in zip(pts, vals)
    ]


def _sample_arrays(samples) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(samples, tuple) and len(samples) == 2:
        pts, vals = samples
        return np.asarray(pts, dtype=float), np.asarray(vals, dtype=float)
    pts = np.array([s.point for s in samples], dtype=float)
    vals = np.array([s.value for s in samples], dtype=float)
    return pts, vals


def _mixture_lp(
    x: np.ndarray,
    points: np.ndarray,
    values: np.ndarray,
    *,
    initial_basis=None,
):
    A = np.vstack([points.T, np.ones(len(points))])
    b = np.concatenate([x, [1.0]])
    return solve_lp(values, A, b, maximize=True, initial_basis=initial_basis)


def cover_value_at(x, samples) -> float:
    """The cover value E(x) as a mixture optimum over ``samples``.

    ``samples`` is a list of :class:`HypographSample` (of any dimension;
    the 1-D case makes a handy sanity harness) or a ``(points, values)``
    array pair.  Raises ``ValueError`` when x lies outside the convex
    hull of the sample points — the cover is not extrapolated.
    """
    points, values = _sample_arrays(samples)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if points.ndim != 2 or points.shape[1] != x.size:
        raise ValueError(
            f"sample points of dimension {points.shape[1:]} do not match query {x.size}"
        )
    res = _mixture_lp(x, points, values)
    if res.status == "infeasible":
        raise ValueError(f"query point {tuple(x)} lies outside the sampled hull")
    if not res.ok:  # pragma: no cover - bounded by construction
        raise RuntimeError(f"cover LP returned {res.status}")
    return res.value


def cover_result_at(x, samples, *, tol: float = 1e-8) -> CoverResult:
    """Cover diagnosis of an arbitrary cube point against ``samples``.

    The query's own graph point (x, omega(x)) is appended to the sample
    columns, so the LP is always feasible, the gap is nonnegative, and
    off-grid queries (the named reference points) are meaningful.
    """
    x = np.asarray(x, dtype=float).reshape(3)
    value = float(omega(x[0], x[1], x[2]))
    points, values = _sample_arrays(samples)
    points = np.vstack([points, x])
    values = np.concatenate([values, [value]])
    res = _mixture_lp(x, points, values, initial_basis=None)
    if not res.ok:  # pragma: no cover - query column guarantees feasibility
        raise RuntimeError(f"cover LP returned {res.status}")
    gap = res.value - value
    return CoverResult(
        point=(float(x[0]), float(x[1]), float(x[2])),
        omega=value,
        cover_value=res.value,
        gap=gap,
        on_cover=bool(gap <= tol),
    )


def _axis_window_ranges(axis: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    lo = np.searchsorted(axis, axis - radius, side="left")
    hi = np.searchsorted(axis, axis + radius, side="right")
    return lo, hi


def self_test_region(
    grid: GridSpec | None = None,
    *,
    tol: float = 1e-8,
    window: float = 0.25,
    indices: Sequence[int] | None = None,
) -> list[CoverResult]:
    """Cover diagnosis of every grid point (or of ``indices`` only).

    On grids above :data:`WINDOW_THRESHOLD` points, each query first
    competes only against samples within a Chebyshev ``window`` of it;
    dominated verdicts are final (fewer competitors can only lower the
    optimum) and surviving on-cover points are re-checked against the
    full sample set.  Membership in the self-testable region is exposed
    as ``CoverResult.in_region``.
    """
    if grid is None:
        grid = GridSpec()
    r_ax, s_ax, t_ax = grid.axes()
    nr, ns, nt = len(r_ax), len(s_ax), len(t_ax)
    points = grid.points()
    values = omega(points[:, 0], points[:, 1], points[:, 2])
    A_full = np.vstack([points.T, np.ones(len(points))])

    windowed = len(points) > WINDOW_THRESHOLD and window is not None
    if windowed:
        r_lo, r_hi = _axis_window_ranges(r_ax, window)
        s_lo, s_hi = _axis_window_ranges(s_ax, window)
        t_lo, t_hi = _axis_window_ranges(t_ax, window)

    if indices is None:
        indices = range(len(points))

    results: list[CoverResult] = []
    for i in indices:
        i = int(i)
        x = points[i]
        target = float(values[i])
        b = np.concatenate([x, [1.0]])

        if windowed:
            ir, rem = divmod(i, ns * nt)
            is_, it = divmod(rem, nt)
            r_range = np.arange(r_lo[ir], r_hi[ir])
            s_range = np.arange(s_lo[is_], s_hi[is_])
            t_range = np.arange(t_lo[it], t_hi[it])
            block = (
                (r_range[:, None, None] * ns + s_range[None, :, None]) * nt
                + t_range[None, None, :]
            ).reshape(-1)
            q_pos = int(np.searchsorted(block, i))
            basis = _corner_basis(block, q_pos, len(s_range), len(t_range))
            res = solve_lp(
                values[block], A_full[:, block], b, maximize=True, initial_basis=basis
            )
            if not res.ok:  # pragma: no cover
                raise RuntimeError(f"window cover LP returned {res.status}")
            gap = res.value - target
            if gap <= tol:
                # Window pass says on-cover: confirm against all samples.
                res = solve_lp(values, A_full, b, maximize=True, initial_basis=None)
                if not res.ok:  # pragma: no cover
                    raise RuntimeError(f"cover LP returned {res.status}")
                gap = res.value - target
            cover_value = res.value
        else:
            res = solve_lp(values, A_full, b, maximize=True)
            if not res.ok:  # pragma: no cover
                raise RuntimeError(f"cover LP returned {res.status}")
            cover_value = res.value
            gap = cover_value - target

        results.append(
            CoverResult(
                point=(float(x[0]), float(x[1]), float(x[2])),
                omega=target,
                cover_value=cover_value,
                gap=gap,
                on_cover=bool(gap <= tol),
            )
        )
    return results


def _corner_basis(block: np.ndarray, q_pos: int, ns: int, nt: int) -> list[int] | None:
    """A candidate starting basis: the query column plus three window corners.

    The query column alone already solves the equality system (it *is*
    the target point with weight one), so any three further columns that
    keep the basis matrix nonsingular give a feasible degenerate start;
    box corners are affinely spread.  ``solve_lp`` validates and quietly
    falls back to phase 1 when the pick is singular or duplicated.
    """
    k = len(block)
    candidates = [0, k - 1, (ns - 1) * nt, nt - 1, k - nt]
    picks = [q_pos]
    for cand in candidates:
        if 0 <= cand < k and cand not in picks:
            picks.append(cand)
        if len(picks) == 4:
            return picks
    return None
