"""Certified randomness figures of self-tested Hardy behaviours.

The guessing probability of a settings triple is the largest of the eight
outcome probabilities there; its negative log2 is the certified
min-entropy in bits *provided* the behaviour itself is certified
(self-tested), which callers establish through the cover module.  The
certification status is carried as a label — ``True`` / ``False`` /
``None`` (not checked) — never as an exception, so uncertified points can
still be tabulated and compared.

Beyond single points, :func:`randomness_region` sweeps an iso-Hardy slice
(all certified grid points whose omega lies within a tolerance of a
target value) and reports the spread of certified bits over it, which is
the shaded-region construction of the figure pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .behavior import Behavior, HardyParams, ParameterError, hardy_behavior, hardy_probability
from .concavity import GridSpec, omega
from .cover import CoverResult, cover_result_at, self_test_region
from .quantum import optimal_params

__all__ = [
    "RandomnessReport",
    "IsoHardySlice",
    "RandomnessRegion",
    "RowUniformityReport",
    "DELTA_MAX",
    "guessing_probability",
    "certified_bits",
    "iso_hardy_slice",
    "randomness_region",
    "equalizing_r",
    "row_uniformity_analysis",
    "params_for_delta",
]

#: The maximum attainable Hardy probability (at the optimal parameters);
#: iso-Hardy targets must lie in (0, DELTA_MAX].
DELTA_MAX = hardy_probability(optimal_params())

#: The named reference points appended to qualifying slices.
_ANCHORS = (
    (7.0 / 8.0, 4.0 / 7.0, 4.0 / 7.0),
    optimal_params().as_tuple(),
)


@dataclass(frozen=True)
class RandomnessReport:
    """Guessing probability and min-entropy of one settings triple."""

    params: HardyParams
    settings: tuple[int, int, int]
    guess_prob: float
    bits: float
    certified: bool | None  # None: membership in the self-test region not checked

    @property
    def uncertified(self) -> bool:
        return self.certified is not True


@dataclass(frozen=True)
class IsoHardySlice:
    """Certified grid points whose omega is within ``tolerance`` of ``delta``."""

    delta: float
    tolerance: float
    members: tuple[tuple[float, float, float], ...]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class RandomnessRegion:
    """Spread of certified bits over an iso-Hardy slice."""

    delta: float
    settings: tuple[int, int, int]
    min_bits: float | None
    max_bits: float | None
    members: tuple[RandomnessReport, ...]

    @property
    def empty(self) -> bool:
        return not self.members


def guessing_probability(
    source: Behavior | HardyParams, settings: tuple[int, int, int] | None = (1, 1, 1)
) -> float:
    """Largest outcome probability at ``settings``.

    ``settings=None`` gives the global (and more conservative) figure: the
    maximum over all 64 table entries, i.e. the best guess over every
    settings triple at once.
    """
    b = hardy_behavior(source) if isinstance(source, HardyParams) else source
    if settings is None:
        return float(b.table.max())
    x, y, z = settings
    return float(b.settings_row(x, y, z).max())


def certified_bits(
    params: HardyParams,
    settings: tuple[int, int, int] = (1, 1, 1),
    *,
    certified: bool | None = None,
    samples=None,
) -> RandomnessReport:
    """Min-entropy of ``settings`` under the behaviour at ``params``.

    ``certified`` carries a caller-established self-test verdict through
    to the report.  Alternatively ``samples`` (hypograph samples as
    accepted by the cover module) triggers an on-the-spot cover check.
    With neither, the report is labelled ``None`` — bits are still
    computed, as the figure comparisons need uncertified values too.
    """
    if certified is not None and samples is not None:
        raise ValueError("pass either a certified flag or samples, not both")
    g = guessing_probability(params, settings)
    if samples is not None:
        certified = cover_result_at(params.as_tuple(), samples).in_region
    return RandomnessReport(
        params=params,
        settings=tuple(int(v) for v in settings),
        guess_prob=g,
        bits=-math.log2(g),
        certified=certified,
    )


def _validate_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 < delta <= DELTA_MAX + 1e-12:
        raise ParameterError(
            f"delta = {delta!r} outside (0, {DELTA_MAX:.6g}] (the attainable range)"
        )
    return delta


def iso_hardy_slice(
    delta: float,
    grid: GridSpec | None = None,
    *,
    tolerance: float = 1e-4,
    cover_results: Sequence[CoverResult] | None = None,
    anchors: bool = True,
) -> IsoHardySlice:
    """Grid points (plus qualifying named anchors) with omega near ``delta``,
    restricted to the self-test region.

    Candidates are grid points with ``|omega - delta| <= tolerance``; each
    is kept only if it lies on the concave cover with positive omega.
    When ``cover_results`` from a prior full scan of the same grid are
    supplied, membership is read off them; otherwise only the candidates
    are diagnosed (windowed on fine grids).  ``anchors`` appends the two
    named reference points whenever they qualify for the slice.
    """
    delta = _validate_delta(delta)
    if grid is None:
        grid = GridSpec()
    points = grid.points()
    values = omega(points[:, 0], points[:, 1], points[:, 2])
    # Positive omega is exactly the valid parameter domain, so negative
    # near-misses (possible when tolerance >= delta) are excluded up front.
    candidate_idx = np.flatnonzero(
        (np.abs(values - delta) <= tolerance) & (values > 0.0)
    )

    members: list[tuple[float, float, float]] = []
    if cover_results is not None:
        if len(cover_results) != len(points):
            raise ValueError("cover_results must cover the full grid, in grid order")
        for i in candidate_idx:
            if cover_results[int(i)].in_region:
                members.append(tuple(float(v) for v in points[int(i)]))
    elif candidate_idx.size:
        for res in self_test_region(grid, indices=candidate_idx.tolist()):
            if res.in_region:
                members.append(res.point)

    if anchors:
        sample_pair = (points, values)
        for anchor in _ANCHORS:
            w = float(omega(*anchor))
            if abs(w - delta) <= tolerance and anchor not in members:
                if cover_result_at(anchor, sample_pair).in_region:
                    members.append(anchor)

    return IsoHardySlice(delta=delta, tolerance=tolerance, members=tuple(members))


def randomness_region(
    delta: float,
    grid: GridSpec | None = None,
    settings: tuple[int, int, int] = (1, 1, 1),
    *,
    tolerance: float = 1e-4,
    cover_results: Sequence[CoverResult] | None = None,
) -> RandomnessRegion:
    """Spread of certified bits over the iso-Hardy slice at ``delta``.

    Every member of the returned region is certified by construction; an
    empty slice yields ``min_bits = max_bits = None`` rather than an
    error, so sweeps over many deltas degrade gracefully.
    """
    slice_ = iso_hardy_slice(
        delta, grid, tolerance=tolerance, cover_results=cover_results
    )
    reports = tuple(
        certified_bits(HardyParams(*point), settings, certified=True)
        for point in slice_.members
    )
    if not reports:
        return RandomnessRegion(delta, tuple(settings), None, None, ())
    bits = [rep.bits for rep in reports]
    return RandomnessRegion(
        delta=slice_.delta,
        settings=tuple(int(v) for v in settings),
        min_bits=min(bits),
        max_bits=max(bits),
        members=reports,
    )


# --------------------------------------------------------------------------
# Row uniformity: the closed-form structure behind the log2(7) point.
# --------------------------------------------------------------------------


def equalizing_r(s: float) -> float:
    """The r flattening both outcome classes of the all-1 settings row at t = s.

    With t = s the row already pairs up under the B/C swap; at
    r(s) = (3 - sqrt(4/s - 3)) / (2 s) the three single-minus entries
    become equal and so do the three double-minus entries.  The two
    levels themselves coincide only at s = 4/7, where r = 7/8 and all
    seven nonzero entries sit at 1/7.
    """
    if not 1.0 / 3.0 < s < 1.0:
        # Below 1/3 the discriminant argument 4/s - 3 exceeds 9, pushing r
        # out of (0, 1); exactly 1/3 gives r = 0.
        raise ParameterError(f"equalizing_r needs s in (1/3, 1), got {s!r}")
    return (3.0 - math.sqrt(4.0 / s - 3.0)) / (2.0 * s)


@dataclass(frozen=True)
class RowUniformityReport:
    """Numerical record of the uniformity structure of the two special rows.

    ``first_row_uniform_u`` is the only per-entry probability consistent
    with the all-0 settings row being flat across its seven non-Hardy
    entries (the two independent closed-form ratios pin u = 1/2), and
    ``first_row_max_u`` the largest value those entries can average to
    (just below 1/7): the gap proves flat randomness cannot come from the
    all-0 row.  The all-1 row *can* be flat: at s = t = 4/7 and
    r = equalizing_r(4/7) = 7/8 its seven nonzero entries all equal 1/7,
    and its eighth entry is structurally zero, which also rules out
    1/8-uniformity. ``row111_max_deviation`` records the achieved
    flatness.
    """

    equalizer_at_4_7: float
    row111_max_deviation: float
    row111_zero_entry: float
    first_row_uniform_u: float
    first_row_max_u: float
    first_row_impossible: bool

    @property
    def ok(self) -> bool:
        return (
            abs(self.equalizer_at_4_7 - 7.0 / 8.0) < 1e-12
            and self.row111_max_deviation < 1e-14
            and self.row111_zero_entry == 0.0
            and self.first_row_impossible
        )


def row_uniformity_analysis() -> RowUniformityReport:
    """Verify the uniformity facts about the all-0 and all-1 settings rows.

    For the all-0 row, suppose all seven non-Hardy entries equal u.  The
    (-1,-1,-1) entry is r itself, so r = u.  The ratio of the (-1,+1,+1)
    and (-1,+1,-1) entries is r h / (1-r), so flatness forces
    h = (1-u)/u; the (-1,-1,+1) entry is (1-r) h = u, forcing
    h = u/(1-u).  Together (1-u)^2 = u^2, i.e. u = 1/2 — but seven
    entries of u each plus a positive Hardy probability need
    u < 1/7.  Hence no valid parameters make that row flat.
    """
    r_eq = equalizing_r(4.0 / 7.0)
    params = HardyParams(r_eq, 4.0 / 7.0, 4.0 / 7.0)
    row = hardy_behavior(params).settings_row(1, 1, 1)
    deviation = float(np.abs(row[:-1] - 1.0 / 7.0).max())

    # The two h-expressions cross only at u = 1/2.
    u = 0.5
    assert abs((1.0 - u) / u - u / (1.0 - u)) == 0.0
    max_u = (1.0 - 0.0) / 7.0  # even a vanishing Hardy probability caps u below 1/7

    return RowUniformityReport(
        equalizer_at_4_7=r_eq,
        row111_max_deviation=deviation,
        row111_zero_entry=float(row[-1]),
        first_row_uniform_u=u,
        first_row_max_u=max_u,
        first_row_impossible=u > max_u,
    )


# --------------------------------------------------------------------------
# Explicit parameters at a target Hardy probability.
# --------------------------------------------------------------------------


def params_for_delta(delta: float) -> HardyParams:
    """Parameters on the symmetric ray s = t = s_opt with omega = ``delta``.

    Along that ray omega increases monotonically in r up to the optimum,
    so a bisection on r pins any attainable delta; used to build explicit
    behaviours at prescribed Hardy probability (relaxation soundness
    checks, figure sweeps).
    """
    delta = _validate_delta(delta)
    opt = optimal_params()
    s = opt.s

    def f(r: float) -> float:
        return float(omega(r, s, s)) - delta

    lo, hi = 1e-9, opt.r
    if delta >= DELTA_MAX or f(hi) <= 0.0:
        # At the flat top, r is ill-conditioned in omega; snap to the
        # closed-form optimum rather than bisecting noise.
        return opt
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    return HardyParams(0.5 * (lo + hi), s, s)
