"""Tripartite two-setting/two-outcome behaviours and the closed-form Hardy family.

A *behaviour* is the table of joint conditional probabilities
p(a, b, c | x, y, z) for three parties (A, B, C) that each choose a binary
measurement setting (x, y, z in {0, 1}) and obtain a binary outcome
(a, b, c in {+1, -1}).  Tables are stored as numpy arrays of shape
(2, 2, 2, 2, 2, 2) indexed ``[x, y, z, ia, ib, ic]`` where outcome index 0
means +1 and index 1 means -1.  This row-major (x, y, z, a, b, c) layout is
also the order of the flat 64-entry serialisations, so the first row of the
flattened table is the settings triple (0, 0, 0) and the last is (1, 1, 1).

``hardy_behavior`` generates the closed-form three-parameter family of
behaviours that satisfies the four Hardy zero constraints

    p_AB(+1, +1 | x=1, y=0) = 0
    p_BC(+1, +1 | y=1, z=0) = 0
    p_AC(+1, +1 | x=0, z=1) = 0
    p(-1, -1, -1 | 1, 1, 1)  = 0

while keeping the Hardy probability p_H = p(+1, +1, +1 | 0, 0, 0) strictly
positive.  Throughout, ``h = 1 - s - t + r*s*t``; the parameter domain is
r, s in (0, 1) and 0 < t < (1 - s)/(1 - r*s), which is equivalent to h > 0.
Structural zeros of the family are *assigned* exactly 0.0, never computed,
so zero-constraint tests may use exact equality.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

__all__ = [
    "OUTCOMES",
    "SETTINGS",
    "ParameterError",
    "HardyParams",
    "Behavior",
    "hardy_behavior",
    "hardy_probability",
    "params_from_behavior",
    "check_behavior",
    "check_hardy_constraints",
    "check_no_signalling",
    "BehaviorReport",
    "HardyConstraintReport",
    "NoSignallingReport",
]

#: Outcome labels in index order: index 0 <-> +1, index 1 <-> -1.
OUTCOMES = (1, -1)
#: Setting labels in index order.
SETTINGS = (0, 1)

_SHAPE = (2, 2, 2, 2, 2, 2)


class ParameterError(ValueError):
    """Raised when (r, s, t) falls outside the open Hardy parameter domain."""


def _outcome_index(value: int) -> int:
    if value == 1:
        return 0
    if value == -1:
        return 1
    raise ValueError(f"outcome must be +1 or -1, got {value!r}")


@dataclass(frozen=True)
class HardyParams:
    """Parameters (r, s, t) of the Hardy behaviour family.

    The domain is the open set r, s in (0, 1), 0 < t < (1-s)/(1-r*s);
    boundary values are rejected, not clamped, because the closed forms
    of the family have (removable and non-removable) singularities there.
    """

    r: float
    s: float
    t: float

    def __post_init__(self) -> None:
        for name in ("r", "s", "t"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not np.isfinite(value):
                raise ParameterError(f"{name} must be a finite real, got {value!r}")
            if not 0.0 < value < 1.0:
                raise ParameterError(
                    f"{name} = {value!r} lies outside the open interval (0, 1)"
                )
        t_sup = (1.0 - self.s) / (1.0 - self.r * self.s)
        if not self.t < t_sup:
            raise ParameterError(
                f"t = {self.t!r} must be below (1-s)/(1-r*s) = {t_sup!r}"
            )
        if not self.h > 0.0:
            # Equivalent to the t bound; kept as an explicit guard against
            # floating-point edge cases right at the boundary.
            raise ParameterError(f"h = {self.h!r} must be strictly positive")

    @property
    def h(self) -> float:
        """The recurring combination h = 1 - s - t + r*s*t."""
        return 1.0 - self.s - self.t + self.r * self.s * self.t

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.s, self.t)


class Behavior:
    """An immutable 64-entry joint probability table p(a, b, c | x, y, z).

    The underlying array has shape (2, 2, 2, 2, 2, 2) and is indexed
    ``[x, y, z, ia, ib, ic]`` with outcome index 0 meaning +1.  The
    constructor only validates shape and finiteness; probabilistic
    invariants (entry range, normalization, no-signalling) are checked by
    :func:`check_behavior` and :func:`check_no_signalling` so that
    deliberately defective tables can be constructed in analysis code.
    """

    __slots__ = ("table",)

    def __init__(self, table: np.ndarray | Iterable[float]):
        arr = np.array(table, dtype=float, copy=True)
        if arr.shape != _SHAPE:
            raise ValueError(f"behaviour table must have shape {_SHAPE}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("behaviour table contains non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    def __setattr__(self, name: str, value) -> None:  # pragma: no cover - guard
        raise AttributeError("Behavior is immutable")

    def prob(self, a: int, b: int, c: int, x: int, y: int, z: int) -> float:
        """Return p(a, b, c | x, y, z) with outcomes given as +1/-1."""
        return float(
            self.table[x, y, z, _outcome_index(a), _outcome_index(b), _outcome_index(c)]
        )

    @property
    def flat(self) -> np.ndarray:
        """The 64 entries in row-major (x, y, z, a, b, c) order."""
        return self.table.reshape(64)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "Behavior":
        arr = np.asarray(list(values), dtype=float)
        if arr.shape != (64,):
            raise ValueError(f"expected 64 entries, got shape {arr.shape}")
        return cls(arr.reshape(_SHAPE))

    @property
    def hardy_probability(self) -> float:
        """The entry p(+1, +1, +1 | 0, 0, 0)."""
        return float(self.table[0, 0, 0, 0, 0, 0])

    def settings_row(self, x: int, y: int, z: int) -> np.ndarray:
        """The eight outcome probabilities at a fixed settings triple."""
        return np.array(self.table[x, y, z]).reshape(8)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Behavior):
            return NotImplemented
        return bool(np.array_equal(self.table, other.table))

    def __hash__(self) -> int:
        return hash(self.table.tobytes())

    def __repr__(self) -> str:
        return f"Behavior(p_H={self.hardy_probability:.6g})"

    # -- serialisation ----------------------------------------------------

    def to_csv(self, fp: IO[str]) -> None:
        """Write rows ``x,y,z,a,b,c,p`` with outcomes as +1/-1.

        Floats are written with ``repr`` (shortest round-trip form), so the
        file parses back to bit-identical doubles.
        """
        fp.write("x,y,z,a,b,c,p\n")
        for x in (0, 1):
            for y in (0, 1):
                for z in (0, 1):
                    for ia, a in enumerate(OUTCOMES):
                        for ib, b in enumerate(OUTCOMES):
                            for ic, c in enumerate(OUTCOMES):
                                p = float(self.table[x, y, z, ia, ib, ic])
                                fp.write(f"{x},{y},{z},{a:+d},{b:+d},{c:+d},{p!r}\n")

    @classmethod
    def from_csv(cls, fp: IO[str]) -> "Behavior":
        header = fp.readline().strip()
        if header != "x,y,z,a,b,c,p":
            raise ValueError(f"unexpected CSV header {header!r}")
        arr = np.full(_SHAPE, np.nan)
        for line in fp:
            line = line.strip()
            if not line:
                continue
            x, y, z, a, b, c, p = line.split(",")
            arr[
                int(x), int(y), int(z),
                _outcome_index(int(a)), _outcome_index(int(b)), _outcome_index(int(c)),
            ] = float(p)
        if np.any(np.isnan(arr)):
            raise ValueError("CSV did not cover all 64 entries")
        return cls(arr)

    def to_json(self, fp: IO[str] | None = None) -> str:
        """Serialise as JSON with a flat 64-entry array (bit-exact round trip)."""
        doc = {
            "format": "trihardy-behavior/1",
            "index_order": "x,y,z,a,b,c row-major; outcome +1 before -1",
            "p": self.flat.tolist(),
        }
        text = json.dumps(doc, indent=2)
        if fp is not None:
            fp.write(text)
        return text

    @classmethod
    def from_json(cls, source: str | IO[str]) -> "Behavior":
        doc = json.loads(source if isinstance(source, str) else source.read())
        return cls.from_flat(doc["p"])


def hardy_probability(params: HardyParams | float, s: float | None = None,
                      t: float | None = None) -> float:
    """Hardy probability p_H(r, s, t) = r^2 (1-r) s t h / ((1-rs)(1-rt)).

    Accepts either a :class:`HardyParams` or three raw floats; raw floats
    are validated through :class:`HardyParams`.  Agrees with the
    p(+1,+1,+1|0,0,0) entry of :func:`hardy_behavior` to 1e-14.
    """
    if not isinstance(params, HardyParams):
        params = HardyParams(float(params), float(s), float(t))
    r, s_, t_ = params.r, params.s, params.t
    h = params.h
    return r * r * (1.0 - r) * s_ * t_ * h / ((1.0 - r * s_) * (1.0 - r * t_))


def hardy_behavior(params: HardyParams) -> Behavior:
    """The closed-form Hardy-family behaviour at ``params``.

    All 19 structural zeros of the family are assigned exactly 0.0.  The
    two-party zero constraints hold row-wise: every cell whose (a, b) part
    is (+1, +1) at (x, y) = (1, 0) is one of the assigned zeros, and
    likewise for the other two pair constraints.
    """
    if not isinstance(params, HardyParams):
        raise TypeError("hardy_behavior expects a HardyParams instance")
    r, s, t, h = params.r, params.s, params.t, params.h
    q = 1.0 - r
    ds = 1.0 - r * s
    dt = 1.0 - r * t
    dd = ds * dt
    r2 = r * r

    p = np.zeros(_SHAPE)

    # settings (0, 0, 0) — the only row with no structural zero
    p[0, 0, 0, 0, 0, 0] = q * r2 * s * t * h / dd
    p[0, 0, 0, 1, 0, 0] = q * r * t * h / dt
    p[0, 0, 0, 0, 1, 0] = q * r * s * h / ds
    p[0, 0, 0, 0, 0, 1] = q * q * r * s * t / dd
    p[0, 0, 0, 1, 1, 0] = q * h
    p[0, 0, 0, 1, 0, 1] = q * q * t / dt
    p[0, 0, 0, 0, 1, 1] = q * q * s / ds
    p[0, 0, 0, 1, 1, 1] = r

    # settings (1, 0, 0)
    p[1, 0, 0, 1, 0, 0] = q * r * t * h / dd
    p[1, 0, 0, 1, 1, 0] = q * h / ds
    p[1, 0, 0, 1, 0, 1] = q * q * t / dd
    p[1, 0, 0, 0, 1, 1] = s
    p[1, 0, 0, 1, 1, 1] = r * (1.0 - s) ** 2 / ds

    # settings (0, 1, 0)
    p[0, 1, 0, 0, 1, 0] = q * r * s * h / dd
    p[0, 1, 0, 1, 1, 0] = q * h / dt
    p[0, 1, 0, 1, 0, 1] = t
    p[0, 1, 0, 0, 1, 1] = q * q * s / dd
    p[0, 1, 0, 1, 1, 1] = r * (1.0 - t) ** 2 / dt

    # settings (1, 1, 0)
    p[1, 1, 0, 0, 0, 1] = r * s * t
    p[1, 1, 0, 1, 1, 0] = q * h / dd
    p[1, 1, 0, 1, 0, 1] = ds * t
    p[1, 1, 0, 0, 1, 1] = s * dt
    p[1, 1, 0, 1, 1, 1] = r * h * h / dd

    # settings (0, 0, 1)
    p[0, 0, 1, 0, 0, 1] = q * r * s * t
    p[0, 0, 1, 1, 1, 0] = h / dd
    p[0, 0, 1, 1, 0, 1] = q * ds * t
    p[0, 0, 1, 0, 1, 1] = q * s * dt
    p[0, 0, 1, 1, 1, 1] = r * q * (1.0 - h) ** 2 / dd

    # settings (1, 0, 1)
    p[1, 0, 1, 0, 1, 0] = r * s * h / dd
    p[1, 0, 1, 1, 1, 0] = h / dt
    p[1, 0, 1, 1, 0, 1] = q * t
    p[1, 0, 1, 0, 1, 1] = q * s / dd
    p[1, 0, 1, 1, 1, 1] = q * r * t * t / dt

    # settings (0, 1, 1)
    p[0, 1, 1, 1, 0, 0] = r * t * h / dd
    p[0, 1, 1, 1, 1, 0] = h / ds
    p[0, 1, 1, 1, 0, 1] = q * t / dd
    p[0, 1, 1, 0, 1, 1] = q * s
    p[0, 1, 1, 1, 1, 1] = q * r * s * s / ds

    # settings (1, 1, 1) — the (-1,-1,-1) cell is the structural zero
    p[1, 1, 1, 0, 0, 0] = r2 * s * t * h / dd
    p[1, 1, 1, 1, 0, 0] = r * t * h / dt
    p[1, 1, 1, 0, 1, 0] = r * s * h / ds
    p[1, 1, 1, 0, 0, 1] = q * r * s * t / dd
    p[1, 1, 1, 1, 1, 0] = h
    p[1, 1, 1, 1, 0, 1] = q * t / dt
    p[1, 1, 1, 0, 1, 1] = q * s / ds

    return Behavior(p)


def params_from_behavior(b: Behavior, tol: float = 1e-9) -> HardyParams:
    """Read (r, s, t) back off a Hardy-family table.

    Uses the three cells that carry the parameters directly:
    r = p(-1,-1,-1|0,0,0), s = p(+1,-1,-1|1,0,0), t = p(-1,+1,-1|0,1,0).
    ``tol`` is only used to sanity-check that the table's Hardy probability
    matches the closed form at the recovered parameters.
    """
    r = b.prob(-1, -1, -1, 0, 0, 0)
    s = b.prob(1, -1, -1, 1, 0, 0)
    t = b.prob(-1, 1, -1, 0, 1, 0)
    params = HardyParams(r, s, t)
    if abs(hardy_probability(params) - b.hardy_probability) > tol:
        raise ValueError(
            "table is not a Hardy-family behaviour at the recovered parameters"
        )
    return params


# -- verification reports -------------------------------------------------


@dataclass(frozen=True)
class BehaviorReport:
    """Entry-range and normalization diagnostics for a behaviour table."""

    min_entry: float
    max_entry: float
    max_normalization_error: float
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.min_entry >= -self.tol
            and self.max_entry <= 1.0 + self.tol
            and self.max_normalization_error <= self.tol
        )


@dataclass(frozen=True)
class HardyConstraintReport:
    """Residuals of the four Hardy zero constraints.

    Pair residuals are maximised over the third party's setting, so a
    signalling table cannot hide a violation behind a particular choice of
    the spectator setting.
    """

    ab_residual: float
    bc_residual: float
    ac_residual: float
    triple_residual: float
    tol: float

    @property
    def residuals(self) -> tuple[float, float, float, float]:
        return (self.ab_residual, self.bc_residual, self.ac_residual, self.triple_residual)

    @property
    def passed(self) -> tuple[bool, bool, bool, bool]:
        return tuple(res <= self.tol for res in self.residuals)  # type: ignore[return-value]

    @property
    def ok(self) -> bool:
        return all(self.passed)


@dataclass(frozen=True)
class NoSignallingReport:
    """Worst marginal-consistency deviation over all parties and pairs."""

    max_deviation: float
    worst_channel: str
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_deviation <= self.tol


def check_behavior(b: Behavior, tol: float = 1e-12) -> BehaviorReport:
    """Check entry range and per-settings-triple normalization."""
    table = b.table
    sums = table.sum(axis=(3, 4, 5))
    return BehaviorReport(
        min_entry=float(table.min()),
        max_entry=float(table.max()),
        max_normalization_error=float(np.abs(sums - 1.0).max()),
        tol=tol,
    )


def check_hardy_constraints(b: Behavior, tol: float = 1e-12) -> HardyConstraintReport:
    """Evaluate the four Hardy zero constraints on a behaviour table."""
    table = b.table
    # p_AB(+1,+1|1,0): sum over c, worst over z.
    ab = float(table[1, 0, :, 0, 0, :].sum(axis=-1).max())
    # p_BC(+1,+1|1,0): sum over a, worst over x.
    bc = float(table[:, 1, 0, :, 0, 0].sum(axis=-1).max())
    # p_AC(+1,+1|0,1): sum over b, worst over y.
    ac = float(table[0, :, 1, 0, :, 0].sum(axis=-1).max())
    triple = float(table[1, 1, 1, 1, 1, 1])
    return HardyConstraintReport(
        ab_residual=abs(ab),
        bc_residual=abs(bc),
        ac_residual=abs(ac),
        triple_residual=abs(triple),
        tol=tol,
    )


def check_no_signalling(b: Behavior, tol: float = 1e-12) -> NoSignallingReport:
    """Check that all one- and two-party marginals ignore the other settings.

    The two-party checks imply the single-party ones, but all are computed
    so the report can name the worst offending channel.
    """
    table = b.table
    deviations: list[tuple[float, str]] = []

    # Two-party marginals: independence from the remaining party's setting.
    pab = table.sum(axis=5)  # [x, y, z, a, b]
    deviations.append(
        (float(np.abs(pab[:, :, 0] - pab[:, :, 1]).max()), "AB marginal vs z")
    )
    pac = table.sum(axis=4)  # [x, y, z, a, c]
    deviations.append(
        (float(np.abs(pac[:, 0] - pac[:, 1]).max()), "AC marginal vs y")
    )
    pbc = table.sum(axis=3)  # [x, y, z, b, c]
    deviations.append(
        (float(np.abs(pbc[0] - pbc[1]).max()), "BC marginal vs x")
    )

    # Single-party marginals: independence from both other settings.
    pa = table.sum(axis=(4, 5))  # [x, y, z, a]
    deviations.append((float(np.ptp(pa, axis=(1, 2)).max()), "A marginal vs (y,z)"))
    pb = table.sum(axis=(3, 5))  # [x, y, z, b]
    deviations.append(
        (float(np.ptp(pb.transpose(1, 0, 2, 3), axis=(1, 2)).max()), "B marginal vs (x,z)")
    )
    pc = table.sum(axis=(3, 4))  # [x, y, z, c]
    deviations.append(
        (float(np.ptp(pc.transpose(2, 0, 1, 3), axis=(1, 2)).max()), "C marginal vs (x,y)")
    )

    worst, channel = max(deviations, key=lambda pair: pair[0])
    return NoSignallingReport(max_deviation=worst, worst_channel=channel, tol=tol)
