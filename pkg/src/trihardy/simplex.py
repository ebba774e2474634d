"""Dense two-phase revised simplex for small equality-form linear programs.

Solves  min/max  c . x   subject to  A x = b,  x >= 0.

This is deliberately a compact, deterministic implementation rather than a
general-purpose LP code: every problem in this package has at most a few
dozen rows (behaviour-mixture constraints) and up to a few thousand
columns (enumerated strategies or sample points), where refactorising the
basis with ``numpy.linalg.solve`` on each step is cheap and avoids the
error accumulation of product-form updates.

Pivoting uses Dantzig's rule (most negative reduced cost, lowest index on
ties) and switches permanently to Bland's rule once the objective has
stalled for a stretch of degenerate steps, which restores the finite-
termination guarantee.  All tie-breaking is by lowest index, so solves are
bit-reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LPResult", "solve_lp"]

#: Consecutive non-improving iterations tolerated before Bland's rule kicks in.
_STALL_LIMIT = 200


@dataclass(frozen=True)
class LPResult:
    """Outcome of an equality-form LP solve.

    ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``.
    ``x`` and ``value`` are ``None`` unless the status is ``"optimal"``;
    ``basis`` holds the final basic column indices and ``iterations`` the
    total simplex steps over both phases.
    """

    status: str
    x: np.ndarray | None = None
    value: float | None = None
    basis: tuple[int, ...] = ()
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


@dataclass
class _Core:
    """One simplex run: min c.x over A x = b (b >= 0 not required here),
    starting from a feasible basis."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    basis: list[int]
    tol: float
    max_iterations: int
    iterations: int = 0
    bland: bool = False
    _stall: int = field(default=0, repr=False)
    _last_obj: float = field(default=np.inf, repr=False)

    def run(self) -> str:
        m, n = self.A.shape
        while True:
            if self.iterations > self.max_iterations:
                raise RuntimeError(
                    f"simplex exceeded {self.max_iterations} iterations "
                    f"on a {m}x{n} problem"
                )
            B = self.A[:, self.basis]
            x_b = np.linalg.solve(B, self.b)
            y = np.linalg.solve(B.T, self.c[self.basis])
            reduced = self.c - self.A.T @ y
            reduced[self.basis] = 0.0

            if self.bland:
                eligible = np.flatnonzero(reduced < -self.tol)
                if eligible.size == 0:
                    return "optimal"
                enter = int(eligible[0])
            else:
                enter = int(np.argmin(reduced))
                if reduced[enter] >= -self.tol:
                    return "optimal"

            direction = np.linalg.solve(B, self.A[:, enter])
            movable = direction > self.tol
            if not movable.any():
                return "unbounded"
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(movable, x_b / direction, np.inf)
            theta = float(ratios.min())
            ties = np.flatnonzero(ratios <= theta + self.tol)
            # Lowest basic index among the ties: deterministic and the
            # row-half of Bland's anti-cycling rule.
            leave = int(min(ties, key=lambda i: self.basis[i]))

            self.basis[leave] = enter
            self.iterations += 1

            obj = float(self.c[self.basis] @ np.linalg.solve(self.A[:, self.basis], self.b))
            if obj < self._last_obj - 1e-13:
                self._stall = 0
            else:
                self._stall += 1
                if self._stall >= _STALL_LIMIT:
                    self.bland = True
            self._last_obj = obj


def solve_lp(
    c,
    A,
    b,
    *,
    maximize: bool = False,
    tol: float = 1e-9,
    max_iterations: int | None = None,
    initial_basis=None,
) -> LPResult:
    """Solve min (or max) ``c . x`` subject to ``A x = b``, ``x >= 0``.

    ``A`` is dense (m, n); redundant equality rows are tolerated (they are
    detected and dropped after phase 1).  ``initial_basis`` may name m
    columns forming a known feasible basis, in which case phase 1 is
    skipped; an unusable basis (wrong size, singular, infeasible) falls
    back to the ordinary two-phase path.  Returns an :class:`LPResult`;
    never raises for infeasible or unbounded inputs, only for malformed
    shapes or an iteration blow-up.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"A must be a matrix, got ndim={A.ndim}")
    m, n = A.shape
    b = np.array(b, dtype=float).reshape(-1)
    c = np.array(c, dtype=float).reshape(-1)
    if b.shape != (m,) or c.shape != (n,):
        raise ValueError(f"shape mismatch: A is {A.shape}, b {b.shape}, c {c.shape}")
    if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
        raise ValueError("LP data must be finite")
    if max_iterations is None:
        max_iterations = max(5000, 50 * (m + n))

    c_min = -c if maximize else c.copy()

    if initial_basis is not None:
        candidate = [int(k) for k in initial_basis]
        if len(candidate) == m and len(set(candidate)) == m and all(
            0 <= k < n for k in candidate
        ):
            try:
                x_b = np.linalg.solve(A[:, candidate], b)
            except np.linalg.LinAlgError:
                x_b = None
            if x_b is not None and np.isfinite(x_b).all() and x_b.min() >= -tol:
                try:
                    return _phase2(c, c_min, A, b, candidate, n, tol, max_iterations, 0)
                except np.linalg.LinAlgError:
                    # A degenerate pivot drove the warm basis singular;
                    # rebuild from scratch below.
                    pass

    # Phase 1: flip rows so b >= 0, add one artificial per row,
    # minimise their sum starting from the all-artificial basis.
    flip = b < 0
    A1 = A.copy()
    A1[flip] *= -1.0
    b1 = b.copy()
    b1[flip] *= -1.0

    A_ext = np.hstack([A1, np.eye(m)])
    c_art = np.concatenate([np.zeros(n), np.ones(m)])
    core = _Core(c_art, A_ext, b1, list(range(n, n + m)), tol, max_iterations)
    core.run()  # cannot be unbounded: objective >= 0
    basis = core.basis
    total_iterations = core.iterations

    x_b = np.linalg.solve(A_ext[:, basis], b1)
    if float(c_art[basis] @ x_b) > 10.0 * tol:
        return LPResult(status="infeasible", iterations=total_iterations)

    # Drive any artificial still in the basis out, or drop its row as
    # redundant if no structural column can pivot there.
    drop_rows: list[int] = []
    for pos in range(len(basis)):
        if basis[pos] < n:
            continue
        unit = np.zeros(m)
        unit[pos] = 1.0
        binv_row = np.linalg.solve(A_ext[:, basis].T, unit)
        row = binv_row @ A1
        row[[k for k in basis if k < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) <= 1e-9:
            drop_rows.append(pos)
        else:
            basis[pos] = j

    if drop_rows:
        keep = [i for i in range(m) if i not in drop_rows]
        A1 = A1[keep]
        b1 = b1[keep]
        basis = [basis[i] for i in keep]

    return _phase2(c, c_min, A1, b1, basis, n, tol, max_iterations, total_iterations)


def _phase2(c, c_min, A1, b1, basis, n, tol, max_iterations, prior_iterations):
    """Run phase 2 from a feasible basis and assemble the result."""
    core = _Core(c_min, A1, b1, list(basis), tol, max_iterations)
    status = core.run()
    total_iterations = prior_iterations + core.iterations
    basis = core.basis
    if status != "optimal":
        return LPResult(status=status, iterations=total_iterations)

    x = np.zeros(n)
    x_b = np.linalg.solve(A1[:, basis], b1)
    x[basis] = np.maximum(x_b, 0.0)  # clip -1e-15 style noise
    value = float(c @ x)
    return LPResult(
        status="optimal",
        x=x,
        value=value,
        basis=tuple(basis),
        iterations=total_iterations,
    )
