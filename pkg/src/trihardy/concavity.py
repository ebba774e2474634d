"""Curvature analysis of the Hardy probability over the open parameter cube.

The central object is

    omega(r, s, t) = r^2 (1-r) s t h / ((1-rs)(1-rt)),   h = 1 - s - t + rst,

i.e. the closed-form Hardy probability continued to the whole open cube
(0,1)^3; it is negative where h < 0.  This module provides its analytic
gradient and Hessian, a finite-difference cross-check, a small batched
Jacobi eigensolver for the resulting 3x3 symmetric matrices, and grid
classification into strictly-concave / strictly-convex / indefinite /
degenerate points.

The Hessian is assembled by the product rule on omega = A * h with
A = r^2 (1-r) s t / ((1-rs)(1-rt)):

    Hess(omega) = h * Hess(A) + grad(A) grad(h)^T + grad(h) grad(A)^T
                  + A * Hess(h),
    Hess(A) = A * (g g^T + G),   g = grad(log A),   G = Hess(log A).

A is positive on the whole open cube and no denominator vanishes there,
so this form stays accurate near the h = 0 surface, where formulations
that differentiate through log(omega) lose all significant digits.

Because floating-point addition is not associative, evaluating the
closed forms at (r, s, t) and (r, t, s) can disagree in the last ulp and
flip a borderline classification.  ``omega_hessian`` therefore
canonicalizes to s <= t before evaluating and permutes the result back,
which makes the s <-> t symmetry of every downstream label *exact*.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .behavior import HardyParams, ParameterError, hardy_probability

__all__ = [
    "GridSpec",
    "HessianClassification",
    "omega",
    "omega_gradient",
    "omega_hessian",
    "hessian",
    "jacobi_eigenvalues",
    "classify_point",
    "classify_points",
    "classify_grid",
    "find_optimum",
]


@dataclass(frozen=True)
class GridSpec:
    """Axis-aligned grid over the open cube; each axis is (min, max, count).

    The defaults (60 points per axis with a 0.01 margin) resolve the
    curvature structure in a few seconds.
    """

    r_axis: tuple[float, float, int] = (0.01, 0.99, 60)
    s_axis: tuple[float, float, int] = (0.01, 0.99, 60)
    t_axis: tuple[float, float, int] = (0.01, 0.99, 60)

    def __post_init__(self) -> None:
        for name in ("r_axis", "s_axis", "t_axis"):
            lo, hi, count = getattr(self, name)
            if not (0.0 < lo < hi < 1.0):
                raise ValueError(f"{name}: need 0 < min < max < 1, got ({lo}, {hi})")
            if int(count) != count or count < 2:
                raise ValueError(f"{name}: count must be an integer >= 2, got {count!r}")

    @classmethod
    def cube(cls, count: int, margin: float = 0.01) -> "GridSpec":
        axis = (margin, 1.0 - margin, count)
        return cls(axis, axis, axis)

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(
            np.linspace(lo, hi, int(count))
            for lo, hi, count in (self.r_axis, self.s_axis, self.t_axis)
        )

    def points(self) -> np.ndarray:
        """All grid points as an (N, 3) array, r varying slowest, t fastest."""
        r_ax, s_ax, t_ax = self.axes()
        mesh = np.meshgrid(r_ax, s_ax, t_ax, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=1)

    def __len__(self) -> int:
        return int(self.r_axis[2] * self.s_axis[2] * self.t_axis[2])


@dataclass(frozen=True)
class HessianClassification:
    """Definiteness label of the omega Hessian at one parameter point."""

    point: tuple[float, float, float]
    eigenvalues: tuple[float, float, float]  # ascending
    label: str  # strictly-concave | strictly-convex | indefinite | degenerate


# --------------------------------------------------------------------------
# omega and its derivatives (array-friendly: scalars or broadcastable arrays).
# --------------------------------------------------------------------------


def omega(r, s, t):
    """The Hardy-probability expression on the whole open cube."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    h = 1.0 - s - t + r * s * t
    return r * r * (1.0 - r) * s * t * h / ((1.0 - r * s) * (1.0 - r * t))


def _positive_factor_logs(r, s, t):
    """g = grad(log A) and G = Hess(log A) for A = r^2(1-r)st/((1-rs)(1-rt))."""
    ds = 1.0 - r * s
    dt = 1.0 - r * t
    g = np.stack(
        [
            2.0 / r - 1.0 / (1.0 - r) + s / ds + t / dt,
            1.0 / s + r / ds,
            1.0 / t + r / dt,
        ],
        axis=-1,
    )
    zeros = np.zeros_like(r)
    G = np.stack(
        [
            np.stack(
                [
                    -2.0 / r**2 - 1.0 / (1.0 - r) ** 2 + (s / ds) ** 2 + (t / dt) ** 2,
                    1.0 / ds**2,
                    1.0 / dt**2,
                ],
                axis=-1,
            ),
            np.stack(
                [1.0 / ds**2, -1.0 / s**2 + (r / ds) ** 2, zeros], axis=-1
            ),
            np.stack(
                [1.0 / dt**2, zeros, -1.0 / t**2 + (r / dt) ** 2], axis=-1
            ),
        ],
        axis=-2,
    )
    return g, G


def omega_gradient(r, s, t) -> np.ndarray:
    """Gradient of omega, shape (..., 3)."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    h = 1.0 - s - t + r * s * t
    A = r * r * (1.0 - r) * s * t / ((1.0 - r * s) * (1.0 - r * t))
    g, _ = _positive_factor_logs(r, s, t)
    grad_h = np.stack([s * t, r * t - 1.0, r * s - 1.0], axis=-1)
    return A[..., None] * (g * h[..., None] + grad_h)


def _hessian_raw(r, s, t) -> np.ndarray:
    h = 1.0 - s - t + r * s * t
    A = r * r * (1.0 - r) * s * t / ((1.0 - r * s) * (1.0 - r * t))
    g, G = _positive_factor_logs(r, s, t)
    grad_h = np.stack([s * t, r * t - 1.0, r * s - 1.0], axis=-1)
    zeros = np.zeros_like(r)
    hess_h = np.stack(
        [
            np.stack([zeros, t, s], axis=-1),
            np.stack([t, zeros, r], axis=-1),
            np.stack([s, zeros + r, zeros], axis=-1),
        ],
        axis=-2,
    )
    gg = g[..., :, None] * g[..., None, :]
    cross = g[..., :, None] * grad_h[..., None, :]
    H = (
        (h * A)[..., None, None] * (gg + G)
        + A[..., None, None] * (cross + np.swapaxes(cross, -1, -2))
        + A[..., None, None] * hess_h
    )
    return 0.5 * (H + np.swapaxes(H, -1, -2))


def omega_hessian(r, s, t) -> np.ndarray:
    """Analytic Hessian of omega, shape (..., 3, 3), exactly symmetric.

    Evaluated at the canonical representative with s <= t and permuted
    back, so eigenvalues at (r, s, t) and (r, t, s) are bitwise equal.
    """
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    r, s, t = np.broadcast_arrays(r, s, t)
    swap = s > t
    s_c = np.where(swap, t, s)
    t_c = np.where(swap, s, t)
    H = _hessian_raw(r, s_c, t_c)
    perm = H[..., [0, 2, 1], :][..., :, [0, 2, 1]]
    return np.where(swap[..., None, None], perm, H)


def hessian(point, scheme: str = "analytic", step: float = 1e-4) -> np.ndarray:
    """Hessian of omega at one point, as an exactly symmetric (3, 3) array.

    ``point`` may be a :class:`HardyParams` or any (r, s, t) triple inside
    the open cube (including points with h <= 0, where omega is negative).
    ``scheme`` is ``"analytic"`` (closed forms) or ``"finite-difference"``
    (central differences with the given ``step``; the point must be more
    than ``step`` away from the cube boundary).  The two schemes agree to
    better than 1e-5 at interior points.
    """
    if isinstance(point, HardyParams):
        r, s, t = point.as_tuple()
    else:
        r, s, t = (float(v) for v in point)
    for name, v in (("r", r), ("s", s), ("t", t)):
        if not 0.0 < v < 1.0:
            raise ParameterError(f"{name} = {v!r} outside the open cube")

    if scheme == "analytic":
        return omega_hessian(r, s, t)
    if scheme != "finite-difference":
        raise ValueError(f"unknown scheme {scheme!r}")

    if min(r, s, t, 1.0 - r, 1.0 - s, 1.0 - t) <= step:
        raise ParameterError(
            f"point {(r, s, t)} is within one step ({step}) of the cube boundary"
        )
    x0 = np.array([r, s, t])
    eye = np.eye(3)

    def f(v: np.ndarray) -> float:
        return float(omega(v[0], v[1], v[2]))

    H = np.empty((3, 3))
    f0 = f(x0)
    for i in range(3):
        H[i, i] = (f(x0 + step * eye[i]) - 2.0 * f0 + f(x0 - step * eye[i])) / step**2
    for i in range(3):
        for j in range(i + 1, 3):
            val = (
                f(x0 + step * (eye[i] + eye[j]))
                - f(x0 + step * (eye[i] - eye[j]))
                - f(x0 - step * (eye[i] - eye[j]))
                + f(x0 - step * (eye[i] + eye[j]))
            ) / (4.0 * step**2)
            H[i, j] = H[j, i] = val
    return 0.5 * (H + H.T)


# --------------------------------------------------------------------------
# Batched cyclic Jacobi eigensolver for symmetric 3x3 matrices.
# --------------------------------------------------------------------------


def jacobi_eigenvalues(
    H: np.ndarray, *, vectors: bool = False, sweeps: int = 14
):
    """Eigenvalues (ascending) of symmetric 3x3 matrices via Jacobi rotations.

    ``H`` has shape (..., 3, 3).  Runs a fixed number of cyclic sweeps
    (three rotations per sweep), which for 3x3 inputs drives the
    off-diagonal mass far below double precision; the fixed count keeps
    the computation deterministic and batch-friendly.  With
    ``vectors=True`` also returns Q with eigenvectors in columns,
    satisfying H = Q diag(lam) Q^T.
    """
    A = np.array(H, dtype=float)
    if A.shape[-2:] != (3, 3):
        raise ValueError(f"expected (..., 3, 3), got {A.shape}")
    batch = A.shape[:-2]
    Q = np.broadcast_to(np.eye(3), A.shape).copy()

    for _ in range(sweeps):
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = A[..., p, q]
            small = np.abs(apq) < 1e-300
            theta = np.where(
                small, 1.0, (A[..., q, q] - A[..., p, p]) / np.where(small, 1.0, 2.0 * apq)
            )
            # For huge |theta| the exact tangent underflows through an
            # intermediate overflow; switch to the asymptotic 1/(2 theta).
            big = np.abs(theta) > 1e100
            safe = np.where(big, 1.0, theta)
            tangent = np.where(safe >= 0.0, 1.0, -1.0) / (
                np.abs(safe) + np.sqrt(safe * safe + 1.0)
            )
            tangent = np.where(big, 0.5 / np.where(big, theta, 1.0), tangent)
            cos = 1.0 / np.sqrt(tangent * tangent + 1.0)
            sin = tangent * cos
            cos = np.where(small, 1.0, cos)
            sin = np.where(small, 0.0, sin)

            J = np.broadcast_to(np.eye(3), A.shape).copy()
            J[..., p, p] = cos
            J[..., q, q] = cos
            J[..., p, q] = sin
            J[..., q, p] = -sin
            A = np.einsum("...ji,...jk,...kl->...il", J, A, J)
            Q = np.einsum("...ij,...jk->...ik", Q, J)

    lam = np.einsum("...ii->...i", A)
    order = np.argsort(lam, axis=-1)
    lam_sorted = np.take_along_axis(lam, order, axis=-1)
    if not vectors:
        return lam_sorted if batch else lam_sorted.reshape(3)
    Q_sorted = np.take_along_axis(Q, order[..., None, :], axis=-1)
    if batch:
        return lam_sorted, Q_sorted
    return lam_sorted.reshape(3), Q_sorted.reshape(3, 3)


# --------------------------------------------------------------------------
# Classification.
# --------------------------------------------------------------------------


def _labels_from_eigenvalues(lam: np.ndarray, zero_threshold: float) -> np.ndarray:
    degenerate = (np.abs(lam) <= zero_threshold).any(axis=-1)
    concave = (lam < -zero_threshold).all(axis=-1)
    convex = (lam > zero_threshold).all(axis=-1)
    labels = np.full(lam.shape[:-1], "indefinite", dtype=object)
    labels[concave] = "strictly-concave"
    labels[convex] = "strictly-convex"
    labels[degenerate] = "degenerate"
    return labels


def classify_points(
    points: np.ndarray, zero_threshold: float = 1e-9
) -> list[HessianClassification]:
    """Classify omega's Hessian at each row of an (N, 3) point array.

    Eigenvalues are computed from the Hessian at the canonical s <= t
    representative: the spectrum is invariant under the s <-> t row/column
    permutation, and evaluating (rather than permuting and re-diagonalising)
    makes labels at (r, s, t) and (r, t, s) bitwise identical.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    s_c = np.minimum(pts[:, 1], pts[:, 2])
    t_c = np.maximum(pts[:, 1], pts[:, 2])
    H = _hessian_raw(pts[:, 0], s_c, t_c)
    lam = jacobi_eigenvalues(H)
    labels = _labels_from_eigenvalues(lam, zero_threshold)
    return [
        HessianClassification(
            point=(float(p[0]), float(p[1]), float(p[2])),
            eigenvalues=(float(l[0]), float(l[1]), float(l[2])),
            label=str(lab),
        )
        for p, l, lab in zip(pts, lam, labels)
    ]


def classify_point(point, zero_threshold: float = 1e-9) -> HessianClassification:
    if isinstance(point, HardyParams):
        point = point.as_tuple()
    return classify_points(np.array([point]), zero_threshold)[0]


def classify_grid(
    grid: GridSpec | None = None, zero_threshold: float = 1e-9
) -> list[HessianClassification]:
    """Classify every point of ``grid`` (default: the 60^3 interior grid)."""
    if grid is None:
        grid = GridSpec()
    return classify_points(grid.points(), zero_threshold)


# --------------------------------------------------------------------------
# The maximum of omega.
# --------------------------------------------------------------------------


def find_optimum(
    initial_resolution: int = 48, newton_iterations: int = 60
) -> tuple[HardyParams, float]:
    """Locate the maximum of omega: coarse grid argmax, then Newton steps.

    Newton iterates on grad(omega) = 0 with the analytic gradient and
    Hessian; near the maximum the Hessian is negative definite, so the
    iteration converges quadratically from the grid argmax.  Returns the
    refined parameters and the Hardy probability there.
    """
    axis = np.linspace(0.02, 0.98, initial_resolution)
    R, S, T = np.meshgrid(axis, axis, axis, indexing="ij")
    vals = omega(R, S, T)
    flat = int(np.argmax(vals))
    idx = np.unravel_index(flat, vals.shape)
    x = np.array([R[idx], S[idx], T[idx]])

    for _ in range(newton_iterations):
        g = omega_gradient(*x)
        H = omega_hessian(*x)
        try:
            delta = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:  # pragma: no cover - singular Hessian
            break
        x_new = np.clip(x - delta, 1e-6, 1.0 - 1e-6)
        if np.abs(x_new - x).max() < 1e-15:
            x = x_new
            break
        x = x_new

    params = HardyParams(float(x[0]), float(x[1]), float(x[2]))
    return params, hardy_probability(params)
