"""Dense semidefinite programming by a primal-dual interior-point method.

Solves the inequality-form problem

    maximise    q . z
    subject to  F(z) = F0 + sum_j z_j F_j  is positive semidefinite

together with its dual (minimise tr(F0 X) over X >= 0 with tr(F_j X) = q_j),
using Nesterov-Todd scaling and a Mehrotra-style predictor-corrector.  The
matrices are dense and symmetric; sizes up to a few hundred are the target,
which keeps every linear-algebra step a plain LAPACK call.

This is deliberately a self-contained solver with no tuning knobs beyond
tolerances and an iteration cap: the moment problems built on top of it are
small, well-scaled, and strictly feasible except at the very edge of their
parameter range.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

__all__ = ["IPMResult", "solve_semidefinite"]

_SIGMA_MIN, _SIGMA_MAX = 0.05, 0.8
_BOUNDARY_FRACTION = 0.98


@dataclass(frozen=True)
class IPMResult:
    """Outcome of one interior-point solve.

    ``status`` is one of ``"optimal"``, ``"max-iterations"``,
    ``"infeasible"`` (covers primal infeasibility and the mirror case of an
    unbounded objective — no finite certificate exists either way) and
    ``"numerical-failure"``.  ``X`` is the dual matrix certifying the bound
    when optimal.
    """

    status: str
    z: np.ndarray | None
    value: float | None
    X: np.ndarray | None
    S: np.ndarray | None
    gap: float
    primal_residual: float
    dual_residual: float
    iterations: int

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _chol(M: np.ndarray) -> np.ndarray | None:
    """Lower Cholesky factor, with one ridged retry; None if not PD."""
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        pass
    ridge = 1e-12 * max(1.0, float(np.trace(M)) / max(1, M.shape[0]))
    try:
        return np.linalg.cholesky(M + ridge * np.eye(M.shape[0]))
    except np.linalg.LinAlgError:
        return None


def _max_step(L: np.ndarray, dM: np.ndarray) -> float:
    """sup { a : M + a dM >= 0 } for M = L L^T, via the scaled spectrum."""
    A = solve_triangular(L, dM, lower=True)
    A = solve_triangular(L, A.T, lower=True)
    lam = float(np.linalg.eigvalsh(_sym(A)).min())
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _nt_scaling(X: np.ndarray, S: np.ndarray):
    """The W with W S W = X and a factor W = Whalf Whalf^T, plus chol factors
    of X and S (None on failure)."""
    Lx = _chol(X)
    Ls = _chol(S)
    if Lx is None or Ls is None:
        return None, None, Lx, Ls
    M = _sym(Lx.T @ S @ Lx)
    lam, U = np.linalg.eigh(M)
    if lam.min() <= 0.0:
        return None, None, Lx, Ls
    inner = (U * lam**-0.5) @ U.T
    W = _sym(Lx @ inner @ Lx.T)
    wlam, wU = np.linalg.eigh(W)
    if wlam.min() <= 0.0:
        return None, None, Lx, Ls
    Whalf = wU * np.sqrt(wlam)
    return W, Whalf, Lx, Ls


def solve_semidefinite(
    q,
    F0,
    Fs,
    *,
    gap_tol: float = 1e-7,
    feas_tol: float = 1e-8,
    max_iterations: int = 200,
) -> IPMResult:
    """Maximise ``q . z`` subject to ``F0 + sum_j z_j F_j >= 0``.

    Starts infeasible (X = S = scaled identity, z = 0) so no Phase-1 is
    needed; feasibility residuals are driven to zero along with the
    duality gap.  Divergence of the iterates is reported as
    ``"infeasible"``; breakdown of the scaling as ``"numerical-failure"``.
    """
    q = np.asarray(q, dtype=float).reshape(-1)
    F0 = np.asarray(F0, dtype=float)
    if F0.ndim != 2 or F0.shape[0] != F0.shape[1]:
        raise ValueError("F0 must be square")
    F0 = _sym(F0)
    p = q.size
    n = F0.shape[0]
    Fmat = np.array([_sym(np.asarray(F, dtype=float)) for F in Fs]).reshape(-1, n, n)
    if Fmat.shape != (p, n, n):
        raise ValueError(
            f"need one {n}x{n} matrix per objective entry, got {len(Fs)}"
        )

    if p == 0:
        # Pure feasibility of F0: nothing to optimise.
        lam_min = float(np.linalg.eigvalsh(F0).min())
        ok = lam_min >= -feas_tol
        return IPMResult(
            status="optimal" if ok else "infeasible",
            z=np.zeros(0),
            value=0.0 if ok else None,
            X=np.zeros((n, n)) if ok else None,
            S=F0 if ok else None,
            gap=0.0,
            primal_residual=0.0,
            dual_residual=0.0,
            iterations=0,
        )

    scale = 1.0 + max(float(np.abs(F0).max()), float(np.abs(Fmat).max()))
    eye = np.eye(n)
    X = scale * eye
    S = scale * eye
    z = np.zeros(p)
    mu0 = float(np.trace(X @ S)) / n

    status = "max-iterations"
    iterations = 0
    D = d = None

    for iterations in range(1, max_iterations + 1):
        Fz = F0 + np.tensordot(z, Fmat, axes=1)
        D = _sym(Fz - S)  # primal residual matrix
        # Dual feasibility is tr(F_j X) = -q_j: the Lagrangian of the
        # maximisation pairs X with +F(z), so q enters negated.
        d = -q - np.einsum("jab,ba->j", Fmat, X)
        gap = abs(float(np.sum(X * S)))
        mu = gap / n

        r_p = float(np.linalg.norm(D)) / (1.0 + float(np.linalg.norm(F0)))
        r_d = float(np.linalg.norm(d)) / (1.0 + float(np.linalg.norm(q)))
        if gap <= gap_tol * n and r_p <= feas_tol and r_d <= feas_tol:
            status = "optimal"
            break
        if mu > 1e10 * mu0 or not np.isfinite(z).all() or np.abs(z).max() > 1e9 * scale:
            status = "infeasible"
            break

        W, Whalf, Lx, Ls = _nt_scaling(X, S)
        if W is None:
            # Breakdown while still far from primal feasibility is the
            # usual endgame of an infeasible constraint set.
            status = "infeasible" if r_p > 1e-5 else "numerical-failure"
            break
        # Invert S through its (possibly ridged) Cholesky factor; the plain
        # inverse can raise right at a breakdown iterate.
        Ls_inv = solve_triangular(Ls, eye, lower=True)
        Sinv = _sym(Ls_inv.T @ Ls_inv)

        # Schur complement H_ij = tr(F_i W F_j W) as a Gram matrix of the
        # scaled constraint matrices G_j = Whalf^T F_j Whalf.  Solving
        # through a QR factorisation of G^T keeps the effective condition
        # number at kappa(G) rather than kappa(G)^2; near the optimum H is
        # ill-conditioned enough (1e12 and up) that forming and factoring
        # it directly feeds noise into the steps and stalls the dual
        # residual around 1e-4.
        G = np.einsum("ba,jbc,cd->jad", Whalf, Fmat, Whalf).reshape(p, n * n)
        try:
            Q, Rq = np.linalg.qr(G.T)
        except np.linalg.LinAlgError:
            status = "numerical-failure"
            break
        rdiag = np.abs(np.diag(Rq))
        if not np.isfinite(rdiag).all() or rdiag.min() <= 1e-14 * max(rdiag.max(), 1e-300):
            status = "infeasible" if r_p > 1e-5 else "numerical-failure"
            break

        def hsolve(r: np.ndarray) -> np.ndarray:
            # H = Rq^T Rq; two triangular solves, then one round of
            # iterative refinement against the Gram product.
            x = solve_triangular(Rq, solve_triangular(Rq, r, trans=1, lower=False), lower=False)
            res = r - G @ (G.T @ x)
            x += solve_triangular(Rq, solve_triangular(Rq, res, trans=1, lower=False), lower=False)
            return x

        WDW = _sym(W @ D @ W)

        def newton(sigma_mu: float):
            rhs = (
                np.einsum("jab,ba->j", Fmat, sigma_mu * Sinv - X - WDW) - d
            )
            dz = hsolve(rhs)
            if not np.isfinite(dz).all():
                return None
            dS = _sym(np.tensordot(dz, Fmat, axes=1) + D)
            dX = _sym(sigma_mu * Sinv - X - W @ dS @ W)
            return dz, dS, dX

        aff = newton(0.0)
        if aff is None:
            status = "numerical-failure"
            break
        dz_a, dS_a, dX_a = aff
        ax = min(1.0, _BOUNDARY_FRACTION * _max_step(Lx, dX_a))
        as_ = min(1.0, _BOUNDARY_FRACTION * _max_step(Ls, dS_a))
        gap_aff = abs(float(np.sum((X + ax * dX_a) * (S + as_ * dS_a))))
        sigma = float(np.clip((gap_aff / max(gap, 1e-300)) ** 3, _SIGMA_MIN, _SIGMA_MAX))

        step = newton(sigma * mu)
        if step is None:
            status = "numerical-failure"
            break
        dz, dS, dX = step
        ax = min(1.0, _BOUNDARY_FRACTION * _max_step(Lx, dX))
        as_ = min(1.0, _BOUNDARY_FRACTION * _max_step(Ls, dS))
        if min(ax, as_) < 1e-12:
            status = "infeasible" if r_p > 1e-5 else "numerical-failure"
            break

        X = _sym(X + ax * dX)
        z = z + as_ * dz
        S = _sym(S + as_ * dS)

    Fz = F0 + np.tensordot(z, Fmat, axes=1)
    D = _sym(Fz - S)
    d = -q - np.einsum("jab,ba->j", Fmat, X)
    gap = abs(float(np.sum(X * S)))
    r_p = float(np.linalg.norm(D)) / (1.0 + float(np.linalg.norm(F0)))
    r_d = float(np.linalg.norm(d)) / (1.0 + float(np.linalg.norm(q)))

    solved = status == "optimal"
    return IPMResult(
        status=status,
        z=z if solved else None,
        value=float(q @ z) if solved else None,
        X=X if solved else None,
        S=S if solved else None,
        gap=gap,
        primal_residual=r_p,
        dual_residual=r_d,
        iterations=iterations,
    )
