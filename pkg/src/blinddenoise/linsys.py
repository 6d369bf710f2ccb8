"""Matrix-free solver for image-space normal equations.

All three denoisers update the image estimate by solving a system of
the form (alpha I + sum_i P_i^T M P_i) x = rhs, where P_i extracts the
i-th patch and M is a small symmetric patch-space matrix. The operator
is applied through extract/aggregate so the full system matrix is never
materialized; a Jacobi preconditioner built from the exact diagonal
keeps the conjugate gradient iteration count low.
"""

from __future__ import annotations

import warnings

import numpy as np

from .numerics import CGResult, cg_solve
from .patches import PatchConfig, aggregate_patches, extract_patches, patch_count


def solve_patch_quadratic(
    alpha: float,
    coeff: np.ndarray,
    rhs: np.ndarray,
    cfg: PatchConfig,
    x0: np.ndarray | None = None,
    cg_tol: float = 1e-6,
    cg_maxit: int = 200,
    context: str = "image update",
) -> CGResult:
    """Solve (alpha I + sum_i P_i^T coeff P_i) x = rhs by preconditioned CG.

    Non-convergence is reported as a RuntimeWarning and the last iterate
    is returned, so callers can continue with a usable estimate.
    """
    h, w = rhs.shape
    count = patch_count(cfg, h, w)

    def apply(x):
        return alpha * x + aggregate_patches(
            coeff @ extract_patches(x, cfg), cfg, h, w
        )

    diag_patch = np.repeat(np.diag(coeff)[:, None], count, axis=1)
    diag = alpha + aggregate_patches(diag_patch, cfg, h, w)

    result = cg_solve(
        apply, rhs, tol=cg_tol, maxit=cg_maxit, x0=x0, precond=lambda r: r / diag
    )
    if not result.converged:
        warnings.warn(
            f"CG for {context} stopped at relative residual "
            f"{result.relative_residual:.3e} after {result.iterations} iterations",
            RuntimeWarning,
            stacklevel=2,
        )
    return result
