"""Shared numerical kernels.

Proximal/thresholding operators, ridge-regularized least squares,
matrix-free conjugate gradient, invertible element-wise activations,
and the stacked DCT/Haar transform pair used to initialize the patch
autoencoder.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg


@dataclass(frozen=True)
class Activation:
    """Element-wise activation with a clamped inverse.

    kind "tanh" clamps inputs to [-1 + clamp_margin, 1 - clamp_margin]
    before atanh; kind "identity" is its own inverse. Identity is the
    default: patch intensities on [0, 1] drive the DC coefficients far
    into tanh saturation, which destabilizes the block updates.
    """

    kind: str = "identity"
    clamp_margin: float = 1e-7

    def __post_init__(self):
        if self.kind not in ("tanh", "identity"):
            raise ValueError(f"unknown activation kind {self.kind!r}")
        if not 0 < self.clamp_margin < 1:
            raise ValueError("clamp_margin must be in (0, 1)")


@dataclass(frozen=True)
class RidgeParams:
    """Tikhonov weight stabilizing the pseudoinverse solves."""

    epsilon: float = 1e-6

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")


def soft_threshold(v: np.ndarray, t: float) -> np.ndarray:
    """sign(v) * max(|v| - t, 0), the proximal map of t * l1."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    v = np.asarray(v, dtype=float)
    out = np.abs(v)
    np.subtract(out, t, out=out)
    np.maximum(out, 0.0, out=out)
    return np.copysign(out, v, out=out)


def hard_threshold_top_tau(v: np.ndarray, tau: int) -> np.ndarray:
    """Keep the tau largest-magnitude entries of a 1-D array, zero the rest.

    Ties are broken in favor of the lowest index.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-D array")
    if not 0 <= tau <= v.size:
        raise ValueError(f"tau must be in [0, {v.size}], got {tau}")
    out = np.zeros_like(v)
    if tau == 0:
        return out
    keep = np.argsort(-np.abs(v), kind="stable")[:tau]
    out[keep] = v[keep]
    return out


def hard_threshold_columns(m: np.ndarray, tau: int) -> np.ndarray:
    """Column-wise :func:`hard_threshold_top_tau` for a 2-D array."""
    m = np.asarray(m, dtype=float)
    if tau >= m.shape[0]:
        return m.copy()
    out = np.zeros_like(m)
    if tau == 0:
        return out
    order = np.argsort(-np.abs(m), axis=0, kind="stable")[:tau, :]
    cols = np.arange(m.shape[1])[None, :]
    out[order, cols] = m[order, cols]
    return out


def ridge_solve_left(A: np.ndarray, B: np.ndarray, params: RidgeParams) -> np.ndarray:
    """Minimize ||A - W B||_F^2 + eps ||W||_F^2 over W.

    Closed form W = A B^T (B B^T + eps I)^-1, solved through a Cholesky
    factorization of the (symmetric) normal matrix.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"column counts differ: {A.shape[1]} vs {B.shape[1]}")
    m = B @ B.T
    m[np.diag_indices_from(m)] += params.epsilon
    try:
        cho = scipy.linalg.cho_factor(m, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            "normal matrix is singular; use epsilon > 0 or full-rank B"
        ) from exc
    return scipy.linalg.cho_solve(cho, B @ A.T, check_finite=False).T


@dataclass
class CGResult:
    x: np.ndarray
    converged: bool
    iterations: int
    relative_residual: float


def cg_solve(apply, rhs, tol: float = 1e-6, maxit: int = 200,
             x0=None, precond=None) -> CGResult:
    """Conjugate gradient for a symmetric positive definite operator.

    ``apply`` maps arrays to arrays of the same shape (any shape works;
    inner products are taken over all elements). Stops when
    ||apply(x) - rhs|| <= tol * ||rhs|| or after ``maxit`` iterations;
    non-convergence is reported through the result, never raised.
    An optional ``precond`` callable applies an approximate inverse.
    """
    rhs = np.asarray(rhs, dtype=float)
    rhs_norm = np.linalg.norm(rhs)
    if rhs_norm == 0.0:
        return CGResult(np.zeros_like(rhs), True, 0, 0.0)
    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=float)
    r = rhs - apply(x)
    res = np.linalg.norm(r) / rhs_norm
    if res <= tol:
        return CGResult(x, True, 0, res)
    z = precond(r) if precond is not None else r
    p = z.copy()
    rz = np.vdot(r, z)
    for k in range(maxit):
        ap = apply(p)
        pap = np.vdot(p, ap)
        if pap <= 0.0:
            # operator not positive definite along p; bail out
            return CGResult(x, False, k, res)
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        res = np.linalg.norm(r) / rhs_norm
        if res <= tol:
            return CGResult(x, True, k + 1, res)
        z = precond(r) if precond is not None else r
        rz_new = np.vdot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return CGResult(x, False, maxit, res)


def activation_apply(v: np.ndarray, a: Activation) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if a.kind == "identity":
        return v.copy()
    return np.tanh(v)


def activation_invert(v: np.ndarray, a: Activation) -> np.ndarray:
    """Inverse activation; tanh inputs are clamped into (-1, 1) first."""
    v = np.asarray(v, dtype=float)
    if a.kind == "identity":
        return v.copy()
    lim = 1.0 - a.clamp_margin
    return np.arctanh(np.clip(v, -lim, lim))


def dct_matrix_1d(n: int) -> np.ndarray:
    """Orthonormal type-II DCT matrix of size n x n."""
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    c = np.cos(np.pi * (2 * x + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    c[0, :] /= np.sqrt(2.0)
    return c


def haar_matrix_1d(n: int) -> np.ndarray:
    """Orthonormal Haar matrix; n must be a power of two."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"Haar matrix requires a power-of-two size, got {n}")
    h = np.ones((1, 1))
    while h.shape[0] < n:
        top = np.kron(h, [1.0, 1.0])
        bot = np.kron(np.eye(h.shape[0]), [1.0, -1.0])
        h = np.vstack([top, bot]) / np.sqrt(2.0)
    return h


def build_init_transforms(patch_size: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacked 2-D DCT + Haar analysis pair used for initialization.

    Returns (encoder, decoder) with encoder = [C; H] of shape
    (2 d^2, d^2) and decoder = 0.5 [C^T, H^T], so decoder @ encoder is
    the identity. Falls back to a duplicated DCT (with a warning) when
    patch_size is not a power of two, which preserves the identity.
    """
    d = patch_size
    c1 = dct_matrix_1d(d)
    c2 = np.kron(c1, c1)
    if d >= 1 and not d & (d - 1):
        h1 = haar_matrix_1d(d)
        h2 = np.kron(h1, h1)
    else:
        warnings.warn(
            f"patch_size {d} is not a power of two; Haar block replaced by DCT",
            stacklevel=2,
        )
        h2 = c2.copy()
    encoder = np.vstack([c2, h2])
    decoder = 0.5 * encoder.T
    return encoder, decoder


def spectral_norm(m: np.ndarray, iters: int = 50, tol: float = 1e-8) -> float:
    """Largest singular value by power iteration with a deterministic start."""
    m = np.asarray(m, dtype=float)
    if m.size == 0 or not np.any(m):
        return 0.0
    v = np.ones(m.shape[1]) / np.sqrt(m.shape[1])
    sigma = 0.0
    for _ in range(iters):
        u = m @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        w = m.T @ (u / nu)
        sigma_new = np.linalg.norm(w)
        if sigma_new == 0.0:
            return 0.0
        v = w / sigma_new
        if abs(sigma_new - sigma) <= tol * sigma_new:
            return sigma_new
        sigma = sigma_new
    return sigma
