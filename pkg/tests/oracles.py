"""Independent reference implementations used as test oracles.

Everything here is deliberately written from first principles (explicit
loops, dense matrices, generic optimizers) and stays independent of the
library code paths it is used to check.
"""

import itertools
import math

import numpy as np
import scipy.optimize


def patch_starts(extent, patch_size, stride):
    s = list(range(0, extent - patch_size + 1, stride))
    if s[-1] != extent - patch_size:
        s.append(extent - patch_size)
    return s


def patch_positions(height, width, patch_size, stride):
    return [
        (r, c)
        for r in patch_starts(height, patch_size, stride)
        for c in patch_starts(width, patch_size, stride)
    ]


def patch_pixel_indices(r, c, patch_size, width):
    return [
        (r + dr) * width + (c + dc)
        for dr in range(patch_size)
        for dc in range(patch_size)
    ]


def extract_loop(img, patch_size, stride):
    """Patch matrix built with explicit python loops."""
    h, w = img.shape
    cols = []
    for r, c in patch_positions(h, w, patch_size, stride):
        cols.append(img[r : r + patch_size, c : c + patch_size].ravel())
    return np.stack(cols, axis=1)


def aggregate_loop(pm, patch_size, stride, height, width):
    out = np.zeros((height, width))
    for j, (r, c) in enumerate(
        patch_positions(height, width, patch_size, stride)
    ):
        out[r : r + patch_size, c : c + patch_size] += pm[:, j].reshape(
            patch_size, patch_size
        )
    return out


def dense_patch_system(alpha, coeff, height, width, patch_size, stride):
    """Materialize alpha I + sum_i P_i^T coeff P_i as a dense matrix."""
    n = height * width
    a = alpha * np.eye(n)
    for r, c in patch_positions(height, width, patch_size, stride):
        sel = patch_pixel_indices(r, c, patch_size, width)
        a[np.ix_(sel, sel)] += coeff
    return a


def dense_patch_rhs(base, per_patch, height, width, patch_size, stride):
    """base + sum_i P_i^T per_patch[:, i] accumulated with loops."""
    out = base.astype(float).ravel().copy()
    for j, (r, c) in enumerate(
        patch_positions(height, width, patch_size, stride)
    ):
        for k, pix in enumerate(patch_pixel_indices(r, c, patch_size, width)):
            out[pix] += per_patch[k, j]
    return out.reshape(height, width)


def soft_threshold_grid(v, t, lo=-10.0, hi=10.0, n=200001):
    """Scalar minimizer of t|z| + 0.5 (z - v)^2 by exhaustive grid search."""
    grid = np.linspace(lo, hi, n)
    return grid[np.argmin(t * np.abs(grid) + 0.5 * (grid - v) ** 2)]


def best_sparse_error(v, tau):
    """Squared error of the best tau-sparse approximation, by enumerating
    every support of size tau."""
    if tau >= len(v):
        return 0.0
    best = math.inf
    for support in itertools.combinations(range(len(v)), tau):
        err = sum(v[i] ** 2 for i in range(len(v)) if i not in support)
        best = min(best, err)
    return best


def code_column_objective(decoder, p, z, q, lam, mu, gamma):
    """lam ||p - W' z||^2 + mu ||z||_1 + gamma ||z - q||^2 for one column."""
    return (
        lam * np.sum((p - decoder @ z) ** 2)
        + mu * np.sum(np.abs(z))
        + gamma * np.sum((z - q) ** 2)
    )


def code_column_coordinate_descent(decoder, p, q, lam, mu, gamma, sweeps=500):
    """Coordinate descent on the per-column code objective.

    Each coordinate update is the exact scalar minimizer, so the method
    converges to the (convex) problem's solution independently of ISTA.
    """
    m = decoder.shape[1]
    z = np.zeros(m)
    colsq = np.sum(decoder**2, axis=0)
    r = p - decoder @ z
    for _ in range(sweeps):
        for k in range(m):
            r += decoder[:, k] * z[k]
            a = lam * colsq[k] + gamma
            b = lam * decoder[:, k] @ r + gamma * q[k]
            z[k] = np.sign(b / a) * max(abs(b / a) - mu / (2 * a), 0.0)
            r -= decoder[:, k] * z[k]
    return z


def transform_objective(t, x, z, lam, eps):
    """||T X - Z||_F^2 + lam (eps ||T||_F^2 - log|det T|)."""
    sign, logdet = np.linalg.slogdet(t)
    if sign == 0:
        return math.inf
    return float(
        np.sum((t @ x - z) ** 2) + lam * (eps * np.sum(t**2) - logdet)
    )


def transform_numeric_minimizer(x, z, lam, eps, restarts=20, seed=0):
    """Multi-restart L-BFGS on the transform objective; returns the best
    objective value found."""
    m = x.shape[0]

    def fun(flat):
        t = flat.reshape(m, m)
        sign, logdet = np.linalg.slogdet(t)
        if sign == 0:
            return 1e12, np.zeros(m * m)
        val = np.sum((t @ x - z) ** 2) + lam * (eps * np.sum(t**2) - logdet)
        grad = 2 * (t @ x - z) @ x.T + 2 * lam * eps * t - lam * np.linalg.inv(t).T
        return val, grad.ravel()

    rng = np.random.default_rng(seed)
    best = math.inf
    for _ in range(restarts):
        t0 = rng.standard_normal((m, m))
        res = scipy.optimize.minimize(
            fun, t0.ravel(), jac=True, method="L-BFGS-B",
            options={"maxiter": 2000, "ftol": 1e-14, "gtol": 1e-12},
        )
        best = min(best, res.fun)
    return best
