"""Lowest eigenpairs of a real symmetric tridiagonal matrix.

Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
iteration with a partially pivoted LU factorization. Everything is
deterministic: the start vector for inverse iteration is a fixed
low-discrepancy sequence, never a random draw.

The kernels are compiled with numba and release the GIL, so independent
calls may run from a thread pool.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
_GOLDEN = 0.6180339887498949


class EigensolverError(RuntimeError):
    """Raised when bisection or inverse iteration fails to converge."""


@njit(cache=True, nogil=True)
def _sturm_count(d, e2, x, pivmin):
    # number of eigenvalues strictly below x
    n = d.shape[0]
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, n):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def _bisect_lowest(d, e, k, max_iter):
    n = d.shape[0]
    e2 = e * e
    tnorm = 0.0
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
        tnorm = max(tnorm, abs(d[i]) + r)
    pivmin = max(1e-300, _EPS * _EPS * tnorm * tnorm * 1e-10)
    if n > 1:
        pivmin = max(pivmin, np.max(e2) * 1e-290)
    atol = 2.0 * _EPS * tnorm

    # shrink the upper bound: grow from the bottom until k values are enclosed
    step = max(atol, 1e-6 * (hi - lo))
    upper = lo + step
    while upper < hi:
        if _sturm_count(d, e2, upper, pivmin) >= k:
            break
        step *= 4.0
        upper = lo + step
    if upper > hi:
        upper = hi

    lows = np.full(k, lo)
    highs = np.full(k, upper)
    iters = np.zeros(k, dtype=np.int64)
    for j in range(k):
        while True:
            a = lows[j]
            b = highs[j]
            if b - a <= atol + 2.0 * _EPS * max(abs(a), abs(b)):
                break
            if iters[j] >= max_iter:
                break
            iters[j] += 1
            mid = 0.5 * (a + b)
            c = _sturm_count(d, e2, mid, pivmin)
            # a count evaluation narrows every bracket at once
            for m in range(k):
                if m < c:
                    if mid < highs[m]:
                        highs[m] = mid
                else:
                    if mid > lows[m]:
                        lows[m] = mid
    return 0.5 * (lows + highs), iters, tnorm


@njit(cache=True, nogil=True)
def _lu_factor(diag, off, shift, tnorm):
    # LU with partial pivoting of (T - shift*I); U has two superdiagonals
    n = diag.shape[0]
    dd = diag - shift
    dl = off.copy()
    du = off.copy()
    du2 = np.zeros(max(n - 2, 0))
    piv = np.zeros(max(n - 1, 0), dtype=np.bool_)
    tiny = _EPS * tnorm
    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if dd[i] == 0.0:
                dd[i] = tiny
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] -= fact * du[i]
        else:
            piv[i] = True
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = temp - fact * dd[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
    if abs(dd[n - 1]) < tiny:
        dd[n - 1] = tiny if dd[n - 1] >= 0.0 else -tiny
    for i in range(n - 1):
        if abs(dd[i]) < tiny:
            dd[i] = tiny if dd[i] >= 0.0 else -tiny
    return dl, dd, du, du2, piv


@njit(cache=True, nogil=True)
def _lu_solve(dl, dd, du, du2, piv, b):
    n = dd.shape[0]
    x = b.copy()
    for i in range(n - 1):
        if piv[i]:
            temp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = temp - dl[i] * x[i]
        else:
            x[i + 1] -= dl[i] * x[i]
    x[n - 1] /= dd[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / dd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i]
    return x


@njit(cache=True, nogil=True)
def _tri_matvec(d, e, x):
    n = d.shape[0]
    y = d * x
    for i in range(n - 1):
        y[i] += e[i] * x[i + 1]
        y[i + 1] += e[i] * x[i]
    return y


@njit(cache=True, nogil=True)
def _inverse_iteration(d, e, values, tnorm, max_iter):
    n = d.shape[0]
    k = values.shape[0]
    vecs = np.zeros((k, n))
    residuals = np.zeros(k)
    for j in range(k):
        dl, dd, du, du2, piv = _lu_factor(d, e, values[j], tnorm)
        x = np.empty(n)
        for i in range(n):
            frac = ((i + 1) * _GOLDEN + 0.5 * j * _GOLDEN) % 1.0
            x[i] = 0.5 + frac
        x /= np.sqrt(np.dot(x, x))
        for _ in range(max_iter):
            y = _lu_solve(dl, dd, du, du2, piv, x)
            # modified Gram-Schmidt against the lower states
            for m in range(j):
                y -= np.dot(vecs[m], y) * vecs[m]
            nrm = np.sqrt(np.dot(y, y))
            x = y / nrm
            r = _tri_matvec(d, e, x) - values[j] * x
            res = np.sqrt(np.dot(r, r))
            residuals[j] = res
            if res <= 1e3 * _EPS * tnorm:
                break
        # deterministic sign: first sizable component positive
        amax = np.max(np.abs(x))
        for i in range(n):
            if abs(x[i]) > 1e-3 * amax:
                if x[i] < 0.0:
                    x = -x
                break
        vecs[j] = x
    return vecs, residuals


def lowest_eigenpairs(
    diag: np.ndarray, off: np.ndarray, k: int, *, max_bisect: int = 200, max_inverse: int = 8
) -> tuple[np.ndarray, np.ndarray]:
    """Lowest ``k`` eigenpairs of the symmetric tridiagonal matrix ``(diag, off)``.

    Parameters
    ----------
    diag:
        main diagonal, length ``n``
    off:
        off-diagonal, length ``n - 1``
    k:
        number of eigenpairs, ``1 <= k <= n``

    Returns
    -------
    values, vectors
        ascending eigenvalues of shape ``(k,)`` and unit-norm eigenvectors of
        shape ``(k, n)`` (Euclidean norm, no grid weight)
    """
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    n = diag.shape[0]
    if off.shape[0] != n - 1:
        raise ValueError(f"off-diagonal must have length {n - 1}, got {off.shape[0]}")
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if n == 1:
        return diag.copy(), np.ones((1, 1))

    values, iters, tnorm = _bisect_lowest(diag, off, k, max_bisect)
    if np.any(iters >= max_bisect):
        raise EigensolverError(
            f"bisection did not converge in {max_bisect} steps (iterations per level: {iters.tolist()})"
        )
    vectors, residuals = _inverse_iteration(diag, off, values, tnorm, max_inverse)
    # residual of a converged pair is O(eps * |T|); allow generous slack for clusters
    bad = residuals > 1e-8 * max(tnorm, 1.0)
    if np.any(bad):
        raise EigensolverError(
            f"inverse iteration did not converge: residuals {residuals.tolist()}, |T| = {tnorm:.3e}"
        )
    # Rayleigh quotients sharpen the bisection values
    values = np.einsum("ij,ij->i", vectors, np.stack([_tri_matvec(diag, off, v) for v in vectors]))
    order = np.argsort(values, kind="stable")
    return values[order], vectors[order]
