"""Tridiagonal linear algebra kernels.

Conventions for a system of size n: ``lower[i]`` multiplies ``x[i-1]`` in row i
(``lower[0]`` unused), ``upper[i]`` multiplies ``x[i+1]`` (``upper[-1]`` unused).
Periodic systems add the corner entries ``A[0, n-1]`` and ``A[n-1, 0]``.

The scalar solvers work for real or complex coefficients. The block solvers
treat each unknown as a real 2-vector and each coefficient as a real 2x2 matrix.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .errors import ConvergenceError, UsageError


@njit(cache=True, nogil=True)
def _thomas_factor(lower, diag, upper):
    n = diag.shape[0]
    cp = np.zeros(n, dtype=diag.dtype)
    inv = np.zeros(n, dtype=diag.dtype)
    denom = diag[0]
    if denom == 0:
        return cp, inv, False
    inv[0] = 1.0 / denom
    cp[0] = upper[0] * inv[0]
    for i in range(1, n):
        denom = diag[i] - lower[i] * cp[i - 1]
        if denom == 0:
            return cp, inv, False
        inv[i] = 1.0 / denom
        cp[i] = upper[i] * inv[i]
    return cp, inv, True


@njit(cache=True, nogil=True)
def _thomas_apply(lower, cp, inv, rhs):
    n = rhs.shape[0]
    x = np.empty(n, dtype=cp.dtype)
    x[0] = rhs[0] * inv[0]
    for i in range(1, n):
        x[i] = (rhs[i] - lower[i] * x[i - 1]) * inv[i]
    for i in range(n - 2, -1, -1):
        x[i] -= cp[i] * x[i + 1]
    return x


@njit(cache=True, nogil=True)
def _inv2(m):
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    out = np.empty((2, 2))
    out[0, 0] = m[1, 1] / det
    out[0, 1] = -m[0, 1] / det
    out[1, 0] = -m[1, 0] / det
    out[1, 1] = m[0, 0] / det
    return out, det


@njit(cache=True, nogil=True)
def _block_factor(lower, diag, upper):
    n = diag.shape[0]
    cp = np.zeros((n, 2, 2))
    inv = np.zeros((n, 2, 2))
    d = diag[0].copy()
    for i in range(n):
        if i > 0:
            d = diag[i] - lower[i] @ cp[i - 1]
        dinv, det = _inv2(d)
        if det == 0:
            return cp, inv, False
        inv[i] = dinv
        cp[i] = dinv @ upper[i]
    return cp, inv, True


@njit(cache=True, nogil=True)
def _block_apply(lower, cp, inv, rhs):
    n = rhs.shape[0]
    x = np.empty((n, 2))
    x[0] = inv[0] @ rhs[0]
    for i in range(1, n):
        x[i] = inv[i] @ (rhs[i] - lower[i] @ x[i - 1])
    for i in range(n - 2, -1, -1):
        x[i] = x[i] - cp[i] @ x[i + 1]
    return x


class TridiagonalSolver:
    """Factor once, solve many times. Thomas elimination without pivoting."""

    def __init__(self, lower, diag, upper):
        diag = np.ascontiguousarray(diag)
        dtype = np.result_type(lower, diag, upper)
        self.lower = np.ascontiguousarray(lower, dtype=dtype)
        self.diag = np.ascontiguousarray(diag, dtype=dtype)
        self.upper = np.ascontiguousarray(upper, dtype=dtype)
        n = self.diag.shape[0]
        if self.lower.shape != (n,) or self.upper.shape != (n,):
            raise UsageError("lower, diag and upper must have equal length")
        self._cp, self._inv, ok = _thomas_factor(self.lower, self.diag, self.upper)
        if not ok:
            raise ConvergenceError("zero pivot in Thomas elimination", {"size": n})

    def solve(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs)
        if np.iscomplexobj(rhs) and not np.iscomplexobj(self.diag):
            lower, cp, inv = (a.astype(complex) for a in (self.lower, self._cp, self._inv))
        else:
            lower, cp, inv = self.lower, self._cp, self._inv
        return _thomas_apply(lower, cp, inv, np.ascontiguousarray(rhs, dtype=cp.dtype))


class CyclicTridiagonalSolver:
    """Periodic tridiagonal solve by a Sherman-Morrison rank-1 correction."""

    def __init__(self, lower, diag, upper, corner_upper, corner_lower):
        # corner_upper = A[0, n-1], corner_lower = A[n-1, 0]
        diag = np.array(diag, dtype=np.result_type(diag, corner_upper, corner_lower, lower, upper))
        n = diag.shape[0]
        if n < 3:
            raise UsageError("cyclic systems need at least 3 unknowns")
        gamma = -diag[0]
        self._beta_over_gamma = corner_upper / gamma
        modified = diag.copy()
        modified[0] -= gamma
        modified[-1] -= corner_lower * corner_upper / gamma
        self._inner = TridiagonalSolver(lower, modified, upper)
        u = np.zeros(n, dtype=diag.dtype)
        u[0] = gamma
        u[-1] = corner_lower
        self._z = self._inner.solve(u)
        self._denom = 1.0 + self._z[0] + self._beta_over_gamma * self._z[-1]
        if self._denom == 0:
            raise ConvergenceError("singular Sherman-Morrison correction", {"size": n})

    def solve(self, rhs) -> np.ndarray:
        y = self._inner.solve(rhs)
        factor = (y[0] + self._beta_over_gamma * y[-1]) / self._denom
        return y - factor * self._z


class BlockTridiagonalSolver:
    """Block Thomas elimination for 2x2 real blocks; arrays have shape (n, 2, 2)."""

    def __init__(self, lower, diag, upper):
        self.lower = np.ascontiguousarray(lower, dtype=float)
        self.diag = np.ascontiguousarray(diag, dtype=float)
        self.upper = np.ascontiguousarray(upper, dtype=float)
        n = self.diag.shape[0]
        for arr in (self.lower, self.diag, self.upper):
            if arr.shape != (n, 2, 2):
                raise UsageError("block coefficients must have shape (n, 2, 2)")
        self._cp, self._inv, ok = _block_factor(self.lower, self.diag, self.upper)
        if not ok:
            raise ConvergenceError("singular pivot block in block Thomas elimination", {"size": n})

    def solve(self, rhs) -> np.ndarray:
        """``rhs`` has shape (n, 2); returns the same shape."""
        return _block_apply(self.lower, self._cp, self._inv, np.ascontiguousarray(rhs, dtype=float))


class CyclicBlockTridiagonalSolver:
    """Periodic block system via a rank-2 Woodbury correction (blockwise Sherman-Morrison)."""

    def __init__(self, lower, diag, upper, corner_upper, corner_lower):
        diag = np.array(diag, dtype=float)
        n = diag.shape[0]
        if n < 3:
            raise UsageError("cyclic systems need at least 3 unknowns")
        gamma = -diag[0]
        gamma_inv = np.linalg.inv(gamma)
        self._vb = gamma_inv @ np.asarray(corner_upper, dtype=float)  # V^T block at n-1
        modified = diag.copy()
        modified[0] -= gamma
        modified[-1] -= np.asarray(corner_lower, dtype=float) @ self._vb
        self._inner = BlockTridiagonalSolver(lower, modified, upper)
        # two right-hand sides, one per column of U
        cols = []
        for j in range(2):
            u = np.zeros((n, 2))
            u[0] = gamma[:, j]
            u[-1] = np.asarray(corner_lower, dtype=float)[:, j]
            cols.append(self._inner.solve(u))
        self._z = np.stack(cols, axis=-1)  # (n, 2, 2)
        small = np.eye(2) + self._z[0] + self._vb @ self._z[-1]
        self._small_inv = np.linalg.inv(small)

    def solve(self, rhs) -> np.ndarray:
        y = self._inner.solve(rhs)
        coeff = self._small_inv @ (y[0] + self._vb @ y[-1])
        return y - self._z @ coeff


# -- symmetric tridiagonal eigenvalue kernels -------------------------------


@njit(cache=True, nogil=True)
def sturm_count(diag, off_sq, x, pivmin):
    """Number of eigenvalues strictly below ``x``; ``off_sq`` holds squared off-diagonals.

    Classical recurrence; accurate to about eps * ||T|| in absolute terms.
    """
    count = 0
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, diag.shape[0]):
        q = diag[i] - x - off_sq[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def ldl_factor(diag, off, shift):
    """T - shift*I = L D L^T with unit lower bidiagonal L; returns (d, l, ok)."""
    n = diag.shape[0]
    d = np.empty(n)
    l = np.empty(max(n - 1, 0))
    d[0] = diag[0] - shift
    for i in range(n - 1):
        if not d[i] > 0:
            return d, l, False
        l[i] = off[i] / d[i]
        d[i + 1] = diag[i + 1] - shift - l[i] * off[i]
    return d, l, d[n - 1] > 0


@njit(cache=True, nogil=True)
def ldl_sturm_count(d, l, x, pivmin):
    """Negative pivots of L D L^T - x I via the stationary qd transform.

    Works on the factored representation, so eigenvalues of a positive
    definite L D L^T are resolved to high relative accuracy.
    """
    n = d.shape[0]
    count = 0
    s = -x
    for i in range(n - 1):
        dplus = d[i] + s
        if abs(dplus) < pivmin:
            dplus = -pivmin
        if dplus < 0:
            count += 1
        s = (d[i] * l[i] / dplus) * l[i] * s - x
    if d[n - 1] + s < 0:
        count += 1
    return count


@njit(cache=True, nogil=True)
def bisect_ldl(d, l, index, lo, hi, pivmin):
    """The ``index``-th smallest eigenvalue (0-based) of L D L^T inside [lo, hi]."""
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if ldl_sturm_count(d, l, mid, pivmin) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True, nogil=True)
def bisect_eigenvalue(diag, off_sq, index, lo, hi, pivmin):
    """The ``index``-th smallest eigenvalue (0-based), bracketed in [lo, hi]."""
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(diag, off_sq, mid, pivmin) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def positive_definite_shift(diag, off):
    """A shift below the spectrum with a successful L D L^T factorization of T - shift."""
    lo, hi = gershgorin_bounds(diag, off)
    width = max(hi - lo, np.finfo(float).tiny)
    margin = 0.0
    for _ in range(60):
        shift = lo - margin
        d, l, ok = ldl_factor(diag, off, shift)
        if ok:
            return shift, d, l, hi - shift
        margin = max(2.0 * margin, 4 * np.finfo(float).eps * width)
    raise ConvergenceError("could not find a positive definite shift", {"lower_bound": lo})


def gershgorin_bounds(diag, off) -> tuple[float, float]:
    r = np.zeros_like(diag)
    r[:-1] += np.abs(off)
    r[1:] += np.abs(off)
    return float(np.min(diag - r)), float(np.max(diag + r))


@njit(cache=True, nogil=True)
def _pivoted_lu_solve(diag, off, shift, rhs):
    """Solve (T - shift I) x = rhs for symmetric tridiagonal T with partial pivoting."""
    n = diag.shape[0]
    # row i of U has entries at columns i, i+1, i+2
    u0 = np.zeros(n)
    u1 = np.zeros(n)
    u2 = np.zeros(n)
    b = rhs.copy()
    # working copy of the current row
    cur0 = diag[0] - shift
    cur1 = off[0] if n > 1 else 0.0
    for i in range(n - 1):
        nxt_l = off[i]
        nxt_d = diag[i + 1] - shift
        nxt_u = off[i + 1] if i + 1 < n - 1 else 0.0
        if abs(cur0) >= abs(nxt_l):
            piv = cur0 if cur0 != 0 else 1e-300
            m = nxt_l / piv
            u0[i] = piv
            u1[i] = cur1
            u2[i] = 0.0
            b[i + 1] -= m * b[i]
            cur0 = nxt_d - m * cur1
            cur1 = nxt_u
        else:
            m = cur0 / nxt_l
            u0[i] = nxt_l
            u1[i] = nxt_d
            u2[i] = nxt_u
            tmp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = tmp - m * b[i + 1]
            cur0 = cur1 - m * nxt_d
            cur1 = -m * nxt_u
    u0[n - 1] = cur0 if cur0 != 0 else 1e-300
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        s = b[i]
        if i + 1 < n:
            s -= u1[i] * x[i + 1]
        if i + 2 < n:
            s -= u2[i] * x[i + 2]
        x[i] = s / u0[i]
    return x


def inverse_iteration(diag, off, eigenvalue, previous=(), start=None, max_iter=8, tol=None):
    """Eigenvector of symmetric tridiagonal T for a converged ``eigenvalue``.

    Vectors in ``previous`` (unit, mutually orthogonal) are projected out on
    every iteration. Returns ``(vector, residual_norm, iterations)``.
    """
    diag = np.ascontiguousarray(diag, dtype=float)
    off = np.ascontiguousarray(off, dtype=float)
    n = diag.shape[0]
    scale = max(abs(diag).max() + 2 * (abs(off).max() if off.size else 0.0), 1e-300)
    eps = np.finfo(float).eps
    shift = eigenvalue + 4 * eps * scale
    tol = 8 * eps * scale if tol is None else tol
    if start is None:
        start = np.random.default_rng(n).standard_normal(n)
    x = start / np.linalg.norm(start)
    history = []
    for it in range(1, max_iter + 1):
        x = _pivoted_lu_solve(diag, off, shift, x)
        for v in previous:
            x -= np.dot(v, x) * v
        norm = np.linalg.norm(x)
        if not np.isfinite(norm) or norm == 0:
            break
        x /= norm
        residual = np.linalg.norm(symmetric_tridiagonal_matvec(diag, off, x) - eigenvalue * x)
        history.append(float(residual))
        if residual <= tol:
            return x, residual, it
    raise ConvergenceError(
        "inverse iteration stagnated",
        {"eigenvalue": float(eigenvalue), "residual_history": history, "tolerance": float(tol)},
    )


def symmetric_tridiagonal_matvec(diag, off, x):
    y = diag * x
    y[:-1] += off * x[1:]
    y[1:] += off * x[:-1]
    return y
