"""Dense eigensolver for the small projected problem A_Q @ phi = eps * B_Q @ phi.

Route: Cholesky reduction of the pencil to standard form, Householder
tridiagonalization, implicit-shift QL with Wilkinson shifts, then
back-transformation of the eigenvectors.  Everything here is O(m0^3) dense
work on matrices no larger than the working subspace.
"""

from __future__ import annotations

import numpy as np


class ReducedSolverError(Exception):
    """Iteration failure in the reduced eigensolver (maps to info -3)."""


# Total QL rotation budget is 30 per eigenvalue; exceeding it is a failure.
_QL_MAX_SWEEPS = 30


def spd_factor(b: np.ndarray):
    """Cholesky factor of a symmetric/Hermitian positive-definite matrix.

    Returns ``(L, None)`` on success with ``L @ L.conj().T == b``, or
    ``(None, j)`` with the 1-based index of the first non-positive pivot.
    """
    b = np.asarray(b)
    n = b.shape[0]
    if b.shape != (n, n):
        raise ValueError(f"expected square matrix, got {b.shape}")
    lower = np.zeros_like(b)
    for j in range(n):
        d = (b[j, j] - lower[j, :j] @ lower[j, :j].conj()).real
        if not d > 0.0 or not np.isfinite(d):
            return None, j + 1
        lower[j, j] = np.sqrt(d)
        if j + 1 < n:
            lower[j + 1:, j] = (b[j + 1:, j] - lower[j + 1:, :j] @ lower[j, :j].conj()) / lower[j, j]
    return lower, None


def _solve_lower(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve lower @ x = rhs (forward substitution, block RHS)."""
    x = np.array(rhs, copy=True)
    n = lower.shape[0]
    for i in range(n):
        if i:
            x[i] -= lower[i, :i] @ x[:i]
        x[i] /= lower[i, i]
    return x


def _solve_lower_adjoint(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve lower^H @ x = rhs (back substitution, block RHS)."""
    x = np.array(rhs, copy=True)
    n = lower.shape[0]
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= lower[i + 1:, i].conj() @ x[i + 1:]
        x[i] /= lower[i, i].conjugate()
    return x


def _tridiagonalize(a: np.ndarray):
    """Householder reduction of a Hermitian matrix to real tridiagonal form.

    Returns (d, e, v) with d the diagonal, e the n-1 subdiagonal entries
    (real, nonnegative) and v the accumulated transformation, so that
    a == v @ T @ v^H.
    """
    a = np.array(a, copy=True)
    n = a.shape[0]
    complex_input = np.iscomplexobj(a)
    v = np.eye(n, dtype=a.dtype)
    for k in range(n - 2):
        x = a[k + 1:, k].copy()
        xnorm = np.linalg.norm(x)
        if xnorm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * xnorm
        u = x.copy()
        u[0] -= alpha
        unorm = np.linalg.norm(u)
        if unorm == 0.0:
            continue
        u /= unorm
        # Two-sided update of the trailing block with H = I - 2 u u^H.
        sub = a[k + 1:, k + 1:]
        p = 2.0 * (sub @ u)
        kappa = (u.conj() @ p).real
        sub -= np.outer(p, u.conj())
        sub -= np.outer(u, p.conj())
        sub += (2.0 * kappa) * np.outer(u, u.conj())
        a[k + 1, k] = alpha
        a[k + 2:, k] = 0.0
        a[k, k + 1:] = a[k + 1:, k].conj()
        v[:, k + 1:] -= 2.0 * np.outer(v[:, k + 1:] @ u, u.conj())
    d = a.diagonal().real.astype(np.float64).copy()
    e = np.zeros(max(n - 1, 0), dtype=np.float64)
    if n > 1:
        sub = np.diagonal(a, -1).copy()
        if complex_input:
            # Fold subdiagonal phases into v so the tridiagonal entries are real.
            phi = np.ones(n, dtype=a.dtype)
            for j in range(n - 1):
                mag = abs(sub[j])
                phi[j + 1] = phi[j] * (sub[j] / mag) if mag != 0 else phi[j]
                e[j] = mag
            v = v * phi[np.newaxis, :]
        else:
            e[:] = sub.real
    return d, e, v


def _ql_implicit(d: np.ndarray, e: np.ndarray, z: np.ndarray):
    """Implicit-shift QL sweeps with Wilkinson shifts on a real symmetric
    tridiagonal matrix; rotations are accumulated into the columns of z.

    Modifies d, e, z in place; d holds the (unsorted) eigenvalues on return.
    """
    n = d.shape[0]
    eps = np.finfo(np.float64).eps
    if n == 1:
        return
    ee = np.zeros(n)
    ee[: n - 1] = e
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(ee[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _QL_MAX_SWEEPS:
                raise ReducedSolverError(
                    f"tridiagonal QL failed to converge for eigenvalue {l}"
                )
            # Wilkinson shift from the leading 2x2.
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + ee[l] / (g + (r if g >= 0 else -r))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * ee[i]
                b = c * ee[i]
                r = np.hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i + 1], z[:, i] = s * zi + c * z[:, i + 1], c * zi - s * z[:, i + 1]
            else:
                d[l] -= p
                ee[l] = g
                ee[m] = 0.0


def standard_eig(a: np.ndarray):
    """All eigenvalues (ascending) and orthonormal eigenvectors of a
    symmetric/Hermitian matrix."""
    a = np.asarray(a)
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0].real], dtype=np.float64), np.ones((1, 1), dtype=a.dtype)
    d, e, v = _tridiagonalize(a)
    _ql_implicit(d, e, v)
    order = np.argsort(d, kind="stable")
    return d[order], v[:, order]


def generalized_eig(aq: np.ndarray, bq: np.ndarray):
    """Solve aq @ phi = eps * bq @ phi for an SPD/HPD bq.

    Returns all eigenvalues in ascending order and bq-orthonormal
    eigenvectors (phi^H @ bq @ phi == I).  Raises ReducedSolverError if the
    factorization or the tridiagonal iteration breaks down.
    """
    aq = np.asarray(aq)
    bq = np.asarray(bq)
    n = aq.shape[0]
    if aq.shape != bq.shape or aq.shape != (n, n):
        raise ValueError(f"shape mismatch: {aq.shape} vs {bq.shape}")
    if not (np.all(np.isfinite(aq)) and np.all(np.isfinite(bq))):
        raise ReducedSolverError("non-finite entries in the reduced matrices")
    if n == 1:
        b00 = bq[0, 0].real
        if b00 <= 0:
            raise ReducedSolverError("1x1 reduced B is not positive")
        eps = np.array([aq[0, 0].real / b00])
        phi = np.full((1, 1), 1.0 / np.sqrt(b00), dtype=aq.dtype)
        return eps, phi
    lower, fail = spd_factor(bq)
    if fail is not None:
        raise ReducedSolverError(f"reduced B not positive definite at pivot {fail}")
    # Standard form C = L^-1 A L^-H, then eigenvectors phi = L^-H y.
    c = _solve_lower(lower, aq)
    c = _solve_lower(lower, c.conj().T).conj().T
    c = 0.5 * (c + c.conj().T)
    eps, y = standard_eig(c)
    phi = _solve_lower_adjoint(lower, y)
    return eps, phi
