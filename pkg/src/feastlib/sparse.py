"""CSR drivers: UPLO-aware compressed sparse row storage, an internal
complex sparse direct solver (minimum-degree ordering, one symbolic analysis
per sparsity pattern, numeric refactorization per shift), a
diagonal-preconditioned BiCGStab alternative, and feast_scsr / feast_hcsr.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from ._driver import SingularMatrixError, SolverOptions, run_rci
from .kernel import HermitianRci, SymmetricRci
from .params import feastinit

_UPLOS = ("F", "L", "U")


@dataclass
class CsrMatrix:
    """Compressed sparse row matrix with 1-based index arrays.

    ``ia`` holds n+1 row offsets with ia[0] == 1; ``ja`` holds 1-based column
    indices, strictly increasing within each row.  ``uplo`` marks whether the
    stored entries are the full matrix or only its lower/upper triangle of a
    symmetric/Hermitian matrix.
    """

    n: int
    ia: np.ndarray
    ja: np.ndarray
    values: np.ndarray
    uplo: str = "F"

    def __post_init__(self):
        self.ia = np.asarray(self.ia, dtype=np.int64)
        self.ja = np.asarray(self.ja, dtype=np.int64)
        self.values = np.asarray(self.values)
        self.uplo = self.uplo.upper()
        n, ia, ja = self.n, self.ia, self.ja
        if self.uplo not in _UPLOS:
            raise ValueError(f"invalid uplo {self.uplo!r}")
        if ia.shape != (n + 1,) or ia[0] != 1:
            raise ValueError("ia must have n+1 entries starting at 1")
        if np.any(np.diff(ia) < 0):
            raise ValueError("ia must be non-decreasing")
        nnz = int(ia[-1]) - 1
        if ja.shape != (nnz,) or self.values.shape != (nnz,):
            raise ValueError("ja/values length must equal ia[n]-1")
        if nnz and (ja.min() < 1 or ja.max() > n):
            raise ValueError("column index out of range")
        rows = np.repeat(np.arange(n), np.diff(ia))
        inrow = rows[1:] == rows[:-1]
        if np.any(inrow & (np.diff(ja) <= 0)):
            raise ValueError("column indices must be strictly increasing per row")
        if self.uplo == "L" and np.any(ja - 1 > rows):
            raise ValueError("uplo='L' entry above the diagonal")
        if self.uplo == "U" and np.any(ja - 1 < rows):
            raise ValueError("uplo='U' entry below the diagonal")

    @property
    def nnz(self) -> int:
        return int(self.ia[-1]) - 1

    @classmethod
    def from_coo(cls, n, rows, cols, values, uplo="F") -> "CsrMatrix":
        """Build from 1-based coordinate triplets; duplicates are summed."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values)
        uplo = uplo.upper()
        if len(rows) and (rows.min() < 1 or rows.max() > n or cols.min() < 1 or cols.max() > n):
            raise ValueError("coordinate index out of range 1..n")
        if uplo == "L" and np.any(cols > rows):
            raise ValueError("uplo='L' triplet above the diagonal")
        if uplo == "U" and np.any(cols < rows):
            raise ValueError("uplo='U' triplet below the diagonal")
        keys = (rows - 1) * np.int64(n) + (cols - 1)
        uniq, inverse = np.unique(keys, return_inverse=True)
        data = np.zeros(len(uniq), dtype=values.dtype)
        np.add.at(data, inverse, values)
        urows = uniq // n
        ucols = uniq % n
        counts = np.zeros(n + 1, dtype=np.int64)
        counts[0] = 1
        np.add.at(counts, urows + 1, 1)
        return cls(n, np.cumsum(counts), ucols + 1, data, uplo)

    @classmethod
    def from_dense(cls, a, uplo="F", tol=0.0) -> "CsrMatrix":
        a = np.asarray(a)
        n = a.shape[0]
        mask = np.abs(a) > tol
        if uplo.upper() == "L":
            mask &= np.tril(np.ones_like(mask))
        elif uplo.upper() == "U":
            mask &= np.triu(np.ones_like(mask))
        rows, cols = np.nonzero(mask)
        return cls.from_coo(n, rows + 1, cols + 1, a[rows, cols], uplo)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return csr_matvec(self, x)

    def expand_full(self) -> "CsrMatrix":
        """Return the uplo='F' matrix this storage represents."""
        if self.uplo == "F":
            return self
        rows = np.repeat(np.arange(self.n), np.diff(self.ia)) + 1
        cols = self.ja
        off = rows != cols
        refl = self.values[off].conj() if np.iscomplexobj(self.values) else self.values[off]
        all_rows = np.concatenate([rows, cols[off]])
        all_cols = np.concatenate([cols, rows[off]])
        all_vals = np.concatenate([self.values, refl])
        return CsrMatrix.from_coo(self.n, all_rows, all_cols, all_vals, "F")

    def to_dense(self) -> np.ndarray:
        full = self.expand_full()
        out = np.zeros((self.n, self.n), dtype=full.values.dtype)
        rows = np.repeat(np.arange(self.n), np.diff(full.ia))
        out[rows, full.ja - 1] = full.values
        return out

    def to_banded(self):
        """Full-storage band array (uplo='F' layout) and its bandwidth."""
        full = self.expand_full()
        rows = np.repeat(np.arange(self.n), np.diff(full.ia))
        cols = full.ja - 1
        kl = int(np.abs(rows - cols).max()) if full.nnz else 0
        ab = np.zeros((2 * kl + 1, self.n), dtype=full.values.dtype)
        ab[kl + rows - cols, cols] = full.values
        return ab, kl


def csr_matvec(m: CsrMatrix, x: np.ndarray) -> np.ndarray:
    """Multiply by a CSR matrix, expanding uplo='L'/'U' storage implicitly
    (off-diagonal entries also applied transposed, conjugated when complex).
    """
    x = np.asarray(x)
    rows = np.repeat(np.arange(m.n), np.diff(m.ia))
    cols = m.ja - 1
    vals = m.values
    single = x.ndim == 1
    xb = x[:, np.newaxis] if single else x
    y = np.zeros((m.n, xb.shape[1]), dtype=np.result_type(vals.dtype, x.dtype))
    np.add.at(y, rows, vals[:, np.newaxis] * xb[cols])
    if m.uplo != "F":
        off = rows != cols
        refl = vals[off].conj() if np.iscomplexobj(vals) else vals[off]
        np.add.at(y, cols[off], refl[:, np.newaxis] * xb[rows[off]])
    return y[:, 0] if single else y


def _csr_block_matvec(indptr, indices, data, x):
    """Row-sorted CSR block multiply (0-based arrays, full pattern)."""
    n = len(indptr) - 1
    single = x.ndim == 1
    xb = x[:, np.newaxis] if single else x
    y = np.zeros((n, xb.shape[1]), dtype=np.result_type(data.dtype, x.dtype))
    if len(indices):
        contrib = data[:, np.newaxis] * xb[indices]
        nonempty = np.flatnonzero(np.diff(indptr) > 0)
        y[nonempty] = np.add.reduceat(contrib, indptr[nonempty], axis=0)
    return y[:, 0] if single else y


# --- internal sparse direct solver ------------------------------------------


def _minimum_degree_order(n, adj):
    """Greedy minimum-degree elimination order on a symmetric graph.

    ``adj`` is a list of vertex sets (no self loops); it is consumed.
    """
    heap = [(len(adj[v]), v) for v in range(n)]
    heapq.heapify(heap)
    eliminated = np.zeros(n, dtype=bool)
    perm = np.empty(n, dtype=np.int64)
    pos = 0
    while heap:
        d, v = heapq.heappop(heap)
        if eliminated[v] or d != len(adj[v]):
            continue
        eliminated[v] = True
        perm[pos] = v
        pos += 1
        nbrs = adj[v]
        for u in nbrs:
            s = adj[u]
            s.discard(v)
            s |= nbrs
            s.discard(u)
            s.discard(v)
            heapq.heappush(heap, (len(s), u))
        adj[v] = set()
    return perm


class _SparseSymbolic:
    """Pattern analysis of a symmetric-pattern matrix: fill-reducing order,
    L/U fill structure, and scatter maps from the stored data array into
    permuted columns.  Shared read-only across all shifts."""

    def __init__(self, n, indptr, indices):
        self.n = n
        adj = [set() for _ in range(n)]
        rows = np.repeat(np.arange(n), np.diff(indptr))
        for r, c in zip(rows.tolist(), indices.tolist()):
            if r != c:
                adj[r].add(c)
        self.perm = _minimum_degree_order(n, adj)
        self.iperm = np.empty(n, dtype=np.int64)
        self.iperm[self.perm] = np.arange(n)

        # Scatter maps for permuted column j.  The row pattern of perm[j]
        # lists that column's row indices (pattern symmetry), but the values
        # live at the transposed entries, so map each entry to its partner's
        # data position.
        keys = rows * np.int64(n) + indices
        tpos = np.searchsorted(keys, indices * np.int64(n) + rows)
        self.col_rows = []
        self.col_src = []
        for j in range(n):
            oj = int(self.perm[j])
            lo, hi = int(indptr[oj]), int(indptr[oj + 1])
            newrows = self.iperm[indices[lo:hi]]
            order = np.argsort(newrows)
            self.col_rows.append(newrows[order])
            self.col_src.append(tpos[lo:hi][order])

        # Symbolic fill: column patterns of L propagate to the parent column
        # (first below-diagonal nonzero).
        sets = [set(int(i) for i in self.col_rows[j] if i > j) for j in range(n)]
        self.lrows = []
        for j in range(n):
            s = sets[j]
            self.lrows.append(np.array(sorted(s), dtype=np.int64))
            if s:
                parent = min(s)
                sets[parent] |= s - {parent}
            sets[j] = None
        urows = [[] for _ in range(n)]
        for k in range(n):
            for i in self.lrows[k].tolist():
                urows[i].append(k)
        self.urows = [np.array(u, dtype=np.int64) for u in urows]


class _SparseFactor:
    """Numeric LU of one shifted matrix on a shared symbolic analysis."""

    def __init__(self, symbolic: _SparseSymbolic, data: np.ndarray):
        self.sym = symbolic
        n = symbolic.n
        w = np.zeros(n, dtype=data.dtype)
        diag = np.empty(n, dtype=data.dtype)
        lvals = []
        uvals = []
        lrows, urows = symbolic.lrows, symbolic.urows
        for j in range(n):
            w[symbolic.col_rows[j]] = data[symbolic.col_src[j]]
            uv = np.empty(len(urows[j]), dtype=data.dtype)
            for t, k in enumerate(urows[j].tolist()):
                ujk = w[k]
                uv[t] = ujk
                if ujk != 0:
                    w[lrows[k]] -= ujk * lvals[k]
            d = w[j]
            if d == 0 or not np.isfinite(d):
                raise SingularMatrixError(f"zero pivot at sparse column {j}")
            diag[j] = d
            lvals.append(w[lrows[j]] / d)
            uvals.append(uv)
            w[symbolic.col_rows[j]] = 0
            w[lrows[j]] = 0
            w[urows[j]] = 0
            w[j] = 0
        self.diag = diag
        self.lvals = lvals
        self.uvals = uvals

    def solve(self, b: np.ndarray, adjoint: bool = False) -> np.ndarray:
        sym = self.sym
        n = sym.n
        single = b.ndim == 1
        y = np.array(b[:, np.newaxis] if single else b, copy=True,
                     dtype=np.result_type(self.diag.dtype, b.dtype))
        y = y[sym.perm]
        lrows, urows = sym.lrows, sym.urows
        if not adjoint:
            for j in range(n):
                if lrows[j].size:
                    y[lrows[j]] -= self.lvals[j][:, np.newaxis] * y[j]
            for j in range(n - 1, -1, -1):
                y[j] /= self.diag[j]
                if urows[j].size:
                    y[urows[j]] -= self.uvals[j][:, np.newaxis] * y[j]
        else:
            for j in range(n):
                if urows[j].size:
                    y[j] -= self.uvals[j].conj() @ y[urows[j]]
                y[j] /= self.diag[j].conjugate()
            for j in range(n - 1, -1, -1):
                if lrows[j].size:
                    y[j] -= self.lvals[j].conj() @ y[lrows[j]]
        out = np.empty_like(y)
        out[sym.perm] = y
        return out[:, 0] if single else out


# --- shifted-system assembly -------------------------------------------------


class _ShiftedPattern:
    """Union sparsity pattern of the expanded A and B with aligned data
    vectors, so each shifted matrix is a single vectorized combination
    z * b_data - a_data."""

    def __init__(self, a_full: CsrMatrix, b_full: CsrMatrix | None):
        n = a_full.n
        ra = np.repeat(np.arange(n), np.diff(a_full.ia))
        ka = ra * np.int64(n) + (a_full.ja - 1)
        if b_full is None:
            kb = np.arange(n, dtype=np.int64) * np.int64(n) + np.arange(n)
            vb = np.ones(n, dtype=a_full.values.dtype)
        else:
            rb = np.repeat(np.arange(n), np.diff(b_full.ia))
            kb = rb * np.int64(n) + (b_full.ja - 1)
            vb = b_full.values
        keys = np.concatenate([ka, kb])
        uniq, inverse = np.unique(keys, return_inverse=True)
        self.n = n
        self.rows = (uniq // n).astype(np.int64)
        self.cols = (uniq % n).astype(np.int64)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, self.rows + 1, 1)
        self.indptr = np.cumsum(self.indptr)
        self.indices = self.cols
        cdtype = np.result_type(a_full.values.dtype, vb.dtype, np.complex64)
        self.a_data = np.zeros(len(uniq), dtype=cdtype)
        self.b_data = np.zeros(len(uniq), dtype=cdtype)
        self.a_data[inverse[: len(ka)]] = a_full.values
        self.b_data[inverse[len(ka):]] = vb

    def shifted_data(self, z: complex) -> np.ndarray:
        return z * self.b_data - self.a_data


# --- iterative inner solver ---------------------------------------------------


def _bicgstab(matvec, diag, b, tol, maxiter):
    """Diagonal-preconditioned BiCGStab for one right-hand side."""
    x = np.zeros_like(b)
    r = b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return x
    rhat = r.copy()
    rho = alpha = omega = 1.0 + 0j
    v = np.zeros_like(b)
    p = np.zeros_like(b)
    for _ in range(maxiter):
        rho1 = np.vdot(rhat, r)
        if rho1 == 0:
            raise SingularMatrixError("BiCGStab breakdown (rho = 0)")
        beta = (rho1 / rho) * (alpha / omega)
        p = r + beta * (p - omega * v)
        phat = p / diag
        v = matvec(phat)
        denom = np.vdot(rhat, v)
        if denom == 0:
            raise SingularMatrixError("BiCGStab breakdown (rhat.v = 0)")
        alpha = rho1 / denom
        s = r - alpha * v
        if np.linalg.norm(s) <= tol * bnorm:
            return x + alpha * phat
        shat = s / diag
        t = matvec(shat)
        tt = np.vdot(t, t)
        if tt == 0:
            raise SingularMatrixError("BiCGStab breakdown (t = 0)")
        omega = np.vdot(t, s) / tt
        x = x + alpha * phat + omega * shat
        r = s - omega * t
        if np.linalg.norm(r) <= tol * bnorm:
            return x
        rho = rho1
    raise SingularMatrixError(f"BiCGStab did not reach tol={tol} in {maxiter} iterations")


class _IterativeFactor:
    def __init__(self, pattern: _ShiftedPattern, z: complex, tol: float):
        self.pattern = pattern
        self.tol = tol
        self.data = pattern.shifted_data(z)
        # (z*B - A)^H equals conj(z)*B - A for Hermitian/symmetric A, B.
        self.data_adj = pattern.shifted_data(complex(z).conjugate())
        diag_mask = pattern.rows == pattern.cols
        diag = np.zeros(pattern.n, dtype=self.data.dtype)
        diag[pattern.rows[diag_mask]] = self.data[diag_mask]
        diag[diag == 0] = 1.0
        self.diag = diag
        diag_a = np.zeros(pattern.n, dtype=self.data.dtype)
        diag_a[pattern.rows[diag_mask]] = self.data_adj[diag_mask]
        diag_a[diag_a == 0] = 1.0
        self.diag_adj = diag_a

    def _solve_with(self, data, diag, rhs):
        p = self.pattern
        maxiter = max(8 * p.n, 200)
        out = np.empty_like(rhs)
        for k in range(rhs.shape[1]):
            out[:, k] = _bicgstab(
                lambda v: _csr_block_matvec(p.indptr, p.indices, data, v),
                diag, rhs[:, k].astype(data.dtype), self.tol, maxiter)
        return out

    def solve(self, rhs, adjoint=False):
        if adjoint:
            return self._solve_with(self.data_adj, self.diag_adj, rhs)
        return self._solve_with(self.data, self.diag, rhs)


# --- driver glue ---------------------------------------------------------------


class _SparseOps:
    def __init__(self, a_full, b_full, solver, iter_tol):
        self.pattern = _ShiftedPattern(a_full, b_full)
        self.solver = solver
        self.iter_tol = iter_tol
        self.symbolic = None
        if solver == "direct":
            self.symbolic = _SparseSymbolic(
                self.pattern.n, self.pattern.indptr, self.pattern.indices)
        self._a0 = (np.asarray(a_full.ia - 1), np.asarray(a_full.ja - 1), a_full.values)
        self._b0 = None if b_full is None else (
            np.asarray(b_full.ia - 1), np.asarray(b_full.ja - 1), b_full.values)

    def factorize(self, z):
        if self.solver == "direct":
            return _SparseFactor(self.symbolic, self.pattern.shifted_data(z))
        return _IterativeFactor(self.pattern, z, self.iter_tol)

    def solve(self, factor, rhs):
        return factor.solve(rhs)

    def solve_adjoint(self, factor, rhs):
        return factor.solve(rhs, adjoint=True)

    def multiply_a(self, x):
        ip, ind, dat = self._a0
        return _csr_block_matvec(ip, ind, dat, x)

    def multiply_b(self, x):
        if self._b0 is None:
            return x.copy()
        ip, ind, dat = self._b0
        return _csr_block_matvec(ip, ind, dat, x)


def _sparse_driver(a, b, emin, emax, m0, fpm, options, x0, hermitian):
    options = options or SolverOptions()
    fpm = fpm if fpm is not None else feastinit()
    if not isinstance(a, CsrMatrix):
        raise TypeError("a must be a CsrMatrix")
    if b is not None and not isinstance(b, CsrMatrix):
        raise TypeError("b must be a CsrMatrix")
    n = a.n

    kernel_cls = HermitianRci if hermitian else SymmetricRci
    extra = {"adjoint_capable": True} if hermitian else {}
    rdtype = np.float32 if a.values.dtype in (np.float32, np.complex64) else np.float64
    scalar = (np.complex64 if rdtype == np.float32 else np.complex128) if hermitian else rdtype
    t = ("C" if rdtype == np.float32 else "Z") if hermitian else ("S" if rdtype == np.float32 else "D")
    routine = f"{t}FEAST_{'HCSR' if hermitian else 'SCSR'}{'GV' if b is not None else 'EV'}"
    kernel = kernel_cls(n, m0, emin, emax, fpm, seed=options.seed,
                        block_size=options.block_size, dtype=scalar,
                        routine_name=routine, **extra)
    if b is not None and b.n != n:
        kernel.abort(-106)
        return kernel.result
    if kernel.done:
        return kernel.result

    a_full = a.expand_full()
    b_full = None if b is None else b.expand_full()
    if a_full.values.dtype != scalar:
        a_full = CsrMatrix(n, a_full.ia, a_full.ja, a_full.values.astype(scalar), "F")
    if b_full is not None and b_full.values.dtype != scalar:
        b_full = CsrMatrix(n, b_full.ia, b_full.ja, b_full.values.astype(scalar), "F")
    if fpm.slot(5) == 1:
        if x0 is None:
            raise ValueError("fpm(5)=1 requires an initial subspace x0")
        kernel.x[:, :] = np.asarray(x0)[:, :m0]
    ops = _SparseOps(a_full, b_full, options.solver, options.iter_tol)
    return run_rci(kernel, ops, options)


def feast_scsr(a, emin, emax, m0, *, b=None, fpm=None, options=None, x0=None):
    """Real symmetric CSR driver.

    ``a`` (and ``b`` for generalized problems) are CsrMatrix values; their
    sparsity patterns may differ; the shifted systems are factorized on the
    union pattern.  ``options.solver`` selects the internal direct LU or the
    diagonal-preconditioned BiCGStab inner solver.
    """
    return _sparse_driver(a, b, emin, emax, m0, fpm, options, x0, hermitian=False)


def feast_hcsr(a, emin, emax, m0, *, b=None, fpm=None, options=None, x0=None):
    """Complex Hermitian CSR driver; adjoint solves are served from the same
    factorization (the adjoint of a shifted matrix is the conjugate shift)."""
    return _sparse_driver(a, b, emin, emax, m0, fpm, options, x0, hermitian=True)
