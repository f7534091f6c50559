"""Banded drivers: LAPACK-style band storage, band LU with partial pivoting
(kl extra fill rows), band multiplies, and the feast_sb / feast_hb entry
points."""

from __future__ import annotations

import numpy as np

from ._driver import SingularMatrixError, SolverOptions, run_rci
from .kernel import HermitianRci, SymmetricRci
from .params import feastinit

_UPLOS = ("F", "L", "U")


def band_required_rows(kl: int, uplo: str) -> int:
    """Minimum leading dimension of the band storage for a given uplo."""
    return 2 * kl + 1 if uplo.upper() == "F" else kl + 1


def expand_band(ab: np.ndarray, kl: int, uplo: str, hermitian: bool) -> np.ndarray:
    """Normalize band storage to the full-band layout: a (2*kl+1, n) array
    whose row kl+s holds the s-th subdiagonal (s<0: superdiagonal), i.e.
    entry A[j+s, j] sits at [kl+s, j].  Unused corner slots are never read.
    """
    ab = np.asarray(ab)
    n = ab.shape[1]
    uplo = uplo.upper()
    fb = np.zeros((2 * kl + 1, n), dtype=ab.dtype)
    if uplo == "F":
        fb[kl, :] = ab[kl, :]
        for d in range(1, kl + 1):
            fb[kl - d, d:n] = ab[kl - d, d:n]
            fb[kl + d, : n - d] = ab[kl + d, : n - d]
    elif uplo == "L":
        fb[kl, :] = ab[0, :]
        for d in range(1, kl + 1):
            sub = ab[d, : n - d]
            fb[kl + d, : n - d] = sub
            fb[kl - d, d:n] = sub.conj() if hermitian else sub
    else:
        fb[kl, :] = ab[kl, :]
        for d in range(1, kl + 1):
            sup = ab[kl - d, d:n]
            fb[kl - d, d:n] = sup
            fb[kl + d, : n - d] = sup.conj() if hermitian else sup
    return fb


def band_matvec(fb: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Multiply a full-band matrix (expand_band layout) by a block."""
    n = fb.shape[1]
    kl = (fb.shape[0] - 1) // 2
    y = np.zeros((n,) + x.shape[1:], dtype=np.result_type(fb.dtype, x.dtype))
    for s in range(-kl, kl + 1):
        j0 = max(0, -s)
        j1 = min(n, n - s)
        if j1 <= j0:
            continue
        diag = fb[kl + s, j0:j1]
        if x.ndim == 1:
            y[j0 + s:j1 + s] += diag * x[j0:j1]
        else:
            y[j0 + s:j1 + s] += diag[:, np.newaxis] * x[j0:j1]
    return y


def band_lu_factor(fb: np.ndarray, kl: int):
    """LU with partial pivoting of a band matrix in expand_band layout.

    Pivoting fills up to kl extra superdiagonals; the working array carries
    2*kl superdiagonal rows in total.  Returns (ab, ipiv, kl).
    """
    n = fb.shape[1]
    ku = kl
    kv = kl + ku
    ab = np.zeros((2 * kl + ku + 1, n), dtype=np.result_type(fb.dtype, np.complex64))
    ab[kl:, :] = fb
    ipiv = np.arange(n)
    ju = 0
    for j in range(n):
        km = min(kl, n - 1 - j)
        jp = int(np.argmax(np.abs(ab[kv:kv + km + 1, j])))
        piv_val = ab[kv + jp, j]
        if piv_val == 0:
            raise SingularMatrixError(f"zero pivot at band column {j}")
        ipiv[j] = j + jp
        ju = max(ju, min(j + ku + jp, n - 1))
        if jp != 0:
            cols = np.arange(j, ju + 1)
            hi = kv + jp + j - cols
            lo = kv + j - cols
            tmp = ab[hi, cols].copy()
            ab[hi, cols] = ab[lo, cols]
            ab[lo, cols] = tmp
        if km > 0:
            ab[kv + 1:kv + 1 + km, j] /= ab[kv, j]
            lcol = ab[kv + 1:kv + 1 + km, j]
            for c in range(j + 1, ju + 1):
                ujc = ab[kv + j - c, c]
                if ujc != 0:
                    ab[kv + j - c + 1:kv + j - c + 1 + km, c] -= lcol * ujc
    return ab, ipiv, kl


def band_lu_solve(factor, b: np.ndarray, adjoint: bool = False) -> np.ndarray:
    """Solve A x = b (or A^H x = b) from a band_lu_factor result."""
    ab, ipiv, kl = factor
    n = ab.shape[1]
    kv = 2 * kl
    x = np.array(b, copy=True)
    if x.ndim == 1:
        x = x[:, np.newaxis]
        squeeze = True
    else:
        squeeze = False
    if not adjoint:
        if kl > 0:
            for j in range(n - 1):
                p = ipiv[j]
                if p != j:
                    x[[j, p]] = x[[p, j]]
                km = min(kl, n - 1 - j)
                if km:
                    x[j + 1:j + 1 + km] -= ab[kv + 1:kv + 1 + km, j][:, np.newaxis] * x[j]
        for j in range(n - 1, -1, -1):
            x[j] /= ab[kv, j]
            lm = min(kv, j)
            if lm:
                x[j - lm:j] -= ab[kv - lm:kv, j][:, np.newaxis] * x[j]
    else:
        # (LU)^H: forward through U^H, then L^H with interchanges in reverse.
        for j in range(n):
            lm = min(kv, j)
            if lm:
                x[j] -= ab[kv - lm:kv, j].conj() @ x[j - lm:j]
            x[j] /= ab[kv, j].conjugate()
        if kl > 0:
            for j in range(n - 2, -1, -1):
                km = min(kl, n - 1 - j)
                if km:
                    x[j] -= ab[kv + 1:kv + 1 + km, j].conj() @ x[j + 1:j + 1 + km]
                p = ipiv[j]
                if p != j:
                    x[[j, p]] = x[[p, j]]
    return x[:, 0] if squeeze else x


class _BandedOps:
    def __init__(self, fa, fb_mass, kl, cdtype):
        self.fa = fa          # full-band A at combined bandwidth
        self.fb = fb_mass     # full-band B or None (identity)
        self.kl = kl
        self.cdtype = cdtype

    def factorize(self, z):
        n = self.fa.shape[1]
        shifted = np.zeros((2 * self.kl + 1, n), dtype=self.cdtype)
        shifted -= self.fa
        if self.fb is None:
            shifted[self.kl, :] += z
        else:
            shifted += z * self.fb
        return band_lu_factor(shifted, self.kl)

    def solve(self, factor, rhs):
        return band_lu_solve(factor, rhs)

    def solve_adjoint(self, factor, rhs):
        return band_lu_solve(factor, rhs, adjoint=True)

    def multiply_a(self, x):
        return band_matvec(self.fa, x)

    def multiply_b(self, x):
        if self.fb is None:
            return x.copy()
        return band_matvec(self.fb, x)


def _pad_band(fb: np.ndarray, kl_from: int, kl_to: int) -> np.ndarray:
    if kl_from == kl_to:
        return fb
    n = fb.shape[1]
    out = np.zeros((2 * kl_to + 1, n), dtype=fb.dtype)
    out[kl_to - kl_from:kl_to + kl_from + 1, :] = fb
    return out


def _banded_driver(a, kla, b, klb, emin, emax, m0, uplo, fpm, options, x0, hermitian):
    options = options or SolverOptions()
    fpm = fpm if fpm is not None else feastinit()
    uplo = (uplo or "F").upper()
    a = np.asarray(a)
    n = a.shape[1] if a.ndim == 2 else 0

    kernel_cls = HermitianRci if hermitian else SymmetricRci
    extra = {"adjoint_capable": True} if hermitian else {}
    rdtype = np.float32 if a.dtype in (np.float32, np.complex64) else np.float64
    scalar = (np.complex64 if rdtype == np.float32 else np.complex128) if hermitian else rdtype
    t = ("C" if rdtype == np.float32 else "Z") if hermitian else ("S" if rdtype == np.float32 else "D")
    routine = f"{t}FEAST_{'HB' if hermitian else 'SB'}{'GV' if b is not None else 'EV'}"
    kernel = kernel_cls(n, m0, emin, emax, fpm, seed=options.seed,
                        block_size=options.block_size, dtype=scalar,
                        routine_name=routine, **extra)
    if uplo not in _UPLOS:
        kernel.abort(-101)
        return kernel.result
    if not 0 <= kla <= max(n - 1, 0):
        kernel.abort(-103)
        return kernel.result
    if a.ndim != 2 or a.shape[0] < band_required_rows(kla, uplo):
        kernel.abort(-105)
        return kernel.result
    if b is not None:
        b = np.asarray(b)
        if klb is None or not 0 <= klb <= max(n - 1, 0):
            kernel.abort(-106)
            return kernel.result
        if b.ndim != 2 or b.shape[1] != n or b.shape[0] < band_required_rows(klb, uplo):
            kernel.abort(-108)
            return kernel.result
    if kernel.done:
        return kernel.result

    cdtype = np.complex64 if rdtype == np.float32 else np.complex128
    kl = max(kla, klb if b is not None else 0)
    fa = _pad_band(expand_band(a, kla, uplo, hermitian).astype(scalar, copy=False), kla, kl)
    fb_mass = None
    if b is not None:
        fb_mass = _pad_band(expand_band(b, klb, uplo, hermitian).astype(scalar, copy=False), klb, kl)
    if fpm.slot(5) == 1:
        if x0 is None:
            raise ValueError("fpm(5)=1 requires an initial subspace x0")
        kernel.x[:, :] = np.asarray(x0)[:, :m0]
    ops = _BandedOps(fa, fb_mass, kl, cdtype)
    return run_rci(kernel, ops, options)


def feast_sb(a, kla, emin, emax, m0, *, uplo="F", b=None, klb=None,
             fpm=None, options=None, x0=None):
    """Real symmetric banded driver.

    ``a`` is band storage with ``kla`` sub/superdiagonals: 2*kla+1 rows for
    uplo='F' with the diagonal in row kla, or kla+1 rows holding the stored
    triangle for 'L'/'U'.  A generalized problem passes ``b``/``klb`` (the
    bandwidths may differ; the shifted matrix uses the wider one).
    """
    return _banded_driver(a, kla, b, klb, emin, emax, m0, uplo, fpm, options,
                          x0, hermitian=False)


def feast_hb(a, kla, emin, emax, m0, *, uplo="F", b=None, klb=None,
             fpm=None, options=None, x0=None):
    """Complex Hermitian banded driver; adjoint solves reuse the direct band
    factorization."""
    return _banded_driver(a, kla, b, klb, emin, emax, m0, uplo, fpm, options,
                          x0, hermitian=True)
