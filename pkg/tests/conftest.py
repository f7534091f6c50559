"""Shared helpers: random pencil generators and a scripted RCI caller that
answers kernel tasks with plain numpy linear algebra (independent of the
package's own backends)."""

from __future__ import annotations

import numpy as np
import pytest

from feastlib import RciTask


def random_symmetric(n, rng, scale=1.0):
    r = rng.normal(size=(n, n))
    return scale * (r + r.T) / 2.0


def random_hermitian(n, rng, scale=1.0):
    r = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (r + r.conj().T) / 2.0


def random_spd(n, rng, complex_=False):
    g = rng.normal(size=(n, n))
    if complex_:
        g = g + 1j * rng.normal(size=(n, n))
    return g @ g.conj().T + n * np.eye(n)


def gap_interval(evals, lo, hi):
    """Interval whose endpoints sit in the spectral gaps around
    evals[lo..hi] (inclusive indices into the sorted spectrum)."""
    evals = np.sort(evals)
    emin = evals[lo] - 1.0 if lo == 0 else 0.5 * (evals[lo - 1] + evals[lo])
    emax = evals[hi] + 1.0 if hi == len(evals) - 1 else 0.5 * (evals[hi] + evals[hi + 1])
    return float(emin), float(emax)


class ScriptedCaller:
    """Drives a kernel with numpy-based linear algebra and records the task
    trace.  ``adjoint_via_20``: answer SOLVE_ADJOINT from a separately
    factorized adjoint matrix (exercises FACTORIZE_ADJOINT)."""

    def __init__(self, kernel, a, b=None, multiply_b_zero=False):
        self.kernel = kernel
        self.a = np.asarray(a)
        self.b = None if b is None else np.asarray(b)
        self.trace = []
        self.fpm_ranges = []
        self.multiply_b_zero = multiply_b_zero

    def run(self):
        k = self.kernel
        n = self.a.shape[0]
        shifted = None
        shifted_adj = None
        task = k.step()
        while task != RciTask.DONE:
            self.trace.append(int(task))
            if task == RciTask.FACTORIZE:
                zb = k.ze * (np.eye(n) if self.b is None else self.b)
                shifted = zb - self.a
            elif task == RciTask.FACTORIZE_ADJOINT:
                zb = k.ze * (np.eye(n) if self.b is None else self.b)
                shifted_adj = (zb - self.a).conj().T
            elif task == RciTask.SOLVE:
                m0 = k.m0
                k.work2[:, :m0] = np.linalg.solve(shifted, k.work2[:, :m0])
            elif task == RciTask.SOLVE_ADJOINT:
                m0 = k.m0
                mat = shifted_adj if shifted_adj is not None else shifted.conj().T
                k.work2[:, :m0] = np.linalg.solve(mat, k.work2[:, :m0])
            elif task in (RciTask.MULTIPLY_A, RciTask.MULTIPLY_B):
                first, count = k.fpm.slot(24), k.fpm.slot(25)
                self.fpm_ranges.append((first, count, k.m0))
                s = k.multiply_columns
                if task == RciTask.MULTIPLY_A:
                    k.work1[:, s] = self.a @ k.x[:, s]
                elif self.multiply_b_zero:
                    k.work1[:, s] = 0.0
                elif self.b is None:
                    k.work1[:, s] = k.x[:, s]
                else:
                    k.work1[:, s] = self.b @ k.x[:, s]
            task = k.step()
        return k.result


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
