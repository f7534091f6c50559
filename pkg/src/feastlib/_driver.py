"""Shared task loop for the predefined drivers.

Each backend supplies an ops object (factorize / solve / solve_adjoint /
multiply_a / multiply_b) and this module pumps the reverse-communication
kernel to completion, caching factorizations per shift.  The optional
contour-parallel mode pre-factorizes all shifts concurrently; because every
solve and the accumulation order are unchanged, results are bit-identical to
the serial mode.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .kernel import RciTask
from .quadrature import build_contour, gauss_legendre


class SingularMatrixError(Exception):
    """Exactly singular pivot or inner-solver breakdown (maps to info -2)."""


@dataclass
class SolverOptions:
    """Driver-level knobs shared by all backends.

    seed: deterministic start-vector stream.
    parallel_contour: worker count for concurrent shift factorization.
    solver: 'direct' or 'iterative' (sparse backend only).
    iter_tol: relative residual target of the iterative inner solver.
    block_size: columns per multiply request (None = full subspace).
    """

    seed: int = 42
    parallel_contour: int = 1
    solver: str = "direct"
    iter_tol: float = 1.0e-3
    block_size: int | None = None


def run_rci(kernel, ops, options: SolverOptions | None = None):
    """Drive a kernel to completion against a backend ops object."""
    options = options or SolverOptions()
    factors = {}
    try:
        if options.parallel_contour > 1 and not kernel.done:
            contour = build_contour(
                gauss_legendre(kernel.fpm.slot(2)), kernel.emin, kernel.emax
            )
            with ThreadPoolExecutor(max_workers=options.parallel_contour) as pool:
                futures = {complex(z): pool.submit(ops.factorize, complex(z))
                           for z in contour.z}
                factors = {z: f.result() for z, f in futures.items()}
    except (SingularMatrixError, ArithmeticError):
        kernel.abort(-2)
        return kernel.result
    except MemoryError:
        kernel.abort(-1)
        return kernel.result

    current = None
    try:
        task = kernel.step()
        while task != RciTask.DONE:
            if task == RciTask.FACTORIZE:
                z = complex(kernel.ze)
                if z not in factors:
                    factors[z] = ops.factorize(z)
                current = factors[z]
            elif task == RciTask.FACTORIZE_ADJOINT:
                # Never requested: all predefined backends serve adjoint
                # solves from the direct factorization.
                raise AssertionError("unexpected FACTORIZE_ADJOINT from kernel")
            elif task == RciTask.SOLVE:
                m0 = kernel.m0
                kernel.work2[:, :m0] = ops.solve(current, kernel.work2[:, :m0])
            elif task == RciTask.SOLVE_ADJOINT:
                m0 = kernel.m0
                kernel.work2[:, :m0] = ops.solve_adjoint(current, kernel.work2[:, :m0])
            elif task == RciTask.MULTIPLY_A:
                s = kernel.multiply_columns
                kernel.work1[:, s] = ops.multiply_a(kernel.x[:, s])
            elif task == RciTask.MULTIPLY_B:
                s = kernel.multiply_columns
                kernel.work1[:, s] = ops.multiply_b(kernel.x[:, s])
            task = kernel.step()
    except (SingularMatrixError, ArithmeticError):
        kernel.abort(-2)
    except MemoryError:
        kernel.abort(-1)
    return kernel.result
