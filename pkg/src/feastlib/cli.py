"""Batch driver: load ``<prefix>.in`` / ``<prefix>.A`` (and ``<prefix>.B``
for generalized problems), run the matching solver, print the report.

Exit codes: 0 when the solver finishes with a success or warning code,
1 on a solver error code, 2 on missing or malformed input files.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from ._driver import SolverOptions
from .banded import feast_hb, feast_sb
from .dense import feast_he, feast_sy
from .io import ParseError, parse_config, parse_coordinate
from .kernel import DEFAULT_SEED
from .params import info_classification, info_description
from .sparse import feast_hcsr, feast_scsr


def _load(prefix: str):
    cfg_path = Path(prefix + ".in")
    a_path = Path(prefix + ".A")
    if not cfg_path.exists():
        raise FileNotFoundError(cfg_path)
    if not a_path.exists():
        raise FileNotFoundError(a_path)
    cfg = parse_config(cfg_path.read_text())
    a_coo = parse_coordinate(a_path.read_text(), complex_values=cfg.is_complex)
    b_coo = None
    if cfg.problem == "g":
        b_path = Path(prefix + ".B")
        if not b_path.exists():
            raise FileNotFoundError(b_path)
        b_coo = parse_coordinate(b_path.read_text(), complex_values=cfg.is_complex)
    return cfg, a_coo, b_coo


def _cast(values, cfg):
    if cfg.is_complex:
        return values.astype(np.complex64 if cfg.is_single else np.complex128)
    return values.astype(np.float32 if cfg.is_single else np.float64)


def _solve(cfg, a_coo, b_coo, fmt, options):
    a_csr = a_coo.to_csr(cfg.uplo)
    a_csr.values = _cast(a_csr.values, cfg)
    b_csr = None
    if b_coo is not None:
        b_csr = b_coo.to_csr(cfg.uplo)
        b_csr.values = _cast(b_csr.values, cfg)
    common = dict(fpm=cfg.fpm, options=options)
    if fmt == "sparse":
        fn = feast_hcsr if cfg.is_complex else feast_scsr
        return fn(a_csr, cfg.emin, cfg.emax, cfg.m0, b=b_csr, **common)
    if fmt == "dense":
        fn = feast_he if cfg.is_complex else feast_sy
        b_mat = None if b_csr is None else b_csr.to_dense()
        return fn(a_csr.to_dense(), cfg.emin, cfg.emax, cfg.m0, b=b_mat, **common)
    fn = feast_hb if cfg.is_complex else feast_sb
    ab, kla = a_csr.to_banded()
    kwargs = dict(common)
    if b_csr is not None:
        bb, klb = b_csr.to_banded()
        kwargs.update(b=bb, klb=klb)
    return fn(ab, kla, cfg.emin, cfg.emax, cfg.m0, **kwargs)


def _print_summary(result, cfg, elapsed):
    print(f"FEAST OUTPUT INFO {result.info}")
    print("*************************************************")
    print("************** REPORT ***************************")
    print("*************************************************")
    print(f"# Search interval [Emin,Emax] {cfg.emin:.15e} {cfg.emax:.15e}")
    print(f"# mode found/subspace {result.m} {result.m0}")
    print(f"# iterations {result.loop}")
    trace = float(np.sum(result.e[: result.m]))
    print(f"TRACE {trace:.15e}")
    print(f"Relative error on the Trace {result.epsout:.15e}")
    print("Eigenvalues/Residuals")
    for i in range(result.m):
        print(f"{i + 1} {result.e[i]:.15e} {result.res[i]:.15e}")
    print(f"Time (s) {elapsed:.3f}")


def run_driver(prefix: str, *, seed: int = DEFAULT_SEED, parallel_contour: int = 1,
               solver: str = "direct", iter_tol: float = 1.0e-3,
               fmt: str = "sparse") -> int:
    """Run one batch solve; returns the process exit code."""
    try:
        cfg, a_coo, b_coo = _load(prefix)
    except FileNotFoundError as exc:
        print(f"error: input file not found: {exc.args[0]}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    options = SolverOptions(seed=seed, parallel_contour=parallel_contour,
                            solver=solver, iter_tol=iter_tol)
    start = time.perf_counter()
    result = _solve(cfg, a_coo, b_coo, fmt, options)
    elapsed = time.perf_counter() - start
    kind = info_classification(result.info)
    if kind == "error":
        print(f"FEAST error {result.info}: {info_description(result.info)}",
              file=sys.stderr)
        return 1
    if kind == "warning":
        print(f"warning {result.info}: {info_description(result.info)}",
              file=sys.stderr)
    _print_summary(result, cfg, elapsed)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="feast-driver",
        description="Solve the eigenproblem described by <prefix>.in, "
                    "<prefix>.A and optionally <prefix>.B.")
    parser.add_argument("prefix", help="path prefix of the .in/.A/.B files")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help="seed of the deterministic start-vector stream")
    parser.add_argument("--parallel-contour", type=int, default=1, metavar="K",
                        help="workers for concurrent shift factorization")
    parser.add_argument("--solver", choices=("direct", "iterative"), default="direct",
                        help="inner linear solver (sparse format only)")
    parser.add_argument("--iter-tol", type=float, default=1.0e-3,
                        help="relative residual of the iterative inner solver")
    parser.add_argument("--format", choices=("dense", "banded", "sparse"),
                        default="sparse", dest="fmt",
                        help="backend used for the solve")
    args = parser.parse_args(argv)
    return run_driver(args.prefix, seed=args.seed,
                      parallel_contour=args.parallel_contour,
                      solver=args.solver, iter_tol=args.iter_tol, fmt=args.fmt)


if __name__ == "__main__":
    sys.exit(main())
