"""Contour-integration eigensolver for real symmetric and complex Hermitian
pencils: all eigenvalues in a search interval and their eigenvectors, via
quadrature-approximated spectral projection and subspace refinement.

Entry points:

* :func:`feastinit` and the predefined drivers :func:`feast_sy` /
  :func:`feast_he` (dense), :func:`feast_sb` / :func:`feast_hb` (banded),
  :func:`feast_scsr` / :func:`feast_hcsr` (CSR sparse);
* the format-agnostic engines :class:`SymmetricRci` / :class:`HermitianRci`
  for callers providing their own factorization/solve/multiply routines;
* the batch file driver in :mod:`feastlib.cli` (``feast-driver`` script).
"""

from ._driver import SingularMatrixError, SolverOptions
from .banded import feast_hb, feast_sb
from .dense import feast_he, feast_sy
from .kernel import (
    DEFAULT_SEED,
    EigenResult,
    HermitianRci,
    RciTask,
    SymmetricRci,
)
from .params import (
    FeastParams,
    check_problem,
    feastinit,
    info_classification,
    info_description,
    validate_params,
)
from .quadrature import Contour, QuadratureRule, build_contour, gauss_legendre
from .reduced import ReducedSolverError, generalized_eig, spd_factor
from .sparse import CsrMatrix, csr_matvec, feast_hcsr, feast_scsr

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEED",
    "Contour",
    "CsrMatrix",
    "EigenResult",
    "FeastParams",
    "HermitianRci",
    "QuadratureRule",
    "RciTask",
    "ReducedSolverError",
    "SingularMatrixError",
    "SolverOptions",
    "SymmetricRci",
    "build_contour",
    "check_problem",
    "csr_matvec",
    "feast_hb",
    "feast_hcsr",
    "feast_he",
    "feast_sb",
    "feast_scsr",
    "feast_sy",
    "feastinit",
    "gauss_legendre",
    "generalized_eig",
    "info_classification",
    "info_description",
    "spd_factor",
    "validate_params",
]
