"""Zero-mean Gaussian path sampling from a kernel's Gram matrix.

Each path ``i`` draws its normals from its own Philox4x64 counter-based
stream keyed by ``seed * 2**64 + i``, so an ensemble is bit-reproducible and
any subset of paths can be regenerated independently of the others.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg.lapack import dpstrf

from .errors import DomainError, FactorizationFailed, InsufficientPaths
from .kernels import KernelSpec, gram, psd_certificate

__all__ = [
    "JITTER_LADDER",
    "Factorization",
    "factorize",
    "PathEnsemble",
    "sample_paths",
    "path_generator",
    "CovarianceCheck",
    "empirical_covariance",
]

JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)
PIVOT_FLOOR = 1e-14
RECONSTRUCTION_TOL = 1e-12
RNG_NAME = "Philox4x64"


@dataclass(frozen=True)
class Factorization:
    """``factor @ factor.T`` reproduces ``gram + jitter * trace/n * I``."""

    factor: np.ndarray
    jitter: float
    rank: int
    reconstruction_error: float


def _pivoted_cholesky(a: np.ndarray, floor: float) -> tuple[np.ndarray, int]:
    n = a.shape[0]
    c, piv, rank, info = dpstrf(a, tol=floor, lower=1)
    if info < 0:
        raise FactorizationFailed(f"pivoted Cholesky rejected argument {-info}")
    out = np.zeros((n, rank))
    out[piv - 1] = np.tril(c)[:, :rank]
    return out, int(rank)


def factorize(k: np.ndarray) -> Factorization:
    """Pivoted Cholesky factor of a PSD matrix, escalating jitter as needed.

    Pivots below ``1e-14 * trace`` end the factorization, leaving zero
    columns for structurally degenerate coordinates such as ``t = 0``.
    Jitter ``eps * trace/n`` is tried for ``eps`` in :data:`JITTER_LADDER`
    until the reconstruction error is below ``1e-12 * max(1, max|K|)``.
    """
    k = np.asarray(k, dtype=float)
    n = k.shape[0]
    if n == 0:
        return Factorization(np.zeros((0, 0)), 0.0, 0, 0.0)
    trace = float(np.trace(k))
    if trace == 0.0 and not np.any(k):
        return Factorization(np.zeros((n, 0)), 0.0, 0, 0.0)
    bound = RECONSTRUCTION_TOL * max(1.0, float(np.max(np.abs(k))))
    for eps in JITTER_LADDER:
        a = k + eps * trace / n * np.eye(n)
        try:
            factor, rank = _pivoted_cholesky(a, PIVOT_FLOOR * trace)
        except FactorizationFailed:
            continue
        err = float(np.max(np.abs(factor @ factor.T - a)))
        if err <= bound:
            return Factorization(factor, eps, rank, err)
    raise FactorizationFailed("reconstruction error stayed above tolerance through the jitter ladder")


def path_generator(seed: int, index: int) -> np.random.Generator:
    """The independent stream of path ``index``."""
    if seed < 0 or index < 0:
        raise DomainError("seed and path index must be nonnegative")
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + int(index)))


@dataclass(frozen=True)
class PathEnsemble:
    grid: np.ndarray
    paths: np.ndarray
    seed: int
    spec: KernelSpec | None
    jitter_used: float = 0.0
    reconstruction_error: float = 0.0
    factor: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_paths(self) -> int:
        return self.paths.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in self.paths:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def metadata(self) -> dict:
        return {
            "spec": None if self.spec is None else self.spec.to_json(),
            "grid": self.grid.tolist(),
            "seed": self.seed,
            "jitter_used": self.jitter_used,
            "n_paths": self.n_paths,
            "rng": RNG_NAME,
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), sort_keys=True)


def sample_paths(spec: KernelSpec, grid, n_paths: int, seed: int = 0) -> PathEnsemble:
    """Draw ``n_paths`` zero-mean Gaussian vectors with covariance ``gram(spec, grid)``."""
    if n_paths < 0:
        raise DomainError("n_paths must be >= 0")
    g = gram(spec, grid)
    cert = psd_certificate(g)
    if not cert.passed:
        raise FactorizationFailed(f"Gram matrix is not PSD (min eigenvalue {cert.min_eigenvalue:.3g})")
    fac = factorize(g.entries)
    rank = fac.rank
    z = np.empty((n_paths, rank))
    for i in range(n_paths):
        z[i] = path_generator(seed, i).standard_normal(rank)
    paths = z @ fac.factor.T if rank else np.zeros((n_paths, g.n))
    return PathEnsemble(g.grid, paths, int(seed), spec, fac.jitter, fac.reconstruction_error, fac.factor)


@dataclass(frozen=True)
class CovarianceCheck:
    covariance: np.ndarray
    standardized: np.ndarray | None
    max_standardized_deviation: float | None

    def to_json(self) -> dict:
        return {
            "covariance": self.covariance.tolist(),
            "max_standardized_deviation": self.max_standardized_deviation,
        }


def empirical_covariance(e: PathEnsemble) -> CovarianceCheck:
    """Sample covariance (denominator ``n - 1``) and its standardized deviation.

    The deviation of entry ``(i, j)`` is ``(C_ij - K_ij) / sqrt((K_ii K_jj + K_ij**2) / n)``;
    entries whose variance vanishes count as 0 when they match exactly and
    as infinite otherwise.
    """
    n = e.n_paths
    if n < 2:
        raise InsufficientPaths("at least two paths are needed")
    x = e.paths - e.paths.mean(axis=0)
    cov = x.T @ x / (n - 1)
    if e.spec is None:
        return CovarianceCheck(cov, None, None)
    k = gram(e.spec, e.grid).entries
    d = np.diag(k)
    var = (np.outer(d, d) + k * k) / n
    diff = cov - k
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(var > 0, diff / np.sqrt(var), np.where(diff == 0, 0.0, np.inf))
    return CovarianceCheck(cov, z, float(np.max(np.abs(z))))
