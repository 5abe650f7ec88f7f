"""Closed-form kernels, Gram matrices and positive-semidefiniteness certificates."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, EmptyGrid, NumericalBreakdown
from .measures import WeightedMeasure, exp_over_u, fbm_spectral_measure, stable_bernstein_measure
from .special import BernsteinFunction, v_h

DEFAULT_PSD_TOL = 1e-10


@dataclass(frozen=True)
class GeneratorFunction:
    """Even function ``r`` with ``r(0) = 0`` generating ``K_r(t,s) = r(t) + r(s) - r(t-s)``.

    ``kind`` is one of ``power`` (``c |t|**exponent``), ``log1p``
    (``c log(1 + |t|)``), ``bernstein`` (``int (1 - exp(-u|t|)) dm(u)``) or
    ``custom`` (a user callable).
    """

    kind: str
    exponent: float = 1.0
    c: float = 1.0
    measure: WeightedMeasure | None = None
    func: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("power", "log1p", "bernstein", "custom"):
            raise DomainError(f"unknown generator kind {self.kind!r}")
        if self.kind == "power" and not 0.0 < self.exponent <= 2.0:
            raise DomainError("power generators need 0 < exponent <= 2")
        if self.kind == "bernstein" and self.measure is None:
            raise DomainError("bernstein generator needs a measure")
        if self.kind == "custom" and self.func is None:
            raise DomainError("custom generator needs a callable")
        if not self.c > 0:
            raise DomainError("generator scale c must be positive")

    def __call__(self, t):
        a = np.abs(np.asarray(t, dtype=float))
        if self.kind == "power":
            out = self.c * a**self.exponent
        elif self.kind == "log1p":
            out = self.c * np.log1p(a)
        elif self.kind == "bernstein":
            out = BernsteinFunction(self.measure)(a)
        else:
            out = np.asarray(self.func(a), dtype=float)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def bernstein_measure(self) -> WeightedMeasure | None:
        """Measure ``m`` with ``r(t) = int (1 - exp(-u|t|)) dm(u)``, when one exists."""
        if self.kind == "bernstein":
            return self.measure
        if self.kind == "log1p":
            return exp_over_u().scaled(self.c)
        if self.kind == "power" and self.exponent < 1.0:
            return stable_bernstein_measure(self.exponent).scaled(self.c)
        if self.kind == "custom":
            return self.measure
        return None

    @property
    def spectral_measure(self) -> WeightedMeasure | None:
        """Half-line density of the even spectral measure, for power generators."""
        if self.kind == "power" and self.exponent < 2.0:
            H = 0.5 * self.exponent
            return fbm_spectral_measure(H).scaled(self.c / v_h(H))
        return None

    def to_json(self) -> dict:
        if self.kind == "power":
            return {"kind": "power", "exponent": self.exponent, "c": self.c}
        if self.kind == "log1p":
            return {"kind": "log1p", "c": self.c}
        if self.kind == "bernstein":
            return {"kind": "bernstein", "measure": self.measure.to_json()}
        raise DomainError("custom generators cannot be serialized")

    @classmethod
    def from_json(cls, obj) -> "GeneratorFunction":
        kind = obj.get("kind")
        if kind == "power":
            return cls("power", exponent=float(obj.get("exponent", 1.0)), c=float(obj.get("c", 1.0)))
        if kind == "log1p":
            return cls("log1p", c=float(obj.get("c", 1.0)))
        if kind == "bernstein":
            return cls("bernstein", measure=WeightedMeasure.from_json(obj["measure"]))
        raise DomainError(f"cannot deserialize generator kind {kind!r}")


def abs_generator(c: float = 1.0) -> GeneratorFunction:
    return GeneratorFunction("power", exponent=1.0, c=c)


def power_generator(exponent: float, c: float = 1.0) -> GeneratorFunction:
    return GeneratorFunction("power", exponent=exponent, c=c)


def log_generator(c: float = 1.0) -> GeneratorFunction:
    return GeneratorFunction("log1p", c=c)


def bernstein_generator(measure: WeightedMeasure) -> GeneratorFunction:
    return GeneratorFunction("bernstein", measure=measure)


VARIANTS = ("fbm", "bifbm", "krein", "bernstein", "log")


@dataclass(frozen=True)
class KernelSpec:
    """Tagged description of a kernel family.

    ``fbm``       ``|t|^2H + |s|^2H - |t-s|^2H``
    ``bifbm``     ``(|t|^2H + |s|^2H)^alpha - |t-s|^(2H alpha)``
    ``krein``     ``r(t) + r(s) - r(t-s)``
    ``bernstein`` ``phi(r(t) + r(s)) - phi(r(t-s))``
    ``log``       ``log(1+|t|) + log(1+|s|) - log(1+|t-s|)``
    """

    variant: str
    H: float | None = None
    alpha: float = 1.0
    r: GeneratorFunction | None = None
    phi: BernsteinFunction | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown kernel variant {self.variant!r}")
        if self.variant in ("fbm", "bifbm"):
            if self.H is None or not 0.0 < self.H < 1.0:
                raise DomainError("H must lie in (0, 1)")
        if self.variant == "bifbm" and not 0.0 < self.alpha <= 1.0:
            raise DomainError("alpha must lie in (0, 1]")
        if self.variant in ("krein", "bernstein") and self.r is None:
            raise DomainError(f"{self.variant} kernel needs a generator r")
        if self.variant == "bernstein" and self.phi is None:
            raise DomainError("bernstein kernel needs phi")
        if not self.scale > 0:
            raise DomainError("scale must be positive")

    def __call__(self, t, s):
        return eval_closed(self, t, s)

    def to_json(self) -> dict:
        d: dict = {"variant": self.variant}
        if self.variant in ("fbm", "bifbm"):
            d["H"] = self.H
        if self.variant == "bifbm":
            d["alpha"] = self.alpha
        if self.r is not None:
            d["r"] = self.r.to_json()
        if self.phi is not None:
            d["phi"] = self.phi.measure.to_json()
        if self.scale != 1.0:
            d["scale"] = self.scale
        return d

    @classmethod
    def from_json(cls, obj) -> "KernelSpec":
        if isinstance(obj, str):
            obj = json.loads(obj)
        v = obj.get("variant")
        scale = float(obj.get("scale", 1.0))
        if v == "fbm":
            return cls("fbm", H=float(obj["H"]), scale=scale)
        if v == "bifbm":
            return cls("bifbm", H=float(obj["H"]), alpha=float(obj.get("alpha", 1.0)), scale=scale)
        if v == "krein":
            return cls("krein", r=GeneratorFunction.from_json(obj["r"]), scale=scale)
        if v == "bernstein":
            phi = BernsteinFunction(WeightedMeasure.from_json(obj["phi"]))
            return cls("bernstein", r=GeneratorFunction.from_json(obj["r"]), phi=phi, scale=scale)
        if v == "log":
            return cls("log", scale=scale)
        raise DomainError(f"unknown kernel variant {v!r}")


def fbm(H: float, scale: float = 1.0) -> KernelSpec:
    return KernelSpec("fbm", H=H, scale=scale)


def bifbm(H: float, alpha: float, scale: float = 1.0) -> KernelSpec:
    return KernelSpec("bifbm", H=H, alpha=alpha, scale=scale)


def krein(r: GeneratorFunction, scale: float = 1.0) -> KernelSpec:
    return KernelSpec("krein", r=r, scale=scale)


def bernstein_composite(r: GeneratorFunction, phi: BernsteinFunction, scale: float = 1.0) -> KernelSpec:
    return KernelSpec("bernstein", r=r, phi=phi, scale=scale)


def log_kernel(scale: float = 1.0) -> KernelSpec:
    return KernelSpec("log", scale=scale)


def eval_closed(spec: KernelSpec, t, s):
    """Closed-form kernel value; broadcasts over numpy arrays."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    d = np.abs(t - s)
    at, as_ = np.abs(t), np.abs(s)
    v = spec.variant
    if v == "fbm":
        e = 2.0 * spec.H
        out = at**e + as_**e - d**e
    elif v == "bifbm":
        e = 2.0 * spec.H
        if spec.alpha == 1.0:
            out = at**e + as_**e - d**e
        else:
            # log space: |t|**e underflows long before |t|**(e*alpha) does,
            # and both terms must share one rounding path for K(0, s) = 0
            with np.errstate(divide="ignore"):
                lt, ls, ld = e * np.log(at), e * np.log(as_), e * np.log(d)
            out = np.exp(spec.alpha * np.logaddexp(lt, ls)) - np.exp(spec.alpha * ld)
    elif v == "krein":
        r = spec.r
        out = r(at) + r(as_) - r(d)
    elif v == "bernstein":
        r, phi = spec.r, spec.phi
        out = phi(np.asarray(r(at) + r(as_))) - phi(np.asarray(r(d)))
    else:
        out = np.log1p(at) + np.log1p(as_) - np.log1p(d)
    out = spec.scale * np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


# -- Gram matrices ---------------------------------------------------------------


@dataclass(frozen=True)
class GramMatrix:
    grid: np.ndarray
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.grid.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([repr(float(x)) for x in self.grid])
        for row in self.entries:
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {"grid": self.grid.tolist(), "entries": self.entries.tolist()}

    @classmethod
    def from_json(cls, obj) -> "GramMatrix":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(np.asarray(obj["grid"], dtype=float), np.asarray(obj["entries"], dtype=float))

    @classmethod
    def from_csv(cls, text: str) -> "GramMatrix":
        rows = list(csv.reader(io.StringIO(text)))
        return cls(np.array(rows[0], dtype=float), np.array(rows[1:], dtype=float))


def gram(spec: KernelSpec, grid) -> GramMatrix:
    """Kernel matrix on ``grid``; only the lower triangle is evaluated."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise EmptyGrid("grid must contain at least one point")
    if not np.all(np.isfinite(g)):
        raise DomainError("grid points must be finite")
    i, j = np.tril_indices(g.size)
    vals = np.asarray(eval_closed(spec, g[i], g[j]), dtype=float).reshape(-1)
    k = np.zeros((g.size, g.size))
    k[i, j] = vals
    k[j, i] = vals
    return GramMatrix(g, k)


def gram_from_function(func: Callable[[float, float], float], grid) -> GramMatrix:
    """Gram matrix of a scalar two-point function, lower triangle only."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise EmptyGrid("grid must contain at least one point")
    k = np.zeros((g.size, g.size))
    for a in range(g.size):
        for b in range(a + 1):
            k[a, b] = k[b, a] = func(float(g[a]), float(g[b]))
    return GramMatrix(g, k)


@dataclass(frozen=True)
class PsdCertificate:
    min_eigenvalue: float
    max_eigenvalue: float
    passed: bool
    tolerance_used: float

    def to_json(self) -> dict:
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "passed": self.passed,
            "tolerance_used": self.tolerance_used,
        }


def _charpoly_eigs(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix of order <= 3 from its characteristic polynomial."""
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0]])
    if n == 2:
        m = 0.5 * (a[0, 0] + a[1, 1])
        r = math.hypot(0.5 * (a[0, 0] - a[1, 1]), a[0, 1])
        return np.array([m - r, m + r])
    # trigonometric solution of the depressed cubic
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    q = np.trace(a) / 3.0
    if p1 == 0.0:
        return np.sort(np.diag(a))
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    p = math.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = np.clip(np.linalg.det(b) / 2.0, -1.0, 1.0)
    phi = math.acos(r) / 3.0
    e1 = q + 2.0 * p * math.cos(phi)
    e3 = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.sort([e1, e2, e3])


def psd_certificate(g: GramMatrix | np.ndarray, tol: float = DEFAULT_PSD_TOL) -> PsdCertificate:
    """Extreme eigenvalues and the pass/fail verdict ``min >= -tol * max(1, max)``."""
    a = g.entries if isinstance(g, GramMatrix) else np.asarray(g, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-13 * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)):
        raise DomainError("matrix is not symmetric")
    if not np.all(np.isfinite(a)):
        raise NumericalBreakdown("matrix has non-finite entries")
    try:
        eig = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown(f"symmetric eigensolver failed: {exc}") from exc
    lo, hi = float(eig[0]), float(eig[-1])
    if a.shape[0] <= 3:
        ref = _charpoly_eigs(a)
        # the cubic formula loses half the digits at a repeated root
        # (acos near +-1), so its agreement bound scales with sqrt(eps)
        rel = 1e-9 if a.shape[0] < 3 else 1e-9 + 16.0 * math.sqrt(np.finfo(float).eps)
        if np.max(np.abs(ref - eig)) > rel * max(1.0, abs(hi)):
            raise NumericalBreakdown("eigensolver disagrees with the characteristic polynomial")
    passed = lo >= -tol * max(1.0, hi)
    return PsdCertificate(lo, hi, bool(passed), tol)
