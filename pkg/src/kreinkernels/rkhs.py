"""Discretized reproducing kernel Hilbert spaces of spectral Krein kernels.

An element ``f`` of ``L2(dm)`` for an even measure ``dm`` on the real line is
stored on a fixed :class:`NodeLayout` (composite Gauss-Legendre nodes on
``(0, u_max]``) together with an exact description of its tail beyond
``u_max`` as a finite sum ``sum_j c_j exp(i w_j u) / u``.  Products of such
tails are integrated against ``u**-2 dm(u)`` by quadrature once per
frequency, so spectral atoms, whose ``1/u`` decay would otherwise force an
enormous truncation point, are handled to full precision.

Values on the negative half-line default to ``f(-u) = -conj(f(u))``, the
symmetry under which the induced functions are real.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _quad
from .decompositions import spectral_kernel
from .errors import DomainError, ImaginaryLeak, MeasureMismatch, NonIntegrable
from .measures import WeightedMeasure, admissible

__all__ = [
    "chi_atom",
    "NodeLayout",
    "node_layout",
    "SpectralElement",
    "atom",
    "kernel_section",
    "from_function",
    "zero",
    "inner",
    "rkhs_norm",
    "induced_function",
    "atom_gram",
    "atom_gram_check",
    "sobolev_primitive",
    "sobolev_density",
]

IMAG_LEAK_BOUND = 1e-8
_GL_ORDER = 20
_GRADED_LEVELS = 12

Modes = tuple[tuple[complex, float], ...]


def chi_atom(s: float, u):
    """``(exp(i s u) - 1) / u`` with the limit ``i s`` at ``u = 0``."""
    u = np.asarray(u, dtype=float)
    x = s * u
    small = np.abs(x) < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        half = np.sin(0.5 * x)
        big = (-2.0 * half * half + 1j * np.sin(x)) / u
    # (e^{ix} - 1)/x = i - x/2 - i x^2/6 + x^3/24 + i x^4/120
    ser = s * (1j - x / 2.0 - 1j * x * x / 6.0 + x**3 / 24.0 + 1j * x**4 / 120.0)
    out = np.where(small, ser, big)
    return complex(out) if out.ndim == 0 else out


# -- node layout -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NodeLayout:
    """Quadrature nodes and weights (``w(u)`` included) on ``(0, u_max]``."""

    measure: WeightedMeasure
    nodes: np.ndarray
    weights: np.ndarray
    u_max: float
    frequency: float
    tail_tol: float = 1e-13
    _tail_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if np.any(np.diff(self.nodes) <= 0) or np.any(self.weights < 0):
            raise DomainError("nodes must increase strictly and weights be nonnegative")

    @property
    def size(self) -> int:
        return self.nodes.size

    def tail_integral(self, omega: float) -> complex:
        """``int_{u_max}^inf exp(i omega u) u**-2 dm(u)``."""
        omega = float(omega)
        key = round(omega, 14)
        if key in self._tail_cache:
            return self._tail_cache[key]
        m, U, tol = self.measure, self.u_max, self.tail_tol
        tail = m.tail_exponent
        b = None if tail is None else tail - 2.0
        if omega == 0.0:
            p = _quad.tail(lambda u: m.weight(u) / (u * u), U, b, tol, 1e-17)
            val = complex(p.value, 0.0)
            ok = p.converged
        else:
            w = abs(omega)
            pc = _quad.oscillatory_tail(lambda u: np.cos(w * u) * m.weight(u) / (u * u), U, w, tol, 1e-17)
            ps = _quad.oscillatory_tail(lambda u: np.sin(w * u) * m.weight(u) / (u * u), U, w, tol, 1e-17)
            val = complex(pc.value, math.copysign(1.0, omega) * ps.value)
            ok = pc.converged and ps.converged
        if not ok:
            raise NonIntegrable(f"tail integral at frequency {omega:g} did not converge")
        self._tail_cache[key] = val
        return val


def node_layout(
    measure: WeightedMeasure, frequency: float = 4.0, u_max: float = 40.0, order: int = _GL_ORDER
) -> NodeLayout:
    """Build the node set for ``measure``.

    ``[0, 1]`` is mapped by ``u = v**k`` (``k`` from the measure's exponent at
    0) and split into dyadically graded panels; ``[1, u_max]`` gets uniform
    panels.  No panel spans more than a quarter period of ``frequency``,
    which should bound the sum of the largest time arguments in use.
    """
    adm = admissible(measure, "spectral")
    if not adm:
        raise DomainError(adm.diagnostic)
    if not frequency > 0 or not u_max > 1.0:
        raise DomainError("frequency must be positive and u_max > 1")
    x, w = _quad.gauss_legendre(order)
    cap = 0.5 * math.pi / frequency
    k = _quad.substitution_power(measure.sing0)

    vb = [0.0] + [2.0**-j for j in range(_GRADED_LEVELS, 0, -1)] + [1.0]
    nodes, weights = [], []
    for a, b in zip(vb[:-1], vb[1:]):
        pieces = max(1, math.ceil((b**k - a**k) / cap))
        edges = np.linspace(a, b, pieces + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
            nodes.append(v**k)
            weights.append(0.5 * (hi - lo) * w * k * v ** (k - 1))
    pieces = max(math.ceil(u_max - 1.0), math.ceil((u_max - 1.0) / cap))
    edges = np.linspace(1.0, u_max, pieces + 1)
    c = 0.5 * (edges[:-1] + edges[1:])
    h = 0.5 * (edges[1:] - edges[:-1])
    nodes.append((c[:, None] + h[:, None] * x).ravel())
    weights.append((h[:, None] * w).ravel())
    u = np.concatenate(nodes)
    wt = np.concatenate(weights) * measure.weight(u)
    return NodeLayout(measure, u, wt, float(u_max), float(frequency))


# -- elements --------------------------------------------------------------------


def _merge(modes) -> Modes:
    acc: dict[float, complex] = {}
    for c, om in modes:
        acc[float(om)] = acc.get(float(om), 0.0) + complex(c)
    return tuple((c, om) for om, c in sorted(acc.items()) if c != 0)


def _mirror(modes: Modes) -> Modes:
    # f(-u) = -conj f(u):  c e^{i w u}/u  ->  -conj(c) e^{-i w u}/u
    return tuple((-complex(c).conjugate(), -om) for c, om in modes)


@dataclass(frozen=True, eq=False)
class SpectralElement:
    """Element of ``L2(dm)`` discretized on ``layout``.

    ``values`` are ``f(u_k)`` on the positive nodes and ``tail`` lists the
    ``(c, w)`` pairs of ``f(u) = sum c exp(i w u)/u`` for ``u > u_max``.
    ``neg_values``/``neg_tail`` describe ``u -> f(-u)``; when omitted the
    symmetric extension ``f(-u) = -conj(f(u))`` is used.  ``source`` keeps the
    generating callable, if any, for routines that need an independent
    discretization.
    """

    layout: NodeLayout
    values: np.ndarray
    tail: Modes = ()
    neg_values: np.ndarray | None = None
    neg_tail: Modes | None = None
    source: Callable | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.layout.nodes.shape:
            raise MeasureMismatch("values do not match the layout's node set")
        if not np.all(np.isfinite(v)):
            raise DomainError("element values must be finite")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tail", _merge(self.tail))
        if self.neg_values is not None:
            nv = np.asarray(self.neg_values, dtype=complex)
            if nv.shape != v.shape:
                raise MeasureMismatch("negative-side values do not match the node set")
            object.__setattr__(self, "neg_values", nv)
            object.__setattr__(self, "neg_tail", _merge(self.neg_tail or ()))

    @property
    def measure(self) -> WeightedMeasure:
        return self.layout.measure

    @property
    def nodes(self) -> np.ndarray:
        return self.layout.nodes

    @property
    def weights(self) -> np.ndarray:
        return self.layout.weights

    @property
    def symmetric(self) -> bool:
        return self.neg_values is None

    def sides(self):
        """``[(values, tail) for u > 0, (values, tail) for u -> f(-u)]``."""
        if self.symmetric:
            return [(self.values, self.tail), (-np.conj(self.values), _mirror(self.tail))]
        return [(self.values, self.tail), (self.neg_values, self.neg_tail)]

    def _check(self, other: "SpectralElement") -> None:
        if other.layout is not self.layout:
            raise MeasureMismatch("elements live on different node sets")

    def _combine(self, other: "SpectralElement", a: complex, b: complex) -> "SpectralElement":
        self._check(other)
        tail = tuple((a * c, om) for c, om in self.tail) + tuple((b * c, om) for c, om in other.tail)
        if self.symmetric and other.symmetric and a.imag == 0 and b.imag == 0:
            return SpectralElement(self.layout, a * self.values + b * other.values, tail)
        (p1, t1), (n1, s1) = self.sides()
        (p2, t2), (n2, s2) = other.sides()
        ntail = tuple((a * c, om) for c, om in s1) + tuple((b * c, om) for c, om in s2)
        return SpectralElement(self.layout, a * p1 + b * p2, tail, a * n1 + b * n2, ntail)

    def __add__(self, other):
        return self._combine(other, 1.0, 1.0)

    def __sub__(self, other):
        return self._combine(other, 1.0, -1.0)

    def __mul__(self, c):
        c = complex(c)
        if self.symmetric and c.imag == 0:
            return SpectralElement(self.layout, c * self.values, tuple((c * a, om) for a, om in self.tail))
        (p, t), (n, s) = self.sides()
        return SpectralElement(
            self.layout, c * p, tuple((c * a, om) for a, om in t), c * n, tuple((c * a, om) for a, om in s)
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def conj(self) -> "SpectralElement":
        """Pointwise complex conjugate (preserves the default symmetry)."""
        flip = lambda modes: tuple((complex(c).conjugate(), -om) for c, om in modes)  # noqa: E731
        if self.symmetric:
            return SpectralElement(self.layout, np.conj(self.values), flip(self.tail))
        return SpectralElement(
            self.layout, np.conj(self.values), flip(self.tail), np.conj(self.neg_values), flip(self.neg_tail)
        )

    # -- CSV ---------------------------------------------------------------------
    def to_csv(self) -> str:
        """Columns ``u, weight, re, im``; tail modes go in a leading comment line."""
        buf = io.StringIO()
        modes = [[c.real, c.imag, om] for c, om in self.tail]
        buf.write("# tail " + json.dumps(modes) + "\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["u", "weight", "re", "im"])
        for u, w, f in zip(self.nodes, self.weights, self.values):
            wr.writerow([repr(float(u)), repr(float(w)), repr(float(f.real)), repr(float(f.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, layout: NodeLayout) -> "SpectralElement":
        lines = text.splitlines()
        tail: list = []
        if lines and lines[0].startswith("# tail "):
            tail = [(complex(a, b), om) for a, b, om in json.loads(lines[0][7:])]
            lines = lines[1:]
        rows = list(csv.reader(lines))[1:]
        data = np.array(rows, dtype=float).reshape(-1, 4)
        if data.shape[0] != layout.size or not np.allclose(data[:, 0], layout.nodes, rtol=1e-15, atol=0):
            raise MeasureMismatch("CSV nodes differ from the layout's node set")
        return cls(layout, data[:, 2] + 1j * data[:, 3], tuple(tail))


def zero(layout: NodeLayout) -> SpectralElement:
    return SpectralElement(layout, np.zeros(layout.size, dtype=complex))


def atom(layout: NodeLayout, s: float) -> SpectralElement:
    """The spectral atom ``chi_s(u) = (exp(i s u) - 1)/u``."""
    s = float(s)
    return SpectralElement(layout, chi_atom(s, layout.nodes), ((1.0, s), (-1.0, 0.0)))


def kernel_section(layout: NodeLayout, s: float) -> SpectralElement:
    """``conj(chi_s)``, the element whose induced function is ``K(., s)``."""
    return atom(layout, s).conj()


def from_function(
    layout: NodeLayout,
    func: Callable[[np.ndarray], np.ndarray],
    tail: Sequence[tuple[complex, float]] = (),
    negative: Callable[[np.ndarray], np.ndarray] | None = None,
    negative_tail: Sequence[tuple[complex, float]] = (),
) -> SpectralElement:
    """Sample ``func`` on the layout.

    ``tail`` must describe ``func`` exactly beyond ``u_max`` (empty for
    functions that vanish there to working precision).  ``negative``, if
    given, is ``u -> f(-u)`` for ``u > 0``.
    """
    vals = np.asarray(func(layout.nodes), dtype=complex)
    if negative is None:
        return SpectralElement(layout, vals, tuple(tail), source=func)
    nvals = np.asarray(negative(layout.nodes), dtype=complex)
    return SpectralElement(layout, vals, tuple(tail), nvals, tuple(negative_tail), source=func)


# -- inner products --------------------------------------------------------------


def _side_integral(layout: NodeLayout, fv, ft: Modes, gv, gt: Modes) -> complex:
    body = complex(np.sum(layout.weights * fv * np.conj(gv)))
    tail = 0j
    for c, om in ft:
        for d, nu in gt:
            tail += c * complex(d).conjugate() * layout.tail_integral(om - nu)
    return body + tail


def inner(f: SpectralElement, g: SpectralElement) -> complex:
    """``int_R f conj(g) dm``."""
    f._check(g)
    return sum(
        (_side_integral(f.layout, fv, ft, gv, gt) for (fv, ft), (gv, gt) in zip(f.sides(), g.sides())),
        0j,
    )


def rkhs_norm(f: SpectralElement) -> float:
    """``||f||_{L2(dm)}``, which is the norm of the induced function."""
    return math.sqrt(max(inner(f, f).real, 0.0))


def induced_function(f: SpectralElement, t: float, *, with_imag: bool = False):
    """``F(t) = int_R chi_t(u) f(u) dm(u)``.

    The real part is returned; an imaginary part above ``1e-8 * max(1, |F|)``
    raises :class:`ImaginaryLeak`.  With ``with_imag`` the pair
    ``(re, im)`` is returned instead.
    """
    val = inner(f, kernel_section(f.layout, t))
    if abs(val.imag) > IMAG_LEAK_BOUND * max(1.0, abs(val.real)):
        raise ImaginaryLeak(f"imaginary part {val.imag:.3g} at t={t:g}")
    return (val.real, val.imag) if with_imag else val.real


def atom_gram(layout: NodeLayout, grid) -> np.ndarray:
    """``[<chi_t, chi_s>]`` over the grid, real part (lower triangle mirrored)."""
    g = [float(x) for x in np.asarray(grid, dtype=float).ravel()]
    atoms = [atom(layout, t) for t in g]
    out = np.zeros((len(g), len(g)))
    for i in range(len(g)):
        for j in range(i + 1):
            out[i, j] = out[j, i] = inner(atoms[i], atoms[j]).real
    return out


def atom_gram_check(
    measure: WeightedMeasure,
    grid,
    tol: float = 1e-10,
    kernel: Callable[[float, float], float] | None = None,
    layout: NodeLayout | None = None,
) -> float:
    """Largest ``|<chi_t, chi_s> - K(t, s)| / max(1, |K|)`` over the grid.

    ``kernel`` defaults to :func:`~kreinkernels.decompositions.spectral_kernel`
    for ``measure``, computed by adaptive quadrature independently of the
    node layout.
    """
    g = [float(x) for x in np.asarray(grid, dtype=float).ravel()]
    if not g:
        return 0.0
    if layout is None:
        span = max(abs(x) for x in g)
        layout = node_layout(measure, frequency=max(1.0, 2.0 * span))
    elif layout.measure is not measure:
        raise MeasureMismatch("layout was built for a different measure")
    if kernel is None:
        kernel = lambda t, s: spectral_kernel(measure, t, s, tol)  # noqa: E731
    a = atom_gram(layout, g)
    worst = 0.0
    for i, t in enumerate(g):
        for j, s in enumerate(g[: i + 1]):
            k = kernel(t, s)
            worst = max(worst, abs(a[i, j] - k) / max(1.0, abs(k)))
    return worst


# -- Sobolev special case ---------------------------------------------------------


def _require_lebesgue(f: SpectralElement) -> float:
    m = f.measure
    if m.family != "power_law" or m.p != 0.0:
        raise MeasureMismatch("the primitive form needs dm(u) = c du")
    if f.tail:
        raise DomainError("the primitive form needs an element vanishing beyond u_max")
    return m.scale


def sobolev_density(f: SpectralElement, s: float, tol: float = 1e-12) -> float:
    """``i c int_R exp(i s u) f(u) du``, the derivative of the induced function.

    Integrates ``f.source`` (or, failing that, the stored node values)
    adaptively over ``[-u_max, u_max]``.
    """
    c = _require_lebesgue(f)
    U = f.layout.u_max
    if f.source is None:
        val = _sobolev_density_nodes(f, s)
    else:
        pos = f.source
        if f.symmetric:
            neg = lambda u: -np.conj(np.asarray(pos(u), dtype=complex))  # noqa: E731
        else:
            raise DomainError("independent route needs the symmetric extension")
        width = math.pi / max(abs(s), 1.0) / 2.0

        def part(fn, sign):
            def re(u):
                return np.real(1j * np.exp(1j * sign * s * u) * fn(u))

            def im(u):
                return np.imag(1j * np.exp(1j * sign * s * u) * fn(u))

            return (
                _quad.adaptive(re, 0.0, U, tol, 1e-16, width).value,
                _quad.adaptive(im, 0.0, U, tol, 1e-16, width).value,
            )

        r1, i1 = part(lambda u: np.asarray(pos(u), dtype=complex), 1.0)
        r2, i2 = part(neg, -1.0)
        val = complex(r1 + r2, i1 + i2)
    return c * val.real


def _sobolev_density_nodes(f: SpectralElement, s: float) -> complex:
    (pv, _), (nv, _) = f.sides()
    u, w = f.nodes, f.weights / f.measure.scale
    return complex(np.sum(w * 1j * (np.exp(1j * s * u) * pv + np.exp(-1j * s * u) * nv)))


def sobolev_primitive(f: SpectralElement, t: float, tol: float = 1e-12) -> tuple[float, float]:
    """``(F(t), int_0^t f~(s) ds)`` for a Lebesgue-measure element.

    The first entry is :func:`induced_function`; the second integrates
    :func:`sobolev_density` over ``[0, t]`` by Gauss-Legendre, an independent
    discretization of the same quantity.
    """
    _require_lebesgue(f)
    t = float(t)
    direct = induced_function(f, t)
    if t == 0.0:
        return direct, 0.0
    x, w = _quad.gauss_legendre(_GL_ORDER)
    panels = max(1, math.ceil(abs(t) * f.layout.u_max / math.pi))
    edges = np.linspace(0.0, t, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        h = 0.5 * (b - a)
        for xi, wi in zip(x, w):
            total += h * wi * sobolev_density(f, 0.5 * (a + b) + h * xi, tol)
    return direct, total
