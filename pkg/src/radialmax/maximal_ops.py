"""The restricted spherical maximal operator on radial functions.

``M_E f(r) = sup over t in E of |A_t f(r)|`` is evaluated over the sample
dilations of a :class:`~radialmax.dilation_sets.DilationSet`, which gives a
lower bound for the true supremum.  The module also evaluates the pieces of
the standard pointwise decomposition of ``M_E f``: a local part near ``r = t``
and two far parts, split into one-sided pieces in the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from ._validation import ParameterError, check_int, check_real
from .dilation_sets import coarsen, full_interval
from .quadrature import integrate, integrate_endpoint_singular
from .radial_averages import sphere_average

PIECES_HIGH = ("Mp", "R1", "R2")
PIECES_PLANE = ("Mp_minus", "Mp_plus", "R1_minus", "R1_plus", "R2_minus", "R2_plus")
SKIP_THRESHOLD = 1e-12


@dataclass(frozen=True)
class RadialGrid:
    """Nodes and weights for ``integral of F(r) r^(d-1) dr``."""

    nodes: np.ndarray
    weights: np.ndarray
    d: int = 2
    edges: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ParameterError("nodes and weights must be equal-length 1-d arrays")
        if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
            raise ParameterError("nodes must be positive and strictly increasing")
        if np.any(weights <= 0):
            raise ParameterError("weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_edges(cls, edges, d):
        """Midpoint nodes of consecutive edges with exact cell weights ``(b^d - a^d)/d``."""
        d = check_int(d, "d", 1)
        e = np.asarray(edges, dtype=np.float64)
        if e.ndim != 1 or e.size < 2 or e[0] < 0 or np.any(np.diff(e) <= 0):
            raise ParameterError("edges must be increasing, nonnegative, at least two")
        return cls(0.5 * (e[:-1] + e[1:]), (e[1:] ** d - e[:-1] ** d) / d, d, e)

    @classmethod
    def uniform(cls, lo, hi, n, d):
        """``n`` equal cells on ``[lo, hi]``; piecewise-constant functions with edges on the grid integrate exactly."""
        n = check_int(n, "n", 1)
        return cls.from_edges(np.linspace(float(lo), float(hi), n + 1), d)

    @classmethod
    def hybrid(cls, lo, hi, h, d, geometric_levels=0):
        """Uniform spacing ``h`` on ``[lo, hi]`` plus ``geometric_levels`` dyadic cells shrinking toward 0 below ``lo``."""
        n = max(1, int(round((hi - lo) / h)))
        edges = list(np.linspace(float(lo), float(hi), n + 1))
        for j in range(1, geometric_levels + 1):
            edges.insert(0, lo * 2.0**-j)
        return cls.from_edges(edges, d)

    def refined(self, factor=2):
        """Split every cell into ``factor`` equal parts (only for grids built from edges)."""
        if self.edges is None:
            raise ParameterError("only grids built from edges can be refined")
        edges = self.edges
        fine = [edges[0]]
        for a, b in zip(edges[:-1], edges[1:]):
            fine.extend(np.linspace(a, b, factor + 1)[1:])
        return RadialGrid.from_edges(fine, self.d)


def weighted_norm(values, grid, q):
    """``(sum of weights * |values|^q)^(1/q)``, the grid version of ``||F||`` in ``L^q(r^(d-1) dr)``.

    Examples
    --------
    >>> g = RadialGrid.uniform(1, 2, 10, 3)
    >>> round(weighted_norm(np.ones(10), g, 1), 12)
    2.333333333333
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.shape != grid.nodes.shape:
        raise ParameterError("values must have one entry per grid node")
    if q == math.inf:
        return float(np.max(np.abs(vals))) if vals.size else 0.0
    check_real(q, "q", 1)
    if not np.all(np.isfinite(vals)):
        raise ParameterError("values must be finite")
    return math.fsum((grid.weights * np.abs(vals) ** q).tolist()) ** (1.0 / q)


@dataclass(frozen=True)
class MaximalValue:
    """Lower bound for ``M_E f(r)`` with the maximizing dilation and the change from depth ``n - 1``."""

    value: float
    t_argmax: float
    refinement_delta: float
    n_samples: int


def _sup_abs_average(ts, f, d, r, tol):
    best, arg = 0.0, math.nan
    for t in ts:
        v = abs(sphere_average(f, d, r, float(t), tol).value)
        if v > best or math.isnan(arg):
            best, arg = v, float(t)
    return best, arg


def maximal_value(E, f, d, r, tol=1e-9, report=False):
    """Max of ``|A_t f(r)|`` over the sample dilations of ``E``.

    With ``report=True`` a :class:`MaximalValue` also carries the difference to
    the same evaluation one depth coarser.
    """
    check_int(d, "d", 2)
    ts = E.samples()
    value, arg = _sup_abs_average(ts, f, d, r, tol)
    if not report:
        return value
    delta = 0.0
    if E.depth > 1 and E.points is None:
        coarse, _ = _sup_abs_average(coarsen(E).samples(), f, d, r, tol)
        delta = value - coarse
    return MaximalValue(value, arg, delta, int(len(ts)))


@dataclass(frozen=True)
class PieceValues:
    """Per-node values of the decomposition operators."""

    nodes: np.ndarray
    values: Dict[str, np.ndarray] = field(default_factory=dict)

    def total(self):
        return sum(self.values.values())

    def __getitem__(self, name):
        return self.values[name]


def _interval_integral(f, lo, hi, tol, power=0):
    """``integral_lo^hi s^power f0(s) ds`` over the part of ``[lo, hi]`` meeting the support."""
    s_lo, s_hi = f.support
    lo2, hi2 = max(lo, s_lo), min(hi, s_hi)
    if hi2 <= lo2:
        return 0.0
    func = f if power == 0 else (lambda s: s**power * f(s))
    return integrate(func, lo2, hi2, tol, f.breakpoints).value


def _singular_integral(f, a, b, weight, tol):
    """``integral_a^b weight(s, s - a, b - s) f0(s) ds`` with square-root endpoint substitutions."""
    if b <= a:
        return 0.0
    lo, hi = f.support
    return integrate_endpoint_singular(
        lambda s, dl, dr: weight(s, dl, dr) * f(s), a, b, lo, hi, tol, f.breakpoints
    ).value


def _sup(vals):
    return max((abs(v) for v in vals), default=0.0)


def _pieces_at(E_t, full_t, f, d, p, r, tol):
    out = {}
    local = [t for t in E_t if r / 2 < t < 3 * r / 2]
    if d >= 3:
        # s^((d-1)/p' - 1) g(s) = s^(d-2) f0(s) with g = f0 s^((d-1)/p)
        out["Mp"] = _sup(
            r ** (1 - d) * _interval_integral(f, abs(r - t), r + t, tol, d - 2)
            for t in local
        )
        out["R1"] = _sup(_interval_integral(f, r - t, r + t, tol) / t for t in full_t if t <= r / 2)
        out["R2"] = _sup(_interval_integral(f, t - r, t + r, tol) / r for t in full_t if t >= 3 * r / 2)
        return out
    inv_p = 1.0 / p
    # g = f0 s^(1/p), so s^(1/2 - 1/p) g = s^(1/2) f0
    out["Mp_minus"] = _sup(
        _singular_integral(f, abs(r - t), r + t, lambda s, dl, dr: s ** (0.5 - inv_p) * s**inv_p / np.sqrt(dl), tol) / r
        for t in local
    )
    out["Mp_plus"] = _sup(
        _singular_integral(f, abs(r - t), r + t, lambda s, dl, dr: s ** (0.5 - inv_p) * s**inv_p / np.sqrt(dr), tol) / r
        for t in local
    )
    near = [t for t in E_t if t <= r / 2]
    far = [t for t in E_t if t >= 3 * r / 2]
    out["R1_minus"] = _sup(
        _singular_integral(f, r - t, r, lambda s, dl, dr: 1 / np.sqrt(dl), tol) / math.sqrt(t) for t in near
    )
    out["R1_plus"] = _sup(
        _singular_integral(f, r, r + t, lambda s, dl, dr: 1 / np.sqrt(dr), tol) / math.sqrt(t) for t in near
    )
    out["R2_minus"] = _sup(
        _singular_integral(f, t - r, t, lambda s, dl, dr: 1 / np.sqrt(dl), tol) / math.sqrt(r) for t in far
    )
    out["R2_plus"] = _sup(
        _singular_integral(f, t, t + r, lambda s, dl, dr: 1 / np.sqrt(dr), tol) / math.sqrt(r) for t in far
    )
    return out


def decomposition_pieces(E, f, d, p, r, tol=1e-10):
    """Evaluate the decomposition operators at the radii ``r`` (scalar, array or :class:`RadialGrid`).

    For ``d >= 3`` the pieces are ``Mp`` (sup over ``t`` in ``E`` with
    ``r/2 < t < 3r/2``) and ``R1``, ``R2`` (sups over ``t`` in ``[1, 2]`` with
    ``t <= r/2`` and ``t >= 3r/2``; ``[1, 2]`` is sampled at the depth of ``E``).
    For ``d = 2`` all six one-sided pieces take their sup over ``E``.
    """
    d = check_int(d, "d", 2)
    check_real(p, "p", 1, lo_open=True)
    if isinstance(r, RadialGrid):
        nodes = r.nodes
    else:
        nodes = np.atleast_1d(np.asarray(r, dtype=np.float64))
    if np.any(nodes <= 0):
        raise ParameterError("radii must be positive")
    names = PIECES_HIGH if d >= 3 else PIECES_PLANE
    if f.scale != 1.0:
        base = decomposition_pieces(E, f.unit(), d, p, nodes, tol / max(abs(f.scale), 1e-300))
        return PieceValues(nodes, {k: abs(f.scale) * v for k, v in base.values.items()})
    E_t = [float(t) for t in E.samples()]
    full_t = [float(t) for t in full_interval(E.depth).samples()] if d >= 3 else []
    rows = [_pieces_at(E_t, full_t, f, d, p, float(rr), tol) for rr in nodes]
    values = {name: np.array([row[name] for row in rows]) for name in names}
    return PieceValues(nodes, values)


@dataclass(frozen=True)
class DominationReport:
    """Ratios ``M_E f / (sum of pieces)`` over a radial grid."""

    max_ratio: float
    node_of_max: float
    nodes: np.ndarray
    maximal: np.ndarray
    pieces: PieceValues
    ratios: np.ndarray
    skipped: int

    def rows(self):
        names = list(self.pieces.values)
        out = []
        for i, r in enumerate(self.nodes):
            row = {"r": float(r), "maximal_value": float(self.maximal[i])}
            row.update({k: float(self.pieces.values[k][i]) for k in names})
            row["ratio"] = float(self.ratios[i])
            out.append(row)
        return out


def domination_check(E, f, d, p, grid, tol=1e-8):
    """Compare ``M_E f`` with the sum of its decomposition pieces at every grid node.

    Nodes where the piece sum is below ``1e-12`` are skipped and counted; the
    ratio there is reported as NaN.
    """
    nodes = grid.nodes if isinstance(grid, RadialGrid) else np.asarray(grid, dtype=np.float64)
    maximal = np.array([maximal_value(E, f, d, float(r), tol) for r in nodes])
    pieces = decomposition_pieces(E, f, d, p, nodes, tol)
    denom = pieces.total()
    ok = denom > SKIP_THRESHOLD
    ratios = np.full(nodes.shape, np.nan)
    ratios[ok] = maximal[ok] / denom[ok]
    if np.any(ok):
        i = int(np.nanargmax(ratios))
        max_ratio, node = float(ratios[i]), float(nodes[i])
    else:
        max_ratio, node = math.nan, math.nan
    return DominationReport(max_ratio, node, nodes, maximal, pieces, ratios, int((~ok).sum()))
