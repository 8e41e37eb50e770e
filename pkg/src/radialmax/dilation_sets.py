"""Dyadic discretizations of dilation sets ``E`` contained in ``[1, 2]``.

A :class:`DilationSet` of depth ``n`` is the list of dyadic cells
``[1 + j 2**-n, 1 + (j + 1) 2**-n)`` that meet the ideal set.  Cells are
half-open (the last one also holds the point 2), so every point of ``[1, 2]``
lies in exactly one cell and the ancestor of a cell at a coarser depth is the
coarse cell containing the same points.  Covering numbers at every scale
``2**-m`` with ``m <= n`` are therefore exact for the ideal set.

Each generator also records, per cell, the smallest and largest point of the
closure of the ideal set inside the cell.  These are used as the sample
dilations ``t`` by :mod:`radialmax.maximal_ops`; they nest under refinement,
so maximal values computed from them never decrease when the depth grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ._validation import (
    EmptyWindowError,
    ParameterError,
    RangeError,
    check_1d_int_array,
    check_int,
    check_real,
)

MAX_DEPTH = 30
GENERATORS = ("full_interval", "finite_points", "cantor", "convex_sequence", "assouad_regular")


@dataclass(frozen=True)
class AnalyticProfile:
    """Known dimensional data of the ideal set a generator discretizes.

    ``sup_delta_beta_N_finite`` records whether ``sup_delta delta**beta N(E, delta)``
    is finite.  ``log_weighted_finite`` is only meaningful when ``beta == 1``:
    it records whether ``sup_delta delta * log(1/delta)**s * N(E, delta)`` is finite
    for every ``s > 0`` (True) or for none (False).  ``None`` means unknown.
    """

    beta: float
    gamma: float
    sup_delta_beta_N_finite: Optional[bool] = None
    description: str = ""
    log_weighted_finite: Optional[bool] = None

    def __post_init__(self):
        check_real(self.beta, "beta", 0, 1)
        check_real(self.gamma, "gamma", 0, 1)
        if self.gamma < self.beta:
            raise ParameterError(f"gamma={self.gamma} must be >= beta={self.beta}")

    @property
    def closure_is_null(self):
        """Whether the closure of the set is Lebesgue-null (guaranteed when beta < 1)."""
        return self.beta < 1

    def to_dict(self):
        return {
            "beta": _num_to_json(self.beta),
            "gamma": _num_to_json(self.gamma),
            "sup_delta_beta_N_finite": self.sup_delta_beta_N_finite,
            "log_weighted_finite": self.log_weighted_finite,
            "description": self.description,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            beta=_num_from_json(data["beta"]),
            gamma=_num_from_json(data["gamma"]),
            sup_delta_beta_N_finite=data.get("sup_delta_beta_N_finite"),
            description=data.get("description", ""),
            log_weighted_finite=data.get("log_weighted_finite"),
        )


@dataclass(frozen=True)
class WindowSpec:
    """The dyadic window ``[1 + position 2**-level, 1 + (position + 1) 2**-level)``."""

    level: int
    position: int

    def __post_init__(self):
        check_int(self.level, "level", 0, MAX_DEPTH)
        check_int(self.position, "position", 0, (1 << self.level) - 1)

    @property
    def left(self):
        return 1.0 + self.position * 2.0 ** -self.level

    @property
    def length(self):
        return 2.0 ** -self.level


@dataclass(frozen=True)
class SetSpec:
    """JSON-serializable generator descriptor ``{"generator", "params", "depth"}``."""

    generator: str
    params: dict = field(default_factory=dict)
    depth: Optional[int] = None

    def to_dict(self):
        out = {"generator": self.generator, "params": {k: _num_to_json(v) for k, v in self.params.items()}}
        if self.depth is not None:
            out["depth"] = self.depth
        return out

    @classmethod
    def from_dict(cls, data):
        if "generator" not in data:
            raise ParameterError("set spec needs a 'generator' key")
        params = {k: _num_from_json(v) for k, v in dict(data.get("params", {})).items()}
        return cls(data["generator"], params, data.get("depth"))


@dataclass(frozen=True, eq=False)
class DilationSet:
    """A nonempty union of depth-``n`` dyadic cells of ``[1, 2]``.

    Parameters
    ----------
    depth : int
        Resolution ``n``; cells have length ``2**-n``.
    cells : array of int
        Strictly increasing cell indices in ``[0, 2**n)``.
    profile : AnalyticProfile, optional
        Dimensional metadata attached by the generator.
    cell_lo, cell_hi : array of float, optional
        Per cell, the smallest and largest point of the closure of the ideal set.
    points : array of float, optional
        The ideal set itself when it is finite.
    """

    depth: int
    cells: np.ndarray
    profile: Optional[AnalyticProfile] = None
    cell_lo: Optional[np.ndarray] = None
    cell_hi: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        depth = check_int(self.depth, "depth", 1, MAX_DEPTH)
        cells = check_1d_int_array(self.cells)
        if cells.size == 0:
            raise ParameterError("the empty dilation set is not allowed")
        if cells[0] < 0 or cells[-1] >= (1 << depth):
            raise RangeError(f"cell indices must lie in [0, 2**{depth})")
        if cells.size > 1 and np.any(np.diff(cells) <= 0):
            raise ParameterError("cells must be strictly increasing")
        cells = cells.copy()
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)
        for name in ("cell_lo", "cell_hi"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=np.float64)
                if arr.shape != cells.shape:
                    raise ParameterError(f"{name} must have one entry per cell")
                arr.flags.writeable = False
                object.__setattr__(self, name, arr)
        if (self.cell_lo is None) != (self.cell_hi is None):
            raise ParameterError("cell_lo and cell_hi come together")
        if self.points is not None:
            pts = np.unique(np.asarray(self.points, dtype=np.float64))
            pts.flags.writeable = False
            object.__setattr__(self, "points", pts)

    def __len__(self):
        return int(self.cells.size)

    def __eq__(self, other):
        if not isinstance(other, DilationSet):
            return NotImplemented
        return (
            self.depth == other.depth
            and np.array_equal(self.cells, other.cells)
            and self.profile == other.profile
            and _opt_equal(self.cell_lo, other.cell_lo)
            and _opt_equal(self.cell_hi, other.cell_hi)
            and _opt_equal(self.points, other.points)
        )

    __hash__ = None

    @property
    def cell_length(self):
        return 2.0 ** -self.depth

    def ancestors(self, m):
        return ancestors(self, m)

    def restrict(self, window):
        return restrict(self, window)

    def samples(self):
        """Sorted dilations ``t`` representing the set at its native depth.

        Exact points for finite sets, otherwise the per-cell extreme points of
        the ideal set when known, otherwise every cell's endpoints and center.
        """
        if self.points is not None:
            return self.points
        if self.cell_lo is not None:
            return np.unique(np.concatenate([self.cell_lo, self.cell_hi]))
        h = self.cell_length
        left = 1.0 + self.cells * h
        return np.unique(np.concatenate([left, left + 0.5 * h, left + h]))

    def to_dict(self):
        out = {
            "depth": self.depth,
            "cells": self.cells.tolist(),
            "profile": None if self.profile is None else self.profile.to_dict(),
        }
        if self.cell_lo is not None:
            out["cell_lo"] = self.cell_lo.tolist()
            out["cell_hi"] = self.cell_hi.tolist()
        if self.points is not None:
            out["points"] = self.points.tolist()
        return out

    @classmethod
    def from_dict(cls, data):
        profile = data.get("profile")
        return cls(
            depth=int(data["depth"]),
            cells=np.asarray(data["cells"], dtype=np.int64),
            profile=None if profile is None else AnalyticProfile.from_dict(profile),
            cell_lo=data.get("cell_lo"),
            cell_hi=data.get("cell_hi"),
            points=data.get("points"),
        )


def ancestors(E, m):
    """Sorted distinct depth-``m`` cells containing a cell of ``E``.

    The length of the result is the dyadic covering number ``N(E, 2**-m)``.
    """
    m = check_int(m, "m", 0, E.depth)
    return np.unique(E.cells >> (E.depth - m))


def restrict(E, window):
    """Cells of ``E`` inside the dyadic window ``J``; raises EmptyWindowError if none.

    The analytic profile is dropped because it describes ``E``, not ``E`` ∩ ``J``.
    """
    if window.level > E.depth:
        raise RangeError(f"window level {window.level} exceeds set depth {E.depth}")
    shift = E.depth - window.level
    lo = window.position << shift
    hi = (window.position + 1) << shift
    i0, i1 = np.searchsorted(E.cells, [lo, hi])
    if i0 == i1:
        raise EmptyWindowError(f"window (level {window.level}, position {window.position}) misses the set")
    kw = {}
    if E.cell_lo is not None:
        kw["cell_lo"] = E.cell_lo[i0:i1]
        kw["cell_hi"] = E.cell_hi[i0:i1]
    if E.points is not None:
        a, b = window.left, window.left + window.length
        pts = E.points[(E.points >= a) & ((E.points < b) | ((b == 2.0) & (E.points == 2.0)))]
        kw["points"] = pts
    return DilationSet(E.depth, E.cells[i0:i1], None, **kw)


def coarsen(E):
    """The same ideal set at depth ``n - 1``; per-cell extremes merge over the two children."""
    if E.depth <= 1:
        raise RangeError("cannot coarsen below depth 1")
    parents = E.cells >> 1
    starts = np.flatnonzero(np.r_[True, parents[1:] != parents[:-1]])
    kw = {}
    if E.cell_lo is not None:
        kw["cell_lo"] = np.minimum.reduceat(E.cell_lo, starts)
        kw["cell_hi"] = np.maximum.reduceat(E.cell_hi, starts)
    if E.points is not None:
        kw["points"] = E.points
    return DilationSet(E.depth - 1, parents[starts], E.profile, **kw)


def generate(spec, depth=None, **params):
    """Build the depth-``n`` discretization of a generator descriptor.

    ``spec`` is a :class:`SetSpec`, a mapping in the JSON set-spec schema, or a
    generator name with its parameters passed as keywords.

    Examples
    --------
    >>> generate("full_interval", 3).cells.tolist()
    [0, 1, 2, 3, 4, 5, 6, 7]
    >>> generate({"generator": "cantor", "params": {"base": 3, "digits": [0, 2]}}, 2).cells.tolist()
    [0, 1, 2, 3]
    """
    if isinstance(spec, str):
        spec = SetSpec(spec, dict(params), depth)
    elif isinstance(spec, dict):
        spec = SetSpec.from_dict(spec)
        if params:
            raise ParameterError("keyword parameters are only accepted with a generator name")
    elif not isinstance(spec, SetSpec):
        raise ParameterError(f"unsupported generator descriptor {spec!r}")
    depth = spec.depth if depth is None else depth
    if depth is None:
        raise ParameterError("depth is required")
    depth = check_int(depth, "depth", 1, MAX_DEPTH)
    try:
        builder = _BUILDERS[spec.generator]
    except KeyError:
        raise ParameterError(f"unknown generator {spec.generator!r}; expected one of {GENERATORS}") from None
    return builder(depth, **spec.params)


def full_interval(depth):
    depth = check_int(depth, "depth", 1, MAX_DEPTH)
    profile = AnalyticProfile(1, 1, True, "full interval [1,2]", log_weighted_finite=False)
    return DilationSet(depth, np.arange(1 << depth, dtype=np.int64), profile)


def finite_points(depth, points):
    depth = check_int(depth, "depth", 1, MAX_DEPTH)
    pts = np.asarray([float(check_real(p, "point", 1, 2)) for p in points], dtype=np.float64)
    if pts.size == 0:
        raise ParameterError("finite_points needs at least one point")
    cells = np.unique(_cell_of(pts - 1.0, depth))
    profile = AnalyticProfile(0, 0, True, f"{np.unique(pts).size} point(s)")
    return DilationSet(depth, cells, profile, points=pts)


def cantor(depth, base=3, digits=(0, 2)):
    """Discretize ``1 + C`` with ``C`` the base-``b`` Cantor set keeping ``digits``.

    Nodes of the digit tree are refined with exact integer arithmetic until the
    closed hull of the sub-Cantor set they carry spans at most two cells; the
    hull endpoints belong to the set, so both spanned cells are met.
    """
    depth = check_int(depth, "depth", 1, MAX_DEPTH)
    base = check_int(base, "base", 2, None, ParameterError)
    digits = sorted({check_int(d, "digit", 0, base - 1, ParameterError) for d in digits})
    if not digits:
        raise ParameterError("cantor needs at least one kept digit")
    dim = math.log(len(digits)) / math.log(base)
    description = f"cantor base {base} digits {digits}"
    if len(digits) == base:
        profile = AnalyticProfile(1, 1, True, description, log_weighted_finite=False)
        return DilationSet(depth, np.arange(1 << depth, dtype=np.int64), profile)
    profile = AnalyticProfile(dim, dim, True, description)

    n_cells = 1 << depth
    lo_d, hi_d = digits[0], digits[-1]
    # refine straddling nodes until they are 2**-40 cells wide
    max_level = math.ceil((depth + 40) / math.log2(base))
    lo_pts, hi_pts = {}, {}

    def record(cell, lo, hi):
        if cell in lo_pts:
            lo_pts[cell] = min(lo_pts[cell], lo)
            hi_pts[cell] = max(hi_pts[cell], hi)
        else:
            lo_pts[cell] = lo
            hi_pts[cell] = hi

    frontier = [0]
    level = 0
    while frontier:
        denom = (base - 1) * base**level
        nxt = []
        for a in frontier:
            pmin = a * (base - 1) + lo_d
            pmax = a * (base - 1) + hi_d
            cmin = min((pmin << depth) // denom, n_cells - 1)
            cmax = min((pmax << depth) // denom, n_cells - 1)
            if cmin == cmax:
                record(cmin, pmin / denom, pmax / denom)
            elif cmax == cmin + 1 and level >= max_level:
                boundary = cmax / n_cells
                record(cmin, pmin / denom, boundary)
                record(cmax, boundary, pmax / denom)
            else:
                nxt.extend(a * base + d for d in digits)
        frontier = nxt
        level += 1

    cells = np.array(sorted(lo_pts), dtype=np.int64)
    lo = 1.0 + np.array([lo_pts[c] for c in cells.tolist()])
    hi = 1.0 + np.array([hi_pts[c] for c in cells.tolist()])
    return DilationSet(depth, cells, profile, cell_lo=lo, cell_hi=hi)


def cantor_pieces(base, digits, level):
    """Numerators ``a`` of the level-``m`` pieces ``[a b**-m, (a + 1) b**-m]`` of the Cantor set."""
    pieces = [0]
    for _ in range(level):
        pieces = [a * base + d for a in pieces for d in sorted(set(digits))]
    return pieces


def convex_sequence(depth, beta):
    """Discretize ``{1 + n**(1 - 1/beta) : n >= 1}`` together with its limit point 1."""
    depth = check_int(depth, "depth", 1, MAX_DEPTH)
    beta = check_real(beta, "beta", 0, 1, lo_open=True, hi_open=True)
    cells, lo, hi = _convex_offsets(float(beta), depth)
    profile = AnalyticProfile(beta, 1, True, f"convex sequence beta={beta}")
    return DilationSet(depth, cells, profile, cell_lo=1.0 + lo, cell_hi=1.0 + hi)


def assouad_regular(depth, beta, gamma, growth=3):
    """A set whose window covering exponent is ``-min((1 - theta) gamma, beta)``.

    Built as the image of the convex sequence with exponent ``beta/gamma`` under
    the dyadic Moran map that places binary digits only at the levels ``i`` with
    ``floor(gamma i) > floor(gamma (i - 1))``.  ``growth`` is accepted for
    descriptor compatibility and does not change the construction.
    """
    depth = check_int(depth, "depth", 1, MAX_DEPTH)
    beta = check_real(beta, "beta", 0, 1, lo_open=True)
    gamma = check_real(gamma, "gamma", 0, 1, lo_open=True)
    if gamma < beta:
        raise ParameterError(f"assouad_regular needs beta <= gamma, got beta={beta}, gamma={gamma}")
    check_real(growth, "growth", 1, None, lo_open=True)
    levels = moran_levels(gamma, depth)
    n_digits = len(levels)
    ratio = _decimal_fraction(beta) / _decimal_fraction(gamma)
    if ratio == 1:
        s_cells = np.arange(1 << n_digits, dtype=np.int64)
        h = 2.0 ** -n_digits
        s_lo = s_cells * h
        s_hi = s_lo + h
    else:
        s_cells, s_lo, s_hi = _convex_offsets(float(ratio), n_digits)
    cells = np.zeros_like(s_cells)
    for j, lev in enumerate(levels):
        bit = (s_cells >> (n_digits - 1 - j)) & 1
        cells |= bit << (depth - lev)
    order = np.argsort(cells)
    all_levels = moran_levels(gamma, depth + int(80 / float(gamma)) + 2)
    lo = 1.0 + moran_map(s_lo[order], all_levels)
    hi = 1.0 + moran_map(s_hi[order], all_levels)
    profile = AnalyticProfile(
        beta, gamma, ratio == 1,
        f"assouad regular beta={beta} gamma={gamma}",
        log_weighted_finite=False if beta == 1 else None,
    )
    return DilationSet(depth, cells[order], profile, cell_lo=lo, cell_hi=hi)


def moran_levels(gamma, depth):
    """1-based levels ``i <= depth`` with ``floor(gamma i) > floor(gamma (i - 1))``."""
    g = _decimal_fraction(gamma)
    return [i for i in range(1, depth + 1) if math.floor(g * i) > math.floor(g * (i - 1))]


def moran_map(y, levels):
    """Send binary digit ``j`` of ``y`` in ``[0, 1]`` to level ``levels[j]``."""
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros_like(y)
    full = y >= 1.0
    frac = np.where(full, 0.0, y)
    for j, lev in enumerate(levels[:60]):
        scaled = np.ldexp(frac, j + 1)
        bit = np.floor(scaled) % 2
        out += bit * 2.0 ** -lev
    if np.any(full):
        out[full] = sum(2.0 ** -lev for lev in levels)
    return out


def _convex_offsets(beta, depth):
    """Cells and per-cell extreme offsets of ``{n**-a} ∪ {0}`` with ``a = 1/beta - 1``.

    Terms are enumerated until consecutive gaps drop below one cell; every cell
    between 0 and that term is then met, and its extreme terms follow from
    inverting ``x = n**-a``.
    """
    a = 1.0 / beta - 1.0
    h = 2.0 ** -depth
    n_cells = 1 << depth
    n_est = int(math.ceil((a / h) ** (1.0 / (a + 1.0)))) + 8
    n = np.arange(1, n_est + 1, dtype=np.float64)
    x = n ** -a
    small_gap = np.flatnonzero(x[:-1] - x[1:] < h)
    n_sparse = int(small_gap[0]) + 1 if small_gap.size else n_est
    xs = x[:n_sparse]
    sparse_cells = _cell_of(xs, depth)
    top = int(sparse_cells[-1])

    dense = np.arange(0, top + 1, dtype=np.int64)
    left = dense * h
    with np.errstate(divide="ignore"):
        n_lo = np.floor(left[1:] ** (-1.0 / a))
        n_hi = np.floor((left + h) ** (-1.0 / a)) + 1.0
    dense_lo = np.concatenate([[0.0], n_lo ** -a])
    dense_hi = n_hi ** -a
    dense_lo = np.clip(dense_lo, left, left + h)
    dense_hi = np.clip(dense_hi, left, left + h)

    cells = np.concatenate([dense, sparse_cells])
    lo = np.concatenate([dense_lo, xs])
    hi = np.concatenate([dense_hi, xs])
    order = np.lexsort((lo, cells))
    cells, lo, hi = cells[order], lo[order], hi[order]
    uniq, start = np.unique(cells, return_index=True)
    lo_out = np.minimum.reduceat(lo, start)
    hi_out = np.maximum.reduceat(hi, start)
    assert uniq[-1] < n_cells
    return uniq, lo_out, hi_out


def _decimal_fraction(x):
    # floats are read as the decimal they print as, so gamma=0.4 floors like 2/5
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _cell_of(offsets, depth):
    n_cells = 1 << depth
    return np.minimum(np.floor(np.ldexp(np.asarray(offsets, dtype=np.float64), depth)), n_cells - 1).astype(np.int64)


def _opt_equal(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


def _num_to_json(value):
    if isinstance(value, Fraction):
        return str(value) if value.denominator != 1 else value.numerator
    if isinstance(value, (list, tuple)):
        return [_num_to_json(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _num_from_json(value):
    if isinstance(value, str) and "/" in value:
        return Fraction(value)
    if isinstance(value, list):
        return [_num_from_json(v) for v in value]
    return value


_BUILDERS = {
    "full_interval": full_interval,
    "finite_points": finite_points,
    "cantor": cantor,
    "convex_sequence": convex_sequence,
    "assouad_regular": assouad_regular,
}
