"""Exact geometry of the radial type-set regions in the ``(1/p, 1/q)`` square.

Exponent pairs are kept as :class:`fractions.Fraction` whenever the inputs are
rational (ints, Fractions or ``"a/b"`` strings); floating inputs fall back to
float arithmetic with tolerance ``1e-12``.

A region is ``{1/q <= 1/p, 1/(pd) <= 1/q, (1 - beta)/q + d - 1 >= d/p}``
(the triangle ``Delta_beta``), optionally intersected in ``d = 2`` with
``(1/q) nu_sharp(q/2 - 1) + 1/p - 1/q <= 1/2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from ._validation import CaseError, ModeError, ParameterError, as_exact, check_int

TOL = 1e-12
MODES = ("triangle", "closure_d2")


def _exact(*values):
    return all(isinstance(v, Fraction) for v in values)


def _num(value, name):
    v = as_exact(value)
    if isinstance(v, float) and not math.isfinite(v):
        raise ParameterError(f"{name} must be finite")
    return v


def _unit(value, name):
    v = _num(value, name)
    if not 0 <= v <= 1:
        raise ParameterError(f"{name}={value} must lie in [0, 1]")
    return v


@dataclass(frozen=True)
class ExponentPair:
    """A point ``(1/p, 1/q)`` of the unit square."""

    inv_p: object
    inv_q: object

    def __post_init__(self):
        object.__setattr__(self, "inv_p", _unit(self.inv_p, "inv_p"))
        object.__setattr__(self, "inv_q", _unit(self.inv_q, "inv_q"))

    @classmethod
    def from_pq(cls, p, q):
        """Build from exponents; ``math.inf`` maps to 0."""
        return cls(_inverse(p), _inverse(q))

    @property
    def p(self):
        return math.inf if self.inv_p == 0 else 1 / self.inv_p

    @property
    def q(self):
        return math.inf if self.inv_q == 0 else 1 / self.inv_q

    @property
    def is_exact(self):
        return _exact(self.inv_p, self.inv_q)

    def as_float(self):
        return float(self.inv_p), float(self.inv_q)

    def to_json(self):
        return [_num_json(self.inv_p), _num_json(self.inv_q)]

    def __iter__(self):
        yield self.inv_p
        yield self.inv_q


def _inverse(x):
    if x == math.inf:
        return Fraction(0)
    x = _num(x, "exponent")
    if x < 1:
        raise ParameterError(f"exponent {x} must be >= 1")
    return 1 / x


def _num_json(v):
    if isinstance(v, Fraction):
        return [v.numerator, v.denominator]
    return float(v)


class ClosedFormNuSharp:
    """``nu_sharp(alpha) = beta`` for ``alpha <= 0`` and ``max(alpha, (1 - beta/gamma) alpha + beta)`` above.

    This is the upper bound forced by the Minkowski and quasi-Assouad
    dimensions, attained by Assouad-regular sets and convex sequences.
    """

    def __init__(self, beta, gamma):
        self.beta = _unit(beta, "beta")
        self.gamma = _unit(gamma, "gamma")
        if self.gamma < self.beta:
            raise ParameterError("need beta <= gamma")
        self.asymptotic_slope = 1

    def __call__(self, alpha):
        if alpha <= 0:
            return self.beta
        if self.gamma == 0:
            return alpha
        return max(alpha, (1 - self.beta / self.gamma) * alpha + self.beta)

    def linear_pieces(self):
        """``(alpha_lo, alpha_hi, slope, intercept)`` pieces covering the real line."""
        if self.gamma == 0 or self.beta == 0:
            return [(-math.inf, 0, 0, self.beta), (0, math.inf, 1, 0)]
        return [
            (-math.inf, 0, 0, self.beta),
            (0, self.gamma, 1 - self.beta / self.gamma, self.beta),
            (self.gamma, math.inf, 1, 0),
        ]

    def __repr__(self):
        return f"ClosedFormNuSharp(beta={self.beta}, gamma={self.gamma})"


class LinearNuSharp:
    """``nu_sharp(alpha) = alpha``: the smallest value any set allows for ``alpha >= 0``."""

    asymptotic_slope = 1

    def __call__(self, alpha):
        return alpha

    def linear_pieces(self):
        return [(-math.inf, math.inf, 1, 0)]


class EstimatedNuSharp:
    """``nu_sharp`` read off a covering profile by the finite-scale estimator."""

    asymptotic_slope = None

    def __init__(self, profile, window=None):
        self.profile = profile
        self.window = window
        self._cache = {}

    def __call__(self, alpha):
        from .spectra import nu_sharp_estimate

        key = float(alpha)
        if key not in self._cache:
            self._cache[key] = nu_sharp_estimate(self.profile, key, self.window).slope
        return self._cache[key]


@dataclass(frozen=True)
class TypeRegion:
    """A predicted closed type set.

    ``mode="triangle"`` is ``Delta_beta`` and ignores ``nu_sharp``;
    ``mode="closure_d2"`` requires ``dimension == 2`` and a ``nu_sharp`` callable.
    """

    dimension: int
    beta: object
    nu_sharp: Optional[Callable] = None
    mode: str = "triangle"

    def __post_init__(self):
        check_int(self.dimension, "d", 2)
        object.__setattr__(self, "beta", _unit(self.beta, "beta"))
        if self.mode not in MODES:
            raise ModeError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.mode == "closure_d2":
            if self.dimension != 2:
                raise ModeError("closure_d2 mode requires d = 2")
            if self.nu_sharp is None:
                raise ModeError("closure_d2 mode requires a nu_sharp callable")

    @classmethod
    def for_dimensions(cls, d, beta, gamma=None):
        """Triangle for ``d >= 3``; for ``d = 2`` the closure built from the closed-form ``nu_sharp``."""
        if d == 2 and gamma is not None:
            return cls(2, beta, ClosedFormNuSharp(beta, gamma), "closure_d2")
        return cls(d, beta)

    def constraints(self, pt):
        return constraint_values(self, pt)

    def vertices(self):
        return triangle_vertices(self.dimension, self.beta)


def triangle_vertices(d, beta):
    """``P1, P2_beta, P3rad_beta`` of ``Delta_beta``.

    Examples
    --------
    >>> [tuple(map(str, v)) for v in triangle_vertices(3, 1)]
    [('0', '0'), ('2/3', '2/3'), ('2/3', '2/9')]
    """
    d = check_int(d, "d", 2)
    b = _unit(beta, "beta")
    p1 = ExponentPair(Fraction(0), Fraction(0))
    v2 = _div(d - 1, d - 1 + b)
    p2 = ExponentPair(v2, v2)
    den = d * d - 1 + b
    p3 = ExponentPair(_div(d * (d - 1), den), _div(d - 1, den))
    return p1, p2, p3


def quadrangle_vertices_general(d, beta, gamma):
    """``P1, P2_beta, P3_beta, P4_gamma`` of the non-radial quadrangle ``Q(beta, gamma)``."""
    d = check_int(d, "d", 2)
    b = _unit(beta, "beta")
    g = _unit(gamma, "gamma")
    if g < b:
        raise ParameterError("need beta <= gamma")
    p1, p2, _ = triangle_vertices(d, b)
    p3 = ExponentPair(_div(d - b, d - b + 1), _div(1, d - b + 1))
    den = d * d + 2 * g - 1
    p4 = ExponentPair(_div(d * (d - 1), den), _div(d - 1, den))
    return p1, p2, p3, p4


def quadrangle_vertices_radial(beta, gamma):
    """``P1, P2_beta, P4rad_gamma, P5rad_beta_gamma`` in ``d = 2``; needs ``2 gamma - beta > 1``."""
    b = _unit(beta, "beta")
    g = _unit(gamma, "gamma")
    if g < b:
        raise ParameterError("need beta <= gamma")
    excess = 2 * g - b - 1
    if excess <= (0 if _exact(excess) else TOL):
        raise CaseError(f"2*gamma - beta = {2 * g - b} <= 1: the closure is the full triangle")
    p1, p2, _ = triangle_vertices(2, b)
    p4 = ExponentPair(_div(1, 1 + g), _div(1, 2 * (1 + g)))
    r = b / g
    den = (1 - b) + 2 * (1 - r)
    p5 = ExponentPair(_div((1 - b) * (2 - r) + 2 * (1 - r), 2 * den), _div(1 - r, den))
    return p1, p2, p4, p5


def _div(a, b):
    if isinstance(a, int):
        a = Fraction(a)
    if isinstance(b, int):
        b = Fraction(b)
    return a / b


def _nu_term(nu, inv_q):
    """``inv_q * nu(1/(2 inv_q) - 1)``, with the ``inv_q -> 0`` limit ``asymptotic_slope / 2``."""
    if inv_q == 0:
        slope = getattr(nu, "asymptotic_slope", None)
        if slope is None:
            raise ModeError("this nu_sharp cannot evaluate q = infinity (no asymptotic slope)")
        return Fraction(slope) / 2 if isinstance(slope, int) else slope / 2
    alpha = 1 / (2 * inv_q) - 1
    return inv_q * nu(alpha)


def constraint_values(R, pt):
    """Signed constraint values; the point satisfies a constraint when its value is ``<= 0``."""
    x, y = pt.inv_p, pt.inv_q
    d = R.dimension
    vals = {
        "diagonal": y - x,
        "scaling": x / d - y,
        "beta_line": d * x - (1 - R.beta) * y - (d - 1),
    }
    if R.mode == "closure_d2":
        half = Fraction(1, 2)
        vals["nu_sharp"] = _nu_term(R.nu_sharp, y) + x - y - half
    return vals


def region_membership(R, pt, tol=TOL):
    """Classify ``pt`` as ``"interior"``, ``"boundary"`` or ``"exterior"`` of ``R``."""
    if R.mode == "closure_d2" and R.dimension != 2:
        raise ModeError("closure_d2 requires d = 2")
    vals = constraint_values(R, pt)
    worst = max(vals.values())
    if worst > tol:
        return "exterior"
    if worst >= -tol:
        return "boundary"
    return "interior"


def active_constraints(R, pt, tol=TOL):
    return sorted(name for name, v in constraint_values(R, pt).items() if abs(v) <= tol)


@dataclass(frozen=True)
class Boundary:
    """Closed polyline around a region: ``points[0] == points[-1] == P1``."""

    points: Tuple[ExponentPair, ...]
    active: Tuple[str, ...]
    vertices: Tuple[ExponentPair, ...]

    def as_array(self):
        return np.array([p.as_float() for p in self.points])


def closure_boundary(R, resolution=64):
    """Trace the boundary of ``R``: up the diagonal from ``P1`` to the top corner, back down the right side.

    On every horizontal line ``1/q = y`` the region is ``y <= 1/p <= U(y)``, where
    ``U`` is the minimum of the right-hand constraints solved for ``1/p``.  When
    ``nu_sharp`` is piecewise linear (it exposes ``linear_pieces``) all corners
    are computed exactly; otherwise ``U`` is sampled and corners are numeric.
    Consecutive points are at most ``1/resolution`` apart.
    """
    if check_int(resolution, "resolution", 1) < 8:
        raise ParameterError("resolution must be at least 8")
    pieces = _right_pieces(R)
    if pieces is not None:
        corners, labels = _exact_right_boundary(R, pieces)
    else:
        corners, labels = _sampled_right_boundary(R, resolution)
    # corners run from the top corner down to P1 along the right boundary
    top = corners[0]
    path = [ExponentPair(0, 0)]
    active = ["diagonal+scaling"]
    path_vertices = [path[0]]
    _append_segment(path, active, path[0], top, "diagonal", resolution)
    active[-1] = "diagonal+" + labels[0]
    path_vertices.append(top)
    for i in range(1, len(corners)):
        _append_segment(path, active, corners[i - 1], corners[i], labels[i - 1], resolution)
        active[-1] = labels[i - 1] + ("+" + labels[i] if labels[i] != labels[i - 1] else "")
        if pieces is not None:
            path_vertices.append(corners[i])
    if pieces is None:
        path_vertices.append(corners[-1])
    active[-1] = "diagonal+scaling"
    verts = _dedupe_vertices(path_vertices)
    return Boundary(tuple(path), tuple(active), tuple(verts))


def _dedupe_vertices(verts):
    out = []
    for v in verts:
        if not out or (v.inv_p, v.inv_q) != (out[-1].inv_p, out[-1].inv_q):
            out.append(v)
    if len(out) > 1 and (out[-1].inv_p, out[-1].inv_q) == (out[0].inv_p, out[0].inv_q):
        out.pop()
    return out


def _append_segment(path, active, a, b, label, resolution):
    ax, ay = a.inv_p, a.inv_q
    bx, by = b.inv_p, b.inv_q
    length = math.hypot(float(bx - ax), float(by - ay))
    steps = max(1, math.ceil(length * resolution * (1 + 1e-9)))
    for j in range(1, steps + 1):
        if j == steps:
            path.append(b)
        else:
            s = Fraction(j, steps) if _exact(ax, ay, bx, by) else j / steps
            path.append(ExponentPair(ax + s * (bx - ax), ay + s * (by - ay)))
        active.append(label)


def _right_pieces(R):
    """Right-side bounds ``1/p <= a + b y`` on ``y`` intervals, or None if not piecewise linear."""
    d = R.dimension
    beta = R.beta
    one = Fraction(1)
    lines = [
        ("scaling", Fraction(0), Fraction(0), Fraction(d), -math.inf, math.inf),
        ("beta_line", Fraction(0), _div(d - 1, d), (1 - beta) / d, -math.inf, math.inf),
    ]
    if R.mode == "closure_d2":
        nu = R.nu_sharp
        if not hasattr(nu, "linear_pieces"):
            return None
        half = Fraction(1, 2)
        for a_lo, a_hi, c1, c0 in nu.linear_pieces():
            # alpha = 1/(2y) - 1 decreases in y: alpha in [a_lo, a_hi] <=> y in [y(a_hi), y(a_lo)]
            y_lo = Fraction(0) if a_hi == math.inf else 1 / (2 * (one + a_hi))
            y_hi = math.inf if a_lo == -math.inf or a_lo <= -1 else 1 / (2 * (one + a_lo))
            # 1/p <= 1/2 + y - y (c1 alpha + c0) = (1 - c1)/2 + (1 + c1 - c0) y
            lines.append(("nu_sharp", Fraction(0), (1 - c1) * half, 1 + c1 - c0, y_lo, y_hi))
    return [(name, a, b, lo, hi) for name, _, a, b, lo, hi in lines]


def _u_at(pieces, y):
    best = None
    for name, a, b, lo, hi in pieces:
        if lo <= y <= hi:
            val = a + b * y
            if best is None or val < best[1]:
                best = (name, val)
    return best


def _exact_right_boundary(R, pieces):
    # breakpoints: piece ends and pairwise crossings, clipped to [0, 1]
    ys = {Fraction(0), Fraction(1)}
    for _, a, b, lo, hi in pieces:
        for e in (lo, hi):
            if e not in (math.inf, -math.inf) and 0 <= e <= 1:
                ys.add(e)
    for i, (_, a1, b1, lo1, hi1) in enumerate(pieces):
        for _, a2, b2, lo2, hi2 in pieces[i + 1 :]:
            if b1 != b2:
                y = (a2 - a1) / (b1 - b2)
                if 0 <= y <= 1:
                    ys.add(y)
        if b1 != 1:
            y = a1 / (1 - b1)  # crossing with the diagonal 1/p = y
            if 0 <= y <= 1:
                ys.add(y)
    ys = sorted(ys)
    # top corner: largest y with U(y) >= y
    feasible = [y for y in ys if _u_at(pieces, y)[1] >= y]
    y_top = max(feasible)
    ys = [y for y in ys if y <= y_top]
    corners, labels = [], []
    prev_label = None
    for idx in range(len(ys) - 1, -1, -1):
        y = ys[idx]
        name, x = _u_at(pieces, y)
        if idx > 0:
            mid = (ys[idx] + ys[idx - 1]) / 2
            seg_label = _u_at(pieces, mid)[0]
        else:
            seg_label = name
        pt = ExponentPair(x, y)
        slope_change = True
        if corners and idx > 0:
            # drop points where neither the constraint nor its slope changes
            slope_change = _is_corner(pieces, ys[idx + 1] if idx + 1 < len(ys) else None, y, ys[idx - 1])
        if not corners or slope_change or idx == 0:
            corners.append(pt)
            labels.append(seg_label)
        prev_label = seg_label
    del prev_label
    return corners, labels


def _is_corner(pieces, y_above, y, y_below):
    if y_above is None:
        return True
    up = _u_at(pieces, (y_above + y) / 2)
    down = _u_at(pieces, (y + y_below) / 2)
    x = _u_at(pieces, y)[1]
    s_up = (_u_at(pieces, y_above)[1] - x) / (y_above - y)
    s_down = (x - _u_at(pieces, y_below)[1]) / (y - y_below)
    del up, down
    return s_up != s_down


def _sampled_right_boundary(R, resolution):
    def u(y):
        vals = constraint_values(R, ExponentPair(0, y))
        # every right-hand constraint is increasing in 1/p with unit or d slope
        d = R.dimension
        cand = [("scaling", d * y), ("beta_line", ((d - 1) + (1 - float(R.beta)) * y) / d)]
        cand.append(("nu_sharp", -vals["nu_sharp"]))
        return min(cand, key=lambda c: c[1])

    lo, hi = 0.0, 1.0
    if u(hi)[1] >= hi:
        y_top = hi
    else:
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if u(mid)[1] >= mid:
                lo = mid
            else:
                hi = mid
        y_top = lo
    n = max(8, 4 * resolution)
    ys = np.linspace(y_top, 0.0, n + 1)
    corners = [ExponentPair(min(1.0, max(0.0, u(float(y))[1])), float(y)) for y in ys]
    corners[0] = ExponentPair(y_top, y_top)
    corners[-1] = ExponentPair(0.0, 0.0)
    labels = [u(float(y))[0] for y in ys]
    return corners, labels


def point_segment_distance(pt, a, b):
    p = np.array(pt, dtype=float)
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    s = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + s * ab)))


def distance_to_boundary(boundary, pt):
    pts = boundary.as_array()
    p = pt.as_float() if isinstance(pt, ExponentPair) else pt
    return min(point_segment_distance(p, pts[i], pts[i + 1]) for i in range(len(pts) - 1))


@dataclass(frozen=True)
class Verdict:
    status: str
    case: str


IN_T, NOT_IN_T, UNRESOLVED = "in_T", "not_in_T", "unresolved"


def _same(a, b):
    if _exact(a, b):
        return a == b
    return abs(float(a) - float(b)) <= TOL


def _cmp_one(value):
    """Sign of ``value - 1`` with float tolerance."""
    diff = value - 1
    if not isinstance(diff, Fraction) and abs(diff) <= TOL:
        return 0
    return (diff > 0) - (diff < 0)


def endpoint_classify(profile, d, pt):
    """Decide whether ``pt`` lies in the radial type set using the endpoint case table.

    The profile supplies ``beta``, ``gamma`` (the Assouad dimension in ``d = 2``)
    and the finiteness flags.  Open cases come back ``unresolved`` with the
    reason; missing flags also give ``unresolved``.
    """
    d = check_int(d, "d", 2)
    beta = as_exact(profile.beta) if not isinstance(profile.beta, float) else profile.beta
    gamma = as_exact(profile.gamma) if not isinstance(profile.gamma, float) else profile.gamma
    tri = TypeRegion(d, beta)
    where = region_membership(tri, pt)
    if where == "exterior":
        return Verdict(NOT_IN_T, "outside Delta_beta: necessary conditions (p <= q, scaling, Minkowski line) fail")
    on_beta_line = abs(constraint_values(tri, pt)["beta_line"]) <= TOL
    sup_finite = profile.sup_delta_beta_N_finite
    beta_is_one = _cmp_one(beta) == 0
    if d >= 3:
        return _classify_high(tri, pt, where, on_beta_line, beta_is_one, profile, d)
    return _classify_plane(tri, pt, where, on_beta_line, beta_is_one, beta, gamma, sup_finite, profile)


def _classify_high(tri, pt, where, on_beta_line, beta_is_one, profile, d):
    if beta_is_one:
        edge = Fraction(d - 1, d) if pt.is_exact else (d - 1) / d
        if not _same(pt.inv_p, edge):
            return Verdict(IN_T, "d>=3, beta=1, 1/p < (d-1)/d")
        flag = profile.log_weighted_finite
        if flag is None:
            return Verdict(UNRESOLVED, "d>=3, beta=1 endpoint: log-weighted covering flag unknown")
        if flag:
            return Verdict(IN_T, "d>=3, beta=1 endpoint with sup delta log(1/delta)^(q/d) N < inf")
        return Verdict(NOT_IN_T, "d>=3, beta=1 endpoint with sup delta log(1/delta)^(q/d) N = inf")
    flag = profile.sup_delta_beta_N_finite
    if flag is None:
        if on_beta_line:
            return Verdict(UNRESOLVED, "d>=3 segment [P2, P3rad]: sup delta^beta N flag unknown")
        return Verdict(IN_T, "d>=3, off the segment [P2, P3rad]")
    if flag:
        return Verdict(IN_T, "d>=3, beta<1, sup delta^beta N < inf: T = Delta_beta")
    if on_beta_line:
        return Verdict(NOT_IN_T, "d>=3, beta<1, sup delta^beta N = inf: segment [P2, P3rad] removed")
    return Verdict(IN_T, "d>=3, beta<1, sup delta^beta N = inf, off the segment")


def _on_diagonal_below_p2(pt, tri):
    p2 = tri.vertices()[1]
    return _same(pt.inv_p, pt.inv_q) and not _same(pt.inv_p, p2.inv_p)


def _classify_plane(tri, pt, where, on_beta_line, beta_is_one, beta, gamma, sup_finite, profile):
    p3 = tri.vertices()[2]
    if beta_is_one:
        flag = profile.log_weighted_finite
        if flag is False:
            x, y = pt.inv_p, pt.inv_q
            ok = x < Fraction(1, 2) and y <= x and 2 * y >= x
            if ok:
                return Verdict(IN_T, "d=2, beta=1, sup delta log(1/delta) N = inf: p > 2, p <= q <= 2p")
            return Verdict(NOT_IN_T, "d=2, beta=1, sup delta log(1/delta) N = inf: needs p > 2, p <= q <= 2p")
        if where == "interior" or _on_diagonal_below_p2(pt, tri):
            return Verdict(IN_T, "d=2, beta=1: interior of the closure Delta_1 or segment [P1, P2)")
        return Verdict(UNRESOLVED, "d=2, beta=1 boundary point with log-weighted covering flag not infinite")
    excess = _cmp_one(2 * gamma - beta)
    if excess < 0:
        if sup_finite is None:
            if where == "interior" or _on_diagonal_below_p2(pt, tri):
                return Verdict(IN_T, "d=2, 2gamma-beta<1: interior of Delta_beta or [P1, P2)")
            return Verdict(UNRESOLVED, "d=2, 2gamma-beta<1 boundary point: sup delta^beta N flag unknown")
        if sup_finite:
            return Verdict(IN_T, "d=2, 2gamma-beta<1, sup delta^beta N < inf: T = Delta_beta")
        if on_beta_line:
            return Verdict(NOT_IN_T, "d=2, sup delta^beta N = inf on the Minkowski line")
        if where == "interior" or _on_diagonal_below_p2(pt, tri):
            return Verdict(IN_T, "d=2, 2gamma-beta<1: interior of the closure or [P1, P2)")
        return Verdict(UNRESOLVED, "d=2, 2gamma-beta<1, sup delta^beta N = inf: scaling edge not decided")
    if excess == 0:
        if sup_finite is None:
            return Verdict(UNRESOLVED, "d=2, 2gamma-beta=1: sup delta^beta N flag unknown")
        if sup_finite:
            if _same(pt.inv_p, p3.inv_p) and _same(pt.inv_q, p3.inv_q):
                return Verdict(UNRESOLVED, "d=2, 2gamma-beta=1: P3rad left open")
            return Verdict(IN_T, "d=2, 2gamma-beta=1, sup delta^beta N < inf: Delta_beta minus P3rad")
        if on_beta_line:
            return Verdict(NOT_IN_T, "d=2, 2gamma-beta=1, sup delta^beta N = inf: segment [P2, P3rad] removed")
        return Verdict(IN_T, "d=2, 2gamma-beta=1, sup delta^beta N = inf")
    # 2 gamma - beta > 1
    inner = TypeRegion(2, beta, ClosedFormNuSharp(beta, gamma), "closure_d2")
    p4 = quadrangle_vertices_radial(beta, gamma)[2]
    if _same(2 * pt.inv_q, pt.inv_p) and pt.inv_p < p4.inv_p and not _same(pt.inv_p, p4.inv_p):
        return Verdict(IN_T, "d=2, 2gamma-beta>1: segment [P1, P4rad)")
    if region_membership(inner, pt) == "interior" or _on_diagonal_below_p2(pt, tri):
        return Verdict(IN_T, "d=2, 2gamma-beta>1: interior of Qrad or [P1, P2)")
    return Verdict(UNRESOLVED, "d=2, 2gamma-beta>1: between Qrad and Delta_beta the answer depends on nu_sharp; "
                               "[P2, P5rad) is an open question")
