"""Covering profiles of dilation sets and the dimensional functionals built on them.

Every ``limsup`` over scales becomes a least-squares slope over a window of
dyadic scale indices ``m`` (scale ``delta = 2**-m``).  Window suprema range over
dyadic windows only; an arbitrary interval of length ``2**-k`` is covered by two
dyadic windows of level ``k - 1``, which never changes a slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._validation import FitError, ParameterError, RangeError, check_int, check_real
from .fitting import ExponentFit, fit_exponent

BOUNDED_RATIO = 4.0


@dataclass(frozen=True, eq=False)
class CoveringProfile:
    """Window covering counts ``counts[k, m] = max_J N(E ∩ J, 2**-m)`` over level-``k`` windows.

    Entries with ``k > m`` are zero.  ``positions[k, m]`` is the smallest window
    position attaining the maximum (``-1`` for synthetic profiles).
    """

    depth: int
    counts: np.ndarray
    global_counts: np.ndarray
    positions: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.depth
        if self.counts.shape != (n + 1, n + 1) or self.global_counts.shape != (n + 1,):
            raise ParameterError("profile arrays do not match the depth")

    def __eq__(self, other):
        if not isinstance(other, CoveringProfile):
            return NotImplemented
        return (
            self.depth == other.depth
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.global_counts, other.global_counts)
        )

    __hash__ = None

    def log2_counts(self):
        with np.errstate(divide="ignore"):
            return np.log2(self.counts.astype(np.float64))

    def default_window(self):
        return default_window(self.depth)

    @classmethod
    def from_exponent(cls, nu, depth):
        """Synthetic profile ``counts[k, m] = 2**(-m nu(k/m))`` for a window exponent ``nu``."""
        depth = check_int(depth, "depth", 1, None)
        counts = np.zeros((depth + 1, depth + 1))
        counts[0, 0] = 1.0
        for m in range(1, depth + 1):
            theta = np.arange(m + 1) / m
            counts[: m + 1, m] = np.exp2(-m * np.array([nu(t) for t in theta], dtype=np.float64))
        return cls(depth, counts, counts[0].copy())


def default_window(depth):
    """Scale window dropping the coarsest quarter and finest eighth of ``0..depth``."""
    lo = depth // 4
    hi = depth - depth // 8
    if hi - lo < 2:
        lo, hi = 0, depth
    return lo, hi


def covering_profile(E):
    """Exact window covering counts of ``E`` for every ``0 <= k <= m <= depth``.

    For each ``m`` the depth-``m`` ancestors are grouped into level-``k``
    windows by repeated pairwise merging of sorted ids, so the cost per ``m``
    is proportional to the number of occupied windows summed over levels.
    """
    n = E.depth
    counts = np.zeros((n + 1, n + 1), dtype=np.int64)
    positions = np.full((n + 1, n + 1), -1, dtype=np.int64)
    anc = np.asarray(E.cells, dtype=np.int64)
    for m in range(n, -1, -1):
        if m < n:
            anc = _dedupe_sorted(anc >> 1)
        ids = anc
        cnt = np.ones(ids.size, dtype=np.int64)
        for k in range(m, -1, -1):
            i = int(np.argmax(cnt))
            counts[k, m] = cnt[i]
            positions[k, m] = ids[i]
            if k:
                parent = ids >> 1
                start = np.flatnonzero(np.concatenate(([True], parent[1:] != parent[:-1])))
                cnt = np.add.reduceat(cnt, start)
                ids = parent[start]
    return CoveringProfile(n, counts, counts[0].copy(), positions)


def _dedupe_sorted(a):
    if a.size == 0:
        return a
    keep = np.concatenate(([True], a[1:] != a[:-1]))
    return a[keep]


def _window(P, window, min_points=3):
    lo, hi = P.default_window() if window is None else window
    lo = check_int(lo, "m_min", 0, P.depth)
    hi = check_int(hi, "m_max", 0, P.depth)
    if hi - lo + 1 < min_points:
        raise FitError(f"scale window [{lo}, {hi}] has fewer than {min_points} scales")
    return lo, hi


def minkowski_estimate(P, window=None):
    """Slope of ``log2 N(E, 2**-m)`` against ``m``: the upper Minkowski dimension estimate."""
    lo, hi = _window(P, window)
    m = np.arange(lo, hi + 1)
    return fit_exponent(m, np.log2(P.global_counts[lo : hi + 1].astype(np.float64)), (lo, hi))


def assouad_spectrum_fits(P, thetas, window=None):
    """Per-``theta`` fits of ``log2 counts(floor(theta m), m)`` against ``m - floor(theta m)``.

    The slope is the finite-scale Assouad spectrum at ``theta`` (windows of
    length exactly ``delta**theta``).  A ``theta`` whose window gives fewer than
    two distinct abscissae (shallow sets, ``theta`` near 1) is left out.
    """
    lo, hi = _window(P, window)
    logc = P.log2_counts()
    out = {}
    for theta in thetas:
        theta = float(check_real(theta, "theta", 0, 1, hi_open=True))
        ms = np.arange(lo, hi + 1)
        ks = np.floor(theta * ms + 1e-12).astype(np.int64)
        if np.unique(ms - ks).size < 2:
            continue
        out[theta] = fit_exponent(ms - ks, logc[ks, ms], (lo, hi))
    return out


def assouad_spectrum_estimate(P, theta_grid, window=None):
    """Finite-scale upper Assouad spectrum on a grid of ``theta`` in ``[0, 1)``.

    The upper spectrum at ``theta`` allows every window length ``>= delta**theta``,
    so it is the maximum of the spectrum over ``{0} ∪ {theta' <= theta}`` on the grid.
    The quasi-Assouad estimate is the value at the largest grid ``theta``.

    Returns
    -------
    dict
        ``theta -> estimate``, ordered as ``sorted(theta_grid)``.
    """
    thetas = sorted({float(t) for t in theta_grid} | {0.0})
    fits = assouad_spectrum_fits(P, thetas, window)
    out = {}
    running = -math.inf
    requested = {float(t) for t in theta_grid}
    for theta in thetas:
        if theta not in fits:
            continue
        running = max(running, fits[theta].slope)
        if theta in requested:
            out[theta] = running
    return out


def quasi_assouad_estimate(P, theta_grid, window=None):
    spec = assouad_spectrum_estimate(P, theta_grid, window)
    return spec[max(spec)]


def nu_sharp_curve(P, alpha):
    """``log2 S(m)`` and maximizing ``k`` for ``S(m) = max_k 2**(k alpha) counts(k, m)``.

    Ties resolve to the smallest ``k``.
    """
    alpha = float(check_real(alpha, "alpha"))
    logc = P.log2_counts()
    n = P.depth
    log_s = np.empty(n + 1)
    arg = np.empty(n + 1, dtype=np.int64)
    for m in range(n + 1):
        k = np.arange(m + 1)
        vals = k * alpha + logc[: m + 1, m]
        i = int(np.argmax(vals))
        log_s[m] = vals[i]
        arg[m] = i
    return log_s, arg


def nu_sharp_estimate(P, alpha, window=None):
    """Slope of ``log2 sup_{delta <= |J| <= 1} |J|**-alpha N(E ∩ J, delta)`` against ``log2(1/delta)``."""
    lo, hi = _window(P, window)
    log_s, _ = nu_sharp_curve(P, alpha)
    m = np.arange(lo, hi + 1)
    return fit_exponent(m, log_s[lo : hi + 1], (lo, hi))


def legendre_nu_sharp(nu_profile, alpha):
    """Discrete Legendre transform ``max_theta (alpha theta - nu(theta))`` of a window exponent.

    ``nu_profile`` is a mapping ``theta -> nu(theta)`` or a pair of arrays.
    """
    if isinstance(nu_profile, dict):
        theta = np.fromiter(nu_profile.keys(), dtype=np.float64)
        nu = np.fromiter(nu_profile.values(), dtype=np.float64)
    else:
        theta, nu = (np.asarray(a, dtype=np.float64) for a in nu_profile)
    if theta.size == 0:
        raise ParameterError("empty theta grid")
    return float(np.max(alpha * theta - nu))


def nu_sharp_upper_bound(alpha, beta, gamma):
    """``max(alpha, (1 - beta/gamma) alpha + beta)``, the bound the set's dimensions force for ``alpha >= 0``."""
    if gamma == 0:
        return float(alpha)
    return max(alpha, (1 - beta / gamma) * alpha + beta)


@dataclass(frozen=True)
class FracPropRow:
    alpha: float
    estimate: float
    lower: float
    upper: float
    passed: bool


@dataclass(frozen=True)
class FracPropReport:
    beta: float
    gamma: float
    slack: float
    rows: Tuple[FracPropRow, ...]

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def failures(self):
        return [r for r in self.rows if not r.passed]


def fracprop_check(P, beta, gamma, alpha_grid, slack=0.1, window=None):
    """Check ``alpha - slack <= nu_sharp(alpha) <= max(alpha, (1-beta/gamma) alpha + beta) + slack``.

    Failures are reported in the returned rows, never raised.  ``gamma = 0``
    (so ``beta = 0``, e.g. finite sets) uses the limiting bound ``alpha``.
    """
    check_real(beta, "beta", 0, 1)
    check_real(gamma, "gamma", 0, 1)
    if gamma < beta:
        raise ParameterError("need beta <= gamma")
    rows = []
    for alpha in alpha_grid:
        alpha = float(check_real(alpha, "alpha", 0))
        est = nu_sharp_estimate(P, alpha, window).slope
        upper = nu_sharp_upper_bound(alpha, float(beta), float(gamma))
        ok = alpha - slack <= est <= upper + slack
        rows.append(FracPropRow(alpha, est, alpha, upper, ok))
    return FracPropReport(float(beta), float(gamma), float(slack), tuple(rows))


@dataclass(frozen=True, eq=False)
class EndpointDiagnostics:
    """Sequences over ``m = 1..depth`` (``delta = 2**-m < 1/2``) probing endpoint finiteness.

    The verdicts are a heuristic (max/min ratio of each sequence at most 4
    reads as bounded).  Finiteness of a supremum over all scales cannot be
    decided from finitely many; classification uses generator metadata.
    """

    scales: np.ndarray
    delta_beta_N: np.ndarray
    log_weighted: np.ndarray
    neighborhood_measure: np.ndarray
    verdicts: Dict[str, str] = field(default_factory=dict)


def _bounded_verdict(values):
    ratio = float(np.max(values) / np.min(values))
    return "appears bounded" if ratio <= BOUNDED_RATIO else "unbounded"


def endpoint_diagnostics(P, beta, q, d):
    check_real(beta, "beta", 0, 1)
    check_real(q, "q", 1)
    check_int(d, "d", 2)
    m = np.arange(1, P.depth + 1)
    N = P.global_counts[1:].astype(np.float64)
    delta = np.exp2(-m.astype(np.float64))
    dbn = delta ** float(beta) * N
    logw = delta * (m * math.log(2.0)) ** (q / d) * N
    hood = N * delta
    verdicts = {
        "delta_beta_N": _bounded_verdict(dbn),
        "log_weighted": _bounded_verdict(logw),
    }
    return EndpointDiagnostics(m, dbn, logw, hood, verdicts)


def omega_mpq(P, p, q, m, k):
    """``2**(-k (2/q - 1/p)) max_{|J| = 2**-k} N(E ∩ J, 2**-(m+k))**(1/q)``."""
    p = check_real(p, "p", 1, lo_open=True)
    q = check_real(q, "q", 1, lo_open=True)
    if p > q:
        raise ParameterError(f"need p <= q, got p={p}, q={q}")
    m = check_int(m, "m", 0)
    k = check_int(k, "k", 0)
    if m + k > P.depth:
        raise RangeError(f"k + m = {k + m} exceeds depth {P.depth}")
    return 2.0 ** (-k * (2.0 / q - 1.0 / p)) * float(P.counts[k, k + m]) ** (1.0 / q)


def profile_rows(P):
    """``(k, m, count)`` rows for CSV emission, ``k <= m``."""
    rows: List[Tuple[int, int, float]] = []
    for m in range(P.depth + 1):
        for k in range(m + 1):
            c = P.counts[k, m]
            rows.append((k, m, int(c) if np.issubdtype(P.counts.dtype, np.integer) else float(c)))
    return rows
