"""Adaptive Gauss-Legendre quadrature with square-root endpoint substitutions.

The engine integrates vectorized callables.  Each panel is evaluated with
Gauss-Legendre rules of order ``n`` and ``2n``; the difference is the panel's
error estimate, and the panel with the largest estimate is bisected until the
total estimate drops below the tolerance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._validation import ConvergenceError, ParameterError

DEFAULT_ORDER = 10
MAX_EVALUATIONS = 400_000


@dataclass(frozen=True)
class QuadratureResult:
    """Integral value with an absolute error estimate and the number of integrand evaluations."""

    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if not self.abs_error_estimate >= 0:
            raise ParameterError("abs_error_estimate must be >= 0")

    def __add__(self, other):
        return QuadratureResult(
            self.value + other.value,
            self.abs_error_estimate + other.abs_error_estimate,
            self.evaluations + other.evaluations,
        )

    def scaled(self, c):
        return QuadratureResult(c * self.value, abs(c) * self.abs_error_estimate, self.evaluations)

    def to_dict(self):
        return {"value": self.value, "error": self.abs_error_estimate, "evaluations": self.evaluations}


ZERO = QuadratureResult(0.0, 0.0, 0)


@lru_cache(maxsize=None)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel(func, lo, hi, order):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x1, w1 = gauss_legendre(order)
    x2, w2 = gauss_legendre(2 * order)
    nodes = np.concatenate([mid + half * x1, mid + half * x2])
    vals = np.asarray(func(nodes), dtype=np.float64)
    coarse = half * float(w1 @ vals[:order])
    fine = half * float(w2 @ vals[order:])
    return fine, abs(fine - coarse), 3 * order


def integrate(func, lo, hi, tol=1e-10, breakpoints=(), order=DEFAULT_ORDER, max_evaluations=MAX_EVALUATIONS):
    """Adaptive integral of ``func`` over ``[lo, hi]``, split first at ``breakpoints``.

    Raises :class:`ConvergenceError` carrying the best estimate when the
    evaluation budget runs out.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    lo, hi = float(lo), float(hi)
    if hi <= lo:
        return ZERO
    cuts = sorted({lo, hi, *(float(b) for b in breakpoints if lo < b < hi)})
    heap = []
    total = 0.0
    err = 0.0
    evals = 0
    for a, b in zip(cuts[:-1], cuts[1:]):
        v, e, n = _panel(func, a, b, order)
        total += v
        err += e
        evals += n
        heapq.heappush(heap, (-e, a, b, v))
    # bisect the worst panel until the summed estimate is small enough
    while err > tol:
        if evals >= max_evaluations or not heap:
            raise ConvergenceError(
                f"quadrature stalled at error {err:.3e} > tol {tol:.1e}", total, err, evals
            )
        neg_e, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            raise ConvergenceError("panel width underflow", total, err, evals)
        v1, e1, n1 = _panel(func, a, m, order)
        v2, e2, n2 = _panel(func, m, b, order)
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
        evals += n1 + n2
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
    # recompute from panels so the running sums do not accumulate drift
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return QuadratureResult(total, err, evals)


def integrate_endpoint_singular(phi, a, b, lo=None, hi=None, tol=1e-10, breakpoints=(), order=DEFAULT_ORDER):
    """Integrate ``phi(s, s - a, b - s)`` over ``[lo, hi]`` inside ``[a, b]``.

    ``phi`` may blow up like ``(s - a)^(-1/2)`` and ``(b - s)^(-1/2)``.  The
    interval is split at its midpoint; the left half uses ``s = a + u^2`` and the
    right half ``s = b - v^2``, so both singularities become smooth factors.
    The distances ``s - a`` and ``b - s`` are passed exactly as ``u^2`` and ``v^2``.
    """
    lo = a if lo is None else max(a, lo)
    hi = b if hi is None else min(b, hi)
    if hi <= lo:
        return ZERO
    m = 0.5 * (a + b)
    width = b - a
    result = ZERO
    if lo < m:
        u_lo, u_hi = math.sqrt(lo - a), math.sqrt(min(hi, m) - a)

        def left(u):
            dl = u * u
            return phi(a + dl, dl, width - dl) * (2.0 * u)

        bps = [math.sqrt(bp - a) for bp in breakpoints if lo < bp < min(hi, m)]
        result = result + integrate(left, u_lo, u_hi, tol / 2, bps, order)
    if hi > m:
        v_lo, v_hi = math.sqrt(b - hi), math.sqrt(b - max(lo, m))

        def right(v):
            dr = v * v
            return phi(b - dr, width - dr, dr) * (2.0 * v)

        bps = [math.sqrt(b - bp) for bp in breakpoints if max(lo, m) < bp < hi]
        result = result + integrate(right, v_lo, v_hi, tol / 2, bps, order)
    return result
