"""Scaling experiments for the lower-bound constructions, and a scan of the ``(1/p, 1/q)`` square.

Every experiment measures a ratio over a range of dyadic scales, fits the
exponent of ``log2(ratio)`` and compares it with the exponent the
construction predicts.  Only exponents are compared; the multiplicative
constants are unspecified and merely reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from ._validation import ParameterError, check_int, check_real
from .dilation_sets import WindowSpec, ancestors, restrict
from .fitting import ExponentFit, fit_exponent
from .quadrature import gauss_legendre
from .radial_averages import RadialFunction, sphere_average, stein_function
from .spectra import covering_profile
from .type_sets import (
    ClosedFormNuSharp,
    ExponentPair,
    TypeRegion,
    closure_boundary,
    region_membership,
)

__all__ = [
    "SLOPE_TOL",
    "CONSTANT_FACTOR",
    "EXCLUSION_THRESHOLD",
    "ExperimentRecord",
    "fit_exponent",
    "experiment_pq",
    "experiment_knapp",
    "claim_annulus",
    "experiment_stein_log",
    "region_scan",
    "RegionScan",
    "AnnulusReport",
    "monotone_exponent",
    "easy_log2_functional",
    "knapp_log2_functional",
    "knapp_lower_norm",
    "predicted_region",
]

# repo-wide verdict tolerances
SLOPE_TOL = 0.1
CONSTANT_FACTOR = 4.0
EXCLUSION_THRESHOLD = 0.05
MIN_FIT_SPAN = 6


@dataclass
class ExperimentRecord:
    """One experiment: parameters, per-scale log-ratios, the exponent fit and its verdict.

    ``scales`` are the integers ``k`` (train experiments) or ``m`` with
    ``delta = 2**-m``, strictly increasing.
    """

    experiment: str
    params: dict
    scales: List[int]
    log2_ratios: List[float]
    fit: ExponentFit
    predicted: float
    verdict: str
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.scales[:-1], self.scales[1:])):
            raise ParameterError("scales must be strictly increasing")
        if len(self.scales) != len(self.log2_ratios):
            raise ParameterError("one ratio per scale")

    @property
    def passed(self):
        return self.verdict == "pass"

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "params": self.params,
            "scales": list(self.scales),
            "log2_ratios": [float(v) for v in self.log2_ratios],
            "fit": self.fit.to_dict(),
            "predicted": float(self.predicted),
            "verdict": self.verdict,
            "extra": self.extra,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            data["experiment"],
            dict(data["params"]),
            [int(s) for s in data["scales"]],
            [float(v) for v in data["log2_ratios"]],
            ExponentFit.from_dict(data["fit"]),
            float(data["predicted"]),
            data["verdict"],
            dict(data.get("extra", {})),
        )

    def rows(self):
        """CSV rows ``scale, log2_ratio`` followed by the fit fields."""
        label = "k" if self.experiment == "pq" else "m"
        return [
            {label: s, "log2_ratio": v, "slope": self.fit.slope, "intercept": self.fit.intercept,
             "r_squared": self.fit.r_squared}
            for s, v in zip(self.scales, self.log2_ratios)
        ]

    def __eq__(self, other):
        if not isinstance(other, ExperimentRecord):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def _describe(E):
    prof = E.profile
    return {"depth": E.depth, "cells": len(E), "description": "" if prof is None else prof.description}


def _verdict(ok):
    return "pass" if ok else "fail"


# p <= q -------------------------------------------------------------------
def _train_intervals(k):
    base = 2**k
    outer = [(base + 8 * n + 1, base + 8 * n + 7) for n in range(1, 2 ** (k - 5) + 1)]
    inner = [(base + 8 * n + 3, base + 8 * n + 5) for n in range(1, 2 ** (k - 5) + 1)]
    return outer, inner


def experiment_pq(E, d, p, q, k_range=(6, 13), tol=1e-10):
    """Train of annuli ``I*_n = [2^k + 8n + 1, 2^k + 8n + 7]`` at amplitude ``2^(-k(d-1)/p)``.

    On every inner annulus ``I_n = [2^k + 8n + 3, 2^k + 8n + 5]`` each average
    ``A_t`` with ``t`` in ``[1, 2]`` sees exactly one outer annulus in full, so
    ``M_E f_k`` equals the amplitude there.  That value is confirmed by
    quadrature at three radii of the first, middle and last inner annulus, and
    ``||M_E f_k||_q`` is bounded below by its integral over the inner annuli.
    ``||f_k||_p`` is closed form.  The predicted slope is ``-d(1/p - 1/q)``.
    """
    d = check_int(d, "d", 2)
    p = float(check_real(p, "p", 1))
    q = float(check_real(q, "q", 1))
    if p > q:
        raise ParameterError(f"experiment_pq needs p <= q, got p={p}, q={q}")
    k_lo, k_hi = (check_int(k, "k", 6, 16) for k in k_range)
    if k_hi - k_lo < 2:
        raise ParameterError("need at least three values of k")
    ts = E.samples()
    ks = list(range(k_lo, k_hi + 1))
    ratios, checks = [], []
    for k in ks:
        amp = 2.0 ** (-k * (d - 1) / p)
        outer, inner = _train_intervals(k)
        f_k = RadialFunction.step_train([(a, b, 1.0) for a, b in outer], amp)
        norm_p = f_k.norm(p, d)
        inner_value = math.inf
        for idx in (0, len(inner) // 2, len(inner) - 1):
            bump = RadialFunction.indicator(*outer[idx])
            for r in (inner[idx][0], 0.5 * sum(inner[idx]), inner[idx][1]):
                vals = [sphere_average(bump, d, r, float(t), tol).value for t in (ts[0], ts[-1])]
                inner_value = min(inner_value, *vals)
        checks.append(inner_value)
        measure = math.fsum((b**d - a**d) / d for a, b in inner)
        norm_q = amp * inner_value * measure ** (1.0 / q)
        ratios.append(math.log2(norm_q / norm_p))
    fit = fit_exponent(ks, ratios, (k_lo, k_hi))
    predicted = -d * (1.0 / p - 1.0 / q)
    return ExperimentRecord(
        "pq",
        {"d": d, "p": p, "q": q, "set": _describe(E), "k_range": [k_lo, k_hi]},
        ks,
        ratios,
        fit,
        predicted,
        _verdict(fit.slope >= predicted - SLOPE_TOL),
        {"min_inner_average": float(min(checks))},
    )


# Knapp example ----------------------------------------------------------------
def _thinned(values, spacing):
    out = []
    for v in np.sort(values):
        if not out or v - out[-1] >= spacing:
            out.append(float(v))
    return out


def _representatives(EJ, m, t_left):
    """One sample dilation per depth-``m`` cell of ``E ∩ J``, at least ``delta`` right of ``t_left``."""
    delta = 2.0**-m
    ts = EJ.samples()
    cells = np.floor((ts - 1.0) / delta).astype(np.int64)
    _, first = np.unique(cells, return_index=True)
    reps = ts[first]
    reps = reps[reps - t_left >= delta]
    return _thinned(reps, delta / 5)


def knapp_lower_norm(E, d, q, t_left, m, window=None, nodes=3):
    """Lower bound for ``||M_E g_delta||_q`` from the annuli ``|x| = t - t_L + c delta``, ``|c| <= 1/10``."""
    delta = 2.0**-m
    g = RadialFunction.indicator(max(0.0, t_left - delta), t_left + delta)
    EJ = E if window is None else restrict(E, window)
    reps = _representatives(EJ, m, t_left)
    x, w = gauss_legendre(nodes)
    total = 0.0
    half = delta / 10
    for t in reps:
        centre = t - t_left
        radii = centre + half * x
        vals = np.array([abs(sphere_average(g, d, float(r), t, 1e-12).value) for r in radii])
        total += half * float(w @ (vals**q * radii ** (d - 1)))
    return total ** (1.0 / q), len(reps)


def experiment_knapp(E, d, p, q, J=None, delta_range=(4, 10)):
    """Knapp example ``g_delta = 1_[t_L - delta, t_L + delta]`` at the left end of the window ``J``.

    ``delta_range`` gives the exponents ``m`` of ``delta = 2**-m``.  The
    measured slope of ``log2(||M_E g||_q / ||g||_p)`` against ``log2 delta`` is
    compared with ``(d-1)/2 + 1/q - 1/p - c/q``, where ``c`` is the fitted
    exponent of ``N(E ∩ J, delta) ~ delta^(-c)``.  Passes when the measured
    slope does not exceed the prediction by more than the slope tolerance.
    """
    d = check_int(d, "d", 2)
    p = float(check_real(p, "p", 1))
    q = float(check_real(q, "q", 2))
    J = WindowSpec(0, 0) if J is None else J
    m_lo, m_hi = (check_int(m, "m", 4, 12) for m in delta_range)
    if m_hi - m_lo < 2:
        raise ParameterError("need at least three scales")
    if 2.0**-m_lo > J.length:
        raise ParameterError("the window must be at least as long as the largest delta")
    if m_hi > E.depth:
        raise ParameterError(f"set depth {E.depth} is coarser than delta = 2^-{m_hi}")
    EJ = restrict(E, J)
    ms = list(range(m_lo, m_hi + 1))
    log_ratio, log_n = [], []
    for m in ms:
        delta = 2.0**-m
        norm_m, _ = knapp_lower_norm(EJ, d, q, J.left, m)
        g = RadialFunction.indicator(max(0.0, J.left - delta), J.left + delta)
        log_ratio.append(math.log2(norm_m / g.norm(p, d)))
        log_n.append(math.log2(len(ancestors(EJ, m))))
    # slopes against log2(delta) = -m
    neg = [-m for m in ms]
    fit = fit_exponent(neg, log_ratio, (m_lo, m_hi))
    cover = fit_exponent(ms, log_n, (m_lo, m_hi)).slope
    predicted = (d - 1) / 2 + 1 / q - 1 / p - cover / q
    return ExperimentRecord(
        "knapp",
        {"d": d, "p": p, "q": q, "set": _describe(E), "window": [J.level, J.position], "delta_range": [m_lo, m_hi]},
        ms,
        log_ratio,
        fit,
        predicted,
        _verdict(fit.slope <= predicted + SLOPE_TOL),
        {"covering_slope": cover},
    )


@dataclass(frozen=True)
class AnnulusReport:
    """Normalized averages ``|A_t g_delta(x)| / (delta/|x|)^((d-1)/2)`` per ``delta``."""

    d: int
    deltas: List[float]
    ratios: List[List[float]]
    min_ratio: float
    max_ratio: float
    passed: bool

    def to_dict(self):
        return {
            "d": self.d, "deltas": self.deltas, "ratios": self.ratios,
            "min_ratio": self.min_ratio, "max_ratio": self.max_ratio, "passed": self.passed,
        }


def claim_annulus(d, delta_range=(4, 10), t=1.5, t_left=1.0, c1_grid=(-0.1, 0.0, 0.1)):
    """Check ``|A_t g_delta(x)| ~ (delta/|x|)^((d-1)/2)`` at ``|x| = t - t_L + c1 delta``.

    Passes when the smallest normalized value is positive and the largest is
    at most four times the smallest over the whole range.
    """
    d = check_int(d, "d", 2)
    m_lo, m_hi = (check_int(m, "m", 1, 30) for m in delta_range)
    check_real(t, "t", 1, 2)
    check_real(t_left, "t_left", 0, lo_open=True)
    for c1 in c1_grid:
        if abs(c1) > 0.1:
            raise ParameterError(f"|c1| = {abs(c1)} exceeds 1/10")
    deltas, rows = [], []
    for m in range(m_lo, m_hi + 1):
        delta = 2.0**-m
        if t - t_left < delta:
            raise ParameterError("need t - t_L >= delta")
        g = RadialFunction.indicator(max(0.0, t_left - delta), t_left + delta)
        row = []
        for c1 in c1_grid:
            x = t - t_left + c1 * delta
            if x <= 0:
                raise ParameterError("the annulus radius must be positive")
            val = abs(sphere_average(g, d, x, t, 1e-13).value)
            row.append(val / (delta / x) ** ((d - 1) / 2))
        deltas.append(delta)
        rows.append(row)
    flat = [v for row in rows for v in row]
    lo, hi = min(flat), max(flat)
    return AnnulusReport(d, deltas, rows, lo, hi, bool(lo > 0 and hi <= CONSTANT_FACTOR * lo))


# Stein example ----------------------------------------------------------------
def experiment_stein_log(E, d, q, delta_range=(6, 16), nodes_per_cell=2, require_null_closure=True):
    """Stein-type example at ``p = d/(d-1)`` against ``N(E,delta)^(1/q) delta^(1/q) log(1/delta)^(1/d)``.

    ``||M_E g||_q`` is bounded below on the cells of ``E`` at scale ``delta``:
    every such radius is within ``delta`` of a sample dilation ``t``, and
    ``A_t g`` there is evaluated by quadrature.  Passes when the ratio of
    measured to predicted values has min/median at least ``1/4``.
    """
    d = check_int(d, "d", 2)
    q = float(check_real(q, "q", 1))
    m_lo, m_hi = (check_int(m, "m", 6, 16) for m in delta_range)
    if m_hi - m_lo < 2:
        raise ParameterError("need at least three scales")
    if m_hi > E.depth:
        raise ParameterError(f"set depth {E.depth} is coarser than delta = 2^-{m_hi}")
    closure_null = E.profile is not None and E.profile.closure_is_null
    if require_null_closure and not closure_null:
        raise ParameterError("the Stein bound needs a set whose closure is Lebesgue-null (beta < 1)")
    p_d = d / (d - 1)
    ts = E.samples()
    x, w = gauss_legendre(nodes_per_cell)
    ms = list(range(m_lo, m_hi + 1))
    measured, predicted_vals, g_norms = [], [], []
    for m in ms:
        delta = 2.0**-m
        g = stein_function(d, delta)
        g_norms.append(g.norm(p_d, d))
        cells = ancestors(E, m)
        lefts = 1.0 + cells * delta
        total = 0.0
        for left in lefts:
            radii = left + 0.5 * delta * (1 + x)
            idx = np.clip(np.searchsorted(ts, radii), 1, len(ts) - 1)
            near = np.where(np.abs(ts[idx - 1] - radii) <= np.abs(ts[idx] - radii), ts[idx - 1], ts[idx])
            vals = np.array([abs(sphere_average(g, d, float(r), float(t), 1e-10).value) for r, t in zip(radii, near)])
            total += 0.5 * delta * float(w @ (vals**q * radii ** (d - 1)))
        measured.append(total ** (1.0 / q))
        L = math.log(1.0 / delta)
        predicted_vals.append(len(cells) ** (1 / q) * delta ** (1 / q) * L ** (1 / d))
    ratio = np.array(measured) / (np.array(g_norms) * np.array(predicted_vals))
    log_ratio = [math.log2(v) for v in ratio]
    fit = fit_exponent([math.log2(v) for v in predicted_vals], [math.log2(v) for v in measured])
    # exponent of log(1/delta) after removing the covering and delta factors
    logs = [math.log2(math.log(2.0**m)) for m in ms]
    stripped = [
        math.log2(meas) - math.log2(pred) + math.log2(math.log(2.0**m)) / d
        for meas, pred, m in zip(measured, predicted_vals, ms)
    ]
    log_fit = fit_exponent(logs, stripped)
    ok = float(ratio.min() / np.median(ratio)) >= 1 / CONSTANT_FACTOR
    return ExperimentRecord(
        "stein",
        {"d": d, "p": p_d, "q": q, "set": _describe(E), "delta_range": [m_lo, m_hi]},
        ms,
        log_ratio,
        fit,
        1.0,
        _verdict(ok),
        {
            "g_norms": g_norms,
            "closure_null": closure_null,
            "log_exponent": log_fit.slope,
            "ratio_min_over_median": float(ratio.min() / np.median(ratio)),
        },
    )


# region scan --------------------------------------------------------------------
def monotone_exponent(ms, log2_values, min_span=MIN_FIT_SPAN):
    """Largest least-squares slope over the windows ``[ms[0], m_hi]`` spanning at least ``min_span``.

    Adding finer scales only adds candidate windows, so the value never decreases.
    """
    ms = np.asarray(ms, dtype=np.float64)
    vals = np.asarray(log2_values, dtype=np.float64)
    best = -math.inf
    for j in range(2, len(ms)):
        if ms[j] - ms[0] < min_span and j != len(ms) - 1:
            continue
        if ms[j] - ms[0] < min_span and best > -math.inf:
            continue
        x = ms[: j + 1]
        y = vals[..., : j + 1]
        xm = x.mean()
        slope = ((x - xm) * (y - y.mean(axis=-1, keepdims=True))).sum(axis=-1) / ((x - xm) ** 2).sum()
        best = np.maximum(best, slope)
    return best


def easy_log2_functional(P, d, inv_p, inv_q, ms):
    """``log2 N(E, delta)^(1/q) delta^(d - 1 + 1/q - d/p)`` at ``delta = 2**-m``."""
    logn = np.log2(P.global_counts[ms].astype(np.float64))
    return inv_q[..., None] * logn - ms * (d - 1 + inv_q[..., None] - d * inv_p[..., None])


def knapp_log2_functional(P, d, inv_p, inv_q, ms):
    """``log2 max over windows |J| >= delta of N(E ∩ J, delta)^(1/q) |J|^(-(d-1)(1/2-1/q)) delta^((d-1)/2 + 1/q - 1/p)``."""
    logc = P.log2_counts()
    out = np.empty(inv_p.shape + (len(ms),))
    for j, m in enumerate(ms):
        k = np.arange(m + 1)
        terms = inv_q[..., None] * logc[: m + 1, m] + k * (d - 1) * (0.5 - inv_q[..., None])
        out[..., j] = terms.max(axis=-1) - m * ((d - 1) / 2 + inv_q - inv_p)
    return out


def predicted_region(E, d):
    prof = E.profile
    if prof is None:
        raise ParameterError("region_scan needs a set with an analytic profile")
    if d == 2:
        return TypeRegion(2, float(prof.beta), ClosedFormNuSharp(float(prof.beta), float(prof.gamma)), "closure_d2")
    return TypeRegion(d, float(prof.beta))


def _polyline_distance(points, poly):
    a = poly[:-1][None, :, :]
    b = poly[1:][None, :, :]
    p = points[:, None, :]
    ab = b - a
    denom = (ab**2).sum(-1)
    s = np.clip(((p - a) * ab).sum(-1) / np.where(denom == 0, 1, denom), 0, 1)
    proj = a + s[..., None] * ab
    return np.sqrt(((p - proj) ** 2).sum(-1)).min(axis=1)


@dataclass
class RegionScan:
    """Per grid point: both exponents, the exclusion flag, predicted membership and boundary distance."""

    d: int
    rows: List[dict]
    scales: List[int]

    def excluded_outside(self, margin=EXCLUSION_THRESHOLD):
        """Points farther than ``margin`` outside the predicted region that are not excluded."""
        return [r for r in self.rows if not r["predicted_member"] and r["distance"] > margin and not r["excluded"]]

    def excluded_inside(self, margin=EXCLUSION_THRESHOLD):
        """Points farther than ``margin`` inside the predicted region that are excluded."""
        return [r for r in self.rows if r["predicted_member"] and r["distance"] > margin and r["excluded"]]

    @property
    def consistent(self):
        return not self.excluded_outside() and not self.excluded_inside()

    def verdicts(self):
        return {(r["inv_p"], r["inv_q"]): r["excluded"] for r in self.rows}


def region_scan(E, d, grid_resolution=32, scales=None, profile=None):
    """Scan the grid ``(i/res, j/res)`` and mark points the necessary conditions exclude.

    ``exponent_easy`` is the larger growth exponent of the ``p <= q`` train
    (``d(1/q - 1/p)``) and of ``N(E,delta)^(1/q) delta^(d-1+1/q-d/p)``;
    ``exponent_knapp`` is the growth exponent of the Knapp functional.  Finite
    scale exponents use :func:`monotone_exponent`.  A point is excluded when
    either exponent exceeds ``0.05``.
    """
    d = check_int(d, "d", 2)
    res = check_int(grid_resolution, "grid_resolution", 2, 64)
    P = covering_profile(E) if profile is None else profile
    if scales is None:
        lo, hi = P.default_window()
        scales = list(range(lo, hi + 1))
    ms = np.asarray(sorted(int(m) for m in scales), dtype=np.int64)
    if ms[0] < 0 or ms[-1] > P.depth or len(ms) < 3:
        raise ParameterError("scales must be at least three values in [0, depth]")
    grid = np.arange(res + 1) / res
    inv_p, inv_q = (a.ravel() for a in np.meshgrid(grid, grid, indexing="ij"))
    train = d * (inv_q - inv_p)
    easy = np.maximum(train, monotone_exponent(ms, easy_log2_functional(P, d, inv_p, inv_q, ms)))
    knapp = monotone_exponent(ms, knapp_log2_functional(P, d, inv_p, inv_q, ms))
    region = predicted_region(E, d)
    poly = closure_boundary(region, 64).as_array()
    dist = _polyline_distance(np.column_stack([inv_p, inv_q]), poly)
    rows = []
    for i in range(inv_p.size):
        pt = ExponentPair(float(inv_p[i]), float(inv_q[i]))
        member = region_membership(region, pt) != "exterior"
        rows.append({
            "inv_p": float(inv_p[i]),
            "inv_q": float(inv_q[i]),
            "exponent_easy": float(easy[i]),
            "exponent_knapp": float(knapp[i]),
            "excluded": bool(max(easy[i], knapp[i]) > EXCLUSION_THRESHOLD),
            "predicted_member": member,
            "distance": float(dist[i]),
        })
    return RegionScan(d, rows, [int(m) for m in ms])
