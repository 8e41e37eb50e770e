"""Spherical averages of radial functions.

For ``f(x) = f0(|x|)`` the average over the sphere of radius ``t`` centred at
``|x| = r`` reduces to

    A_t f(r) = c_d * integral over |r - t| < s < r + t of K_t(r, s) f0(s) ds

with ``K_t(r, s) = (sqrt(b^2 - s^2) sqrt(s^2 - a^2) / (b^2 - a^2))^(d-3) * s / (b^2 - a^2)``,
``a = |r - t|`` and ``b = r + t``.  The constant ``c_d`` is calibrated so that
``A_1 1(1) = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Tuple

import numpy as np

from ._validation import DomainError, ParameterError, check_int, check_real
from .quadrature import ZERO, QuadratureResult, integrate, integrate_endpoint_singular

KINDS = ("indicator_interval", "power_log", "step_train", "smooth_bump")


@dataclass(frozen=True)
class RadialFunction:
    """Profile ``f0`` of a radial function, with compact support in ``[0, inf)``.

    Build instances through the constructors :meth:`indicator`,
    :meth:`power_log`, :meth:`step_train` and :meth:`smooth_bump`.
    ``scale`` multiplies every value.
    """

    kind: str
    params: Tuple = ()
    scale: float = 1.0
    _support: Tuple[float, float] = field(default=(0.0, 0.0), repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown radial function kind {self.kind!r}")
        object.__setattr__(self, "_support", self._compute_support())

    # constructors ---------------------------------------------------------
    @classmethod
    def indicator(cls, a, b, scale=1.0):
        a, b = float(a), float(b)
        if not 0 <= a < b or not math.isfinite(b):
            raise ParameterError(f"indicator needs 0 <= a < b < inf, got ({a}, {b})")
        return cls("indicator_interval", (a, b), float(scale))

    @classmethod
    def power_log(cls, exponent, log_exponent, a, b, scale=1.0):
        """``s^exponent * log(1/s)^log_exponent`` on ``[a, b]``; a log factor needs ``b < 1``."""
        a, b = float(a), float(b)
        if not 0 < a < b or not math.isfinite(b):
            raise ParameterError(f"power_log needs 0 < a < b < inf, got ({a}, {b})")
        if log_exponent != 0 and b >= 1:
            raise ParameterError("power_log with a log factor needs support inside (0, 1)")
        return cls("power_log", (float(exponent), float(log_exponent), a, b), float(scale))

    @classmethod
    def step_train(cls, pieces, scale=1.0):
        """Sum of ``height * 1_[lo, hi]`` over disjoint ``(lo, hi, height)`` pieces."""
        rows = sorted((float(lo), float(hi), float(h)) for lo, hi, h in pieces)
        if not rows:
            raise ParameterError("step_train needs at least one piece")
        for lo, hi, _ in rows:
            if not 0 <= lo < hi or not math.isfinite(hi):
                raise ParameterError(f"bad step interval ({lo}, {hi})")
        for (_, hi, _), (lo, _, _) in zip(rows[:-1], rows[1:]):
            if lo < hi:
                raise ParameterError("step_train intervals must not overlap")
        return cls("step_train", tuple(rows), float(scale))

    @classmethod
    def smooth_bump(cls, center, width, scale=1.0):
        """``exp(-1 / (1 - x^2))`` with ``x = (s - center) / width``."""
        center, width = float(center), float(width)
        if not width > 0 or center - width < 0:
            raise ParameterError("smooth_bump needs width > 0 and center - width >= 0")
        return cls("smooth_bump", (center, width), float(scale))

    @classmethod
    def constant(cls, value=1.0, support=10.0):
        return cls.indicator(0.0, support, value)

    # evaluation -----------------------------------------------------------
    def _compute_support(self):
        p = self.params
        if self.kind == "indicator_interval":
            return p[0], p[1]
        if self.kind == "power_log":
            return p[2], p[3]
        if self.kind == "step_train":
            return p[0][0], p[-1][1]
        return p[0] - p[1], p[0] + p[1]

    @property
    def support(self):
        return self._support

    @property
    def breakpoints(self):
        """Points where ``f0`` or its derivatives jump."""
        p = self.params
        if self.kind == "step_train":
            return tuple(sorted({x for lo, hi, _ in p for x in (lo, hi)}))
        return self.support

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        p = self.params
        if self.kind == "indicator_interval":
            out = ((s >= p[0]) & (s <= p[1])).astype(np.float64)
        elif self.kind == "power_log":
            e, ell, a, b = p
            inside = (s >= a) & (s <= b)
            ss = np.where(inside, s, 0.5 * (a + b))
            val = ss**e
            if ell != 0:
                val = val * np.log(1.0 / ss) ** ell
            out = np.where(inside, val, 0.0)
        elif self.kind == "step_train":
            los = np.array([r[0] for r in p])
            his = np.array([r[1] for r in p])
            hs = np.array([r[2] for r in p])
            idx = np.searchsorted(los, s, side="right") - 1
            ok = idx >= 0
            idx_c = np.clip(idx, 0, len(p) - 1)
            out = np.where(ok & (s <= his[idx_c]), hs[idx_c], 0.0)
        else:
            c, w = p
            x = (s - c) / w
            inside = np.abs(x) < 1
            xx = np.where(inside, x, 0.0)
            out = np.where(inside, np.exp(-1.0 / (1.0 - xx * xx)), 0.0)
        return self.scale * out

    def unit(self):
        """The same profile with ``scale = 1``."""
        return RadialFunction(self.kind, self.params, 1.0)

    def with_scale(self, factor):
        return RadialFunction(self.kind, self.params, self.scale * float(factor))

    # norms ------------------------------------------------------------------
    def norm(self, p, d):
        """``||f0||`` in ``L^p(s^(d-1) ds)``; closed form except for smooth bumps and generic power-log profiles."""
        check_int(d, "d", 1)
        if p == math.inf:
            return self._sup_norm()
        check_real(p, "p", 1)
        par = self.params
        if self.kind == "indicator_interval":
            a, b = par
            return abs(self.scale) * ((b**d - a**d) / d) ** (1 / p)
        if self.kind == "step_train":
            total = math.fsum(abs(h) ** p * (hi**d - lo**d) / d for lo, hi, h in par)
            return abs(self.scale) * total ** (1 / p)
        if self.kind == "power_log":
            closed = _power_log_moment(par, p, d)
            if closed is not None:
                return abs(self.scale) * closed ** (1 / p)
        lo, hi = self.support
        res = integrate(lambda s: np.abs(self(s)) ** p * s ** (d - 1), lo, hi, 1e-13, self.breakpoints)
        return res.value ** (1 / p)

    def _sup_norm(self):
        par = self.params
        if self.kind == "indicator_interval":
            return abs(self.scale)
        if self.kind == "step_train":
            return abs(self.scale) * max(abs(h) for _, _, h in par)
        if self.kind == "smooth_bump":
            return abs(self.scale) * math.exp(-1.0)
        lo, hi = self.support
        s = np.linspace(lo, hi, 4097)
        return float(np.max(np.abs(self(s))))

    # serialization -------------------------------------------------------
    def to_dict(self):
        p = self.params
        if self.kind == "indicator_interval":
            params = {"a": p[0], "b": p[1]}
        elif self.kind == "power_log":
            params = {"exponent": p[0], "log_exponent": p[1], "a": p[2], "b": p[3]}
        elif self.kind == "step_train":
            params = {"pieces": [list(r) for r in p]}
        else:
            params = {"center": p[0], "width": p[1]}
        if self.scale != 1.0:
            params["scale"] = self.scale
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, data):
        kind = data.get("kind")
        params = dict(data.get("params", {}))
        scale = params.pop("scale", 1.0)
        try:
            if kind == "indicator_interval":
                return cls.indicator(params["a"], params["b"], scale)
            if kind == "power_log":
                return cls.power_log(params["exponent"], params["log_exponent"], params["a"], params["b"], scale)
            if kind == "step_train":
                return cls.step_train(params["pieces"], scale)
            if kind == "smooth_bump":
                return cls.smooth_bump(params["center"], params["width"], scale)
        except KeyError as exc:
            raise ParameterError(f"missing parameter {exc} for {kind}") from exc
        raise ParameterError(f"unknown radial function kind {kind!r}")


def _power_log_moment(par, p, d):
    """``integral_a^b s^(ep + d - 1) log(1/s)^(lp) ds`` when it has an elementary antiderivative."""
    e, ell, a, b = par
    k = e * p + d - 1
    m = ell * p
    if m == 0:
        if abs(k + 1) < 1e-14:
            return math.log(b / a)
        return (b ** (k + 1) - a ** (k + 1)) / (k + 1)
    if abs(k + 1) < 1e-14:
        la, lb = math.log(1 / a), math.log(1 / b)
        if abs(m + 1) < 1e-14:
            return math.log(la / lb)
        return (la ** (m + 1) - lb ** (m + 1)) / (m + 1)
    return None


def stein_function(d, delta):
    """``|x|^(1-d) log(1/|x|)^((1-d)/d)`` on ``delta^(1/2) <= |x| <= delta^(1/4)``; its ``L^(d/(d-1))`` norm is ``(ln 2)^((d-1)/d)``."""
    check_int(d, "d", 2)
    check_real(delta, "delta", 0, 1, lo_open=True, hi_open=True)
    return RadialFunction.power_log(1 - d, (1 - d) / d, delta**0.5, delta**0.25)


# kernel ---------------------------------------------------------------------
def _kernel_parts(d, r, t, s, dl, dr):
    """Kernel from exact endpoint distances ``dl = s - a`` and ``dr = b - s``."""
    a = abs(r - t)
    b = r + t
    denom = 4.0 * r * t  # b^2 - a^2
    root = np.sqrt(dr * (b + s)) * np.sqrt(dl * (s + a))
    return (root / denom) ** (d - 3) * s / denom


def kernel(d, t, r, s):
    """``K_t(r, s)``; defined on the open interval ``|r - t| < s < r + t``.

    Examples
    --------
    >>> round(kernel(3, 1.0, 2.0, 1.5), 12)
    0.1875
    """
    check_int(d, "d", 2)
    a = abs(r - t)
    b = r + t
    s_arr = np.asarray(s, dtype=np.float64)
    if np.any(s_arr <= a) or np.any(s_arr >= b):
        raise DomainError(f"s must lie in the open interval ({a}, {b})")
    out = _kernel_parts(d, float(r), float(t), s_arr, s_arr - a, b - s_arr)
    return float(out) if np.ndim(out) == 0 else out


@lru_cache(maxsize=None)
def c_d(d):
    """Normalizing constant: the reciprocal of ``integral K_1(1, s) ds`` over ``(0, 2)``.

    Examples
    --------
    >>> round(c_d(3), 12)
    2.0
    """
    check_int(d, "d", 2)
    res = integrate_endpoint_singular(
        lambda s, dl, dr: _kernel_parts(d, 1.0, 1.0, s, dl, dr), 0.0, 2.0, tol=1e-15, order=20
    )
    return 1.0 / res.value


def sphere_average(f, d, r, t, tol=1e-9):
    """``A_t f`` at radius ``r`` by singularity-aware adaptive quadrature.

    Returns a :class:`QuadratureResult`; ``r = 0`` gives ``f0(t)`` exactly.
    """
    check_int(d, "d", 2)
    check_real(r, "r", 0)
    check_real(t, "t", 0, lo_open=True)
    check_real(tol, "tol", 0, lo_open=True)
    r, t = float(r), float(t)
    if r == 0:
        return QuadratureResult(float(f(t)), 0.0, 1)
    if f.scale != 1.0:
        # linear in f: integrate the unit profile so results scale exactly
        if f.scale == 0:
            return ZERO
        return sphere_average(f.unit(), d, r, t, tol / abs(f.scale)).scaled(f.scale)
    a, b = abs(r - t), r + t
    lo, hi = f.support
    lo, hi = max(lo, a), min(hi, b)
    if hi <= lo:
        return ZERO
    cd = c_d(d)

    def phi(s, dl, dr):
        return _kernel_parts(d, r, t, s, dl, dr) * f(s)

    res = integrate_endpoint_singular(phi, a, b, lo, hi, tol / cd, f.breakpoints)
    return res.scaled(cd)


def sphere_average_mc(f, d, r, t, samples=100_000, seed=0):
    """Monte Carlo oracle: mean of ``f(x - t y)`` over uniform ``y`` on the unit sphere, ``x = (r, 0, ..., 0)``.

    Returns ``(mean, std_error)``; deterministic given ``seed``.
    """
    check_int(d, "d", 2)
    samples = check_int(samples, "samples", 1000)
    rng = np.random.Generator(np.random.Philox(seed))
    y = rng.standard_normal((samples, d))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    pts = -float(t) * y
    pts[:, 0] += float(r)
    vals = f(np.linalg.norm(pts, axis=1))
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))


def sphere_average_batch(f, d, r, ts, order=40, panels=None):
    """Fixed-order average for many ``t`` at once; used where thousands of averages are needed.

    Each half interval is split at the substituted breakpoints of ``f`` and
    integrated with one Gauss-Legendre rule per panel.
    """
    ts = np.asarray(ts, dtype=np.float64)
    return np.array([_fixed_average(f, d, float(r), float(t), order) for t in ts])


def _fixed_average(f, d, r, t, order):
    from .quadrature import gauss_legendre

    if r == 0:
        return float(f(t))
    a, b = abs(r - t), r + t
    lo, hi = f.support
    lo, hi = max(lo, a), min(hi, b)
    if hi <= lo:
        return 0.0
    x, w = gauss_legendre(order)
    m = 0.5 * (a + b)
    total = 0.0
    bps = [bp for bp in f.breakpoints if lo < bp < hi]
    if lo < m:
        cuts = sorted({math.sqrt(lo - a), math.sqrt(min(hi, m) - a), *(math.sqrt(bp - a) for bp in bps if bp < m)})
        for u0, u1 in zip(cuts[:-1], cuts[1:]):
            u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x
            dl = u * u
            s = a + dl
            total += 0.5 * (u1 - u0) * float(w @ (_kernel_parts(d, r, t, s, dl, (b - a) - dl) * f(s) * 2 * u))
    if hi > m:
        cuts = sorted({math.sqrt(b - hi), math.sqrt(b - max(lo, m)), *(math.sqrt(b - bp) for bp in bps if bp > m)})
        for v0, v1 in zip(cuts[:-1], cuts[1:]):
            v = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * x
            dr = v * v
            s = b - dr
            total += 0.5 * (v1 - v0) * float(w @ (_kernel_parts(d, r, t, s, (b - a) - dr, dr) * f(s) * 2 * v))
    return c_d(d) * total
