"""Least-squares exponent fits on log-log data."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from ._validation import FitError


@dataclass(frozen=True)
class ExponentFit:
    """Slope, intercept and R² of an ordinary least-squares line.

    ``scale_window`` is the pair of (integer) scale indices spanned by the fit,
    when the abscissae are dyadic scale indices.
    """

    slope: float
    intercept: float
    r_squared: float
    scale_window: Optional[Tuple[int, int]] = None
    n_points: int = 0

    def to_dict(self):
        out = asdict(self)
        out["scale_window"] = None if self.scale_window is None else list(self.scale_window)
        return out

    @classmethod
    def from_dict(cls, data):
        window = data.get("scale_window")
        return cls(
            float(data["slope"]),
            float(data["intercept"]),
            float(data["r_squared"]),
            None if window is None else (int(window[0]), int(window[1])),
            int(data.get("n_points", 0)),
        )


def fit_exponent(x, y=None, scale_window=None):
    """Fit ``y = slope * x + intercept`` by ordinary least squares.

    Accepts either two arrays or a single sequence of ``(x, y)`` pairs.

    Examples
    --------
    >>> fit_exponent([(1, 2), (2, 4), (3, 6)]).slope
    2.0
    """
    if y is None:
        pts = np.asarray(x, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise FitError("expected a sequence of (x, y) pairs")
        x, y = pts[:, 0], pts[:, 1]
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("x and y must be one-dimensional and of equal length")
    if x.size < 3:
        raise FitError(f"need at least 3 points for a fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitError("non-finite values in fit data")
    xm = x.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx <= 1e-300 or np.unique(x).size < 2:
        raise FitError("degenerate abscissae: all x values coincide")
    ym = y.mean()
    dy = y - ym
    slope = float(dx @ dy) / sxx
    intercept = float(ym - slope * xm)
    syy = float(dy @ dy)
    resid = dy - slope * dx
    if syy == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - float(resid @ resid) / syy))
    # exact lines should report exact slopes
    if np.allclose(resid, 0.0, atol=1e-12 * max(1.0, abs(slope))):
        r2 = 1.0
        slope = float(np.round(slope, 12))
        intercept = float(np.round(intercept, 12))
    return ExponentFit(slope, intercept, r2, scale_window, int(x.size))
