"""scikit-learn style front ends.

The dilation set plays the role of the training data: ``fit(E)`` reads its
covering profile, and ``transform``/``predict`` evaluate derived quantities on
new inputs (exponents ``alpha``, points ``(1/p, 1/q)``, radii ``r``).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import ParameterError
from .dilation_sets import DilationSet
from .maximal_ops import maximal_value
from .spectra import covering_profile, minkowski_estimate, nu_sharp_estimate
from .type_sets import ExponentPair, TypeRegion, ClosedFormNuSharp, EstimatedNuSharp, region_membership


def _check_set(E):
    if not isinstance(E, DilationSet):
        raise ParameterError(f"expected a DilationSet, got {type(E).__name__}")
    return E


class CoveringSpectrum(BaseEstimator, TransformerMixin):
    """Estimate ``nu_sharp`` from the window covering counts of a dilation set.

    Parameters
    ----------
    window : tuple of int, optional
        Scale window ``(m_min, m_max)`` for the slope fits; the default drops
        the coarsest quarter and finest eighth of the scales.

    Attributes
    ----------
    profile_ : CoveringProfile
    minkowski_ : float
        Estimated upper Minkowski dimension.
    """

    def __init__(self, window=None):
        self.window = window

    def fit(self, E, y=None):
        E = _check_set(E)
        self.profile_ = covering_profile(E)
        self.minkowski_ = minkowski_estimate(self.profile_, self.window).slope
        return self

    def transform(self, alphas):
        """``nu_sharp`` estimates, one per entry of ``alphas``."""
        check_is_fitted(self, "profile_")
        a = check_array(np.asarray(alphas, dtype=np.float64).reshape(-1, 1), ensure_all_finite=True)
        return np.array([nu_sharp_estimate(self.profile_, float(v), self.window).slope for v in a[:, 0]])


class RadialTypeSet(BaseEstimator):
    """Predicted closed radial type set of a dilation set.

    Parameters
    ----------
    d : int
        Ambient dimension.
    use_estimates : bool
        In ``d = 2``, build the ``nu_sharp`` constraint from the estimator
        instead of the closed form given by the set's analytic profile.
    """

    def __init__(self, d=2, use_estimates=False):
        self.d = d
        self.use_estimates = use_estimates

    def fit(self, E, y=None):
        E = _check_set(E)
        prof = E.profile
        if self.use_estimates or prof is None:
            P = covering_profile(E)
            beta = min(1.0, max(0.0, minkowski_estimate(P).slope))
            nu = EstimatedNuSharp(P)
        else:
            beta = prof.beta
            nu = ClosedFormNuSharp(prof.beta, prof.gamma)
        if self.d == 2:
            self.region_ = TypeRegion(2, beta, nu, "closure_d2")
        else:
            self.region_ = TypeRegion(self.d, beta)
        return self

    def predict(self, X):
        """``"interior"``, ``"boundary"`` or ``"exterior"`` for each row ``(1/p, 1/q)``."""
        check_is_fitted(self, "region_")
        X = check_array(X, ensure_all_finite=True)
        if X.shape[1] != 2:
            raise ParameterError("points must have two columns (1/p, 1/q)")
        return np.array([region_membership(self.region_, ExponentPair(float(x), float(y))) for x, y in X])


class MaximalOperator(BaseEstimator, TransformerMixin):
    """``r -> M_E f(r)`` for a fixed radial function, with ``E`` supplied to ``fit``."""

    def __init__(self, f=None, d=3, tol=1e-9):
        self.f = f
        self.d = d
        self.tol = tol

    def fit(self, E, y=None):
        self.set_ = _check_set(E)
        if self.f is None:
            raise ParameterError("MaximalOperator needs a radial function f")
        return self

    def transform(self, radii):
        check_is_fitted(self, "set_")
        r = check_array(np.asarray(radii, dtype=np.float64).reshape(-1, 1), ensure_all_finite=True)
        return np.array([maximal_value(self.set_, self.f, self.d, float(v), self.tol) for v in r[:, 0]])
