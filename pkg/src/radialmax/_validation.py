"""Exception types and small argument-checking helpers shared by all modules."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Real

import numpy as np


class RadialMaxError(Exception):
    """Base class for all errors raised by :mod:`radialmax`."""


class ParameterError(RadialMaxError, ValueError):
    """An argument is outside its documented domain."""


class RangeError(ParameterError):
    """An integer index or depth is out of range."""


class EmptyWindowError(RadialMaxError):
    """A window does not meet the dilation set (callers treat the count as 0)."""


class FitError(RadialMaxError, ValueError):
    """A regression was asked for with too few or degenerate abscissae."""


class ModeError(ParameterError):
    """A region operation was requested in a mode that does not support it."""


class CaseError(ParameterError):
    """A formula was evaluated outside the parameter case it is valid for."""


class DomainError(ParameterError):
    """A kernel was evaluated outside its open support interval."""


class ConvergenceError(RadialMaxError, ArithmeticError):
    """Quadrature did not reach the tolerance within its evaluation budget.

    The best available estimate is kept on the exception.
    """

    def __init__(self, message, value=math.nan, abs_error=math.inf, evaluations=0):
        super().__init__(message)
        self.value = value
        self.abs_error = abs_error
        self.evaluations = evaluations


def check_int(value, name, lo=None, hi=None, exc=RangeError):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise exc(f"{name}={value} is below the minimum {lo}")
    if hi is not None and value > hi:
        raise exc(f"{name}={value} is above the maximum {hi}")
    return value


def check_real(value, name, lo=None, hi=None, *, lo_open=False, hi_open=False):
    if isinstance(value, bool) or not isinstance(value, Real):
        raise ParameterError(f"{name} must be a real number, got {value!r}")
    if isinstance(value, float) and not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")
    if lo is not None and (value < lo or (lo_open and value == lo)):
        bracket = "(" if lo_open else "["
        raise ParameterError(f"{name}={value} must lie in {bracket}{lo}, ...")
    if hi is not None and (value > hi or (hi_open and value == hi)):
        bracket = ")" if hi_open else "]"
        raise ParameterError(f"{name}={value} must lie in ..., {hi}{bracket}")
    return value


def as_exact(value):
    """Return ``value`` as a :class:`Fraction` when it is exactly rational input.

    Integers and fractions stay exact; floats are returned unchanged so that
    callers fall back to floating arithmetic.
    """
    if isinstance(value, bool):
        raise ParameterError("booleans are not numbers here")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return parse_rational(value)
    return float(value)


def parse_rational(text):
    """Parse ``"a/b"`` to an exact Fraction, integers exactly, decimals as float."""
    text = str(text).strip()
    if "/" in text:
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParameterError(f"cannot parse rational {text!r}") from exc
    try:
        return Fraction(int(text))
    except ValueError:
        pass
    try:
        value = float(text)
    except ValueError as exc:
        raise ParameterError(f"cannot parse number {text!r}") from exc
    if not math.isfinite(value):
        raise ParameterError(f"number must be finite, got {text!r}")
    return value


def check_1d_int_array(cells, name="cells"):
    arr = np.asarray(cells)
    if arr.ndim != 1:
        raise ParameterError(f"{name} must be one-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise ParameterError(f"{name} must hold integers")
    return arr.astype(np.int64, copy=False)
