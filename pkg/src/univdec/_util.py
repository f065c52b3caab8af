"""Shared exact-arithmetic helpers, sentinels and errors."""
from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational

import numpy as np

DEFAULT_CAP = 2 ** 20
# Relative tolerance under which two float metric values count as tied.
FLOAT_TIE_TOL = 2.0 ** -35
# Relative tolerance for float-mode probability normalisation.
FLOAT_SUM_TOL = 2.0 ** -40


class EnumerationCapError(ValueError):
    """Raised when an exhaustive enumeration would exceed the configured cap."""


class VerificationError(AssertionError):
    """A checked inequality failed.  ``witness`` names the offending point."""

    def __init__(self, message, witness=None, report=None):
        super().__init__(message)
        self.witness = witness
        self.report = report


class _OffSupport:
    """Sentinel for quantities that are +infinity because the point has no prior mass."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OFF_SUPPORT"

    def __reduce__(self):
        return (_OffSupport, ())


OFF_SUPPORT = _OffSupport()


def enumeration_cap(cap=None):
    if cap is not None:
        return int(cap)
    env = os.environ.get("UNIVDEC_CAP")
    return int(env) if env else DEFAULT_CAP


def check_cap(count, cap=None, what="sequences"):
    limit = enumeration_cap(cap)
    if count > limit:
        raise EnumerationCapError(
            f"enumerating {count} {what} exceeds the cap of {limit} "
            "(raise it with UNIVDEC_CAP or an explicit cap argument)")


def to_fraction(value):
    """Read a probability or score exactly.

    Decimal strings and floats are interpreted by their decimal text, so
    ``0.1`` becomes ``1/10`` rather than the nearest binary float.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as an exact number")


def is_exact_number(value):
    return isinstance(value, (int, np.integer, Fraction)) and not isinstance(value, (bool, np.bool_))


def lcm_all(values):
    out = 1
    for v in values:
        out = math.lcm(out, int(v))
    return out


def int_array(values, bound=None):
    """Pack integers into int64 when ``bound`` guarantees no overflow, else an object array."""
    if bound is not None and bound < 2 ** 62:
        return np.asarray(values, dtype=np.int64)
    arr = np.empty(len(values), dtype=object)
    arr[:] = [int(v) for v in values]
    return arr


def log2_fraction(q):
    """log2 of a nonnegative rational, accurate for huge numerators/denominators."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("log of a negative number")
    if q == 0:
        return -math.inf
    return math.log2(q.numerator) - math.log2(q.denominator)


def le_pow2(ratio, exponent, rel_tol=FLOAT_TIE_TOL):
    """Decide ``ratio <= 2**exponent`` exactly whenever the exponent allows it.

    Exact when ``exponent`` is rational with a small denominator (``ratio**q <= 2**p``);
    otherwise falls back to a log comparison with a relative tolerance.
    """
    ratio = Fraction(ratio)
    if ratio <= 0:
        return True
    if isinstance(exponent, (int, np.integer, Fraction)):
        e = Fraction(exponent)
        if e.denominator <= 64 and abs(e.numerator) <= 4096:
            if e >= 0:
                return ratio ** e.denominator <= 2 ** e.numerator
            return ratio ** e.denominator * 2 ** (-e.numerator) <= 1
    lhs = log2_fraction(ratio)
    e = float(exponent)
    return lhs <= e + rel_tol * max(1.0, abs(e))


def float_ge(a, b, rel_tol=FLOAT_TIE_TOL):
    """Vectorised ``a >= b`` where values within ``rel_tol`` relative count as tied."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        scale = np.maximum(np.abs(a), np.abs(b))
        tied = (a == b) | (np.abs(a - b) <= rel_tol * scale)
    return tied | (a > b)


class CheckReport:
    """Outcome of one verification pass.

    ``worst`` is the largest observed lhs/rhs ratio (an exact Fraction when
    the check ran in rational mode), ``slack`` the matching per-symbol
    exponent, ``witness`` the point where ``worst`` was attained.
    """

    def __init__(self, name, passed, worst=None, slack=None, witness=None, **details):
        self.name = name
        self.passed = bool(passed)
        self.worst = worst
        self.slack = slack
        self.witness = witness
        self.details = details

    def __repr__(self):
        state = "pass" if self.passed else "FAIL"
        return f"CheckReport({self.name}: {state}, worst={self.worst}, slack={self.slack}, witness={self.witness})"

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "worst": self.worst,
                "slack": self.slack, "witness": self.witness, **self.details}

    def raise_if_failed(self):
        if not self.passed:
            raise VerificationError(f"{self.name} violated at {self.witness}", self.witness, self)
        return self


def max_ratio(num, den, mask):
    """Exact max of num/den over cells where ``mask`` holds; returns (Fraction, flat index)."""
    num, den = np.asarray(num, dtype=object), np.asarray(den, dtype=object)
    idx = np.flatnonzero(mask.ravel())
    if idx.size == 0:
        return None, None
    nf = num.ravel()[idx]
    df = den.ravel()[idx]
    approx = np.array([float(Fraction(int(a), int(b))) for a, b in zip(nf, df)])
    cand = idx[approx >= approx.max() * (1 - 1e-9)] if approx.max() > 0 else idx
    best = max(cand, key=lambda k: Fraction(int(num.ravel()[k]), int(den.ravel()[k])))
    return Fraction(int(num.ravel()[best]), int(den.ravel()[best])), int(best)
