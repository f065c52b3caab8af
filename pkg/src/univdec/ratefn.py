"""Rate functions over a prior and their canonical versions.

A function R on X^n is a rate function over Q_n when
``Q_n(R(X) >= t) <= 2^{-n t}`` for every t.  Exact-mode rate functions are
stored through ``scale = 2^{n R(x)}``: a nonnegative rational, ``0`` for
R = -inf, ``math.inf`` for R = +inf.  In that form every certificate below
is a comparison of rationals, e.g. the defining inequality at an achieved
value t = R(x) reads ``Q_n(R(X) >= R(x)) * scale(x) <= 1``.

Survival functions are step functions that only move at achieved values,
so checking every achieved value is exhaustive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._util import (
    FLOAT_TIE_TOL, OFF_SUPPORT, CheckReport, VerificationError, is_exact_number, le_pow2,
    log2_fraction, to_fraction,
)
from .pairwise import pem_from_keys, prior_weights
from .sequences import rank, unrank, validate_sequence


class RateFunction:
    def __init__(self, n, scale=None, values=None):
        if (scale is None) == (values is None):
            raise ValueError("give exactly one of scale (exact) or values (float)")
        self.n = int(n)
        if scale is not None:
            arr = np.empty(len(scale), dtype=object)
            items = []
            for v in scale:
                if isinstance(v, float) and v == math.inf:
                    items.append(math.inf)
                else:
                    v = to_fraction(v)
                    if v < 0:
                        raise ValueError("scale values 2^{nR} cannot be negative")
                    items.append(v)
            arr[:] = items
            self.scale = arr
            self._values = None
        else:
            self.scale = None
            self._values = np.asarray(values, dtype=float)

    @classmethod
    def from_exponents(cls, n, exponents):
        """Exact rate function from integer values of n*R (``-inf`` allowed)."""
        scale = [Fraction(0) if e == -math.inf else (math.inf if e == math.inf else Fraction(2) ** int(e))
                 for e in exponents]
        return cls(n, scale=scale)

    @classmethod
    def from_values(cls, n, values):
        """From R values; exact whenever every n*R(x) is an integer or infinite."""
        nr = []
        for v in values:
            if isinstance(v, float) and math.isinf(v):
                nr.append(v)
            elif is_exact_number(v) and (Fraction(v) * n).denominator == 1:
                nr.append(int(Fraction(v) * n))
            else:
                return cls(n, values=[float(v) for v in values])
        return cls.from_exponents(n, nr)

    @property
    def exact(self):
        return self.scale is not None

    def __len__(self):
        return len(self.scale) if self.exact else len(self._values)

    def values(self):
        """R(x) as floats."""
        if not self.exact:
            return self._values
        out = []
        for s in self.scale:
            if s == math.inf:
                out.append(math.inf)
            else:
                out.append(log2_fraction(s) / self.n)
        return np.array(out)

    def keys(self):
        """Order-equivalent keys (the scale in exact mode)."""
        return self.scale if self.exact else self._values

    def __call__(self, x_rank):
        return self.values()[x_rank]


@dataclass(frozen=True)
class RateCertificate:
    kind: str
    passed: bool
    slack: float
    witness: object = None

    def as_dict(self):
        return {"kind": self.kind, "passed": self.passed, "slack": self.slack, "witness": self.witness}


def _check_length(prior, R):
    if R.n != prior.n or len(R) != prior.alphabet_size ** prior.n:
        raise ValueError("rate function must be defined on every sequence of the prior's blocklength")


def survival(prior, R, cap=None):
    """Q_n(R(X) >= R(x)) for every x, as a 1-D probability column."""
    _check_length(prior, R)
    return pem_from_keys(prior, np.asarray(R.keys()), cap)


def _support(prior, cap):
    w, den = prior_weights(prior, cap)
    if den is None:
        return np.isfinite(w[0]), w, den
    return np.asarray(np.asarray(w) != 0, dtype=bool), w, den


def _surv_fractions(prior, R, cap):
    col = survival(prior, R, cap)
    if not col.exact:
        return None, col
    return [Fraction(int(v), col.den) for v in col.num], col


def omega(prior, R, x, cap=None):
    """Omega_R(x) = -(1/n) log2 Q_n(R(X) >= R(x)); ``OFF_SUPPORT`` if that mass is 0."""
    x = validate_sequence(x, prior.alphabet_size, prior.n)
    col = survival(prior, R, cap)
    s = col[rank(x, prior.alphabet_size)]
    if s == 0:
        return OFF_SUPPORT
    return -(log2_fraction(s) if isinstance(s, Fraction) else math.log2(s)) / prior.n


def canonical_rate_function(prior, R, cap=None):
    """Omega_R as a rate function; off-support points with zero survival get +inf."""
    col = survival(prior, R, cap)
    if col.exact:
        scale = [Fraction(col.den, int(v)) if v else math.inf for v in col.num]
        return RateFunction(prior.n, scale=scale)
    vals = [-v / prior.n if np.isfinite(v) else math.inf for v in col.log2]
    return RateFunction(prior.n, values=vals)


def _products(prior, R, cap):
    """Per x: S(x) * scale(x) = 2^{n (R(x) - Omega_R(x))}, exact where possible."""
    if R.exact and prior.exact:
        surv, _ = _surv_fractions(prior, R, cap)
        out = []
        for s, t in zip(surv, R.scale):
            if t == math.inf:
                out.append(math.inf if s > 0 else Fraction(0))
            else:
                out.append(s * t)
        return out, True
    col = survival(prior, R, cap)
    ls = col.log2_values() if col.exact else col.log2
    with np.errstate(invalid="ignore"):
        lp = ls + prior.n * np.asarray(R.values(), dtype=float)
    return [float(2.0 ** v) if np.isfinite(v) else (math.inf if v > 0 else 0.0) for v in lp], False


def _log2_any(v):
    if v == math.inf:
        return math.inf
    if v == 0:
        return -math.inf
    return log2_fraction(v) if isinstance(v, Fraction) else math.log2(v)


def certify_rate_function(prior, R, cap=None):
    """Check Q_n(R(X) >= t) <= 2^{-n t} at every achieved value t.

    The reported slack is max_t (1/n) log2(Q_n(R >= t) 2^{n t}), which is
    <= 0 exactly when R is a rate function.
    """
    prods, exact = _products(prior, R, cap)
    vals = R.values()
    checked = [(i, p) for i, p in enumerate(prods) if vals[i] != -math.inf]
    if not checked:
        return RateCertificate("is-rate-function", True, -math.inf)
    i_worst, p_worst = max(checked, key=lambda t: t[1])
    limit = 1 if exact else 1 + FLOAT_TIE_TOL
    passed = not p_worst > limit
    slack = _log2_any(p_worst) / prior.n
    witness = None if passed else float(vals[i_worst])
    return RateCertificate("is-rate-function", passed, slack, witness)


def certify_tightness(prior, R, slack=0, cap=None):
    """Check 2^{-n(R+slack)} <= Q_n(R(X) >= R(x)) <= 2^{-n(R-slack)} on the support.

    The certificate's ``slack`` field carries the minimal feasible value.
    """
    prods, exact = _products(prior, R, cap)
    support, _, _ = _support(prior, cap)
    minimal, witness = 0.0, None
    passed = True
    bound = Fraction(slack) * prior.n if is_exact_number(slack) else float(slack) * prior.n
    for i in np.flatnonzero(support):
        p = prods[i]
        lp = abs(_log2_any(p))
        if lp / prior.n > minimal:
            minimal = lp / prior.n
            witness = unrank(int(i), prior.alphabet_size, prior.n)
        if p == 0 or p == math.inf:
            ok = False
        elif exact:
            ok = le_pow2(p, bound) and le_pow2(1 / p, bound)
        else:
            ok = lp <= float(bound) + FLOAT_TIE_TOL * max(1.0, float(bound))
        if not ok and passed:
            passed = False
    return RateCertificate("asymptotically-tight", passed, minimal, None if passed else witness)


def check_order_preservation(prior, R, cap=None):
    """R(x1) <= R(x2) implies Omega(x1) <= Omega(x2); strictly when Q(x2) > 0."""
    keys = list(R.keys())
    col = survival(prior, R, cap)
    surv = [col[i] for i in range(len(keys))]
    support, _, _ = _support(prior, cap)
    order = sorted(range(len(keys)), key=lambda i: keys[i])
    n, q = prior.n, prior.alphabet_size
    # Omega is decreasing in survival, so the checks are on survival values.
    for a_pos, i in enumerate(order):
        for j in order[a_pos:]:
            if keys[i] > keys[j]:
                continue
            if surv[i] < surv[j]:
                raise VerificationError("order not preserved", (unrank(i, q, n), unrank(j, q, n)))
            if keys[i] < keys[j] and support[j] and not surv[i] > surv[j]:
                raise VerificationError("strict order not preserved", (unrank(i, q, n), unrank(j, q, n)))
    return CheckReport("order-preservation", True)


def check_upper_bound_property(prior, R, cap=None):
    """For a certified rate function, R(x) <= Omega_R(x) for every x."""
    cert = certify_rate_function(prior, R, cap)
    if not cert.passed:
        raise ValueError(f"not a rate function (witness t = {cert.witness})")
    prods, exact = _products(prior, R, cap)
    worst, witness = None, None
    for i, p in enumerate(prods):
        if worst is None or p > worst:
            worst, witness = p, unrank(i, prior.alphabet_size, prior.n)
    ok = worst <= 1 if exact else worst <= 1 + FLOAT_TIE_TOL
    return CheckReport("R<=Omega", ok, worst, _log2_any(worst) / prior.n, witness).raise_if_failed()


def exp_moment(prior, R, cap=None):
    """E_Q[2^{n R(X)}] over the support: exact Fraction in exact mode."""
    support, w, den = _support(prior, cap)
    if R.exact and den is not None:
        total = Fraction(0)
        for i in np.flatnonzero(support):
            total += Fraction(int(w[i]), den) * R.scale[i]
        return total
    lw = w[0] if den is None else np.log2(np.asarray(w, dtype=float)) - math.log2(den)
    vals = np.asarray(R.values(), dtype=float)
    with np.errstate(invalid="ignore"):
        terms = lw[support] + prior.n * vals[support]
    return float(np.sum(np.exp2(terms)))


def expectation_bound(prior, R, B, cap=None):
    """Check E_Q[2^{n R(X)}] <= 1 + ln(2) B for a rate function bounded by B.

    The boundedness precondition is n R(X) <= B almost surely; the endpoint
    n R = B carries no weight in the integral the bound comes from.
    """
    cert = certify_rate_function(prior, R, cap)
    if not cert.passed:
        raise ValueError(f"not a rate function (witness t = {cert.witness})")
    support, _, _ = _support(prior, cap)
    vals = R.values()
    for i in np.flatnonzero(support):
        if R.exact and is_exact_number(B):
            above = not le_pow2(R.scale[i], B) if R.scale[i] != math.inf else True
        else:
            above = prior.n * vals[i] > float(B) * (1 + FLOAT_TIE_TOL) + FLOAT_TIE_TOL
        if above:
            raise ValueError(f"n R(x) exceeds B = {B} at x = {unrank(int(i), prior.alphabet_size, prior.n)}")
    lhs = exp_moment(prior, R, cap)
    rhs = 1 + math.log(2) * float(B)
    ok = float(lhs) <= rhs * (1 + FLOAT_TIE_TOL)
    return CheckReport("expectation-bound", ok, lhs, None, None, bound=rhs).raise_if_failed()


def asymptotic_condition_check(prior, R, cap=None):
    """Measure lambda = max_x [R - Omega_R]_+ and chi = (1/n) log2 E_Q[2^{nR}].

    Verifies the Markov step 2^{-n Omega_R(x)} <= E_Q[2^{nR}] 2^{-n R(x)} on
    the support and returns the tightness certificate with slack max(lambda, chi).
    """
    support, _, _ = _support(prior, cap)
    prods, exact = _products(prior, R, cap)
    moment = exp_moment(prior, R, cap)
    lam = 0.0
    for i in np.flatnonzero(support):
        p = prods[i]
        ok = p <= moment if exact else p <= moment * (1 + FLOAT_TIE_TOL)
        if not ok:
            raise VerificationError("Markov step violated", unrank(int(i), prior.alphabet_size, prior.n))
        lam = max(lam, _log2_any(p) / prior.n)
    chi = _log2_any(moment) / prior.n
    cert = RateCertificate("asymptotically-tight", True, max(lam, chi))
    return CheckReport("asymptotic-condition", True, moment, max(lam, chi), None,
                       lam=lam, chi=chi, moment=moment, certificate=cert)


def likelihood_ratio_rate_function(prior, P, cap=None):
    """R(x) = (1/n) log2(P_n(x) / Q_n(x)); points outside the prior's support get -inf.

    ``P`` is a prior object or a sequence of masses in rank order.
    """
    if hasattr(P, "weights"):
        pw, pden = P.weights(cap)
        pmass = [Fraction(int(v), pden) for v in pw]
    else:
        pmass = [to_fraction(v) for v in P]
    if sum(pmass) != 1 or any(v < 0 for v in pmass):
        raise ValueError("P must be a probability distribution")
    w, den = prior.weights(cap)
    scale = [Fraction(0) if int(wi) == 0 else p / Fraction(int(wi), den) for p, wi in zip(pmass, w)]
    return RateFunction(prior.n, scale=scale)


DEFAULT_SCALES = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(2, 3), Fraction(1),
                  Fraction(3, 2), Fraction(2), Fraction(4), Fraction(8))


def random_rate_function(rng, n, alphabet_size, scales=DEFAULT_SCALES):
    """A random function R drawn from a small discrete set (so ties are common)."""
    idx = rng.integers(len(scales), size=alphabet_size ** n)
    return RateFunction(n, scale=[scales[i] for i in idx])
