"""Special functions needed by the closed forms.

Every series routine returns a :class:`SpecFunResult` carrying an absolute
error estimate and the number of terms used.  Values too large for a double
are returned in split form ``value * exp(log_scale)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy import integrate

EULER_GAMMA = 0.57721566490153286061
TERM_BUDGET = 10_000
_EPS = 2.220446049250313e-16
_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


class SpecFunDomainError(ValueError):
    """Argument outside the supported domain."""


class SpecFunAccuracyError(ArithmeticError):
    """Series failed to converge within the term budget."""


@dataclass(frozen=True)
class SpecFunResult:
    value: float
    est_error: float
    terms_used: int
    log_scale: float = 0.0

    @property
    def log_value(self) -> float:
        """ln|true value|, usable when ``value`` alone would overflow."""
        if self.value == 0.0:
            return -math.inf
        return math.log(abs(self.value)) + self.log_scale

    def __float__(self) -> float:
        if self.log_scale == 0.0:
            return float(self.value)
        return float(self.value) * math.exp(self.log_scale)


def gamma_ln(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise SpecFunDomainError(f"gamma_ln requires x > 0, got {x}")
    return math.lgamma(x)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1)."""
    if k < 0:
        raise SpecFunDomainError("pochhammer needs k >= 0")
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def _is_nonpositive_int(v: float) -> bool:
    return v <= 0 and float(v).is_integer()


# ---------------------------------------------------------------- Bessel K0


def _k0_series(x: float) -> tuple[float, int]:
    q = 0.25 * x * x
    term = 1.0
    i0 = 1.0
    tail = 0.0
    harmonic = 0.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        tail += term * harmonic
        if term * harmonic < _EPS * 1e-2 * abs(tail) and term < _EPS * 1e-2 * i0:
            break
    return -(math.log(0.5 * x) + EULER_GAMMA) * i0 + tail, k + 1


def _k0_steed(x: float) -> tuple[float, int]:
    # Steed's continued fraction (Temme's CF2) for order zero.
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, TERM_BUDGET):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s, i
    raise SpecFunAccuracyError(f"K0 continued fraction did not converge at x={x}")


def bessel_k0(x: float) -> SpecFunResult:
    """Modified Bessel function K0 for x > 0.

    Log series below x = 2, Steed's continued fraction above.
    """
    if not x > 0:
        raise SpecFunDomainError(f"bessel_k0 requires x > 0, got {x}")
    if x <= 2.0:
        v, terms = _k0_series(x)
        err = 8 * _EPS * (abs(v) + abs(math.log(x)) * math.cosh(x))
    else:
        v, terms = _k0_steed(x)
        err = 16 * _EPS * abs(v)
    return SpecFunResult(v, err, terms)


# ----------------------------------------------------- hypergeometric series


def _pfq(a: Sequence[float], b: Sequence[float], x: float, budget: int = TERM_BUDGET) -> SpecFunResult:
    """Generic pFq power series with Kahan summation and overflow rescaling."""
    for bj in b:
        if _is_nonpositive_int(bj):
            raise SpecFunDomainError(f"lower parameter {bj} is a non-positive integer")
    if x == 0.0:
        return SpecFunResult(1.0, 0.0, 1)
    p, q = len(a), len(b)
    if p > q + 1 or (p == q + 1 and abs(x) >= 1.0):
        raise SpecFunDomainError("series diverges for these parameters")
    k_safe = max([abs(v) for v in (*a, *b)] + [0.0]) + 1.0

    def ratio(k: int) -> float:
        num = x / (k + 1)
        for ai in a:
            num *= ai + k
        for bj in b:
            num /= bj + k
        return num

    s, comp, t, abs_sum, log_scale = 1.0, 0.0, 1.0, 1.0, 0.0
    for k in range(budget):
        t *= ratio(k)
        y = t - comp
        tmp = s + y
        comp = (tmp - s) - y
        s = tmp
        abs_sum += abs(t)
        if t == 0.0:
            return _finish(s, _EPS * abs_sum, k + 2, log_scale)
        if abs(s) > _RESCALE or abs_sum > _RESCALE:
            s /= _RESCALE
            comp /= _RESCALE
            t /= _RESCALE
            abs_sum /= _RESCALE
            log_scale += _LOG_RESCALE
        if k + 1 >= k_safe:
            rho = abs(ratio(k + 1))
            if p == q + 1:
                rho = max(rho, abs(x))
            if rho < 1.0:
                tail = abs(t) * rho / (1.0 - rho)
                if tail <= _EPS * abs(s) * 0.5:
                    return _finish(s, tail + 4 * _EPS * abs_sum, k + 2, log_scale)
    raise SpecFunAccuracyError(f"series exceeded the {budget}-term budget at x={x}")


def _finish(s: float, err: float, terms: int, log_scale: float) -> SpecFunResult:
    if log_scale and s != 0.0 and abs(math.log(abs(s)) + log_scale) < 700.0:
        f = math.exp(log_scale)
        return SpecFunResult(s * f, err * f, terms)
    return SpecFunResult(s, err, terms, log_scale)


def hyp1f1(a: float, b: float, x: float, budget: int = TERM_BUDGET) -> SpecFunResult:
    """Kummer's M(a, b, x).

    Negative arguments go through Kummer's transformation so the summed
    series has positive terms whenever a and b are positive.
    """
    if _is_nonpositive_int(b):
        raise SpecFunDomainError(f"b = {b} is a non-positive integer")
    if x < 0 and not _is_nonpositive_int(a):
        inner = _pfq((b - a,), (b,), -x, budget)
        return SpecFunResult(inner.value, inner.est_error, inner.terms_used, inner.log_scale + x)
    return _pfq((a,), (b,), x, budget)


def hyp2f1_terminating(n: int, b: float, c: float, x: float) -> SpecFunResult:
    """2F1(-n, b; c; x) as its exact finite sum of n + 1 terms."""
    if n < 0 or int(n) != n:
        raise SpecFunDomainError("n must be a non-negative integer")
    s, comp, t, abs_sum = 1.0, 0.0, 1.0, 1.0
    for k in range(int(n)):
        if c + k == 0:
            raise SpecFunDomainError("c + k vanishes inside the finite sum")
        t *= (k - n) * (b + k) / ((c + k) * (k + 1)) * x
        y = t - comp
        tmp = s + y
        comp = (tmp - s) - y
        s = tmp
        abs_sum += abs(t)
    return SpecFunResult(s, 2 * _EPS * abs_sum, int(n) + 1)


def hyp2f1(a: float, b: float, c: float, x: float, budget: int = TERM_BUDGET) -> SpecFunResult:
    """Gauss 2F1 by its power series, |x| < 1."""
    return _pfq((a, b), (c,), x, budget)


def hyp2f2(a1: float, a2: float, b1: float, b2: float, x: float, budget: int = TERM_BUDGET) -> SpecFunResult:
    """2F2(a1, a2; b1, b2; x).

    The term budget caps the usable range at roughly x < 5000 for
    parameters of order 10^3.
    """
    return _pfq((a1, a2), (b1, b2), x, budget)


# ------------------------------------------------- parabolic cylinder D_nu


def pcf_d(nu: float, x: float) -> SpecFunResult:
    """Parabolic cylinder function D_nu(x) for nu <= 0.

    Closed form at x = 0, otherwise the Laplace-type integral
    e^{-x^2/4}/Gamma(-nu) * int_0^inf t^{-nu-1} e^{-t^2/2 - x t} dt
    by adaptive quadrature, with the integrand normalised at its peak.
    """
    if nu > 0:
        raise SpecFunDomainError("pcf_d supports nu <= 0 only")
    if nu == 0:
        return SpecFunResult(math.exp(-0.25 * x * x), _EPS, 1)
    if x == 0:
        log_v = 0.5 * nu * math.log(2.0) + 0.5 * math.log(math.pi) - math.lgamma(0.5 * (1.0 - nu))
        return _finish(1.0, 4 * _EPS, 1, log_v)
    mu = -nu
    if mu >= 1.0:
        peak = 0.5 * (-x + math.sqrt(x * x + 4.0 * (mu - 1.0)))
        peak = max(peak, 1e-300) if mu > 1.0 else 0.0
        phi0 = (mu - 1.0) * math.log(peak) - 0.5 * peak * peak - x * peak if peak > 0 else 0.0

        def f(t: float) -> float:
            if t <= 0.0:
                return 1.0 if mu == 1.0 else 0.0
            return math.exp((mu - 1.0) * math.log(t) - 0.5 * t * t - x * t - phi0)

        width = 1.0 / math.sqrt(1.0 + (mu - 1.0) / max(peak, 1e-300) ** 2) if peak > 0 else 1.0
        pieces = [(0.0, peak), (peak, peak + 40.0 * width), (peak + 40.0 * width, math.inf)]
        jac = 1.0
    else:
        # t = u^{1/mu} removes the t^{mu-1} endpoint singularity
        phi0 = 0.0

        def f(u: float) -> float:
            if u <= 0.0:
                return 1.0
            t = u ** (1.0 / mu)
            return math.exp(-0.5 * t * t - x * t)

        pieces = [(0.0, 1.0), (1.0, math.inf)]
        jac = 1.0 / mu
    total, err, evals = 0.0, 0.0, 0
    for lo, hi in pieces:
        if hi <= lo:
            continue
        val, e, info = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200, full_output=1)[:3]
        total += val
        err += e
        evals += info["neval"]
    log_v = -0.25 * x * x - math.lgamma(mu) + phi0 + math.log(jac)
    return _finish(total, err + 4 * _EPS * total, max(evals, 1), log_v)
