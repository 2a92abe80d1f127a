"""Gamma distribution routines for integer shapes.

The regularized incomplete gamma function uses the power series below
``a + 1`` and a modified-Lentz continued fraction above it. Quantiles are
found by Newton iteration from a Wilson-Hilferty start, falling back to
bisection whenever a step leaves the current bracket.
"""

import logging
import math
import sys
from statistics import NormalDist

from bobtaillab.core import ConvergenceError, DomainError, require, settings

logger = logging.getLogger(__name__)

_EPS = 1e-16
_TINY = sys.float_info.min / sys.float_info.epsilon


def _check_shape_scale(shape: int, scale: float) -> None:
    require(isinstance(shape, int) and shape >= 1, f"shape must be a positive integer, got {shape!r}")
    require(scale > 0.0 and math.isfinite(scale), f"scale must be positive and finite, got {scale!r}")


def log_factorial(n: int) -> float:
    require(n >= 0, f"factorial of negative number {n}")
    return math.lgamma(n + 1)


def gamma_pdf(t: float, shape: int, scale: float) -> float:
    """Density t^(shape-1) / ((shape-1)! scale^shape) e^(-t/scale)"""
    _check_shape_scale(shape, scale)
    require(t >= 0.0, f"gamma_pdf is defined for t >= 0, got {t!r}")
    if t == 0.0:
        return 1.0 / scale if shape == 1 else 0.0
    log_density = (shape - 1) * math.log(t) - log_factorial(shape - 1) - shape * math.log(scale) - t / scale
    return math.exp(log_density)


def _series(a: int, x: float, max_iterations: int) -> float:
    term = 1.0 / a
    total = term
    ap = float(a)
    for _ in range(max_iterations):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ConvergenceError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _continued_fraction(a: int, x: float, max_iterations: int) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, max_iterations + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ConvergenceError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def regularized_lower_gamma(a: int, x: float, *, max_iterations: int | None = None) -> float:
    """P(a, x), the regularized lower incomplete gamma function"""
    require(x >= 0.0, f"x must be non-negative, got {x!r}")
    if max_iterations is None:
        max_iterations = settings.quantile_max_iterations
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _series(a, x, max_iterations)
    return 1.0 - _continued_fraction(a, x, max_iterations)


def regularized_upper_gamma(a: int, x: float, *, max_iterations: int | None = None) -> float:
    """Q(a, x) = 1 - P(a, x), computed directly in the upper tail"""
    require(x >= 0.0, f"x must be non-negative, got {x!r}")
    if max_iterations is None:
        max_iterations = settings.quantile_max_iterations
    if x == 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - _series(a, x, max_iterations)
    return _continued_fraction(a, x, max_iterations)


def gamma_cdf(t: float, shape: int, scale: float) -> float:
    _check_shape_scale(shape, scale)
    require(t >= 0.0, f"gamma_cdf is defined for t >= 0, got {t!r}")
    return regularized_lower_gamma(shape, t / scale)


def gamma_sf(t: float, shape: int, scale: float) -> float:
    _check_shape_scale(shape, scale)
    require(t >= 0.0, f"gamma_sf is defined for t >= 0, got {t!r}")
    return regularized_upper_gamma(shape, t / scale)


def _wilson_hilferty(p: float, shape: int) -> float:
    z = NormalDist().inv_cdf(p)
    c = 1.0 / (9.0 * shape)
    x = shape * (1.0 - c + z * math.sqrt(c)) ** 3
    if x <= 0.0:
        # Small-p start from the leading series term P(a,x) ~ x^a / a!
        x = math.exp((math.log(p) + log_factorial(shape)) / shape)
    return x


def gamma_quantile(p: float, shape: int, scale: float, *, max_iterations: int | None = None) -> float:
    """Inverse of gamma_cdf: the x with gamma_cdf(x, shape, scale) = p"""
    _check_shape_scale(shape, scale)
    require(0.0 <= p < 1.0, f"probability must be in [0, 1), got {p!r}")
    if max_iterations is None:
        max_iterations = settings.quantile_max_iterations
    if p == 0.0:
        return 0.0

    # Bracket [lo, hi] in unit-scale coordinates
    lo, hi = 0.0, max(1.0, float(shape))
    while regularized_lower_gamma(shape, hi) < p:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise ConvergenceError(f"could not bracket gamma quantile p={p}, shape={shape}")

    x = _wilson_hilferty(p, shape)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)

    # Above the median the residual is taken on the survival function so it
    # keeps relative precision as p approaches 1.
    upper = p > 0.5
    tail = 1.0 - p

    for _ in range(max_iterations):
        if upper:
            f = tail - regularized_upper_gamma(shape, x)
        else:
            f = regularized_lower_gamma(shape, x) - p
        if f == 0.0:
            return x * scale
        if f < 0.0:
            lo = x
        else:
            hi = x
        density = gamma_pdf(x, shape, 1.0)
        candidate = x - f / density if density > 0.0 else math.nan
        if not lo < candidate < hi:
            candidate = 0.5 * (lo + hi)
        if abs(candidate - x) <= 1e-13 * candidate or hi - lo <= 1e-15 * hi:
            return candidate * scale
        x = candidate

    logger.warning(f"Gamma quantile hit the iteration cap (p={p}, shape={shape})")
    raise ConvergenceError(f"gamma quantile did not converge for p={p}, shape={shape}")
