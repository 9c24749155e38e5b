"""Special-function kernels used by the analytical coverage track.

Self-contained, real-valued and deterministic: the gamma function on the
positive axis, the lower incomplete gamma function, the rising factorial,
and a Gauss hypergeometric evaluator that stays stable on the large
negative arguments produced by the interference kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "FunctionAccuracy",
    "DEFAULT_ACCURACY",
    "gamma_fn",
    "lower_incomplete_gamma",
    "pochhammer",
    "gauss_2f1",
]


@dataclass(frozen=True)
class FunctionAccuracy:
    """Termination control for iterative evaluations."""

    rel_tol: float = 1e-12
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0.0:
            raise DomainError("rel_tol must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be at least 1")


DEFAULT_ACCURACY = FunctionAccuracy()

# Lanczos approximation, g = 7, nine coefficients (double precision grade).
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def _gamma_positive(x: float) -> float:
    # Lanczos for x >= 0.5; recurrence pulls smaller arguments up.
    if x < 0.5:
        return _gamma_positive(x + 1.0) / x
    x -= 1.0
    acc = _LANCZOS_C[0]
    for i, c in enumerate(_LANCZOS_C[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


def _gamma_real(x: float) -> float:
    """Gamma on the whole real line except the non-positive integers."""
    if x > 0.0:
        return _gamma_positive(x)
    if x == math.floor(x):
        raise DomainError(f"gamma pole at x = {x}")
    # Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return math.pi / (math.sin(math.pi * x) * _gamma_positive(1.0 - x))


def gamma_fn(x: float, acc: FunctionAccuracy = DEFAULT_ACCURACY) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0.0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return _gamma_positive(float(x))


def pochhammer(x: float, n: int) -> float:
    """Rising factorial x (x+1) ... (x+n-1); equals 1 for n = 0."""
    if n < 0:
        raise DomainError("pochhammer order must be non-negative")
    out = 1.0
    for k in range(int(n)):
        out *= x + k
    return out


def _lower_gamma_series(a: float, x: float, acc: FunctionAccuracy) -> float:
    # gamma(a, x) = x^a e^-x sum_n x^n / (a (a+1) ... (a+n)), good for x < a + 1
    term = 1.0 / a
    total = term
    for n in range(1, acc.max_terms):
        term *= x / (a + n)
        total += term
        if abs(term) <= acc.rel_tol * abs(total):
            return math.exp(a * math.log(x) - x) * total
    raise ConvergenceError(
        f"lower incomplete gamma series stalled at a={a}, x={x}",
        partial_value=math.exp(a * math.log(x) - x + math.log(total)),
        terms_used=acc.max_terms,
    )


def _upper_gamma_cf(a: float, x: float, acc: FunctionAccuracy) -> float:
    # Modified Lentz continued fraction for Gamma(a, x), good for x >= a + 1.
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, acc.max_terms):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) <= acc.rel_tol:
            return math.exp(a * math.log(x) - x) * h
    raise ConvergenceError(
        f"upper incomplete gamma fraction stalled at a={a}, x={x}",
        partial_value=math.exp(a * math.log(x) - x + math.log(h)),
        terms_used=acc.max_terms,
    )


def lower_incomplete_gamma(
    a: float, x: float, acc: FunctionAccuracy = DEFAULT_ACCURACY
) -> float:
    """Lower incomplete gamma integral of t^(a-1) e^-t over [0, x]."""
    if not a > 0.0:
        raise DomainError(f"lower_incomplete_gamma requires a > 0, got {a}")
    if x < 0.0:
        raise DomainError(f"lower_incomplete_gamma requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return _lower_gamma_series(float(a), float(x), acc)
    return _gamma_positive(float(a)) - _upper_gamma_cf(float(a), float(x), acc)


def _series_2f1(a, b, c, z, acc: FunctionAccuracy):
    """Power series of 2F1 on an array argument with |z| < 1.

    Elements leave the active set once two consecutive terms are below
    tolerance (terms may grow before decaying), so slow corners of an
    array do not tax the rest.
    """
    z_in = np.asarray(z, dtype=float)
    flat = z_in.reshape(-1)
    out = np.ones_like(flat)
    idx = np.nonzero(flat != 0.0)[0]
    zz = flat[idx]
    total = np.ones_like(zz)
    term = np.ones_like(zz)
    settle = np.zeros(zz.size, dtype=np.int8)
    n = 0
    while idx.size and n < acc.max_terms:
        term = term * (((a + n) * (b + n)) / ((c + n) * (n + 1.0))) * zz
        total = total + term
        small = np.abs(term) <= acc.rel_tol * np.maximum(np.abs(total), 1e-300)
        settle = np.where(small, settle + 1, 0)
        done = settle >= 2
        n += 1
        if np.any(done):
            out[idx[done]] = total[done]
            keep = ~done
            idx, zz, term, total, settle = (
                idx[keep], zz[keep], term[keep], total[keep], settle[keep],
            )
    if idx.size:
        out[idx] = total
        raise ConvergenceError(
            f"2F1 series did not converge (a={a}, b={b}, c={c})",
            partial_value=out.reshape(z_in.shape) if z_in.ndim else float(out[0]),
            terms_used=n,
        )
    return out.reshape(z_in.shape), n


def _2f1_large_negative(a, b, c, z, acc: FunctionAccuracy):
    # Inversion z -> 1/z (connection formula), requires a - b non-integer.
    g = _gamma_real
    w = 1.0 / z
    f1, _ = _series_2f1(a, a - c + 1.0, a - b + 1.0, w, acc)
    f2, _ = _series_2f1(b, b - c + 1.0, b - a + 1.0, w, acc)
    coef1 = g(c) * g(b - a) / (g(b) * g(c - a))
    coef2 = g(c) * g(a - b) / (g(a) * g(c - b))
    return coef1 * (-z) ** (-a) * f1 + coef2 * (-z) ** (-b) * f2


def gauss_2f1(a, b, c, z, acc: FunctionAccuracy = DEFAULT_ACCURACY):
    """Gauss hypergeometric function for z <= 0.

    Direct series inside the disc, Pfaff transformation into the disc for
    moderately negative z, argument inversion for very negative z. Raises
    ConvergenceError (carrying the partial sum and term count) when the
    term budget is exhausted.
    """
    if float(c) <= 0.0 and float(c) == math.floor(c):
        raise DomainError(f"gauss_2f1 pole: c = {c} is a non-positive integer")
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(z_arr > 0.0):
        raise DomainError("gauss_2f1 supports z <= 0 only")
    # symmetric in the first two arguments; canonicalise so both orders
    # take the identical numerical path
    a, b = sorted((float(a), float(b)))
    c = float(c)

    out = np.empty_like(z_arr)
    near = z_arr >= -0.9
    mid = (z_arr < -0.9) & (z_arr > -9.0)
    far = z_arr <= -9.0

    if np.any(near):
        out[near], _ = _series_2f1(a, b, c, z_arr[near], acc)
    if np.any(mid):
        zm = z_arr[mid]
        # Pfaff: 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1))
        f, _ = _series_2f1(a, c - b, c, zm / (zm - 1.0), acc)
        out[mid] = (1.0 - zm) ** (-a) * f
    if np.any(far):
        if abs((a - b) - round(a - b)) < 1e-9:
            # Inversion formula degenerates; fall back to the Pfaff map,
            # accepting its slower convergence.
            zf = z_arr[far]
            f, _ = _series_2f1(a, c - b, c, zf / (zf - 1.0), acc)
            out[far] = (1.0 - zf) ** (-a) * f
        else:
            out[far] = _2f1_large_negative(a, b, c, z_arr[far], acc)

    return float(out[0]) if scalar else out
