"""Monomial features, empirical central moments, and exact moment oracles.

Two monomial layouts are supported.  Full mode enumerates every degree-k
monomial x_1^{r_1}...x_m^{r_m} in lexicographically descending exponent
order, e.g. for m=2, k=3: (x1^3, x1^2 x2, x1 x2^2, x2^3).  Marginal mode
keeps only the pure powers (x_1^k, ..., x_m^k), which is what the trainer
and the empirical distance use.

The analytic side provides exact raw and central moments for two 1-D
distribution kinds: Normal(mu, sigma) and AffineBeta(alpha, beta, scale,
shift), the latter being scale*Y + shift for Y ~ Beta(alpha, beta).  These
are the oracles behind the closed-form distance checks.  Sampling from
AffineBeta goes through the regularized incomplete beta function (Lentz
continued fraction) inverted by bisection, so no external statistics
dependency is needed and draws are reproducible from a SeededRng.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import SparseRowMatrix, sample_mean

FULL = "full"
MARGINAL = "marginal"


def _check_mode(mode: str):
    if mode not in (FULL, MARGINAL):
        raise ValueError(f"unknown monomial mode {mode!r}")


@lru_cache(maxsize=None)
def monomial_exponents(m: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All exponent tuples (r_1..r_m) with r_i >= 0 summing to k, in
    lexicographically descending order."""
    if m < 1 or k < 1:
        raise ValueError("need m >= 1 and k >= 1")

    def rec(remaining: int, slots: int):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in rec(remaining - first, slots - 1):
                yield (first,) + rest

    return tuple(rec(k, m))


def monomial_vector(x, k: int, mode: str = MARGINAL) -> np.ndarray:
    """Evaluate the degree-k monomial vector at a single point x."""
    _check_mode(mode)
    if k < 1:
        raise ValueError("monomial order k must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    if mode == MARGINAL:
        return x ** k
    exps = np.array(monomial_exponents(x.shape[0], k), dtype=np.float64)
    return np.prod(x[None, :] ** exps, axis=1)


def monomial_matrix(X: np.ndarray, k: int, mode: str = MARGINAL) -> np.ndarray:
    """Rowwise monomial vectors for a whole sample, shape (n, n_monomials)."""
    _check_mode(mode)
    if k < 1:
        raise ValueError("monomial order k must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    if mode == MARGINAL:
        return X ** k
    exps = np.array(monomial_exponents(X.shape[1], k), dtype=np.float64)
    return np.prod(X[:, None, :] ** exps[None, :, :], axis=2)


@dataclass
class CentralMomentVector:
    """c[1] is the mean vector; c[j] for j >= 2 is the mean monomial
    vector of the centered sample. Access 1-based via vec[j]."""

    k: int
    mode: str
    orders: list  # orders[j-1] = c_j

    def __getitem__(self, j: int) -> np.ndarray:
        if not 1 <= j <= self.k:
            raise IndexError(f"order {j} outside 1..{self.k}")
        return self.orders[j - 1]


def central_moments(features, k: int, mode: str = MARGINAL) -> CentralMomentVector:
    """Empirical central moment vector c_1..c_k of a sample.

    c_1 is the sample mean; c_j = mean over rows of nu^(j)(x - c_1).
    """
    _check_mode(mode)
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(features, SparseRowMatrix):
        features = features.toarray()
    X = np.asarray(features, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] == 0:
        raise ValueError("empty sample")
    c1 = sample_mean(X)
    orders = [c1]
    centered = X - c1
    for j in range(2, k + 1):
        orders.append(monomial_matrix(centered, j, mode).mean(axis=0))
    return CentralMomentVector(k, mode, orders)


# ---------------------------------------------------------------------------
# Analytic 1-D distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class AffineBeta:
    """scale * Y + shift with Y ~ Beta(alpha, beta)."""

    alpha: float
    beta: float
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("beta shape parameters must be positive")


def _beta_raw_moment(alpha: float, beta: float, n: int) -> float:
    # E[Y^n] = prod_{r=0}^{n-1} (alpha+r)/(alpha+beta+r)
    out = 1.0
    for r in range(n):
        out *= (alpha + r) / (alpha + beta + r)
    return out


def _double_factorial(n: int) -> float:
    out = 1.0
    while n > 1:
        out *= n
        n -= 2
    return out


def analytic_mean(d) -> float:
    if isinstance(d, Normal):
        return d.mu
    if isinstance(d, AffineBeta):
        return d.scale * (d.alpha / (d.alpha + d.beta)) + d.shift
    raise TypeError(f"unsupported distribution {type(d).__name__}")


def analytic_raw_moment(d, n: int) -> float:
    """Exact E[X^n] for a supported 1-D distribution."""
    if n < 0:
        raise ValueError("moment order must be >= 0")
    if n == 0:
        return 1.0
    if isinstance(d, Normal):
        # binomial expansion of (mu + sigma Z)^n over standard normal moments
        total = 0.0
        for i in range(0, n + 1, 2):
            total += (
                math.comb(n, i)
                * d.mu ** (n - i)
                * d.sigma ** i
                * _double_factorial(i - 1)
            )
        return total
    if isinstance(d, AffineBeta):
        total = 0.0
        for i in range(n + 1):
            total += (
                math.comb(n, i)
                * d.scale ** i
                * d.shift ** (n - i)
                * _beta_raw_moment(d.alpha, d.beta, i)
            )
        return total
    raise TypeError(f"unsupported distribution {type(d).__name__}")


def analytic_central_moment(d, n: int) -> float:
    """Exact E[(X - E[X])^n].

    Shift parameters never enter: central moments are computed in the
    shifted-free frame, so two AffineBeta distributions differing only in
    shift report bitwise equal values.
    """
    if n < 2:
        raise ValueError("central moment order must be >= 2")
    if isinstance(d, Normal):
        if n % 2 == 1:
            return 0.0
        return d.sigma ** n * _double_factorial(n - 1)
    if isinstance(d, AffineBeta):
        mean = d.alpha / (d.alpha + d.beta)
        total = 0.0
        for i in range(n + 1):
            total += (
                math.comb(n, i)
                * _beta_raw_moment(d.alpha, d.beta, i)
                * (-mean) ** (n - i)
            )
        return d.scale ** n * total
    raise TypeError(f"unsupported distribution {type(d).__name__}")


# ---------------------------------------------------------------------------
# Regularized incomplete beta and AffineBeta sampling
# ---------------------------------------------------------------------------


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for the incomplete beta (modified Lentz),
    vectorized over x. Converges in a few dozen iterations for the
    parameter ranges used here; 200 iterations is generous."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < tiny, tiny, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, 201):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) < 1e-15):
            break
    return h


def betainc(a: float, b: float, x) -> np.ndarray:
    """Regularized incomplete beta function I_x(a, b), vectorized."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any((x < 0) | (x > 1)):
        raise ValueError("x must lie in [0, 1]")
    ln_b = _log_beta(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        front = np.exp(a * np.log(x) + b * np.log1p(-x) - ln_b)
    front = np.where((x == 0.0) | (x == 1.0), 0.0, front)
    # continued fraction converges fast for x below the pivot; use the
    # symmetry I_x(a,b) = 1 - I_{1-x}(b,a) above it
    pivot = (a + 1.0) / (a + b + 2.0)
    lo = np.where(x < pivot, x, 0.5 * pivot)  # placeholder args stay in range
    hi = np.where(x < pivot, 0.5 * pivot, x)
    direct = front * _betacf(a, b, lo) / a
    flipped = 1.0 - front * _betacf(b, a, 1.0 - hi) / b
    out = np.where(x < pivot, direct, flipped)
    out = np.where(x == 0.0, 0.0, out)
    out = np.where(x == 1.0, 1.0, out)
    return np.clip(out, 0.0, 1.0)


def beta_ppf(u, alpha: float, beta: float, iterations: int = 80) -> np.ndarray:
    """Inverse CDF of Beta(alpha, beta) by bisection on betainc.

    80 halvings pin the root to ~1e-24 absolute, far below the sampling
    noise any consumer of these draws can see.
    """
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    if np.any((u < 0) | (u > 1)):
        raise ValueError("u must lie in [0, 1]")
    lo = np.zeros_like(u)
    hi = np.ones_like(u)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = betainc(alpha, beta, mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sample_analytic(d, n: int, rng) -> np.ndarray:
    """Draw n points from a supported distribution using a SeededRng."""
    if isinstance(d, Normal):
        return d.mu + d.sigma * rng.normals(n)
    if isinstance(d, AffineBeta):
        return d.scale * beta_ppf(rng.uniforms(n), d.alpha, d.beta) + d.shift
    raise TypeError(f"unsupported distribution {type(d).__name__}")
