"""Gradient update schemes: plain SGD, Adagrad, and Adadelta.

All three apply theta <- theta - alpha * eta * g with a per-coordinate
weighting eta.  Adagrad accumulates squared gradients,

    G += g^2,        eta = 1 / sqrt(G + eps),

and Adadelta maintains decaying averages of squared gradients and squared
updates,

    G <- rho G + (1-rho) g^2
    eta = sqrt(E + eps) / sqrt(G + eps)
    E <- rho E + (1-rho) (eta g)^2

with alpha fixed at 1.  Note the E update uses a PLUS on the second term;
an accumulator of squares must stay nonnegative, so a minus there (seen
in some write-ups) would drive E negative and the square root complex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import Gradients, NetworkParams


def _zeros_like_params(p: NetworkParams):
    return {
        "W": np.zeros_like(p.W),
        "b": np.zeros_like(p.b),
        "V": np.zeros_like(p.V),
        "c": np.zeros_like(p.c),
    }


def _pairs(p: NetworkParams, g: Gradients):
    return (
        ("W", p.W, g.dW),
        ("b", p.b, g.db),
        ("V", p.V, g.dV),
        ("c", p.c, g.dc),
    )


def _check(p: NetworkParams, g: Gradients):
    for _, arr, grad in _pairs(p, g):
        if arr.shape != grad.shape:
            raise ValueError("gradient shape does not match parameters")
        if not np.all(np.isfinite(grad)):
            raise FloatingPointError("non-finite gradient")


@dataclass
class Sgd:
    alpha: float = 0.1

    def step(self, p: NetworkParams, g: Gradients) -> None:
        _check(p, g)
        for _, arr, grad in _pairs(p, g):
            arr -= self.alpha * grad


@dataclass
class Adagrad:
    alpha: float = 0.01
    eps: float = 1e-8
    G: dict = field(default=None, repr=False)

    def step(self, p: NetworkParams, g: Gradients) -> None:
        _check(p, g)
        if self.G is None:
            self.G = _zeros_like_params(p)
        for name, arr, grad in _pairs(p, g):
            acc = self.G[name]
            acc += grad * grad
            arr -= self.alpha * grad / np.sqrt(acc + self.eps)


@dataclass
class Adadelta:
    rho: float = 0.95
    eps: float = 1e-6
    G: dict = field(default=None, repr=False)
    E: dict = field(default=None, repr=False)

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def step(self, p: NetworkParams, g: Gradients) -> None:
        _check(p, g)
        if self.G is None:
            self.G = _zeros_like_params(p)
            self.E = _zeros_like_params(p)
        for name, arr, grad in _pairs(p, g):
            acc = self.G[name]
            acc *= self.rho
            acc += (1.0 - self.rho) * grad * grad
            update = np.sqrt(self.E[name] + self.eps) / np.sqrt(acc + self.eps) * grad
            arr -= update
            eacc = self.E[name]
            eacc *= self.rho
            eacc += (1.0 - self.rho) * update * update


def make_optimizer(kind: str, **settings):
    kinds = {"sgd": Sgd, "adagrad": Adagrad, "adadelta": Adadelta}
    if kind not in kinds:
        raise ValueError(f"unknown optimizer {kind!r}")
    return kinds[kind](**settings)
