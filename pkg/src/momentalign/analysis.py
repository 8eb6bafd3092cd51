"""Statistical checks around the distance: two-sample KS tests, per-node
alignment reports, moment-bound verification, characteristic-function
bound verification, dual-form agreement, and the (k, lambda) sensitivity
sweep.

Bound checks share one shape: a BoundCheck holds the measured left side,
the guaranteed right side, and their slack.  A check passes when slack
is nonnegative up to the stated tolerance, so a red result is always a
genuine violation of the inequality, never a formatting artifact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .distances import CmdConfig, cmd_estimate
from .moments import FULL, central_moments, monomial_exponents
from .network import NetworkParams, forward
from .numerics import SeededRng
from .trainer import TrainConfig, evaluate, train

__all__ = [
    "KsResult",
    "BoundCheck",
    "SweepCell",
    "ks_two_sample",
    "alignment_report",
    "prop1_bound",
    "prop1_check",
    "thm3_check",
    "dual_equivalence_check",
    "sensitivity_sweep",
    "write_sweep_csv",
]


@dataclass
class KsResult:
    statistic: float
    pvalue: float
    significant: bool

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "pvalue": self.pvalue,
            "significant": self.significant,
        }


@dataclass
class BoundCheck:
    """lhs <= rhs claim: slack = rhs - lhs, passed once slack >= -tol."""

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool

    @classmethod
    def of(cls, name: str, lhs: float, rhs: float, tol: float) -> "BoundCheck":
        lhs, rhs = float(lhs), float(rhs)
        slack = rhs - lhs
        return cls(name=name, lhs=lhs, rhs=rhs, slack=slack, passed=bool(slack >= -tol))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "passed": self.passed,
        }


def _kolmogorov_sf(lam: float) -> float:
    # 2 * sum_{j>=1} (-1)^(j-1) exp(-2 j^2 lam^2), truncated once terms
    # drop below 1e-10.
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * j * j * lam * lam)
        if term < 1e-10:
            break
        total += term if j % 2 == 1 else -term
    return min(1.0, max(0.0, 2.0 * total))


def ks_two_sample(a, b, alpha: float = 1e-2) -> KsResult:
    """Two-sample Kolmogorov-Smirnov test on scalar samples.

    The statistic is the sup distance between the two empirical CDFs.
    The p-value uses the asymptotic Kolmogorov distribution with the
    usual small-sample correction factor sqrt(ne) + 0.12 + 0.11/sqrt(ne)
    where ne = n_a n_b / (n_a + n_b).
    """
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("empty sample")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    stat = float(np.max(np.abs(cdf_a - cdf_b)))
    ne = a.size * b.size / (a.size + b.size)
    lam = (math.sqrt(ne) + 0.12 + 0.11 / math.sqrt(ne)) * stat
    pvalue = _kolmogorov_sf(lam)
    return KsResult(statistic=stat, pvalue=pvalue, significant=pvalue < alpha)


@dataclass
class AlignmentReport:
    nodes: list
    significant: int

    def to_dict(self) -> dict:
        return {
            "nodes": [r.to_dict() for r in self.nodes],
            "significant": self.significant,
        }


def alignment_report(p: NetworkParams, Xs, Xt, alpha: float = 1e-2) -> AlignmentReport:
    """KS test per hidden node between source and target activations.

    The significant count is the number of hidden nodes whose activation
    distributions differ at level alpha; a domain-aligned representation
    drives it down.
    """
    hs = forward(p, Xs).hidden
    ht = forward(p, Xt).hidden
    nodes = [ks_two_sample(hs[:, i], ht[:, i], alpha=alpha) for i in range(hs.shape[1])]
    return AlignmentReport(nodes=nodes, significant=sum(r.significant for r in nodes))


def prop1_bound(j: int) -> float:
    """Scale-free ceiling on one order-j marginal central moment distance
    for distributions supported on a common interval.
    """
    if j < 1:
        raise ValueError("order must be >= 1")
    return 2.0 * ((1.0 / (j + 1)) * (j / (j + 1)) ** j + 2.0 ** -(1 + j))


def _as_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("need a nonempty sample matrix")
    return X


def prop1_check(src, tgt, j: int, a: float, b: float, tol: float = 1e-12) -> BoundCheck:
    """Checks ||c_j(src) - c_j(tgt)||_2 / |b-a|^j against its ceiling for
    samples supported on [a, b]^m."""
    if b <= a:
        raise ValueError("need a < b")
    src, tgt = _as_matrix(src), _as_matrix(tgt)
    if src.shape[1] != tgt.shape[1]:
        raise ValueError("feature dimensions differ")
    for X in (src, tgt):
        if X.min() < a - 1e-12 or X.max() > b + 1e-12:
            raise ValueError(f"sample leaves the support interval [{a}, {b}]")
    m = src.shape[1]
    cs = central_moments(src, j)[j]
    ct = central_moments(tgt, j)[j]
    lhs = float(np.linalg.norm(cs - ct)) / (b - a) ** j
    rhs = math.sqrt(m) * prop1_bound(j)
    return BoundCheck.of(f"moment-bound j={j}", lhs, rhs, tol)


def _ecf(X: np.ndarray, T: np.ndarray) -> np.ndarray:
    # empirical characteristic function at each row of T
    return np.exp(1j * (T @ X.T)).mean(axis=1)


def _l1_grid(m: int) -> np.ndarray:
    if m == 1:
        return np.linspace(-1.0, 1.0, 201)[:, None]
    axis = np.linspace(-1.0, 1.0, 101)
    t1, t2 = np.meshgrid(axis, axis)
    T = np.column_stack([t1.ravel(), t2.ravel()])
    return T[np.abs(T).sum(axis=1) <= 1.0 + 1e-12]


def thm3_check(src, tgt, k: int = 5, tol: float = 1e-9) -> BoundCheck:
    """Checks the characteristic-function distance over ||t||_1 <= 1
    against sqrt(m) * e * cmd_k (full monomials, unit weights) plus the
    Taylor tail term, for recentered samples on [-1/2, 1/2]^m.

    Only odd k and m in {1, 2} are supported; the grid has 201 points in
    one dimension and an L1-clipped 101 x 101 lattice in two.
    """
    src, tgt = _as_matrix(src), _as_matrix(tgt)
    if src.shape[1] != tgt.shape[1]:
        raise ValueError("feature dimensions differ")
    m = src.shape[1]
    if m not in (1, 2):
        raise ValueError("characteristic-function check covers 1 or 2 features")
    if k % 2 == 0:
        raise ValueError("k must be odd")
    src = src - src.mean(axis=0)
    tgt = tgt - tgt.mean(axis=0)
    for X in (src, tgt):
        if np.abs(X).max() > 0.5 + 1e-9:
            raise ValueError("recentered sample leaves [-1/2, 1/2]")

    T = _l1_grid(m)
    lhs = float(np.abs(_ecf(src, T) - _ecf(tgt, T)).max())

    cmd = cmd_estimate(src, tgt, CmdConfig(k=k, mode=FULL)).value
    tail = 0.0
    for expo in monomial_exponents(m, k + 1):
        ms = float(np.prod(src ** np.asarray(expo), axis=1).mean())
        mt = float(np.prod(tgt ** np.asarray(expo), axis=1).mean())
        tail = max(tail, abs(ms) + abs(mt))
    rhs = math.sqrt(m) * math.e * cmd + tail / math.factorial(k + 1)
    return BoundCheck.of(f"char-fct bound k={k}", lhs, rhs, tol)


def dual_equivalence_check(
    src,
    tgt,
    cfg: CmdConfig | None = None,
    directions: int = 1000,
    seed: int = 0,
) -> BoundCheck:
    """Compares the closed-form distance against its variational form,
    sum_j a_j sup_{||w||<=1} <w, c_j(src) - c_j(tgt)>.

    For one feature the supremum is attained at w = +-1, so both sides
    agree to rounding; in higher dimension the sup is sampled over
    random unit directions and can only fall short, so slack >= 0 and
    shrinks as directions grows.
    """
    cfg = cfg or CmdConfig()
    src, tgt = _as_matrix(src), _as_matrix(tgt)
    if src.shape[1] != tgt.shape[1]:
        raise ValueError("feature dimensions differ")
    cs = central_moments(src, cfg.k, cfg.mode)
    ct = central_moments(tgt, cfg.k, cfg.mode)
    rng = SeededRng(seed)
    lhs = 0.0
    for j in range(1, cfg.k + 1):
        delta = cs[j] - ct[j]
        if delta.size == 1:
            best = abs(float(delta[0]))
        else:
            W = rng.normal_matrix(directions, delta.size)
            norms = np.linalg.norm(W, axis=1)
            norms[norms == 0.0] = 1.0
            best = float((W @ delta / norms).max())
        lhs += cfg.weight(j) * max(best, 0.0)
    rhs = cmd_estimate(src, tgt, cfg).value
    tol = 1e-12 if src.shape[1] == 1 else 1e-10
    return BoundCheck.of("dual-form agreement", lhs, rhs, tol)


@dataclass
class SweepCell:
    k: int
    lam: float
    accuracy: float
    ratio: float

    def to_dict(self) -> dict:
        return {"k": self.k, "lambda": self.lam, "accuracy": self.accuracy, "ratio": self.ratio}


def sensitivity_sweep(Xs, Ys, Xt, Yt, ks, lambdas, cfg: TrainConfig | None = None) -> list:
    """Trains one joint run per (k, lambda) cell and reports target
    accuracy, plus each k's lambda-averaged accuracy as a ratio against
    the configured default k.

    Diverged cells are recorded with accuracy nan rather than dropped;
    averages skip them.  The baseline k (cfg.k) must be in the grid.
    """
    cfg = cfg or TrainConfig()
    ks = [int(k) for k in ks]
    lambdas = [float(l) for l in lambdas]
    if not ks or not lambdas:
        raise ValueError("need at least one k and one lambda")
    if cfg.k not in ks:
        raise ValueError(f"baseline k={cfg.k} missing from the sweep grid")

    acc = {}
    for k in ks:
        for lam in lambdas:
            result = train(Xs, Ys, Xt, replace(cfg, k=k, lam=lam), Yt=Yt)
            if result.diverged:
                acc[(k, lam)] = float("nan")
            else:
                acc[(k, lam)] = evaluate(result.params, Xt, Yt)[0]

    def k_mean(k):
        vals = [acc[(k, lam)] for lam in lambdas]
        vals = [v for v in vals if not math.isnan(v)]
        return math.fsum(vals) / len(vals) if vals else float("nan")

    base = k_mean(cfg.k)
    cells = []
    for k in ks:
        ratio = k_mean(k) / base if base else float("nan")
        for lam in lambdas:
            cells.append(SweepCell(k=k, lam=lam, accuracy=acc[(k, lam)], ratio=ratio))
    return cells


def write_sweep_csv(cells, path) -> None:
    lines = ["k,lambda,accuracy,ratio"]
    for c in cells:
        lines.append(f"{c.k},{repr(float(c.lam))},{repr(float(c.accuracy))},{repr(float(c.ratio))}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
