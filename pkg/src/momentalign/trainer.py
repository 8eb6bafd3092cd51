"""Joint training of the two-layer network on source cross-entropy plus
lambda times the CMD between source and target hidden activations.

The loop follows the stochastic update scheme: forward both domains,
accumulate analytic gradients of loss + lambda*cmd, and apply the chosen
optimizer.  Stopping is a fixed epoch budget.  Runs are deterministic
functions of the config: initialization and every per-epoch shuffle come
from streams derived from the config seed, and with lambda = 0 the CMD
gradient path is skipped entirely, so a lambda = 0 run is bitwise equal
to a plain cross-entropy trainer.

The warm-start protocol trains the shallow (lambda = 0) network for the
full budget, snapshots its weights at a fraction of the epochs, and
continues training from that snapshot with the CMD term switched on for
the remaining epochs.  Target labels, when available, are used only for
evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .distances import CmdConfig, cmd_estimate
from .network import (
    NetworkParams,
    cmd_gradients,
    cross_entropy_loss,
    forward,
    init_params,
    loss_gradients,
)
from .numerics import SeededRng, take_rows
from .optim import Adadelta, Adagrad, Sgd
from .trainer_config import TrainConfig  # re-export point, defined below

__all__ = [
    "TrainConfig",
    "EpochRecord",
    "TrainResult",
    "WarmStartResult",
    "objective",
    "train",
    "warm_start_train",
    "evaluate",
    "write_metrics_csv",
]


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    cmd: float
    source_acc: float
    target_acc: float | None = None


@dataclass
class TrainResult:
    params: NetworkParams
    records: list
    diverged: bool = False
    snapshot: NetworkParams | None = None
    snapshot_epoch: int | None = None


@dataclass
class WarmStartResult:
    shallow: TrainResult
    mann: TrainResult
    snapshot_epoch: int
    shallow_source_acc: float
    shallow_target_acc: float | None
    mann_source_acc: float
    mann_target_acc: float | None


def _build_optimizer(cfg: TrainConfig):
    if cfg.optimizer == "sgd":
        return Sgd(alpha=cfg.alpha if cfg.alpha is not None else 0.1)
    if cfg.optimizer == "adagrad":
        return Adagrad(
            alpha=cfg.alpha if cfg.alpha is not None else 0.01,
            eps=cfg.eps if cfg.eps is not None else 1e-8,
        )
    if cfg.optimizer == "adadelta":
        return Adadelta(rho=cfg.rho, eps=cfg.eps if cfg.eps is not None else 1e-6)
    raise ValueError(f"unknown optimizer {cfg.optimizer!r}")


def _accuracy(outputs: np.ndarray, Y: np.ndarray) -> float:
    return float((outputs.argmax(axis=1) == Y.argmax(axis=1)).mean())


def objective(p: NetworkParams, Xs, Ys, Xt, cfg: TrainConfig):
    """(total, loss, cmd) of the combined objective under cfg."""
    trace_s = forward(p, Xs)
    loss = cross_entropy_loss(trace_s, Ys)
    cmd = cmd_estimate(trace_s.hidden, forward(p, Xt).hidden, CmdConfig(k=cfg.k)).value
    total = loss if cfg.lam == 0.0 else loss + cfg.lam * cmd
    return total, loss, cmd


def evaluate(p: NetworkParams, X, Y) -> tuple[float, float]:
    """(accuracy, mean disagreement): argmax match rate and the mean of
    sum_i |h_i - y_i| / 2 per example."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape[0] == 0:
        raise ValueError("empty sample")
    outputs = forward(p, X).outputs
    accuracy = _accuracy(outputs, Y)
    disagreement = float(np.abs(outputs - Y).sum(axis=1).mean() / 2.0)
    return accuracy, disagreement


def _n_rows(X) -> int:
    from .numerics import SparseRowMatrix

    return X.rows if isinstance(X, SparseRowMatrix) else np.asarray(X).shape[0]


def _epoch_perms(seed: int, epoch: int, ns: int, nt: int):
    rng = SeededRng(seed).split(epoch + 1)
    return rng.permutation(ns), rng.permutation(nt)


def train(
    Xs,
    Ys,
    Xt,
    cfg: TrainConfig,
    Yt=None,
    init: NetworkParams | None = None,
    start_epoch: int = 0,
    epochs: int | None = None,
    snapshot_at: int | None = None,
) -> TrainResult:
    """Run the training loop for a fixed epoch budget.

    init/start_epoch let a caller continue from a snapshot while keeping
    the per-epoch shuffle streams aligned with a single longer run.
    snapshot_at=j stores a copy of the parameters as they stood after
    j epochs (0 = the initialization).
    """
    Ys = np.asarray(Ys, dtype=np.float64)
    ns, nt = _n_rows(Xs), _n_rows(Xt)
    if ns == 0 or nt == 0:
        raise ValueError("empty sample")
    if Ys.shape[0] != ns:
        raise ValueError("source labels do not align with features")
    budget = cfg.epochs if epochs is None else epochs
    cmd_cfg = CmdConfig(k=cfg.k)

    if init is not None:
        p = init.copy()
    else:
        p = init_params(
            Xs.cols if hasattr(Xs, "cols") else np.asarray(Xs).shape[1],
            cfg.hidden,
            Ys.shape[1],
            SeededRng(cfg.seed),
        )
    optimizer = _build_optimizer(cfg)

    records: list[EpochRecord] = []
    snapshot = p.copy() if snapshot_at == start_epoch else None
    last_stable = p.copy()
    diverged = False

    for e in range(start_epoch, start_epoch + budget):
        if cfg.batch_size == 0:
            batches = [(Xs, Ys, Xt)]
        else:
            perm_s, perm_t = _epoch_perms(cfg.seed, e, ns, nt)
            B = cfg.batch_size
            steps = math.ceil(max(ns, nt) / B)
            batches = []
            for t in range(steps):
                idx_s = [(t * B + i) % ns for i in range(B)]
                idx_t = [(t * B + i) % nt for i in range(B)]
                batches.append(
                    (
                        take_rows(Xs, perm_s[idx_s]),
                        Ys[perm_s[idx_s]],
                        take_rows(Xt, perm_t[idx_t]),
                    )
                )

        for Xbs, Ybs, Xbt in batches:
            trace_s = forward(p, Xbs)
            grads = loss_gradients(p, Xbs, Ybs, trace_s)
            if cfg.lam != 0.0:
                trace_t = forward(p, Xbt)
                grads.add_scaled(
                    cmd_gradients(p, Xbs, Xbt, cmd_cfg, trace_s, trace_t), cfg.lam
                )
            if not grads.all_finite():
                diverged = True
                break
            optimizer.step(p, grads)
            if not all(
                np.all(np.isfinite(a)) for a in (p.W, p.b, p.V, p.c)
            ):
                diverged = True
                break
        if diverged:
            p = last_stable
            break

        trace_full = forward(p, Xs)
        loss = cross_entropy_loss(trace_full, Ys)
        cmd_val = cmd_estimate(trace_full.hidden, forward(p, Xt).hidden, cmd_cfg).value
        if not (math.isfinite(loss) and math.isfinite(cmd_val)):
            diverged = True
            p = last_stable
            break
        record = EpochRecord(
            epoch=e + 1,
            loss=loss,
            cmd=cmd_val,
            source_acc=_accuracy(trace_full.outputs, Ys),
            target_acc=(
                _accuracy(forward(p, Xt).outputs, np.asarray(Yt, dtype=np.float64))
                if Yt is not None
                else None
            ),
        )
        records.append(record)
        last_stable = p.copy()
        if snapshot_at is not None and e + 1 == snapshot_at:
            snapshot = p.copy()

    return TrainResult(
        params=p,
        records=records,
        diverged=diverged,
        snapshot=snapshot,
        snapshot_epoch=snapshot_at,
    )


def warm_start_train(Xs, Ys, Xt, cfg: TrainConfig, Yt=None) -> WarmStartResult:
    """Shallow full-budget run plus a CMD continuation from its snapshot."""
    snap_epoch = round(cfg.warm_start_fraction * cfg.epochs)
    shallow = train(
        Xs, Ys, Xt, replace(cfg, lam=0.0), Yt=Yt, snapshot_at=snap_epoch
    )
    remaining = cfg.epochs - snap_epoch
    if shallow.snapshot is None:
        # divergence before the snapshot epoch: fall back to the last
        # stable parameters so the comparison still reports something
        start = shallow.params
    else:
        start = shallow.snapshot
    if remaining > 0 and cfg.lam != 0.0 and not (shallow.diverged and shallow.snapshot is None):
        mann = train(
            Xs,
            Ys,
            Xt,
            cfg,
            Yt=Yt,
            init=start,
            start_epoch=snap_epoch,
            epochs=remaining,
        )
    else:
        mann = TrainResult(params=start.copy(), records=[], diverged=False)

    sh_src, _ = evaluate(shallow.params, Xs, Ys)
    ma_src, _ = evaluate(mann.params, Xs, Ys)
    sh_tgt = evaluate(shallow.params, Xt, Yt)[0] if Yt is not None else None
    ma_tgt = evaluate(mann.params, Xt, Yt)[0] if Yt is not None else None
    return WarmStartResult(
        shallow=shallow,
        mann=mann,
        snapshot_epoch=snap_epoch,
        shallow_source_acc=sh_src,
        shallow_target_acc=sh_tgt,
        mann_source_acc=ma_src,
        mann_target_acc=ma_tgt,
    )


def write_metrics_csv(records, path) -> None:
    """epoch,loss,cmd,source_acc,target_acc with shortest round-trip float
    formatting; identical runs produce identical bytes."""
    lines = ["epoch,loss,cmd,source_acc,target_acc"]
    for r in records:
        tgt = repr(float(r.target_acc)) if r.target_acc is not None else "nan"
        lines.append(
            f"{r.epoch},{repr(float(r.loss))},{repr(float(r.cmd))},"
            f"{repr(float(r.source_acc))},{tgt}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
