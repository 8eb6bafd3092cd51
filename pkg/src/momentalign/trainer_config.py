"""Run configuration shared by the trainer and the CLI."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class TrainConfig:
    hidden: int = 15
    k: int = 5
    lam: float = 1.0
    optimizer: str = "adadelta"  # sgd | adagrad | adadelta
    alpha: float | None = None   # learning rate for sgd/adagrad
    rho: float = 0.95            # adadelta decay
    eps: float | None = None     # stability constant; per-optimizer default
    epochs: int = 1200
    batch_size: int = 0          # 0 = full batch
    warm_start_fraction: float = 2.0 / 3.0
    seed: int = 0

    def __post_init__(self):
        if self.hidden < 1:
            raise ValueError("hidden must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 0:
            raise ValueError("batch_size must be >= 0")
        if not 0.0 <= self.warm_start_fraction <= 1.0:
            raise ValueError("warm_start_fraction must lie in [0, 1]")

    _KEYS = {
        "hidden": "hidden",
        "k": "k",
        "lambda": "lam",
        "optimizer": "optimizer",
        "alpha": "alpha",
        "rho": "rho",
        "eps": "eps",
        "epochs": "epochs",
        "batch_size": "batch_size",
        "warm_start_fraction": "warm_start_fraction",
        "seed": "seed",
    }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainConfig":
        unknown = set(doc) - set(cls._KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**{cls._KEYS[k]: v for k, v in doc.items()})

    def to_dict(self) -> dict:
        return {
            "hidden": self.hidden,
            "k": self.k,
            "lambda": self.lam,
            "optimizer": self.optimizer,
            "alpha": self.alpha,
            "rho": self.rho,
            "eps": self.eps,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "warm_start_fraction": self.warm_start_fraction,
            "seed": self.seed,
        }
