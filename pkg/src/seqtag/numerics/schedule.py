from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float = 0.1
    anneal_factor: float = 0.5
    patience: int = 3
    min_lr: float = 1e-4

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0.0 < self.anneal_factor < 1.0:
            raise ValueError("anneal_factor must lie in (0, 1)")
        if self.patience < 0:
            raise ValueError("patience must be non-negative")
        if self.min_lr <= 0:
            raise ValueError("min_lr must be positive")


class PlateauScheduler:
    """Multiply the learning rate by ``anneal_factor`` after ``patience``
    consecutive reports without improvement, never going below ``min_lr``."""

    def __init__(self, config: SgdConfig, higher_is_better: bool = True):
        self.config = config
        self.higher_is_better = higher_is_better
        self.lr = config.learning_rate
        self.best: Optional[float] = None
        self.bad_reports = 0
        self.num_anneals = 0
        # set once patience runs out while already at min_lr
        self.exhausted = False

    def _better(self, metric: float) -> bool:
        if self.best is None:
            return True
        return metric > self.best if self.higher_is_better else metric < self.best

    @property
    def at_floor(self) -> bool:
        return self.lr <= self.config.min_lr

    def report(self, metric: float) -> tuple[float, bool]:
        """Record a new validation metric; returns ``(lr, improved)``."""
        improved = self._better(metric)
        if improved:
            self.best = metric
            self.bad_reports = 0
            return self.lr, True
        self.bad_reports += 1
        if self.bad_reports >= self.config.patience:
            if self.at_floor:
                self.exhausted = True
            self.lr = max(self.lr * self.config.anneal_factor, self.config.min_lr)
            self.bad_reports = 0
            self.num_anneals += 1
        return self.lr, False


def anneal_on_plateau(scheduler: PlateauScheduler, new_metric: float,
                      higher_is_better: Optional[bool] = None) -> tuple[float, bool]:
    if higher_is_better is not None:
        scheduler.higher_is_better = higher_is_better
    return scheduler.report(new_metric)
