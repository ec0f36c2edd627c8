"""Central finite-difference gradient checking."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, MutableMapping, Optional

import numpy as np

LossFn = Callable[[MutableMapping[str, np.ndarray]], "tuple[float, Mapping[str, np.ndarray]]"]


@dataclass
class ParamCheck:
    name: str
    checked: int
    max_rel_error: float
    worst_index: tuple


@dataclass
class GradCheckReport:
    epsilon: float
    tolerance: float
    params: list[ParamCheck] = field(default_factory=list)

    @property
    def max_rel_error(self) -> float:
        return max((p.max_rel_error for p in self.params), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance

    def render(self) -> str:
        width = max([len(p.name) for p in self.params] + [9])
        lines = [f"{'parameter':<{width}}  {'coords':>7}  {'max rel err':>12}  worst"]
        for p in self.params:
            lines.append(f"{p.name:<{width}}  {p.checked:>7d}  {p.max_rel_error:>12.3e}  {p.worst_index}")
        verdict = "PASS" if self.passed else "FAIL"
        lines.append(f"{verdict}: max relative error {self.max_rel_error:.3e} (tolerance {self.tolerance:.1e})")
        return "\n".join(lines)


def relative_error(analytic: float, numeric: float, floor: float = 1e-6) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), floor)


def grad_check(loss_fn: LossFn, params: MutableMapping[str, np.ndarray], epsilon: float = 1e-5,
               tolerance: float = 1e-4, max_coords: Optional[int] = None,
               rng: Optional[np.random.Generator] = None, floor: float = 1e-6) -> GradCheckReport:
    """Compare ``loss_fn``'s analytic gradient against central differences.

    ``loss_fn(params)`` returns ``(loss, grads)`` and must be deterministic.
    Parameters are perturbed in place and restored. Non-finite parameter
    entries (e.g. masked CRF transitions) are skipped. ``max_coords`` caps
    the coordinates checked per parameter, sampled with ``rng``.
    """
    loss, grads = loss_fn(params)
    if not math.isfinite(loss):
        raise FloatingPointError(f"non-finite loss {loss}")
    analytic = {k: np.array(v, copy=True) for k, v in grads.items()}
    report = GradCheckReport(epsilon, tolerance)
    for name in sorted(params):
        w = params[name]
        g = analytic.get(name)
        if g is None:
            g = np.zeros_like(w)
        coords = [idx for idx in np.ndindex(w.shape) if np.isfinite(w[idx])]
        if max_coords is not None and len(coords) > max_coords:
            rng = rng or np.random.default_rng(0)
            pick = rng.choice(len(coords), size=max_coords, replace=False)
            coords = [coords[i] for i in sorted(pick)]
        worst, worst_idx = 0.0, ()
        for idx in coords:
            orig = w[idx]
            w[idx] = orig + epsilon
            plus, _ = loss_fn(params)
            w[idx] = orig - epsilon
            minus, _ = loss_fn(params)
            w[idx] = orig
            if not (math.isfinite(plus) and math.isfinite(minus)):
                raise FloatingPointError(f"non-finite loss while perturbing {name}{idx}")
            numeric = (plus - minus) / (2.0 * epsilon)
            err = relative_error(float(g[idx]), numeric, floor)
            if err > worst or not worst_idx:
                worst, worst_idx = err, idx
        report.params.append(ParamCheck(name, len(coords), worst, worst_idx))
    return report
