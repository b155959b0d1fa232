"""Fixed-step classical Runge-Kutta (RK4) integration of time-varying vector fields.

The stepper is deliberately minimal: no adaptivity, no dense output, no event
detection. Episodes need a deterministic, reproducible time grid so that cost
measurements taken on that grid are comparable across runs and across gain
sets; adaptive step control would make them grid-dependent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

VectorField = Callable[[float, np.ndarray], np.ndarray]


class NonFiniteState(RuntimeError):
    """A state or stage evaluation produced NaN/Inf (divergence or singularity)."""

    def __init__(self, message: str, t: Optional[float] = None):
        super().__init__(message)
        self.t = t


@dataclass(frozen=True)
class IntegrationConfig:
    """Uniform time grid: step dt over [t_start, t_end]."""

    dt: float
    t_start: float = 0.0
    t_end: float = 1.0

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > self.t_start:
            raise ValueError(
                f"t_end ({self.t_end}) must exceed t_start ({self.t_start})"
            )


def rk4_step(field: VectorField, t: float, x: np.ndarray, dt: float) -> np.ndarray:
    """Advance x by one classical 4-stage Runge-Kutta step of size dt."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise NonFiniteState("non-finite state passed to rk4_step", t=t)

    k1 = np.asarray(field(t, x), dtype=float)
    k2 = np.asarray(field(t + 0.5 * dt, x + 0.5 * dt * k1), dtype=float)
    k3 = np.asarray(field(t + 0.5 * dt, x + 0.5 * dt * k2), dtype=float)
    k4 = np.asarray(field(t + dt, x + dt * k3), dtype=float)

    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NonFiniteState(f"integration step at t={t} produced NaN/Inf", t=t)
    return out


def integrate(
    field: VectorField,
    x0: np.ndarray,
    cfg: IntegrationConfig,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
) -> np.ndarray:
    """Integrate over the uniform grid; observer is invoked at every grid point.

    Grid points are t_start + k*dt (computed by multiplication, not running
    accumulation, so the grid is bit-reproducible). If the span is not an
    integer multiple of dt the final step is truncated to land exactly on
    t_end. The observer sees (t, x) including both endpoints.
    """
    x = np.array(x0, dtype=float)
    span = cfg.t_end - cfg.t_start
    # Tolerate one part in 1e9 of float noise in span/dt before adding a
    # truncated final step.
    n_full = int(np.floor(span / cfg.dt * (1.0 + 1e-9)))
    remainder = span - n_full * cfg.dt

    t = cfg.t_start
    if observer is not None:
        observer(t, x)
    for k in range(n_full):
        t = cfg.t_start + k * cfg.dt
        x = rk4_step(field, t, x, cfg.dt)
        if observer is not None:
            observer(cfg.t_start + (k + 1) * cfg.dt, x)
    if remainder > 1e-9 * cfg.dt:
        x = rk4_step(field, cfg.t_start + n_full * cfg.dt, x, remainder)
        if observer is not None:
            observer(cfg.t_end, x)
    return x
