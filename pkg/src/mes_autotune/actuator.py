"""Electromagnetic actuator plant: a spring-loaded armature braked by a coil.

Mechanical side:   m x_a'' = k (x0 - x_a) - eta x_a' - a i^2 / (2 (b + x_a)^2)
Electrical side:   u = R i + (a/(b+x_a)) di/dt - (a i/(b+x_a)^2) x_a'

The spring (preload length x0) drives the armature from x_a = 0 toward the
stop at x_a = x_f while the coil current develops an opposing magnetic force;
the soft-landing task is to arrive at x_f with zero velocity. The coil
inductance is L = a/(b+x_a), and the last term of the voltage equation is the
back EMF.

Truth vs. model: the simulated plant uses k = k_nominal + delta_k and
eta = eta_nominal + delta_eta; the controller only ever sees the nominal
values, and its acceleration estimate (`nominal_acceleration`) is therefore
biased when the disturbance is active. Uncertainty enters the linearized form
through |Delta b| <= d2 = (dk_max/m)|v| + (de_max/m)|x_a''|.

All quantities are SI; configuration files may use Table-1 style mm units,
converted at the boundary (see config module).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrator import NonFiniteState

#: Below this coil current the linearizing feedback (which divides by i) is
#: considered undefined.
I_MIN = 1e-3


class CurrentSingularity(RuntimeError):
    """Coil current too close to zero for the linearizing control law."""

    def __init__(self, message: str, i: float | None = None, t: float | None = None):
        super().__init__(message)
        self.i = i
        self.t = t


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the actuator (SI units)."""

    mass: float = 0.27              # kg
    resistance: float = 6.0         # ohm
    eta_nominal: float = 7.53       # kg/s
    x0_spring: float = 8e-3         # m  (spring preload length)
    k_nominal: float = 1.58e5       # N/m
    a_coil: float = 14.96e-6        # N m^2 / A^2
    b_coil: float = 4e-5            # m
    x_f: float = 0.5e-3             # m  (maximal armature position)

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if not getattr(self, name) > 0.0:
                raise ValueError(f"PlantParams.{name} must be strictly positive")


@dataclass(frozen=True)
class UncertaintyBounds:
    """Known bounds on the parametric uncertainty (both >= 0)."""

    delta_k_max: float = 0.1 * 1.58e5   # N/m
    delta_eta_max: float = 0.1 * 7.53   # kg/s

    def __post_init__(self):
        if self.delta_k_max < 0.0 or self.delta_eta_max < 0.0:
            raise ValueError("uncertainty bounds must be nonnegative")


@dataclass(frozen=True)
class TrueDisturbance:
    """Realized parameter offsets of the simulated (true) plant.

    Defaults: no spring-rate offset and a -0.1% damping offset. Spring-rate
    offsets beyond ~1e-5 of k_nominal push the closed loop across the
    geometric singularity at x_a = -b within one episode; see the project
    notes for the measured limits.
    """

    delta_k: float = 0.0            # N/m
    delta_eta: float = -0.00753     # kg/s

    def check_within(self, bounds: UncertaintyBounds) -> None:
        if abs(self.delta_k) > bounds.delta_k_max:
            raise ValueError(
                f"|delta_k|={abs(self.delta_k)} exceeds bound {bounds.delta_k_max}"
            )
        if abs(self.delta_eta) > bounds.delta_eta_max:
            raise ValueError(
                f"|delta_eta|={abs(self.delta_eta)} exceeds bound {bounds.delta_eta_max}"
            )


@dataclass(frozen=True)
class PlantState:
    """Armature position (m), velocity (m/s) and coil current (A)."""

    x_a: float
    v: float
    i: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x_a, self.v, self.i])

    @staticmethod
    def from_array(x: np.ndarray) -> "PlantState":
        return PlantState(x_a=float(x[0]), v=float(x[1]), i=float(x[2]))

    def in_position_range(self, params: PlantParams) -> bool:
        return 0.0 <= self.x_a <= params.x_f


def magnetic_force(params: PlantParams, x_a: float, i: float) -> float:
    """Coil force a i^2 / (2 (b + x_a)^2), always braking (pulls toward -x)."""
    gap = params.b_coil + x_a
    return params.a_coil * i * i / (2.0 * gap * gap)


def true_dynamics(
    params: PlantParams,
    disturbance: TrueDisturbance,
    state: PlantState,
    u: float,
) -> np.ndarray:
    """Time derivative of (x_a, v, i) under the realized (true) parameters."""
    gap = params.b_coil + state.x_a
    if gap <= 0.0:
        raise NonFiniteState(
            f"geometric singularity: b + x_a = {gap:.3e} <= 0 (x_a={state.x_a:.3e})"
        )
    k_true = params.k_nominal + disturbance.delta_k
    eta_true = params.eta_nominal + disturbance.delta_eta
    acc = (
        k_true * (params.x0_spring - state.x_a)
        - eta_true * state.v
        - magnetic_force(params, state.x_a, state.i)
    ) / params.mass
    # Voltage equation solved for di/dt.
    di = (
        u
        - params.resistance * state.i
        + params.a_coil * state.i * state.v / (gap * gap)
    ) * gap / params.a_coil
    return np.array([state.v, acc, di])


def nominal_dynamics(params: PlantParams, state: PlantState, u: float) -> np.ndarray:
    """true_dynamics evaluated with zero parameter offsets."""
    return true_dynamics(params, TrueDisturbance(0.0, 0.0), state, u)


def nominal_acceleration(params: PlantParams, state: PlantState) -> float:
    """Armature acceleration as reconstructed from the nominal model.

    This is the controller's only access to x_a'': the true acceleration is
    not measurable, so the feedback and the uncertainty bound both use this
    estimate.
    """
    gap = params.b_coil + state.x_a
    if gap <= 0.0:
        raise NonFiniteState(
            f"geometric singularity: b + x_a = {gap:.3e} <= 0 (x_a={state.x_a:.3e})"
        )
    return (
        params.k_nominal * (params.x0_spring - state.x_a)
        - params.eta_nominal * state.v
        - magnetic_force(params, state.x_a, state.i)
    ) / params.mass


def linearized_terms(
    params: PlantParams, state: PlantState, i_min: float = I_MIN
) -> tuple[float, float]:
    """Drift b(xi) and input gain A(xi) of the third output derivative.

        x_a''' = b(xi) + A(xi) u,
        b = -(k_n/m) v - (eta_n/m) x_a'' + R i^2 / ((b+x_a) m),
        A = -i / (m (b+x_a)).

    Raises CurrentSingularity for |i| < i_min (A would vanish and the control
    law divides by it); |i| = i_min exactly is accepted.
    """
    if abs(state.i) < i_min:
        raise CurrentSingularity(
            f"|i|={abs(state.i):.3e} A below i_min={i_min:.3e} A", i=state.i
        )
    gap = params.b_coil + state.x_a
    if gap <= 0.0:
        raise NonFiniteState(
            f"geometric singularity: b + x_a = {gap:.3e} <= 0 (x_a={state.x_a:.3e})"
        )
    acc = nominal_acceleration(params, state)
    b_term = (
        -(params.k_nominal / params.mass) * state.v
        - (params.eta_nominal / params.mass) * acc
        + params.resistance * state.i * state.i / (gap * params.mass)
    )
    a_term = -state.i / (params.mass * gap)
    return b_term, a_term


def d2_bound(
    bounds: UncertaintyBounds, params: PlantParams, state: PlantState
) -> float:
    """Upper bound d2 on |Delta b|: (dk_max/m)|v| + (de_max/m)|x_a''|."""
    acc = nominal_acceleration(params, state)
    return (
        bounds.delta_k_max * abs(state.v) + bounds.delta_eta_max * abs(acc)
    ) / params.mass


def equilibrium_current(params: PlantParams, x_a: float = 0.0) -> float:
    """Coil current holding the armature at rest at x_a (nominal spring).

    Force balance k(x0 - x_a) = a i^2 / (2 (b+x_a)^2) gives
    i = (b + x_a) sqrt(2 k (x0 - x_a) / a); about 0.52 A at x_a = 0 for the
    default parameters.
    """
    if not 0.0 <= x_a < params.x0_spring:
        raise ValueError(f"x_a={x_a} outside [0, x0_spring)")
    return (params.b_coil + x_a) * math.sqrt(
        2.0 * params.k_nominal * (params.x0_spring - x_a) / params.a_coil
    )
