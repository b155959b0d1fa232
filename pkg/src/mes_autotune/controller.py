"""Robust feedback-linearizing control law for the actuator.

The voltage command inverts the input gain of the third output derivative and
stacks three pieces:

    u = A^-1 (v_s - b) - A^-1 * (dV/dz_3) * k_robust * d2

* v_s is the virtual input: reference jerk feedforward plus gain feedback on
  the tracking error chain (position, velocity, acceleration errors).
* A^-1 (v_s - b) cancels the plant nonlinearity exactly under nominal
  parameters, leaving z' = A_tilde z.
* The last term is the Lyapunov-reconstruction robust correction: dV/dz_3 =
  2 (P z)_3 with P from the Lyapunov equation, k_robust >= 0 and d2 the
  uncertainty bound. It vanishes when either the bounds or k_robust are zero.

The acceleration error z3 uses the nominal-model acceleration estimate (the
true acceleration is not measurable), so under active disturbances z3
carries the model bias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actuator import (
    PlantParams,
    PlantState,
    TrueDisturbance,
    UncertaintyBounds,
    d2_bound,
    linearized_terms,
    nominal_acceleration,
    true_dynamics,
)
from .integrator import NonFiniteState, VectorField
from .stability import GainSet, LyapunovData, companion_matrix, is_hurwitz
from .trajectory import ReferenceSample, ReferenceSpec, sample


class NonHurwitzGains(ValueError):
    """Gain set rejected: the closed-loop error polynomial is not Hurwitz."""


@dataclass(frozen=True)
class ErrorVector:
    """Tracking error chain: position (m), velocity (m/s), acceleration (m/s^2)."""

    z1: float
    z2: float
    z3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.z1, self.z2, self.z3])


@dataclass(frozen=True)
class ControlOutput:
    u: float                  # V
    v_s: float                # m/s^3, virtual input
    robust_component: float   # V, the Lyapunov-reconstruction part of u
    in_invariant_set: bool


def error_vector(
    params: PlantParams, state: PlantState, ref: ReferenceSample
) -> ErrorVector:
    """z = (x_a - x_ref, v - v_ref, x_a''_nominal - a_ref)."""
    return ErrorVector(
        z1=state.x_a - ref.pos,
        z2=state.v - ref.vel,
        z3=nominal_acceleration(params, state) - ref.acc,
    )


def virtual_input(gains: GainSet, z: ErrorVector, ref_jerk: float) -> float:
    """v_s = jerk feedforward + k1 z1 + k2 z2 + k3 z3 (gains negative)."""
    return ref_jerk + gains.k1 * z.z1 + gains.k2 * z.z2 + gains.k3 * z.z3


def robust_control(
    params: PlantParams,
    bounds: UncertaintyBounds,
    gains: GainSet,
    lyap: LyapunovData,
    state: PlantState,
    ref: ReferenceSample,
) -> ControlOutput:
    """Evaluate the full control law at one (state, reference) pair.

    P must solve the Lyapunov equation for the companion matrix of the gains
    currently in force; gains are validated against the Hurwitz criterion on
    every call (cheap arithmetic).
    """
    if not is_hurwitz(gains):
        raise NonHurwitzGains(
            f"gains ({gains.k1}, {gains.k2}, {gains.k3}) fail the Routh-Hurwitz test"
        )
    if not np.array_equal(lyap.a_tilde, companion_matrix(gains)):
        raise ValueError("LyapunovData was solved for a different gain set")

    z = error_vector(params, state, ref)
    v_s = virtual_input(gains, z, ref.jerk)
    b_term, a_term = linearized_terms(params, state)
    d2 = d2_bound(bounds, params, state)
    p = lyap.p_matrix
    grad3 = 2.0 * (p[2, 0] * z.z1 + p[2, 1] * z.z2 + p[2, 2] * z.z3)

    robust_component = -grad3 * gains.k_robust * d2 / a_term
    u = (v_s - b_term) / a_term + robust_component
    return ControlOutput(
        u=u,
        v_s=v_s,
        robust_component=robust_component,
        in_invariant_set=bool(1.0 - gains.k_robust * abs(grad3) >= 0.0),
    )


def closed_loop_field(
    params: PlantParams,
    disturbance: TrueDisturbance,
    bounds: UncertaintyBounds,
    gains: GainSet,
    lyap: LyapunovData,
    spec: ReferenceSpec,
) -> VectorField:
    """Compose controller and true plant into a vector field for the integrator.

    Time is iteration-local (the reference starts at t = 0). Controller errors
    are re-raised with the failing time attached.
    """

    def field(t: float, x: np.ndarray) -> np.ndarray:
        state = PlantState.from_array(x)
        try:
            out = robust_control(params, bounds, gains, lyap, state, sample(spec, t))
            return true_dynamics(params, disturbance, state, out.u)
        except (NonFiniteState, RuntimeError) as exc:
            if getattr(exc, "t", None) is None:
                exc.t = t
            raise

    return field
