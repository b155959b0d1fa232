"""Quintic rest-to-rest reference trajectory with a hold after the motion time.

The reference is x_ref(t) = sum a_i (t/t_f)^i, i = 0..5, with the six
coefficients solved from the rest-to-rest boundary conditions
x(0)=0, x(t_f)=x_f, and zero velocity/acceleration at both ends. For t past
t_f the reference holds the final position with zero derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ReferenceSample:
    pos: float
    vel: float
    acc: float
    jerk: float


@dataclass(frozen=True)
class ReferenceSpec:
    """Motion time, final position and the normalized-polynomial coefficients."""

    t_f: float
    x_f: float
    coeffs: np.ndarray  # a_0..a_5, meters, in tau = t/t_f


def build_quintic(t_f: float, x_f: float) -> ReferenceSpec:
    """Solve the 6x6 boundary system; equals (0,0,0,10,-15,6)*x_f for any t_f."""
    if not t_f > 0.0:
        raise ValueError(f"t_f must be positive, got {t_f}")
    i = np.arange(6)
    a = np.zeros((6, 6))
    a[0, 0] = 1.0                     # x(0) = 0
    a[1, 1] = 1.0                     # x'(0) = 0
    a[2, 2] = 2.0                     # x''(0) = 0
    a[3, :] = 1.0                     # x(t_f) = x_f
    a[4, :] = i                       # x'(t_f) = 0
    a[5, :] = i * (i - 1)             # x''(t_f) = 0
    rhs = np.array([0.0, 0.0, 0.0, x_f, 0.0, 0.0])
    coeffs = np.linalg.solve(a, rhs)
    return ReferenceSpec(t_f=t_f, x_f=x_f, coeffs=coeffs)


def sample(spec: ReferenceSpec, t: float) -> ReferenceSample:
    """Evaluate position and its first three derivatives at iteration-local t.

    The polynomial applies on [0, t_f] inclusive; the hold (x_f, 0, 0, 0)
    applies strictly after t_f. Position, velocity and acceleration are
    continuous across the switch by construction; jerk is not, and carries
    its polynomial value at exactly t = t_f.
    """
    if t < 0.0:
        raise ValueError(f"iteration-local time must be >= 0, got {t}")
    if t > spec.t_f:
        return ReferenceSample(pos=spec.x_f, vel=0.0, acc=0.0, jerk=0.0)
    tau = t / spec.t_f
    c = spec.coeffs
    # Horner evaluation of the polynomial and its tau-derivatives.
    pos = ((((c[5] * tau + c[4]) * tau + c[3]) * tau + c[2]) * tau + c[1]) * tau + c[0]
    d1 = (((5.0 * c[5] * tau + 4.0 * c[4]) * tau + 3.0 * c[3]) * tau + 2.0 * c[2]) * tau + c[1]
    d2 = ((20.0 * c[5] * tau + 12.0 * c[4]) * tau + 6.0 * c[3]) * tau + 2.0 * c[2]
    d3 = (60.0 * c[5] * tau + 24.0 * c[4]) * tau + 6.0 * c[3]
    tf = spec.t_f
    return ReferenceSample(
        pos=float(pos),
        vel=float(d1) / tf,
        acc=float(d2) / tf**2,
        jerk=float(d3) / tf**3,
    )
