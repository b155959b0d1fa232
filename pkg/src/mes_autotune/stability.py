"""Hurwitz gain validation and the Lyapunov matrix equation.

The closed-loop error dynamics under the linearizing feedback are
z' = A_tilde z with A_tilde the companion matrix carrying the feedback gains
in its last row (gains are stored with their signs, negative for a stable
loop). The robust control term needs P > 0 solving

    P A_tilde + A_tilde' P = -I,

and the invariant set of the robust controller is the region where
1 - k |dV/dz_ind| >= 0 for V = z' P z.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


class SingularSystem(RuntimeError):
    """The Lyapunov linear system could not be solved (non-Hurwitz or ill-conditioned A)."""


@dataclass(frozen=True)
class GainSet:
    """Error-feedback gains (negative by convention) plus the robust gain.

    k1 acts on the position error, k2 on velocity, k3 on acceleration;
    k_robust scales the Lyapunov-reconstruction term and must be >= 0.
    """

    k1: float
    k2: float
    k3: float
    k_robust: float = 0.0

    def __post_init__(self):
        if self.k_robust < 0.0:
            raise ValueError(f"k_robust must be >= 0, got {self.k_robust}")


@dataclass(frozen=True)
class LyapunovData:
    """Companion matrix and the solution of P A + A'P = -I for one gain set."""

    a_tilde: np.ndarray
    p_matrix: np.ndarray

    def residual(self) -> float:
        n = self.a_tilde.shape[0]
        return float(
            np.abs(
                self.p_matrix @ self.a_tilde
                + self.a_tilde.T @ self.p_matrix
                + np.eye(n)
            ).max()
        )


def companion_matrix(gains: GainSet) -> np.ndarray:
    """3x3 companion form: rows (0,1,0), (0,0,1), (k1,k2,k3)."""
    return np.array(
        [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [gains.k1, gains.k2, gains.k3],
        ]
    )


def is_hurwitz(gains: GainSet) -> bool:
    """Routh-Hurwitz test for s^3 - k3 s^2 - k2 s - k1 (strict inequalities).

    For the cubic s^3 + a2 s^2 + a1 s + a0 the criterion is a2 > 0, a0 > 0
    and a2*a1 > a0 (which together force a1 > 0). Marginal stability is
    rejected.
    """
    a2 = -gains.k3
    a1 = -gains.k2
    a0 = -gains.k1
    return a2 > 0.0 and a0 > 0.0 and a2 * a1 > a0


def solve_lyapunov(a: np.ndarray) -> np.ndarray:
    """Solve P A + A'P = -I for symmetric positive definite P.

    The equation is vectorized through Kronecker products into one dense
    n^2 x n^2 solve:  (A' (x) I + I (x) A') vec(P) = vec(-I), then P is
    symmetrized to remove roundoff asymmetry. Caller is responsible for A
    being Hurwitz (use is_hurwitz for companion forms); a singular solve is
    reported rather than silently returning garbage.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    lhs = np.kron(np.eye(n), a.T) + np.kron(a.T, np.eye(n))
    rhs = (-np.eye(n)).ravel()
    try:
        p_vec = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"Lyapunov solve failed: {exc}") from exc
    if not np.all(np.isfinite(p_vec)):
        raise SingularSystem("Lyapunov solve produced non-finite entries")
    p = p_vec.reshape(n, n)
    return 0.5 * (p + p.T)


def is_positive_definite(p: np.ndarray) -> bool:
    """Leading principal minors for n <= 3, symmetric eigensolve above."""
    p = np.asarray(p, dtype=float)
    n = p.shape[0]
    if n <= 3:
        return all(np.linalg.det(p[: k + 1, : k + 1]) > 0.0 for k in range(n))
    return bool(np.linalg.eigvalsh(p).min() > 0.0)


def lyapunov_for_gains(gains: GainSet) -> LyapunovData:
    """Companion matrix + Lyapunov solution for one gain set, validated."""
    a = companion_matrix(gains)
    p = solve_lyapunov(a)
    data = LyapunovData(a_tilde=a, p_matrix=p)
    if data.residual() > 1e-10:
        raise SingularSystem(
            f"Lyapunov residual {data.residual():.3e} exceeds 1e-10 "
            "(gains likely not Hurwitz)"
        )
    if not is_positive_definite(p):
        raise SingularSystem("Lyapunov solution is not positive definite")
    return data


def invariant_set_membership(
    z: Sequence[float],
    k_robust: float,
    p: np.ndarray,
    indices: Optional[Sequence[int]] = None,
) -> bool:
    """True iff 1 - k_robust * |dV/dz_ind| >= 0 at z, for V = z'Pz.

    dV/dz = 2 P z; only the components at the highest-derivative indices of
    each output chain enter (1-based; cumulative relative degrees for
    multi-output chains). Default is the single last index, the full-relative-
    degree single-output case.
    """
    z = np.asarray(z, dtype=float)
    p = np.asarray(p, dtype=float)
    n = z.shape[0]
    if indices is None:
        indices = (n,)
    idx = np.asarray(indices, dtype=int) - 1
    grad_ind = 2.0 * (p @ z)[idx]
    return bool(1.0 - k_robust * float(np.linalg.norm(grad_ind)) >= 0.0)
