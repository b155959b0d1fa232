"""Multi-parametric extremum-seeking machinery: dither channels and schedules.

Each tuned gain gets one channel (x, a, omega). The applied gain offset is

    delta(t) = x(t) + a sin(omega t + pi/2)

and the integrator state x carries the learned part, driven by the measured
cost correlated with the quadrature dither sin(omega t - pi/2). Costs are only
measurable at iteration boundaries, so x advances once per iteration; two
realizations of that update are provided:

* `kick_channel` (campaign default): one Euler step of the dither ODE taken at
  the instant the iteration's gains were frozen,
      x += t_f * a * sin(omega t0 - pi/2) * Q.
  Since sin(omega t0 - pi/2) = -(dither direction at t0), this is the classic
  demodulation update and its averaged drift is -(a^2/2) t_f dQ/dbeta for
  every channel.
* `advance_channel`: the exact integral of a sin(omega tau - pi/2) Q over the
  iteration window with Q held constant. Kept selectable (config
  es.update = "integral"); note its averaged drift carries a sin(omega t_f)
  factor that can point uphill for unlucky omega t_f.

The frequency condition omega_p + omega_q != omega_r over all distinct triples
(plus pairwise distinctness) keeps the channels' demodulations from
interfering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

REL_TOL = 1e-9


@dataclass
class ESChannel:
    """One dither channel tuning one gain."""

    omega: float               # rad/s
    base_amplitude: float      # units of the tuned gain
    nominal_value: float       # gain the learned offset is added to
    x_state: float = 0.0
    current_amplitude: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.omega > 0.0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.base_amplitude > 0.0:
            raise ValueError(
                f"base_amplitude must be positive, got {self.base_amplitude}"
            )
        if self.current_amplitude is None:
            self.current_amplitude = self.base_amplitude


def frequency_violations(omegas: Sequence[float]) -> list[str]:
    """Human-readable list of duplicate pairs and resonant triples.

    Equalities are tested with relative tolerance 1e-9. A triple
    (omega_p, omega_q, omega_r) violates the condition when
    omega_p + omega_q == omega_r for distinct channel indices.
    """
    violations = []
    n = len(omegas)
    for p in range(n):
        for q in range(p + 1, n):
            if math.isclose(omegas[p], omegas[q], rel_tol=REL_TOL, abs_tol=0.0):
                violations.append(f"duplicate frequencies: {omegas[p]} and {omegas[q]}")
    for p in range(n):
        for q in range(p + 1, n):
            for r in range(n):
                if r == p or r == q:
                    continue
                s = omegas[p] + omegas[q]
                if math.isclose(s, omegas[r], rel_tol=REL_TOL, abs_tol=0.0):
                    violations.append(
                        f"resonant triple: {omegas[p]} + {omegas[q]} = {omegas[r]}"
                    )
    return violations


def validate_frequencies(omegas: Sequence[float]) -> bool:
    """True iff the dither frequencies are pairwise distinct and triple-sum free."""
    if len(omegas) == 0:
        raise ValueError("frequency list must be nonempty")
    return not frequency_violations(omegas)


@dataclass
class ESBank:
    """Ordered dither channels (K1, K2, K3, k_robust layout) plus latch state."""

    channels: list[ESChannel]
    stage: int = 0  # deepest amplitude-schedule stage fired so far (0 = base)

    def __post_init__(self):
        bad = frequency_violations([ch.omega for ch in self.channels])
        if bad:
            raise ValueError("ES frequencies invalid: " + "; ".join(bad))

    @property
    def omega0(self) -> float:
        """Largest channel frequency."""
        return max(ch.omega for ch in self.channels)

    def deltas_at(self, t: float) -> list[float]:
        return [delta_at(ch, t) for ch in self.channels]

    def x_states(self) -> list[float]:
        return [ch.x_state for ch in self.channels]


def delta_at(channel: ESChannel, t: float) -> float:
    """Gain offset applied at time t: learned part plus the dither."""
    return channel.x_state + channel.current_amplitude * math.sin(
        channel.omega * t + math.pi / 2.0
    )


def advance_channel(
    channel: ESChannel, q_measured: float, t_start: float, t_end: float
) -> ESChannel:
    """Exact integral of a sin(omega tau - pi/2) Q over [t_start, t_end].

    Q is held constant (it is only measured once per iteration); the sinusoid
    is integrated in closed form, so there is no quadrature error. Mutates and
    returns the channel.
    """
    if not t_end > t_start:
        raise ValueError(f"t_end ({t_end}) must exceed t_start ({t_start})")
    if q_measured < 0.0:
        raise ValueError(f"cost must be nonnegative, got {q_measured}")
    a, w = channel.current_amplitude, channel.omega
    channel.x_state += (
        q_measured
        * (a / w)
        * (math.cos(w * t_start - math.pi / 2.0) - math.cos(w * t_end - math.pi / 2.0))
    )
    return channel


def kick_channel(
    channel: ESChannel, q_measured: float, t_assign: float, t_f: float
) -> ESChannel:
    """Euler step of the dither ODE sampled at the gain-freeze instant t_assign.

    x += t_f * a * sin(omega t_assign - pi/2) * Q. Mutates and returns the
    channel. |step| <= a * Q * t_f.
    """
    if q_measured < 0.0:
        raise ValueError(f"cost must be nonnegative, got {q_measured}")
    channel.x_state += (
        t_f
        * channel.current_amplitude
        * math.sin(channel.omega * t_assign - math.pi / 2.0)
        * q_measured
    )
    return channel


@dataclass(frozen=True)
class AmplitudeSchedule:
    """Piecewise dither-amplitude reduction keyed to the first-iteration cost.

    Each stage is (cost_fraction, amplitude_scale): when the measured cost
    first drops to <= cost_fraction * Q_first (inclusive), every channel's
    amplitude becomes base * amplitude_scale * Q_first. amplitude_scale may be
    a single number or one number per channel. Stages must have strictly
    decreasing fractions; once a stage fires it stays latched (amplitudes
    never go back up).
    """

    stages: tuple = ((0.5, 0.5), (1.0 / 3.0, 1.0 / 3.0))

    def __post_init__(self):
        fracs = [s[0] for s in self.stages]
        if any(f2 >= f1 for f1, f2 in zip(fracs, fracs[1:])):
            raise ValueError(f"stage fractions must be strictly decreasing: {fracs}")
        for _, scale in self.stages:
            scales = scale if isinstance(scale, (tuple, list)) else (scale,)
            if any(not s > 0.0 for s in scales):
                raise ValueError("amplitude scales must be positive")


def schedule_amplitudes(
    bank: ESBank,
    schedule: AmplitudeSchedule,
    q_current: float,
    q_first: float,
) -> int:
    """Apply the deepest satisfied stage (latched); returns the active stage.

    Q_first must be positive when the schedule has stages: a zero first cost
    would zero every subsequent amplitude.
    """
    if not schedule.stages:
        return bank.stage
    if not q_first > 0.0:
        raise ValueError(
            f"amplitude schedule needs Q(1) > 0, got {q_first} "
            "(use an empty schedule for zero-cost campaigns)"
        )
    fired = bank.stage
    for idx, (fraction, _) in enumerate(schedule.stages, start=1):
        if q_current <= fraction * q_first:
            fired = max(fired, idx)
    if fired > bank.stage:
        bank.stage = fired
    if bank.stage > 0:
        _, scale = schedule.stages[bank.stage - 1]
        scales = (
            list(scale)
            if isinstance(scale, (tuple, list))
            else [scale] * len(bank.channels)
        )
        if len(scales) != len(bank.channels):
            raise ValueError(
                f"per-channel scale length {len(scales)} != {len(bank.channels)} channels"
            )
        for ch, s in zip(bank.channels, scales):
            ch.current_amplitude = ch.base_amplitude * s * q_first
    return bank.stage
