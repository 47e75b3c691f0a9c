"""Threshold hidden-variable model: voltages, detection, outcomes.

All functions accept scalars or numpy arrays and broadcast. Angles are in
radians; nothing is range-reduced, the trigonometry takes care of periodicity.
Bob's wing is Alice's wing evaluated at ``beta - pi/2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate

HALF_PI = math.pi / 2
TWO_PI = 2 * math.pi


class Outcome(enum.IntEnum):
    """Per-wing result. The integer value doubles as a count-table index."""

    O = 0
    E = 1
    U = 2

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class Threshold:
    """Detection threshold ``V`` on the local voltage.

    Values outside [-1, 0] are rejected unless ``allow_out_of_range`` is set.
    """

    value: float
    allow_out_of_range: bool = False

    def __post_init__(self):
        v = float(self.value)
        if not math.isfinite(v):
            raise ValueError(f"threshold must be finite, got {self.value!r}")
        if not self.allow_out_of_range and not -1.0 <= v <= 0.0:
            raise ValueError(
                f"threshold {v} outside [-1, 0]; pass allow_out_of_range=True to use it anyway"
            )
        object.__setattr__(self, "value", v)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class SettingAngles:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    @property
    def alphas(self) -> tuple[float, float]:
        return (self.alpha1, self.alpha2)

    @property
    def betas(self) -> tuple[float, float]:
        return (self.beta1, self.beta2)


def settings_from_theta(theta: float) -> SettingAngles:
    """Analyzer angles for sweep parameter ``theta`` (radians)."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    return SettingAngles(
        alpha1=theta + 3 * math.pi / 8,
        alpha2=theta + math.pi / 8,
        beta1=math.pi / 8,
        beta2=3 * math.pi / 8,
    )


def _sin4(phase):
    return np.sin(2 * phase) ** 4


def voltage_alice(alpha, lam, r):
    return r * _sin4(alpha - lam) / 2 - 1


def voltage_bob(beta, lam, r_prime):
    return voltage_alice(beta - HALF_PI, lam, r_prime)


def detect(v, V) -> bool | np.ndarray:
    """True where the voltage is strictly below the threshold."""
    return v < float(V)


def sign_alice(alpha, lam, r_dprime):
    """Raw +/-1 outcome before labelling; a zero argument counts as +1."""
    return np.where(1 + np.cos(2 * (alpha - lam)) - 2 * r_dprime >= 0, 1, -1)


def sign_bob(beta, lam, r_tprime):
    return sign_alice(beta - HALF_PI, lam, r_tprime)


def outcome_codes_alice(alpha, lam, r_dprime, detected) -> np.ndarray:
    """Array form of :func:`outcome_alice`; returns ``Outcome`` integer codes."""
    s = sign_alice(alpha, lam, r_dprime)
    return np.where(detected, np.where(s > 0, Outcome.O, Outcome.E), Outcome.U).astype(np.int8)


def outcome_codes_bob(beta, lam, r_tprime, detected) -> np.ndarray:
    # Bob's labels are inverted: b = -1 is "o".
    s = sign_bob(beta, lam, r_tprime)
    return np.where(detected, np.where(s < 0, Outcome.O, Outcome.E), Outcome.U).astype(np.int8)


def outcome_alice(alpha: float, lam: float, r_dprime: float, detected: bool) -> Outcome:
    return Outcome(int(outcome_codes_alice(alpha, lam, r_dprime, detected)))


def outcome_bob(beta: float, lam: float, r_tprime: float, detected: bool) -> Outcome:
    return Outcome(int(outcome_codes_bob(beta, lam, r_tprime, detected)))


def _detection_probability(phase, V):
    # P(r * s4 / 2 - 1 < V) for r ~ U[0, 1) is min{1, c / s4} with c = 2(V + 1).
    # s4 == 0 means v = -1, detected whenever V > -1; never divide by it.
    c = 2 * (float(V) + 1)
    s4 = np.asarray(_sin4(phase), dtype=float)
    if c <= 0:
        out = np.zeros_like(s4)
    else:
        out = np.ones_like(s4)
        np.divide(c, s4, out=out, where=s4 > c)
    return out if out.ndim else float(out)


def detection_probability_alice(alpha, lam, V):
    return _detection_probability(alpha - lam, V)


def detection_probability_bob(beta, lam, V):
    return _detection_probability(beta - HALF_PI - lam, V)


def crossover_points(offset: float, V, lo: float = 0.0, hi: float = TWO_PI) -> list[float]:
    """Values of ``lam`` in ``(lo, hi)`` where ``sin^4(2(offset - lam)) == 2(V + 1)``.

    These are the kinks of the detection probability as a function of ``lam``.
    """
    c = 2 * (float(V) + 1)
    if not 0 < c < 1:
        return []
    half_width = math.asin(c ** 0.25) / 2
    # |sin(2u)| = s at u = +/- half_width + k*pi/2, u = offset - lam.
    out = []
    k_lo = math.floor((offset - hi) / HALF_PI) - 1
    k_hi = math.ceil((offset - lo) / HALF_PI) + 1
    for k in range(k_lo, k_hi + 1):
        for u in (k * HALF_PI - half_width, k * HALF_PI + half_width):
            lam = offset - u
            if lo < lam < hi:
                out.append(lam)
    return sorted(out)


def average_efficiency(V, epsabs: float = 1e-9) -> float:
    """Mean single-wing detection probability over a uniform hidden variable.

    Computed by adaptive quadrature over one full period of ``lam``, with the
    panels cut at the crossover points. Raises ``QuadratureError`` if the
    tolerance cannot be met.
    """
    res = integrate(
        lambda lam: _detection_probability(-lam, V),
        0.0,
        TWO_PI,
        points=crossover_points(0.0, V),
        epsabs=epsabs * TWO_PI,
    )
    return res.value / TWO_PI
