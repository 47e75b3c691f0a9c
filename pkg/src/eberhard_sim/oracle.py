"""Expected outcome probabilities of the model, by quadrature over lambda.

Given lambda, the two wings are independent, so every joint probability is
an integral of a product of single-wing conditionals. All 36 cells for one
setting configuration are integrated together on a shared panel mesh that
is cut at every wing's detection-probability kink.
"""
from __future__ import annotations

import functools
import math

import numpy as np

from .counts import JMode
from .model import (
    HALF_PI,
    TWO_PI,
    Outcome,
    SettingAngles,
    crossover_points,
    detection_probability_alice,
    detection_probability_bob,
    settings_from_theta,
)
from .quadrature import QuadResult, integrate

JOINT_EPSABS = 1e-7


def conditional_prob_alice(a: Outcome, alpha, lam, V):
    eta = detection_probability_alice(alpha, lam, V)
    c = np.cos(2 * (alpha - lam))
    p_o = eta * (1 + c) / 2
    p_e = eta * (1 - c) / 2
    return {Outcome.O: p_o, Outcome.E: p_e, Outcome.U: 1 - (p_o + p_e)}[Outcome(a)]


def conditional_prob_bob(b: Outcome, beta, lam, V):
    # b = +1 is labelled "e" on Bob's side, so the o/e roles swap.
    eta = detection_probability_bob(beta, lam, V)
    c = np.cos(2 * (beta - HALF_PI - lam))
    p_e = eta * (1 + c) / 2
    p_o = eta * (1 - c) / 2
    return {Outcome.O: p_o, Outcome.E: p_e, Outcome.U: 1 - (p_o + p_e)}[Outcome(b)]


def _wing_table(cond, angles, lam, V) -> np.ndarray:
    # -> (len(lam), 2 settings, 3 outcomes)
    return np.stack(
        [np.stack([cond(o, ang, lam, V) for o in Outcome], axis=-1) for ang in angles],
        axis=1,
    )


def kink_points(settings: SettingAngles, V) -> list[float]:
    pts = []
    for alpha in settings.alphas:
        pts += crossover_points(alpha, V)
    for beta in settings.betas:
        pts += crossover_points(beta - HALF_PI, V)
    return sorted(set(pts))


def integrate_joint(settings: SettingAngles, V, epsabs: float = JOINT_EPSABS) -> QuadResult:
    """Integrate all 36 joint probabilities; result value has shape (2, 2, 3, 3)."""
    v = float(V)

    def integrand(lam):
        pa = _wing_table(conditional_prob_alice, settings.alphas, lam, v)
        pb = _wing_table(conditional_prob_bob, settings.betas, lam, v)
        return np.einsum("nxa,nyb->nxyab", pa, pb) / TWO_PI

    # The mean over [0, 2pi] is the integral of integrand; tighten by an order
    # of magnitude so each cell clears epsabs comfortably.
    return integrate(integrand, 0.0, TWO_PI, points=kink_points(settings, v), epsabs=epsabs / 10)


@functools.lru_cache(maxsize=4096)
def _joint_table_cached(settings: SettingAngles, V: float) -> np.ndarray:
    table = np.clip(integrate_joint(settings, V).value, 0.0, 1.0)
    table.setflags(write=False)
    return table


def joint_table(settings: SettingAngles, V) -> np.ndarray:
    """Read-only ``(2, 2, 3, 3)`` array of P(a, b | alpha_x, beta_y)."""
    return _joint_table_cached(settings, float(V))


def joint_prob(a: Outcome, b: Outcome, pair, settings: SettingAngles, V) -> float:
    x, y = pair
    return float(joint_table(settings, V)[x - 1, y - 1, Outcome(a), Outcome(b)])


def expected_j(theta: float, V, trials_total: int, mode: JMode = JMode.FULL) -> float:
    """Mean of J for equal allocation (``trials_total / 4`` trials per pair)."""
    p = joint_table(settings_from_theta(theta), V)
    per_pair = trials_total / 4
    return per_pair * sum(sign * p[x - 1, y - 1, a, b] for sign, (x, y), a, b in mode.terms)


def j_sigma(theta: float, V, trials_total: int, mode: JMode = JMode.FULL) -> float:
    """Standard deviation of J from summed binomial variances of its cells.

    Cells sharing a setting pair are actually negatively correlated
    (multinomial), so this overestimates the true spread.
    """
    p = joint_table(settings_from_theta(theta), V)
    per_pair = trials_total / 4
    var = sum(per_pair * p[x - 1, y - 1, a, b] * (1 - p[x - 1, y - 1, a, b]) for _, (x, y), a, b in mode.terms)
    return math.sqrt(var)


def mean_detection_probability(V, offset: float = 0.0) -> float:
    """Mean of Alice's detection probability over lambda, via the oracle's own mesh."""
    res = integrate(
        lambda lam: detection_probability_alice(offset, lam, V) / TWO_PI,
        0.0,
        TWO_PI,
        points=crossover_points(offset, V),
        epsabs=1e-9,
    )
    return res.value
