"""Seed-driven Monte Carlo runner for the threshold model.

Each trial's random numbers come from :mod:`eberhard_sim.rng`, keyed by
``(seed, theta_index, trial_index)``. The *index* of a theta point in the
sweep, not its value, selects the stream; pass ``theta_indices`` explicitly
to keep a point's stream fixed when reordering a sweep.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng
from .counts import PAIRS, CountTable, deleted_singles_j, eberhard_j
from .model import (
    TWO_PI,
    Outcome,
    SettingAngles,
    Threshold,
    detect,
    outcome_codes_alice,
    outcome_codes_bob,
    settings_from_theta,
    voltage_alice,
    voltage_bob,
)

DEFAULT_CHUNK = 1 << 16
# lambda, r, r', r'', r''' and the pair selector used by random allocation.
_SLOTS = 6


class Allocation(enum.Enum):
    EQUAL = "equal"
    RANDOM = "random"


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrialDraw:
    lam: float
    r: float
    r_prime: float
    r_dprime: float
    r_tprime: float


@dataclass(frozen=True)
class TrialDraws:
    """Column arrays of draws for a block of trials, plus the pair selector."""

    lam: np.ndarray
    r: np.ndarray
    r_prime: np.ndarray
    r_dprime: np.ndarray
    r_tprime: np.ndarray
    pair_u: np.ndarray


def derive_draws(seed: int, theta_index: int, trial_indices) -> TrialDraws:
    u = rng.uniforms(seed, theta_index, trial_indices, _SLOTS)
    return TrialDraws(TWO_PI * u[0], u[1], u[2], u[3], u[4], u[5])


def derive_draw(seed: int, theta_index: int, trial_index: int) -> TrialDraw:
    d = derive_draws(seed, theta_index, [trial_index])
    return TrialDraw(float(d.lam[0]), float(d.r[0]), float(d.r_prime[0]), float(d.r_dprime[0]), float(d.r_tprime[0]))


def _wing_codes(alpha, beta, V, d):
    # All five draws are consumed regardless of detection.
    det_a = detect(voltage_alice(alpha, d.lam, d.r), V)
    det_b = detect(voltage_bob(beta, d.lam, d.r_prime), V)
    a = outcome_codes_alice(alpha, d.lam, d.r_dprime, det_a)
    b = outcome_codes_bob(beta, d.lam, d.r_tprime, det_b)
    return a, b


def run_trial(settings: SettingAngles, pair, V, draw: TrialDraw) -> tuple[Outcome, Outcome]:
    x, y = pair
    alpha = settings.alphas[x - 1]
    beta = settings.betas[y - 1]
    a, b = _wing_codes(alpha, beta, V, draw)
    return Outcome(int(a)), Outcome(int(b))


@dataclass
class SweepResult:
    theta: float
    theta_index: int
    count_table: CountTable
    j_full: int
    j_deleted: int
    detected: int
    empirical_efficiency: float

    @property
    def theta_degrees(self) -> float:
        return math.degrees(self.theta)


def validate_point(V, trials_total: int, allocation: Allocation) -> None:
    if isinstance(trials_total, bool) or int(trials_total) != trials_total or trials_total <= 0:
        raise ValueError(f"trials_total must be a positive integer, got {trials_total!r}")
    if Allocation(allocation) is Allocation.EQUAL and trials_total % 4:
        raise ValueError(f"equal allocation needs trials_total divisible by 4, got {trials_total}")
    if not isinstance(V, Threshold):
        Threshold(float(V))


def _run_chunk(settings, V, seed, theta_index, allocation, trials_total, start, stop):
    t = np.arange(start, stop, dtype=np.int64)
    d = derive_draws(seed, theta_index, t)
    if allocation is Allocation.EQUAL:
        pair_idx = t // (trials_total // 4)
    else:
        pair_idx = np.minimum((d.pair_u * 4).astype(np.int64), 3)
    x_idx, y_idx = pair_idx // 2, pair_idx % 2
    alpha = np.asarray(settings.alphas)[x_idx]
    beta = np.asarray(settings.betas)[y_idx]
    a, b = _wing_codes(alpha, beta, float(V), d)
    detected = int(np.count_nonzero(a != Outcome.U) + np.count_nonzero(b != Outcome.U))
    return CountTable.from_codes(x_idx, y_idx, a, b), detected


def run_point(
    settings: SettingAngles,
    V,
    trials_total: int,
    seed: int,
    theta_index: int = 0,
    allocation: Allocation = Allocation.EQUAL,
    *,
    theta: float | None = None,
    workers: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> SweepResult:
    """Simulate ``trials_total`` trials at one setting configuration.

    With equal allocation, trial indices are split into four consecutive
    blocks for pairs (1,1), (1,2), (2,1), (2,2). With random allocation each
    trial's pair comes from a sixth uniform of its own stream.
    """
    allocation = Allocation(allocation)
    validate_point(V, trials_total, allocation)
    rng.check_seed(seed)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    bounds = [(s, min(s + chunk_size, trials_total)) for s in range(0, trials_total, chunk_size)]
    job = lambda se: _run_chunk(settings, V, seed, theta_index, allocation, trials_total, *se)
    if workers == 1:
        parts = [job(se) for se in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, bounds))
    table = CountTable()
    detected = 0
    for part, det in parts:
        table = table + part
        detected += det
    assert table.is_conserved()
    return SweepResult(
        theta=float("nan") if theta is None else float(theta),
        theta_index=theta_index,
        count_table=table,
        j_full=eberhard_j(table),
        j_deleted=deleted_singles_j(table),
        detected=detected,
        empirical_efficiency=detected / (2 * trials_total),
    )


@dataclass(frozen=True)
class RunConfig:
    theta_list: tuple[float, ...]
    V: Threshold
    trials_total: int
    seed: int
    allocation: Allocation = Allocation.EQUAL
    theta_indices: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "theta_list", tuple(float(t) for t in self.theta_list))
        if not self.theta_list:
            raise ValueError("theta_list must not be empty")
        if not isinstance(self.V, Threshold):
            object.__setattr__(self, "V", Threshold(self.V))
        object.__setattr__(self, "allocation", Allocation(self.allocation))
        validate_point(self.V, self.trials_total, self.allocation)
        rng.check_seed(self.seed)
        if self.theta_indices is not None:
            idx = tuple(int(i) for i in self.theta_indices)
            if len(idx) != len(self.theta_list) or min(idx) < 0:
                raise ValueError("theta_indices must be non-negative, one per theta")
            object.__setattr__(self, "theta_indices", idx)

    def indices(self) -> Sequence[int]:
        return self.theta_indices if self.theta_indices is not None else range(len(self.theta_list))


def sweep(config: RunConfig, *, workers: int = 1) -> list[SweepResult]:
    results = []
    for theta, index in zip(config.theta_list, config.indices()):
        try:
            results.append(
                run_point(
                    settings_from_theta(theta),
                    config.V,
                    config.trials_total,
                    config.seed,
                    index,
                    config.allocation,
                    theta=theta,
                    workers=workers,
                )
            )
        except Exception as exc:
            raise SimulationError(f"theta={math.degrees(theta):g} deg (index {index}): {exc}") from exc
    return results
