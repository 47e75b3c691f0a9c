"""Monte Carlo and quadrature tools for the threshold hidden-variable Bell model."""

__version__ = "0.1.0"

from .counts import CountTable, JMode, deleted_singles_j, eberhard_j, normalized_j
from .model import (
    Outcome,
    SettingAngles,
    Threshold,
    average_efficiency,
    detect,
    detection_probability_alice,
    detection_probability_bob,
    outcome_alice,
    outcome_bob,
    settings_from_theta,
    voltage_alice,
    voltage_bob,
)
from .oracle import expected_j, j_sigma, joint_prob, joint_table
from .simulate import Allocation, RunConfig, SweepResult, derive_draw, run_point, run_trial, sweep

__all__ = [
    "Allocation",
    "CountTable",
    "JMode",
    "Outcome",
    "RunConfig",
    "SettingAngles",
    "SweepResult",
    "Threshold",
    "average_efficiency",
    "deleted_singles_j",
    "derive_draw",
    "detect",
    "detection_probability_alice",
    "detection_probability_bob",
    "eberhard_j",
    "expected_j",
    "j_sigma",
    "joint_prob",
    "joint_table",
    "normalized_j",
    "outcome_alice",
    "outcome_bob",
    "run_point",
    "run_trial",
    "settings_from_theta",
    "sweep",
    "voltage_alice",
    "voltage_bob",
]
