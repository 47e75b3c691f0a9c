"""Outcome count tables and the Eberhard functional.

A :class:`CountTable` holds ``n_ab(alpha_x, beta_y)`` for all four setting
pairs and all nine outcome pairs. Setting indices are 1-based, matching the
usual ``alpha_1, alpha_2, beta_1, beta_2`` naming; storage is 0-based.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .model import Outcome

O, E, U = Outcome.O, Outcome.E, Outcome.U

PAIRS: tuple[tuple[int, int], ...] = ((1, 1), (1, 2), (2, 1), (2, 2))

# (sign, (x, y), a, b) terms of J.
SINGLES_TERMS = (
    (+1, (1, 2), O, U),
    (+1, (2, 1), U, O),
)
DELETED_SINGLES_TERMS = (
    (+1, (1, 2), O, E),
    (+1, (2, 1), E, O),
    (+1, (2, 2), O, O),
    (-1, (1, 1), O, O),
)
EBERHARD_TERMS = DELETED_SINGLES_TERMS[:2] + SINGLES_TERMS + DELETED_SINGLES_TERMS[2:]

_INT_MAX = np.iinfo(np.int64).max


class JMode(enum.Enum):
    FULL = "full"
    DELETED_SINGLES = "deleted-singles"

    @property
    def terms(self):
        return EBERHARD_TERMS if self is JMode.FULL else DELETED_SINGLES_TERMS


def check_pair(pair) -> tuple[int, int]:
    x, y = pair
    if x not in (1, 2) or y not in (1, 2):
        raise ValueError(f"setting pair indices must be 1 or 2, got {pair!r}")
    return int(x), int(y)


@dataclass
class CountTable:
    """Integer counts indexed ``[x-1, y-1, a, b]``.

    ``trials_per_pair`` is tracked separately from the cells so that the
    conservation law (each pair's nine cells sum to its trial count) can be
    checked rather than assumed.
    """

    counts: np.ndarray = field(default_factory=lambda: np.zeros((2, 2, 3, 3), dtype=np.int64))
    trials_per_pair: np.ndarray = field(default_factory=lambda: np.zeros((2, 2), dtype=np.int64))

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64).reshape(2, 2, 3, 3)
        self.trials_per_pair = np.asarray(self.trials_per_pair, dtype=np.int64).reshape(2, 2)
        if (self.counts < 0).any() or (self.trials_per_pair < 0).any():
            raise ValueError("counts must be non-negative")

    def __getitem__(self, key) -> int:
        pair, a, b = key
        x, y = check_pair(pair)
        return int(self.counts[x - 1, y - 1, Outcome(a), Outcome(b)])

    def trials(self, pair) -> int:
        x, y = check_pair(pair)
        return int(self.trials_per_pair[x - 1, y - 1])

    def record(self, pair, a: Outcome, b: Outcome) -> "CountTable":
        """Add one trial in place and return the table."""
        x, y = check_pair(pair)
        idx = (x - 1, y - 1, Outcome(a), Outcome(b))
        if self.counts[idx] == _INT_MAX or self.trials_per_pair[x - 1, y - 1] == _INT_MAX:
            raise OverflowError(f"count overflow in cell {pair}, {a!r}, {b!r}")
        self.counts[idx] += 1
        self.trials_per_pair[x - 1, y - 1] += 1
        return self

    @classmethod
    def from_codes(cls, x_idx, y_idx, a_codes, b_codes) -> "CountTable":
        """Tally arrays of 0-based pair indices and outcome codes."""
        flat = ((np.asarray(x_idx) * 2 + y_idx) * 3 + a_codes) * 3 + b_codes
        counts = np.bincount(flat.astype(np.intp).ravel(), minlength=36)
        return cls(counts.reshape(2, 2, 3, 3), counts.reshape(4, 9).sum(axis=1))

    def __add__(self, other: "CountTable") -> "CountTable":
        if not isinstance(other, CountTable):
            return NotImplemented
        return CountTable(self.counts + other.counts, self.trials_per_pair + other.trials_per_pair)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CountTable):
            return NotImplemented
        return np.array_equal(self.counts, other.counts) and np.array_equal(
            self.trials_per_pair, other.trials_per_pair
        )

    def is_conserved(self) -> bool:
        return np.array_equal(self.counts.sum(axis=(2, 3)), self.trials_per_pair)

    def cells(self) -> Iterator[tuple[tuple[int, int], Outcome, Outcome, int]]:
        for x, y in PAIRS:
            for a in Outcome:
                for b in Outcome:
                    yield (x, y), a, b, int(self.counts[x - 1, y - 1, a, b])

    def to_dict(self) -> dict:
        labels = [o.label for o in Outcome]
        return {
            f"{x}{y}": {
                "trials": self.trials((x, y)),
                "counts": {
                    a + b: int(self.counts[x - 1, y - 1, i, j])
                    for i, a in enumerate(labels)
                    for j, b in enumerate(labels)
                },
            }
            for x, y in PAIRS
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CountTable":
        table = cls()
        for x, y in PAIRS:
            entry = data[f"{x}{y}"]
            table.trials_per_pair[x - 1, y - 1] = int(entry["trials"])
            for a in Outcome:
                for b in Outcome:
                    table.counts[x - 1, y - 1, a, b] = int(entry["counts"][a.label + b.label])
        return table


def evaluate_terms(table: CountTable, terms) -> int:
    return sum(sign * table[pair, a, b] for sign, pair, a, b in terms)


def eberhard_j(table: CountTable) -> int:
    """J = n_oe(12) + n_ou(12) + n_eo(21) + n_uo(21) + n_oo(22) - n_oo(11), raw counts."""
    return evaluate_terms(table, EBERHARD_TERMS)


def deleted_singles_j(table: CountTable) -> int:
    """J with the n_ou(12) and n_uo(21) singles terms dropped."""
    return evaluate_terms(table, DELETED_SINGLES_TERMS)


def normalized_j(table: CountTable, mode: JMode = JMode.FULL) -> float:
    """J with each term divided by its own pair's trial count.

    For unequal allocations (random pair choice) this is the comparable
    quantity; with equal allocation it is ``J / trials_per_pair``.
    """
    total = 0.0
    for sign, pair, a, b in mode.terms:
        n = table.trials(pair)
        if n == 0:
            raise ValueError(f"no trials recorded for pair {pair}")
        total += sign * table[pair, a, b] / n
    return total
