"""Command-line driver: theta sweeps written as plot-ready data files.

Curve files hold one ``theta_degrees J`` record per line (no header). A
``summary.json`` next to them stores the configuration and, for every theta,
the full 36-cell count table so other functionals can be evaluated later.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .counts import CountTable, JMode, deleted_singles_j, eberhard_j
from .model import Threshold
from .oracle import expected_j
from .simulate import Allocation, RunConfig, SimulationError, SweepResult, sweep

SUMMARY_NAME = "summary.json"
EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class CliConfig:
    theta_start_deg: float = 0.0
    theta_end_deg: float = 180.0
    theta_step_deg: float = 10.0
    threshold: float = 0.0
    trials: int = 400_000
    seed: int = 1
    mode: str = "full"
    allocation: str = "equal"
    output_dir: str = "."
    emit_oracle: bool = False
    allow_out_of_range: bool = False

    def __post_init__(self):
        for name in ("theta_start_deg", "theta_end_deg", "theta_step_deg", "threshold"):
            if not math.isfinite(getattr(self, name)):
                raise UsageError(f"{name} must be finite")
        if self.theta_step_deg <= 0:
            raise UsageError("--theta-step must be > 0")
        if self.theta_start_deg > self.theta_end_deg:
            raise UsageError("--theta-start must not exceed --theta-end")
        if self.trials <= 0:
            raise UsageError("--trials must be > 0")
        if self.allocation == "equal" and self.trials % 4:
            raise UsageError("--trials must be divisible by 4 with --allocation equal")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")

    @property
    def precision(self) -> int:
        """Decimal places needed to print every grid point as configured."""
        exps = [Decimal(repr(v)).normalize().as_tuple().exponent for v in (self.theta_start_deg, self.theta_step_deg)]
        return max(0, *(-e for e in exps if isinstance(e, int)))

    def theta_grid_deg(self) -> list[float]:
        n = int(math.floor((self.theta_end_deg - self.theta_start_deg) / self.theta_step_deg + 1e-9)) + 1
        return [round(self.theta_start_deg + i * self.theta_step_deg, self.precision) for i in range(n)]

    def modes(self) -> list[JMode]:
        return {
            "full": [JMode.FULL],
            "deleted-singles": [JMode.DELETED_SINGLES],
            "both": [JMode.FULL, JMode.DELETED_SINGLES],
        }[self.mode]


def curve_name(mode: JMode, threshold: float) -> str:
    prefix = "eberhard" if mode is JMode.FULL else "deleted"
    return f"{prefix}_{'without' if threshold == 0 else 'with'}_threshold"


def format_datafile(rows: Iterable[tuple[float, float]], precision: int = 0, j_decimals: int | None = None) -> str:
    lines = []
    for theta, j in rows:
        j_text = str(int(j)) if j_decimals is None else f"{j:.{j_decimals}f}"
        lines.append(f"{theta:.{precision}f} {j_text}\n")
    return "".join(lines)


def parse_datafile(text: str) -> list[tuple[float, int]]:
    rows = []
    for line in text.splitlines():
        theta, j = line.split(" ")
        rows.append((float(theta), int(j)))
    return rows


def emit_datafile(results: Sequence[SweepResult], mode: JMode, path: Path, precision: int = 0) -> None:
    if not results:
        raise ValueError("no results to write")
    attr = "j_full" if mode is JMode.FULL else "j_deleted"
    rows = [(r.theta_degrees, getattr(r, attr)) for r in results]
    Path(path).write_bytes(format_datafile(rows, precision).encode("ascii"))


def summary_dict(config: CliConfig, thetas_deg: Sequence[float], results: Sequence[SweepResult]) -> dict:
    return {
        "version": __version__,
        "config": asdict(config),
        "outcome_order": ["o", "e", "u"],
        "points": [
            {
                "theta_degrees": deg,
                "theta_index": r.theta_index,
                "tables": r.count_table.to_dict(),
                "j_full": r.j_full,
                "j_deleted": r.j_deleted,
                "detected": r.detected,
                "empirical_efficiency": r.empirical_efficiency,
            }
            for deg, r in zip(thetas_deg, results)
        ],
    }


def load_summary(path) -> dict:
    """Read a summary file and check its J values against its own count tables."""
    data = json.loads(Path(path).read_text())
    for point in data["points"]:
        table = CountTable.from_dict(point["tables"])
        if not table.is_conserved():
            raise ValueError(f"count table at theta={point['theta_degrees']} is not conserved")
        if eberhard_j(table) != point["j_full"] or deleted_singles_j(table) != point["j_deleted"]:
            raise ValueError(f"J mismatch at theta={point['theta_degrees']}")
        point["table"] = table
    return data


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="eberhard-sim",
        description="Monte Carlo sweep of the threshold hidden-variable model against the Eberhard inequality.",
    )
    p.add_argument("--theta-start", type=float, default=0.0, help="first theta, degrees (default: 0)")
    p.add_argument("--theta-end", type=float, default=180.0, help="last theta, degrees (default: 180)")
    p.add_argument("--theta-step", type=float, default=10.0, help="theta step, degrees (default: 10)")
    p.add_argument("--threshold", type=float, default=0.0, help="detection threshold V (default: 0)")
    p.add_argument("--trials", type=int, default=400_000, help="trials per theta point (default: 400000)")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--mode", choices=["full", "deleted-singles", "both"], default="full")
    p.add_argument("--allocation", choices=["equal", "random"], default="equal")
    p.add_argument("--output-dir", default=".")
    p.add_argument("--emit-oracle", action="store_true", help="also write expected-J curves from quadrature")
    p.add_argument("--workers", type=int, default=1, help="threads per theta point; output does not depend on it")
    p.add_argument("--allow-out-of-range-threshold", action="store_true", help="accept V outside [-1, 0]")
    return p


def parse_config(argv: Sequence[str] | None) -> tuple[CliConfig, int]:
    """Parse flags into a config plus the worker count (which never affects output)."""
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    cfg = CliConfig(
        theta_start_deg=args.theta_start,
        theta_end_deg=args.theta_end,
        theta_step_deg=args.theta_step,
        threshold=args.threshold,
        trials=args.trials,
        seed=args.seed,
        mode=args.mode,
        allocation=args.allocation,
        output_dir=args.output_dir,
        emit_oracle=args.emit_oracle,
        allow_out_of_range=args.allow_out_of_range_threshold,
    )
    if not cfg.allow_out_of_range and not -1 <= cfg.threshold <= 0:
        raise UsageError(f"--threshold {cfg.threshold} outside [-1, 0]; add --allow-out-of-range-threshold")
    return cfg, args.workers


def _write(path: Path, text: str, written: list[Path]) -> None:
    written.append(path)
    path.write_bytes(text.encode("ascii"))


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg, workers = parse_config(argv)
    except UsageError as exc:
        build_parser().print_usage(sys.stderr)
        print(f"eberhard-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    thetas_deg = cfg.theta_grid_deg()
    V = Threshold(cfg.threshold, cfg.allow_out_of_range)
    run = RunConfig(
        theta_list=[math.radians(t) for t in thetas_deg],
        V=V,
        trials_total=cfg.trials,
        seed=cfg.seed,
        allocation=Allocation(cfg.allocation),
    )
    try:
        results = sweep(run, workers=workers)
    except SimulationError as exc:
        print(f"eberhard-sim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out = Path(cfg.output_dir)
    written: list[Path] = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for mode in cfg.modes():
            attr = "j_full" if mode is JMode.FULL else "j_deleted"
            rows = [(deg, getattr(r, attr)) for deg, r in zip(thetas_deg, results)]
            _write(out / curve_name(mode, cfg.threshold), format_datafile(rows, cfg.precision), written)
            if cfg.emit_oracle:
                rows = [
                    (deg, expected_j(math.radians(deg), V.value, cfg.trials, mode)) for deg in thetas_deg
                ]
                _write(
                    out / f"oracle_{curve_name(mode, cfg.threshold)}",
                    format_datafile(rows, cfg.precision, j_decimals=3),
                    written,
                )
        summary = json.dumps(summary_dict(cfg, thetas_deg, results), indent=2, sort_keys=True) + "\n"
        _write(out / SUMMARY_NAME, summary, written)
    except OSError as exc:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        print(f"eberhard-sim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
