"""Prediction-error sweeps over workload traces.

A sweep samples one instance from a trace, then for every error level ``d``
on an evenly spaced grid builds a perturbed prediction and runs the selected
algorithms on it. Each row draws from its own substream derived from
``(seed, d)``, and rows are sorted afterwards, so the output does not depend
on how rows are spread over worker processes.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algorithms import MixtureOutcome, check_alpha, crs_expected, run_greedy, run_trust, run_trustgreedy
from .errors import classify
from .intervals import opt_eft
from .rng import Xoshiro256, derive_seed
from .workloads import VARIANTS, ExperimentInstance, perturb, read_swf, sample_instance

__all__ = [
    "ALGORITHM_COLUMNS",
    "SweepConfig",
    "SweepRow",
    "d_grid",
    "run_sweep",
    "sweep_instance",
    "csv_header",
    "emit_csv",
    "emit_jsonl",
    "recheck_rows",
]

ALGORITHM_COLUMNS = ("opt", "greedy", "trust", "trustgreedy", "crs_expected")
DEFAULT_ALGORITHMS = ("opt", "greedy", "trust", "trustgreedy")


@dataclass(frozen=True)
class SweepConfig:
    trace_path: Optional[str] = None
    variant: str = "balanced"
    steps: int = 1000
    seed: int = 0
    algorithms: tuple = DEFAULT_ALGORITHMS
    alpha: Optional[Fraction] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        unknown = set(self.algorithms) - set(ALGORITHM_COLUMNS)
        if unknown or not self.algorithms:
            raise ValueError(f"algorithms must be a non-empty subset of {ALGORITHM_COLUMNS}")
        object.__setattr__(self, "algorithms", tuple(a for a in ALGORITHM_COLUMNS if a in self.algorithms))
        if self.alpha is not None:
            object.__setattr__(self, "alpha", check_alpha(self.alpha))


@dataclass(frozen=True)
class SweepRow:
    d: int
    eta: int
    opt_profit: int
    gamma: Optional[Fraction]
    profits: dict = field(default_factory=dict)

    @property
    def gamma_undefined(self) -> bool:
        return self.gamma is None

    @property
    def gamma_float(self) -> Optional[float]:
        return None if self.gamma is None else float(self.gamma)


def d_grid(n: int, steps: int) -> list:
    """``steps`` evenly spaced error levels over ``[0, n]``, rounded and deduplicated."""
    if steps == 1:
        return [0]
    # Exact rational rounding, halves up, so the grid never depends on float error.
    raw = (Fraction(k * n, steps - 1) for k in range(steps))
    return sorted({int(x + Fraction(1, 2)) for x in raw})


class _RowRunner:
    """Per-process state: the instance plus Î-independent results."""

    def __init__(self, instance: ExperimentInstance, config: SweepConfig):
        self.instance = instance
        self.config = config
        sequence = instance.input_order
        self.opt = opt_eft(sequence).profit
        self.greedy = run_greedy(sequence).profit if "greedy" in config.algorithms else None
        wants_crs = "crs_expected" in config.algorithms or config.alpha is not None
        self.crs = crs_expected(sequence) if wants_crs else None

    def row(self, d: int) -> SweepRow:
        cfg = self.config
        sequence = self.instance.input_order
        prediction = perturb(self.instance, d, derive_seed(cfg.seed, d), cfg.variant)
        err = classify(sequence, prediction)
        profits = {}
        if "opt" in cfg.algorithms:
            profits["opt"] = self.opt
        if self.greedy is not None:
            profits["greedy"] = self.greedy
        if "trust" in cfg.algorithms:
            profits["trust"] = run_trust(prediction, sequence).profit
        if "trustgreedy" in cfg.algorithms or cfg.alpha is not None:
            trustgreedy = run_trustgreedy(prediction, sequence).profit
            if "trustgreedy" in cfg.algorithms:
                profits["trustgreedy"] = trustgreedy
        if "crs_expected" in cfg.algorithms:
            profits["crs_expected"] = self.crs
        if cfg.alpha is not None:
            # the CRS branch ignores the prediction, so its expectation is shared by all rows
            profits["robusttrust"] = MixtureOutcome(cfg.alpha, trustgreedy, self.crs).expected_profit
        return SweepRow(d=d, eta=err.eta, opt_profit=err.opt_input, gamma=err.gamma, profits=profits)


_WORKER: Optional[_RowRunner] = None


def _init_worker(instance, config):
    global _WORKER
    _WORKER = _RowRunner(instance, config)


def _work(chunk):
    return [_WORKER.row(d) for d in chunk]


def sweep_instance(instance: ExperimentInstance, config: SweepConfig, workers: int = 1) -> list:
    # The hold-out pool has N - floor(N/2) >= n members, so every variant covers [0, n].
    grid = d_grid(instance.n, config.steps)
    if workers <= 1 or len(grid) < 2:
        runner = _RowRunner(instance, config)
        rows = [runner.row(d) for d in grid]
    else:
        chunks = [grid[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(instance, config)) as pool:
            rows = [row for part in pool.map(_work, chunks) for row in part]
    return sorted(rows, key=lambda row: row.d)


def run_sweep(config: SweepConfig, workers: int = 1, trace=None) -> list:
    """Run a full sweep; ``trace`` overrides reading ``config.trace_path``."""
    if trace is None:
        if config.trace_path is None:
            raise ValueError("sweep needs a trace path or a parsed trace")
        trace = read_swf(config.trace_path)
    jobs = getattr(trace, "jobs", trace)
    instance = sample_instance(jobs, config.seed)
    return sweep_instance(instance, config, workers=workers)


def csv_header(config: SweepConfig) -> list:
    header = ["d", "eta", "gamma_num", "gamma_den", "gamma_float"]
    header.extend(config.algorithms)
    if config.alpha is not None:
        header.append("robusttrust")
    return header


def _cell(value):
    if isinstance(value, Fraction):
        return str(value)
    return value


def _row_cells(row: SweepRow, config: SweepConfig) -> list:
    if row.gamma is None:
        gamma = ["", "", ""]
    else:
        gamma = [row.gamma.numerator, row.gamma.denominator, repr(float(row.gamma))]
    cells = [row.d, row.eta, *gamma]
    cells.extend(_cell(row.profits[name]) for name in config.algorithms)
    if config.alpha is not None:
        cells.append(_cell(row.profits["robusttrust"]))
    return cells


def emit_csv(rows: Sequence[SweepRow], sink, config: Optional[SweepConfig] = None) -> None:
    """Write rows as CSV with ``\\n`` line endings; output is a pure function of its input."""
    config = config or SweepConfig()
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(csv_header(config))
    for row in rows:
        writer.writerow(_row_cells(row, config))


def emit_jsonl(rows: Sequence[SweepRow], sink, config: Optional[SweepConfig] = None) -> None:
    config = config or SweepConfig()
    header = csv_header(config)
    for row in rows:
        record = dict(zip(header, _row_cells(row, config)))
        record["gamma_undefined"] = row.gamma_undefined
        sink.write(json.dumps(record, sort_keys=False) + "\n")


def recheck_rows(instance: ExperimentInstance, config: SweepConfig, rows: Sequence[SweepRow], fraction=Fraction(1, 100)) -> list:
    """Recompute a seeded sample of rows from ``(seed, d)``; returns mismatching ``d`` values."""
    if not rows:
        return []
    rng = Xoshiro256(derive_seed(config.seed, 0xC4EC))
    k = max(1, int(len(rows) * Fraction(fraction)))
    picked = rng.sample(list(rows), min(k, len(rows)))
    runner = _RowRunner(instance, config)
    return [row.d for row in picked if runner.row(row.d) != row]


def rows_to_csv_text(rows, config: Optional[SweepConfig] = None) -> str:
    buf = io.StringIO()
    emit_csv(rows, buf, config)
    return buf.getvalue()
