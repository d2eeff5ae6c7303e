"""Standard Workload Format traces as interval scheduling instances.

Each job becomes the interval ``(submit + wait, submit + wait + run)``.
Instances and noisy predictions are drawn with the pinned generator in
:mod:`predsched.rng`, so a seed fully determines them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

from .intervals import Interval
from .rng import Xoshiro256, derive_seed

__all__ = [
    "TraceJob",
    "SwfTrace",
    "SwfFormatError",
    "ExperimentInstance",
    "VARIANTS",
    "parse_swf",
    "read_swf",
    "distinct_intervals",
    "sample_instance",
    "perturb",
    "trace_stats",
]

VARIANTS = ("balanced", "fn_only", "fp_only")


class SwfFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class TraceJob:
    job_id: int
    submit_time: int
    wait_time: int
    run_time: int

    @property
    def interval(self) -> Interval:
        start = self.submit_time + self.wait_time
        return Interval(start, start + self.run_time)


@dataclass
class SwfTrace:
    jobs: list = field(default_factory=list)
    skipped: int = 0
    data_lines: int = 0

    def __iter__(self):
        return iter(self.jobs)

    def __len__(self) -> int:
        return len(self.jobs)


def _integral(token: str, lineno: int, name: str) -> int:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        value = float(token)
    except ValueError:
        raise SwfFormatError(lineno, f"{name} is not a number: {token!r}") from None
    if not math.isfinite(value) or not value.is_integer():
        raise SwfFormatError(lineno, f"{name} is not integral: {token!r}")
    return int(value)


def parse_swf(stream: Iterable[str]) -> SwfTrace:
    """Read job id, submit, wait and run time (fields 1-4) from SWF lines.

    Lines starting with ``;`` are header comments. Jobs with a non-positive
    run time or a negative wait time (the archive's "unknown" marker is -1)
    are dropped and counted in ``skipped``.
    """
    trace = SwfTrace()
    for lineno, line in enumerate(stream, 1):
        text = line.strip()
        if not text or text.startswith(";"):
            continue
        fields = text.split()
        if len(fields) < 4:
            raise SwfFormatError(lineno, f"expected at least 4 fields, got {len(fields)}")
        job_id = _integral(fields[0], lineno, "job id")
        submit = _integral(fields[1], lineno, "submit time")
        wait = _integral(fields[2], lineno, "wait time")
        run = _integral(fields[3], lineno, "run time")
        trace.data_lines += 1
        if run <= 0 or wait < 0 or submit < 0:
            trace.skipped += 1
            continue
        trace.jobs.append(TraceJob(job_id, submit, wait, run))
    return trace


def read_swf(path) -> SwfTrace:
    with open(path, encoding="ascii", errors="replace") as fh:
        return parse_swf(fh)


def distinct_intervals(jobs: Iterable[TraceJob]) -> list:
    """Job intervals with repeats removed, in first-seen order."""
    return list(dict.fromkeys(job.interval for job in jobs))


def trace_stats(trace: SwfTrace) -> dict:
    intervals = [job.interval for job in trace.jobs]
    lengths = [iv.length for iv in intervals]
    return {
        "jobs": len(trace.jobs),
        "data_lines": trace.data_lines,
        "skipped": trace.skipped,
        "distinct_intervals": len(set(intervals)),
        "timesteps": max((iv.end for iv in intervals), default=0)
        - min((iv.start for iv in intervals), default=0),
        "max_length": max(lengths, default=0),
        "avg_length": round(sum(lengths) / len(lengths), 2) if lengths else 0.0,
    }


@dataclass(frozen=True)
class ExperimentInstance:
    input_order: tuple
    holdout_pool: tuple
    seed: int

    @property
    def n(self) -> int:
        return len(self.input_order)

    @property
    def input_set(self) -> frozenset:
        return frozenset(self.input_order)


def sample_instance(jobs, seed: int) -> ExperimentInstance:
    """Pick ``floor(N/2)`` of the ``N`` distinct intervals in random order.

    ``jobs`` may hold :class:`TraceJob` records or intervals. Repeated
    intervals count once, so input and hold-out pool never share a member.
    """
    items = list(jobs)
    if items and isinstance(items[0], TraceJob):
        intervals = distinct_intervals(items)
    else:
        intervals = list(dict.fromkeys(items))
    if len(intervals) < 2:
        raise ValueError(f"need at least 2 distinct intervals, got {len(intervals)}")
    rng = Xoshiro256(derive_seed(seed, 0x5A4D))
    order = intervals[:]
    rng.shuffle(order)
    n = len(order) // 2
    return ExperimentInstance(tuple(order[:n]), tuple(order[n:]), seed)


def perturb(instance: ExperimentInstance, d: int, seed: int, variant: str = "balanced") -> frozenset:
    """Prediction with ``d`` injected errors.

    ``balanced`` drops ``d`` input intervals and adds ``d`` pool intervals,
    ``fn_only`` only drops and ``fp_only`` only adds.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    d = int(d)
    drops = variant in ("balanced", "fn_only")
    adds = variant in ("balanced", "fp_only")
    if d < 0 or (drops and d > instance.n) or (adds and d > len(instance.holdout_pool)):
        raise ValueError(
            f"d={d} out of range for n={instance.n}, pool={len(instance.holdout_pool)}"
        )
    rng = Xoshiro256(derive_seed(seed, 0x7E7B, d))
    members = sorted(instance.input_order)
    removed = set(rng.sample(members, d)) if drops else set()
    added = set(rng.sample(sorted(instance.holdout_pool), d)) if adds else set()
    return frozenset(x for x in members if x not in removed) | added
