"""Online schedulers with predictions.

Every scheduler is a scikit-learn style estimator: ``fit`` receives the
predicted request set, ``predict`` replays a request sequence and returns the
accept/reject decision of each request. Decisions are produced by a
*session*, a state machine that sees one request at a time through
:meth:`Session.offer` and never the rest of the sequence, so runs are causal
by construction. Adaptive adversaries drive sessions directly.

Requests are :class:`~predsched.intervals.Interval` objects on a path, or any
hashable, orderable object with an ``overlaps`` method (see
:class:`~predsched.adversaries.StarRequest`). Plan-based schedulers compute
their plan with ``solver``, which defaults to :func:`opt_eft`.
"""

from __future__ import annotations

import secrets
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .intervals import Interval, is_feasible, opt_eft
from .rng import Xoshiro256

__all__ = [
    "OnlineRun",
    "Plan",
    "LevelPartition",
    "MixtureOutcome",
    "check_requests",
    "check_alpha",
    "build_levels",
    "Greedy",
    "Trust",
    "TrustGreedy",
    "CRS",
    "RobustTrust",
    "RejectAll",
    "ALGORITHMS",
    "make_scheduler",
    "run_greedy",
    "run_trust",
    "run_trustgreedy",
    "run_crs",
    "crs_expected",
    "robusttrust_expected",
]


# ---------------------------------------------------------------------------
# input validation

def _as_request(item):
    if hasattr(item, "overlaps"):
        return item
    try:
        start, end = item
    except (TypeError, ValueError):
        raise TypeError(f"cannot interpret {item!r} as an interval") from None
    if isinstance(start, (float, np.floating)) and not float(start).is_integer():
        raise ValueError(f"interval endpoints must be integral, got {item!r}")
    if isinstance(end, (float, np.floating)) and not float(end).is_integer():
        raise ValueError(f"interval endpoints must be integral, got {item!r}")
    return Interval(int(start), int(end))


def check_requests(X) -> list:
    """Coerce a request sequence to a list of request objects.

    Accepts ``None`` (empty), an ``(n, 2)`` integer array, or an iterable of
    intervals, ``(start, end)`` pairs, or custom request objects.
    """
    if X is None:
        return []
    if isinstance(X, np.ndarray):
        if X.size == 0:
            return []
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError(f"expected an array of shape (n, 2), got {X.shape}")
        if not np.issubdtype(X.dtype, np.integer):
            if not np.all(np.mod(X, 1) == 0):
                raise ValueError("interval endpoints must be integral")
        return [Interval(int(a), int(b)) for a, b in X]
    return [_as_request(item) for item in X]


def check_alpha(alpha) -> Fraction:
    """Parse a probability given as a Fraction, int, float or ``"p/q"`` string."""
    if isinstance(alpha, str):
        value = Fraction(alpha.strip())
    else:
        value = Fraction(alpha)
    if not 0 <= value <= 1:
        raise ValueError(f"alpha must lie in [0, 1], got {value}")
    return value


def _rng(random_state) -> Xoshiro256:
    if isinstance(random_state, Xoshiro256):
        return random_state
    if random_state is None:
        return Xoshiro256(secrets.randbits(64))
    return Xoshiro256(int(random_state))


# ---------------------------------------------------------------------------
# occupancy boards

class _PathBoard:
    """Pairwise disjoint intervals kept sorted by start."""

    def __init__(self, items=()):
        self._starts: list[int] = []
        self._items: list[Interval] = []
        for iv in items:
            self.add(iv)

    def add(self, iv: Interval) -> None:
        i = bisect_left(self._starts, iv.start)
        self._starts.insert(i, iv.start)
        self._items.insert(i, iv)

    def remove(self, iv: Interval) -> None:
        i = bisect_left(self._starts, iv.start)
        while self._items[i] != iv:
            i += 1
        del self._starts[i]
        del self._items[i]

    def overlapping(self, r: Interval) -> list:
        i = max(bisect_right(self._starts, r.start) - 1, 0)
        out = []
        items = self._items
        while i < len(items) and items[i].start < r.end:
            if items[i].end > r.start:
                out.append(items[i])
            i += 1
        return out

    def __len__(self) -> int:
        return len(self._items)


class _LinearBoard:
    """Fallback for request types without a linear order on the path."""

    def __init__(self, items=()):
        self._items = list(items)

    def add(self, r) -> None:
        self._items.append(r)

    def remove(self, r) -> None:
        self._items.remove(r)

    def overlapping(self, r) -> list:
        return [s for s in self._items if s.overlaps(r)]

    def __len__(self) -> int:
        return len(self._items)


def _board_for(sample, items=()):
    if sample is None or isinstance(sample, Interval):
        return _PathBoard(items)
    return _LinearBoard(items)


def _may_replace(planned, request) -> bool:
    # Off the path there is no "ends no earlier" order; any single conflict may be replaced.
    if isinstance(planned, Interval) and isinstance(request, Interval):
        return planned.end >= request.end
    return True


# ---------------------------------------------------------------------------
# run records

@dataclass(frozen=True)
class OnlineRun:
    prediction: frozenset
    sequence: tuple
    decisions: tuple

    @property
    def accepted(self) -> frozenset:
        return frozenset(r for r, d in zip(self.sequence, self.decisions) if d)

    @property
    def profit(self) -> int:
        return sum(self.decisions)

    @property
    def decision_string(self) -> str:
        return "".join("A" if d else "R" for d in self.decisions)


@dataclass
class Plan:
    """TrustGreedy's planned solution and its replacement bookkeeping."""

    planned: set
    initial: frozenset
    replaced_flags: dict = field(default_factory=dict)

    def unreplaced_false_positives(self, input_set: Iterable) -> frozenset:
        """Members of the initial plan that never arrived and were never replaced."""
        seen = frozenset(input_set)
        return frozenset(
            s for s in self.initial if s not in seen and not self.replaced_flags.get(s, False)
        )


# ---------------------------------------------------------------------------
# sessions

class Session:
    """Causal decision maker: one request in, one irrevocable decision out."""

    def __init__(self):
        self.accepted: set = set()
        self.decisions: list[bool] = []
        self._board = None

    def offer(self, request) -> bool:
        if self._board is None:
            self._board = self._make_board(request)
        decision = bool(self._decide(request))
        if decision:
            self.accepted.add(request)
        self.decisions.append(decision)
        return decision

    def _make_board(self, request):
        return _board_for(request)

    def _fits(self, request) -> bool:
        return request not in self.accepted and not self._board.overlapping(request)

    def _decide(self, request) -> bool:
        raise NotImplementedError

    @property
    def profit(self) -> int:
        return len(self.accepted)


class _GreedySession(Session):
    def _decide(self, r) -> bool:
        if self._fits(r):
            self._board.add(r)
            return True
        return False


class _RejectAllSession(Session):
    def _decide(self, r) -> bool:
        return False


class _TrustSession(Session):
    def __init__(self, plan: frozenset):
        super().__init__()
        self.plan = plan

    def _decide(self, r) -> bool:
        # I* is feasible, so plan membership alone keeps the schedule feasible.
        return r in self.plan and r not in self.accepted


class _TrustGreedySession(Session):
    def __init__(self, prediction: frozenset, plan: frozenset):
        super().__init__()
        self.prediction = prediction
        self.plan = Plan(planned=set(plan), initial=plan)
        self.plan_sizes: list[int] = []

    def _make_board(self, request):
        return _board_for(request, self.plan.planned)

    def _decide(self, r) -> bool:
        decision = self._step(r)
        self.plan_sizes.append(len(self.plan.planned))
        return decision

    def _step(self, r) -> bool:
        plan = self.plan
        if r in self.accepted:
            return False
        if r in plan.planned:
            return True
        if r in self.prediction:
            return False
        conflicts = self._board.overlapping(r)
        if any(s in self.accepted for s in conflicts):
            return False
        if len(conflicts) > 1:
            return False
        if conflicts:
            (s,) = conflicts
            if not _may_replace(s, r):
                return False
            plan.planned.discard(s)
            self._board.remove(s)
            if s in plan.initial and not plan.replaced_flags.get(s, False):
                plan.replaced_flags[s] = True
        plan.planned.add(r)
        self._board.add(r)
        return True


class _CRSSession(Session):
    def __init__(self, levels: "LevelPartition", level: int):
        super().__init__()
        self.levels = levels
        self.level = level

    def _decide(self, r) -> bool:
        if self.levels.level_of(r) != self.level:
            return False
        if self._fits(r):
            self._board.add(r)
            return True
        return False


# ---------------------------------------------------------------------------
# CRS level structure

@dataclass(frozen=True)
class LevelPartition:
    """Middle-edge levels over a line of ``m_prime`` vertices (a power of two).

    Edge sets are only materialized when asked for; ``level_of`` is pure
    arithmetic, so long trace paths cost nothing up front.
    """

    m_prime: int

    @property
    def level_count(self) -> int:
        return self.m_prime.bit_length() - 1

    @cached_property
    def levels(self) -> tuple:
        """``E_1..E_L``: level ``i`` holds the middle edges of the ``2**(i-1)`` segments."""
        out = []
        segments = [(0, self.m_prime - 1)]
        while segments[0][1] > segments[0][0]:
            edges = []
            halves = []
            for lo, hi in segments:
                mid = lo + (hi - lo + 1) // 2
                edges.append(Interval(mid - 1, mid))
                halves.append((lo, mid - 1))
                halves.append((mid, hi))
            out.append(frozenset(edges))
            segments = halves
        return tuple(out)

    def level_of(self, interval: Interval) -> int:
        """Smallest level whose edge set meets the interval."""
        if interval.end > self.m_prime - 1:
            raise ValueError(
                f"interval {interval} exceeds the extended line 0..{self.m_prime - 1}"
            )
        # Edge (e, e+1) lies in level L - v2(e+1); the interval holds e+1 in
        # (start, end], whose largest power-of-two divisor is the top bit of start ^ end.
        return self.level_count - ((interval.start ^ interval.end).bit_length() - 1)

    def edges(self, level: int) -> frozenset:
        return self.levels[level - 1]


@lru_cache(maxsize=64)
def build_levels(m: int) -> LevelPartition:
    """Level partition for a path with ``m`` edges.

    The path is extended to the smallest power-of-two vertex count that covers
    its ``m + 1`` vertices, which gives an odd edge count and a well-defined
    middle edge at every stage of the halving.
    """
    if m < 1:
        raise ValueError(f"path must have at least one edge, got m={m}")
    m_prime = 1
    while m_prime < m + 1:
        m_prime *= 2
    return LevelPartition(m_prime=m_prime)


def _path_length(requests) -> int:
    return max((r.end for r in requests), default=0)


# ---------------------------------------------------------------------------
# estimators

class OnlineScheduler(BaseEstimator):
    """Shared estimator surface. Subclasses implement ``_new_session``."""

    def fit(self, X=None, y=None):
        """Store the prediction ``X`` (requests expected to arrive)."""
        self.prediction_ = frozenset(check_requests(X))
        self._prepare()
        return self

    def _prepare(self) -> None:
        pass

    def session(self, sequence_hint=None) -> Session:
        """Open a fresh causal session."""
        check_is_fitted(self, "prediction_")
        return self._new_session(sequence_hint)

    def _new_session(self, sequence_hint) -> Session:
        raise NotImplementedError

    def run(self, X) -> OnlineRun:
        sequence = tuple(check_requests(X))
        session = self.session(sequence)
        for r in sequence:
            session.offer(r)
        return OnlineRun(self.prediction_, sequence, tuple(session.decisions))

    def predict(self, X) -> np.ndarray:
        """Accept (True) / reject (False) decision for each request of ``X``."""
        return np.asarray(self.run(X).decisions, dtype=bool)

    def score(self, X, y=None) -> float:
        """Profit relative to the offline optimum of ``X`` (1.0 when both are zero)."""
        run = self.run(X)
        best = opt_eft(run.sequence).profit
        return 1.0 if best == 0 else run.profit / best


class Greedy(OnlineScheduler):
    """Accept every request that overlaps nothing accepted so far."""

    def _new_session(self, sequence_hint):
        return _GreedySession()


class RejectAll(OnlineScheduler):
    """Strawman that rejects everything."""

    def _new_session(self, sequence_hint):
        return _RejectAllSession()


class Trust(OnlineScheduler):
    """Accept exactly the arriving members of an optimal solution of the prediction."""

    def __init__(self, solver=None):
        self.solver = solver

    def _prepare(self):
        solver = self.solver or opt_eft
        self.plan_ = frozenset(solver(self.prediction_).chosen)

    def _new_session(self, sequence_hint):
        return _TrustSession(self.plan_)


class TrustGreedy(OnlineScheduler):
    """Follow an optimal plan for the prediction, letting unpredicted requests
    join the plan when they displace at most one not-yet-accepted planned
    interval that ends no earlier than they do."""

    def __init__(self, solver=None):
        self.solver = solver

    def _prepare(self):
        solver = self.solver or opt_eft
        self.plan_ = frozenset(solver(self.prediction_).chosen)

    def _new_session(self, sequence_hint):
        return _TrustGreedySession(self.prediction_, self.plan_)


class CRS(OnlineScheduler):
    """Classify-and-randomly-select: serve one middle-edge level greedily.

    ``level`` fixes the level (1-based); otherwise each session draws one
    uniformly. ``m`` is the path length in edges; when omitted, :meth:`run`
    uses the largest endpoint of the sequence.
    """

    def __init__(self, level=None, m=None, random_state=None):
        self.level = level
        self.m = m
        self.random_state = random_state

    def _prepare(self):
        self._rng = _rng(self.random_state)

    def _levels(self, sequence_hint) -> LevelPartition:
        m = self.m if self.m is not None else _path_length(sequence_hint or ())
        if not m:
            raise ValueError("CRS needs the path length: set m or pass a non-empty sequence")
        return build_levels(m)

    def _new_session(self, sequence_hint):
        levels = self._levels(sequence_hint)
        if self.level is None:
            level = 1 + self._rng.randbelow(levels.level_count)
        else:
            level = int(self.level)
            if not 1 <= level <= levels.level_count:
                raise ValueError(f"level must lie in [1, {levels.level_count}], got {level}")
        return _CRSSession(levels, level)

    def expected_profit(self, X) -> Fraction:
        return crs_expected(check_requests(X), m=self.m)


class RobustTrust(OnlineScheduler):
    """With probability ``alpha`` run TrustGreedy, otherwise CRS (predictions ignored)."""

    def __init__(self, alpha=Fraction(1, 2), m=None, random_state=None, solver=None):
        self.alpha = alpha
        self.m = m
        self.random_state = random_state
        self.solver = solver

    def _prepare(self):
        self.alpha_ = check_alpha(self.alpha)
        self._rng = _rng(self.random_state)
        self._trusting = TrustGreedy(solver=self.solver).fit(self.prediction_)

    def _new_session(self, sequence_hint):
        a = self.alpha_
        if self._rng.randbelow(a.denominator) < a.numerator:
            return self._trusting.session(sequence_hint)
        crs = CRS(m=self.m, random_state=self._rng).fit(None)
        return crs.session(sequence_hint)

    def expected_profit(self, X) -> Fraction:
        return robusttrust_expected(self.prediction_, check_requests(X), self.alpha_, m=self.m).expected_profit


ALGORITHMS = {
    "greedy": Greedy,
    "trust": Trust,
    "trustgreedy": TrustGreedy,
    "crs": CRS,
    "robusttrust": RobustTrust,
    "reject": RejectAll,
}


def make_scheduler(name: str, **params) -> OnlineScheduler:
    try:
        cls = ALGORITHMS[name]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(ALGORITHMS)}") from None
    return cls(**params)


# ---------------------------------------------------------------------------
# functional API

def run_greedy(sequence) -> OnlineRun:
    return Greedy().fit(None).run(sequence)


def run_trust(prediction, sequence) -> OnlineRun:
    return Trust().fit(prediction).run(sequence)


def run_trustgreedy(prediction, sequence) -> OnlineRun:
    return TrustGreedy().fit(prediction).run(sequence)


def run_crs(sequence, chosen_level: int, m: Optional[int] = None) -> OnlineRun:
    return CRS(level=chosen_level, m=m).fit(None).run(sequence)


def crs_expected(sequence, m: Optional[int] = None) -> Fraction:
    """Exact expected CRS profit: the mean over all equally likely levels."""
    sequence = check_requests(sequence)
    if m is None:
        m = _path_length(sequence)
    if not sequence:
        return Fraction(0)
    levels = build_levels(m)
    total = sum(run_crs(sequence, i, m=m).profit for i in range(1, levels.level_count + 1))
    return Fraction(total, levels.level_count)


@dataclass(frozen=True)
class MixtureOutcome:
    alpha: Fraction
    trust_branch_profit: int
    crs_branch_expected: Fraction

    @property
    def expected_profit(self) -> Fraction:
        return self.alpha * self.trust_branch_profit + (1 - self.alpha) * self.crs_branch_expected


def robusttrust_expected(prediction, sequence, alpha, m: Optional[int] = None) -> MixtureOutcome:
    alpha = check_alpha(alpha)
    sequence = check_requests(sequence)
    return MixtureOutcome(
        alpha=alpha,
        trust_branch_profit=run_trustgreedy(prediction, sequence).profit,
        crs_branch_expected=crs_expected(sequence, m=m),
    )


def assert_feasible(run: OnlineRun) -> None:
    if not is_feasible(run.accepted):
        raise AssertionError(f"infeasible schedule: {sorted(run.accepted)}")

