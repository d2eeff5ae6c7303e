"""Adaptive adversaries behind the lower-bound constructions.

Each ``duel_*`` function fits a copy of the given scheduler with the
construction's prediction, then feeds it requests one at a time through a
causal session. The adversary reacts only to the emitted accept/reject
decisions. The returned :class:`DuelTranscript` carries the served sequence,
profits, the exact error and whether the construction's bound held.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import NamedTuple, Optional

from sklearn.base import clone

from .algorithms import CRS, OnlineScheduler, RobustTrust, Trust, build_levels, crs_expected
from .errors import classify
from .intervals import Interval, Solution, opt_eft

__all__ = [
    "StarRequest",
    "star_opt",
    "DuelTranscript",
    "STAR_PREDICTION",
    "duel_theorem4",
    "duel_theorem5",
    "duel_star",
    "duel_prop6",
    "duel_sigma",
    "sigma_family",
]

STAR_LEAVES = 8
STAR_CAP = 20


class _StarPair(NamedTuple):
    star_index: int
    leaf_a: int
    leaf_b: int


class StarRequest(_StarPair):
    """A path between two leaves of the star ``S_8`` number ``star_index``.

    Two paths through the centre share an edge iff they share a leaf, so
    conflicts are exactly those of a matching problem on the leaves.
    """

    __slots__ = ()

    def __new__(cls, star_index: int, leaf_a: int, leaf_b: int) -> "StarRequest":
        if leaf_a == leaf_b:
            raise ValueError("a star request needs two distinct leaves")
        for leaf in (leaf_a, leaf_b):
            if not 1 <= leaf <= STAR_LEAVES:
                raise ValueError(f"leaves are numbered 1..{STAR_LEAVES}, got {leaf}")
        if star_index < 0:
            raise ValueError("star index must be non-negative")
        a, b = sorted((int(leaf_a), int(leaf_b)))
        return super().__new__(cls, int(star_index), a, b)

    def overlaps(self, other: "StarRequest") -> bool:
        return self.star_index == other.star_index and not {
            self.leaf_a, self.leaf_b
        }.isdisjoint((other.leaf_a, other.leaf_b))

    def __repr__(self) -> str:
        return f"S{self.star_index}({self.leaf_a},{self.leaf_b})"


@lru_cache(maxsize=4096)
def _best_pattern(pairs: tuple) -> tuple:
    """Indices of the first maximum set of leaf pairs with no shared leaf."""
    masks = [(1 << a) | (1 << b) for a, b in pairs]
    best: tuple = ()
    for mask in range(1 << len(pairs)):
        picked = tuple(i for i in range(len(pairs)) if mask >> i & 1)
        if len(picked) <= len(best):
            continue
        used = 0
        for i in picked:
            if used & masks[i]:
                break
            used |= masks[i]
        else:
            best = picked
    return best


def _best_subset(items: list) -> list:
    # every request of one star is a leaf pair, so only the pattern matters
    if len(items) > STAR_CAP:
        raise ValueError(f"star component too large for exhaustive search: {len(items)}")
    picked = _best_pattern(tuple((r.leaf_a, r.leaf_b) for r in items))
    return [items[i] for i in picked]


def star_opt(requests) -> Solution:
    """Exhaustive optimum over star requests, one star at a time.

    Stars share no edges, so the optimum decomposes. Ties resolve to the
    first maximum subset in sorted order, which keeps plans deterministic.
    """
    by_star: dict[int, list] = {}
    for r in sorted(set(requests)):
        by_star.setdefault(r.star_index, []).append(r)
    chosen = []
    for star in sorted(by_star):
        chosen.extend(_best_subset(by_star[star]))
    return Solution(tuple(chosen))


STAR_PREDICTION = ((1, 2), (2, 3), (3, 4), (4, 5), (6, 7), (7, 8))


@dataclass
class DuelTranscript:
    bound_kind: str
    algorithm: str
    params: dict
    prediction: list
    served: list
    decisions: list
    algorithm_profit: object
    opt_profit: int
    eta: int
    bound_satisfied: bool
    parts: list = field(default_factory=list)
    deterministic: bool = True

    @property
    def gamma(self) -> Optional[Fraction]:
        return None if self.opt_profit == 0 else Fraction(self.eta, self.opt_profit)

    def records(self) -> list:
        """JSON-ready records: one per served request, then a summary."""
        out = []
        for k, (r, d) in enumerate(zip(self.served, self.decisions)):
            out.append({
                "type": "request",
                "index": k,
                "request": _encode(r),
                "decision": None if d is None else "A" if d else "R",
            })
        g = self.gamma
        out.append({
            "type": "summary",
            "construction": self.bound_kind,
            "algorithm": self.algorithm,
            "params": {k: _plain(v) for k, v in self.params.items()},
            "algorithm_profit": _plain(self.algorithm_profit),
            "opt_profit": self.opt_profit,
            "eta": self.eta,
            "gamma": None if g is None else f"{g.numerator}/{g.denominator}",
            "bound_satisfied": self.bound_satisfied,
            "deterministic": self.deterministic,
            "parts": [{k: _plain(v) for k, v in part.items()} for part in self.parts],
        })
        return out


def _encode(r):
    if isinstance(r, StarRequest):
        return {"star": r.star_index, "leaves": [r.leaf_a, r.leaf_b]}
    return [r.start, r.end]


def _plain(v):
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    return v


def _name(algorithm) -> str:
    return type(algorithm).__name__


def _deterministic(algorithm) -> bool:
    if isinstance(algorithm, CRS):
        return algorithm.level is not None
    return not isinstance(algorithm, RobustTrust)


class _Duel:
    """Feeds requests to a fitted scheduler session and records the exchange."""

    def __init__(self, algorithm: OnlineScheduler, prediction, hint=None, **overrides):
        est = clone(algorithm)
        params = est.get_params()
        settable = {k: v for k, v in overrides.items() if k in params and params[k] is None}
        if settable:
            est.set_params(**settable)
        self.estimator = est.fit(prediction)
        self.session = self.estimator.session(hint)
        self.served: list = []

    def serve(self, request) -> bool:
        self.served.append(request)
        return self.session.offer(request)

    @property
    def decisions(self) -> list:
        return list(self.session.decisions)

    @property
    def profit(self) -> int:
        return self.session.profit


def _check_epsilon(epsilon, upper_inclusive: bool) -> Fraction:
    eps = Fraction(epsilon) if not isinstance(epsilon, str) else Fraction(epsilon.strip())
    upper_ok = eps <= 1 if upper_inclusive else eps < 1
    if not (eps > 0 and upper_ok):
        bound = "(0, 1]" if upper_inclusive else "(0, 1)"
        raise ValueError(f"epsilon must lie in {bound}, got {eps}")
    return eps


def _check_ell(ell: int, p: int) -> int:
    ell = int(ell)
    if not 0 <= ell <= p:
        raise ValueError(f"ell must lie in [0, {p}], got {ell}")
    return ell


def _within(requests, lo: int, hi: int) -> set:
    return {r for r in requests if lo <= r.start and r.end <= hi}


def duel_theorem4(algorithm: OnlineScheduler, epsilon, ell: int) -> DuelTranscript:
    """General deterministic bound: ALG <= (1 - gamma) OPT.

    Phase ``i`` lives on ``[c*i, c*(i+1)]``. For the first ``ell`` phases the
    long predicted interval arrives first; if it is accepted, the ``c`` unit
    intervals under it follow, otherwise the phase ends and the predicted
    unit interval becomes a false positive.
    """
    eps = _check_epsilon(epsilon, upper_inclusive=False)
    c = math.ceil(1 / eps)
    p = math.ceil(1 / eps**2)
    ell = _check_ell(ell, p)
    prediction = set()
    for i in range(p):
        prediction.add(Interval(c * i, c * (i + 1)))
        prediction.add(Interval(c * i, c * i + 1))

    duel = _Duel(algorithm, prediction, m=c * p)
    for i in range(p):
        long = Interval(c * i, c * (i + 1))
        if i < ell:
            if duel.serve(long):
                for j in range(c):
                    duel.serve(Interval(c * i + j, c * i + j + 1))
        else:
            duel.serve(long)
            duel.serve(Interval(c * i, c * i + 1))

    parts = []
    accepted = {r for r, d in zip(duel.served, duel.decisions) if d}
    for i in range(p):
        lo, hi = c * i, c * (i + 1)
        served_i = _within(duel.served, lo, hi)
        err = classify(served_i, _within(prediction, lo, hi))
        alg_i = len(_within(accepted, lo, hi))
        parts.append({
            "phase": i, "alg": alg_i, "opt": err.opt_input, "eta": err.eta,
            "ok": alg_i <= err.opt_input - err.eta,
        })

    err = classify(duel.served, prediction)
    alg = duel.profit
    holds = alg <= err.opt_input - err.eta and err.opt_input >= p
    return DuelTranscript(
        bound_kind="thm4",
        algorithm=_name(algorithm),
        params={"epsilon": eps, "ell": ell, "c": c, "p": p},
        prediction=sorted(prediction),
        served=duel.served,
        decisions=duel.decisions,
        algorithm_profit=alg,
        opt_profit=err.opt_input,
        eta=err.eta,
        bound_satisfied=holds and all(part["ok"] for part in parts),
        parts=parts,
        deterministic=_deterministic(algorithm),
    )


def duel_theorem5(epsilon, ell: int, algorithm: Optional[OnlineScheduler] = None) -> DuelTranscript:
    """Tightness of Trust's 1 - 2 gamma ratio.

    The prediction holds ``p`` overlapping pairs ``(3i, 3i+2), (3i+1, 3i+3)``.
    For the first ``ell`` pairs, the planned member never arrives; the other
    member and the unit interval under the planned member's free end arrive
    instead. The remaining pairs arrive as predicted.
    """
    eps = _check_epsilon(epsilon, upper_inclusive=True)
    p = math.ceil(1 / eps)
    ell = _check_ell(ell, p)
    algorithm = Trust() if algorithm is None else algorithm
    prediction = set()
    for i in range(p):
        prediction.add(Interval(3 * i, 3 * i + 2))
        prediction.add(Interval(3 * i + 1, 3 * i + 3))

    duel = _Duel(algorithm, prediction)
    plan = duel.estimator.plan_
    for i in range(p):
        left, right = Interval(3 * i, 3 * i + 2), Interval(3 * i + 1, 3 * i + 3)
        if i < ell:
            if left in plan:
                duel.serve(right)
                duel.serve(Interval(3 * i, 3 * i + 1))
            else:
                duel.serve(left)
                duel.serve(Interval(3 * i + 2, 3 * i + 3))
        else:
            duel.serve(left)
            duel.serve(right)

    err = classify(duel.served, prediction)
    alg = duel.profit
    exact = alg == p - ell and err.opt_input == p + ell and err.eta == ell
    return DuelTranscript(
        bound_kind="thm5",
        algorithm=_name(algorithm),
        params={"epsilon": eps, "ell": ell, "p": p},
        prediction=sorted(prediction),
        served=duel.served,
        decisions=duel.decisions,
        algorithm_profit=alg,
        opt_profit=err.opt_input,
        eta=err.eta,
        bound_satisfied=exact and alg <= err.opt_input - 2 * err.eta,
        deterministic=_deterministic(algorithm),
    )


def _star_round(duel: _Duel, star: int) -> str:
    """One adversarial star; returns the name of the case branch taken."""
    S = lambda a, b: StarRequest(star, a, b)  # noqa: E731
    took_23 = duel.serve(S(2, 3))
    took_34 = duel.serve(S(3, 4))
    took_67 = duel.serve(S(6, 7))
    took_78 = duel.serve(S(7, 8))
    x = 6 if took_67 else 8 if took_78 else None

    if took_23:
        duel.serve(S(1, 2))
        if x is None:
            return "accept23/reject67-78"
        duel.serve(S(5, x))
        return f"accept23/accept7{x}"
    if took_34:
        duel.serve(S(4, 5))
        if x is None:
            return "accept34/reject67-78"
        duel.serve(S(1, x))
        return f"accept34/accept7{x}"
    took_12 = duel.serve(S(1, 2))
    if x is None:
        return "reject23-34/reject67-78"
    if took_12:
        duel.serve(S(5, x))
        return f"reject23-34/accept7{x}/accept12"
    return f"reject23-34/accept7{x}/reject12"


def duel_star(algorithm: OnlineScheduler, ell: int, p: int) -> DuelTranscript:
    """Disjoint paths on ``p`` copies of ``S_8``: ALG <= (1 - 2 gamma) OPT.

    The first ``ell`` stars follow the adaptive case analysis; the rest
    receive exactly the predicted requests. When several branches could
    apply, the first one in the order of the case analysis is taken.
    """
    p = int(p)
    if p < 1:
        raise ValueError(f"need at least one star, got p={p}")
    ell = _check_ell(ell, p)
    prediction = {StarRequest(i, a, b) for i in range(p) for a, b in STAR_PREDICTION}

    duel = _Duel(algorithm, prediction, solver=star_opt)
    branches = []
    for i in range(p):
        if i < ell:
            branches.append(_star_round(duel, i))
        else:
            for a, b in STAR_PREDICTION:
                duel.serve(StarRequest(i, a, b))
            branches.append("as-predicted")

    accepted = {r for r, d in zip(duel.served, duel.decisions) if d}
    parts = []
    for i in range(p):
        served_i = {r for r in duel.served if r.star_index == i}
        predicted_i = {r for r in prediction if r.star_index == i}
        err = classify(served_i, predicted_i, solver=star_opt)
        alg_i = sum(1 for r in accepted if r.star_index == i)
        if i < ell:
            ok = err.eta == 1 and err.opt_input in (3, 4) and alg_i <= err.opt_input - 2
        else:
            ok = err.eta == 0 and err.opt_input == 3
        parts.append({
            "star": i, "branch": branches[i], "alg": alg_i,
            "opt": err.opt_input, "eta": err.eta, "ok": ok,
        })

    err = classify(duel.served, prediction, solver=star_opt)
    alg = duel.profit
    holds = alg <= err.opt_input - 2 * err.eta
    return DuelTranscript(
        bound_kind="thm2",
        algorithm=_name(algorithm),
        params={"ell": ell, "p": p},
        prediction=sorted(prediction),
        served=duel.served,
        decisions=duel.decisions,
        algorithm_profit=alg,
        opt_profit=err.opt_input,
        eta=err.eta,
        bound_satisfied=holds and all(part["ok"] for part in parts),
        parts=parts,
        deterministic=_deterministic(algorithm),
    )


def duel_prop6(algorithm: OnlineScheduler, p: int, m: int) -> DuelTranscript:
    """Robustness of prediction-following algorithms on a path of ``m`` edges.

    The prediction is ``p`` disjoint intervals of length ``m // p``. They all
    arrive; afterwards each accepted one is covered by unit intervals.
    """
    p, m = int(p), int(m)
    if p < 1 or m < p:
        raise ValueError(f"need p >= 1 and m >= p, got p={p}, m={m}")
    length = m // p
    prediction = [Interval(i * length, (i + 1) * length) for i in range(p)]

    duel = _Duel(algorithm, prediction, m=m)
    taken = [iv for iv in prediction if duel.serve(iv)]
    for iv in taken:
        for j in range(iv.start, iv.end):
            duel.serve(Interval(j, j + 1))

    err = classify(duel.served, prediction)
    alg = duel.profit
    k = len(taken)
    holds = alg <= k and err.opt_input >= k * length + (p - k)
    ratio = None if err.opt_input == 0 else Fraction(alg, err.opt_input)
    return DuelTranscript(
        bound_kind="prop6",
        algorithm=_name(algorithm),
        params={"p": p, "m": m, "length": length, "accepted_predicted": k, "ratio": ratio},
        prediction=sorted(prediction),
        served=duel.served,
        decisions=duel.decisions,
        algorithm_profit=alg,
        opt_profit=err.opt_input,
        eta=err.eta,
        bound_satisfied=holds,
        deterministic=_deterministic(algorithm),
    )


def sigma_family(r: int) -> list:
    """Nested halving sequence on a path of ``2**(r+1)`` edges.

    Block ``i`` tiles the path with ``2**i`` intervals of length
    ``2**(r+1-i)``; blocks are emitted from longest to shortest.
    """
    r = int(r)
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    width = 2 ** (r + 1)
    out = []
    for i in range(r + 2):
        step = width >> i
        out.extend(Interval(k * step, (k + 1) * step) for k in range(2**i))
    return out


def duel_sigma(r: int) -> DuelTranscript:
    """Exact expected CRS profit on the sigma family against OPT / levels."""
    sigma = sigma_family(r)
    m = 2 ** (r + 1)
    levels = build_levels(m)
    expected = crs_expected(sigma, m=m)
    best = opt_eft(sigma).profit
    return DuelTranscript(
        bound_kind="sigma",
        algorithm="CRS",
        params={"r": r, "m": m, "levels": levels.level_count},
        prediction=sorted(sigma),
        served=sigma,
        decisions=[None] * len(sigma),
        algorithm_profit=expected,
        opt_profit=best,
        eta=0,
        bound_satisfied=expected >= Fraction(best, levels.level_count),
        deterministic=False,
    )
