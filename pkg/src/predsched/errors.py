"""Prediction error: the TP/FP/FN partition, eta = OPT(FP u FN) and gamma."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .intervals import Solution, opt_eft

__all__ = [
    "ErrorBreakdown",
    "PropertyReport",
    "classify",
    "eta",
    "hamming_error",
    "check_properties",
]

Solver = Callable[[Iterable], Solution]


@dataclass(frozen=True)
class ErrorBreakdown:
    tp: frozenset
    fp: frozenset
    fn_: frozenset
    eta: int
    opt_input: int

    @property
    def gamma(self) -> Optional[Fraction]:
        """``eta / OPT(I)`` as an exact fraction, or None when OPT(I) is zero."""
        if self.opt_input == 0:
            return None
        return Fraction(self.eta, self.opt_input)

    @property
    def gamma_undefined(self) -> bool:
        return self.opt_input == 0

    @property
    def gamma_pair(self) -> Optional[tuple[int, int]]:
        g = self.gamma
        return None if g is None else (g.numerator, g.denominator)

    def report_line(self) -> str:
        num, den = self.gamma_pair or ("-", "-")
        return (
            f"{len(self.tp)} {len(self.fp)} {len(self.fn_)} "
            f"{self.eta} {self.opt_input} {num} {den}"
        )


def classify(input: Iterable, prediction: Iterable, solver: Solver = opt_eft) -> ErrorBreakdown:
    """Partition the input/prediction pair and measure the prediction error.

    ``input`` may be an ordered sequence; only its set of requests matters.
    ``solver`` computes offline optima (``opt_eft`` on paths; swap in an
    exhaustive solver for cross-checks or other conflict graphs).
    """
    actual = frozenset(input)
    predicted = frozenset(prediction)
    fp = predicted - actual
    fn_ = actual - predicted
    return ErrorBreakdown(
        tp=actual & predicted,
        fp=fp,
        fn_=fn_,
        eta=solver(fp | fn_).profit,
        opt_input=solver(actual).profit,
    )


def eta(input: Iterable, prediction: Iterable, solver: Solver = opt_eft) -> int:
    actual = frozenset(input)
    predicted = frozenset(prediction)
    return solver(actual ^ predicted).profit


def hamming_error(input: Iterable, prediction: Iterable) -> int:
    """``|FP| + |FN|``; kept only for comparison against eta."""
    return len(frozenset(input) ^ frozenset(prediction))


@dataclass
class PropertyReport:
    eta: int
    opt_input: int
    opt_prediction: int
    monotone: bool = True
    lipschitz: bool = True
    lipschitz_complete: bool = True
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.monotone and self.lipschitz and self.lipschitz_complete


def check_properties(input: Iterable, prediction: Iterable, solver: Solver = opt_eft) -> PropertyReport:
    """Check monotonicity, the Lipschitz bound and Lipschitz-completeness of eta.

    Monotonicity is tested for every single-element improvement: moving one
    false negative into the prediction, or dropping one false positive.
    """
    actual = frozenset(input)
    predicted = frozenset(prediction)
    base = classify(actual, predicted, solver)
    report = PropertyReport(
        eta=base.eta,
        opt_input=base.opt_input,
        opt_prediction=solver(predicted).profit,
    )
    for x in sorted(base.fn_):
        moved = eta(actual, predicted | {x}, solver)
        if moved > base.eta:
            report.monotone = False
            report.violations.append(("monotone-fn", x, moved, base.eta))
    for y in sorted(base.fp):
        moved = eta(actual, predicted - {y}, solver)
        if moved > base.eta:
            report.monotone = False
            report.violations.append(("monotone-fp", y, moved, base.eta))
    if base.eta < abs(report.opt_input - report.opt_prediction):
        report.lipschitz = False
        report.violations.append(("lipschitz", base.eta, report.opt_input, report.opt_prediction))
    if base.eta > solver(base.fp | base.fn_).profit:
        report.lipschitz_complete = False
        report.violations.append(("lipschitz-complete", base.eta))
    return report
