"""Online interval scheduling with possibly erroneous predictions."""

from .algorithms import (
    CRS,
    Greedy,
    RejectAll,
    RobustTrust,
    Trust,
    TrustGreedy,
    build_levels,
    crs_expected,
    robusttrust_expected,
    run_crs,
    run_greedy,
    run_trust,
    run_trustgreedy,
)
from .errors import check_properties, classify, hamming_error
from .intervals import Interval, opt_bruteforce, opt_eft, overlaps

__version__ = "0.1.0"
