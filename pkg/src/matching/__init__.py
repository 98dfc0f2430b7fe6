"""Matching intervals, invariant densities and entropy for the family
Q_g(x) = x+1 (x <= g), 1+s(1-x) (x > g), computed in exact arithmetic."""
from .dynamics import (MatchingCertificate, NoMatchWithinBudget, SlopeSpec,
                       StructuralFailure, bifurcation_member, detect_matching)
from .exact import AffineForm, Quad, parse_field, parse_slope
from .spectral import entropy_at, markov_entropy, metric_entropy_closed
from .symbolic import enumerate_matching_intervals, interval_from_pseudocenter

__all__ = [
    "AffineForm", "MatchingCertificate", "NoMatchWithinBudget", "Quad", "SlopeSpec",
    "StructuralFailure", "bifurcation_member", "detect_matching",
    "entropy_at", "enumerate_matching_intervals", "interval_from_pseudocenter",
    "markov_entropy", "metric_entropy_closed", "parse_field", "parse_slope",
]
