"""Exception types shared across the package."""


class InputFormatError(ValueError):
    """A data, margins, or model file could not be parsed or fails validation."""


class InfeasibleError(ValueError):
    """Constraints cannot be satisfied: inconsistent margin totals, targets
    outside the domain's reachable range, or multipliers outside the region
    where the per-cell normalizer is finite."""
