"""Exception types shared across modules (and mapped to CLI exit codes)."""


class UnsupportedSubsetError(ValueError):
    """The requested subset has no closed-form main term / supported path."""


class TheoremPairingError(ValueError):
    """Statistic and subset are not one of the supported pairings."""


class EmptySampleError(ValueError):
    """An operation needing at least one sample received none."""
