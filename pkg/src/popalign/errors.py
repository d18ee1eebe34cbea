"""Exception hierarchy shared by every module."""


class PopAlignError(Exception):
    """Base class for all errors raised by popalign."""


class DataError(PopAlignError, ValueError):
    """Malformed input data or arguments outside an operation's domain."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvalidSubsetError(DataError):
    """An item subset refers to indices outside the matrix."""


class RankError(DataError):
    """A subspace dimension k exceeds the effective rank of the matrix."""

    def __init__(self, k, effective_rank):
        super().__init__(
            f"k={k} exceeds effective rank {effective_rank}; "
            f"largest valid k is {effective_rank}"
        )
        self.k = k
        self.effective_rank = effective_rank


class DegeneracyError(PopAlignError):
    """The principal singular value is repeated, so its vector has no canonical orientation."""

    def __init__(self, multiplicity):
        super().__init__(f"sigma_1 has multiplicity {multiplicity}; principal vector is not unique")
        self.multiplicity = multiplicity


class InfeasibleError(DataError):
    """The spectral scalar mu lies outside [s_n, s_1]."""


class ConvergenceError(PopAlignError):
    """The SVD backend failed to converge."""


class InvariantViolation(PopAlignError):
    """A bound failed to bracket the exact value; indicates an implementation bug."""
