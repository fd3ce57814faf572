"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: bad input -> 1, resource caps -> 2.
Invalid-but-well-formed certificates are reported through result objects,
not exceptions, so that a verifier can hand back a witness.
"""


class PosetDimError(Exception):
    """Base class for all library errors."""


class InputError(PosetDimError):
    """Malformed or inconsistent input (CLI exit code 1)."""


class DuplicateElement(InputError):
    pass


class CycleDetected(InputError):
    pass


class EmptyPoset(InputError):
    pass


class BadDescriptor(InputError):
    pass


class LayerOutOfRange(InputError):
    pass


class UnknownElement(InputError):
    pass


class NotTwoLevel(InputError):
    pass


class NotMonotone(InputError):
    pass


class KindMismatch(InputError):
    pass


class BadChainSizes(InputError):
    pass


class BadKind(InputError):
    pass


class DNotNormalized(InputError):
    pass


class NotASplit(InputError):
    pass


class InvalidCovering(InputError):
    pass


class PreconditionViolated(InputError):
    pass


class BadDecomposition(InputError):
    pass


class NotDecreasing(InputError):
    pass


class SearchSpaceTooLarge(PosetDimError):
    """Exceeded a configured search cap (CLI exit code 2)."""


class EnclosureTooWide(PosetDimError):
    """A rational enclosure was too coarse to decide a comparison."""


class Infeasible(PosetDimError):
    """LP infeasible (assert-level for the dimension LPs)."""


class Unbounded(PosetDimError):
    """LP unbounded (assert-level for the dimension LPs)."""
