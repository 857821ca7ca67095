"""Exception hierarchy shared across the package."""

from __future__ import annotations

from typing import Any


class RightLoopsError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(RightLoopsError):
    """A configurable size cap was hit before the computation finished."""

    def __init__(self, what: str, cap: int):
        self.what = what
        self.cap = cap
        super().__init__(f"{what}: cap of {cap} exceeded")


class DegreeMismatch(RightLoopsError):
    pass


class SubgroupError(RightLoopsError):
    """H is not a subgroup of G (or similar containment failure)."""


class NotNormalError(SubgroupError):
    pass


class LoopTableError(RightLoopsError):
    """A candidate Cayley table failed right-loop validation."""


class NotSquare(LoopTableError):
    pass


class IdentityRowViolated(LoopTableError):
    pass


class IdentityColumnViolated(LoopTableError):
    pass


class RightTranslationNotBijective(LoopTableError):
    def __init__(self, column: int):
        self.column = column
        super().__init__(f"column {column} is not a bijection")


class SubloopError(RightLoopsError):
    """A member set is not closed under the loop operation."""


class NotAHomomorphism(RightLoopsError):
    def __init__(self, witness: tuple[int, int]):
        self.witness = witness
        super().__init__(f"map is not a homomorphism, witness pair {witness}")


class TransversalError(RightLoopsError):
    pass


class DuplicateCoset(TransversalError):
    pass


class MissingCoset(TransversalError):
    pass


class NonIdentityRepForH(TransversalError):
    pass


class PreconditionNotMet(RightLoopsError):
    """A check's hypotheses do not hold; the result is inconclusive, not a failure."""


class NotNilpotent(PreconditionNotMet):
    pass


class TheoremViolation(RightLoopsError):
    """A fact the library treats as a theorem failed on concrete data.

    These are raised instead of silently trusting the claimed fact, so a
    violation always surfaces with a machine-readable witness.
    """

    def __init__(self, claim: str, witness: Any = None):
        self.claim = claim
        self.witness = witness
        super().__init__(f"theorem violation: {claim} (witness: {witness!r})")


class ParseError(RightLoopsError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
