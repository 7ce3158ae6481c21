"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for bad input, 3 for an
unmet precondition, 4 for a failed internal verification.
"""

from __future__ import annotations


class JacobiLiftError(Exception):
    exit_code = 2


class InputError(JacobiLiftError, ValueError):
    exit_code = 2


class PreconditionError(JacobiLiftError):
    exit_code = 3


class VerificationError(JacobiLiftError, ArithmeticError):
    exit_code = 4


class DisconnectedGraph(InputError):
    pass


class LeafVertex(InputError):
    pass


class DuplicateEdgeId(InputError):
    pass


class NotASpanningTree(InputError):
    pass


class InvalidChoice(InputError):
    pass


class NotAPermutation(InputError):
    pass


class NotUnit(InputError):
    pass


class NegativeEntry(InputError):
    pass


class NotNonnegative(InputError):
    pass


class GraphMismatch(InputError):
    pass


class NegativeMoment(InputError):
    pass


class Disconnected(PreconditionError):
    pass


class NotAdmissible(PreconditionError):
    pass


class ConnectivityUnreachable(PreconditionError):
    pass


class InsufficientLevels(PreconditionError):
    pass


class NotPositive(PreconditionError):
    pass


class NotGroundState(PreconditionError):
    pass


class ConvergenceFailure(VerificationError):
    pass


class BoundViolation(VerificationError):
    pass
