"""Exception hierarchy.

Every contract violation raises a subclass of :class:`NegcurveError`; callers
can distinguish bad inputs (:class:`ArgumentError`), broken geometric
invariants (:class:`InvariantError`), numeric-range failures
(:class:`OverflowRangeError`, :class:`NumericError`) and oracle/harness state
misuse (:class:`StateError`, :class:`BudgetError`, :class:`ConfigError`).
"""


class NegcurveError(Exception):
    """Base class for all library errors."""


class ArgumentError(NegcurveError, ValueError):
    """An argument violates a documented precondition."""


class InvariantError(NegcurveError):
    """A geometric invariant failed validation (off-manifold point, bad tangent...)."""


class OverflowRangeError(NegcurveError, OverflowError):
    """A hyperbolic-trig argument exceeded the representable range (hard cutoff 700)."""


class NumericError(NegcurveError, ArithmeticError):
    """An iterative numeric routine failed to converge to tolerance."""


class StateError(NegcurveError):
    """An operation was invoked in a state that forbids it (e.g. after finalize)."""


class BudgetError(NegcurveError):
    """A query/resource budget was exhausted where the contract forbids continuing."""


class ConfigError(NegcurveError, ValueError):
    """A configuration object is inconsistent or fails its feasibility checks."""


class ResourceError(NegcurveError):
    """A requested construction exceeds the hard resource limits (memory/time)."""


class VerificationError(NegcurveError):
    """A runtime self-check (count bound, separation certificate, replay) failed."""
