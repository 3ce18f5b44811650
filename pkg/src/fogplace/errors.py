"""Exception types shared across the package.

Two failure classes matter to callers: bad input (malformed or
inconsistent files, out-of-range values) and scenarios that admit no
feasible placement.  The CLI maps them to distinct exit codes.
"""


class ValidationError(ValueError):
    """Input file or value fails a structural or range check."""


class InfeasibleError(RuntimeError):
    """Scenario admits no placement under the capacity rules."""
