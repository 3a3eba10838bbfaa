"""Exception hierarchy shared across the package."""


class PreobsError(Exception):
    pass


class StructureError(PreobsError, ValueError):
    """Malformed observation list or profile (duplicates, out-of-range arms)."""


class DisjointnessError(StructureError):
    """Lists of a collision-free profile overlap."""


class ParameterError(PreobsError, ValueError):
    """Instance parameters outside their admissible range."""


class StateError(PreobsError, RuntimeError):
    pass


class TraceError(PreobsError):
    """Trace file could not be parsed."""


class EndOfTrace(TraceError):
    pass


class BudgetError(PreobsError):
    """Exhaustive enumeration would exceed its size guard."""


class DegenerateGapError(PreobsError, ValueError):
    """A regret bound was requested for means with a zero gap."""


class ConfigError(PreobsError, ValueError):
    pass
