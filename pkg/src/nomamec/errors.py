"""Exception hierarchy shared by every module."""


class NomaMecError(Exception):
    """Base class for all package errors."""


class ConfigError(NomaMecError, ValueError):
    """Invalid scenario, plan or experiment configuration."""


class DegeneratePlan(NomaMecError, ValueError):
    """Offloaded bits are nonzero but the offloading time is zero."""


class InfeasibleDeadline(NomaMecError):
    """The deadline leaves no positive offloading time for the requested allocation."""


class LocalComputationSuffices(NomaMecError):
    """The tasks fit the deadline locally, so the offloading allocation does not apply."""


class SolverError(NomaMecError):
    """Base class for power-allocation solver failures."""


class SolverDegenerate(SolverError):
    """The leading cubic coefficient vanishes and the quadratic fallback also degenerates."""


class NoRootInUnitInterval(SolverError):
    """No root of the stationarity cubic lies strictly inside (0, 1)."""


class BracketFailure(SolverError):
    """The stationarity function does not change sign on the clipped unit interval."""
