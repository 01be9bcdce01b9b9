"""Exception hierarchy shared by all modules."""


class SwitchThermoError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(SwitchThermoError, ValueError):
    pass


class NotHermitianError(SwitchThermoError, ValueError):
    pass


class InvalidStateError(SwitchThermoError, ValueError):
    """A matrix violates one of the density-matrix invariants."""


class NotCPTPError(SwitchThermoError, ValueError):
    pass


class DomainError(SwitchThermoError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class DegenerateBranchError(SwitchThermoError, ValueError):
    """A measurement branch has (numerically) zero probability."""


class BasisError(SwitchThermoError, ValueError):
    pass
