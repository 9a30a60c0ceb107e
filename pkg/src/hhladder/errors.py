"""Exception hierarchy shared by all modules."""


class HHLadderError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedTermError(HHLadderError, ValueError):
    pass


class BasisError(HHLadderError, ValueError):
    pass


class QuadratureError(HHLadderError, ValueError):
    pass


class NoBoundStateError(HHLadderError):
    """The truncated basis supports no bound state at the given rung."""

    def __init__(self, rung: int, eigenvalue: float):
        self.rung = rung
        self.eigenvalue = eigenvalue
        super().__init__(
            f"no bound state at rung n={rung}: lowest eigenvalue {eigenvalue!r} is not negative"
        )


class OracleError(HHLadderError):
    pass


class CacheCorruptError(HHLadderError):
    pass


class ConfigError(HHLadderError, ValueError):
    pass
