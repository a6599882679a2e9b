"""Exception hierarchy shared by all netforge modules."""


class NetforgeError(Exception):
    """Base class for every error raised by netforge."""


class ParameterError(NetforgeError, ValueError):
    """An argument is outside its valid range."""


class InfeasibleSequenceError(ParameterError):
    """A degree sequence cannot support a connected graph."""


class NoMoveError(NetforgeError):
    """No rewire exists (graph has no edges or no non-edges)."""


class ConsistencyError(NetforgeError):
    """A move does not match the graph state it is applied to."""


class DisconnectedError(NetforgeError):
    """A metric that needs a connected graph got a disconnected one."""


class FitError(NetforgeError):
    """Not enough data to fit a power-law exponent."""


class ConfigError(NetforgeError):
    """A group configuration file failed to parse or validate."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
