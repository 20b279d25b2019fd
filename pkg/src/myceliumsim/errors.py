"""Exception hierarchy.

Everything raised on bad user input or unsatisfiable requests derives from
MyceliumSimError so callers (and the CLI) can catch one type for "domain
error" and let genuine bugs propagate.
"""

from __future__ import annotations


class MyceliumSimError(Exception):
    """Base class for all domain errors."""


class ParseError(MyceliumSimError):
    """A file or string could not be parsed; carries location diagnostics."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class ConfigError(MyceliumSimError):
    """A parameter object or configuration value is out of its legal range."""


class DimensionError(MyceliumSimError):
    """Mixed 2D/3D objects, or a position of the wrong arity."""


class NotFoundError(MyceliumSimError):
    """A referenced node or strand id does not exist."""


class PortError(MyceliumSimError):
    """A node cannot serve the requested input/output role."""


class ChronologyError(MyceliumSimError):
    """An event was scheduled before the simulation clock."""


class ArityError(MyceliumSimError):
    """Too many logic inputs for exhaustive enumeration."""


class UnsupportedNetworkError(MyceliumSimError):
    """The analytic solver only handles small acyclic conductive networks."""


class InfeasibleSpecError(MyceliumSimError):
    """A synthetic recording spec cannot be realized within its duration."""


class RangeError(MyceliumSimError):
    """A sample value is outside the recordable voltage range."""
