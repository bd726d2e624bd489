class GAAError(Exception):
    """Base class for every error raised by gaa_lab"""


class ParameterError(GAAError, ValueError):
    """An input parameter is outside the range the model is defined on"""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ConfigError(GAAError, ValueError):
    """A run configuration file could not be parsed"""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class OracleConvergenceError(GAAError, RuntimeError):
    """The tridiagonal eigensolver did not converge"""

    def __init__(self, index, n_sites):
        self.index = index
        self.n_sites = n_sites
        super().__init__(
            f"eigensolver failed to converge: off-diagonal element {index} "
            f"of {n_sites - 1} did not reach zero"
        )
