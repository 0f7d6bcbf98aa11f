"""Exception hierarchy shared by the library and the command-line front end."""


class LzError(Exception):
    """Base class for every error raised by lzring."""


class CapacityError(LzError, ValueError):
    """A many-body operator would exceed the configured number of sites."""


class ConfigError(LzError, ValueError):
    """Invalid user configuration; carries the offending key and line when known."""

    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class NumericalError(LzError):
    """Base class for failures of the numerical procedure itself."""


class DegenerateGroundStateError(NumericalError):
    def __init__(self, gap, tol):
        self.gap = gap
        super().__init__(
            f"ground level is degenerate (gap {gap:.3e} <= {tol:.1e}); "
            "use init_mode=diabatic or move t_start"
        )


class IntegrationError(NumericalError):
    """Non-finite amplitudes appeared during time stepping."""


class NormDriftError(IntegrationError):
    def __init__(self, drift, tol, dt):
        self.drift = drift
        super().__init__(
            f"norm drift {drift:.3e} exceeds tolerance {tol:.1e} at dt={dt:g}; "
            "try a smaller dt"
        )


class GridError(LzError, ValueError):
    """Sweep rows that do not form the requested rectangle."""


class SweepError(NumericalError):
    """A single grid point failed; the point is kept for reporting."""

    def __init__(self, point, cause):
        self.point = point
        self.cause = cause
        j1, j2, r = point
        super().__init__(f"grid point (j1={j1:g}, j2={j2:g}, r={r:g}) failed: {cause}")
