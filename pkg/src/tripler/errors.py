class TriplerError(Exception):
    exit_code = 1


class ConfigError(TriplerError, ValueError):
    exit_code = 1


class ConvergenceError(TriplerError, RuntimeError):
    exit_code = 2


class ModelValidityError(TriplerError, ValueError):
    """Parameters outside the domain where the model is defined."""

    exit_code = 3
