"""Exception hierarchy shared across the toolkit."""


class FiberTapError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(FiberTapError, ValueError):
    """Invalid configuration value, type invariant, or config file."""


class NyquistError(ConfigurationError):
    """A carrier or cutoff frequency violates the sampling theorem."""


class InputError(FiberTapError, ValueError):
    """Rejected input data (wrong kind, shape, length, or non-finite samples)."""


class DomainError(FiberTapError, ValueError):
    """Function argument outside its mathematical domain (e.g. f <= 0)."""


class SynthesisError(FiberTapError):
    """Noise synthesis failed (non-finite or negative target PSD in band)."""


class EstimationError(FiberTapError):
    """Noise spectrum estimation failed (no silent frames available)."""


class FileFormatError(FiberTapError):
    """A data file could not be parsed (bad WAV/CSV structure)."""
