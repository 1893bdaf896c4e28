"""Exception types shared across the library and mapped to CLI exit codes."""


class NlpdError(Exception):
    """Base class for errors raised by this package."""


class ShapeMismatchError(NlpdError):
    """Two images that must share dimensions and channel count do not."""


class StageError(NlpdError):
    """Requested pyramid depth is infeasible for the given plane."""


class UnsupportedFormatError(NlpdError):
    """File is recognized but uses a feature outside the supported subset."""


class CorruptFileError(NlpdError):
    """File does not parse as the format its header claims."""


class ParamsError(NlpdError):
    """Parameter file is missing, malformed, or violates an invariant."""


class CorpusError(NlpdError):
    """Fitting corpus is empty or contains no usable images."""


class NonFiniteError(NlpdError):
    """Objective became NaN or infinite during optimization."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"objective is not finite at step {step}")
