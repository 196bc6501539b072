"""Exception hierarchy shared across the package.

Three base classes map onto the CLI exit codes: ConfigError -> 2,
DataError -> 3, SynthesisFailure -> 1.
"""


class PipesynthError(Exception):
    pass


class ConfigError(PipesynthError):
    """Bad flags, unusable assets, or broken executor configuration."""


class DataError(PipesynthError):
    """Problems with user datasets or corpus files."""


class SynthesisFailure(PipesynthError):
    """The engine ran but could not produce a usable pipeline."""


# dataset loading / splitting

class MissingTarget(DataError):
    pass


class RaggedRows(DataError):
    pass


class EmptyFile(DataError):
    pass


class DegenerateSplit(DataError):
    pass


# corpus

class SchemaError(DataError):
    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class UnknownLabel(DataError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown component label: {name!r}")


class ApplicabilityMismatch(DataError):
    pass


# skeleton predictor

class OneClassOnly(DataError):
    """An FE label is always or never present; no binary tree can be trained."""


class InsufficientModels(DataError):
    pass


class EmptyPath(PipesynthError):
    """Constant predictor has no decision path."""


# instantiation

class UnknownComponent(ConfigError):
    pass


class CycleDetected(ConfigError):
    """The ordering DAG asset is corrupt."""


class MissingTemplate(ConfigError):
    pass


class EmptyColumnHole(ConfigError):
    pass


class NoSkeletons(SynthesisFailure):
    pass


# validation

class AllCandidatesFailed(SynthesisFailure):
    def __init__(self, message, results=None):
        self.results = results or []
        super().__init__(message)
