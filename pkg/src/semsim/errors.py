"""Exception hierarchy shared across the package.

Errors are grouped so the CLI can map them onto stable exit codes:
configuration problems (bad bundles, bad options) versus data problems
(unparseable files, empty texts).
"""


class SemsimError(Exception):
    """Base class for every error raised by this package."""


# configuration --------------------------------------------------------------

class ConfigError(SemsimError):
    """Invalid configuration: options, bundles, or unusable runtimes."""


class BundleFileMissingError(ConfigError):
    pass


class FingerprintMismatchError(ConfigError):
    pass


class MalformedConfigError(ConfigError):
    pass


class UnsupportedGraphError(ConfigError):
    pass


# data -----------------------------------------------------------------------

class DataError(SemsimError):
    """Invalid input data (datasets, texts, records)."""


class ParseError(DataError):
    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where = f" [{where}]"
        super().__init__(f"{message}{where}")


class SchemaViolationError(DataError):
    pass


class WrongSplitError(DataError):
    pass


class EmptyTextError(DataError):
    pass


# backend --------------------------------------------------------------------

class TokenizerError(SemsimError):
    pass


class InferenceError(SemsimError):
    pass


class AllTokensExcludedError(SemsimError):
    pass


# metrics --------------------------------------------------------------------

class ZeroVectorError(SemsimError):
    pass


class EnsembleError(SemsimError):
    """Missing component score or pair-id mismatch in an ensemble."""


# statistics -----------------------------------------------------------------

class StatsError(SemsimError):
    pass


class LengthMismatchError(StatsError):
    pass


class ConstantInputError(StatsError):
    """Correlation is undefined for constant input; never reported as 0."""


class EmptyClassError(StatsError):
    pass


class SingleClassError(StatsError):
    pass


# cache ----------------------------------------------------------------------

class CacheUnavailableError(SemsimError):
    pass
