"""Exception hierarchy shared across the pipeline.

The CLI maps these onto exit codes: ConfigurationError -> 2,
FetchError -> 3, AnalysisError -> 4.
"""


class ThemeflowError(Exception):
    """Base class for all themeflow errors."""


class ConfigurationError(ThemeflowError):
    """Bad flags, unreadable inputs, empty ontology, overlapping timeframes."""


class OntologyLoadError(ConfigurationError):
    """Ontology input could not be read or parsed."""


class FetchError(ThemeflowError):
    """Live retrieval failed after bounded retries."""


class CursorLoopError(FetchError):
    """The pagination cursor repeated; the remote protocol is broken."""


class AnalysisError(ThemeflowError):
    """A pipeline stage failed on otherwise readable inputs."""


class ReconstructionError(AnalysisError):
    """An inverted abstract index claims one position for two words."""


class ModularityUndefinedError(AnalysisError):
    """Modularity is undefined on a network with zero total edge weight."""
