"""Exception hierarchy shared across the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class MalformedDocument(EngineError):
    """Input bytes could not be parsed in the declared format."""


class EmptyDocument(EngineError):
    """Document parsed but contains zero extractable characters."""


class BackendUnavailable(EngineError):
    """A model backend could not be reached or returned a server error."""


class DimensionMismatch(EngineError):
    """Vector dimension differs from what the index or gateway expects."""


class ContextOverflow(EngineError):
    """Generation backend reported that the prompt exceeds its context window."""


class ZeroVector(EngineError):
    """Cosine similarity requested on a zero-norm vector."""


class DuplicateId(EngineError):
    """Insert attempted with an id already present in the index."""


class EmptyIndex(EngineError):
    """Search requested against an index with no entries."""


class EmptyCandidates(EngineError):
    """Top-p filtering requested on an empty candidate list."""


class NotFound(EngineError):
    """A referenced record (document, chunk, conversation) does not exist."""


class FormatVersionMismatch(EngineError):
    """Persisted file was written by an incompatible format version."""


class CorruptFile(EngineError):
    """Persisted file failed its checksum or structural validation."""


class FormatError(EngineError):
    """Benchmark input file does not match the expected layout."""


class MissingLabel(EngineError):
    """Benchmark row is missing a required relevance label."""
