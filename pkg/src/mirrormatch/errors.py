"""Exception hierarchy shared across the package.

Every domain error derives from :class:`MirrorMatchError` so callers (CLI,
HTTP service) can map them to exit codes / status codes in one place.
"""


class MirrorMatchError(Exception):
    """Base class for all domain errors raised by this package."""


# --- corpus / ingest ---------------------------------------------------------

class ParseError(MirrorMatchError):
    """Input file does not parse under its declared format."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc += f"{path}"
        if line is not None:
            loc += f":{line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.path = path
        self.line = line


class DuplicateDocId(MirrorMatchError):
    """The same doc_id appears twice within one store or topic."""


class DanglingQrel(MirrorMatchError):
    """A qrels row references a document that is not a known candidate."""


class MissingDocument(MirrorMatchError):
    """A topic lists a candidate doc_id absent from the document store."""


class EmptyDocument(MirrorMatchError):
    """No tokens survive preprocessing for this document."""


# --- embeddings --------------------------------------------------------------

class EmptyVocabulary(MirrorMatchError):
    """No token reaches the minimum occurrence count."""


class HeaderMismatch(MirrorMatchError):
    """Embedding file header disagrees with its body."""


class MalformedVector(MirrorMatchError):
    """Embedding row has the wrong component count or non-numeric values."""


class DimensionMismatch(MirrorMatchError):
    """Two vectors of different dimensionality were combined."""


class MissingEmbedding(MirrorMatchError):
    """A term has no vector in the active embedding table."""


# --- matching / baselines ----------------------------------------------------

class EmptySequence(MirrorMatchError):
    """A scorer received a zero-length term sequence."""


class UndefinedLog(MirrorMatchError):
    """A term has zero probability in both document and collection models."""


class SolverFailure(MirrorMatchError):
    """The transportation solver failed on a feasible instance (a defect)."""


# --- evaluation --------------------------------------------------------------

class NoRelevant(MirrorMatchError):
    """A ranked list contains no relevant document."""


class UnknownLabel(MirrorMatchError):
    """A token label falls outside the supported label set."""


class SkippedTopic(MirrorMatchError):
    """Topic excluded from evaluation (fewer than 2 relevant documents)."""


# --- screening / sessions ----------------------------------------------------

class UnknownModel(MirrorMatchError):
    """Scorer name not present in the registry."""

    def __init__(self, name: str, registered: list[str]):
        super().__init__(
            f"unknown model {name!r}; registered scorers: {', '.join(registered)}"
        )
        self.name = name
        self.registered = registered


class EmptyCandidateSet(MirrorMatchError):
    """Ranking was requested over zero candidates."""


class MismatchedDocumentSets(MirrorMatchError):
    """Rank fusion received lists that do not cover the same documents."""


class AlreadyLabeled(MirrorMatchError):
    """A label was submitted for a document that already has one."""


class UnknownDoc(MirrorMatchError):
    """A label references a document outside the session's candidate set."""


class TooFewRelevant(MirrorMatchError):
    """An analysis needs at least two relevant documents."""
