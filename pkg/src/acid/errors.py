"""Exception types raised across the pipeline."""


class AcidError(Exception):
    """Base class for all pipeline errors."""


class NotARepository(AcidError):
    """Path does not contain a git object database."""


class CorruptObject(AcidError):
    """A git object could not be read; carries the offending id."""

    def __init__(self, object_id: str, detail: str = ""):
        self.object_id = object_id
        super().__init__(f"corrupt or unreadable object {object_id}" + (f": {detail}" if detail else ""))


class EmptyHistory(AcidError):
    """Operation requires at least one commit."""


class EmptyTree(AcidError):
    """Operation requires at least one tracked file."""


class EmptyDenominator(AcidError):
    """A proportion was requested over an empty population."""


class RateLimited(AcidError):
    """Forge API asked us to back off; carries the server-indicated delay."""

    def __init__(self, retry_after: float):
        self.retry_after = retry_after
        super().__init__(f"rate limited, retry after {retry_after}s")


class AuthRequired(AcidError):
    """Forge API needs a token (set ACID_FORGE_TOKEN) and none was usable."""


class RuleFileError(AcidError):
    """Rule file failed to parse or validate."""


class ManifestUnreadable(AcidError):
    """Repository manifest missing or malformed."""


class MissingPrediction(AcidError):
    """An oracle commit id has no corresponding prediction."""


class DuplicateOracleEntry(AcidError):
    """The same commit id appears twice in an oracle file."""


class OracleFormatError(AcidError):
    """Oracle or predictions file is malformed; carries the line number."""

    def __init__(self, path: str, line_no: int, detail: str):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {detail}")
