"""Exception hierarchy shared across leadscreen.

Every error carries a short machine-readable ``code`` so fixtures and the CLI
can refer to failures without matching on message text.
"""

from __future__ import annotations


class LeadscreenError(Exception):
    code = "error"


# --- SMILES -----------------------------------------------------------------


class SmilesError(LeadscreenError, ValueError):
    code = "smiles"

    def __init__(self, reason: str, smiles: str = "", position: int | None = None) -> None:
        self.reason = reason
        self.smiles = smiles
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{reason}{where}: {smiles!r}" if smiles else f"{reason}{where}")


class SmilesSyntaxError(SmilesError):
    code = "syntax"


class ValenceError(SmilesError):
    code = "valence"


class UnclosedRingError(SmilesError):
    code = "unclosed_ring"


class AromaticityError(SmilesError):
    code = "aromaticity"


# --- descriptors / scoring ---------------------------------------------------


class UnknownEnvironmentWarning(UserWarning):
    """An N/O (or S/P) environment had no polar-surface table row; it contributed 0."""


class ParameterError(LeadscreenError, ValueError):
    code = "parameter"


class DomainError(LeadscreenError, ValueError):
    code = "domain"


# --- pharmacokinetics / pool -------------------------------------------------


class NoWeakness(LeadscreenError):
    """Raised by flag_weakness when every property is within its risk threshold."""

    code = "no_weakness"


class EmptyInput(LeadscreenError, ValueError):
    code = "empty_input"


class UnknownParent(LeadscreenError, KeyError):
    code = "unknown_parent"

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else self.code


class DuplicateProposal(LeadscreenError, ValueError):
    """A parent already received a refinement proposal in the target round."""

    code = "duplicate_proposal"


class PoolFormatError(LeadscreenError, ValueError):
    code = "pool_format"

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# --- remote services ---------------------------------------------------------


class ClientError(LeadscreenError):
    code = "client"


class NotFound(ClientError):
    code = "not_found"


class NetworkError(ClientError):
    code = "network"


class MalformedResponse(ClientError):
    code = "malformed_response"


class FixtureMissing(ClientError):
    code = "fixture_missing"


class SchemaError(ClientError, ValueError):
    code = "schema"


class RateLimited(ClientError):
    code = "rate_limited"

    def __init__(self, message: str, retry_after: float | None = None) -> None:
        self.retry_after = retry_after
        super().__init__(message)


class AmbiguousName(ClientError):
    code = "ambiguous_name"

    def __init__(self, name: str, candidates: list) -> None:
        self.name = name
        self.candidates = candidates
        ids = ", ".join(c.source_db_id for c in candidates)
        super().__init__(f"{name!r} matches several preferred names: {ids}")


# --- pipeline ----------------------------------------------------------------


class MissingInput(LeadscreenError):
    code = "missing_input"

    def __init__(self, stage: str, artifact: str) -> None:
        self.stage = stage
        self.artifact = artifact
        super().__init__(f"stage {stage!r} needs {artifact}, which does not exist yet")


class ConfigError(LeadscreenError, ValueError):
    code = "config"


class AdapterError(LeadscreenError):
    code = "adapter"

    def __init__(self, message: str, stderr: str = "") -> None:
        self.stderr = stderr
        super().__init__(message + (f"\n--- adapter stderr ---\n{stderr}" if stderr else ""))
