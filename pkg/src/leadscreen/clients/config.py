from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import Any, Mapping

from leadscreen.errors import ConfigError

MODES = ("replay", "record", "live")


@dataclass(frozen=True)
class ClientConfig:
    """Endpoints and transport policy for the remote services.

    ``mode`` is ``replay`` unless live traffic is asked for explicitly.
    Tokens are read from the environment variables named here, never stored.
    """

    uniprot_url: str = "https://rest.uniprot.org"
    chembl_url: str = "https://www.ebi.ac.uk/chembl/api/data"
    admet_url: str = "http://localhost:8000/admet"
    affinity_url: str = "http://localhost:8000/affinity"
    admet_token_env: str = "LEADSCREEN_ADMET_TOKEN"
    affinity_token_env: str = "LEADSCREEN_AFFINITY_TOKEN"
    timeout: float = 30.0
    max_retries: int = 3
    max_retry_wait: float = 60.0
    organism_id: int = 9606
    mode: str = "replay"
    fixtures: str | None = None
    extra: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"client mode must be one of {MODES}, got {self.mode!r}")
        if self.mode in ("replay", "record") and not self.fixtures:
            raise ConfigError(f"client mode {self.mode!r} needs a fixtures directory")
        if self.timeout <= 0 or self.max_retries < 0:
            raise ConfigError("timeout must be > 0 and max_retries >= 0")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "ClientConfig":
        known = {f.name for f in fields(cls)} - {"extra"}
        unknown = {k: v for k, v in data.items() if k not in known}
        return cls(**{k: v for k, v in data.items() if k in known}, extra=unknown)

    def with_overrides(self, **kw: Any) -> "ClientConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})
