"""Clients for protein, drug and prediction services, with record/replay fixtures."""

from leadscreen.clients.config import ClientConfig
from leadscreen.clients.services import BioClients, DrugRecord, ProteinRecord, parse_fasta, validate_fasta
from leadscreen.clients.transport import RecordingTransport, ReplayTransport, normalize_url, request_key

__all__ = [
    "BioClients",
    "ClientConfig",
    "DrugRecord",
    "ProteinRecord",
    "RecordingTransport",
    "ReplayTransport",
    "normalize_url",
    "parse_fasta",
    "request_key",
    "validate_fasta",
]
