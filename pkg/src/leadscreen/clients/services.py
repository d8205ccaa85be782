from __future__ import annotations

import math
import os
import re
import time
from dataclasses import dataclass
from typing import Any, Callable

import httpx

from leadscreen.clients.config import ClientConfig
from leadscreen.clients.transport import RecordingTransport, ReplayTransport
from leadscreen.errors import (
    AmbiguousName,
    MalformedResponse,
    NetworkError,
    NotFound,
    ParameterError,
    RateLimited,
    SchemaError,
    SmilesError,
)
from leadscreen.pk import AdmetProfile, AdmetSchema, default_schema
from leadscreen.smiles import parse, serialize

AMINO_ACIDS = set("ACDEFGHIKLMNPQRSTVWYBXZUO")
_ACCESSION = re.compile(r"^>(?:sp|tr)\|([A-Z0-9]{6,10}(?:-\d+)?)\|")


@dataclass(frozen=True)
class ProteinRecord:
    accession: str
    gene: str
    organism_id: int
    fasta: str

    @property
    def sequence(self) -> str:
        return "".join(self.fasta.splitlines()[1:])


@dataclass(frozen=True)
class DrugRecord:
    name: str
    smiles: str
    source_db_id: str


def parse_fasta(text: str) -> list[tuple[str, str]]:
    """(header, sequence) pairs; raises MalformedResponse on anything that is not protein FASTA."""
    entries: list[tuple[str, list[str]]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            entries.append((line, []))
        elif not entries:
            raise MalformedResponse("FASTA text does not start with a '>' header")
        else:
            entries[-1][1].append(line)
    out = []
    for header, chunks in entries:
        seq = "".join(chunks).upper()
        if not seq:
            raise MalformedResponse(f"FASTA entry {header[:40]!r} has no sequence")
        bad = set(seq) - AMINO_ACIDS
        if bad:
            raise MalformedResponse(f"FASTA entry {header[:40]!r} has non-amino-acid letters {sorted(bad)}")
        out.append((header, seq))
    return out


def validate_fasta(text: str) -> str:
    if not parse_fasta(text):
        raise MalformedResponse("empty FASTA")
    return text


class BioClients:
    """Protein, drug and prediction lookups over one httpx client.

    ``transport`` overrides the mode-derived transport (tests inject mocks);
    ``sleep`` is called with the wait before retrying a rate-limited request.
    """

    def __init__(
        self,
        config: ClientConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        schema: AdmetSchema | None = None,
    ) -> None:
        self.config = config
        self.sleep = sleep
        self.schema = schema or default_schema()
        if transport is None:
            if config.mode == "replay":
                transport = ReplayTransport(config.fixtures)
            elif config.mode == "record":
                transport = RecordingTransport(config.fixtures)
            else:
                transport = httpx.HTTPTransport()
        self.http = httpx.Client(transport=transport, timeout=config.timeout)

    def close(self) -> None:
        self.http.close()

    def __enter__(self) -> "BioClients":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    # -- plumbing --

    def _send(self, method: str, url: str, *, params=None, json_body=None, token_env: str | None = None) -> httpx.Response:
        headers = {"Accept": "application/json, text/plain, */*"}
        token = os.environ.get(token_env) if token_env else None
        if token:
            headers["Authorization"] = f"Bearer {token}"
        attempt = 0
        while True:
            try:
                resp = self.http.request(method, url, params=params, json=json_body, headers=headers)
            except httpx.TransportError as exc:
                raise NetworkError(f"{method} {url}: {exc}") from exc
            if resp.status_code != 429:
                break
            wait = _retry_after(resp.headers.get("retry-after"))
            if attempt >= self.config.max_retries or (wait is not None and wait > self.config.max_retry_wait):
                raise RateLimited(f"{method} {url}: rate limited after {attempt + 1} attempts", wait)
            self.sleep(wait if wait is not None else 2.0**attempt)
            attempt += 1
        if resp.status_code == 404:
            raise NotFound(f"{method} {url}: 404")
        if resp.status_code >= 400:
            raise NetworkError(f"{method} {url}: HTTP {resp.status_code}")
        return resp

    def _json(self, resp: httpx.Response) -> Any:
        try:
            return resp.json()
        except ValueError as exc:
            raise MalformedResponse(f"response from {resp.request.url} is not JSON") from exc

    # -- retrieval --

    def fetch_protein(self, gene: str) -> ProteinRecord:
        gene = gene.strip()
        if not gene:
            raise ParameterError("gene symbol must be non-empty")
        query = f"gene_exact:{gene} AND organism_id:{self.config.organism_id}"
        resp = self._send(
            "GET",
            f"{self.config.uniprot_url}/uniprotkb/search",
            params={"query": query, "format": "fasta"},
        )
        entries = parse_fasta(resp.text)
        if not entries:
            raise NotFound(f"no human UniProt entry for gene {gene!r}")
        # reviewed (sp) entries before unreviewed; service order otherwise
        header, seq = min(entries, key=lambda e: not e[0].startswith(">sp|"))
        m = _ACCESSION.match(header)
        if not m:
            raise MalformedResponse(f"FASTA header without an accession: {header[:60]!r}")
        lines = [header] + [seq[i : i + 60] for i in range(0, len(seq), 60)]
        return ProteinRecord(m.group(1), gene, self.config.organism_id, "\n".join(lines) + "\n")

    def fetch_drug_smiles(self, name: str) -> DrugRecord:
        name = name.strip()
        if not name:
            raise ParameterError("drug name must be non-empty")
        data = self._json(self._send("GET", f"{self.config.chembl_url}/molecule/search.json", params={"q": name}))
        try:
            molecules = data["molecules"]
        except (KeyError, TypeError):
            raise MalformedResponse("ChEMBL search response has no 'molecules' list") from None
        hits: dict[str, DrugRecord] = {}
        for m in molecules:
            pref = (m.get("pref_name") or "").strip()
            if pref.lower() != name.lower():
                continue
            structures = m.get("molecule_structures") or {}
            smiles = structures.get("canonical_smiles")
            chembl_id = m.get("molecule_chembl_id")
            if not smiles or not chembl_id:
                raise MalformedResponse(f"ChEMBL hit for {name!r} lacks an id or canonical SMILES")
            hits.setdefault(chembl_id, DrugRecord(pref, smiles, chembl_id))
        if not hits:
            raise NotFound(f"no ChEMBL molecule with preferred name {name!r}")
        if len(hits) > 1:
            raise AmbiguousName(name, sorted(hits.values(), key=lambda r: r.source_db_id))
        record = next(iter(hits.values()))
        try:
            parse(record.smiles)
        except SmilesError as exc:
            raise MalformedResponse(f"ChEMBL SMILES for {name!r} does not parse: {exc}") from exc
        return record

    # -- prediction services --

    def predict_properties(self, smiles: list[str]) -> list[AdmetProfile]:
        """One profile per input SMILES; every schema property must be present."""
        for s in smiles:
            parse(s)
        data = self._json(self._send("POST", self.config.admet_url, json_body={"smiles": list(smiles)}, token_env=self.config.admet_token_env))
        results = data.get("results") if isinstance(data, dict) else None
        if not isinstance(results, list) or len(results) != len(smiles):
            raise SchemaError(f"expected 'results' with {len(smiles)} entries")
        profiles = []
        for i, (s, item) in enumerate(zip(smiles, results)):
            props = item.get("properties") if isinstance(item, dict) else None
            if not isinstance(props, dict):
                raise SchemaError(f"result {i} has no 'properties' object")
            echoed = item.get("smiles")
            if echoed is not None and echoed != s:
                try:
                    same = serialize(parse(echoed)) == serialize(parse(s))
                except SmilesError:
                    same = False
                if not same:
                    raise SchemaError(f"result {i} is for {echoed!r}, expected {s!r}")
            missing = [pid for pid in self.schema.properties if pid not in props]
            if missing:
                raise SchemaError(f"result {i} is missing properties: {', '.join(missing)}")
            try:
                profiles.append(AdmetProfile.from_mapping(props, self.schema))
            except ParameterError as exc:
                raise SchemaError(f"result {i}: {exc}") from exc
        return profiles

    def predict_affinity(self, smiles: str, fasta: str) -> float:
        parse(smiles)
        validate_fasta(fasta)
        data = self._json(self._send(
            "POST", self.config.affinity_url, json_body={"smiles": smiles, "sequence": fasta},
            token_env=self.config.affinity_token_env,
        ))
        raw = data.get("pkd") if isinstance(data, dict) else None
        if raw is None:
            raise SchemaError("affinity response has no 'pkd'")
        try:
            pkd = float(raw)
        except (TypeError, ValueError):
            raise SchemaError(f"affinity 'pkd' is not numeric: {raw!r}") from None
        if isinstance(raw, bool) or not math.isfinite(pkd):
            raise SchemaError(f"affinity 'pkd' is not a finite number: {raw!r}")
        return pkd


def _retry_after(value: str | None) -> float | None:
    if value is None:
        return None
    try:
        return max(0.0, float(value))
    except ValueError:
        return None
