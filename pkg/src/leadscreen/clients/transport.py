"""Record/replay transports for httpx.

A fixture is one JSON file per request, named by the request key: the sha256
of the method, the normalised URL and the canonical body. Replay never opens a
socket; a request without a fixture raises :class:`FixtureMissing`.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

import httpx

from leadscreen.errors import FixtureMissing

_DEFAULT_PORTS = {"http": 80, "https": 443}
_KEPT_HEADERS = ("content-type", "retry-after")


def normalize_url(url: str) -> str:
    parts = urlsplit(str(url))
    scheme = parts.scheme.lower()
    host = (parts.hostname or "").lower()
    if parts.port and parts.port != _DEFAULT_PORTS.get(scheme):
        host = f"{host}:{parts.port}"
    query = urlencode(sorted(parse_qsl(parts.query, keep_blank_values=True)))
    return urlunsplit((scheme, host, parts.path or "/", query, ""))


def canonical_body(body: bytes) -> str:
    if not body:
        return ""
    text = body.decode("utf-8", errors="replace")
    try:
        return json.dumps(json.loads(text), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    except ValueError:
        return text


def request_key(method: str, url: str, body: bytes = b"") -> str:
    material = "\n".join((method.upper(), normalize_url(url), canonical_body(body)))
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def _key_of(request: httpx.Request) -> str:
    return request_key(request.method, str(request.url), request.read())


class ReplayTransport(httpx.BaseTransport):
    def __init__(self, fixtures: str | Path) -> None:
        self.fixtures = Path(fixtures)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        key = _key_of(request)
        path = self.fixtures / f"{key}.json"
        if not path.is_file():
            raise FixtureMissing(
                f"no fixture for {request.method} {normalize_url(str(request.url))} (key {key}) in {self.fixtures}"
            )
        data = json.loads(path.read_text(encoding="utf-8"))
        resp = data["response"]
        return httpx.Response(
            status_code=resp["status"],
            headers=resp.get("headers", {}),
            content=resp["body"].encode("utf-8"),
            request=request,
        )


class RecordingTransport(httpx.BaseTransport):
    """Forwards to ``inner`` and writes every exchange as a fixture."""

    def __init__(self, fixtures: str | Path, inner: httpx.BaseTransport | None = None, note: str | None = None) -> None:
        self.fixtures = Path(fixtures)
        self.inner = inner or httpx.HTTPTransport()
        self.note = note

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        body = request.read()
        response = self.inner.handle_request(request)
        content = response.read()
        self.fixtures.mkdir(parents=True, exist_ok=True)
        record = {
            "request": {
                "method": request.method,
                "url": normalize_url(str(request.url)),
                "body": canonical_body(body),
            },
            "response": {
                "status": response.status_code,
                "headers": {k: response.headers[k] for k in _KEPT_HEADERS if k in response.headers},
                "body": content.decode("utf-8"),
            },
        }
        if self.note:
            record["note"] = self.note
        path = self.fixtures / f"{request_key(request.method, str(request.url), body)}.json"
        path.write_text(json.dumps(record, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
        return httpx.Response(
            status_code=response.status_code,
            headers=response.headers,
            content=content,
            request=request,
        )
