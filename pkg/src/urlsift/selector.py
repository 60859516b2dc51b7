"""Down-selection of URL streams: benign URLs are rejected, malicious ones forwarded.

Any per-URL failure fails open: the URL is forwarded for deeper analysis
with an ``error`` flag instead of being dropped.
"""

from __future__ import annotations

import json
import logging
import multiprocessing
from dataclasses import dataclass
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import BinaryIO, Iterator, Optional, TextIO

from .errors import DataError, UrlsiftError
from .features import Featurizer
from .forest import ForestModel
from .parsing import MAX_URL_BYTES

log = logging.getLogger(__name__)

BENIGN = "benign"
MALICIOUS = "malicious"
REJECT = "reject"
FORWARD = "forward"

MAX_REQUEST_BYTES = 16 * 1024 * 1024


@dataclass(frozen=True)
class Verdict:
    url: str
    verdict: str
    score: Optional[float]
    action: str
    error: Optional[str] = None

    def to_dict(self) -> dict:
        out = {"url": self.url, "verdict": self.verdict, "score": self.score, "action": self.action}
        if self.error is not None:
            out["error"] = self.error
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _fail_open(url: str, error: str) -> Verdict:
    return Verdict(url=url, verdict=MALICIOUS, score=None, action=FORWARD, error=error)


class Selector:
    """Shared, read-only scorer; safe to call from many threads."""

    def __init__(self, model: ForestModel, featurizer: Featurizer, threshold: float = 0.5, model_digest: str = ""):
        self.model = model
        self.featurizer = featurizer
        self.threshold = threshold
        self.model_digest = model_digest

    def classify(self, url: str) -> Verdict:
        try:
            score = self.model.predict_score(self.featurizer.values(url))
        except UrlsiftError as exc:
            return _fail_open(url, type(exc).__name__)
        except Exception as exc:  # fail open on anything unexpected too
            log.exception("scoring failed for %r", url[:200])
            return _fail_open(url, type(exc).__name__)
        if score >= self.threshold:
            return Verdict(url, MALICIOUS, score, FORWARD)
        return Verdict(url, BENIGN, score, REJECT)

    def classify_line(self, line: "Line") -> Verdict:
        if line.oversized:
            return _fail_open(line.text, "InputTooLong")
        return self.classify(line.text)


@dataclass(frozen=True)
class Line:
    text: str
    oversized: bool = False


def read_lines(stream: BinaryIO, limit: int = MAX_URL_BYTES) -> Iterator[Line]:
    """Yield one Line per input line without buffering more than ``limit + 2`` bytes.

    An oversized line keeps its first ``limit`` bytes; the rest is skipped.
    """
    while True:
        chunk = stream.readline(limit + 2)
        if not chunk:
            return
        if chunk.endswith(b"\n"):
            body = chunk[:-1]
            if body.endswith(b"\r"):
                body = body[:-1]
        elif len(chunk) < limit + 2:
            body = chunk
        else:
            body = chunk
            while True:
                rest = stream.readline(limit + 2)
                if not rest or rest.endswith(b"\n"):
                    break
        oversized = len(body) > limit
        yield Line(body[:limit].decode("utf-8", "surrogateescape"), oversized)


def run_stream(selector: Selector, inp: BinaryIO, out: TextIO, workers: int = 1) -> int:
    """Write one JSON verdict per input line, in input order. Returns the line count."""
    count = 0
    if workers <= 1:
        for line in read_lines(inp):
            out.write(selector.classify_line(line).to_json() + "\n")
            count += 1
        out.flush()
        return count

    with multiprocessing.get_context("fork").Pool(workers, initializer=_init_worker, initargs=(selector,)) as pool:
        for text in pool.imap(_worker_classify, read_lines(inp), chunksize=64):
            out.write(text + "\n")
            count += 1
    out.flush()
    return count


_WORKER_SELECTOR: Optional[Selector] = None


def _init_worker(selector: Selector) -> None:
    global _WORKER_SELECTOR
    _WORKER_SELECTOR = selector


def _worker_classify(line: Line) -> str:
    return _WORKER_SELECTOR.classify_line(line).to_json()


def parse_request(body: bytes) -> list[str]:
    """Accept ``{"url": str}`` or ``{"urls": [str, ...]}``."""
    try:
        doc = json.loads(body)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataError("request body must be a JSON object")
    if "urls" in doc:
        urls = doc["urls"]
        if not isinstance(urls, list) or not all(isinstance(u, str) for u in urls):
            raise DataError("'urls' must be a list of strings")
        return urls
    if "url" in doc:
        if not isinstance(doc["url"], str):
            raise DataError("'url' must be a string")
        return [doc["url"]]
    raise DataError("request needs 'url' or 'urls'")


class _Handler(BaseHTTPRequestHandler):
    selector: Selector
    protocol_version = "HTTP/1.1"

    def _send(self, status: int, payload: dict) -> None:
        body = (json.dumps(payload, sort_keys=True) + "\n").encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path.rstrip("/") == "/health":
            s = self.selector
            self._send(
                HTTPStatus.OK,
                {
                    "status": "ok",
                    "model_digest": s.model_digest,
                    "format_version": s.model.format_version,
                    "feature_count": s.model.feature_count,
                    "threshold": s.threshold,
                },
            )
        else:
            self._send(HTTPStatus.NOT_FOUND, {"error": "not found"})

    def do_POST(self):
        if self.path.rstrip("/") != "/classify":
            self._send(HTTPStatus.NOT_FOUND, {"error": "not found"})
            return
        try:
            length = int(self.headers.get("Content-Length", ""))
        except ValueError:
            self._send(HTTPStatus.LENGTH_REQUIRED, {"error": "Content-Length required"})
            return
        if length < 0 or length > MAX_REQUEST_BYTES:
            self.close_connection = True
            self._send(HTTPStatus.REQUEST_ENTITY_TOO_LARGE, {"error": "request too large"})
            return
        body = self.rfile.read(length)
        try:
            urls = parse_request(body)
        except DataError as exc:
            self._send(HTTPStatus.BAD_REQUEST, {"error": str(exc)})
            return
        verdicts = [self.selector.classify(u).to_dict() for u in urls]
        self._send(HTTPStatus.OK, {"verdicts": verdicts})

    def log_message(self, fmt, *args):
        log.debug("%s - " + fmt, self.address_string(), *args)


def make_server(selector: Selector, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    handler = type("SelectorHandler", (_Handler,), {"selector": selector})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server
