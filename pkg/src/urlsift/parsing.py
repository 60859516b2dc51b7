"""URL decomposition and public-suffix host splitting.

Parsing never touches the network and never percent-decodes: every component
is a raw substring of the input, except ``host`` which is lowercased.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .errors import EmptyInput, InputTooLong

MAX_URL_BYTES = 64 * 1024

_SCHEME_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*://")
_AUTHORITY_END = re.compile(r"[/?#]")


@dataclass(frozen=True, slots=True)
class UrlParts:
    raw: str
    scheme: str = ""
    userinfo: str = ""
    host: str = ""
    port: Optional[int] = None
    path: str = ""
    params: str = ""
    query: str = ""
    fragment: str = ""
    # Raw authority text (host case preserved) and the separators seen, so
    # that reassemble() can reproduce ``raw`` exactly.
    authority: str = ""
    authority_sep: str = ""
    has_params: bool = False
    has_query: bool = False
    has_fragment: bool = False

    def reassemble(self) -> str:
        out = [self.scheme, self.authority_sep, self.authority, self.path]
        if self.has_params:
            out.append(";" + self.params)
        if self.has_query:
            out.append("?" + self.query)
        if self.has_fragment:
            out.append("#" + self.fragment)
        return "".join(out)


@dataclass(frozen=True, slots=True)
class HostSplit:
    subdomain: str = ""
    primary_domain: str = ""
    public_suffix: str = ""
    is_ip: bool = False


def _split_authority(authority: str) -> tuple[str, str, Optional[int]]:
    userinfo, at, hostport = authority.rpartition("@")
    if not at:
        userinfo = ""
    port = None
    host = hostport
    if hostport.startswith("["):
        close = hostport.find("]")
        if close != -1:
            host, tail = hostport[: close + 1], hostport[close + 1 :]
            if tail.startswith(":") and _is_port(tail[1:]):
                port = int(tail[1:])
            elif tail:
                host = hostport
    else:
        name, colon, port_text = hostport.rpartition(":")
        if colon and _is_port(port_text):
            host, port = name, int(port_text)
        elif colon and not port_text:
            host = name
    return userinfo, host.lower(), port


def _is_port(text: str) -> bool:
    return 0 < len(text) <= 5 and text.isascii() and text.isdigit() and int(text) <= 65535


def parse_url(raw: str) -> UrlParts:
    """Decompose ``raw`` into components.

    Strings with a ``scheme://`` prefix are split RFC 3986 style. Without a
    scheme, a leading ``//`` still introduces an authority, a leading ``/``
    means path-only, and anything else is read as ``host[/path...]`` (so a
    bare ``example.com`` is host-only).
    """
    if not raw:
        raise EmptyInput("empty URL")
    if len(raw) > MAX_URL_BYTES or len(raw.encode("utf-8", "surrogatepass")) > MAX_URL_BYTES:
        raise InputTooLong(f"URL exceeds {MAX_URL_BYTES} bytes")

    scheme = ""
    authority_sep = ""
    m = _SCHEME_RE.match(raw)
    if m:
        scheme = raw[: m.end() - 3]
        authority_sep = "://"
        rest = raw[m.end() :]
    elif raw.startswith("//"):
        authority_sep = "//"
        rest = raw[2:]
    else:
        rest = raw

    if rest.startswith("/") and not authority_sep:
        authority = ""
    else:
        end = _AUTHORITY_END.search(rest)
        cut = end.start() if end else len(rest)
        authority, rest = rest[:cut], rest[cut:]

    rest, has_fragment, fragment = rest.partition("#")
    rest, has_query, query = rest.partition("?")
    path = rest
    params = ""
    has_params = False
    last_slash = path.rfind("/")
    semi = path.find(";", last_slash + 1)
    if semi != -1:
        path, params, has_params = path[:semi], path[semi + 1 :], True

    userinfo, host, port = _split_authority(authority)
    return UrlParts(
        raw=raw,
        scheme=scheme,
        userinfo=userinfo,
        host=host,
        port=port,
        path=path,
        params=params,
        query=query,
        fragment=fragment,
        authority=authority,
        authority_sep=authority_sep,
        has_params=has_params,
        has_query=bool(has_query),
        has_fragment=bool(has_fragment),
    )


class SuffixList:
    """An immutable set of public suffixes with a content digest."""

    def __init__(self, suffixes: Iterable[str], name: str = "<memory>"):
        self.suffixes = frozenset(s.strip().lower() for s in suffixes if s.strip())
        self.name = name
        self.digest = list_digest(self.suffixes)

    def __contains__(self, suffix: str) -> bool:
        return suffix in self.suffixes

    def __len__(self) -> int:
        return len(self.suffixes)

    @classmethod
    def from_file(cls, path) -> "SuffixList":
        return cls(read_list_file(path), name=str(path))

    @classmethod
    def default(cls) -> "SuffixList":
        return _default_suffix_list()


_DEFAULT_SUFFIXES: Optional[SuffixList] = None


def _default_suffix_list() -> SuffixList:
    global _DEFAULT_SUFFIXES
    if _DEFAULT_SUFFIXES is None:
        _DEFAULT_SUFFIXES = SuffixList(read_list_file(data_path("public_suffixes.txt")), name="builtin")
    return _DEFAULT_SUFFIXES


def data_path(name: str) -> Path:
    return Path(str(resources.files("urlsift") / "data" / name))


def read_list_file(path) -> list[str]:
    """Read a newline-delimited list, skipping blanks and ``#`` comments."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip().lower()
            if line:
                entries.append(line)
    return entries


def list_digest(entries: Iterable[str]) -> str:
    """SHA-256 over the sorted, deduplicated entries joined by newlines."""
    canon = "\n".join(sorted(set(entries))) + "\n"
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def is_ipv4(host: str) -> bool:
    labels = host.split(".")
    if len(labels) != 4:
        return False
    for label in labels:
        if not (0 < len(label) <= 3 and label.isascii() and label.isdigit()):
            return False
        if int(label) > 255:
            return False
    return True


def split_host(host: str, suffix_list: Optional[SuffixList] = None) -> HostSplit:
    """Split a lowercased host into subdomain, primary domain and suffix.

    The longest listed suffix that still leaves at least one label to its
    left wins. With no listed suffix, the last label becomes the primary
    domain and the suffix stays empty.
    """
    if not host:
        return HostSplit()
    if (host.startswith("[") and host.endswith("]")) or is_ipv4(host):
        return HostSplit(is_ip=True)
    if suffix_list is None:
        suffix_list = _default_suffix_list()

    labels = host.split(".")
    n = len(labels)
    cut = n
    for i in range(1, n):
        if ".".join(labels[i:]) in suffix_list:
            cut = i
            break
    if cut == n:
        return HostSplit(subdomain=".".join(labels[:-1]), primary_domain=labels[-1])
    return HostSplit(
        subdomain=".".join(labels[: cut - 1]),
        primary_domain=labels[cut - 1],
        public_suffix=".".join(labels[cut:]),
    )
