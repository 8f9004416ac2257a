"""Mock REST backend: route curl commands to canned responses.

Instead of spawning a shell, the curl line is tokenized and looked up in a
route table keyed by method, host+path, query multiset and body. A request
with no route is what a non-zero curl exit would be: non-executable.
"""

from __future__ import annotations

import json
import shlex
from dataclasses import dataclass
from typing import Iterable, Mapping
from urllib.parse import parse_qsl, urlsplit

from ..core import CompareMode, ErrorCategory, EvalOutcome, TestCase

# curl options that consume the following token
_VALUE_FLAGS = {
    "-H", "--header", "-o", "--output", "-u", "--user", "-A", "--user-agent",
    "-e", "--referer", "-b", "--cookie", "-m", "--max-time", "--connect-timeout",
    "-x", "--proxy", "-w", "--write-out", "-F", "--form",
}
_DATA_FLAGS = {"-d", "--data", "--data-raw", "--data-binary", "--data-ascii", "--json"}
_METHOD_FLAGS = {"-X", "--request"}


@dataclass(frozen=True)
class CurlRequest:
    method: str
    host: str
    path: str
    query: tuple[tuple[str, str], ...]
    body: str | None

    def route_key(self) -> tuple:
        return (self.method, self.host, self.path, tuple(sorted(self.query)), _canonical_body(self.body))


def _canonical_body(body: str | None) -> str | None:
    if body is None:
        return None
    try:
        return json.dumps(json.loads(body), sort_keys=True, separators=(",", ":"))
    except ValueError:
        return body


def parse_curl(line: str) -> CurlRequest:
    """Parse a curl command line; ValueError if it is not a usable request."""
    try:
        argv = shlex.split(line)
    except ValueError as exc:
        raise ValueError(f"cannot tokenize curl command: {exc}") from None
    if not argv or argv[0] != "curl":
        raise ValueError("not a curl command")
    method = None
    url = None
    data: list[str] = []
    get_mode = False
    it = iter(argv[1:])
    for tok in it:
        if tok in _METHOD_FLAGS:
            method = next(it, None)
            if method is None:
                raise ValueError(f"{tok} needs a value")
        elif tok in _DATA_FLAGS:
            value = next(it, None)
            if value is None:
                raise ValueError(f"{tok} needs a value")
            data.append(value)
        elif tok == "--url":
            url = next(it, None)
        elif tok in ("-G", "--get"):
            get_mode = True
        elif tok in _VALUE_FLAGS:
            if next(it, None) is None:
                raise ValueError(f"{tok} needs a value")
        elif tok.startswith("-X") and len(tok) > 2:
            method = tok[2:]
        elif tok.startswith("-"):
            continue  # boolean switch such as -s, -L, -i
        elif url is None:
            url = tok
        else:
            raise ValueError(f"unexpected argument {tok!r}")
    if url is None:
        raise ValueError("no URL")
    parts = urlsplit(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise ValueError(f"bad URL {url!r}")
    query = parse_qsl(parts.query, keep_blank_values=True)
    body = "&".join(data) if data else None
    if get_mode and body is not None:
        query += parse_qsl(body, keep_blank_values=True)
        body = None
    if method is None:
        # curl sends POST when data is attached
        method = "POST" if body is not None else "GET"
    return CurlRequest(method.upper(), parts.netloc.lower(), parts.path or "/", tuple(query), body)


def substitute(text: str, substitutions: Mapping[str, str]) -> str:
    for placeholder, value in substitutions.items():
        text = text.replace(placeholder, value)
    return text


class RouteTable:
    """Immutable mapping from request keys to canned response bodies."""

    def __init__(self, routes: Iterable[tuple[str, str]], substitutions: Mapping[str, str] | None = None):
        """``routes`` holds (curl command, response) pairs."""
        self.substitutions = dict(substitutions or {})
        table: dict[tuple, str] = {}
        for curl, response in routes:
            key = parse_curl(substitute(curl, self.substitutions)).route_key()
            if key in table and table[key] != response:
                raise ValueError(f"conflicting responses for route {curl!r}")
            table[key] = response
        self._table = table

    @classmethod
    def from_json(cls, obj: Mapping) -> RouteTable:
        routes = [(r["request"], r["response"]) for r in obj.get("routes", [])]
        subs = dict(obj.get("substitutions", {}))
        if "api_key" in obj:
            subs.setdefault("{API_KEY}", obj["api_key"])
        return cls(routes, subs)

    def __len__(self) -> int:
        return len(self._table)

    def send(self, curl_line: str) -> str | None:
        """Response body, or None when the request does not route."""
        try:
            req = parse_curl(curl_line)
        except ValueError:
            return None
        return self._table.get(req.route_key())


def execute_rest(curl_line: str | None, test: TestCase, routes: RouteTable) -> EvalOutcome:
    """Route the generated curl line and compare with the ground truth's response.

    Verbatim tests skip execution and compare the command text itself.
    """
    if curl_line is None:
        return EvalOutcome(test.id, metrics={"executability": 0.0}, detail="no curl line")
    gold = substitute(test.gold_programs[0].raw_text.strip(), routes.substitutions)
    if test.compare_mode is CompareMode.VERBATIM:
        same = curl_line.strip() == gold
        try:
            parse_curl(curl_line)
            executable = True
        except ValueError:
            executable = False
        return EvalOutcome(
            test.id,
            executable=executable,
            success=same,
            metrics={"executability": 1.0 if executable else 0.0},
            category=ErrorCategory.NONE if same else ErrorCategory.WRONG_ARGUMENTS,
            detail="" if same else "differs from ground truth",
        )
    response = routes.send(curl_line)
    if response is None:
        return EvalOutcome(test.id, metrics={"executability": 0.0}, detail="request did not route")
    expected = test.oracle_response
    if expected is None:
        expected = routes.send(gold)
    success = expected is not None and response.encode() == expected.encode()
    return EvalOutcome(
        test.id,
        executable=True,
        success=success,
        metrics={"executability": 1.0},
        category=ErrorCategory.NONE if success else ErrorCategory.WRONG_ARGUMENTS,
        detail="" if success else "response differs",
    )
