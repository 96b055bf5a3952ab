"""Search backends that fetch context snippets for a question.

Two backends share one contract: a deterministic local-corpus backend so the
forge runs offline and reproducibly, and a thin HTTP backend whose responses
are always written through a persistent file cache before being returned.
The cache key is (backend name, query, k); one JSON file per key.
"""

from __future__ import annotations

import hashlib
import json
import os
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .errors import RetrievalError, ValidationError

SNIPPET_MAX_CHARS = 300

# Character blocks tokenized one character per term (CJK ideographs and kana).
_CJK_RANGES = (
    (0x3040, 0x30FF),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
)


@dataclass
class Snippet:
    """One retrieved result-page snippet."""

    text: str
    rank: int
    source_id: str

    def to_dict(self) -> dict:
        return {"text": self.text, "rank": self.rank, "source_id": self.source_id}

    @classmethod
    def from_dict(cls, d: dict) -> "Snippet":
        return cls(text=d["text"], rank=int(d["rank"]), source_id=d["source_id"])


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def query_terms(query: str) -> list[str]:
    """Distinct query terms, in first-seen order.

    CJK characters are individual terms; runs of other characters split on
    whitespace.
    """
    terms: list[str] = []
    buf: list[str] = []

    def flush() -> None:
        if buf:
            terms.append("".join(buf))
            buf.clear()

    for ch in query:
        if _is_cjk(ch):
            flush()
            terms.append(ch)
        elif ch.isspace():
            flush()
        else:
            buf.append(ch)
    flush()
    return list(dict.fromkeys(terms))


def _snippet_window(doc: str, pos: int, term_len: int) -> str:
    center = pos + term_len // 2
    start = max(0, center - SNIPPET_MAX_CHARS // 2)
    end = min(len(doc), start + SNIPPET_MAX_CHARS)
    start = max(0, end - SNIPPET_MAX_CHARS)
    return doc[start:end]


def local_rank(corpus: Sequence[str], query: str, k: int) -> list[Snippet]:
    """Deterministic term-overlap ranking over an in-memory document list.

    score(doc) = number of distinct query terms occurring in the document as
    substrings; ties break toward the lower document index; only documents
    with score > 0 are returned.  The snippet text is a window of at most
    300 characters centered on the earliest matched term occurrence.
    """
    if len(corpus) == 0:
        raise ValidationError("local corpus must be non-empty")
    terms = query_terms(query)
    scored: list[tuple[int, int]] = []  # (-score, index), sorted stably
    matches: dict[int, tuple[int, int]] = {}
    for idx, doc in enumerate(corpus):
        score = 0
        best_pos = None
        best_len = 0
        for term in terms:
            pos = doc.find(term)
            if pos >= 0:
                score += 1
                if best_pos is None or pos < best_pos:
                    best_pos, best_len = pos, len(term)
        if score > 0:
            scored.append((-score, idx))
            matches[idx] = (best_pos, best_len)
    scored.sort()
    out: list[Snippet] = []
    for rank, (_, idx) in enumerate(scored[:k]):
        pos, term_len = matches[idx]
        out.append(
            Snippet(
                text=_snippet_window(corpus[idx], pos, term_len),
                rank=rank,
                source_id=str(idx),
            )
        )
    return out


class SearchBackend:
    """Behavioral contract shared by all backends.

    ``live`` backends need not be deterministic but must be cacheable; their
    results are persisted by :func:`search` before being returned.
    """

    name: str = "abstract"
    live: bool = False
    max_results: int = 10

    def fetch(self, query: str, k: int) -> list[Snippet]:
        raise NotImplementedError


class LocalBackend(SearchBackend):
    """Pure function of (corpus, query, k); thread-safe."""

    live = False

    def __init__(self, corpus: Sequence[str], name: str = "local", max_results: int = 10):
        self.corpus = list(corpus)
        self.name = name
        self.max_results = max_results

    def fetch(self, query: str, k: int) -> list[Snippet]:
        return local_rank(self.corpus, query, k)


def _default_fetcher(url: str) -> object:
    import requests

    resp = requests.get(url, timeout=10)
    resp.raise_for_status()
    return resp.json()


def _dig(payload: object, path: str) -> object:
    node = payload
    for part in path.split("."):
        if not part:
            continue
        if isinstance(node, dict) and part in node:
            node = node[part]
        else:
            raise RetrievalError(f"results path {path!r} not found in response")
    return node


class HttpBackend(SearchBackend):
    """Configurable JSON-over-HTTP backend.

    ``endpoint`` is a URL template with a ``{query}`` placeholder (the query
    is URL-encoded).  ``results_path`` is a dot path selecting the result list
    in the response body; ``text_field`` and ``id_field`` select snippet text
    and source id per item.  A custom ``fetcher(url) -> parsed JSON`` can be
    injected, which also makes the backend testable offline.
    """

    live = True

    def __init__(
        self,
        endpoint: str,
        name: str = "http",
        results_path: str = "results",
        text_field: str = "snippet",
        id_field: str = "url",
        max_results: int = 10,
        fetcher: Callable[[str], object] | None = None,
    ):
        self.endpoint = endpoint
        self.name = name
        self.results_path = results_path
        self.text_field = text_field
        self.id_field = id_field
        self.max_results = max_results
        self._fetcher = fetcher or _default_fetcher

    def fetch(self, query: str, k: int) -> list[Snippet]:
        url = self.endpoint.format(query=urllib.parse.quote(query))
        try:
            payload = self._fetcher(url)
        except Exception as e:
            raise RetrievalError(f"backend {self.name!r} unreachable: {e}") from e
        items = _dig(payload, self.results_path)
        if not isinstance(items, list):
            raise RetrievalError(f"results path {self.results_path!r} is not a list")
        out: list[Snippet] = []
        for item in items[:k]:
            text = str(item.get(self.text_field, ""))
            if not text:
                continue
            out.append(
                Snippet(text=text, rank=len(out), source_id=str(item.get(self.id_field, "")))
            )
        return out


class SnippetCache:
    """One JSON file per (backend name, query, k) under a cache directory.

    Concurrent readers are safe; writes go through a same-directory temp file
    and an atomic rename.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(backend_name: str, query: str, k: int) -> str:
        payload = json.dumps([backend_name, query, k], ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def _path(self, backend_name: str, query: str, k: int) -> Path:
        return self.directory / f"{self.key(backend_name, query, k)}.json"

    def get(self, backend_name: str, query: str, k: int) -> list[Snippet] | None:
        path = self._path(backend_name, query, k)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as f:
            return [Snippet.from_dict(d) for d in json.load(f)]

    def put(self, backend_name: str, query: str, k: int, snippets: Sequence[Snippet]) -> None:
        path = self._path(backend_name, query, k)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as f:
            json.dump([s.to_dict() for s in snippets], f, ensure_ascii=False)
        os.replace(tmp, path)


def search(
    backend: SearchBackend,
    query: str,
    k: int,
    cache: SnippetCache | None = None,
) -> list[Snippet]:
    """Fetch at most k snippets for a query, ranks renumbered 0..n-1.

    Live backends are read through and written through ``cache`` when one is
    given; an unreachable live backend with a cache miss raises a
    RetrievalError carrying the query.  An empty result set is not an error.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if not query:
        raise ValidationError("query must be non-empty")
    if cache is not None and backend.live:
        hit = cache.get(backend.name, query, k)
        if hit is not None:
            return hit
    try:
        results = backend.fetch(query, k)[:k]
    except RetrievalError as e:
        raise RetrievalError(f"{e} (query={query!r})") from e
    results = [
        Snippet(text=s.text, rank=i, source_id=s.source_id)
        for i, s in enumerate(results)
    ]
    if cache is not None and backend.live:
        cache.put(backend.name, query, k, results)
    return results
