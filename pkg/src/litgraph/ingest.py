"""Citation network expansion from seed papers, with a disk cache.

The metadata source is anything implementing the MetadataFetcher protocol;
the shipped HTTP fetcher speaks the Semantic Scholar Graph API paper shape.
"""

from __future__ import annotations

import json
import logging
import time
from collections import deque
from pathlib import Path
from typing import Protocol

import requests

from .records import CorpusStore, CorpusError, PublicationRecord, TextDocument

logger = logging.getLogger(__name__)


class FetchError(Exception):
    """A metadata or full-text request failed after retries."""


class ConfigurationError(Exception):
    """Invalid expansion parameters (e.g. empty seed list)."""


class MetadataFetcher(Protocol):
    def get_paper(self, pub_id: str) -> PublicationRecord: ...

    def get_fulltext(self, record: PublicationRecord) -> str | None:
        """Return plain text, or None when no full text is available."""
        ...


class RateLimiter:
    """Blocks so that calls happen at most `rate` times per second."""

    def __init__(self, rate: float = 1.0):
        if rate <= 0:
            raise ConfigurationError("rate must be positive")
        self.min_interval = 1.0 / rate
        self._last = 0.0

    def wait(self) -> None:
        now = time.monotonic()
        delta = now - self._last
        if delta < self.min_interval:
            time.sleep(self.min_interval - delta)
        self._last = time.monotonic()


SEMANTIC_SCHOLAR_FIELDS = "title,year,references.paperId,openAccessPdf,s2FieldsOfStudy"


class HttpMetadataFetcher:
    """Fetcher for a Semantic Scholar Graph API compatible paper endpoint."""

    def __init__(self, base_url: str = "https://api.semanticscholar.org/graph/v1/paper",
                 rate: float = 1.0, retries: int = 3, session: requests.Session | None = None):
        self.base_url = base_url.rstrip("/")
        self.limiter = RateLimiter(rate)
        self.retries = retries
        self.session = session or requests.Session()

    def _get(self, url: str, **kwargs):
        backoff = 1.0
        for attempt in range(self.retries + 1):
            self.limiter.wait()
            try:
                resp = self.session.get(url, timeout=30, **kwargs)
                if resp.status_code == 404:
                    raise FetchError(f"not found: {url}")
                if resp.status_code >= 500 or resp.status_code == 429:
                    raise requests.RequestException(f"status {resp.status_code}")
                resp.raise_for_status()
                return resp
            except FetchError:
                raise
            except requests.RequestException as exc:
                if attempt == self.retries:
                    raise FetchError(f"request failed after {self.retries} retries: {exc}") from exc
                time.sleep(backoff)
                backoff *= 2
        raise FetchError(f"unreachable: {url}")

    def get_paper(self, pub_id: str) -> PublicationRecord:
        resp = self._get(f"{self.base_url}/{pub_id}", params={"fields": SEMANTIC_SCHOLAR_FIELDS})
        return parse_paper_response(pub_id, resp.json())

    def get_fulltext(self, record: PublicationRecord) -> str | None:
        if not record.fulltext_url:
            return None
        resp = self._get(record.fulltext_url)
        return resp.text


def parse_paper_response(pub_id: str, obj: dict) -> PublicationRecord:
    """Map the documented JSON shape of the metadata service onto a record."""
    refs = []
    for ref in obj.get("references") or []:
        rid = ref.get("paperId") if isinstance(ref, dict) else ref
        if rid:
            refs.append(rid)
    topics = set()
    for f in obj.get("s2FieldsOfStudy") or []:
        name = f.get("category") if isinstance(f, dict) else f
        if name:
            topics.add(name)
    for t in obj.get("topics") or []:
        name = t.get("topic") if isinstance(t, dict) else t
        if name:
            topics.add(name)
    pdf = obj.get("openAccessPdf") or {}
    return PublicationRecord(
        id=obj.get("paperId") or pub_id,
        title=obj.get("title") or "",
        year=obj.get("year"),
        topics=frozenset(topics),
        references=tuple(refs),
        fulltext_url=pdf.get("url") if isinstance(pdf, dict) else None,
    )


class CachedFetcher:
    """Content-addressed disk cache in front of another fetcher.

    One JSON file per record under <cache>/records/, one text file per
    document under <cache>/texts/. With offline=True, cache misses raise.
    """

    def __init__(self, cache_dir: str | Path, upstream: MetadataFetcher | None = None,
                 offline: bool = False):
        self.cache_dir = Path(cache_dir)
        self.records_dir = self.cache_dir / "records"
        self.texts_dir = self.cache_dir / "texts"
        self.records_dir.mkdir(parents=True, exist_ok=True)
        self.texts_dir.mkdir(parents=True, exist_ok=True)
        self.upstream = upstream
        self.offline = offline

    @staticmethod
    def _safe_name(pub_id: str) -> str:
        return "".join(c if c.isalnum() or c in "-_." else "_" for c in pub_id)

    def get_paper(self, pub_id: str) -> PublicationRecord:
        path = self.records_dir / f"{self._safe_name(pub_id)}.json"
        if path.exists():
            return PublicationRecord.from_json(json.loads(path.read_text(encoding="utf-8")))
        if self.offline or self.upstream is None:
            raise FetchError(f"cache miss for {pub_id} in offline mode")
        record = self.upstream.get_paper(pub_id)
        path.write_text(json.dumps(record.to_json(), ensure_ascii=False), encoding="utf-8")
        return record

    def get_fulltext(self, record: PublicationRecord) -> str | None:
        path = self.texts_dir / f"{self._safe_name(record.id)}.txt"
        if path.exists():
            return path.read_text(encoding="utf-8")
        if record.fulltext_url is None:
            return None
        if self.offline or self.upstream is None:
            raise FetchError(f"cache miss for full text of {record.id} in offline mode")
        text = self.upstream.get_fulltext(record)
        if text is not None:
            path.write_text(text, encoding="utf-8")
        return text


def expand_citation_network(seeds: list[str], depth: int,
                            fetcher: MetadataFetcher) -> CorpusStore:
    """BFS over reference lists, up to `depth` levels below the seeds.

    Each record's depth is the minimum distance from any seed; seed status
    wins ties at depth 0. A metadata failure for a seed is fatal; for a
    non-seed the node is kept as a stub with empty references.
    """
    if not seeds:
        raise ConfigurationError("seed list must not be empty")
    if depth < 0:
        raise ConfigurationError("depth must be >= 0")

    store = CorpusStore()
    seed_set = set(seeds)
    queue: deque[tuple[str, int]] = deque((s, 0) for s in dict.fromkeys(seeds))
    seen: dict[str, int] = {s: 0 for s in dict.fromkeys(seeds)}

    while queue:
        pub_id, d = queue.popleft()
        if pub_id in store.records:
            continue
        try:
            record = fetcher.get_paper(pub_id)
        except FetchError as exc:
            if pub_id in seed_set:
                raise FetchError(f"seed {pub_id} could not be fetched: {exc}") from exc
            logger.warning("keeping stub for %s: %s", pub_id, exc)
            store.add_record(PublicationRecord(id=pub_id, depth=d))
            store.log_fetch(pub_id, "error")
            continue
        record.depth = d
        record.is_seed = pub_id in seed_set
        store.add_record(record)
        if d < depth:
            for ref in record.references:
                nd = d + 1
                if ref not in seen or nd < seen[ref]:
                    seen[ref] = nd
                    queue.append((ref, nd))
    return store


def fetch_fulltext(store: CorpusStore, record: PublicationRecord,
                   fetcher: MetadataFetcher) -> TextDocument | None:
    """Retrieve and cache one document's full text; returns None when unavailable."""
    if record.id not in store.records:
        raise CorpusError(f"record {record.id} not in store")
    if record.fulltext_url is None:
        store.log_fetch(record.id, "unavailable")
        return None
    try:
        text = fetcher.get_fulltext(record)
    except FetchError as exc:
        logger.warning("full text fetch failed for %s: %s", record.id, exc)
        store.log_fetch(record.id, "error")
        return None
    if not text:
        store.log_fetch(record.id, "unavailable")
        return None
    doc = TextDocument(publication_id=record.id, text=text, source="retrieved")
    store.add_document(doc)
    store.log_fetch(record.id, "ok")
    return doc


def fetch_all_fulltexts(store: CorpusStore, fetcher: MetadataFetcher) -> int:
    """Fetch full texts for every record that does not already have one."""
    fetched = 0
    for pub_id in sorted(store.records):
        if pub_id in store.documents:
            continue
        if fetch_fulltext(store, store.records[pub_id], fetcher) is not None:
            fetched += 1
    return fetched


def undated_report(store: CorpusStore) -> list[str]:
    """Ids of records lacking a year; these are kept but excluded from temporal analyses."""
    return sorted(pid for pid, rec in store.records.items() if rec.year is None)
