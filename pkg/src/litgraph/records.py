"""Core corpus records: publications, full texts, and the on-disk store."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path


class CorpusError(Exception):
    """Raised for invalid corpus contents or manifest I/O problems."""


@dataclass
class PublicationRecord:
    id: str
    title: str = ""
    year: int | None = None
    topics: frozenset[str] = frozenset()
    references: tuple[str, ...] = ()
    fulltext_url: str | None = None
    is_seed: bool = False
    depth: int = 0

    def __post_init__(self):
        if not self.id:
            raise CorpusError("publication id must be non-empty")
        self.topics = frozenset(self.topics)
        refs = []
        for ref in self.references:
            if ref != self.id and ref not in refs:
                refs.append(ref)
        self.references = tuple(refs)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "year": self.year,
            "topics": sorted(self.topics),
            "references": list(self.references),
            "fulltext_url": self.fulltext_url,
            "is_seed": self.is_seed,
            "depth": self.depth,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PublicationRecord":
        return cls(
            id=obj["id"],
            title=obj.get("title", ""),
            year=obj.get("year"),
            topics=frozenset(obj.get("topics", [])),
            references=tuple(obj.get("references", [])),
            fulltext_url=obj.get("fulltext_url"),
            is_seed=obj.get("is_seed", False),
            depth=obj.get("depth", 0),
        )


@dataclass
class TextDocument:
    publication_id: str
    text: str
    source: str = "retrieved"  # retrieved | supplied

    def __post_init__(self):
        if self.source == "retrieved" and not self.text:
            raise CorpusError(
                f"retrieved document for {self.publication_id} has empty text"
            )

    @property
    def char_count(self) -> int:
        return len(self.text)


FETCH_OUTCOMES = ("ok", "unavailable", "error")


@dataclass
class CorpusStore:
    records: dict[str, PublicationRecord] = field(default_factory=dict)
    documents: dict[str, TextDocument] = field(default_factory=dict)
    fetch_log: list[tuple[str, str, float]] = field(default_factory=list)

    def add_record(self, record: PublicationRecord) -> None:
        self.records[record.id] = record

    def add_document(self, doc: TextDocument) -> None:
        if doc.publication_id not in self.records:
            raise CorpusError(f"document for unknown publication {doc.publication_id}")
        self.documents[doc.publication_id] = doc

    def log_fetch(self, pub_id: str, outcome: str, timestamp: float | None = None) -> None:
        if outcome not in FETCH_OUTCOMES:
            raise CorpusError(f"invalid fetch outcome {outcome!r}")
        self.fetch_log.append((pub_id, outcome, timestamp if timestamp is not None else time.time()))

    def __len__(self) -> int:
        return len(self.records)

    def same_contents(self, other: "CorpusStore") -> bool:
        """Equality over records and documents; the fetch log is an audit trail."""
        if set(self.records) != set(other.records):
            return False
        for pid, rec in self.records.items():
            if rec != other.records[pid]:
                return False
        if set(self.documents) != set(other.documents):
            return False
        for pid, doc in self.documents.items():
            if doc != other.documents[pid]:
                return False
        return True


def export_corpus(store: CorpusStore, path: str | Path) -> Path:
    """Write the store as newline-delimited JSON, one record (plus its text) per line."""
    if not store.records:
        raise CorpusError("refusing to export an empty store")
    path = Path(path)
    log_by_id: dict[str, list] = {}
    for pub_id, outcome, ts in store.fetch_log:
        log_by_id.setdefault(pub_id, []).append([outcome, ts])
    with path.open("w", encoding="utf-8") as fh:
        for pub_id in sorted(store.records):
            rec = store.records[pub_id]
            line = rec.to_json()
            doc = store.documents.get(pub_id)
            if doc is not None:
                line["text"] = doc.text
                line["text_source"] = doc.source
            if pub_id in log_by_id:
                line["fetch_log"] = log_by_id[pub_id]
            fh.write(json.dumps(line, ensure_ascii=False, sort_keys=True) + "\n")
    return path


def load_corpus(path: str | Path) -> CorpusStore:
    """Inverse of export_corpus."""
    store = CorpusStore()
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"manifest not found: {path}")
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"malformed manifest line {lineno}: {exc}") from exc
            store.add_record(PublicationRecord.from_json(obj))
            if "text" in obj:
                store.add_document(
                    TextDocument(
                        publication_id=obj["id"],
                        text=obj["text"],
                        source=obj.get("text_source", "retrieved"),
                    )
                )
            for outcome, ts in obj.get("fetch_log", []):
                store.log_fetch(obj["id"], outcome, ts)
    if not store.records:
        raise CorpusError(f"manifest {path} contains no records")
    return store
