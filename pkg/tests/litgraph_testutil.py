from pathlib import Path

from litgraph.ingest import FetchError
from litgraph.records import PublicationRecord

FIXTURES = Path(__file__).parent / "fixtures"


class FakeFetcher:
    """In-memory metadata source for tests; counts every lookup."""

    def __init__(self, records: dict[str, PublicationRecord],
                 texts: dict[str, str] | None = None,
                 failing: set[str] | None = None):
        self.records = records
        self.texts = texts or {}
        self.failing = failing or set()
        self.paper_calls = 0
        self.text_calls = 0

    def get_paper(self, pub_id: str) -> PublicationRecord:
        self.paper_calls += 1
        if pub_id in self.failing or pub_id not in self.records:
            raise FetchError(f"no metadata for {pub_id}")
        rec = self.records[pub_id]
        return PublicationRecord(
            id=rec.id, title=rec.title, year=rec.year, topics=rec.topics,
            references=rec.references, fulltext_url=rec.fulltext_url,
        )

    def get_fulltext(self, record: PublicationRecord) -> str | None:
        self.text_calls += 1
        if record.fulltext_url is None:
            return None
        if record.id in self.failing:
            raise FetchError(f"404 for {record.id}")
        return self.texts.get(record.id)


def rec(pub_id, refs=(), year=None, title="", topics=(), url=None):
    return PublicationRecord(id=pub_id, title=title or pub_id, year=year,
                             topics=frozenset(topics), references=tuple(refs),
                             fulltext_url=url)
