import pytest

from litgraph.records import (CorpusError, CorpusStore, PublicationRecord,
                              TextDocument, export_corpus, load_corpus)

from litgraph_testutil import rec


def test_record_rejects_empty_id():
    with pytest.raises(CorpusError):
        PublicationRecord(id="")


def test_record_drops_self_reference_and_duplicates():
    r = rec("A", refs=("B", "A", "B", "C"))
    assert r.references == ("B", "C")


def test_retrieved_document_must_have_text():
    with pytest.raises(CorpusError):
        TextDocument(publication_id="A", text="", source="retrieved")
    # supplied documents may be empty (pre-extraction placeholder)
    TextDocument(publication_id="A", text="", source="supplied")


def test_char_count_matches_text_length():
    doc = TextDocument(publication_id="A", text="the PoW consensus")
    assert doc.char_count == 17


def test_document_requires_known_record():
    store = CorpusStore()
    with pytest.raises(CorpusError):
        store.add_document(TextDocument(publication_id="ghost", text="x"))


def test_fetch_log_outcomes_validated():
    store = CorpusStore()
    store.add_record(rec("A"))
    store.log_fetch("A", "ok")
    with pytest.raises(CorpusError):
        store.log_fetch("A", "kaboom")


def test_export_roundtrip(tmp_path):
    store = CorpusStore()
    store.add_record(rec("A", refs=("B",), year=2010, topics=("crypto",)))
    store.add_record(rec("B", year=2011))
    store.add_record(rec("C"))
    store.add_document(TextDocument(publication_id="A", text="hello world"))
    store.log_fetch("A", "ok", timestamp=123.0)

    path = export_corpus(store, tmp_path / "corpus.ndjson")
    assert len(path.read_text(encoding="utf-8").splitlines()) == 3
    reloaded = load_corpus(path)
    assert reloaded.same_contents(store)
    assert reloaded.fetch_log == [("A", "ok", 123.0)]


def test_export_empty_store_errors(tmp_path):
    with pytest.raises(CorpusError):
        export_corpus(CorpusStore(), tmp_path / "corpus.ndjson")


def test_stub_record_survives_roundtrip(tmp_path):
    store = CorpusStore()
    store.add_record(rec("A", refs=("B",)))
    store.add_record(PublicationRecord(id="B", depth=1))  # failed-fetch stub
    store.log_fetch("B", "error", timestamp=1.0)
    reloaded = load_corpus(export_corpus(store, tmp_path / "c.ndjson"))
    assert reloaded.records["B"].references == ()
    assert reloaded.same_contents(store)
