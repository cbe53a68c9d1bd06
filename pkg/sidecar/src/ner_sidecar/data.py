"""BIO dataset loading and the token/offset contract shared with the
upstream exporter.

A dataset directory holds one ``.bio`` file per document: ``token<TAB>tag``
lines, blank lines between sentences. The document title is the file stem;
a trailing ``__<n>`` suffix marks a resampled copy of the same title, so
``paper__2.bio`` belongs to the title ``paper``.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field
from pathlib import Path


class DatasetError(Exception):
    """Malformed BIO data or unknown labels."""


DEFAULT_LABELS = (
    "Blockchain_Name", "ChargingAndRewardingSystem", "Codebase", "Consensus",
    "ESG", "Extensibility", "Identifiers", "Identity_Management",
    "Miscellaneous", "Native_Currency_Tokenisation", "Security_Privacy",
    "Transaction_Capabilities",
)

_COPY_SUFFIX = re.compile(r"__\d+$")


def title_of(stem: str) -> str:
    """Strip the resampled-copy suffix: ``paper__2`` -> ``paper``."""
    return _COPY_SUFFIX.sub("", stem)


@dataclass
class Sentence:
    tokens: list[str]
    tags: list[str]


@dataclass
class Document:
    name: str
    title: str
    sentences: list[Sentence] = field(default_factory=list)


@dataclass
class BioDataset:
    documents: list[Document]
    labels: tuple[str, ...]

    @property
    def titles(self) -> list[str]:
        seen: dict[str, None] = {}
        for doc in self.documents:
            seen.setdefault(doc.title)
        return list(seen)

    def tag_vocabulary(self) -> list[str]:
        tags = ["O"]
        for label in self.labels:
            tags.append(f"B-{label}")
            tags.append(f"I-{label}")
        return tags


def parse_bio(text: str, name: str, labels: set[str]) -> list[Sentence]:
    sentences: list[Sentence] = []
    tokens: list[str] = []
    tags: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            if tokens:
                sentences.append(Sentence(tokens, tags))
                tokens, tags = [], []
            continue
        token, sep, tag = line.partition("\t")
        if not sep or not token or not tag:
            raise DatasetError(f"{name} line {lineno}: expected token<TAB>tag")
        if tag != "O":
            if tag[:2] not in ("B-", "I-") or tag[2:] not in labels:
                raise DatasetError(f"{name} line {lineno}: unknown tag {tag!r}")
        tokens.append(token)
        tags.append(tag)
    if tokens:
        sentences.append(Sentence(tokens, tags))
    return sentences


def load_dataset(dataset_dir: str | Path,
                 labels: tuple[str, ...] = DEFAULT_LABELS) -> BioDataset:
    root = Path(dataset_dir)
    files = sorted(root.glob("*.bio"))
    if not files:
        raise DatasetError(f"no .bio files under {root}")
    label_set = set(labels)
    documents = []
    for path in files:
        sentences = parse_bio(path.read_text(encoding="utf-8"), path.name,
                              label_set)
        documents.append(Document(name=path.stem, title=title_of(path.stem),
                                  sentences=sentences))
    return BioDataset(documents=documents, labels=tuple(labels))


_PUNCT = set(string.punctuation)


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    """Whitespace split with leading/trailing punctuation runs as separate
    tokens; mirrors the exporter so emitted offsets line up."""
    tokens: list[tuple[str, int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        start, end = i, j
        lead = start
        while lead < end and text[lead] in _PUNCT:
            lead += 1
        if lead == end:
            tokens.append((text[start:end], start, end))
        else:
            trail = end
            while trail > lead and text[trail - 1] in _PUNCT:
                trail -= 1
            if lead > start:
                tokens.append((text[start:lead], start, lead))
            tokens.append((text[lead:trail], lead, trail))
            if trail < end:
                tokens.append((text[trail:end], trail, end))
        i = j
    return tokens
