"""brat standoff annotations: parsing, BIO export, consistency cleaning,
and overlap resampling.

Offsets are Unicode scalar-value (character) offsets, not bytes.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field, replace

from .taxonomy import normalize_surface


class AnnotationError(Exception):
    """Malformed standoff data or violated annotation preconditions."""


@dataclass(frozen=True)
class EntityAnnotation:
    ann_id: str
    label: str
    start: int
    end: int
    surface: str

    def overlaps(self, other: "EntityAnnotation") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass
class AnnotationSet:
    publication_id: str
    entities: list[EntityAnnotation] = field(default_factory=list)
    ignored_lines: int = 0

    def __post_init__(self):
        ids = [e.ann_id for e in self.entities]
        if len(ids) != len(set(ids)):
            raise AnnotationError(f"duplicate annotation ids in {self.publication_id}")

    def __len__(self) -> int:
        return len(self.entities)


def parse_standoff(ann_text: str, doc_text: str,
                   publication_id: str = "") -> AnnotationSet:
    """Parse brat `.ann` content against its `.txt` document.

    Only T (entity) lines are read; relation/event/note lines are counted
    and ignored. Discontinuous spans (semicolon-separated fragments) are
    rejected.
    """
    entities: list[EntityAnnotation] = []
    ignored = 0
    for lineno, raw in enumerate(ann_text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if not line.startswith("T"):
            ignored += 1
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise AnnotationError(f"line {lineno}: expected tab-separated fields")
        ann_id = parts[0]
        surface = parts[2] if len(parts) >= 3 else ""
        mid = parts[1]
        if ";" in mid:
            raise AnnotationError(f"line {lineno}: discontinuous spans are not supported")
        fields = mid.split()
        if len(fields) != 3:
            raise AnnotationError(f"line {lineno}: expected 'Label start end'")
        label, start_s, end_s = fields
        try:
            start, end = int(start_s), int(end_s)
        except ValueError as exc:
            raise AnnotationError(f"line {lineno}: non-integer offsets") from exc
        if not (0 <= start < end <= len(doc_text)):
            raise AnnotationError(
                f"line {lineno}: offsets {start}..{end} out of range for "
                f"document of length {len(doc_text)}"
            )
        if doc_text[start:end] != surface:
            raise AnnotationError(
                f"line {lineno}: surface {surface!r} does not match "
                f"document text {doc_text[start:end]!r}"
            )
        entities.append(EntityAnnotation(ann_id, label, start, end, surface))
    return AnnotationSet(publication_id=publication_id, entities=entities,
                         ignored_lines=ignored)


def serialize_standoff(annotation_set: AnnotationSet) -> str:
    lines = [
        f"{e.ann_id}\t{e.label} {e.start} {e.end}\t{e.surface}"
        for e in annotation_set.entities
    ]
    return "\n".join(lines) + ("\n" if lines else "")


_PUNCT = set(string.punctuation)


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    """Whitespace split, then split off leading/trailing punctuation runs
    as separate tokens. Returns (token, start, end) triples."""
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
        chunk_start, chunk_end = i, j
        lead = chunk_start
        while lead < chunk_end and text[lead] in _PUNCT:
            lead += 1
        trail = chunk_end
        while trail > lead and text[trail - 1] in _PUNCT:
            trail -= 1
        if lead > chunk_start:
            tokens.append((text[chunk_start:lead], chunk_start, lead))
        if lead < trail:
            tokens.append((text[lead:trail], lead, trail))
        if trail < chunk_end:
            tokens.append((text[trail:chunk_end], trail, chunk_end))
        i = j
    return tokens


def to_bio(doc_text: str, annotation_set: AnnotationSet,
           tokenizer=tokenize_with_offsets) -> list[tuple[str, str]]:
    """Convert character-offset annotations to per-token BIO tags.

    A token partially covered by an annotation is tagged with that
    annotation's label (the tag extends to the covering token).
    """
    entities = sorted(annotation_set.entities, key=lambda e: (e.start, e.end))
    for a, b in zip(entities, entities[1:]):
        if a.overlaps(b):
            raise AnnotationError(
                f"overlapping annotations {a.ann_id} and {b.ann_id}; "
                "resample_overlaps first"
            )
    tagged: list[tuple[str, str]] = []
    ei = 0
    active: EntityAnnotation | None = None
    for token, start, end in tokenizer(doc_text):
        while ei < len(entities) and entities[ei].end <= start:
            ei += 1
            active = None
        ent = entities[ei] if ei < len(entities) else None
        if ent is not None and ent.start < end and start < ent.end:
            prefix = "I" if active is ent else "B"
            active = ent
            tagged.append((token, f"{prefix}-{ent.label}"))
        else:
            tagged.append((token, "O"))
    return tagged


def write_bio(doc_text: str, annotation_set: AnnotationSet) -> str:
    """Two-column token/tag text; blank lines between newline-delimited
    segments of the source document."""
    lines: list[str] = []
    offset = 0
    for segment in doc_text.split("\n"):
        seg_set = AnnotationSet(
            publication_id=annotation_set.publication_id,
            entities=[
                replace(e, start=e.start - offset, end=e.end - offset)
                for e in annotation_set.entities
                if e.start >= offset and e.end <= offset + len(segment)
            ],
        )
        pairs = to_bio(segment, seg_set)
        lines.extend(f"{tok}\t{tag}" for tok, tag in pairs)
        if pairs:
            lines.append("")
        offset += len(segment) + 1
    return "\n".join(lines).rstrip("\n") + "\n" if lines else ""


@dataclass
class ConsistencyReport:
    conflicts: list[tuple[str, dict[str, int]]] = field(default_factory=list)
    advisory: list[tuple[str, dict[str, int]]] = field(default_factory=list)
    canonical_fixes_applied: int = 0


def check_consistency(corpus_annotations: dict[str, AnnotationSet],
                      context_free_map: dict[str, str]) -> ConsistencyReport:
    """Report surfaces labeled inconsistently across the corpus.

    Surfaces in the map with any deviation from the canonical label become
    conflicts; surfaces outside the map that carry more than one label are
    reported in an advisory section only.
    """
    observed: dict[str, dict[str, int]] = {}
    for ann_set in corpus_annotations.values():
        for ent in ann_set.entities:
            key = normalize_surface(ent.surface)
            observed.setdefault(key, {})
            observed[key][ent.label] = observed[key].get(ent.label, 0) + 1

    canonical = {normalize_surface(k): v for k, v in context_free_map.items()}
    conflicts = []
    advisory = []
    for surface in sorted(observed):
        labels = observed[surface]
        if surface in canonical:
            if set(labels) - {canonical[surface]}:
                conflicts.append((surface, dict(sorted(labels.items()))))
        elif len(labels) > 1:
            advisory.append((surface, dict(sorted(labels.items()))))
    return ConsistencyReport(conflicts=conflicts, advisory=advisory)


def apply_canonical_labels(corpus_annotations: dict[str, AnnotationSet],
                           context_free_map: dict[str, str]) -> dict[str, AnnotationSet]:
    """Rewrite every occurrence of a mapped surface to its canonical label.

    Idempotent; annotations with unmapped surfaces pass through unchanged.
    """
    canonical = {normalize_surface(k): v for k, v in context_free_map.items()}
    out: dict[str, AnnotationSet] = {}
    for pub_id, ann_set in corpus_annotations.items():
        entities = []
        for ent in ann_set.entities:
            target = canonical.get(normalize_surface(ent.surface))
            if target is not None and target != ent.label:
                ent = replace(ent, label=target)
            entities.append(ent)
        out[pub_id] = AnnotationSet(publication_id=pub_id, entities=entities,
                                    ignored_lines=ann_set.ignored_lines)
    return out


def resample_overlaps(doc_text: str,
                      annotation_set: AnnotationSet) -> list[tuple[str, AnnotationSet]]:
    """Split stacked annotations across duplicated copies of the document.

    Greedy interval partitioning: each annotation goes to the first copy it
    does not overlap, so the number of copies equals the maximum overlap
    depth. Copies share identical text and together carry every input
    annotation exactly once.
    """
    if not annotation_set.entities:
        return [(doc_text, AnnotationSet(annotation_set.publication_id, []))]
    copies: list[list[EntityAnnotation]] = []
    for ent in sorted(annotation_set.entities, key=lambda e: (e.start, e.end, e.ann_id)):
        for bucket in copies:
            if not any(ent.overlaps(other) for other in bucket):
                bucket.append(ent)
                break
        else:
            copies.append([ent])
    return [
        (doc_text, AnnotationSet(annotation_set.publication_id, bucket))
        for bucket in copies
    ]
