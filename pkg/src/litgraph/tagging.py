"""Entity tagging for unlabeled corpus text.

Either the built-in gazetteer tagger (leftmost-longest over normalized
token n-grams) or imported standoff files produced by an external model.
Also hosts entity-surface normalization for evolution tracking.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .annotations import AnnotationError, AnnotationSet, EntityAnnotation, tokenize_with_offsets
from .records import CorpusStore, TextDocument
from .taxonomy import Gazetteer, Taxonomy, normalize_surface


def tag_gazetteer(doc: TextDocument, gazetteer: Gazetteer) -> AnnotationSet:
    """Leftmost-longest gazetteer matching; matches never overlap.

    Offsets refer to the original text. Matching is over normalized token
    n-grams up to the gazetteer's max phrase length.
    """
    tokens = [
        (normalize_surface(tok), start, end)
        for tok, start, end in tokenize_with_offsets(doc.text)
        if normalize_surface(tok)
    ]
    entities: list[EntityAnnotation] = []
    i = 0
    tid = 1
    while i < len(tokens):
        matched = False
        for n in range(min(gazetteer.max_phrase_len, len(tokens) - i), 0, -1):
            phrase = " ".join(w for w, _, _ in tokens[i:i + n])
            label = gazetteer.entries.get(phrase)
            if label is not None:
                start = tokens[i][1]
                end = tokens[i + n - 1][2]
                entities.append(EntityAnnotation(
                    ann_id=f"T{tid}", label=label, start=start, end=end,
                    surface=doc.text[start:end],
                ))
                tid += 1
                i += n
                matched = True
                break
        if not matched:
            i += 1
    return AnnotationSet(publication_id=doc.publication_id, entities=entities)


def import_annotations(standoff_dir: str | Path, store: CorpusStore,
                       taxonomy: Taxonomy) -> dict[str, AnnotationSet]:
    """Read `<id>.ann` files against the corpus documents.

    Labels are pruned to top level. Documents without an `.ann` file get
    empty sets; an `.ann` without a matching document is an error.
    """
    standoff_dir = Path(standoff_dir)
    ann_files = {p.stem: p for p in standoff_dir.glob("*.ann")}
    orphans = sorted(set(ann_files) - set(store.documents))
    if orphans:
        raise AnnotationError(f"standoff files without matching documents: {orphans}")

    from .annotations import parse_standoff
    from dataclasses import replace

    result: dict[str, AnnotationSet] = {}
    for pub_id, doc in store.documents.items():
        path = ann_files.get(pub_id)
        if path is None:
            result[pub_id] = AnnotationSet(publication_id=pub_id, entities=[])
            continue
        ann_set = parse_standoff(path.read_text(encoding="utf-8"), doc.text,
                                 publication_id=pub_id)
        pruned = [
            replace(e, label=taxonomy.prune_to_top_level(e.label))
            for e in ann_set.entities
        ]
        result[pub_id] = AnnotationSet(publication_id=pub_id, entities=pruned,
                                       ignored_lines=ann_set.ignored_lines)
    return result


def _singularize(word: str) -> str:
    if len(word) >= 4 and word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def normalize_entity(surface: str, alias_table: dict[str, str]) -> str:
    """Canonical entity key for a surface form.

    Normalize (case-fold, hyphen to space, strip punctuation, singularize
    trailing plural "s" on words of four or more characters), then resolve
    through the alias table. Canonical values are fixed points, so the
    function is idempotent.
    """
    if surface in alias_table.values():
        return surface
    norm = " ".join(_singularize(w) for w in normalize_surface(surface).split())
    return alias_table.get(norm, norm)


def load_entity_aliases(path: str | Path | None = None) -> dict[str, str]:
    """Alias table mapping normalized surfaces to canonical entity keys."""
    if path is None:
        text = resources.files("litgraph").joinpath("data/entity_aliases.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        surface, sep, canonical = line.partition("\t")
        if not sep or not canonical.strip():
            raise AnnotationError(f"alias line {lineno}: expected two tab-separated columns")
        key = " ".join(_singularize(w) for w in normalize_surface(surface).split())
        table[key] = canonical.strip()
    return table
