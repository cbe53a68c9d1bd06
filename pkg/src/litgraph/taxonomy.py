"""Hierarchical entity-type taxonomy and the gazetteer compiled from it.

The shipped tree (data/taxonomy.txt) carries 136 labels under 12 top-level
categories. The file format is indentation-based: two spaces per level,
optional ``label | description``, ``#`` comments ignored.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path


class TaxonomyError(Exception):
    """Structural problem in a taxonomy or alias file."""


@dataclass(frozen=True)
class TaxonomyNode:
    label: str
    parent: str | None
    depth: int
    description: str = ""


# The ESG category and the default DLT side of the density split.
ESG_CATEGORY = "ESG"
MISCELLANEOUS_CATEGORY = "Miscellaneous"


@dataclass
class Taxonomy:
    nodes: dict[str, TaxonomyNode]
    top_level: list[str]
    include_miscellaneous_in_dlt: bool = False
    esg_category: str = ESG_CATEGORY

    @property
    def dlt_categories(self) -> list[str]:
        cats = [c for c in self.top_level if c != self.esg_category]
        if not self.include_miscellaneous_in_dlt:
            cats = [c for c in cats if c != MISCELLANEOUS_CATEGORY]
        return cats

    def __contains__(self, label: str) -> bool:
        return label in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def prune_to_top_level(self, label: str) -> str:
        """Walk the parent chain up to the unique depth-0 category."""
        if label not in self.nodes:
            raise TaxonomyError(f"unknown label: {label}")
        node = self.nodes[label]
        while node.parent is not None:
            node = self.nodes[node.parent]
        return node.label


def load_taxonomy(path: str | Path | None = None, *,
                  include_miscellaneous_in_dlt: bool = False) -> Taxonomy:
    """Parse and validate a taxonomy file; defaults to the shipped tree."""
    if path is None:
        text = resources.files("litgraph").joinpath("data/taxonomy.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_taxonomy(text, include_miscellaneous_in_dlt=include_miscellaneous_in_dlt)


def parse_taxonomy(text: str, *, include_miscellaneous_in_dlt: bool = False) -> Taxonomy:
    nodes: dict[str, TaxonomyNode] = {}
    top_level: list[str] = []
    stack: list[str] = []  # stack[d] = most recent label at depth d

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.lstrip().startswith("#"):
            continue
        indent = len(line) - len(line.lstrip(" "))
        if indent % 2 != 0:
            raise TaxonomyError(f"line {lineno}: indentation must be a multiple of two spaces")
        depth = indent // 2
        body = line.strip()
        label, _, description = (p.strip() for p in body.partition("|"))
        if not label:
            raise TaxonomyError(f"line {lineno}: empty label")
        if label in nodes:
            raise TaxonomyError(f"line {lineno}: duplicate label {label!r}")
        if depth > len(stack):
            raise TaxonomyError(f"line {lineno}: label {label!r} skips a level")
        parent = stack[depth - 1] if depth > 0 else None
        nodes[label] = TaxonomyNode(label=label, parent=parent, depth=depth,
                                    description=description)
        del stack[depth:]
        stack.append(label)
        if depth == 0:
            top_level.append(label)

    if not nodes:
        raise TaxonomyError("taxonomy file is empty")
    # Parent chains are acyclic by construction (parents always precede
    # children), but verify reachability anyway for hand-edited files.
    for node in nodes.values():
        seen = set()
        cur = node
        while cur.parent is not None:
            if cur.label in seen:
                raise TaxonomyError(f"cycle through label {cur.label!r}")
            seen.add(cur.label)
            if cur.parent not in nodes:
                raise TaxonomyError(f"label {cur.label!r} has missing parent {cur.parent!r}")
            cur = nodes[cur.parent]
    return Taxonomy(nodes=nodes, top_level=top_level,
                    include_miscellaneous_in_dlt=include_miscellaneous_in_dlt)


_PUNCT = string.punctuation


def normalize_surface(surface: str) -> str:
    """Case-fold, map hyphen/underscore to space, collapse whitespace,
    strip leading/trailing punctuation.

    Makes "Proof-of-Work" and "proof of work" collide deliberately.
    """
    s = surface.casefold().replace("-", " ").replace("_", " ")
    s = " ".join(s.split())
    return s.strip(_PUNCT + " ")


@dataclass
class Gazetteer:
    entries: dict[str, str] = field(default_factory=dict)  # normalized surface -> top-level label
    max_phrase_len: int = 0

    def __len__(self) -> int:
        return len(self.entries)


def build_gazetteer(taxonomy: Taxonomy, alias_table: dict[str, str]) -> Gazetteer:
    """Compile surface forms into a lookup keyed by normalized form.

    Labels are pruned to their top-level category; conflicting duplicate
    aliases (same normalized form, different top-level label) are rejected.
    """
    entries: dict[str, str] = {}
    max_len = 0
    for surface, label in alias_table.items():
        if label not in taxonomy:
            raise TaxonomyError(f"alias {surface!r} points at unknown label {label!r}")
        key = normalize_surface(surface)
        if not key:
            raise TaxonomyError(f"alias {surface!r} normalizes to an empty key")
        top = taxonomy.prune_to_top_level(label)
        if key in entries and entries[key] != top:
            raise TaxonomyError(
                f"alias {key!r} maps to both {entries[key]!r} and {top!r}"
            )
        entries[key] = top
        max_len = max(max_len, len(key.split()))
    return Gazetteer(entries=entries, max_phrase_len=max_len)


def load_alias_labels(path: str | Path) -> dict[str, str]:
    """Two-column UTF-8 text: ``surface<TAB>label``; '#' comments ignored."""
    table: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise TaxonomyError(f"{path}:{lineno}: expected two tab-separated columns")
        table[parts[0].strip()] = parts[1].strip()
    return table


def default_gazetteer_aliases() -> dict[str, str]:
    text = resources.files("litgraph").joinpath("data/gazetteer_aliases.txt").read_text("utf-8")
    table: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        surface, _, label = line.partition("\t")
        table[surface.strip()] = label.strip()
    return table
