"""Temporal citation and topic co-occurrence graphs with per-window metrics:
counts, average degree, HITS scores, normalized degree centrality, growth
percentages, and entity prevalence series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .annotations import AnnotationSet
from .density import FilteredCorpus
from .records import CorpusStore, PublicationRecord
from .tagging import normalize_entity


class GraphError(Exception):
    """Invalid graph inputs (empty series, zero baselines)."""


@dataclass(frozen=True)
class TemporalEdge:
    src: str
    dst: str
    year: int | None
    weight: int = 1


@dataclass
class TemporalGraph:
    directed: bool
    nodes: dict[str, int | None] = field(default_factory=dict)  # node -> first-seen year
    edges: list[TemporalEdge] = field(default_factory=list)

    def add_node(self, node: str, year: int | None) -> None:
        current = self.nodes.get(node)
        if node not in self.nodes or (year is not None and (current is None or year < current)):
            self.nodes[node] = year

    def add_edge(self, src: str, dst: str, year: int | None, weight: int = 1) -> None:
        if src not in self.nodes or dst not in self.nodes:
            raise GraphError(f"edge endpoints must exist: {src} -> {dst}")
        if weight < 1:
            raise GraphError("edge weight must be >= 1")
        self.edges.append(TemporalEdge(src, dst, year, weight))

    @property
    def dated_edges(self) -> list[TemporalEdge]:
        return [e for e in self.edges if e.year is not None]

    def year_range(self) -> tuple[int, int] | None:
        years = [e.year for e in self.edges if e.year is not None]
        if not years:
            return None
        return min(years), max(years)


def build_citation_graph(filtered: FilteredCorpus, store: CorpusStore) -> TemporalGraph:
    """Directed graph over kept publications plus everything they cite.

    Each citation edge is timestamped with the citing paper's year; undated
    papers stay in the static graph but contribute no dated edges.
    """
    graph = TemporalGraph(directed=True)
    for pub_id in sorted(filtered.kept):
        record = store.records.get(pub_id)
        if record is None:
            continue
        graph.add_node(pub_id, record.year)
        for ref in record.references:
            ref_year = store.records[ref].year if ref in store.records else None
            graph.add_node(ref, ref_year)
            graph.add_edge(pub_id, ref, record.year)
    return graph


def build_topics_graph(records: list[PublicationRecord]) -> TemporalGraph:
    """Undirected weighted graph: one node per topic, one weight-1 temporal
    edge instance per unordered topic pair per paper."""
    graph = TemporalGraph(directed=False)
    for record in records:
        for topic in sorted(record.topics):
            graph.add_node(topic, record.year)
        for a, b in combinations(sorted(record.topics), 2):
            graph.add_edge(a, b, record.year)
    return graph


@dataclass
class WindowSnapshot:
    window: tuple[int, int]  # (start_year, end_year], one calendar year when tumbling
    mode: str  # tumbling | cumulative
    directed: bool
    nodes: set[str] = field(default_factory=set)
    edges: list[TemporalEdge] = field(default_factory=list)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def avg_degree(self) -> Fraction:
        """Mean out-degree for directed graphs, 2E/N for undirected."""
        if not self.nodes:
            return Fraction(0)
        factor = 1 if self.directed else 2
        return Fraction(factor * len(self.edges), len(self.nodes))


def window_slices(graph: TemporalGraph, mode: str = "tumbling",
                  year_range: tuple[int, int] | None = None) -> list[WindowSnapshot]:
    """One snapshot per calendar year. Tumbling snapshots hold that year's
    edges and their endpoints; cumulative snapshots hold all edges up to and
    including the year."""
    if mode not in ("tumbling", "cumulative"):
        raise GraphError(f"unknown window mode {mode!r}")
    if year_range is None:
        year_range = graph.year_range()
        if year_range is None:
            return []
    start, end = year_range
    snapshots = []
    for year in range(start, end + 1):
        if mode == "tumbling":
            edges = [e for e in graph.edges if e.year == year]
        else:
            edges = [e for e in graph.edges if e.year is not None and e.year <= year]
        nodes = {e.src for e in edges} | {e.dst for e in edges}
        if mode == "cumulative":
            nodes |= {
                n for n, first in graph.nodes.items()
                if first is not None and first <= year
            }
        snapshots.append(WindowSnapshot(window=(year - 1, year), mode=mode,
                                        directed=graph.directed,
                                        nodes=nodes, edges=edges))
    return snapshots


@dataclass
class HitsScores:
    authority: dict[str, float]
    hub: dict[str, float]
    iterations: int
    converged: bool


def hits(snapshot: WindowSnapshot | TemporalGraph, max_iter: int = 100,
         tol: float = 1e-8) -> HitsScores:
    """Classic mutual-reinforcement iteration with Euclidean normalization.

    authority <- A^T . hub, hub <- A . authority each round; converged when
    the largest absolute per-node change falls below tol.
    """
    if isinstance(snapshot, TemporalGraph):
        if not snapshot.directed:
            raise GraphError("HITS needs a directed graph")
        nodes, edges = set(snapshot.nodes), snapshot.edges
    else:
        if not snapshot.directed:
            raise GraphError("HITS needs a directed graph")
        nodes, edges = snapshot.nodes, snapshot.edges
    if not nodes:
        return HitsScores(authority={}, hub={}, iterations=0, converged=True)

    out_edges: dict[str, list[tuple[str, int]]] = {n: [] for n in nodes}
    in_edges: dict[str, list[tuple[str, int]]] = {n: [] for n in nodes}
    for e in edges:
        out_edges[e.src].append((e.dst, e.weight))
        in_edges[e.dst].append((e.src, e.weight))

    hub = {n: 1.0 for n in nodes}
    auth = {n: 1.0 for n in nodes}
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_auth = {
            n: sum(hub[src] * w for src, w in in_edges[n]) for n in nodes
        }
        _normalize(new_auth)
        new_hub = {
            n: sum(new_auth[dst] * w for dst, w in out_edges[n]) for n in nodes
        }
        _normalize(new_hub)
        delta = max(
            max(abs(new_auth[n] - auth[n]) for n in nodes),
            max(abs(new_hub[n] - hub[n]) for n in nodes),
        )
        auth, hub = new_auth, new_hub
        if delta < tol:
            converged = True
            break
    return HitsScores(authority=auth, hub=hub, iterations=iterations,
                      converged=converged)


def _normalize(scores: dict[str, float]) -> None:
    norm = math.sqrt(sum(v * v for v in scores.values()))
    if norm > 0:
        for n in scores:
            scores[n] /= norm


def degree_centrality(snapshot: WindowSnapshot) -> dict[str, Fraction]:
    """Weighted degree divided by the snapshot's maximum weighted degree.

    The argmax node scores exactly 1; a snapshot whose maximum degree is
    zero maps every node to 0.
    """
    if not snapshot.nodes:
        return {}
    degree: dict[str, int] = {n: 0 for n in snapshot.nodes}
    for e in snapshot.edges:
        degree[e.src] += e.weight
        degree[e.dst] += e.weight
    max_degree = max(degree.values())
    if max_degree == 0:
        return {n: Fraction(0) for n in degree}
    return {n: Fraction(d, max_degree) for n, d in degree.items()}


def growth(series: dict[int, float], y0: int, y1: int) -> float:
    """Percentage change of a yearly series between two years."""
    if y0 not in series or y1 not in series:
        raise GraphError(f"series lacks values at {y0} and/or {y1}")
    base = series[y0]
    if base == 0:
        raise GraphError(f"zero baseline at {y0}: value emerged, growth undefined")
    return 100.0 * (series[y1] - base) / base


def entity_prevalence_series(corpus_annotations: dict[str, AnnotationSet],
                             store: CorpusStore,
                             alias_table: dict[str, str]) -> dict[str, dict[int, int]]:
    """Per-year occurrence counts for each canonical entity key.

    Documents without a publication year are skipped.
    """
    series: dict[str, dict[int, int]] = {}
    for pub_id in sorted(corpus_annotations):
        record = store.records.get(pub_id)
        if record is None or record.year is None:
            continue
        for ent in corpus_annotations[pub_id].entities:
            key = normalize_entity(ent.surface, alias_table)
            per_year = series.setdefault(key, {})
            per_year[record.year] = per_year.get(record.year, 0) + 1
    return series
