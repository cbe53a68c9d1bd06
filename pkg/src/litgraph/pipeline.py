"""Declarative pipeline: ingest -> tag -> density -> filter -> graphs -> reports.

The configuration is a flat YAML key/value file; every CLI flag overrides
its config key. All stages are deterministic, so two runs with the same
config and cache produce byte-identical CSV artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import yaml

from . import ingest as ingest_mod
from .annotations import AnnotationSet, serialize_standoff
from .density import (DensityError, FilterConfig, FilteredCorpus, build_report,
                      filter_corpus, read_reports_csv, write_reports_csv)
from .graphs import (build_citation_graph, build_topics_graph, degree_centrality,
                     entity_prevalence_series, hits, window_slices)
from .records import CorpusStore, export_corpus, load_corpus
from .tagging import import_annotations, load_entity_aliases, tag_gazetteer
from .taxonomy import build_gazetteer, default_gazetteer_aliases, load_taxonomy


class ValidationError(Exception):
    """Configuration problems detected before any work runs."""


class StageFailure(Exception):
    """A pipeline stage failed after validation."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    seeds_path: Path
    cache_dir: Path
    output_dir: Path
    depth: int = 2
    tagging_mode: str = "gazetteer"  # gazetteer | import
    import_dir: Path | None = None
    taxonomy_path: Path | None = None
    token_floor_pct: float = 10.0
    dlt_pct: float = 90.0
    esg_pct: float = 70.0
    token_abs_floor: int = 100
    graphs: tuple[str, ...] = ("citation", "topics")
    window_mode: str = "tumbling"
    offline: bool = True
    base_url: str | None = None

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ValidationError(f"config file not found: {path}")
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        if not isinstance(raw, dict):
            raise ValidationError("config must be a mapping of keys to values")
        raw.update({k: v for k, v in overrides.items() if v is not None})
        known = {
            "seeds", "cache", "output", "depth", "tagging", "import_dir",
            "taxonomy", "token_floor_pct", "dlt_pct", "esg_pct",
            "token_abs_floor", "graphs", "window_mode", "offline", "base_url",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        for required in ("seeds", "cache", "output"):
            if required not in raw:
                raise ValidationError(f"config is missing required key {required!r}")
        base = path.parent

        def respath(value):
            p = Path(value)
            return p if p.is_absolute() else base / p

        graphs = raw.get("graphs", ["citation", "topics"])
        if isinstance(graphs, str):
            graphs = [g.strip() for g in graphs.split(",") if g.strip()]
        return cls(
            seeds_path=respath(raw["seeds"]),
            cache_dir=respath(raw["cache"]),
            output_dir=respath(raw["output"]),
            depth=int(raw.get("depth", 2)),
            tagging_mode=raw.get("tagging", "gazetteer"),
            import_dir=respath(raw["import_dir"]) if raw.get("import_dir") else None,
            taxonomy_path=respath(raw["taxonomy"]) if raw.get("taxonomy") else None,
            token_floor_pct=float(raw.get("token_floor_pct", 10.0)),
            dlt_pct=float(raw.get("dlt_pct", 90.0)),
            esg_pct=float(raw.get("esg_pct", 70.0)),
            token_abs_floor=int(raw.get("token_abs_floor", 100)),
            graphs=tuple(graphs),
            window_mode=raw.get("window_mode", "tumbling"),
            offline=bool(raw.get("offline", True)),
            base_url=raw.get("base_url"),
        )

    def validate(self) -> None:
        if not self.seeds_path.exists():
            raise ValidationError(f"seeds file not found: {self.seeds_path}")
        if self.depth < 0:
            raise ValidationError("depth must be >= 0")
        if self.tagging_mode not in ("gazetteer", "import"):
            raise ValidationError(f"unknown tagging mode {self.tagging_mode!r}")
        if self.tagging_mode == "import":
            if self.import_dir is None or not self.import_dir.exists():
                raise ValidationError("tagging mode 'import' needs an existing import_dir")
        for g in self.graphs:
            if g not in ("citation", "topics"):
                raise ValidationError(f"unknown graph analysis {g!r}")
        if self.window_mode not in ("tumbling", "cumulative"):
            raise ValidationError(f"unknown window mode {self.window_mode!r}")

    def config_hash(self) -> str:
        payload = json.dumps({
            "seeds": str(self.seeds_path), "cache": str(self.cache_dir),
            "output": str(self.output_dir), "depth": self.depth,
            "tagging": self.tagging_mode, "import_dir": str(self.import_dir),
            "taxonomy": str(self.taxonomy_path),
            "token_floor_pct": self.token_floor_pct, "dlt_pct": self.dlt_pct,
            "esg_pct": self.esg_pct, "token_abs_floor": self.token_abs_floor,
            "graphs": list(self.graphs), "window_mode": self.window_mode,
            "offline": self.offline, "base_url": self.base_url,
        }, sort_keys=True)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


STAGES = ("ingest", "tag", "density", "filter", "graphs", "report")


@dataclass
class ReportBundle:
    output_dir: Path
    manifest: dict
    artifacts: dict[str, Path] = field(default_factory=dict)


def read_seeds(path: Path) -> list[str]:
    seeds = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            seeds.append(line)
    if not seeds:
        raise ValidationError(f"seeds file {path} is empty")
    return seeds


def _fmt(value) -> str:
    if isinstance(value, Fraction):
        return f"{float(value):.6f}"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def run_pipeline(config: PipelineConfig, resume: bool = False,
                 dry_run: bool = False, echo=print) -> ReportBundle:
    config.validate()
    out = config.output_dir
    cfg_hash = config.config_hash()

    if dry_run:
        for stage in STAGES:
            echo(f"plan: {stage}")
        return ReportBundle(output_dir=out, manifest={"config_hash": cfg_hash,
                                                      "dry_run": True})

    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / "manifest.json"
    prior = None
    if resume and manifest_path.exists():
        prior = json.loads(manifest_path.read_text(encoding="utf-8"))
        if prior.get("config_hash") != cfg_hash:
            prior = None  # config changed; recompute everything

    manifest = {"config_hash": cfg_hash, "started": time.time(),
                "stages": {}, "failures": {}}
    artifacts: dict[str, Path] = {}

    def done(stage: str, path: Path | None) -> bool:
        """True when a resumed run may keep the stage's existing artifact."""
        return prior is not None and path is not None and path.exists() \
            and stage in prior.get("stages", {})

    taxonomy = load_taxonomy(config.taxonomy_path)
    seeds = read_seeds(config.seeds_path)

    # ingest
    corpus_path = out / "corpus.ndjson"
    try:
        if done("ingest", corpus_path):
            store = load_corpus(corpus_path)
        else:
            upstream = None
            if not config.offline:
                base = config.base_url or "https://api.semanticscholar.org/graph/v1/paper"
                upstream = ingest_mod.HttpMetadataFetcher(base_url=base)
            fetcher = ingest_mod.CachedFetcher(config.cache_dir, upstream=upstream,
                                               offline=config.offline and upstream is None)
            store = ingest_mod.expand_citation_network(seeds, config.depth, fetcher)
            ingest_mod.fetch_all_fulltexts(store, fetcher)
            export_corpus(store, corpus_path)
        artifacts["corpus"] = corpus_path
        manifest["stages"]["ingest"] = {"records": len(store.records),
                                        "documents": len(store.documents)}
    except Exception as exc:
        manifest["failures"]["ingest"] = str(exc)
        _write_manifest(manifest_path, manifest)
        raise StageFailure("ingest", exc) from exc

    # tag
    ann_dir = out / "annotations"
    try:
        if config.tagging_mode == "import":
            annotations = import_annotations(config.import_dir, store, taxonomy)
        else:
            gazetteer = build_gazetteer(taxonomy, default_gazetteer_aliases())
            annotations = {
                pub_id: tag_gazetteer(doc, gazetteer)
                for pub_id, doc in sorted(store.documents.items())
            }
        ann_dir.mkdir(exist_ok=True)
        for pub_id in sorted(annotations):
            (ann_dir / f"{pub_id}.ann").write_text(
                serialize_standoff(annotations[pub_id]), encoding="utf-8")
        artifacts["annotations"] = ann_dir
        manifest["stages"]["tag"] = {
            "documents": len(annotations),
            "entities": sum(len(a) for a in annotations.values()),
        }
    except Exception as exc:
        manifest["failures"]["tag"] = str(exc)
        _write_manifest(manifest_path, manifest)
        raise StageFailure("tag", exc) from exc

    # density
    density_path = out / "density.csv"
    try:
        if done("density", density_path):
            reports = read_reports_csv(density_path)
        else:
            reports = [
                build_report(store.documents[pub_id], annotations[pub_id], taxonomy)
                for pub_id in sorted(store.documents)
                if store.documents[pub_id].text.strip()
            ]
            write_reports_csv(reports, density_path)
        artifacts["density"] = density_path
        manifest["stages"]["density"] = {"reports": len(reports)}
    except Exception as exc:
        manifest["failures"]["density"] = str(exc)
        _write_manifest(manifest_path, manifest)
        raise StageFailure("density", exc) from exc

    # filter
    filtered_path = out / "filtered.txt"
    try:
        filter_cfg = FilterConfig(
            token_floor_pct=config.token_floor_pct,
            dlt_pct=config.dlt_pct,
            esg_pct=config.esg_pct,
            token_abs_floor=config.token_abs_floor,
            seeds=frozenset(seeds),
        )
        filtered = filter_corpus(reports, filter_cfg)
        filtered_path.write_text(
            "".join(f"{pid}\n" for pid in sorted(filtered.kept)), encoding="utf-8")
        artifacts["filtered"] = filtered_path
        manifest["stages"]["filter"] = {
            "kept": len(filtered.kept),
            "thresholds": {k: _fmt(v) if v is not None else None
                           for k, v in filtered.thresholds.items()},
            "stage_log": [
                {"name": s.name, "input": s.input, "excluded": s.excluded,
                 "retained": s.retained}
                for s in filtered.stage_log
            ],
        }
    except Exception as exc:
        manifest["failures"]["filter"] = str(exc)
        _write_manifest(manifest_path, manifest)
        raise StageFailure("filter", exc) from exc

    # graphs + entity series
    try:
        if "citation" in config.graphs:
            graph = build_citation_graph(filtered, store)
            snaps = window_slices(graph, config.window_mode)
            counts_path = out / "citation_counts.csv"
            _write_counts_csv(counts_path, snaps)
            artifacts["citation_counts"] = counts_path
            hits_path = out / "citation_hits.csv"
            with hits_path.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["window", "node", "authority", "hub"])
                for snap in snaps:
                    scores = hits(snap)
                    for node in sorted(snap.nodes):
                        writer.writerow([snap.window[1], node,
                                         _fmt(scores.authority[node]),
                                         _fmt(scores.hub[node])])
            artifacts["citation_hits"] = hits_path
        if "topics" in config.graphs:
            topics = build_topics_graph([store.records[p] for p in sorted(store.records)])
            snaps = window_slices(topics, config.window_mode)
            counts_path = out / "topics_counts.csv"
            _write_counts_csv(counts_path, snaps)
            artifacts["topics_counts"] = counts_path
            degree_path = out / "topics_degree.csv"
            with degree_path.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["window", "node", "centrality"])
                for snap in snaps:
                    central = degree_centrality(snap)
                    for node in sorted(central):
                        writer.writerow([snap.window[1], node, _fmt(central[node])])
            artifacts["topics_degree"] = degree_path
        manifest["stages"]["graphs"] = {"analyses": list(config.graphs),
                                        "mode": config.window_mode}
    except Exception as exc:
        manifest["failures"]["graphs"] = str(exc)
        _write_manifest(manifest_path, manifest)
        raise StageFailure("graphs", exc) from exc

    # entity prevalence report
    try:
        aliases = load_entity_aliases()
        kept_annotations = {
            pid: ann for pid, ann in annotations.items() if pid in filtered.kept
        }
        series = entity_prevalence_series(kept_annotations, store, aliases)
        series_path = out / "entity_series.csv"
        with series_path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["entity", "year", "count"])
            for entity in sorted(series):
                for year in sorted(series[entity]):
                    writer.writerow([entity, year, series[entity][year]])
        artifacts["entity_series"] = series_path
        manifest["stages"]["report"] = {"entities": len(series)}
    except Exception as exc:
        manifest["failures"]["report"] = str(exc)
        _write_manifest(manifest_path, manifest)
        raise StageFailure("report", exc) from exc

    manifest["finished"] = time.time()
    _write_manifest(manifest_path, manifest)
    artifacts["manifest"] = manifest_path
    return ReportBundle(output_dir=out, manifest=manifest, artifacts=artifacts)


def _write_counts_csv(path: Path, snaps) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window", "node_count", "edge_count", "avg_degree"])
        for snap in snaps:
            writer.writerow([snap.window[1], snap.node_count, snap.edge_count,
                             _fmt(snap.avg_degree)])


def _write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
