"""litgraph command line interface.

Exit codes: 0 success, 2 validation error, 3 stage failure.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import ingest as ingest_mod
from .annotations import AnnotationError, serialize_standoff
from .density import DensityError, FilterConfig, filter_corpus, read_reports_csv
from .graphs import (GraphError, build_citation_graph, build_topics_graph,
                     degree_centrality, hits, window_slices)
from .pipeline import (PipelineConfig, ReportBundle, StageFailure,
                       ValidationError, read_seeds, run_pipeline)
from .records import CorpusError, export_corpus, load_corpus
from .density import FilteredCorpus
from .tagging import import_annotations, tag_gazetteer
from .taxonomy import TaxonomyError, build_gazetteer, default_gazetteer_aliases, load_taxonomy

VALIDATION_ERRORS = (ValidationError, TaxonomyError, DensityError, CorpusError,
                     AnnotationError, GraphError, ingest_mod.ConfigurationError)


@click.group()
def main():
    """Literature mining: citation expansion, entity density filtering,
    temporal graph analytics."""


def _fail(exc: Exception, code: int):
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


@main.command()
@click.option("--seeds", "seeds_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--depth", default=2, show_default=True, type=int)
@click.option("--cache", "cache_dir", required=True, type=click.Path(path_type=Path))
@click.option("--offline", is_flag=True, help="Serve everything from the cache; no network.")
@click.option("--base-url", default=None, help="Metadata service base URL.")
@click.option("--out", "out_path", default="corpus.ndjson", type=click.Path(path_type=Path))
def ingest(seeds_path, depth, cache_dir, offline, base_url, out_path):
    """Expand the citation network from seed papers and export a manifest."""
    try:
        seeds = read_seeds(seeds_path)
        upstream = None
        if not offline:
            upstream = ingest_mod.HttpMetadataFetcher(
                base_url=base_url or "https://api.semanticscholar.org/graph/v1/paper")
        fetcher = ingest_mod.CachedFetcher(cache_dir, upstream=upstream, offline=offline)
        store = ingest_mod.expand_citation_network(seeds, depth, fetcher)
        ingest_mod.fetch_all_fulltexts(store, fetcher)
        export_corpus(store, out_path)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)
    except ingest_mod.FetchError as exc:
        _fail(exc, 3)
    click.echo(f"{len(store.records)} records, {len(store.documents)} documents -> {out_path}")


@main.group()
def taxonomy():
    """Taxonomy tools."""


@taxonomy.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
def validate(file):
    """Validate a taxonomy file."""
    try:
        tax = load_taxonomy(file)
    except TaxonomyError as exc:
        _fail(exc, 2)
    click.echo(f"ok: {len(tax)} labels under {len(tax.top_level)} top-level categories")


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path),
              help="Corpus manifest (newline-delimited records).")
@click.option("--gazetteer", "use_gazetteer", is_flag=True, default=False)
@click.option("--import", "import_dir", type=click.Path(exists=True, path_type=Path))
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", default="annotations", type=click.Path(path_type=Path))
def tag(corpus_path, use_gazetteer, import_dir, taxonomy_path, out_dir):
    """Tag corpus documents via the gazetteer or import standoff files."""
    if use_gazetteer and import_dir:
        _fail(ValueError("--gazetteer and --import are mutually exclusive"), 2)
    try:
        store = load_corpus(corpus_path)
        tax = load_taxonomy(taxonomy_path)
        if import_dir:
            annotations = import_annotations(import_dir, store, tax)
        else:
            gaz = build_gazetteer(tax, default_gazetteer_aliases())
            annotations = {
                pid: tag_gazetteer(doc, gaz)
                for pid, doc in sorted(store.documents.items())
            }
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for pid in sorted(annotations):
            (out_dir / f"{pid}.ann").write_text(
                serialize_standoff(annotations[pid]), encoding="utf-8")
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)
    total = sum(len(a) for a in annotations.values())
    click.echo(f"{total} entities over {len(annotations)} documents -> {out_dir}")


@main.command("filter")
@click.option("--reports", "reports_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--seeds", "seeds_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--dlt-pct", default=90.0, show_default=True, type=float)
@click.option("--esg-pct", default=70.0, show_default=True, type=float)
@click.option("--token-pct", default=10.0, show_default=True, type=float)
@click.option("--token-floor", default=100, show_default=True, type=int)
@click.option("--out", "out_path", default=None, type=click.Path(path_type=Path))
def filter_cmd(reports_path, seeds_path, dlt_pct, esg_pct, token_pct, token_floor, out_path):
    """Apply the three-stage percentile density filter."""
    try:
        reports = read_reports_csv(reports_path)
        config = FilterConfig(token_floor_pct=token_pct, dlt_pct=dlt_pct,
                              esg_pct=esg_pct, token_abs_floor=token_floor,
                              seeds=frozenset(read_seeds(seeds_path)))
        filtered = filter_corpus(reports, config)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)
    kept = sorted(filtered.kept)
    if out_path:
        Path(out_path).write_text("".join(f"{pid}\n" for pid in kept), encoding="utf-8")
    else:
        for pid in kept:
            click.echo(pid)
    for stage in filtered.stage_log:
        click.echo(f"# {stage.name}: {stage.input} in, {stage.excluded} excluded, "
                   f"{stage.retained} retained", err=True)


@main.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--citation", "kind", flag_value="citation", default=True)
@click.option("--topics", "kind", flag_value="topics")
@click.option("--filtered", "filtered_path", type=click.Path(exists=True, path_type=Path),
              help="Kept-id file for the citation graph (defaults to all records).")
@click.option("--mode", default="tumbling", type=click.Choice(["tumbling", "cumulative"]),
              show_default=True)
@click.option("--metrics", default="counts", show_default=True,
              help="Comma-separated: counts,hits,degree.")
def graph(corpus_path, kind, filtered_path, mode, metrics):
    """Compute per-window metrics for the citation or topics graph."""
    wanted = {m.strip() for m in metrics.split(",") if m.strip()}
    unknown = wanted - {"counts", "hits", "degree"}
    if unknown:
        _fail(ValueError(f"unknown metrics: {sorted(unknown)}"), 2)
    try:
        store = load_corpus(corpus_path)
        if kind == "citation":
            if filtered_path:
                kept = frozenset(read_seeds(filtered_path))
            else:
                kept = frozenset(store.records)
            g = build_citation_graph(FilteredCorpus(kept=kept), store)
        else:
            g = build_topics_graph([store.records[p] for p in sorted(store.records)])
        snaps = window_slices(g, mode)
        if "counts" in wanted:
            click.echo("window,node_count,edge_count,avg_degree")
            for snap in snaps:
                click.echo(f"{snap.window[1]},{snap.node_count},{snap.edge_count},"
                           f"{float(snap.avg_degree):.6f}")
        if "hits" in wanted:
            if not g.directed:
                _fail(ValueError("HITS applies to the citation graph only"), 2)
            click.echo("window,node,authority,hub")
            for snap in snaps:
                scores = hits(snap)
                for node in sorted(snap.nodes):
                    click.echo(f"{snap.window[1]},{node},"
                               f"{scores.authority[node]:.6f},{scores.hub[node]:.6f}")
        if "degree" in wanted:
            click.echo("window,node,centrality")
            for snap in snaps:
                for node, score in sorted(degree_centrality(snap).items()):
                    click.echo(f"{snap.window[1]},{node},{float(score):.6f}")
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(path_type=Path))
@click.option("--resume", is_flag=True)
@click.option("--dry-run", is_flag=True)
def run(config_path, resume, dry_run):
    """Run the full pipeline from a declarative config file."""
    try:
        config = PipelineConfig.from_file(config_path)
        bundle: ReportBundle = run_pipeline(config, resume=resume, dry_run=dry_run,
                                            echo=click.echo)
    except VALIDATION_ERRORS as exc:
        _fail(exc, 2)
    except StageFailure as exc:
        _fail(exc, 3)
    if not dry_run:
        click.echo(f"bundle written to {bundle.output_dir}")


if __name__ == "__main__":
    main()
