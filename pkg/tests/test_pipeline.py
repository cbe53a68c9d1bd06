import json
import shutil

import pytest

from litgraph.pipeline import (PipelineConfig, StageFailure, ValidationError,
                               read_seeds, run_pipeline)

from litgraph_testutil import FIXTURES

GOLDEN_ARTIFACTS = [
    "density.csv", "filtered.txt", "citation_counts.csv", "citation_hits.csv",
    "topics_counts.csv", "topics_degree.csv", "entity_series.csv",
]


@pytest.fixture()
def corpus12(tmp_path):
    src = FIXTURES / "corpus12"
    dst = tmp_path / "corpus12"
    shutil.copytree(src, dst)
    return dst


def load_config(fixture_dir, **overrides):
    return PipelineConfig.from_file(fixture_dir / "config.yaml", **overrides)


def test_run_matches_golden_artifacts(corpus12):
    bundle = run_pipeline(load_config(corpus12), echo=lambda *_: None)
    golden = FIXTURES / "corpus12" / "golden"
    for name in GOLDEN_ARTIFACTS:
        produced = (bundle.output_dir / name).read_bytes()
        assert produced == (golden / name).read_bytes(), name


def test_run_manifest_contents(corpus12):
    bundle = run_pipeline(load_config(corpus12), echo=lambda *_: None)
    manifest = json.loads((bundle.output_dir / "manifest.json").read_text())
    assert manifest["failures"] == {}
    assert manifest["stages"]["ingest"] == {"records": 12, "documents": 10}
    assert manifest["stages"]["filter"]["kept"] == 4
    assert manifest["config_hash"] == load_config(corpus12).config_hash()


def test_run_is_deterministic(corpus12, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    run_pipeline(load_config(corpus12, output=str(out_a)), echo=lambda *_: None)
    run_pipeline(load_config(corpus12, output=str(out_b)), echo=lambda *_: None)
    for name in GOLDEN_ARTIFACTS:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes()


def test_resume_reuses_artifacts(corpus12):
    config = load_config(corpus12)
    run_pipeline(config, echo=lambda *_: None)
    corpus_mtime = (config.output_dir / "corpus.ndjson").stat().st_mtime_ns
    bundle = run_pipeline(config, resume=True, echo=lambda *_: None)
    assert (config.output_dir / "corpus.ndjson").stat().st_mtime_ns == corpus_mtime
    golden = FIXTURES / "corpus12" / "golden"
    for name in GOLDEN_ARTIFACTS:
        assert (bundle.output_dir / name).read_bytes() == (golden / name).read_bytes()


def test_resume_with_changed_config_recomputes(corpus12):
    config = load_config(corpus12)
    run_pipeline(config, echo=lambda *_: None)
    looser = load_config(corpus12, dlt_pct=0.0, esg_pct=0.0)
    bundle = run_pipeline(looser, resume=True, echo=lambda *_: None)
    kept = (bundle.output_dir / "filtered.txt").read_text().split()
    assert len(kept) > 4  # looser thresholds keep more than the golden run


def test_dry_run_plans_without_writing(corpus12, tmp_path):
    out = tmp_path / "never"
    lines = []
    bundle = run_pipeline(load_config(corpus12, output=str(out)),
                          dry_run=True, echo=lines.append)
    assert not out.exists()
    assert bundle.manifest["dry_run"] is True
    assert [l for l in lines if l.startswith("plan:")] == [
        "plan: ingest", "plan: tag", "plan: density",
        "plan: filter", "plan: graphs", "plan: report",
    ]


def test_config_unknown_key_rejected(corpus12):
    (corpus12 / "bad.yaml").write_text(
        "seeds: seeds.txt\ncache: cache\noutput: out\nbogus: 1\n")
    with pytest.raises(ValidationError, match="bogus"):
        PipelineConfig.from_file(corpus12 / "bad.yaml")


def test_config_missing_required_key(corpus12):
    (corpus12 / "bad.yaml").write_text("seeds: seeds.txt\ncache: cache\n")
    with pytest.raises(ValidationError, match="output"):
        PipelineConfig.from_file(corpus12 / "bad.yaml")


def test_config_missing_file():
    with pytest.raises(ValidationError):
        PipelineConfig.from_file("/nonexistent/config.yaml")


def test_config_paths_resolve_relative_to_config(corpus12):
    config = load_config(corpus12)
    assert config.seeds_path == corpus12 / "seeds.txt"
    assert config.cache_dir == corpus12 / "cache"


def test_validate_rejects_bad_values(corpus12):
    with pytest.raises(ValidationError, match="depth"):
        load_config(corpus12, depth=-1).validate()
    with pytest.raises(ValidationError, match="tagging"):
        load_config(corpus12, tagging="telepathy").validate()
    with pytest.raises(ValidationError, match="window"):
        load_config(corpus12, window_mode="sliding").validate()
    with pytest.raises(ValidationError, match="graph"):
        load_config(corpus12, graphs="citation,mesh").validate()


def test_config_hash_changes_with_settings(corpus12):
    a = load_config(corpus12).config_hash()
    b = load_config(corpus12, dlt_pct=55.0).config_hash()
    assert a != b


def test_stage_failure_recorded_in_manifest(corpus12):
    seed_file = corpus12 / "seeds.txt"
    seed_file.write_text("ghost-paper\n")
    config = load_config(corpus12)
    with pytest.raises(StageFailure) as err:
        run_pipeline(config, echo=lambda *_: None)
    assert err.value.stage == "ingest"
    manifest = json.loads((config.output_dir / "manifest.json").read_text())
    assert "ingest" in manifest["failures"]


def test_read_seeds_skips_comments(tmp_path):
    path = tmp_path / "seeds.txt"
    path.write_text("# header\np01\n\np02\n")
    assert read_seeds(path) == ["p01", "p02"]


def test_read_seeds_empty_file(tmp_path):
    path = tmp_path / "seeds.txt"
    path.write_text("# only comments\n")
    with pytest.raises(ValidationError):
        read_seeds(path)
