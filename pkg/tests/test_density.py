import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from litgraph.density import (DensityError, DensityReport, FilterConfig,
                              build_report, content_density, count_tokens,
                              filter_corpus, percentile, read_reports_csv,
                              write_reports_csv)
from litgraph.records import TextDocument
from litgraph.tagging import tag_gazetteer
from litgraph.taxonomy import build_gazetteer, default_gazetteer_aliases, load_taxonomy


def test_count_tokens_examples():
    assert count_tokens("the PoW consensus") == 3
    assert count_tokens("") == 0
    assert count_tokens("energy-efficient, consensus.") == 3


def test_content_density_exact():
    assert content_density(12, 4, 200) == Fraction(2, 25)
    assert float(content_density(12, 4, 200)) == 0.08
    assert content_density(0, 0, 10) == 0


def test_content_density_zero_tokens():
    with pytest.raises(DensityError):
        content_density(1, 1, 0)


def test_percentile_linear_interpolation():
    assert percentile(list(range(1, 11)), 10) == Fraction(19, 10)
    assert percentile([42], 73) == 42
    assert percentile([3, 1, 2], 100) == 3
    assert percentile([3, 1, 2], 0) == 1


def test_percentile_matches_numpy():
    rng = random.Random(7)
    for _ in range(50):
        values = [rng.randint(0, 1000) for _ in range(rng.randint(1, 60))]
        p = rng.uniform(0, 100)
        assert float(percentile(values, p)) == pytest.approx(
            np.percentile(values, p, method="linear"), abs=1e-9)


def test_percentile_empty():
    with pytest.raises(DensityError):
        percentile([], 50)


def report(pid, tokens, dlt, esg):
    return DensityReport(publication_id=pid, n_tokens=tokens, n_dlt=dlt, n_esg=esg)


def brute_force_filter(reports, config):
    """Independent oracle: sort-and-threshold each stage explicitly."""
    floor = max(float(np.percentile([r.n_tokens for r in reports],
                                    config.token_floor_pct, method="linear")),
                config.token_abs_floor)
    s1 = [r for r in reports if r.n_tokens >= floor]
    if not s1:
        return frozenset(config.seeds) & {r.publication_id for r in reports}
    dlt_thr = np.percentile([float(r.dlt_density) for r in s1],
                            config.dlt_pct, method="linear")
    s2 = [r for r in s1 if float(r.dlt_density) > dlt_thr]
    if s2:
        esg_thr = np.percentile([float(r.esg_density) for r in s2],
                                config.esg_pct, method="linear")
        s3 = [r for r in s2 if float(r.esg_density) > esg_thr]
    else:
        s3 = []
    kept = {r.publication_id for r in s3}
    kept |= config.seeds & {r.publication_id for r in reports}
    return frozenset(kept)


def random_reports(rng, n):
    return [
        report(f"p{i}", rng.randint(10, 5000), rng.randint(0, 120), rng.randint(0, 60))
        for i in range(n)
    ]


def test_seed_below_thresholds_still_kept():
    reports = [report("seed", 150, 0, 0)] + \
        [report(f"p{i}", 1000, 50 + i, 20 + i) for i in range(10)]
    config = FilterConfig(seeds=frozenset({"seed"}))
    assert "seed" in filter_corpus(reports, config).kept


def test_short_document_excluded_despite_high_density():
    reports = [report(f"p{i}", 2000, 5, 2) for i in range(19)]
    reports.append(report("short", 50, 40, 30))  # density huge, 50 tokens
    config = FilterConfig()
    result = filter_corpus(reports, config)
    assert "short" not in result.kept
    assert result.stage_log[0].excluded >= 1


def test_filter_matches_brute_force_on_planted_corpus():
    rng = random.Random(12345)
    reports = random_reports(rng, 20)
    config = FilterConfig(seeds=frozenset({"p0", "p7"}))
    assert filter_corpus(reports, config).kept == brute_force_filter(reports, config)


def test_filter_scale_invariance():
    rng = random.Random(99)
    reports = random_reports(rng, 40)
    config = FilterConfig(seeds=frozenset({"p1"}))
    scaled = [report(r.publication_id, r.n_tokens * 7, r.n_dlt * 7, r.n_esg * 7)
              for r in reports]
    assert filter_corpus(reports, config).kept == filter_corpus(scaled, config).kept


def test_filter_monotonicity_in_percentiles():
    rng = random.Random(4)
    reports = random_reports(rng, 80)
    seeds = frozenset({"p0"})
    base = filter_corpus(reports, FilterConfig(dlt_pct=80, esg_pct=60, seeds=seeds))
    tighter = filter_corpus(reports, FilterConfig(dlt_pct=95, esg_pct=80, seeds=seeds))
    assert (tighter.kept - seeds) <= (base.kept - seeds)


def test_filter_determinism():
    rng = random.Random(31)
    reports = random_reports(rng, 50)
    config = FilterConfig(seeds=frozenset({"p3"}))
    a = filter_corpus(reports, config)
    b = filter_corpus(list(reports), config)
    assert a.kept == b.kept
    assert a.stage_log == b.stage_log
    assert a.thresholds == b.thresholds


def test_filter_empty_input():
    with pytest.raises(DensityError):
        filter_corpus([], FilterConfig())


def test_missing_seed_logged_not_fatal():
    reports = [report("p0", 500, 3, 2)]
    result = filter_corpus(reports, FilterConfig(seeds=frozenset({"ghost"})))
    assert result.missing_seeds == {"ghost"}
    assert "ghost" not in result.kept


@given(st.integers(min_value=0, max_value=2**32 - 1),
       st.integers(min_value=2, max_value=60))
@settings(max_examples=60, deadline=None)
def test_seed_union_law(seed, n):
    rng = random.Random(seed)
    reports = random_reports(rng, n)
    ids = [r.publication_id for r in reports]
    chosen = frozenset(rng.sample(ids, k=rng.randint(1, min(5, n))))
    config = FilterConfig(
        token_floor_pct=rng.uniform(0, 100), dlt_pct=rng.uniform(0, 100),
        esg_pct=rng.uniform(0, 100), token_abs_floor=rng.randint(0, 500),
        seeds=chosen,
    )
    result = filter_corpus(reports, config)
    assert chosen <= result.kept
    assert result.kept <= set(ids)


def test_build_report_counts_split_by_category():
    tax = load_taxonomy()
    gaz = build_gazetteer(tax, default_gazetteer_aliases())
    doc = TextDocument("p1", "Proof of Work increases energy consumption", source="supplied")
    ann = tag_gazetteer(doc, gaz)
    rep = build_report(doc, ann, tax)
    assert rep.n_tokens == 6
    assert rep.n_dlt == 1
    assert rep.n_esg == 1
    assert rep.density == Fraction(2, 6)


def test_reports_csv_roundtrip(tmp_path):
    reports = [report("a", 100, 3, 1), report("b", 250, 0, 9)]
    path = write_reports_csv(reports, tmp_path / "density.csv")
    header = path.read_text(encoding="utf-8").splitlines()[0]
    assert header == "id,n_tokens,n_dlt,n_esg,d_dlt,d_esg,d_combined"
    assert read_reports_csv(path) == sorted(reports, key=lambda r: r.publication_id)
