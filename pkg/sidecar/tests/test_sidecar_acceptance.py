"""Acceptance suite for the sidecar: one test per release criterion, each
printing a `[acceptance] <criterion>: PASS|FAIL` line (run with -s)."""

import random
import time
from contextlib import contextmanager
from pathlib import Path

from ner_sidecar.annotate import annotate_corpus
from ner_sidecar.data import load_dataset
from ner_sidecar.folds import split_folds_by_title
from ner_sidecar.train import TrainConfig, fit_full, train_and_eval

from sidecar_testutil import separable_dataset

PRIMARY_FIXTURES = Path(__file__).resolve().parents[2] / "tests" / "fixtures"


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


def test_fold_hygiene():
    with criterion("fold hygiene"):
        rng = random.Random(11)
        for _ in range(100):
            n_titles = rng.randint(5, 40)
            titles = [f"t{i}" for i in range(n_titles)]
            # resampled copies repeat their title
            entries = titles + [rng.choice(titles)
                                for _ in range(rng.randint(0, 30))]
            rng.shuffle(entries)
            plan = split_folds_by_title(entries, seed=rng.randint(0, 999))
            folds = plan.folds
            for i, fold in enumerate(folds):
                others = set().union(*(f for j, f in enumerate(folds) if j != i))
                assert fold.isdisjoint(others)
            assert set().union(*folds) == set(titles)
            # every copy of a title resolves to the same fold assignment
            assert all(entry in plan.assignment for entry in entries)


def test_trainability_smoke():
    with criterion("trainability smoke"):
        start = time.perf_counter()
        dataset = separable_dataset(n_docs=25, sentences_per_doc=8, seed=1)
        assert sum(len(d.sentences) for d in dataset.documents) <= 200
        plan = split_folds_by_title(dataset.titles, seed=0)
        config = TrainConfig(model="small", learning_rate=5e-3, epochs=20,
                             seed=0)
        table = train_and_eval(dataset, plan, config)
        elapsed = time.perf_counter() - start
        assert table.mean.f1 >= 0.95, table.mean
        assert elapsed < 300, f"took {elapsed:.0f}s"


def test_cross_component_roundtrip(tmp_path):
    with criterion("cross-component round-trip"):
        from litgraph.annotations import parse_standoff, write_bio
        from litgraph.records import TextDocument
        from litgraph.tagging import tag_gazetteer
        from litgraph.taxonomy import (build_gazetteer,
                                       default_gazetteer_aliases,
                                       load_taxonomy)

        texts_dir = PRIMARY_FIXTURES / "corpus12" / "cache" / "texts"
        taxonomy = load_taxonomy()
        gazetteer = build_gazetteer(taxonomy, default_gazetteer_aliases())

        # training data: the fixture corpus labelled by the gazetteer
        bio_dir = tmp_path / "bio"
        bio_dir.mkdir()
        expected_counts = {}
        for txt in sorted(texts_dir.glob("*.txt")):
            text = txt.read_text(encoding="utf-8")
            doc = TextDocument(txt.stem, text, source="supplied")
            ann = tag_gazetteer(doc, gazetteer)
            expected_counts[txt.stem] = len(ann)
            (bio_dir / f"{txt.stem}.bio").write_text(write_bio(text, ann),
                                                     encoding="utf-8")
        dataset = load_dataset(bio_dir)
        bundle = fit_full(dataset, TrainConfig(learning_rate=5e-3, epochs=20,
                                               seed=0))

        ann_dir = tmp_path / "ann"
        counts = annotate_corpus(bundle, texts_dir, ann_dir)
        for txt in sorted(texts_dir.glob("*.txt")):
            raw = (ann_dir / f"{txt.stem}.ann").read_text(encoding="utf-8")
            parsed = parse_standoff(raw, txt.read_text(encoding="utf-8"),
                                    txt.stem)
            assert len(parsed) == counts[txt.stem]
        assert counts == expected_counts
