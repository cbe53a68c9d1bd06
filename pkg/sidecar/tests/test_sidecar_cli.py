import random

import pytest
from click.testing import CliRunner

from ner_sidecar.cli import main

from sidecar_testutil import LEXICON, FILLER


@pytest.fixture()
def dataset_dir(tmp_path):
    rng = random.Random(2)
    root = tmp_path / "bio"
    root.mkdir()
    for d in range(8):
        lines = []
        for _ in range(4):
            for _ in range(5):
                if rng.random() < 0.4:
                    label = rng.choice(list(LEXICON))
                    lines.append(f"{rng.choice(LEXICON[label])}\tB-{label}")
                else:
                    lines.append(f"{rng.choice(FILLER)}\tO")
            lines.append("")
        (root / f"doc{d}.bio").write_text("\n".join(lines), encoding="utf-8")
    return root


def test_train_then_annotate(tmp_path, dataset_dir):
    out = tmp_path / "out"
    (tmp_path / "train.yaml").write_text(
        f"dataset: {dataset_dir}\noutput: {out}\n"
        "learning_rate: 0.005\nepochs: 10\nseed: 0\n")
    runner = CliRunner()
    result = runner.invoke(main, ["train", "--config",
                                  str(tmp_path / "train.yaml")])
    assert result.exit_code == 0, result.output
    assert (out / "metrics.csv").exists()
    assert (out / "model" / "meta.json").exists()

    docs = tmp_path / "docs"
    docs.mkdir()
    (docs / "d.txt").write_text("the bitcoin paper uses pow", encoding="utf-8")
    (tmp_path / "annotate.yaml").write_text(
        f"model_dir: {out / 'model'}\ndocuments: {docs}\n"
        f"output: {tmp_path / 'ann'}\n")
    result = runner.invoke(main, ["annotate", "--config",
                                  str(tmp_path / "annotate.yaml")])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "ann" / "d.ann").exists()


def test_train_unknown_key_exits_2(tmp_path):
    (tmp_path / "bad.yaml").write_text("dataset: x\noutput: y\nbogus: 1\n")
    result = CliRunner().invoke(main, ["train", "--config",
                                       str(tmp_path / "bad.yaml")])
    assert result.exit_code == 2
    assert "bogus" in result.output


def test_train_missing_config_exits_2(tmp_path):
    result = CliRunner().invoke(main, ["train", "--config",
                                       str(tmp_path / "none.yaml")])
    assert result.exit_code == 2


def test_annotate_missing_keys_exits_2(tmp_path):
    (tmp_path / "bad.yaml").write_text("documents: x\n")
    result = CliRunner().invoke(main, ["annotate", "--config",
                                       str(tmp_path / "bad.yaml")])
    assert result.exit_code == 2
