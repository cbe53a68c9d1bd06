"""Corpus annotation: run a trained model over plain-text documents and
write brat standoff `.ann` files with character offsets."""

from __future__ import annotations

from pathlib import Path

import torch

from .data import Sentence, tokenize_with_offsets
from .model import ModelBundle
from .metrics import decode_spans
from .train import SubwordEncoder, WordEncoder, _encode_sentences, _predict


def annotate_text(bundle: ModelBundle, text: str) -> list[tuple[str, int, int, str]]:
    """(label, start, end, surface) spans for one document."""
    segments = [tokenize_with_offsets(line) for line in text.splitlines()]
    segments = [seg for seg in segments if seg]
    if not segments:
        return []
    if bundle.kind == "word":
        encoder = WordEncoder(bundle.vocab)
    else:
        encoder = SubwordEncoder(bundle.tokenizer)
    sentences = [Sentence([tok for tok, _, _ in seg], ["O"] * len(seg))
                 for seg in segments]
    tag_index = {t: i for i, t in enumerate(bundle.tags)}
    encoded = _encode_sentences(sentences, encoder, tag_index,
                                bundle.max_seq_len)
    with torch.no_grad():
        predicted = _predict(bundle.model, encoded, bundle.tags, 32,
                             encoder.pad_id)
    spans = []
    for seg, tags in zip(segments, predicted):
        for tok_start, tok_end, label in decode_spans(tags):
            start = seg[tok_start][1]
            end = seg[tok_end - 1][2]
            spans.append((label, start, end, text[start:end]))
    return spans


def serialize_spans(spans) -> str:
    lines = [
        f"T{i}\t{label} {start} {end}\t{surface}"
        for i, (label, start, end, surface) in enumerate(spans, start=1)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def annotate_corpus(bundle: ModelBundle, documents_dir: str | Path,
                    out_dir: str | Path) -> dict[str, int]:
    """Annotate every `.txt` under documents_dir; returns per-document
    entity counts."""
    docs = sorted(Path(documents_dir).glob("*.txt"))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counts: dict[str, int] = {}
    for path in docs:
        spans = annotate_text(bundle, path.read_text(encoding="utf-8"))
        (out / f"{path.stem}.ann").write_text(serialize_spans(spans),
                                              encoding="utf-8")
        counts[path.stem] = len(spans)
    return counts
