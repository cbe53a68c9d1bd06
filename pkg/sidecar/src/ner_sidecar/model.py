"""Model construction and persistence.

The default ``small`` model is a compact randomly initialized transformer
with a word-level vocabulary built from the training data; it trains in
minutes on CPU and needs no checkpoint download. Any other model name is
treated as a Hugging Face checkpoint id and fine-tuned with its own subword
tokenizer. The published checkpoint presets are:

    bert        bert-base-uncased
    albert      albert-base-v2
    distilbert  distilbert-base-uncased   (documented choice: ~60% faster
                                           at inference at ~97% of BERT's
                                           performance)
    scibert     allenai/scibert_scivocab_uncased
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import BertConfig, BertForTokenClassification

PRESET_CHECKPOINTS = {
    "bert": "bert-base-uncased",
    "albert": "albert-base-v2",
    "distilbert": "distilbert-base-uncased",
    "scibert": "allenai/scibert_scivocab_uncased",
}

PAD, UNK = "[PAD]", "[UNK]"


@dataclass
class WordVocab:
    index: dict[str, int]

    @classmethod
    def build(cls, sentences) -> "WordVocab":
        index = {PAD: 0, UNK: 1}
        for sentence in sentences:
            for token in sentence.tokens:
                index.setdefault(token.lower(), len(index))
        return cls(index=index)

    def encode(self, tokens: list[str]) -> list[int]:
        unk = self.index[UNK]
        return [self.index.get(t.lower(), unk) for t in tokens]

    def __len__(self) -> int:
        return len(self.index)


def resolve_model_name(name: str) -> str:
    return PRESET_CHECKPOINTS.get(name, name)


def build_small_model(vocab_size: int, num_tags: int,
                      max_seq_len: int) -> BertForTokenClassification:
    config = BertConfig(
        vocab_size=vocab_size,
        hidden_size=64,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=128,
        max_position_embeddings=max_seq_len,
        num_labels=num_tags,
        pad_token_id=0,
    )
    return BertForTokenClassification(config)


def build_checkpoint_model(name: str, num_tags: int):
    """Load a published checkpoint for fine-tuning. Needs hub access."""
    from transformers import AutoModelForTokenClassification, AutoTokenizer

    checkpoint = resolve_model_name(name)
    tokenizer = AutoTokenizer.from_pretrained(checkpoint)
    model = AutoModelForTokenClassification.from_pretrained(
        checkpoint, num_labels=num_tags)
    return model, tokenizer


@dataclass
class ModelBundle:
    """A trained model plus everything needed to tag new text."""

    model: torch.nn.Module
    tags: list[str]
    max_seq_len: int
    vocab: WordVocab | None = None  # word-level models
    tokenizer: object = None        # subword checkpoint models

    @property
    def kind(self) -> str:
        return "word" if self.vocab is not None else "subword"

    def save(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        meta = {"kind": self.kind, "tags": self.tags,
                "max_seq_len": self.max_seq_len}
        if self.kind == "word":
            torch.save(self.model.state_dict(), out / "model.pt")
            meta["vocab"] = self.vocab.index
        else:
            self.model.save_pretrained(out / "checkpoint")
            self.tokenizer.save_pretrained(out / "checkpoint")
        (out / "meta.json").write_text(json.dumps(meta), encoding="utf-8")
        return out

    @classmethod
    def load(cls, model_dir: str | Path) -> "ModelBundle":
        root = Path(model_dir)
        meta = json.loads((root / "meta.json").read_text(encoding="utf-8"))
        if meta["kind"] == "word":
            vocab = WordVocab(index=meta["vocab"])
            model = build_small_model(len(vocab), len(meta["tags"]),
                                      meta["max_seq_len"])
            model.load_state_dict(torch.load(root / "model.pt",
                                             weights_only=True))
            model.eval()
            return cls(model=model, tags=meta["tags"],
                       max_seq_len=meta["max_seq_len"], vocab=vocab)
        from transformers import (AutoModelForTokenClassification,
                                  AutoTokenizer)
        model = AutoModelForTokenClassification.from_pretrained(
            root / "checkpoint")
        tokenizer = AutoTokenizer.from_pretrained(root / "checkpoint")
        model.eval()
        return cls(model=model, tags=meta["tags"],
                   max_seq_len=meta["max_seq_len"], tokenizer=tokenizer)
