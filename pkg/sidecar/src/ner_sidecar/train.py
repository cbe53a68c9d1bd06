"""Training and cross-validated evaluation."""

from __future__ import annotations

import random
from dataclasses import dataclass

import torch

from .data import BioDataset, DatasetError, Sentence
from .folds import FoldPlan
from .metrics import MetricsTable, score_fold
from .model import (ModelBundle, WordVocab, build_checkpoint_model,
                    build_small_model)


@dataclass(frozen=True)
class TrainConfig:
    model: str = "small"
    learning_rate: float = 5e-5
    epochs: int = 20
    train_batch: int = 16
    eval_batch: int = 32
    max_seq_len: int = 256
    seed: int = 0
    n_folds: int = 5

    def __post_init__(self):
        for name in ("learning_rate", "epochs", "train_batch", "eval_batch",
                     "max_seq_len", "n_folds"):
            if getattr(self, name) <= 0:
                raise DatasetError(f"{name} must be positive")


class WordEncoder:
    """One model position per word."""

    def __init__(self, vocab: WordVocab):
        self.vocab = vocab

    def encode(self, tokens: list[str]) -> tuple[list[int], list[int]]:
        ids = self.vocab.encode(tokens)
        return ids, list(range(len(ids)))

    pad_id = 0


class SubwordEncoder:
    """Checkpoint tokenizer; labels sit on each word's first subword."""

    def __init__(self, tokenizer):
        self.tokenizer = tokenizer
        self.pad_id = tokenizer.pad_token_id

    def encode(self, tokens: list[str]) -> tuple[list[int], list[int]]:
        ids = [self.tokenizer.cls_token_id]
        positions = []
        for token in tokens:
            pieces = self.tokenizer.encode(token, add_special_tokens=False)
            if not pieces:
                pieces = [self.tokenizer.unk_token_id]
            positions.append(len(ids))
            ids.extend(pieces)
        ids.append(self.tokenizer.sep_token_id)
        return ids, positions


def _encode_sentences(sentences: list[Sentence], encoder, tag_index,
                      max_seq_len: int):
    """(input_ids, word_positions, label_ids) per sentence, truncated."""
    encoded = []
    for sentence in sentences:
        ids, positions = encoder.encode(sentence.tokens)
        ids = ids[:max_seq_len]
        kept = [(pos, tag) for pos, tag in zip(positions, sentence.tags)
                if pos < max_seq_len]
        try:
            labels = [(pos, tag_index[tag]) for pos, tag in kept]
        except KeyError as exc:
            raise DatasetError(f"unknown tag {exc.args[0]!r}") from exc
        encoded.append((ids, [p for p, _ in kept], labels))
    return encoded


def _batches(encoded, batch_size: int, pad_id: int, order=None):
    order = list(order) if order is not None else list(range(len(encoded)))
    for lo in range(0, len(order), batch_size):
        chunk = [encoded[i] for i in order[lo:lo + batch_size]]
        width = max(len(ids) for ids, _, _ in chunk)
        input_ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        attention = torch.zeros((len(chunk), width), dtype=torch.long)
        labels = torch.full((len(chunk), width), -100, dtype=torch.long)
        for row, (ids, _, lab) in enumerate(chunk):
            input_ids[row, :len(ids)] = torch.tensor(ids)
            attention[row, :len(ids)] = 1
            for pos, tag_id in lab:
                labels[row, pos] = tag_id
        yield input_ids, attention, labels, chunk


def _train_model(model, encoded, config: TrainConfig, pad_id: int,
                 rng: random.Random) -> None:
    model.train()
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    for _ in range(config.epochs):
        order = list(range(len(encoded)))
        rng.shuffle(order)
        for input_ids, attention, labels, _ in _batches(
                encoded, config.train_batch, pad_id, order):
            optimizer.zero_grad()
            out = model(input_ids=input_ids, attention_mask=attention,
                        labels=labels)
            out.loss.backward()
            optimizer.step()
    model.eval()


def _predict(model, encoded, tags: list[str], eval_batch: int,
             pad_id: int) -> list[list[str]]:
    predictions = []
    with torch.no_grad():
        for input_ids, attention, _, chunk in _batches(encoded, eval_batch,
                                                       pad_id):
            logits = model(input_ids=input_ids,
                           attention_mask=attention).logits
            best = logits.argmax(dim=-1)
            for row, (ids, positions, _) in enumerate(chunk):
                predictions.append([tags[best[row, pos]] for pos in positions])
    return predictions


def _make_model_and_encoder(train_sentences, num_tags: int,
                            config: TrainConfig):
    if config.model == "small":
        vocab = WordVocab.build(train_sentences)
        model = build_small_model(len(vocab), num_tags, config.max_seq_len)
        return model, WordEncoder(vocab), vocab, None
    model, tokenizer = build_checkpoint_model(config.model, num_tags)
    return model, SubwordEncoder(tokenizer), None, tokenizer


def train_and_eval(dataset: BioDataset, fold_plan: FoldPlan,
                   config: TrainConfig) -> MetricsTable:
    """Per-fold entity-level precision/recall/F1 and token accuracy."""
    tags = dataset.tag_vocabulary()
    tag_index = {t: i for i, t in enumerate(tags)}
    fold_rows = []
    for fold in range(fold_plan.n_folds):
        torch.manual_seed(config.seed * 1000 + fold)
        rng = random.Random(config.seed * 1000 + fold)
        train_docs, test_docs = fold_plan.split(dataset, fold)
        train_sents = [s for d in train_docs for s in d.sentences]
        test_sents = [s for d in test_docs for s in d.sentences]
        model, encoder, _, _ = _make_model_and_encoder(train_sents,
                                                       len(tags), config)
        train_enc = _encode_sentences(train_sents, encoder, tag_index,
                                      config.max_seq_len)
        test_enc = _encode_sentences(test_sents, encoder, tag_index,
                                     config.max_seq_len)
        _train_model(model, train_enc, config, encoder.pad_id, rng)
        predicted = _predict(model, test_enc, tags, config.eval_batch,
                             encoder.pad_id)
        # gold tags truncated the same way the encoder truncated inputs
        gold = [[tags[t] for _, t in labels] for _, _, labels in test_enc]
        fold_rows.append(score_fold(f"fold{fold + 1}", gold, predicted))
    return MetricsTable(folds=tuple(fold_rows))


def fit_full(dataset: BioDataset, config: TrainConfig) -> ModelBundle:
    """Train one model on the whole dataset for corpus annotation."""
    tags = dataset.tag_vocabulary()
    tag_index = {t: i for i, t in enumerate(tags)}
    torch.manual_seed(config.seed)
    rng = random.Random(config.seed)
    sentences = [s for d in dataset.documents for s in d.sentences]
    model, encoder, vocab, tokenizer = _make_model_and_encoder(
        sentences, len(tags), config)
    encoded = _encode_sentences(sentences, encoder, tag_index,
                                config.max_seq_len)
    _train_model(model, encoded, config, encoder.pad_id, rng)
    return ModelBundle(model=model, tags=tags, max_seq_len=config.max_seq_len,
                       vocab=vocab, tokenizer=tokenizer)
