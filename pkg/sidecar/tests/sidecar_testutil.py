import random

from ner_sidecar.data import DEFAULT_LABELS, BioDataset, Document, Sentence

LEXICON = {
    "Blockchain_Name": ["bitcoin", "ethereum", "cardano"],
    "Consensus": ["pow", "pos", "paxos"],
    "ESG": ["sustainability", "emissions", "renewable"],
    "Security_Privacy": ["sybil", "phishing"],
}
FILLER = ["the", "uses", "network", "with", "paper", "study", "shows", "a"]


def separable_dataset(n_docs=25, sentences_per_doc=8, seed=1) -> BioDataset:
    """Synthetic corpus where each surface maps to exactly one label."""
    rng = random.Random(seed)
    docs = []
    for d in range(n_docs):
        sents = []
        for _ in range(sentences_per_doc):
            tokens, tags = [], []
            for _ in range(rng.randint(4, 8)):
                if rng.random() < 0.4:
                    label = rng.choice(list(LEXICON))
                    tokens.append(rng.choice(LEXICON[label]))
                    tags.append(f"B-{label}")
                else:
                    tokens.append(rng.choice(FILLER))
                    tags.append("O")
            sents.append(Sentence(tokens, tags))
        docs.append(Document(name=f"doc{d:02d}", title=f"doc{d:02d}",
                             sentences=sents))
    return BioDataset(documents=docs, labels=DEFAULT_LABELS)
