"""Token-classification sidecar: fine-tune a transformer on BIO exports with
title-grouped 5-fold cross-validation, then annotate documents into brat
standoff files."""

__version__ = "0.1.0"
