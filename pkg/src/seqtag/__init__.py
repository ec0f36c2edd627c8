"""Desk-scale biomedical sequence labeling: char-LM and subword embeddings,
a BiLSTM-CRF IOBES tagger, and offset-based span evaluation."""

__version__ = "0.1.0"
