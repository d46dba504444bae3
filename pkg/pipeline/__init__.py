"""Corpus handling, training, inference and evaluation stages of the CLI."""
