"""Reverse-mode layer library for the human/machine text models."""
