"""Text preparation and weak labeling for human/machine mail."""
