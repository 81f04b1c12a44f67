"""Tweet stance classifier: train on annotated tweets, emit probability files."""

__version__ = "0.1.0"

LABELS = ("pro-Russia", "not-sure", "pro-Ukraine")
