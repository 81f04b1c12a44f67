"""Text normalization applied before feature extraction.

Mirrors the downstream toolkit's normalization contract: mentions and
retweet prefixes go first, then hyperlinks and emoji, then every remaining
non-alphanumeric character; whitespace collapses to single spaces.
"""

from __future__ import annotations

import re

_RT_PREFIX_RE = re.compile(r"\bRT\s*@\w+:?", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_EMOJI_BMP_RE = re.compile("[←-⇿☀-➿⬀-⯿︎️]")
_WS_RE = re.compile(r"\s+")


def preprocess_text(text: str) -> str:
    s = _RT_PREFIX_RE.sub(" ", text)
    s = _MENTION_RE.sub(" ", s)
    s = _URL_RE.sub(" ", s)
    s = _EMOJI_BMP_RE.sub("", s)
    s = "".join(c for c in s if ord(c) <= 0xFFFF)
    s = "".join(c if c.isalnum() else " " for c in s)
    return _WS_RE.sub(" ", s).strip()
