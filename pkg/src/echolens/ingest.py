"""Tweet dataset ingestion: parsing, keyword filtering, text normalization.

Input formats
-------------
Tweets arrive as JSON-lines (one object per line) or CSV with a header row.
Field names are configurable through a schema mapping so datasets with
different column names can be consumed without rewriting them.

Polarity probabilities arrive as JSON-lines objects
``{tweet_id, p_russia, p_notsure, p_ukraine}``.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, TextIO

from .errors import InputError, SchemaError, ValidationError

logger = logging.getLogger(__name__)

PROB_SUM_TOL = 1e-6

# Fields a schema must map; everything else has a default.
MANDATORY_FIELDS = ("tweet_id", "author_id", "text")

DEFAULT_SCHEMA = {
    "tweet_id": "tweet_id",
    "author_id": "author_id",
    "text": "text",
    "retweet_count": "retweet_count",
    "like_count": "like_count",
    "referenced_tweet_id": "referenced_tweet_id",
    "author_followers": "author_followers",
    "verified": "verified",
    "timestamp": "timestamp",
    "lang": "lang",
}


@dataclass(frozen=True)
class TweetRecord:
    tweet_id: str
    author_id: str
    text: str
    retweet_count: int = 0
    like_count: int = 0
    referenced_tweet_id: str | None = None
    author_followers: int = 0
    verified: bool = False
    timestamp: str | None = None
    lang: str | None = None

    @property
    def is_retweet(self) -> bool:
        return self.referenced_tweet_id is not None

    def validate(self) -> None:
        if not self.tweet_id or not self.author_id:
            raise ValidationError("tweet_id and author_id must be non-empty")
        if self.retweet_count < 0 or self.like_count < 0:
            raise ValidationError(
                f"tweet {self.tweet_id}: negative engagement count"
            )
        if self.author_followers < 0:
            raise ValidationError(f"tweet {self.tweet_id}: negative follower count")
        if self.referenced_tweet_id == self.tweet_id:
            raise ValidationError(
                f"tweet {self.tweet_id}: references itself"
            )


@dataclass(frozen=True)
class PolarityTriple:
    """Classifier probabilities over (pro-Russia, not-sure, pro-Ukraine)."""

    p_russia: float
    p_notsure: float
    p_ukraine: float

    def validate(self, owner: str = "") -> None:
        parts = (self.p_russia, self.p_notsure, self.p_ukraine)
        label = f" for tweet {owner}" if owner else ""
        if any(p < 0.0 or p > 1.0 for p in parts):
            raise ValidationError(f"probability outside [0,1]{label}: {parts}")
        if abs(sum(parts) - 1.0) > PROB_SUM_TOL:
            raise ValidationError(
                f"probabilities sum to {sum(parts)!r}, not 1{label}"
            )


@dataclass(frozen=True)
class KeywordFilter:
    """Case-insensitive substring terms plus whole-token hashtags."""

    terms: frozenset[str]
    hashtags: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "terms", frozenset(t.lower() for t in self.terms))
        object.__setattr__(
            self,
            "hashtags",
            frozenset(h.lower().lstrip("#") for h in self.hashtags),
        )
        if not self.terms and not self.hashtags:
            raise ValidationError("keyword filter needs at least one term or hashtag")

    def matches(self, text: str) -> bool:
        low = text.lower()
        if any(term in low for term in self.terms):
            return True
        if self.hashtags:
            for tag in _HASHTAG_RE.findall(low):
                if tag in self.hashtags:
                    return True
        return False


# Topic filter shipped as the default, covering both sides of the discussion.
DEFAULT_FILTER = KeywordFilter(
    terms=frozenset({"russia", "ukraine"}),
    hashtags=frozenset(
        {"istandwithrussia", "stoprussia", "istandwithputin", "russiaukrainewar"}
    ),
)


@dataclass
class ParseReport:
    total_lines: int = 0
    parsed: int = 0
    malformed: int = 0
    messages: list[str] = field(default_factory=list)

    def note(self, msg: str, cap: int = 20) -> None:
        self.malformed += 1
        if len(self.messages) < cap:
            self.messages.append(msg)


_HASHTAG_RE = re.compile(r"#(\w+)")
_RT_PREFIX_RE = re.compile(r"\bRT\s*@\w+:?", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")
_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
# Pictograph/emoji ranges stripped during normalization.  Everything outside
# the Basic Multilingual Plane goes too, which covers the supplementary
# emoji blocks without enumerating them.
_EMOJI_BMP_RE = re.compile("[←-⇿☀-➿⬀-⯿︎️]")
_WS_RE = re.compile(r"\s+")


def preprocess_text(text: str) -> str:
    """Normalize tweet text for scoring and classification.

    Steps, in order: drop retweet prefixes and user mentions; drop
    hyperlinks and emoji; drop every remaining non-alphanumeric character;
    collapse whitespace. The result may be empty.
    """
    s = _RT_PREFIX_RE.sub(" ", text)
    s = _MENTION_RE.sub(" ", s)
    s = _URL_RE.sub(" ", s)
    s = _EMOJI_BMP_RE.sub("", s)
    s = "".join(c for c in s if ord(c) <= 0xFFFF)
    s = "".join(c if c.isalnum() else " " for c in s)
    return _WS_RE.sub(" ", s).strip()


def filter_keywords(
    records: Iterable[TweetRecord], kw: KeywordFilter = DEFAULT_FILTER
) -> list[TweetRecord]:
    """Keep records whose text matches the filter; order preserved."""
    return [r for r in records if kw.matches(r.text)]


def load_keyword_filter(path: str) -> KeywordFilter:
    """Read a filter from a JSON file {"terms": [...], "hashtags": [...]}."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read keyword filter {path}: {exc}") from exc
    return KeywordFilter(
        terms=frozenset(raw.get("terms", [])),
        hashtags=frozenset(raw.get("hashtags", [])),
    )


def _coerce_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return bool(value)
    return str(value).strip().lower() in ("1", "true", "t", "yes")


def _coerce_int(value, default: int = 0) -> int:
    if value is None or value == "":
        return default
    return int(value)


def _record_from_mapping(raw: Mapping, schema: Mapping[str, str]) -> TweetRecord:
    def get(field_name: str):
        key = schema.get(field_name)
        if key is None:
            return None
        value = raw.get(key)
        return value if value != "" else None

    ref = get("referenced_tweet_id")
    ts = get("timestamp")
    lang = get("lang")
    rec = TweetRecord(
        tweet_id=str(raw[schema["tweet_id"]]),
        author_id=str(raw[schema["author_id"]]),
        text=str(raw.get(schema["text"], "") or ""),
        retweet_count=_coerce_int(get("retweet_count")),
        like_count=_coerce_int(get("like_count")),
        referenced_tweet_id=str(ref) if ref is not None else None,
        author_followers=_coerce_int(get("author_followers")),
        verified=_coerce_bool(get("verified") or False),
        timestamp=str(ts) if ts is not None else None,
        lang=str(lang) if lang is not None else None,
    )
    rec.validate()
    return rec


def _check_schema(schema: Mapping[str, str]) -> dict[str, str]:
    merged = dict(DEFAULT_SCHEMA)
    merged.update(schema)
    missing = [f for f in MANDATORY_FIELDS if not merged.get(f)]
    if missing:
        raise SchemaError(f"schema is missing mandatory fields: {missing}")
    return merged


def parse_tweets(
    source: str | TextIO,
    schema: Mapping[str, str] | None = None,
    fmt: str | None = None,
) -> tuple[list[TweetRecord], ParseReport]:
    """Parse a tweet dataset into validated records.

    ``source`` is a path or an open text stream.  ``fmt`` is "jsonl" or
    "csv"; when omitted it is inferred from the path suffix (streams
    default to jsonl).  Malformed lines are counted in the report, never
    silently dropped.  Duplicate tweet ids abort with a ValidationError
    naming the offenders.
    """
    merged = _check_schema(schema or {})
    close = False
    if isinstance(source, str):
        if fmt is None:
            fmt = "csv" if source.lower().endswith(".csv") else "jsonl"
        try:
            fh: TextIO = open(source, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read tweet file {source}: {exc}") from exc
        close = True
    else:
        fh = source
        fmt = fmt or "jsonl"

    report = ParseReport()
    records: list[TweetRecord] = []
    seen: dict[str, int] = {}
    dupes: list[str] = []
    try:
        if fmt == "csv":
            rows: Iterable[Mapping] = csv.DictReader(fh)
        else:
            rows = _iter_jsonl(fh, report)
        for raw in rows:
            report.total_lines += 1
            try:
                rec = _record_from_mapping(raw, merged)
            except (KeyError, TypeError, ValueError, ValidationError) as exc:
                report.note(f"line {report.total_lines}: {exc}")
                continue
            if rec.tweet_id in seen:
                dupes.append(rec.tweet_id)
                continue
            seen[rec.tweet_id] = 1
            records.append(rec)
            report.parsed += 1
    finally:
        if close:
            fh.close()
    if dupes:
        raise ValidationError(f"duplicate tweet_id values: {sorted(set(dupes))[:20]}")
    if report.malformed:
        logger.warning("parse_tweets: %d malformed lines skipped", report.malformed)
    return records, report


def _iter_jsonl(fh: TextIO, report: ParseReport):
    for line in fh:
        line = line.strip()
        if not line:
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as exc:
            report.total_lines += 1
            report.note(f"bad json: {exc}")


def write_tweets(records: Iterable[TweetRecord], path: str) -> None:
    """Serialize records to JSON-lines under the default field names."""
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {
                "tweet_id": r.tweet_id,
                "author_id": r.author_id,
                "text": r.text,
                "retweet_count": r.retweet_count,
                "like_count": r.like_count,
                "referenced_tweet_id": r.referenced_tweet_id,
                "author_followers": r.author_followers,
                "verified": r.verified,
                "timestamp": r.timestamp,
                "lang": r.lang,
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def parse_probs(source: str | TextIO) -> dict[str, PolarityTriple]:
    """Read a polarity-probability JSON-lines file keyed by tweet_id."""
    close = False
    if isinstance(source, str):
        try:
            fh: TextIO = open(source, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read probability file {source}: {exc}") from exc
        close = True
    else:
        fh = source
    probs: dict[str, PolarityTriple] = {}
    try:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                triple = PolarityTriple(
                    p_russia=float(raw["p_russia"]),
                    p_notsure=float(raw["p_notsure"]),
                    p_ukraine=float(raw["p_ukraine"]),
                )
                tid = str(raw["tweet_id"])
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValidationError(f"bad probability line: {line[:80]} ({exc})")
            triple.validate(owner=tid)
            probs[tid] = triple
    finally:
        if close:
            fh.close()
    return probs


def write_probs(probs: Mapping[str, PolarityTriple], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for tid in probs:
            t = probs[tid]
            fh.write(
                json.dumps(
                    {
                        "tweet_id": tid,
                        "p_russia": t.p_russia,
                        "p_notsure": t.p_notsure,
                        "p_ukraine": t.p_ukraine,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def join_polarity(
    records: Sequence[TweetRecord],
    probs: Mapping[str, PolarityTriple],
) -> tuple[list[tuple[TweetRecord, PolarityTriple]], int]:
    """Inner-join records with their probability triples on tweet_id.

    Returns the joined pairs in record order plus the count of records that
    had no matching triple.  Tweets without probabilities are excluded, not
    defaulted: the toolkit never invents a stance.
    """
    pairs: list[tuple[TweetRecord, PolarityTriple]] = []
    unmatched = 0
    for rec in records:
        triple = probs.get(rec.tweet_id)
        if triple is None:
            unmatched += 1
            continue
        triple.validate(owner=rec.tweet_id)
        pairs.append((rec, triple))
    if unmatched:
        logger.info("join_polarity: %d records had no probability triple", unmatched)
    return pairs, unmatched


def write_pairs(
    pairs: Iterable[tuple[TweetRecord, PolarityTriple]], path: str
) -> None:
    """Write joined (record, triple) pairs as a single JSON-lines file."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec, triple in pairs:
            obj = {
                "tweet_id": rec.tweet_id,
                "author_id": rec.author_id,
                "text": rec.text,
                "retweet_count": rec.retweet_count,
                "like_count": rec.like_count,
                "referenced_tweet_id": rec.referenced_tweet_id,
                "author_followers": rec.author_followers,
                "verified": rec.verified,
                "timestamp": rec.timestamp,
                "lang": rec.lang,
                "p_russia": triple.p_russia,
                "p_notsure": triple.p_notsure,
                "p_ukraine": triple.p_ukraine,
            }
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_pairs(path: str) -> list[tuple[TweetRecord, PolarityTriple]]:
    pairs: list[tuple[TweetRecord, PolarityTriple]] = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read pairs file {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            raw = json.loads(line)
            rec = TweetRecord(
                tweet_id=str(raw["tweet_id"]),
                author_id=str(raw["author_id"]),
                text=raw.get("text", ""),
                retweet_count=int(raw.get("retweet_count", 0)),
                like_count=int(raw.get("like_count", 0)),
                referenced_tweet_id=raw.get("referenced_tweet_id"),
                author_followers=int(raw.get("author_followers", 0)),
                verified=bool(raw.get("verified", False)),
                timestamp=raw.get("timestamp"),
                lang=raw.get("lang"),
            )
            triple = PolarityTriple(
                p_russia=float(raw["p_russia"]),
                p_notsure=float(raw["p_notsure"]),
                p_ukraine=float(raw["p_ukraine"]),
            )
            pairs.append((rec, triple))
    return pairs
