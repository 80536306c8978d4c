"""TF-IDF scoring of post text and configuration-driven filter matching.

``idf`` uses the natural logarithm; the base only rescales scores and
never changes rankings.  Terms that never occur in the corpus have no
defined document frequency, so ``idf`` refuses them instead of smoothing.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

try:
    import tomllib as _toml
except ModuleNotFoundError:
    import tomli as _toml

__all__ = [
    "tokenize",
    "Corpus",
    "tf",
    "idf",
    "tfidf",
    "KeywordConstraint",
    "FilterRule",
    "match_rules",
    "load_rules",
]

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> list:
    """Lowercased word tokens; punctuation splits, external segmenters can
    bypass this by supplying pre-tokenized documents."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Corpus:
    """An immutable collection of tokenized documents."""

    documents: tuple

    def __post_init__(self):
        object.__setattr__(self, "documents",
                           tuple(tuple(doc) for doc in self.documents))
        df: Counter = Counter()
        for doc in self.documents:
            df.update(set(doc))
        object.__setattr__(self, "_df", dict(df))

    @classmethod
    def from_texts(cls, texts) -> "Corpus":
        return cls(tuple(tuple(tokenize(t)) for t in texts))

    @classmethod
    def from_file(cls, path) -> "Corpus":
        with open(path, "r", encoding="utf-8") as handle:
            lines = [line.rstrip("\n") for line in handle]
        return cls.from_texts([line for line in lines if line.strip()])

    def __len__(self) -> int:
        return len(self.documents)

    def document_frequency(self, term: str) -> int:
        return self._df.get(term, 0)


def tf(term: str, document) -> float:
    """Occurrence share of ``term`` in ``document``: n(t,d) / sum_k n(k,d)."""
    document = tuple(document)
    if not document:
        raise ValueError("empty document")
    return document.count(term) / len(document)


def idf(term: str, corpus: Corpus) -> float:
    """log(|D| / df(t)), natural log; the term must occur in the corpus."""
    if len(corpus) < 1:
        raise ValueError("empty corpus")
    df = corpus.document_frequency(term)
    if df == 0:
        raise ValueError(f"term not in corpus: {term!r}")
    return math.log(len(corpus) / df)


def tfidf(term: str, document, corpus: Corpus) -> float:
    """tf * idf; exactly 0 when the term is absent from the document."""
    weight = tf(term, document)
    if weight == 0.0:
        return 0.0
    return weight * idf(term, corpus)


@dataclass(frozen=True)
class KeywordConstraint:
    term: str
    min_tfidf: float


@dataclass(frozen=True)
class FilterRule:
    """A configured filter: a category path label, a minimum evaluation and
    optional keyword score floors.  Rule contents arrive as configuration;
    no induction happens here."""

    id: int
    category_pattern: str
    min_evaluation: int
    keywords: tuple = ()

    def __post_init__(self):
        if self.min_evaluation not in (0, 1, 2, 3, 4):
            raise ValueError("min_evaluation must be in 0..4")


def _keyword_score(term: str, document, corpus: Corpus) -> float:
    # A keyword the corpus has never seen scores 0 rather than erroring.
    if corpus.document_frequency(term) == 0:
        return 0.0
    return tfidf(term, document, corpus)


def match_rules(post, rules, corpus: Corpus):
    """First rule (lowest id) matching ``post``; None when nothing fires.

    ``post`` is ``(category_label, evaluation, tokens)``.  A rule matches
    when its pattern equals the label, its minimum evaluation is not above
    the post's, and every keyword reaches its tfidf floor.
    """
    label, evaluation, tokens = post
    tokens = tuple(tokens)
    for rule in sorted(rules, key=lambda r: r.id):
        if rule.category_pattern != label:
            continue
        if evaluation < rule.min_evaluation:
            continue
        if all(_keyword_score(kw.term, tokens, corpus) >= kw.min_tfidf
               for kw in rule.keywords):
            return rule.id
    return None


def load_rules(path) -> list:
    """Read filter rules from a TOML file with ``[[rules]]`` tables.

    Each table needs ``id``, ``category_pattern`` and ``min_evaluation``;
    ``keywords`` is an optional array of ``{term, min_tfidf}`` tables.
    """
    with open(path, "rb") as handle:
        raw = _toml.load(handle)
    tables = raw.get("rules", [])
    rules = []
    for table in tables:
        keywords = tuple(
            KeywordConstraint(term=str(k["term"]), min_tfidf=float(k["min_tfidf"]))
            for k in table.get("keywords", ())
        )
        rules.append(FilterRule(
            id=int(table["id"]),
            category_pattern=str(table["category_pattern"]),
            min_evaluation=int(table["min_evaluation"]),
            keywords=keywords,
        ))
    return rules
