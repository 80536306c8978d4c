"""Majority-engagement transactions and pairwise association rules ranked
by lift.

Arithmetic stays rational (ints and ``Fraction``) until presentation so
confidence and lift compare exactly; only the CSV emitters render
decimals.  Only singleton -> singleton rules are mined; nothing here needs
a frequent-itemset lattice.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

__all__ = [
    "Item",
    "TransactionSet",
    "MinedRule",
    "build_transactions",
    "support",
    "confidence",
    "lift",
    "mine_pairs",
    "likes_from_event_records",
    "read_likes_csv",
    "rules_to_csv",
    "transactions_to_csv",
]

MAJORITY = Fraction(1, 2)


class Item(NamedTuple):
    """A (filter rule, category label) pair, e.g. ``(5, "[10][10]")``."""

    rule: int
    category: str

    def label(self) -> str:
        return f"Rule{self.rule},{self.category}"


@dataclass(frozen=True)
class TransactionSet:
    """One itemset per user, duplicates impossible by construction."""

    transactions: tuple

    def __post_init__(self):
        object.__setattr__(self, "transactions",
                           tuple(frozenset(t) for t in self.transactions))

    def __len__(self) -> int:
        return len(self.transactions)

    def items(self) -> list:
        return sorted({item for t in self.transactions for item in t})


def build_transactions(likes: Iterable, article_counts: dict,
                       threshold: Fraction = MAJORITY) -> TransactionSet:
    """Per-user itemsets of buckets the user engaged with by majority.

    ``likes`` yields ``(user, rule, category, article)`` records and
    ``article_counts`` maps ``(rule, category)`` buckets to the number of
    articles posted there.  An item enters a user's transaction iff the
    user liked strictly more than ``threshold`` of the bucket's articles.
    Users whose itemsets come out empty are dropped.
    """
    threshold = Fraction(threshold)
    per_user: dict = defaultdict(lambda: defaultdict(set))
    for user, rule, category, article in likes:
        bucket = (int(rule), str(category))
        if bucket not in article_counts:
            raise ValueError(
                f"like references unknown bucket (rule={rule}, category={category!r})")
        per_user[user][bucket].add(article)

    transactions = []
    for user in sorted(per_user):
        itemset = set()
        for bucket, liked_articles in per_user[user].items():
            total = article_counts[bucket]
            if total > 0 and Fraction(len(liked_articles), total) > threshold:
                itemset.add(Item(*bucket))
        if itemset:
            transactions.append(frozenset(itemset))
    return TransactionSet(tuple(transactions))


def support(itemset, transactions: TransactionSet) -> int:
    """Number of transactions containing every item; supp(empty) = |T|."""
    items = frozenset(itemset)
    return sum(1 for t in transactions.transactions if items <= t)


def confidence(antecedent, consequent, transactions: TransactionSet) -> Fraction:
    """supp(X u Y) / supp(X), exact."""
    supp_x = support(antecedent, transactions)
    if supp_x == 0:
        raise ValueError("confidence undefined: antecedent has zero support")
    both = support(frozenset(antecedent) | frozenset(consequent), transactions)
    return Fraction(both, supp_x)


def lift(antecedent, consequent, transactions: TransactionSet) -> Fraction:
    """confidence(X -> Y) / (supp(Y) / |T|), exact."""
    supp_y = support(consequent, transactions)
    if supp_y == 0:
        raise ValueError("lift undefined: consequent has zero support")
    conf = confidence(antecedent, consequent, transactions)
    return conf / Fraction(supp_y, len(transactions))


@dataclass(frozen=True)
class MinedRule:
    antecedent: frozenset
    consequent: frozenset
    support: int
    confidence: Fraction
    lift: Fraction

    def label(self) -> str:
        x = " ".join(i.label() for i in sorted(self.antecedent))
        y = " ".join(i.label() for i in sorted(self.consequent))
        return f"{x} => {y}"


def mine_pairs(transactions: TransactionSet, min_support: int = 1,
               min_confidence=0) -> list:
    """All singleton -> singleton rules over distinct items with
    supp(X u Y) >= min_support and confidence >= min_confidence, sorted by
    lift descending, ties by support descending then item order."""
    min_confidence = Fraction(min_confidence)
    n = len(transactions)
    items = transactions.items()
    supports = {item: support((item,), transactions) for item in items}
    rules = []
    for x in items:
        for y in items:
            if x == y:
                continue
            both = support((x, y), transactions)
            if both < min_support:
                continue
            conf = Fraction(both, supports[x])
            if conf < min_confidence:
                continue
            rule_lift = conf / Fraction(supports[y], n)
            rules.append(MinedRule(
                antecedent=frozenset((x,)),
                consequent=frozenset((y,)),
                support=both,
                confidence=conf,
                lift=rule_lift,
            ))
    rules.sort(key=lambda r: (-r.lift, -r.support,
                              sorted(r.antecedent), sorted(r.consequent)))
    return rules


# --- ingestion and presentation ------------------------------------------------

def likes_from_event_records(posts: dict, likes: list):
    """Adapt engine event records to mining inputs.

    Filter-rule buckets coincide with category buckets in the simulator, so
    the rule id is the category id and the label is ``[<id>]``.  Returns
    ``(like_records, article_counts)``.
    """
    article_counts: dict = defaultdict(int)
    bucket_of: dict = {}
    for article, (_, category, _, _) in posts.items():
        bucket = (int(category), f"[{int(category)}]")
        bucket_of[article] = bucket
        article_counts[bucket] += 1
    records = [
        (agent, bucket_of[article][0], bucket_of[article][1], article)
        for _, agent, article, _ in likes
    ]
    return records, dict(article_counts)


def read_likes_csv(path):
    """Read a ``user,rule,category,article`` CSV (header optional).

    Bucket sizes are inferred as the number of distinct article ids seen
    per (rule, category); articles nobody liked are invisible here, so
    engine event files carry the exact counts instead.
    """
    records = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        for row_no, row in enumerate(reader, start=1):
            if not row or row[0].startswith("#"):
                continue
            if row_no == 1 and row[0].strip().lower() == "user":
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{row_no}: expected user,rule,category,article")
            user, rule, category, article = row
            records.append((int(user), int(rule), category.strip(), int(article)))
    buckets: dict = defaultdict(set)
    for _, rule, category, article in records:
        buckets[(rule, category)].add(article)
    article_counts = {bucket: len(arts) for bucket, arts in buckets.items()}
    return records, article_counts


def rules_to_csv(rules: list) -> str:
    """CSV with columns rule, support, confidence, lift (6 decimals)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rule", "support", "confidence", "lift"])
    for rule in rules:
        writer.writerow([
            rule.label(),
            rule.support,
            f"{float(rule.confidence):.6f}",
            f"{float(rule.lift):.6f}",
        ])
    return out.getvalue()


def transactions_to_csv(transactions: TransactionSet) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["transaction", "items"])
    for i, t in enumerate(transactions.transactions):
        writer.writerow([i, " ".join(item.label() for item in sorted(t))])
    return out.getvalue()
