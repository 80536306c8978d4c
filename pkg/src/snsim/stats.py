"""Presentation aggregates: like-count histograms, modality counting and
the paired with/without-altruism category report.

The histogram stores exact per-like-count frequencies; log-log axes are a
rendering choice left to whatever consumes the emitted two-column file.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .engine import RunResult

__all__ = [
    "Histogram",
    "like_histogram",
    "modality_count",
    "CategoryRow",
    "SummaryRow",
    "CategoryReport",
    "engagement_ratio",
    "category_report",
    "RepostRow",
    "RepostReport",
    "repost_report",
    "histogram_to_csv",
    "category_report_to_csv",
    "category_report_to_text",
    "repost_report_to_csv",
    "repost_report_to_text",
]


@dataclass(frozen=True)
class Histogram:
    """Ordered (like_count, article_count) bins; zero-like articles are bin 0."""

    bins: tuple
    total_articles: int

    def counts(self) -> dict:
        return dict(self.bins)


def like_histogram(result: RunResult) -> Histogram:
    if result.n_articles == 0:
        return Histogram(bins=(), total_articles=0)
    frequencies = np.bincount(result.article_like_counts)
    bins = tuple(
        (int(count), int(articles))
        for count, articles in enumerate(frequencies) if articles
    )
    return Histogram(bins=bins, total_articles=result.n_articles)


def _smooth(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average of odd width (window rounds down to odd);
    frequencies outside the sequence count as zero."""
    half = (max(int(window), 1) - 1) // 2
    values = values.astype(np.float64)
    if half == 0:
        return values
    width = 2 * half + 1
    return np.convolve(values, np.full(width, 1.0 / width), mode="same")


def modality_count(histogram: Histogram, window: int = 1) -> int:
    """Number of local maxima of the smoothed frequency sequence.

    The sequence runs densely from the smallest to the largest occupied
    bin (interior zeros kept).  A maximum is a maximal run of equal
    smoothed values whose neighbours on both sides are strictly lower;
    boundary runs need only their single neighbour lower.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if not histogram.bins:
        return 0
    lo = histogram.bins[0][0]
    hi = histogram.bins[-1][0]
    dense = np.zeros(hi - lo + 1, dtype=np.int64)
    for count, articles in histogram.bins:
        dense[count - lo] = articles
    smoothed = _smooth(dense, window)
    n = smoothed.size
    maxima = 0
    i = 0
    while i < n:
        j = i
        while j + 1 < n and smoothed[j + 1] == smoothed[i]:
            j += 1
        left_lower = i == 0 or smoothed[i - 1] < smoothed[i]
        right_lower = j == n - 1 or smoothed[j + 1] < smoothed[i]
        if left_lower and right_lower:
            maxima += 1
        i = j + 1
    return maxima


# --- category report -----------------------------------------------------------

def engagement_ratio(like_mean: float, persons: int):
    """like_mean / persons; undefined (None) without any likers."""
    if persons <= 0:
        return None
    return like_mean / persons


@dataclass(frozen=True)
class CategoryRow:
    category: int
    articles_without: int
    like_mean_without: float
    persons_without: int
    ratio_without: object
    articles_with: int
    like_mean_with: float
    persons_with: int
    ratio_with: object
    diff: float


@dataclass(frozen=True)
class SummaryRow:
    label: str
    values: tuple  # aligned with CategoryRow's numeric columns


@dataclass(frozen=True)
class CategoryReport:
    rows: tuple
    summary: tuple  # Average / Variance / StdDev rows


_NUMERIC_COLUMNS = (
    "articles_without", "like_mean_without", "persons_without", "ratio_without",
    "articles_with", "like_mean_with", "persons_with", "ratio_with", "diff",
)


def _summaries(rows) -> tuple:
    averages, variances, stds = [], [], []
    for column in _NUMERIC_COLUMNS:
        values = [getattr(r, column) for r in rows]
        values = [v for v in values if v is not None]
        if not values:
            averages.append(None)
            variances.append(None)
            stds.append(None)
            continue
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        averages.append(mean)
        variances.append(var)
        stds.append(math.sqrt(var))
    return (SummaryRow("Average", tuple(averages)),
            SummaryRow("Variance", tuple(variances)),
            SummaryRow("StdDev", tuple(stds)))


def category_report(pair) -> CategoryReport:
    """Table rows for a (without altruism, with altruism) run pair.

    diff is the with-run mean likes minus the without-run mean likes per
    category.  Both runs must share the category set.
    """
    without, with_ = pair
    if without.config.category_weights != with_.config.category_weights:
        raise ValueError("category mismatch between paired runs")

    rows = []
    for category in range(1, without.config.n_categories + 1):
        articles_wo = int(without.category_articles[category])
        articles_wi = int(with_.category_articles[category])
        if articles_wo == 0 and articles_wi == 0:
            continue
        mean_wo = without.category_like_mean(category)
        mean_wi = with_.category_like_mean(category)
        mean_wo = 0.0 if mean_wo is None else mean_wo
        mean_wi = 0.0 if mean_wi is None else mean_wi
        persons_wo = int(without.category_persons[category])
        persons_wi = int(with_.category_persons[category])
        rows.append(CategoryRow(
            category=category,
            articles_without=articles_wo,
            like_mean_without=mean_wo,
            persons_without=persons_wo,
            ratio_without=engagement_ratio(mean_wo, persons_wo),
            articles_with=articles_wi,
            like_mean_with=mean_wi,
            persons_with=persons_wi,
            ratio_with=engagement_ratio(mean_wi, persons_wi),
            diff=mean_wi - mean_wo,
        ))
    return CategoryReport(rows=tuple(rows), summary=_summaries(rows))


# --- repost comparison ----------------------------------------------------------

@dataclass(frozen=True)
class RepostRow:
    label: str
    likes_before: int
    reach_before: int
    likes_after: int
    reach_after: int

    @property
    def likes_delta(self) -> int:
        return self.likes_after - self.likes_before

    @property
    def reach_delta(self) -> int:
        return self.reach_after - self.reach_before


@dataclass(frozen=True)
class RepostReport:
    rows: tuple


def repost_report(observed) -> RepostReport:
    """Format externally observed (label, likes/reach before and after)
    rows with their deltas.  Negative deltas are preserved."""
    rows = []
    for label, likes_before, reach_before, likes_after, reach_after in observed:
        for value in (likes_before, reach_before, likes_after, reach_after):
            if value < 0:
                raise ValueError("counts must be non-negative")
        rows.append(RepostRow(str(label), int(likes_before), int(reach_before),
                              int(likes_after), int(reach_after)))
    return RepostReport(rows=tuple(rows))


# --- emitters -------------------------------------------------------------------

def histogram_to_csv(histogram: Histogram) -> str:
    lines = ["like_count,article_count"]
    for count, articles in histogram.bins:
        lines.append(f"{count},{articles}")
    return "\n".join(lines) + "\n"


def _fmt(value, decimals) -> str:
    if value is None:
        return ""
    return f"{value:.{decimals}f}"


def category_report_to_csv(report: CategoryReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([
        "category",
        "articles_without", "like_mean_without", "persons_without", "ratio_without",
        "articles_with", "like_mean_with", "persons_with", "ratio_with", "diff",
    ])
    for r in report.rows:
        writer.writerow([
            r.category,
            r.articles_without, repr(r.like_mean_without), r.persons_without,
            "" if r.ratio_without is None else repr(r.ratio_without),
            r.articles_with, repr(r.like_mean_with), r.persons_with,
            "" if r.ratio_with is None else repr(r.ratio_with),
            repr(r.diff),
        ])
    for summary in report.summary:
        writer.writerow([summary.label] + [
            "" if v is None else repr(v) for v in summary.values
        ])
    return out.getvalue()


_TEXT_HEADERS = ("Category", "Articles", "Like Ave.", "Persons", "ratio",
                 "Articles", "Like Ave.", "Persons", "ratio", "Diff.")


def category_report_to_text(report: CategoryReport) -> str:
    row_decimals = (0, 2, 0, 4, 0, 2, 0, 4, 2)
    summary_decimals = (2, 2, 2, 4, 2, 2, 2, 4, 2)

    table = [list(_TEXT_HEADERS)]
    for r in report.rows:
        values = (r.articles_without, r.like_mean_without, r.persons_without,
                  r.ratio_without, r.articles_with, r.like_mean_with,
                  r.persons_with, r.ratio_with, r.diff)
        table.append([str(r.category)] + [_fmt(v, d) for v, d
                                          in zip(values, row_decimals)])
    summary_start = len(table)
    for summary in report.summary:
        table.append([summary.label] + [_fmt(v, d) for v, d
                                        in zip(summary.values, summary_decimals)])

    widths = [max(len(row[col]) for row in table) for col in range(10)]

    def render(row):
        return "  ".join(cell.rjust(width) for cell, width in zip(row, widths))

    without_span = sum(widths[1:5]) + 2 * 3
    with_span = sum(widths[5:9]) + 2 * 3
    banner = ("  ".join(["".rjust(widths[0]),
                         "without altruism".center(without_span),
                         "with altruism".center(with_span)]))
    lines = [banner, render(table[0]), "-" * len(render(table[0]))]
    lines.extend(render(row) for row in table[1:summary_start])
    lines.append("-" * len(render(table[0])))
    lines.extend(render(row) for row in table[summary_start:])
    return "\n".join(lines) + "\n"


def repost_report_to_csv(report: RepostReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["label", "likes_before", "reach_before", "likes_after",
                     "reach_after", "likes_delta", "reach_delta"])
    for r in report.rows:
        writer.writerow([r.label, r.likes_before, r.reach_before, r.likes_after,
                         r.reach_after, r.likes_delta, r.reach_delta])
    return out.getvalue()


def repost_report_to_text(report: RepostReport) -> str:
    header = (f"{'label':>8}{'likes':>8}{'reach':>8}"
              f"{'likes':>8}{'reach':>8}{'d_likes':>9}{'d_reach':>9}")
    lines = [" " * 8 + "before".center(16) + "after".center(16), header,
             "-" * len(header)]
    for r in report.rows:
        lines.append(
            f"{r.label:>8}{r.likes_before:>8}{r.reach_before:>8}"
            f"{r.likes_after:>8}{r.reach_after:>8}"
            f"{r.likes_delta:>+9}{r.reach_delta:>+9}")
    return "\n".join(lines) + "\n"
