"""Domain types shared by the simulator: categories, articles, agents,
run configuration and the event log.

A ``SimConfig`` is an immutable value; ``validate_config`` checks every
invariant and reports the first failing field.  Configs round-trip through
the flat TOML format used by the CLI (``dumps_config`` / ``parse_config``).

The ``EventLog`` is columnar (numpy arrays) so baseline-scale runs with
millions of like events stay cheap, but it still exposes the logical
sequence of post / like / share events in deterministic order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Iterator, Union

import numpy as np

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python < 3.11
    import tomli as _toml

__all__ = [
    "ConfigError",
    "Category",
    "Article",
    "MinorAgent",
    "MajorAgent",
    "SimConfig",
    "validate_config",
    "parse_config",
    "load_config",
    "dumps_config",
    "EventLog",
    "ShareEvent",
    "VIA_ORGANIC",
    "VIA_RECOMMENDATION",
    "replay_like_counts",
    "check_log_invariants",
]

EVALUATION_LEVELS = (0, 1, 2, 3, 4)

# Posting weights proportional to a 273-article unit for categories 3..11;
# categories 1 and 2 never fire in the default setup.
DEFAULT_CATEGORY_WEIGHTS = (0.0, 0.0, 5.0, 2.0, 3.0, 1.0, 1.0, 3.0, 11.0, 20.0, 9.0)

ALL_UNSEEN = "all-unseen"


class ConfigError(ValueError):
    """A configuration value violates an invariant; message names the field."""


@dataclass(frozen=True)
class Category:
    """A posting bucket.  ``hub_flag`` marks articles whose posts count as
    coming from the designated high-attention poster (R = 1 in the
    altruism gate)."""

    id: int
    posting_weight: float
    hub_flag: bool = True


@dataclass(frozen=True)
class Article:
    id: int
    category: int
    poster: int
    evaluation: int
    step_posted: int
    like_count: int = 0


@dataclass
class MinorAgent:
    """A viewer with a fixed per-category interest vector and its
    accumulated like / share history."""

    id: int
    interest: np.ndarray
    liked: set = field(default_factory=set)
    shared: set = field(default_factory=set)


@dataclass(frozen=True)
class MajorAgent:
    """A poster.  ``category_weights`` defaults to the global weights."""

    id: int
    category_weights: tuple


FanoutType = Union[int, str]


@dataclass(frozen=True)
class SimConfig:
    """Full description of one simulation run.

    ``category_weights`` is indexed by category id 1..K (position 0 maps to
    category 1).  ``recommendation_fanout`` is an integer cap or
    ``"all-unseen"``.  ``view_probability`` is the per-(viewer, article)
    chance of organic exposure in the posting step.
    """

    n_major: int = 200
    n_minor: int = 2000
    n_steps: int = 100
    l_threshold: float = 2.5
    a_threshold: float = 0.05
    p_alt: float = 1.0
    altruism_enabled: bool = True
    evaluation_distribution: tuple = (0.2, 0.2, 0.2, 0.2, 0.2)
    interest_distribution: str = "uniform"
    s_max: float = 1.0
    posts_per_major_per_step: int = 1
    recommendation_fanout: FanoutType = ALL_UNSEEN
    view_probability: float = 1.0
    category_weights: tuple = DEFAULT_CATEGORY_WEIGHTS
    hub_categories: tuple = tuple(range(1, len(DEFAULT_CATEGORY_WEIGHTS) + 1))
    seed: int = 0

    def __post_init__(self):
        # Canonicalize numeric field types so serialize/parse round-trips
        # any valid config value-for-value.
        for name in ("l_threshold", "a_threshold", "p_alt", "s_max",
                     "view_probability"):
            value = getattr(self, name)
            if isinstance(value, (int, float)):
                object.__setattr__(self, name, float(value))
        for name in ("evaluation_distribution", "category_weights"):
            value = getattr(self, name)
            object.__setattr__(self, name, tuple(
                float(v) if isinstance(v, (int, float)) else v for v in value))
        object.__setattr__(self, "hub_categories", tuple(self.hub_categories))

    @property
    def n_categories(self) -> int:
        return len(self.category_weights)

    def categories(self) -> tuple:
        hubs = set(self.hub_categories)
        return tuple(
            Category(id=i + 1, posting_weight=w, hub_flag=(i + 1) in hubs)
            for i, w in enumerate(self.category_weights)
        )

    def hub_mask(self) -> np.ndarray:
        """Boolean array indexed by category id (index 0 unused)."""
        mask = np.zeros(self.n_categories + 1, dtype=bool)
        for cid in self.hub_categories:
            mask[cid] = True
        return mask

    def posts_per_step(self) -> int:
        return self.n_major * self.posts_per_major_per_step

    def with_altruism(self, enabled: bool) -> "SimConfig":
        return replace(self, altruism_enabled=enabled)


def _fail(message: str) -> None:
    raise ConfigError(message)


def validate_config(config: SimConfig) -> SimConfig:
    """Return ``config`` unchanged iff every invariant holds.

    Raises ``ConfigError`` naming the first failing field.
    """
    c = config
    for name in ("n_major", "n_minor", "n_steps", "posts_per_major_per_step"):
        value = getattr(c, name)
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            _fail(f"{name} must be a non-negative integer")
    if not math.isfinite(c.l_threshold) or c.l_threshold < 0:
        _fail("l_threshold must be >= 0")
    if not math.isfinite(c.a_threshold) or c.a_threshold <= 0:
        _fail("a_threshold must be > 0")
    if not math.isfinite(c.p_alt) or not 0.0 <= c.p_alt <= 1.0:
        _fail("p_alt out of [0,1]")
    if not isinstance(c.altruism_enabled, bool):
        _fail("altruism_enabled must be a boolean")
    dist = c.evaluation_distribution
    if len(dist) != len(EVALUATION_LEVELS):
        _fail("evaluation_distribution must have 5 entries")
    if any(not math.isfinite(p) or p < 0 for p in dist):
        _fail("evaluation_distribution entries must be finite and >= 0")
    if abs(sum(dist) - 1.0) > 1e-12:
        _fail("evaluation_distribution must sum to 1")
    if c.interest_distribution != "uniform":
        _fail("interest_distribution must be 'uniform'")
    if not math.isfinite(c.s_max) or c.s_max <= 0:
        _fail("s_max must be > 0")
    fanout = c.recommendation_fanout
    if isinstance(fanout, bool) or not (
        fanout == ALL_UNSEEN or (isinstance(fanout, int) and fanout >= 0)
    ):
        _fail(f"recommendation_fanout must be a non-negative integer or '{ALL_UNSEEN}'")
    if not math.isfinite(c.view_probability) or not 0.0 <= c.view_probability <= 1.0:
        _fail("view_probability out of [0,1]")
    weights = c.category_weights
    if len(weights) == 0:
        _fail("category_weights must not be empty")
    if any(not math.isfinite(w) or w < 0 for w in weights):
        _fail("category_weights entries must be finite and >= 0")
    if not any(w > 0 for w in weights):
        _fail("category_weights must contain at least one positive weight")
    hubs = c.hub_categories
    if len(set(hubs)) != len(hubs):
        _fail("hub_categories must be unique")
    if any(not isinstance(h, int) or isinstance(h, bool) or not 1 <= h <= len(weights)
           for h in hubs):
        _fail("hub_categories ids must lie in 1..n_categories")
    if not isinstance(c.seed, int) or isinstance(c.seed, bool) or not 0 <= c.seed < 2**64:
        _fail("seed must be a 64-bit unsigned integer")
    return c


# --- configuration file handling -------------------------------------------

_INT_KEYS = ("n_major", "n_minor", "n_steps", "posts_per_major_per_step", "seed")
_FLOAT_KEYS = ("l_threshold", "a_threshold", "p_alt", "s_max", "view_probability")
_BOOL_KEYS = ("altruism_enabled",)
_STR_KEYS = ("interest_distribution",)
_FLOAT_LIST_KEYS = ("evaluation_distribution", "category_weights")
_INT_LIST_KEYS = ("hub_categories",)

CONFIG_KEYS = (
    _INT_KEYS + _FLOAT_KEYS + _BOOL_KEYS + _STR_KEYS
    + _FLOAT_LIST_KEYS + _INT_LIST_KEYS + ("recommendation_fanout",)
)


def _coerce(key: str, value):
    if key in _INT_KEYS:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"{key} must be an integer")
        return value
    if key in _FLOAT_KEYS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number")
        return float(value)
    if key in _BOOL_KEYS:
        if not isinstance(value, bool):
            raise ConfigError(f"{key} must be a boolean")
        return value
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string")
        return value
    if key in _FLOAT_LIST_KEYS:
        if not isinstance(value, list) or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
        ):
            raise ConfigError(f"{key} must be a list of numbers")
        return tuple(float(v) for v in value)
    if key in _INT_LIST_KEYS:
        if not isinstance(value, list) or any(
            isinstance(v, bool) or not isinstance(v, int) for v in value
        ):
            raise ConfigError(f"{key} must be a list of integers")
        return tuple(value)
    if key == "recommendation_fanout":
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ConfigError(f"recommendation_fanout must be an integer or '{ALL_UNSEEN}'")
        return value
    raise ConfigError(f"unknown config key: {key!r}")


def parse_config(text: str) -> SimConfig:
    """Parse the flat TOML configuration format.  Unknown keys are errors."""
    try:
        raw = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config file: {exc}") from exc
    known = set(CONFIG_KEYS)
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {key!r}")
        kwargs[key] = _coerce(key, value)
    return validate_config(SimConfig(**kwargs))


def load_config(path) -> SimConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, tuple):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def dumps_config(config: SimConfig) -> str:
    """Serialize to the flat TOML format; ``parse_config`` round-trips it."""
    lines = [f"{f.name} = {_toml_value(getattr(config, f.name))}" for f in fields(config)]
    return "\n".join(lines) + "\n"


# --- event log ---------------------------------------------------------------

VIA_ORGANIC = 0
VIA_RECOMMENDATION = 1
VIA_NAMES = {VIA_ORGANIC: "organic", VIA_RECOMMENDATION: "recommendation"}


@dataclass(frozen=True)
class ShareEvent:
    seq: int
    step: int
    agent: int
    article: int
    recipients: np.ndarray


class EventLog:
    """Ordered record of everything that happened in a run.

    Posts are stored per step; likes in columnar chunks carrying a global
    sequence counter shared with shares, so the interleaved like/share
    order within each step is preserved exactly.
    """

    def __init__(self) -> None:
        self._post_chunks: list = []  # (step, articles, categories, posters, evaluations)
        self._like_chunks: list = []  # (seq_start, step, agents, articles, via)
        self.shares: list = []
        self._seq = 0
        self._likes_finalized = None

    # -- recording -----------------------------------------------------------

    def add_posts(self, step, articles, categories, posters, evaluations) -> None:
        self._post_chunks.append((
            step,
            np.asarray(articles, dtype=np.int64),
            np.asarray(categories, dtype=np.int64),
            np.asarray(posters, dtype=np.int64),
            np.asarray(evaluations, dtype=np.int64),
        ))

    def add_likes(self, step, agents, articles, via) -> None:
        agents = np.asarray(agents, dtype=np.int64)
        if agents.size == 0:
            return
        articles = np.asarray(articles, dtype=np.int64)
        self._like_chunks.append((self._seq, step, agents, articles, via))
        self._seq += agents.size
        self._likes_finalized = None

    def add_share(self, step, agent, article, recipients) -> None:
        self.shares.append(ShareEvent(
            seq=self._seq,
            step=step,
            agent=int(agent),
            article=int(article),
            recipients=np.asarray(recipients, dtype=np.int64),
        ))
        self._seq += 1
        self._likes_finalized = None

    # -- columnar access ------------------------------------------------------

    def _finalize_likes(self):
        if self._likes_finalized is None:
            if self._like_chunks:
                seq = np.concatenate([
                    np.arange(s, s + a.size, dtype=np.int64)
                    for s, _, a, _, _ in self._like_chunks
                ])
                step = np.concatenate([
                    np.full(a.size, st, dtype=np.int64)
                    for _, st, a, _, _ in self._like_chunks
                ])
                agents = np.concatenate([a for _, _, a, _, _ in self._like_chunks])
                articles = np.concatenate([r for _, _, _, r, _ in self._like_chunks])
                via = np.concatenate([
                    np.full(a.size, v, dtype=np.int8)
                    for _, _, a, _, v in self._like_chunks
                ])
            else:
                seq = np.empty(0, dtype=np.int64)
                step = np.empty(0, dtype=np.int64)
                agents = np.empty(0, dtype=np.int64)
                articles = np.empty(0, dtype=np.int64)
                via = np.empty(0, dtype=np.int8)
            self._likes_finalized = (seq, step, agents, articles, via)
        return self._likes_finalized

    @property
    def like_seq(self) -> np.ndarray:
        return self._finalize_likes()[0]

    @property
    def like_step(self) -> np.ndarray:
        return self._finalize_likes()[1]

    @property
    def like_agent(self) -> np.ndarray:
        return self._finalize_likes()[2]

    @property
    def like_article(self) -> np.ndarray:
        return self._finalize_likes()[3]

    @property
    def like_via(self) -> np.ndarray:
        return self._finalize_likes()[4]

    @property
    def n_likes(self) -> int:
        return int(self.like_agent.size)

    @property
    def n_shares(self) -> int:
        return len(self.shares)

    @property
    def n_posts(self) -> int:
        return sum(chunk[1].size for chunk in self._post_chunks)

    def post_columns(self):
        """(article, step, category, poster, evaluation) arrays in article order."""
        if not self._post_chunks:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy(), empty.copy(), empty.copy()
        articles = np.concatenate([c[1] for c in self._post_chunks])
        steps = np.concatenate([
            np.full(c[1].size, c[0], dtype=np.int64) for c in self._post_chunks
        ])
        categories = np.concatenate([c[2] for c in self._post_chunks])
        posters = np.concatenate([c[3] for c in self._post_chunks])
        evaluations = np.concatenate([c[4] for c in self._post_chunks])
        order = np.argsort(articles, kind="stable")
        return (articles[order], steps[order], categories[order],
                posters[order], evaluations[order])

    # -- logical event stream -------------------------------------------------

    def iter_events(self) -> Iterator[tuple]:
        """Yield events in log order.

        Tuples are ``("post", step, article, category, poster, evaluation)``,
        ``("like", step, agent, article, via_name)`` and
        ``("share", step, agent, article, recipients)``.

        Likes/shares are appended with a shared monotone sequence counter,
        so a pointer merge reproduces the interleaved order exactly.
        """
        seq, steps, agents, articles, via = self._finalize_likes()
        by_step_posts: dict = {}
        for chunk in self._post_chunks:
            by_step_posts.setdefault(chunk[0], []).append(chunk)
        all_steps = sorted(set(by_step_posts)
                           | set(np.unique(steps).tolist())
                           | {s.step for s in self.shares})
        li = 0
        si = 0
        n_likes = seq.size
        for step in all_steps:
            for chunk in by_step_posts.get(step, ()):
                _, arts, cats, posters, evals = chunk
                for k in range(arts.size):
                    yield ("post", step, int(arts[k]), int(cats[k]),
                           int(posters[k]), int(evals[k]))
            while True:
                like_here = li < n_likes and int(steps[li]) == step
                share_here = si < len(self.shares) and self.shares[si].step == step
                if like_here and (not share_here
                                  or int(seq[li]) < self.shares[si].seq):
                    yield ("like", step, int(agents[li]),
                           int(articles[li]), VIA_NAMES[int(via[li])])
                    li += 1
                elif share_here:
                    s = self.shares[si]
                    yield ("share", s.step, s.agent, s.article, s.recipients)
                    si += 1
                else:
                    break


def replay_like_counts(log: EventLog, n_articles: int) -> np.ndarray:
    """Reconstruct per-article like counts from the log alone."""
    return np.bincount(log.like_article, minlength=n_articles)


def check_log_invariants(log: EventLog, n_articles: int) -> None:
    """Raise AssertionError if any event-log invariant is violated."""
    articles, steps, _, _, _ = log.post_columns()
    posted_step = {int(a): int(s) for a, s in zip(articles, steps)}
    assert len(posted_step) == articles.size, "duplicate article ids"

    like_pairs = set()
    like_seq_by_pair = {}
    la, lr = log.like_agent, log.like_article
    ls, lq = log.like_step, log.like_seq
    for i in range(la.size):
        art = int(lr[i])
        assert art in posted_step, f"like references unposted article {art}"
        assert posted_step[art] <= int(ls[i]), "like precedes post"
        pair = (int(la[i]), art)
        assert pair not in like_pairs, f"duplicate like {pair}"
        like_pairs.add(pair)
        like_seq_by_pair[pair] = int(lq[i])

    share_pairs = set()
    for s in log.shares:
        pair = (s.agent, s.article)
        assert pair not in share_pairs, f"duplicate share {pair}"
        share_pairs.add(pair)
        assert pair in like_pairs, f"share without like {pair}"
        assert like_seq_by_pair[pair] < s.seq, "share precedes its like"
