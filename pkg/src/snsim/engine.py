"""Deterministic discrete-step simulation loop.

Each step: every major agent posts, every minor agent is (probabilistically)
exposed to the fresh articles and likes the attractive ones, and each fresh
like may trigger an altruistic re-share that exposes viewers who have not
seen the article yet.  Re-share cascades drain within the step through a
FIFO queue; a viewer likes and shares a given article at most once, so the
queue terminates.

Randomness is split by purpose so that toggling altruism or moving one
threshold perturbs nothing else:

* agent-init / posting / evaluation use three generators spawned from the
  run seed,
* exposure and the re-share coin are counter-based hashes keyed per
  (article, viewer) -- see ``kernels``,
* recipient sampling under a finite fanout derives a fresh generator per
  share from (seed, article, sharer).

That discipline is what makes like-sets exactly monotone across an
L-threshold grid and share counts exactly monotone across an A-threshold
grid when runs share a seed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .model import (
    ALL_UNSEEN,
    Article,
    EventLog,
    MajorAgent,
    MinorAgent,
    SimConfig,
    VIA_ORGANIC,
    VIA_RECOMMENDATION,
    dumps_config,
    validate_config,
)

__all__ = [
    "World",
    "RunResult",
    "init_world",
    "step",
    "run",
    "run_pair",
    "sweep",
    "SWEEP_PARAMETERS",
    "write_event_file",
    "write_summary_file",
    "read_event_file",
]


class World:
    """Mutable simulation state; a deterministic function of (config, seed)."""

    def __init__(self, config: SimConfig):
        config = validate_config(config)
        self.config = config
        self.seed = config.seed
        self.step_index = 0

        seed_seq = np.random.SeedSequence(config.seed)
        init_ss, posting_ss, evaluation_ss = seed_seq.spawn(3)
        init_rng = np.random.Generator(np.random.PCG64(init_ss))
        self._posting_rng = np.random.Generator(np.random.PCG64(posting_ss))
        self._evaluation_rng = np.random.Generator(np.random.PCG64(evaluation_ss))

        k = config.n_categories
        self.interests = init_rng.random((config.n_minor, k)) * config.s_max
        # Row per category id (row 0 unused) for contiguous per-step gathers.
        self.interests_by_cat = np.zeros((k + 1, config.n_minor))
        if config.n_minor:
            self.interests_by_cat[1:] = self.interests.T

        weights = np.asarray(config.category_weights, dtype=np.float64)
        self._category_p = weights / weights.sum()
        self._category_ids = np.arange(1, k + 1)
        eval_dist = np.asarray(config.evaluation_distribution, dtype=np.float64)
        self._evaluation_p = eval_dist / eval_dist.sum()
        self._hub_mask = config.hub_mask()

        total_articles = config.n_steps * config.posts_per_step()
        self.n_articles = 0
        self.article_category = np.zeros(total_articles, dtype=np.int64)
        self.article_poster = np.zeros(total_articles, dtype=np.int64)
        self.article_evaluation = np.zeros(total_articles, dtype=np.int64)
        self.article_step = np.zeros(total_articles, dtype=np.int64)
        self.article_like_counts = np.zeros(total_articles, dtype=np.int64)

        self.log = EventLog()

    # -- object views (tests and small-scale inspection) ----------------------

    def articles(self) -> list:
        return [
            Article(
                id=i,
                category=int(self.article_category[i]),
                poster=int(self.article_poster[i]),
                evaluation=int(self.article_evaluation[i]),
                step_posted=int(self.article_step[i]),
                like_count=int(self.article_like_counts[i]),
            )
            for i in range(self.n_articles)
        ]

    def minor_agents(self) -> list:
        liked: dict = {j: set() for j in range(self.config.n_minor)}
        shared: dict = {j: set() for j in range(self.config.n_minor)}
        for agent, article in zip(self.log.like_agent, self.log.like_article):
            liked[int(agent)].add(int(article))
        for share in self.log.shares:
            shared[share.agent].add(share.article)
        return [
            MinorAgent(id=j, interest=self.interests[j].copy(),
                       liked=liked[j], shared=shared[j])
            for j in range(self.config.n_minor)
        ]

    def major_agents(self) -> list:
        return [MajorAgent(id=m, category_weights=self.config.category_weights)
                for m in range(self.config.n_major)]


def init_world(config: SimConfig) -> World:
    return World(config)


def _gate_pass(world: World, agents, article_ids, evaluations, categories,
               interests, n_at_like):
    """Vectorized re-share gate over a batch of fresh likes.

    ``n_at_like`` is each like's within-article rank (the article's like
    count right after that like was recorded).
    """
    config = world.config
    eligible = (evaluations >= 3) & world._hub_mask[categories]
    if not eligible.any():
        return np.zeros(agents.shape, dtype=bool)
    damped = (evaluations * interests) / n_at_like
    passing = eligible & (damped >= config.a_threshold)
    if passing.any() and config.p_alt < 1.0:
        coin = kernels.pair_uniform_flat(world.seed, kernels.SALT_COIN,
                                         agents, article_ids)
        passing &= coin < config.p_alt
    return passing


def _sample_recipients(world: World, article_id: int, sharer: int,
                       unseen: np.ndarray) -> np.ndarray:
    fanout = world.config.recommendation_fanout
    if fanout == ALL_UNSEEN or unseen.size <= fanout:
        return unseen
    if fanout == 0:
        return unseen[:0]
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(
        entropy=(world.seed, kernels.SALT_FANOUT, int(article_id), int(sharer)))))
    picked = rng.choice(unseen, size=fanout, replace=False)
    picked.sort()
    return picked


def step(world: World) -> World:
    """Advance one step in place and return the world.

    Article storage is sized for ``n_steps`` steps at construction, so a
    world cannot be stepped past its configured horizon.
    """
    config = world.config
    s = world.step_index
    if s >= config.n_steps:
        raise ValueError(f"world already ran its {config.n_steps} configured steps")
    n_posts = config.posts_per_step()

    first = world.n_articles
    article_ids = np.arange(first, first + n_posts, dtype=np.int64)
    if n_posts:
        posters = np.repeat(np.arange(config.n_major, dtype=np.int64),
                            config.posts_per_major_per_step)
        categories = world._posting_rng.choice(world._category_ids, size=n_posts,
                                               p=world._category_p)
        evaluations = world._evaluation_rng.choice(len(world._evaluation_p),
                                                   size=n_posts,
                                                   p=world._evaluation_p)
        world.article_category[article_ids] = categories
        world.article_poster[article_ids] = posters
        world.article_evaluation[article_ids] = evaluations
        world.article_step[article_ids] = s
        world.n_articles += n_posts
        world.log.add_posts(s, article_ids, categories, posters, evaluations)
    world.step_index += 1
    if n_posts == 0 or config.n_minor == 0:
        return world

    # Organic exposure: every fresh article against every minor agent.
    cat_interests = world.interests_by_cat[categories]
    viewed, liked = kernels.organic_masks(
        world.seed, article_ids, evaluations, cat_interests,
        config.l_threshold, config.view_probability)

    art_local, agents = np.nonzero(liked)  # article-major, agents ascending
    per_article = liked.sum(axis=1)
    if art_local.size:
        starts = np.concatenate(([0], np.cumsum(per_article)[:-1]))
        n_at_like = np.arange(art_local.size, dtype=np.int64) \
            - np.repeat(starts, per_article) + 1
        likes_global = article_ids[art_local]
        world.article_like_counts[article_ids] += per_article
        world.log.add_likes(s, agents, likes_global, VIA_ORGANIC)
    else:
        return world

    if not config.altruism_enabled:
        return world

    # Re-share cascade: gate each fresh like, FIFO over passing ones.
    passing = _gate_pass(world, agents, likes_global,
                         evaluations[art_local], categories[art_local],
                         world.interests[agents, categories[art_local] - 1],
                         n_at_like)
    queue = deque(zip(agents[passing].tolist(), art_local[passing].tolist()))

    # O(1) saturation check so drained articles don't rescan the population.
    unseen_left = (config.n_minor - viewed.sum(axis=1)).astype(np.int64)

    while queue:
        sharer, al = queue.popleft()
        if unseen_left[al] == 0:
            continue
        unseen = np.flatnonzero(~viewed[al])
        article_id = int(article_ids[al])
        recipients = _sample_recipients(world, article_id, sharer, unseen)
        if recipients.size == 0:
            continue
        viewed[al, recipients] = True
        unseen_left[al] -= recipients.size
        world.log.add_share(s, sharer, article_id, recipients)

        evaluation = int(evaluations[al])
        category = int(categories[al])
        rec_interest = world.interests_by_cat[category, recipients]
        rec_likers = recipients[evaluation * rec_interest >= config.l_threshold]
        if rec_likers.size == 0:
            continue
        count = int(world.article_like_counts[article_id])
        rec_n_at = count + 1 + np.arange(rec_likers.size, dtype=np.int64)
        world.article_like_counts[article_id] = count + rec_likers.size
        world.log.add_likes(s, rec_likers,
                            np.full(rec_likers.size, article_id, dtype=np.int64),
                            VIA_RECOMMENDATION)
        rec_pass = _gate_pass(
            world, rec_likers,
            np.full(rec_likers.size, article_id, dtype=np.int64),
            np.full(rec_likers.size, evaluation, dtype=np.int64),
            np.full(rec_likers.size, category, dtype=np.int64),
            world.interests_by_cat[category, rec_likers],
            rec_n_at)
        queue.extend(zip(rec_likers[rec_pass].tolist(),
                         [al] * int(rec_pass.sum())))
    return world


@dataclass
class RunResult:
    """Event log plus exact aggregates for one finished run."""

    config: SimConfig
    seed: int
    log: EventLog
    n_articles: int
    article_category: np.ndarray
    article_poster: np.ndarray
    article_evaluation: np.ndarray
    article_step: np.ndarray
    article_like_counts: np.ndarray
    category_articles: np.ndarray
    category_likes: np.ndarray
    category_persons: np.ndarray

    @property
    def total_likes(self) -> int:
        return self.log.n_likes

    @property
    def organic_likes(self) -> int:
        return int((self.log.like_via == VIA_ORGANIC).sum())

    @property
    def recommendation_likes(self) -> int:
        return int((self.log.like_via == VIA_RECOMMENDATION).sum())

    @property
    def total_shares(self) -> int:
        return self.log.n_shares

    def like_pairs(self) -> set:
        """The set of (agent, article) pairs that liked."""
        return set(zip(self.log.like_agent.tolist(),
                       self.log.like_article.tolist()))

    def category_like_mean(self, category: int):
        articles = self.category_articles[category]
        if articles == 0:
            return None
        return self.category_likes[category] / articles


def _finalize(world: World) -> RunResult:
    k = world.config.n_categories
    categories = world.article_category[:world.n_articles]
    category_articles = np.bincount(categories, minlength=k + 1)

    like_categories = categories[world.log.like_article] if world.log.n_likes \
        else np.empty(0, dtype=np.int64)
    category_likes = np.bincount(like_categories, minlength=k + 1)

    if world.log.n_likes:
        keys = world.log.like_agent * np.int64(k + 1) + like_categories
        unique_cats = np.unique(keys) % (k + 1)
        category_persons = np.bincount(unique_cats, minlength=k + 1)
    else:
        category_persons = np.zeros(k + 1, dtype=np.int64)

    return RunResult(
        config=world.config,
        seed=world.seed,
        log=world.log,
        n_articles=world.n_articles,
        article_category=categories.copy(),
        article_poster=world.article_poster[:world.n_articles].copy(),
        article_evaluation=world.article_evaluation[:world.n_articles].copy(),
        article_step=world.article_step[:world.n_articles].copy(),
        article_like_counts=world.article_like_counts[:world.n_articles].copy(),
        category_articles=category_articles,
        category_likes=category_likes,
        category_persons=category_persons,
    )


def run(config: SimConfig) -> RunResult:
    world = init_world(config)
    for _ in range(config.n_steps):
        step(world)
    return _finalize(world)


def run_pair(config: SimConfig):
    """(without altruism, with altruism) runs sharing seed and substreams."""
    config = validate_config(config)
    without = run(config.with_altruism(False))
    with_ = run(config.with_altruism(True))
    return without, with_


SWEEP_PARAMETERS = {
    "L_threshold": "l_threshold",
    "A_threshold": "a_threshold",
    "p_alt": "p_alt",
}


def sweep(base: SimConfig, parameter: str, values) -> list:
    """One run per value, everything else (including the seed) fixed."""
    field = SWEEP_PARAMETERS.get(parameter)
    if field is None:
        raise ValueError(
            f"unknown sweep parameter: {parameter!r} "
            f"(expected one of {sorted(SWEEP_PARAMETERS)})")
    base = validate_config(base)
    return [run(validate_config(replace(base, **{field: value})))
            for value in values]


# --- file formats -------------------------------------------------------------

def write_event_file(result: RunResult, path) -> None:
    """One event per line:

    ``post,<step>,<article>,<category>,<poster>,<evaluation>``
    ``like,<step>,<agent>,<article>,<organic|recommendation>``
    ``share,<step>,<agent>,<article>,<r1;r2;...>``
    """
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for event in result.log.iter_events():
            kind = event[0]
            if kind == "post":
                _, s, article, category, poster, evaluation = event
                handle.write(f"post,{s},{article},{category},{poster},{evaluation}\n")
            elif kind == "like":
                _, s, agent, article, via = event
                handle.write(f"like,{s},{agent},{article},{via}\n")
            else:
                _, s, agent, article, recipients = event
                joined = ";".join(map(str, recipients.tolist()))
                handle.write(f"share,{s},{agent},{article},{joined}\n")


def write_summary_file(result: RunResult, path) -> None:
    """Config echo plus exact per-category aggregates, CSV."""
    lines = ["# snsim run summary"]
    for line in dumps_config(result.config).splitlines():
        lines.append(f"# {line}")
    lines.append(f"# total_articles = {result.n_articles}")
    lines.append(f"# total_likes = {result.total_likes}")
    lines.append(f"# organic_likes = {result.organic_likes}")
    lines.append(f"# recommendation_likes = {result.recommendation_likes}")
    lines.append(f"# total_shares = {result.total_shares}")
    lines.append("category,articles,likes,like_mean,persons")
    for category in range(1, result.config.n_categories + 1):
        articles = int(result.category_articles[category])
        likes = int(result.category_likes[category])
        persons = int(result.category_persons[category])
        mean = repr(likes / articles) if articles else ""
        lines.append(f"{category},{articles},{likes},{mean},{persons}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def read_event_file(path):
    """Parse an event file back into plain records.

    Returns ``(posts, likes, shares)`` where posts maps article id to
    ``(step, category, poster, evaluation)``, likes is a list of
    ``(step, agent, article, via)`` and shares a list of
    ``(step, agent, article, recipients)``.
    """
    posts: dict = {}
    likes: list = []
    shares: list = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            kind = parts[0]
            if kind == "post" and len(parts) == 6:
                _, s, article, category, poster, evaluation = parts
                posts[int(article)] = (int(s), int(category), int(poster),
                                       int(evaluation))
            elif kind == "like" and len(parts) == 5:
                _, s, agent, article, via = parts
                likes.append((int(s), int(agent), int(article), via))
            elif kind == "share" and len(parts) == 5:
                _, s, agent, article, recipients = parts
                rec = [int(r) for r in recipients.split(";")] if recipients else []
                shares.append((int(s), int(agent), int(article), rec))
            else:
                raise ValueError(f"{path}:{line_no}: malformed event line: {line!r}")
    return posts, likes, shares
