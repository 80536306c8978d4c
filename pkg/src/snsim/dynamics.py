"""Pure decision rules: when a viewer likes an article and when a fresh
like turns into an altruistic re-share.

Both comparisons are inclusive (>=).  The re-share coin is an explicit
``random_draw`` input so the functions stay pure; the engine supplies
draws keyed per (agent, article).
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["like_decision", "AltruismInputs", "altruism_gate"]


def like_decision(evaluation: int, interest: float, l_threshold: float) -> bool:
    """True iff the article is attractive enough: evaluation * interest >= L."""
    return evaluation * interest >= l_threshold


@dataclass(frozen=True)
class AltruismInputs:
    """Inputs to the re-share gate for one fresh like.

    ``like_count`` is the article's like count immediately after the acting
    agent's like was recorded, so it is always >= 1.  ``hub`` is 1 when the
    article belongs to a designated high-attention category, else 0.
    """

    evaluation: int
    interest: float
    like_count: int
    hub: int
    a_threshold: float
    random_draw: float
    p_alt: float


def altruism_gate(inputs: AltruismInputs) -> bool:
    """True iff the liking agent re-shares the article.

    Requires evaluation >= 3, a damped attractive degree
    hub * (evaluation * interest / like_count) >= A, and the Bernoulli
    coin ``random_draw < p_alt``.
    """
    if inputs.like_count < 1:
        raise ValueError("like_count must be >= 1 (the acting like is already recorded)")
    if inputs.evaluation < 3:
        return False
    damped = inputs.hub * (inputs.evaluation * inputs.interest / inputs.like_count)
    if damped < inputs.a_threshold:
        return False
    return inputs.random_draw < inputs.p_alt
