"""Ranking-quality and coverage measures for batches of top-N lists.

Every measure reads only the top-``k`` prefix of each list. Mean values are
always accumulated over users in ascending user-id order so repeated
evaluations are bit-for-bit identical.
"""

from collections.abc import Mapping, Set as AbstractSet
from dataclasses import dataclass

from .errors import UndefinedMetricError
from .recommenders import RecommendationList


@dataclass(frozen=True)
class EvalInput:
    """One batch of lists plus the ground truth needed to score them.

    ``lists`` holds a (possibly empty) list for every evaluated user,
    ``hidden`` the user's withheld items, ``catalog`` the full set of items
    the system could recommend, and ``k`` the evaluation cutoff.
    """

    lists: Mapping[str, RecommendationList]
    hidden: Mapping[str, AbstractSet[str]]
    catalog: AbstractSet[str]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        for user_id in self.lists:
            if user_id not in self.hidden:
                raise ValueError(f"user {user_id!r} has a list but no hidden set")


@dataclass(frozen=True)
class MetricReport:
    """Aggregate scores for one batch at one cutoff.

    ``map_at_k`` averages over every evaluated user (empty lists score 0);
    ``map_at_k_nonempty`` averages over users with at least one recommended
    item, as a side-by-side diagnostic for algorithms that cannot always
    fill their lists.
    """

    map_at_k: float
    map_at_k_nonempty: float
    ucov_at_k: float
    ccov_at_k: float
    per_user_ap: Mapping[str, float]


@dataclass(frozen=True)
class IntersectionReport:
    """How the correct recommendations of two algorithms overlap."""

    exclusive_a: int
    exclusive_b: int
    common: int


def average_precision_at_k(recs: RecommendationList, hidden: AbstractSet[str], k: int) -> float:
    """Average precision of the top-``k`` prefix against ``hidden``.

    Precision is sampled at every hit rank and the sum is divided by
    ``min(|hidden|, k)``. An empty list scores 0.0; an empty hidden set has
    no defined value and raises ``UndefinedMetricError``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not hidden:
        raise UndefinedMetricError("hidden set is empty")
    hits = 0
    total = 0.0
    for rank, (item_id, _) in enumerate(recs.entries[:k], start=1):
        if item_id in hidden:
            hits += 1
            total += hits / rank
    return total / min(len(hidden), k)


def _active_users(inputs: EvalInput) -> list[str]:
    users = sorted(inputs.lists)
    if not users:
        raise UndefinedMetricError("no users to evaluate")
    return users


def map_at_k(inputs: EvalInput) -> float:
    """Unweighted mean average precision over every evaluated user."""
    users = _active_users(inputs)
    total = 0.0
    for u in users:
        total += average_precision_at_k(inputs.lists[u], inputs.hidden[u], inputs.k)
    return total / len(users)


def ucov_at_k(inputs: EvalInput) -> float:
    """User coverage: mean filled fraction of the requested list length.

    Each user contributes ``min(|list|, k) / k``; users with empty lists
    count in the denominator.
    """
    users = _active_users(inputs)
    total = 0.0
    for u in users:
        total += min(len(inputs.lists[u]), inputs.k) / inputs.k
    return total / len(users)


def ccov_at_k(inputs: EvalInput) -> float:
    """Catalog coverage: fraction of the catalog recommended to anyone."""
    if not inputs.catalog:
        raise UndefinedMetricError("catalog is empty")
    users = _active_users(inputs)
    recommended: set[str] = set()
    for u in users:
        recommended.update(inputs.lists[u].item_ids(inputs.k))
    return len(recommended) / len(inputs.catalog)


def evaluate(inputs: EvalInput) -> MetricReport:
    """Compute every list metric for one batch in a single pass."""
    if not inputs.catalog:
        raise UndefinedMetricError("catalog is empty")
    users = _active_users(inputs)
    per_user_ap: dict[str, float] = {}
    recommended: set[str] = set()
    total = 0.0
    fill_total = 0.0
    nonempty_total = 0.0
    nonempty_count = 0
    for u in users:
        lst = inputs.lists[u]
        ap = average_precision_at_k(lst, inputs.hidden[u], inputs.k)
        per_user_ap[u] = ap
        total += ap
        fill_total += min(len(lst), inputs.k) / inputs.k
        if len(lst) > 0:
            nonempty_total += ap
            nonempty_count += 1
        recommended.update(lst.item_ids(inputs.k))
    return MetricReport(
        map_at_k=total / len(users),
        map_at_k_nonempty=(nonempty_total / nonempty_count) if nonempty_count else 0.0,
        ucov_at_k=fill_total / len(users),
        ccov_at_k=len(recommended) / len(inputs.catalog),
        per_user_ap=per_user_ap,
    )


def jaccard_list_similarity(
    lists_a: Mapping[str, RecommendationList],
    lists_b: Mapping[str, RecommendationList],
    k: int,
) -> float:
    """Mean Jaccard similarity of the two top-``k`` item sets per user.

    Only users present in both collections are compared; a user whose two
    lists are both empty contributes 0.0. Raises ``UndefinedMetricError``
    when the collections share no users.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    common_users = sorted(set(lists_a) & set(lists_b))
    if not common_users:
        raise UndefinedMetricError("the two list collections share no users")
    total = 0.0
    for u in common_users:
        a = set(lists_a[u].item_ids(k))
        b = set(lists_b[u].item_ids(k))
        union = a | b
        total += len(a & b) / len(union) if union else 0.0
    return total / len(common_users)


def hit_intersection(
    lists_a: Mapping[str, RecommendationList],
    lists_b: Mapping[str, RecommendationList],
    hidden: Mapping[str, AbstractSet[str]],
    k: int,
) -> IntersectionReport:
    """Split the correct top-``k`` recommendations of two algorithms into
    exclusive and shared (user, item) hits."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if set(lists_a) != set(lists_b):
        raise ValueError("the two list collections must cover the same users")
    users = sorted(lists_a)
    for u in users:
        if u not in hidden:
            raise ValueError(f"user {u!r} has no hidden set")
    hits_a = {(u, i) for u in users for i in lists_a[u].item_ids(k) if i in hidden[u]}
    hits_b = {(u, i) for u in users for i in lists_b[u].item_ids(k) if i in hidden[u]}
    return IntersectionReport(
        exclusive_a=len(hits_a - hits_b),
        exclusive_b=len(hits_b - hits_a),
        common=len(hits_a & hits_b),
    )
