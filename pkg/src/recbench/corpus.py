"""Interaction and content data: loading, statistics, and holdout splits."""

import json
import math
import random
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from .errors import EmptyDatasetError, ParseError, ProtocolError

INTERACTION_FORMATS = ("explicit", "implicit")

IMPLICIT_RATING = 1.0


@dataclass(frozen=True)
class Interaction:
    """A single user-item activity, optionally rated and timestamped."""

    user_id: str
    item_id: str
    rating: float | None = None
    timestamp: int | None = None

    def __post_init__(self):
        if not self.user_id:
            raise ValueError("user_id must be a non-empty string")
        if not self.item_id:
            raise ValueError("item_id must be a non-empty string")
        if self.rating is not None:
            if not math.isfinite(self.rating) or self.rating < 0:
                raise ValueError(f"rating must be finite and non-negative, got {self.rating!r}")


class InteractionDataset:
    """An immutable collection of user-item activities.

    ``users`` and ``items`` keep first-appearance order and may be supersets
    of the ids referenced by ``interactions`` (a training split keeps the
    full catalog even when some items lose all their activities). Instances
    are treated as read-only after construction.
    """

    def __init__(
        self,
        interactions: Iterable[Interaction],
        users: Sequence[str] | None = None,
        items: Sequence[str] | None = None,
    ):
        self.interactions: tuple[Interaction, ...] = tuple(interactions)
        if not self.interactions:
            raise EmptyDatasetError("dataset must contain at least one interaction")
        profiles: dict[str, dict[str, float | None]] = {}
        item_users: dict[str, list[str]] = {}
        seen: set[tuple[str, str]] = set()
        for x in self.interactions:
            pair = (x.user_id, x.item_id)
            if pair in seen:
                raise ValueError(f"duplicate interaction for {pair!r}")
            seen.add(pair)
            profiles.setdefault(x.user_id, {})[x.item_id] = x.rating
            item_users.setdefault(x.item_id, []).append(x.user_id)
        self.users: tuple[str, ...] = tuple(users) if users is not None else tuple(profiles)
        self.items: tuple[str, ...] = tuple(items) if items is not None else tuple(item_users)
        self._user_set = frozenset(self.users)
        self._item_set = frozenset(self.items)
        missing_users = set(profiles) - self._user_set
        if missing_users:
            raise ValueError(f"interactions reference users outside the user set: {sorted(missing_users)[:5]}")
        missing_items = set(item_users) - self._item_set
        if missing_items:
            raise ValueError(f"interactions reference items outside the item set: {sorted(missing_items)[:5]}")
        self._profiles = profiles
        self._item_users = {i: tuple(us) for i, us in item_users.items()}

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_items(self) -> int:
        return len(self.items)

    @property
    def n_activities(self) -> int:
        return len(self.interactions)

    @property
    def profiles(self) -> Mapping[str, Mapping[str, float | None]]:
        """Read-only view of user -> {item -> rating-or-None}."""
        return self._profiles

    def profile(self, user_id: str) -> Mapping[str, float | None]:
        """Items rated by ``user_id`` (empty for catalog-only users)."""
        if user_id not in self._user_set:
            raise KeyError(user_id)
        return self._profiles.get(user_id, {})

    def has_user(self, user_id: str) -> bool:
        return user_id in self._user_set

    def users_of_item(self, item_id: str) -> tuple[str, ...]:
        return self._item_users.get(item_id, ())


def _parse_interaction_row(fields: list[str], format: str) -> Interaction:
    if len(fields) < 2:
        raise ValueError(f"expected at least 2 tab-separated fields, got {len(fields)}")
    user_id, item_id = fields[0], fields[1]
    rating: float | None = None
    timestamp: int | None = None
    if format == "explicit":
        if len(fields) > 4:
            raise ValueError(f"expected at most 4 tab-separated fields, got {len(fields)}")
        if len(fields) >= 3:
            try:
                rating = float(fields[2])
            except ValueError:
                raise ValueError(f"invalid rating {fields[2]!r}") from None
        if len(fields) == 4:
            try:
                timestamp = int(fields[3])
            except ValueError:
                raise ValueError(f"invalid timestamp {fields[3]!r}") from None
    else:
        if len(fields) > 3:
            raise ValueError(f"expected at most 3 tab-separated fields, got {len(fields)}")
        rating = IMPLICIT_RATING
        if len(fields) == 3:
            try:
                timestamp = int(fields[2])
            except ValueError:
                raise ValueError(f"invalid timestamp {fields[2]!r}") from None
    return Interaction(user_id=user_id, item_id=item_id, rating=rating, timestamp=timestamp)


def load_interactions(path, format: str = "explicit") -> InteractionDataset:
    """Read a UTF-8, tab-separated activity file into a dataset.

    Rows are ``user<TAB>item[<TAB>rating[<TAB>timestamp]]`` in the explicit
    format and ``user<TAB>item[<TAB>timestamp]`` in the implicit one, where
    every activity is recorded with unit rating 1.0. Lines starting with
    ``#`` and blank lines are skipped. When a (user, item) pair repeats, the
    last occurrence wins.
    """
    if format not in INTERACTION_FORMATS:
        raise ValueError(f"format must be one of {INTERACTION_FORMATS}, got {format!r}")
    records: dict[tuple[str, str], Interaction] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            try:
                interaction = _parse_interaction_row(line.split("\t"), format)
            except ValueError as exc:
                raise ParseError(str(exc), path=str(path), line=lineno) from None
            records[(interaction.user_id, interaction.item_id)] = interaction
    if not records:
        raise EmptyDatasetError(f"{path}: no interaction records")
    return InteractionDataset(records.values())


@dataclass(frozen=True)
class ItemDocument:
    """Free-text content for one item, keyed by attribute name."""

    item_id: str
    attributes: Mapping[str, str]

    def __post_init__(self):
        if not self.item_id:
            raise ValueError("item_id must be a non-empty string")
        object.__setattr__(self, "attributes", dict(self.attributes))


class ContentCorpus:
    """Item documents keyed by item id; read-only after construction."""

    def __init__(self, documents: Iterable[ItemDocument]):
        self.documents: dict[str, ItemDocument] = {}
        for doc in documents:
            self.documents[doc.item_id] = doc

    def __len__(self) -> int:
        return len(self.documents)

    def __contains__(self, item_id: str) -> bool:
        return item_id in self.documents

    def get(self, item_id: str) -> ItemDocument | None:
        return self.documents.get(item_id)

    def item_ids(self) -> tuple[str, ...]:
        return tuple(self.documents)

    def attribute_names(self) -> tuple[str, ...]:
        names: set[str] = set()
        for doc in self.documents.values():
            names.update(doc.attributes)
        return tuple(sorted(names))

    def missing_items(self, item_ids: Iterable[str]) -> tuple[str, ...]:
        """Item ids from ``item_ids`` that have no document here."""
        return tuple(sorted(i for i in set(item_ids) if i not in self.documents))


def load_content(path) -> ContentCorpus:
    """Read item documents from a JSON-lines file.

    Each line is an object ``{"item_id": ..., "attributes": {name: text}}``.
    Scalar attribute values are coerced to strings; blank lines are skipped
    and a repeated item_id keeps its last document.
    """
    docs: dict[str, ItemDocument] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno) from None
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", path=str(path), line=lineno)
            item_id = obj.get("item_id")
            if not isinstance(item_id, str) or not item_id:
                raise ParseError("item_id must be a non-empty string", path=str(path), line=lineno)
            attrs = obj.get("attributes", {})
            if not isinstance(attrs, dict):
                raise ParseError("attributes must be an object", path=str(path), line=lineno)
            clean: dict[str, str] = {}
            for name, value in attrs.items():
                if isinstance(value, str):
                    clean[name] = value
                elif isinstance(value, (int, float)) and not isinstance(value, bool):
                    clean[name] = str(value)
                else:
                    raise ParseError(
                        f"attribute {name!r} must be text or a number", path=str(path), line=lineno
                    )
            docs[item_id] = ItemDocument(item_id=item_id, attributes=clean)
    if not docs:
        raise EmptyDatasetError(f"{path}: no item documents")
    return ContentCorpus(docs.values())


@dataclass(frozen=True)
class DatasetStats:
    """Descriptive statistics of an interaction dataset."""

    n_users: int
    n_items: int
    n_activities: int
    items_per_user_ratio: float
    avg_items_per_user: float
    avg_users_per_item: float
    max_items_per_user: int
    min_items_per_user: int
    max_users_per_item: int
    min_users_per_item: int
    sparsity: float

    @classmethod
    def from_counts(
        cls,
        n_users: int,
        n_items: int,
        n_activities: int,
        max_items_per_user: int,
        min_items_per_user: int,
        max_users_per_item: int,
        min_users_per_item: int,
    ) -> "DatasetStats":
        """Derive the ratio fields from raw counts.

        All derived quantities are computed from the counts themselves:
        ratio of catalog size to user count, mean activities per user and per
        item, and sparsity ``1 - n_activities / (n_users * n_items)``.
        """
        if n_users < 1 or n_items < 1 or n_activities < 1:
            raise ValueError("counts must be positive")
        return cls(
            n_users=n_users,
            n_items=n_items,
            n_activities=n_activities,
            items_per_user_ratio=n_items / n_users,
            avg_items_per_user=n_activities / n_users,
            avg_users_per_item=n_activities / n_items,
            max_items_per_user=max_items_per_user,
            min_items_per_user=min_items_per_user,
            max_users_per_item=max_users_per_item,
            min_users_per_item=min_users_per_item,
            sparsity=1.0 - n_activities / (n_users * n_items),
        )


def compute_stats(ds: InteractionDataset) -> DatasetStats:
    """Compute descriptive statistics for ``ds``."""
    per_user = [len(ds.profile(u)) if ds.has_user(u) else 0 for u in ds.users]
    per_item = [len(ds.users_of_item(i)) for i in ds.items]
    return DatasetStats.from_counts(
        n_users=ds.n_users,
        n_items=ds.n_items,
        n_activities=ds.n_activities,
        max_items_per_user=max(per_user),
        min_items_per_user=min(per_user),
        max_users_per_item=max(per_item),
        min_users_per_item=min(per_item),
    )


@dataclass(frozen=True)
class SplitPlan:
    """Assignment of protocol-eligible users to cross-validation folds."""

    fold_count: int
    given_n: int
    min_train_items: int
    rng_seed: int
    folds: Mapping[str, int]

    def users_in_fold(self, fold: int) -> tuple[str, ...]:
        return tuple(sorted(u for u, f in self.folds.items() if f == fold))


def plan_splits(
    ds: InteractionDataset,
    fold_count: int = 10,
    given_n: int = 10,
    min_train_items: int = 10,
    rng_seed: int = 0,
) -> SplitPlan:
    """Partition eligible users into ``fold_count`` folds of near-equal size.

    A user is eligible when their profile holds at least
    ``given_n + min_train_items`` interactions, so that hiding ``given_n``
    items always leaves at least ``min_train_items`` for training.
    Ineligible users stay out of every fold and are used as training-only
    users. The same seed always yields the same plan.
    """
    if fold_count < 1:
        raise ValueError("fold_count must be >= 1")
    if given_n < 1:
        raise ValueError("given_n must be >= 1")
    if min_train_items < 1:
        raise ValueError("min_train_items must be >= 1")
    threshold = given_n + min_train_items
    eligible = sorted(u for u in ds.users if ds.has_user(u) and len(ds.profile(u)) >= threshold)
    if not eligible:
        raise ProtocolError(
            f"no user has the {threshold} interactions required by the holdout protocol"
        )
    if len(eligible) < fold_count:
        raise ProtocolError(
            f"only {len(eligible)} eligible users for {fold_count} folds"
        )
    rng = random.Random(rng_seed)
    rng.shuffle(eligible)
    folds = {u: i % fold_count for i, u in enumerate(eligible)}
    return SplitPlan(
        fold_count=fold_count,
        given_n=given_n,
        min_train_items=min_train_items,
        rng_seed=rng_seed,
        folds=folds,
    )


@dataclass(frozen=True)
class HoldoutSplit:
    """One fold's training dataset plus the per-user hidden item sets."""

    train: InteractionDataset
    hidden: Mapping[str, frozenset[str]]


def materialize_split(ds: InteractionDataset, plan: SplitPlan, fold: int) -> HoldoutSplit:
    """Hide ``given_n`` random items for every user of ``fold``.

    The training dataset keeps every other interaction along with the full
    user and item catalogs of ``ds``. Hidden items are drawn per user with
    an rng seeded from (plan seed, fold, user id), so the split depends only
    on those values and never on iteration order.
    """
    if not 0 <= fold < plan.fold_count:
        raise ValueError(f"fold must be in [0, {plan.fold_count}), got {fold}")
    hidden: dict[str, frozenset[str]] = {}
    for user in plan.users_in_fold(fold):
        candidates = sorted(ds.profile(user))
        # string seeds hash the text itself, immune to per-process hash randomization
        rng = random.Random(f"{plan.rng_seed}:{fold}:{user}")
        hidden[user] = frozenset(rng.sample(candidates, plan.given_n))
    hidden_pairs = {(u, i) for u, items in hidden.items() for i in items}
    train_rows = tuple(
        x for x in ds.interactions if (x.user_id, x.item_id) not in hidden_pairs
    )
    train = InteractionDataset(train_rows, users=ds.users, items=ds.items)
    return HoldoutSplit(train=train, hidden=hidden)
