from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from loguru import logger

from src import SchemaError
from src.utils import make_rng


class CorpusFormatError(SchemaError):
    pass


PROFILE_FIELDS = ("followers", "friends", "favourites", "listed", "statuses")


def parse_timestamp(raw) -> datetime:
    """
    Timestamps are ISO-8601 strings (a trailing 'Z' is accepted) or unix epoch seconds.
    Naive datetimes are assumed to be UTC, everything is truncated to second resolution
    """

    if isinstance(raw, bool):
        raise ValueError(f"Invalid timestamp {raw!r}")

    if isinstance(raw, (int, float)):
        if not np.isfinite(raw):
            raise ValueError(f"Invalid timestamp {raw!r}")
        parsed = datetime.fromtimestamp(raw, tz=timezone.utc)
    elif isinstance(raw, str):
        raw = raw.strip()
        if raw.endswith("Z"):
            raw = raw[:-1] + "+00:00"
        parsed = datetime.fromisoformat(raw)
    else:
        raise ValueError(f"Invalid timestamp {raw!r}")

    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)

    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(timestamp: datetime) -> str:
    return timestamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class TweetRecord:
    text: str
    timestamp: datetime
    is_retweet: bool = False

    def __post_init__(self):
        if not isinstance(self.text, str) or len(self.text.strip()) == 0:
            raise ValueError("Tweet text can't be empty!")

    @classmethod
    def from_dict(cls, raw: dict) -> TweetRecord:
        return cls(text=raw["text"],
                   timestamp=parse_timestamp(raw["timestamp"]),
                   is_retweet=bool(raw.get("is_retweet", False)))

    def to_dict(self) -> dict:
        return {"text": self.text, "timestamp": format_timestamp(self.timestamp), "is_retweet": self.is_retweet}


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    label: int
    followers: int = 0
    friends: int = 0
    favourites: int = 0
    listed: int = 0
    statuses: int = 0
    tweets: tuple[TweetRecord, ...] = ()

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"Label of user {self.user_id} should be 0 or 1, got {self.label!r}")

        for profile_field in PROFILE_FIELDS:
            value = getattr(self, profile_field)
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ValueError(f"'{profile_field}' of user {self.user_id} should be a count >= 0, got {value!r}")

        # stable sort: tweets sharing the same timestamp keep their original order
        object.__setattr__(self, "tweets", tuple(sorted(self.tweets, key=lambda tweet: tweet.timestamp)))

    @classmethod
    def from_dict(cls, raw: dict) -> UserRecord:

        profile = {profile_field: raw.get(profile_field, 0) for profile_field in PROFILE_FIELDS}

        return cls(user_id=str(raw["user_id"]),
                   label=raw["label"],
                   tweets=tuple(TweetRecord.from_dict(raw_tweet) for raw_tweet in raw["tweets"]),
                   **profile)

    def to_dict(self) -> dict:
        user_dict = {"user_id": self.user_id, "label": self.label}
        user_dict.update({profile_field: getattr(self, profile_field) for profile_field in PROFILE_FIELDS})
        user_dict["tweets"] = [tweet.to_dict() for tweet in self.tweets]

        return user_dict


@dataclass
class Corpus:
    users: list[UserRecord] = field(default_factory=list)
    name: str = "corpus"

    def __post_init__(self):
        seen = set()
        for user in self.users:
            if user.user_id in seen:
                raise CorpusFormatError(f"Duplicate user_id '{user.user_id}' in corpus {self.name}")
            seen.add(user.user_id)

    def __len__(self):
        return len(self.users)

    def __iter__(self):
        return iter(self.users)

    def labels(self) -> np.ndarray:
        return np.array([user.label for user in self.users], dtype=int)

    def by_label(self, label: int) -> list[UserRecord]:
        return [user for user in self.users if user.label == label]


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 42

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction should be in (0, 1), got {self.train_fraction}")


def load_corpus(path: str, name: str = None) -> Corpus:

    if not os.path.isfile(path):
        raise FileNotFoundError(f"Corpus file {path} not found!")

    users = []
    seen = set()
    with open(path, "r", encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):

            if len(line.strip()) == 0:
                continue

            try:
                user = UserRecord.from_dict(json.loads(line))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise CorpusFormatError(f"{path}:{line_number}: malformed user record ({e})") from None

            if user.user_id in seen:
                raise CorpusFormatError(f"{path}:{line_number}: duplicate user_id '{user.user_id}'")
            seen.add(user.user_id)

            users.append(user)

    if name is None:
        name = os.path.splitext(os.path.basename(path))[0]

    return Corpus(users=users, name=name)


def save_corpus(corpus: Corpus, path: str):

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

    # sorted keys and no ascii escaping so that serialization is byte-stable
    with open(path, "w", encoding="utf-8") as f:
        for user in corpus.users:
            f.write(json.dumps(user.to_dict(), sort_keys=True, ensure_ascii=False))
            f.write("\n")


def filter_users(corpus: Corpus, min_posts: int = 10, max_followers: int = 5000) -> Corpus:

    if min_posts < 1:
        raise ValueError(f"min_posts should be >= 1, got {min_posts}")

    kept_users = [user for user in corpus.users
                  if len(user.tweets) >= min_posts and user.followers <= max_followers]

    if len(kept_users) == 0:
        logger.warning(f"No user of corpus {corpus.name} survived filtering "
                       f"(min_posts={min_posts}, max_followers={max_followers})!")

    return Corpus(users=kept_users, name=corpus.name)


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """
    Stratified split: each class is shuffled with its own permutation and the first
    round(train_fraction * n_class) users go to train. Both splits keep the original corpus order
    """

    rng = make_rng(spec.seed)

    train_ids = set()
    for label in (0, 1):
        class_users = corpus.by_label(label)

        if len(class_users) < 2:
            raise ValueError(f"Class {label} has {len(class_users)} users in corpus {corpus.name}, "
                             f"at least 2 are needed to split!")

        n_train = int(round(spec.train_fraction * len(class_users)))
        n_train = min(max(n_train, 1), len(class_users) - 1)

        permutation = rng.permutation(len(class_users))
        train_ids.update(class_users[idx].user_id for idx in permutation[:n_train])

    train_users = [user for user in corpus.users if user.user_id in train_ids]
    test_users = [user for user in corpus.users if user.user_id not in train_ids]

    return Corpus(train_users, name=f"{corpus.name}_train"), Corpus(test_users, name=f"{corpus.name}_test")

