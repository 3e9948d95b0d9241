from __future__ import annotations

import os
from datetime import datetime, timedelta, timezone
from typing import Literal

import numpy as np

from src import ASSETS_DIR
from src.data.corpus import Corpus, TweetRecord, UserRecord
from src.data.lexicons import EmbeddingTable, load_stopwords, load_symptom_lexicon
from src.utils import make_rng

CHANNELS = ("text", "social", "emotion")

# everyday words which carry no label information
NEUTRAL_WORDS = (
    "coffee", "morning", "weekend", "music", "movie", "game", "pizza", "friends", "family", "work",
    "office", "beach", "summer", "winter", "rain", "sunny", "dinner", "lunch", "breakfast", "book",
    "reading", "football", "basketball", "concert", "travel", "city", "park", "dog", "cat", "garden",
    "shopping", "pasta", "tea", "class", "homework", "exam", "project", "meeting", "email", "phone",
    "laptop", "series", "episode", "season", "team", "match", "goal", "birthday", "party", "cake",
    "holiday", "train", "bus", "car", "road", "street", "news", "weather", "photo", "picture",
)

NEGATIVE_EMOJI = ("😞", "😔", "😢", "😭", "😩", "💔")
BASE_EMOJI = ("😀", "😂", "😊", "👍", "🎉", "😐", "🤔", "👀", "😞", "😢")

_START = datetime(2020, 1, 1, tzinfo=timezone.utc)


def signal_vocabulary(text_vocab: Literal["symptom", "latent"] = "symptom",
                      assets_dir: str = ASSETS_DIR) -> tuple[str, ...]:
    """
    Words drawn by signal-bearing tweets: the single-word symptom seeds shipped in the assets (stopwords
    excluded) or a set of latent pseudo-words which no lexicon knows about
    """

    if text_vocab == "latent":
        return tuple(f"zq{idx:02d}" for idx in range(40))

    if text_vocab != "symptom":
        raise ValueError(f"text_vocab should be 'symptom' or 'latent', got {text_vocab!r}")

    stopwords = load_stopwords(os.path.join(assets_dir, "stopwords.txt"))
    seeds = load_symptom_lexicon(os.path.join(assets_dir, "symptom_seeds.txt")).all_keywords()

    return tuple(sorted(seed for seed in seeds if " " not in seed and "'" not in seed and seed not in stopwords))


def synth_corpus(n_users: int,
                 signal: float,
                 seed: int,
                 channels: tuple[str, ...] = CHANNELS,
                 text_vocab: Literal["symptom", "latent"] = "symptom",
                 split_families: bool = False,
                 tweets_per_user: int = 20,
                 tokens_per_tweet: int = 8,
                 assets_dir: str = ASSETS_DIR) -> Corpus:
    """
    Generates a balanced corpus (even index -> label 0, odd index -> label 1). Every tweet of a depressed
    user is signal-bearing with probability `signal`: a signal-bearing tweet draws its words from the
    signal vocabulary (text channel), is posted between 00:00 and 04:59 UTC (social channel) and ends with
    a negative emoji (emotion channel). Everything else is drawn independently of the label, so that
    `signal=0` yields label-independent data.

    With `split_families`, depressed users alternate between carrying the signal through text only and
    through the modality channels only
    """

    if n_users <= 0 or n_users % 2 != 0:
        raise ValueError(f"n_users should be a positive even number, got {n_users}")
    if not 0 <= signal <= 1:
        raise ValueError(f"signal should be in [0, 1], got {signal}")
    unknown_channels = set(channels) - set(CHANNELS)
    if unknown_channels:
        raise ValueError(f"Unknown signal channels {sorted(unknown_channels)}, allowed are {CHANNELS}")
    if tweets_per_user < 1 or tokens_per_tweet < 1:
        raise ValueError("tweets_per_user and tokens_per_tweet should be >= 1")

    signal_words = signal_vocabulary(text_vocab, assets_dir)
    rng = make_rng(seed)

    users = []
    n_depressed = 0
    for user_idx in range(n_users):
        label = user_idx % 2

        user_channels = set(channels)
        if label == 1:
            if split_families:
                family = {"text"} if n_depressed % 2 == 0 else {"social", "emotion"}
                user_channels &= family
            n_depressed += 1

        tweets = []
        for tweet_idx in range(tweets_per_user):

            # drawn for every tweet of every user so that both classes consume the stream alike
            is_signal = rng.random() < signal and label == 1

            if is_signal and "text" in user_channels:
                words = list(rng.choice(signal_words, size=tokens_per_tweet))
            else:
                words = list(rng.choice(NEUTRAL_WORDS, size=tokens_per_tweet))

            if rng.random() < 0.2:
                words.insert(0, f"@friend{int(rng.integers(100))}")
            if rng.random() < 0.1:
                words.append(f"http://t.co/{int(rng.integers(16 ** 6)):06x}")

            base_emoji = rng.choice(BASE_EMOJI) if rng.random() < 0.3 else None
            if is_signal and "emotion" in user_channels:
                words.append(str(rng.choice(NEGATIVE_EMOJI)))
            elif base_emoji is not None:
                words.append(str(base_emoji))

            if is_signal and "social" in user_channels:
                hour = int(rng.integers(0, 5))
            else:
                hour = int(rng.integers(0, 24))
            minute = int(rng.integers(0, 60))

            timestamp = _START + timedelta(days=tweet_idx, hours=hour, minutes=minute)
            is_retweet = bool(rng.random() < 0.1)

            tweets.append(TweetRecord(text=" ".join(str(word) for word in words),
                                      timestamp=timestamp,
                                      is_retweet=is_retweet))

        users.append(UserRecord(user_id=f"user_{user_idx:05d}",
                                label=label,
                                followers=int(rng.integers(10, 3000)),
                                friends=int(rng.integers(10, 2000)),
                                favourites=int(rng.integers(0, 10000)),
                                listed=int(rng.integers(0, 50)),
                                statuses=int(rng.integers(tweets_per_user, 20000)),
                                tweets=tuple(tweets)))

    return Corpus(users=users, name=f"synth_{n_users}_{signal}_{seed}")


def synth_embeddings(vocab: list[str] | tuple[str, ...], dim: int = 100, seed: int = 42) -> EmbeddingTable:
    """
    Seeded gaussian embeddings for the sorted unique `vocab`, scaled so that every vector has unit
    expected norm
    """

    tokens = sorted(set(vocab))
    rng = make_rng(seed, 3)

    vectors = rng.normal(0.0, 1.0 / np.sqrt(dim), size=(len(tokens), dim))

    return EmbeddingTable(dimension=dim, tokens=tokens, vectors=vectors)
