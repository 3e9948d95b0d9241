from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from src.data.corpus import UserRecord, PROFILE_FIELDS
from src.data.lexicons import (Lexicons, EmojiLexicon, VadLexicon, SymptomLexicon, AntidepressantLexicon,
                               SYMPTOM_CATEGORIES, FIRST_PERSON_SINGULAR, FIRST_PERSON_PLURAL)
from src.data.preprocess import preprocess_tweet, tokenize
from src.data.topics import LdaModel, infer_doc_topics

MODALITIES = ("S", "E", "T", "D")

SOCIAL_NAMES = (*PROFILE_FIELDS, "tweet_count", "total_char_length", "retweet_count", "mention_count",
                *(f"hour_{hour:02d}" for hour in range(24)))
EMOTION_NAMES = ("pos_emoji_count", "neu_emoji_count", "neg_emoji_count", "valence_sum", "arousal_sum",
                 "dominance_sum", "first_person_singular_count", "first_person_plural_count")
TOPIC_NAMES = tuple(f"topic_{topic:02d}" for topic in range(25))
DOMAIN_NAMES = (*(f"symptom_{category}" for category in SYMPTOM_CATEGORIES), "antidepressant_count")


@dataclass(frozen=True)
class ModalityLayout:
    """
    Allocation of the 76 multi-modal dimensions: Social (33), Emotion (8), Topic (25), Domain (10),
    laid out contiguously in this order
    """

    S: int = len(SOCIAL_NAMES)
    E: int = len(EMOTION_NAMES)
    T: int = len(TOPIC_NAMES)
    D: int = len(DOMAIN_NAMES)

    @property
    def total(self) -> int:
        return self.S + self.E + self.T + self.D

    def length(self, modality: str) -> int:
        if modality not in MODALITIES:
            raise KeyError(f"Modality {modality} does not exist!")
        return getattr(self, modality)

    def slice(self, modality: str) -> slice:
        start = 0
        for name in MODALITIES:
            if name == modality:
                return slice(start, start + self.length(name))
            start += self.length(name)

        raise KeyError(f"Modality {modality} does not exist!")

    @staticmethod
    def names() -> list[str]:
        return [*SOCIAL_NAMES, *EMOTION_NAMES, *TOPIC_NAMES, *DOMAIN_NAMES]

    def mask_vector(self, modality_mask: tuple[bool, bool, bool, bool]) -> np.ndarray:
        # 1 on the dimensions of enabled modalities, 0 elsewhere
        if len(modality_mask) != len(MODALITIES):
            raise ValueError(f"Modality mask should have {len(MODALITIES)} entries (S, E, T, D), "
                             f"got {len(modality_mask)}")

        mask = np.zeros(self.total, dtype=np.float64)
        for modality, enabled in zip(MODALITIES, modality_mask):
            if enabled:
                mask[self.slice(modality)] = 1.0

        return mask


LAYOUT = ModalityLayout()


@dataclass
class FeatureVector:
    values: np.ndarray
    layout: ModalityLayout = LAYOUT

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)

        if self.values.shape != (self.layout.total,):
            raise ValueError(f"Feature vector should have shape ({self.layout.total},), got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Feature vector contains non finite values!")

    def modality(self, name: str) -> np.ndarray:
        return self.values[self.layout.slice(name)]


def user_document(user: UserRecord, stopwords: frozenset[str]) -> list[str]:
    # concatenation of the preprocessed tweets of the user, the document unit of the topic model
    return [token for tweet in user.tweets for token in preprocess_tweet(tweet.text, stopwords, n_max=None)]


def social_features(user: UserRecord) -> np.ndarray:

    if len(user.tweets) == 0:
        raise ValueError(f"User {user.user_id} has no tweets, social features are undefined")

    hour_histogram = np.zeros(24, dtype=np.float64)
    for tweet in user.tweets:
        hour_histogram[tweet.timestamp.hour] += 1

    activity = [
        len(user.tweets),
        sum(len(tweet.text) for tweet in user.tweets),
        sum(1 for tweet in user.tweets if tweet.is_retweet),
        sum(1 for tweet in user.tweets for raw_token in tweet.text.split() if raw_token.startswith("@"))
    ]

    profile = [getattr(user, profile_field) for profile_field in PROFILE_FIELDS]

    return np.concatenate([np.array(profile + activity, dtype=np.float64), hour_histogram])


def emotion_features(user: UserRecord, emoji_lex: EmojiLexicon, vad_lex: VadLexicon) -> np.ndarray:

    emoji_counts = np.zeros(3, dtype=np.float64)
    vad_sums = np.zeros(3, dtype=np.float64)
    singular = 0
    plural = 0

    for tweet in user.tweets:
        emoji_counts += emoji_lex.count(tweet.text)

        tokens = tokenize(tweet.text)
        vad_sums += vad_lex.score(tokens)
        singular += sum(1 for token in tokens if token in FIRST_PERSON_SINGULAR)
        plural += sum(1 for token in tokens if token in FIRST_PERSON_PLURAL)

    return np.concatenate([emoji_counts, vad_sums, np.array([singular, plural], dtype=np.float64)])


def topic_features(user: UserRecord, model: LdaModel, stopwords: frozenset[str]) -> np.ndarray:

    if model.K != LAYOUT.T:
        raise ValueError(f"Topic features need a model with K={LAYOUT.T} topics, got K={model.K}")

    return infer_doc_topics(model, user_document(user, stopwords))


def domain_features(user: UserRecord, symptom_lex: SymptomLexicon, antidep_lex: AntidepressantLexicon) -> np.ndarray:

    symptom_counts = np.zeros(len(SYMPTOM_CATEGORIES), dtype=np.float64)
    antidepressant_count = 0

    for tweet in user.tweets:
        tokens = tokenize(tweet.text)
        symptom_counts += symptom_lex.count(tokens)
        antidepressant_count += antidep_lex.count(tokens)

    return np.concatenate([symptom_counts, np.array([antidepressant_count], dtype=np.float64)])


def assemble(social: np.ndarray, emotion: np.ndarray, topic: np.ndarray, domain: np.ndarray,
             layout: ModalityLayout = LAYOUT) -> FeatureVector:

    for modality, values in zip(MODALITIES, (social, emotion, topic, domain)):
        if len(values) != layout.length(modality):
            raise AssertionError(f"Modality {modality} should have {layout.length(modality)} values, "
                                 f"got {len(values)}")

    return FeatureVector(np.concatenate([social, emotion, topic, domain]), layout)


class FeatureExtractor:

    def __init__(self, lexicons: Lexicons, lda_model: LdaModel):
        self.lexicons = lexicons
        self.lda_model = lda_model

    def extract(self, user: UserRecord) -> FeatureVector:
        return assemble(
            social_features(user),
            emotion_features(user, self.lexicons.emoji, self.lexicons.vad),
            topic_features(user, self.lda_model, self.lexicons.stopwords),
            domain_features(user, self.lexicons.symptoms, self.lexicons.antidepressants)
        )

    def extract_matrix(self, users: list[UserRecord]) -> np.ndarray:
        if len(users) == 0:
            return np.zeros((0, LAYOUT.total), dtype=np.float64)

        return np.stack([self.extract(user).values for user in users])


@dataclass
class NormStats:
    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)

        if np.any(self.std <= 0):
            raise ValueError("Standard deviations of NormStats should be > 0")


STD_FLOOR = 1e-8


def fit_norm(train: list[FeatureVector] | np.ndarray) -> NormStats:

    matrix = np.stack([vector.values for vector in train]) if isinstance(train, list) else np.asarray(train)

    if len(matrix) == 0:
        raise ValueError("Can't fit normalization statistics on an empty train set!")

    return NormStats(mean=matrix.mean(axis=0), std=np.maximum(matrix.std(axis=0), STD_FLOOR))


def apply_norm(vector: FeatureVector | np.ndarray, stats: NormStats) -> FeatureVector | np.ndarray:

    if isinstance(vector, FeatureVector):
        return FeatureVector((vector.values - stats.mean) / stats.std, vector.layout)

    return (np.asarray(vector, dtype=np.float64) - stats.mean) / stats.std


def export_csv(user_ids: list[str], matrix: np.ndarray, path: str):

    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

    features_df = pd.DataFrame(matrix, columns=ModalityLayout.names(), index=pd.Index(user_ids, name="user_id"))
    features_df.to_csv(path)
