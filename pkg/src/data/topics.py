from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
from tqdm import tqdm

from src import SchemaError
from src.utils import make_rng


@dataclass
class LdaConfig:
    K: int = 25
    alpha: float = None
    beta: float = 0.01
    iterations: int = 500
    seed: int = 42
    fold_in_sweeps: int = 50

    def __post_init__(self):
        if self.K < 2:
            raise ValueError(f"K should be >= 2, got {self.K}")

        # symmetric prior 50/K when not specified
        if self.alpha is None:
            self.alpha = 50 / self.K

        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError(f"alpha and beta should be > 0, got alpha={self.alpha}, beta={self.beta}")
        if self.iterations < 1 or self.fold_in_sweeps < 1:
            raise ValueError("iterations and fold_in_sweeps should be >= 1")

    @classmethod
    def from_parse(cls, lda_section: dict | None):
        if lda_section is None:
            return cls()

        valid_keys = {field.name for field in dataclasses.fields(cls)}
        unknown_keys = set(lda_section) - valid_keys
        if unknown_keys:
            raise SchemaError(f"Unknown lda parameters: {sorted(unknown_keys)}")

        return cls(**lda_section)


@numba.njit(cache=False)
def _gibbs_sweep(words, docs, z, ndk, nkw, nk, alpha, beta, v_beta, uniforms):
    n_topics = nk.shape[0]
    cumulative = np.empty(n_topics)

    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]

        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1

        total = 0.0
        for t in range(n_topics):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + v_beta)
            cumulative[t] = total

        u = uniforms[i] * total
        k = 0
        while k < n_topics - 1 and u >= cumulative[k]:
            k += 1

        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


@numba.njit(cache=False)
def _fold_in(words, z, phi, alpha, uniforms):
    # topic-word distribution is frozen, only the document counts are resampled.
    # Returns the token-topic conditionals summed over tokens and sweeps
    n_topics = phi.shape[0]
    n_sweeps = uniforms.shape[0]
    n_tokens = words.shape[0]

    ndk = np.zeros(n_topics)
    for i in range(n_tokens):
        ndk[z[i]] += 1

    accumulated = np.zeros(n_topics)
    conditional = np.empty(n_topics)
    for sweep in range(n_sweeps):
        for i in range(n_tokens):
            w = words[i]
            ndk[z[i]] -= 1

            total = 0.0
            for t in range(n_topics):
                conditional[t] = (ndk[t] + alpha) * phi[t, w]
                total += conditional[t]

            u = uniforms[sweep, i] * total
            running = 0.0
            k = n_topics - 1
            for t in range(n_topics):
                running += conditional[t]
                if u < running:
                    k = t
                    break

            for t in range(n_topics):
                accumulated[t] += conditional[t] / total

            z[i] = k
            ndk[k] += 1

    return accumulated


@dataclass
class LdaModel:
    config: LdaConfig
    vocab: list[str]
    topic_word_counts: np.ndarray

    def __post_init__(self):
        self.topic_word_counts = np.asarray(self.topic_word_counts, dtype=np.int64)

        if self.topic_word_counts.shape != (self.config.K, len(self.vocab)):
            raise SchemaError(f"Topic-word counts of shape {self.topic_word_counts.shape} don't match "
                              f"K={self.config.K} and a vocabulary of {len(self.vocab)} tokens")

        self.token2idx = {token: idx for idx, token in enumerate(self.vocab)}

    @property
    def K(self) -> int:
        return self.config.K

    @cached_property
    def phi(self) -> np.ndarray:
        beta = self.config.beta
        n_vocab = len(self.vocab)
        topic_totals = self.topic_word_counts.sum(axis=1, keepdims=True)

        return (self.topic_word_counts + beta) / (topic_totals + n_vocab * beta)

    def save(self, path: str):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)

        model_dict = {
            "config": dataclasses.asdict(self.config),
            "vocab": self.vocab,
            "topic_word_counts": self.topic_word_counts.tolist()
        }

        with open(path, "w", encoding="utf-8") as f:
            json.dump(model_dict, f, sort_keys=True)
            f.write("\n")

    @classmethod
    def load(cls, path: str) -> LdaModel:

        if not os.path.isfile(path):
            raise FileNotFoundError(f"LDA model {path} not found!")

        with open(path, "r", encoding="utf-8") as f:
            try:
                model_dict = json.load(f)
                return cls(config=LdaConfig(**model_dict["config"]),
                           vocab=list(model_dict["vocab"]),
                           topic_word_counts=np.array(model_dict["topic_word_counts"], dtype=np.int64))
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise SchemaError(f"{path}: malformed LDA model ({e})") from None


def fit_lda(docs: list[list[str]], cfg: LdaConfig) -> LdaModel:
    """
    Collapsed Gibbs sampling for `cfg.iterations` sweeps. The vocabulary is the sorted set of tokens of
    `docs`, initial assignments and the uniforms consumed by each sweep come from the seeded PCG64 stream
    """

    vocab = sorted({token for doc in docs for token in doc})
    if len(vocab) == 0:
        raise ValueError("Can't fit LDA: the vocabulary of the documents is empty!")

    token2idx = {token: idx for idx, token in enumerate(vocab)}

    words = np.array([token2idx[token] for doc in docs for token in doc], dtype=np.int64)
    doc_ids = np.array([doc_idx for doc_idx, doc in enumerate(docs) for _ in doc], dtype=np.int64)

    n_topics = cfg.K
    rng = make_rng(cfg.seed)

    z = rng.integers(0, n_topics, size=len(words)).astype(np.int64)

    ndk = np.zeros((len(docs), n_topics), dtype=np.int64)
    nkw = np.zeros((n_topics, len(vocab)), dtype=np.int64)
    np.add.at(ndk, (doc_ids, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)

    v_beta = len(vocab) * cfg.beta
    for _ in tqdm(range(cfg.iterations), desc="Gibbs sweeps", leave=False):
        uniforms = rng.random(len(words))
        _gibbs_sweep(words, doc_ids, z, ndk, nkw, nk, float(cfg.alpha), float(cfg.beta), v_beta, uniforms)

    return LdaModel(config=cfg, vocab=vocab, topic_word_counts=nkw)


def infer_doc_topics(model: LdaModel, doc: list[str]) -> np.ndarray:
    """
    Fold-in Gibbs sampling with the topic-word distribution of `model` frozen. The returned distribution
    is the smoothed average of the token-topic conditionals, tokens unknown to the model are skipped
    """

    n_topics = model.K
    words = np.array([model.token2idx[token] for token in doc if token in model.token2idx], dtype=np.int64)

    if len(words) == 0:
        return np.full(n_topics, 1 / n_topics)

    # fresh stream at each call: the same document always gets the same distribution
    rng = make_rng(model.config.seed, 4)
    z = rng.integers(0, n_topics, size=len(words)).astype(np.int64)
    uniforms = rng.random((model.config.fold_in_sweeps, len(words)))

    accumulated = _fold_in(words, z, model.phi, float(model.config.alpha), uniforms)

    expected_counts = accumulated / model.config.fold_in_sweeps
    theta = expected_counts + model.config.alpha

    return theta / theta.sum()


def top_words(model: LdaModel, topic: int, n: int) -> list[tuple[str, float]]:

    if not 0 <= topic < model.K:
        raise IndexError(f"Topic {topic} out of range, model has {model.K} topics")

    topic_phi = model.phi[topic]

    # descending probability, ties lexicographic
    order = np.lexsort((np.array(model.vocab, dtype=str), -topic_phi))

    return [(model.vocab[idx], float(topic_phi[idx])) for idx in order[:max(n, 0)]]
