from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from src.data.dataset import PreparedUser
from src.model.models.mdhan import MDHAN, ForwardOutput


@dataclass(frozen=True)
class TokenWeight:
    token: str
    position: int
    weight: float


@dataclass(frozen=True)
class TweetAttention:
    text: str
    position: int
    weight: float

    # ranked by weight, ties by position
    tokens: tuple[TokenWeight, ...]


@dataclass(frozen=True)
class AttentionReport:
    """
    Explanation of a single classification: the tweets of the user ranked by tweet-level attention, each
    with its tokens ranked by word-level attention. Weights are exactly those of the forward pass which
    produced `y_hat`
    """

    user_id: str
    label: int
    y_hat: float
    tweets: tuple[TweetAttention, ...]

    @property
    def prediction(self) -> int:
        return int(self.y_hat >= 0.5)

    def to_dict(self) -> dict:
        report_dict = asdict(self)
        report_dict["prediction"] = self.prediction
        return report_dict

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _rank(weights: list[float]) -> list[int]:
    # descending weight, ties broken by original position
    return sorted(range(len(weights)), key=lambda position: (-weights[position], position))


def token_weights(word_alpha: np.ndarray, n_tokens: int, max_pool_words: int = None) -> np.ndarray:
    """
    Per token weights of a tweet. With max pooling, attention is over windows of `max_pool_words`
    tokens: the weight of a window is split evenly among its tokens
    """

    if max_pool_words is None:
        return word_alpha[:n_tokens]

    weights = np.zeros(n_tokens)
    for window in range(-(-n_tokens // max_pool_words)):
        start, stop = window * max_pool_words, min((window + 1) * max_pool_words, n_tokens)
        weights[start:stop] = word_alpha[window] / (stop - start)

    return weights


def _build_report(model: MDHAN, user: PreparedUser, output: ForwardOutput, batch_idx: int) -> AttentionReport:

    cfg = model.config
    visible = user.truncated(cfg.l_max)

    tweets = []
    for position, (text, tokens) in enumerate(zip(visible.tweet_texts, visible.tweet_tokens)):
        tokens = tokens[:cfg.n_max]

        alpha = token_weights(output.word_alpha[batch_idx, position], len(tokens), cfg.max_pool_words)
        alpha = [float(weight) for weight in alpha]

        ranked_tokens = tuple(TokenWeight(token=tokens[idx], position=idx, weight=alpha[idx])
                              for idx in _rank(alpha))

        tweets.append(TweetAttention(text=text,
                                     position=position,
                                     weight=float(output.tweet_alpha[batch_idx, position]),
                                     tokens=ranked_tokens))

    ranked_tweets = tuple(tweets[idx] for idx in _rank([tweet.weight for tweet in tweets]))

    return AttentionReport(user_id=user.user_id,
                           label=user.label,
                           y_hat=float(output.y_hat.values[batch_idx]),
                           tweets=ranked_tweets)


def extract_attention_batch(model: MDHAN, users: list[PreparedUser]) -> list[AttentionReport]:
    """
    Classifies `users` (dropout off) and pairs the attention weights of that same forward pass with the
    tweets and tokens they refer to
    """

    if not model.config.use_tweets:
        raise ValueError("Attention explanations need a model with the tweet encoder enabled!")

    reports = []
    batch_size = model.config.batch_size
    for start, output in zip(range(0, len(users), batch_size), model.classify(users)):
        batch_users = users[start:start + batch_size]
        reports.extend(_build_report(model, user, output, idx) for idx, user in enumerate(batch_users))

    return reports


def extract_attention(model: MDHAN, user: PreparedUser) -> AttentionReport:
    [report] = extract_attention_batch(model, [user])
    return report
