from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass

import pandas as pd
from loguru import logger

from src.data.corpus import Corpus
from src.data.lexicons import SymptomLexicon, SYMPTOM_CATEGORIES
from src.data.preprocess import preprocess_tweet, tokenize

RANK_RULES = ("mentions", "tweets")


@dataclass
class WordCloudData:
    # category -> (token, count) in descending count, ties lexicographic
    frequencies: dict[str, list[tuple[str, int]]]

    # category -> total keyword matches and number of pooled tweets
    mentions: dict[str, int]
    n_tweets: dict[str, int]

    def to_frame(self) -> pd.DataFrame:
        rows = [{"category": category, "token": token, "count": count}
                for category in SYMPTOM_CATEGORIES
                for token, count in self.frequencies[category]]

        return pd.DataFrame(rows, columns=["category", "token", "count"])

    def save_csv(self, path: str):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        self.to_frame().to_csv(path, index=False)


def symptom_wordclouds(corpus: Corpus, symptom_lex: SymptomLexicon, stopwords: frozenset[str],
                       top_n: int = 50) -> WordCloudData:
    """
    For each symptom category, pools the tweets mentioning at least one of its keywords and counts their
    tokens (stopwords excluded, no truncation)
    """

    if top_n < 1:
        raise ValueError(f"top_n should be >= 1, got {top_n}")

    counters = {category: Counter() for category in SYMPTOM_CATEGORIES}
    mentions = dict.fromkeys(SYMPTOM_CATEGORIES, 0)
    n_tweets = dict.fromkeys(SYMPTOM_CATEGORIES, 0)

    for user in corpus:
        for tweet in user.tweets:
            tokens = tokenize(tweet.text)
            content_tokens = None

            for category in SYMPTOM_CATEGORIES:
                n_matches = symptom_lex.matchers[category].count(tokens)
                if n_matches == 0:
                    continue

                if content_tokens is None:
                    content_tokens = preprocess_tweet(tweet.text, stopwords, n_max=None)

                counters[category].update(content_tokens)
                mentions[category] += n_matches
                n_tweets[category] += 1

    frequencies = {category: sorted(counter.items(), key=lambda item: (-item[1], item[0]))[:top_n]
                   for category, counter in counters.items()}

    empty = [category for category in SYMPTOM_CATEGORIES if n_tweets[category] == 0]
    if empty:
        logger.debug(f"No tweet mentions the symptom categories {empty}")

    return WordCloudData(frequencies=frequencies, mentions=mentions, n_tweets=n_tweets)


def top_symptom_categories(data: WordCloudData, n: int = 5, rank_by: str = "mentions") -> list[str]:
    """
    The `n` categories with most keyword mentions (or most pooled tweets), ties in lexicon order.
    Categories never mentioned are excluded
    """

    if rank_by not in RANK_RULES:
        raise ValueError(f"rank_by should be one of {RANK_RULES}, got {rank_by}")

    scores = data.mentions if rank_by == "mentions" else data.n_tweets

    ranked = sorted((category for category in SYMPTOM_CATEGORIES if scores[category] > 0),
                    key=lambda category: (-scores[category], SYMPTOM_CATEGORIES.index(category)))

    return ranked[:n]
